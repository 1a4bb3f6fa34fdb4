// Every shipped example runs to completion.

#[path = "../examples/compose_series.rs"]
mod compose_series;
#[path = "../examples/evolution_family.rs"]
mod evolution_family;
#[path = "../examples/geometric_brownian_flow.rs"]
mod geometric_brownian_flow;
#[path = "../examples/strong_convergence.rs"]
mod strong_convergence;
#[path = "../examples/taylor_truncation.rs"]
mod taylor_truncation;
#[path = "../examples/variation_of_constants.rs"]
mod variation_of_constants;

#[test]
fn compose_series_runs() {
    compose_series::run().unwrap();
}

#[test]
fn evolution_family_runs() {
    evolution_family::run().unwrap();
}

#[test]
fn geometric_brownian_flow_runs() {
    geometric_brownian_flow::run().unwrap();
}

#[test]
fn strong_convergence_runs() {
    strong_convergence::run().unwrap();
}

#[test]
fn taylor_truncation_runs() {
    taylor_truncation::run().unwrap();
}

#[test]
fn variation_of_constants_runs() {
    variation_of_constants::run().unwrap();
}
