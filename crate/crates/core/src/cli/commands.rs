use num_rational::BigRational;
use serde::Serialize;
use serde_json::{json, Value};

use super::config::ExperimentConfig;
use crate::algebra::FormalMapping;
use crate::chain::{evolution_check, solve_chain, BrownianPath, Coefficients};
use crate::error::{Error, Result};
use crate::explicit_formula::variation_of_constants;
use crate::verification::{estimate_order, polynomial_oracle_compose, truncation_scaling_at_order, ConvergenceProblem};

pub const COMPOSE_TOLERANCE: f64 = 1e-12;
pub const EVOLUTION_TOLERANCE: f64 = 1e-10;
pub const FORMULA_TOLERANCE: f64 = 1e-9;
const DEFAULT_SCHEDULE: [usize; 6] = [16, 32, 64, 128, 256, 512];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    Solve,
    ComposeCheck,
    EvolutionCheck,
    TaylorCheck,
    FormulaCheck,
    Convergence,
}

impl Subcommand {
    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Solve => "solve",
            Subcommand::ComposeCheck => "compose-check",
            Subcommand::EvolutionCheck => "evolution-check",
            Subcommand::TaylorCheck => "taylor-check",
            Subcommand::FormulaCheck => "formula-check",
            Subcommand::Convergence => "convergence",
        }
    }

    pub fn is_check(self) -> bool {
        self != Subcommand::Solve
    }
}

/// Result of one subcommand before anything is written.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub passed: bool,
    /// File name and contents of the optional CSV.
    pub csv: Option<(String, String)>,
    pub summary: String,
}

fn csv_string(write: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<String> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports always serialize")
}

pub fn execute(cmd: Subcommand, config: &ExperimentConfig) -> Result<Outcome> {
    match cmd {
        Subcommand::Solve => solve(config),
        Subcommand::ComposeCheck => compose_check(config),
        Subcommand::EvolutionCheck => evolution(config),
        Subcommand::TaylorCheck => taylor(config),
        Subcommand::FormulaCheck => formula(config),
        Subcommand::Convergence => convergence(config),
    }
}

fn sample_path(config: &ExperimentConfig) -> Result<BrownianPath> {
    BrownianPath::sample(&config.grid()?, config.m, config.seed, config.path_index)
}

fn solve(config: &ExperimentConfig) -> Result<Outcome> {
    let coeffs = config.coefficients()?;
    let path = sample_path(config)?;
    let solution = solve_chain(&coeffs, &config.initial_condition()?, &path)?;
    let csv = csv_string(|b| solution.write_norms_csv(b))?;
    let norms = solution.terminal().component_norms();
    Ok(Outcome {
        summary: format!("solved {} steps; terminal component norms {norms:?}", path.n_steps()),
        results: json!({ "solution": to_value(&solution) }),
        passed: true,
        csv: Some(("trajectory.csv".into(), csv)),
    })
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite floats are rational")
}

fn compose_check(config: &ExperimentConfig) -> Result<Outcome> {
    let inputs = config.compose.as_ref().ok_or_else(|| Error::Config {
        field: "compose".into(),
        message: "compose-check needs `compose.outer` and `compose.inner`".into(),
    })?;
    let outer = inputs.outer.pad(config.order)?;
    let inner = inputs.inner.pad(config.order)?;
    let composed = outer.compose(&inner)?;

    let id_in = FormalMapping::identity(config.order, inner.domain_dim())?;
    let id_out = FormalMapping::identity(config.order, inner.codomain_dim())?;
    let identity_laws = inner.compose(&id_in)? == inner && id_out.compose(&inner)? == inner;

    let mut results = json!({
        "composition": to_value(&composed),
        "identity_laws_exact": identity_laws,
    });
    let mut passed = identity_laws;
    if composed.domain_dim() == 1 && composed.codomain_dim() == 1 && outer.domain_dim() == 1 {
        let to_q = |f: &FormalMapping| -> Result<Vec<BigRational>> {
            Ok(f.scalar_coefficients()?.into_iter().map(rational).collect())
        };
        let oracle = polynomial_oracle_compose(&to_q(&outer)?, &to_q(&inner)?, config.order);
        let got = composed.scalar_coefficients()?;
        let exact = got.iter().zip(&oracle).all(|(g, o)| rational(*g) == *o);
        let oracle_f: Vec<f64> = oracle
            .iter()
            .map(|q| num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN))
            .collect();
        let scale = oracle_f
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(f64::MIN_POSITIVE);
        let err = got
            .iter()
            .zip(&oracle_f)
            .map(|(g, o)| (g - o).powi(2))
            .sum::<f64>()
            .sqrt()
            / scale;
        passed &= exact || err <= COMPOSE_TOLERANCE;
        results["coefficients"] = to_value(&got);
        results["oracle"] = to_value(&oracle_f);
        results["oracle_exact"] = json!(exact);
        results["oracle_relative_error"] = json!(err);
    }
    results["passed"] = json!(passed);
    Ok(Outcome {
        summary: format!(
            "composition of order {}: {}",
            composed.order(),
            if passed { "ok" } else { "FAILED" }
        ),
        results,
        passed,
        csv: None,
    })
}

fn evolution(config: &ExperimentConfig) -> Result<Outcome> {
    let coeffs = config.coefficients()?;
    let path = sample_path(config)?;
    let knot = match config.split_time {
        Some(t) => config.grid()?.knot_of(t)?,
        None => config.n_steps / 2,
    };
    if knot == 0 {
        return Err(Error::Config {
            field: "n_steps".into(),
            message: "evolution-check needs at least two steps".into(),
        });
    }
    let report = evolution_check(&coeffs, &path, knot)?;
    let passed = report.passes(EVOLUTION_TOLERANCE);
    let mut results = to_value(&report);
    results["tolerance"] = json!(EVOLUTION_TOLERANCE);
    results["passed"] = json!(passed);
    Ok(Outcome {
        summary: format!(
            "split at knot {knot}: max relative discrepancy {:.3e}",
            report.max_discrepancy
        ),
        results,
        passed,
        csv: None,
    })
}

fn taylor(config: &ExperimentConfig) -> Result<Outcome> {
    let coeffs = config.coefficients()?;
    let y0 = config.y0.clone().unwrap_or_else(|| vec![0.1; config.dy]);
    let order = config.flow_order.unwrap_or(config.order);
    let report = truncation_scaling_at_order(&coeffs, order, &config.grid()?, &y0, config.halvings.unwrap_or(4))?;
    let passed = report.ratios_within_band() || report.at_machine_precision();
    let csv = csv_string(|b| report.write_csv(b))?;
    let mut results = to_value(&report);
    results["passed"] = json!(passed);
    Ok(Outcome {
        summary: format!("gap ratios {:?}, expected {}", report.ratios, report.expected_ratio),
        results,
        passed,
        csv: Some(("scaling.csv".into(), csv)),
    })
}

fn formula(config: &ExperimentConfig) -> Result<Outcome> {
    let coeffs = config.coefficients()?;
    if config.order < 2 {
        return Err(Error::Config {
            field: "order".into(),
            message: "formula-check needs order >= 2".into(),
        });
    }
    let path = sample_path(config)?;
    let chain = solve_chain(&coeffs, &config.initial_condition()?, &path)?;
    let mut per_degree = Vec::new();
    for n in 2..=coeffs.order() {
        let explicit = variation_of_constants(n, &coeffs, &chain, &path)?;
        let worst = explicit
            .iter()
            .zip(&chain.states)
            .map(|(e, s)| crate::algebra::relative_gap(e.entries(), s.component(n).entries()))
            .fold(0.0, f64::max);
        per_degree.push(json!({ "degree": n, "max_relative_discrepancy": worst }));
    }
    let worst = per_degree
        .iter()
        .map(|v| v["max_relative_discrepancy"].as_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let passed = worst <= FORMULA_TOLERANCE;
    Ok(Outcome {
        summary: format!("variation of constants vs chain: max relative discrepancy {worst:.3e}"),
        results: json!({ "degrees": per_degree, "tolerance": FORMULA_TOLERANCE, "passed": passed }),
        passed,
        csv: None,
    })
}

fn convergence(config: &ExperimentConfig) -> Result<Outcome> {
    let problem: ConvergenceProblem = config.problem.clone().ok_or_else(|| Error::Config {
        field: "problem".into(),
        message: "convergence needs a `problem` (gbm, quadratic or second-component)".into(),
    })?;
    let schedule = config
        .step_schedule
        .clone()
        .unwrap_or_else(|| DEFAULT_SCHEDULE.to_vec());
    let report = estimate_order(&problem, &schedule, config.paths, config.seed)?;
    let (expected, band) = problem.expected_order();
    let passed = match report.slope {
        Some(_) => report.slope_within(expected, band),
        None => report.errors.iter().all(|&e| e == 0.0),
    };
    let csv = csv_string(|b| report.write_csv(b))?;
    let mut results = to_value(&report);
    results["expected_slope"] = json!(expected);
    results["band"] = json!(band);
    results["passed"] = json!(passed);
    Ok(Outcome {
        summary: match report.slope {
            Some(s) => format!("fitted slope {s:.3}, expected {expected} +- {band}"),
            None => "all errors are zero; no slope".to_string(),
        },
        results,
        passed,
        csv: Some(("convergence.csv".into(), csv)),
    })
}
