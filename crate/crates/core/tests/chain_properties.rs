use formal_flow::algebra::{enumerate_compositions, DiffusionFamily, DiffusionMap, MultilinearMap};
use formal_flow::chain::{
    evolution_check, forcing_terms, one_step_map, simulate_direct, solve_chain, BrownianPath, Coefficients,
    ConstantCoefficients, SampledCoefficients, TimeGrid,
};
use formal_flow::verification::{random_coefficients, random_mapping, second_component_closed_form};
use formal_flow::{ChainSolution, Error, FormalMapping};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bits(sol: &ChainSolution) -> Vec<u64> {
    sol.states
        .iter()
        .flat_map(|s| {
            s.components()
                .iter()
                .flat_map(|c| c.entries().iter().map(|x| x.to_bits()))
        })
        .collect()
}

fn prefix_bits(sol: &ChainSolution, degrees: usize) -> Vec<u64> {
    sol.states
        .iter()
        .flat_map(|s| {
            s.components()[..degrees]
                .iter()
                .flat_map(|c| c.entries().iter().map(|x| x.to_bits()))
        })
        .collect()
}

fn id(order: usize, d: usize) -> FormalMapping {
    FormalMapping::identity(order, d).unwrap()
}

#[test]
fn zero_coefficients_keep_identity() {
    let c = ConstantCoefficients::zero(3, 2, 2).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 32).unwrap();
    let p = BrownianPath::sample(&g, 2, 1, 0).unwrap();
    let sol = solve_chain(&c, &id(3, 2), &p).unwrap();
    assert_eq!(sol.states.len(), 33);
    assert!(sol.states.iter().all(|s| *s == id(3, 2)));
}

#[test]
fn euler_step_is_composition_with_one_step_map() {
    // explicit update assembled term by term from the enumerated index set
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (order, d, m) = (4, 2, 2);
    let coeffs = random_coefficients(order, d, m, 0.7, 3).unwrap();
    let s = random_mapping(&mut rng, order, d, d, 1.0).unwrap();
    let (dt, dw) = (0.01, [0.05, -0.12]);
    let psi = one_step_map(coeffs.drift(0), coeffs.diffusion(0), dt, &dw).unwrap();
    let via_compose = psi.compose(&s).unwrap();
    for n in 1..=order {
        let mut expected = s.component(n).clone();
        for k in 1..=n {
            for idx in enumerate_compositions(n, k).unwrap() {
                let args: Vec<&MultilinearMap> = idx.parts.iter().map(|&j| s.component(j)).collect();
                let drift = coeffs.drift(0).component(k).apply_to_tuple(&args).unwrap().scale(dt);
                let noise = coeffs
                    .diffusion(0)
                    .component(k)
                    .apply_to_tuple(&args)
                    .unwrap()
                    .contract_noise(&dw)
                    .unwrap();
                expected = expected.add(&drift).unwrap().add(&noise).unwrap();
            }
        }
        let got = via_compose.component(n);
        let diff = got.add(&expected.scale(-1.0)).unwrap().frobenius_norm();
        assert!(diff <= 1e-13 * expected.frobenius_norm(), "degree {n}: {diff}");
    }
}

#[test]
fn repeated_runs_are_bitwise_identical() {
    let c = random_coefficients(4, 3, 2, 0.5, 21).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 64).unwrap();
    let a = solve_chain(&c, &id(4, 3), &BrownianPath::sample(&g, 2, 5, 1).unwrap()).unwrap();
    let b = solve_chain(&c, &id(4, 3), &BrownianPath::sample(&g, 2, 5, 1).unwrap()).unwrap();
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.provenance, b.provenance);
}

#[test]
fn states_depend_only_on_past_increments() {
    let c = random_coefficients(3, 2, 2, 0.5, 4).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 40).unwrap();
    let p = BrownianPath::sample(&g, 2, 8, 0).unwrap();
    let base = solve_chain(&c, &id(3, 2), &p).unwrap();
    for cut in [0, 1, 17, 39] {
        let mut inc = p.increments().to_vec();
        for x in &mut inc[cut * 2..] {
            *x = -3.0 * *x + 0.1;
        }
        let altered = solve_chain(&c, &id(3, 2), &BrownianPath::from_increments(&g, 2, inc).unwrap()).unwrap();
        for i in 0..=cut {
            assert_eq!(
                base.states[i], altered.states[i],
                "state {i} changed when increments from {cut} did"
            );
        }
        assert_ne!(base.states[cut + 1], altered.states[cut + 1]);
    }
}

#[test]
fn no_diffusion_means_no_dependence_on_the_path() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let drift = random_mapping(&mut rng, 4, 2, 2, 0.5).unwrap();
    let c = ConstantCoefficients::deterministic(drift, 3).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 50).unwrap();
    let a = solve_chain(&c, &id(4, 2), &BrownianPath::sample(&g, 3, 1, 0).unwrap()).unwrap();
    let b = solve_chain(&c, &id(4, 2), &BrownianPath::sample(&g, 3, 99, 7).unwrap()).unwrap();
    let z = solve_chain(&c, &id(4, 2), &BrownianPath::zero(&g, 3).unwrap()).unwrap();
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(bits(&a), bits(&z));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn higher_degree_coefficients_do_not_reach_lower_components(seed in any::<u64>(), n in 1usize..4) {
        let order = 4;
        let c = random_coefficients(order, 2, 2, 0.5, seed).unwrap();
        let mut perturbed = c.clone();
        let other = random_coefficients(order, 2, 2, 3.0, seed ^ 0xdead).unwrap();
        for k in n + 1..=order {
            perturbed.drift_mut().set_component(other.drift(0).component(k).clone()).unwrap();
            perturbed.diffusion_mut().set_component(other.diffusion(0).component(k).clone()).unwrap();
        }
        let g = TimeGrid::new(0.0, 1.0, 24).unwrap();
        let p = BrownianPath::sample(&g, 2, seed, 0).unwrap();
        let a = solve_chain(&c, &id(order, 2), &p).unwrap();
        let b = solve_chain(&perturbed, &id(order, 2), &p).unwrap();
        prop_assert_eq!(prefix_bits(&a, n), prefix_bits(&b, n));
    }

    #[test]
    fn composition_of_sub_solutions_matches_full_solution(seed in any::<u64>(), split in 1usize..64) {
        let c = random_coefficients(4, 3, 2, 0.5, seed).unwrap();
        let g = TimeGrid::new(0.0, 1.0, 64).unwrap();
        let p = BrownianPath::sample(&g, 2, seed, 3).unwrap();
        let r = evolution_check(&c, &p, split).unwrap();
        prop_assert!(r.max_discrepancy <= 1e-10, "{:?}", r.discrepancies);
    }
}

#[test]
fn evolution_examples() {
    let g = TimeGrid::new(0.0, 1.0, 32).unwrap();
    let zero = ConstantCoefficients::zero(3, 2, 1).unwrap();
    let p = BrownianPath::sample(&g, 1, 1, 0).unwrap();
    let r = evolution_check(&zero, &p, 10).unwrap();
    assert!(r.discrepancies.iter().all(|&d| d == 0.0));

    let linear = ConstantCoefficients::scalar(&[0.8], &[0.6]).unwrap();
    let r = evolution_check(&linear, &p, 13).unwrap();
    assert!(r.max_discrepancy <= 1e-12);

    assert!(matches!(evolution_check(&linear, &p, 0), Err(Error::Domain(_))));
    assert!(matches!(evolution_check(&linear, &p, 32), Err(Error::Domain(_))));
    assert!(formal_flow::chain::evolution_check_at(&linear, &p, 0.3).is_err());
    assert_eq!(
        formal_flow::chain::evolution_check_at(&linear, &p, 0.375)
            .unwrap()
            .split_knot,
        12
    );
}

fn time_dependent(grid: &TimeGrid) -> SampledCoefficients {
    SampledCoefficients::from_fn(grid, |t| {
        let drift = FormalMapping::from_scalar_coefficients(&[0.5 + t, (3.0 * t).sin(), 0.2 * t])?;
        let diffusion = DiffusionFamily::new(vec![
            DiffusionMap::new(1, 1, 1, 2, vec![0.3 * t.cos(), 0.1])?,
            DiffusionMap::new(2, 1, 1, 2, vec![0.2, -0.4 * t])?,
            DiffusionMap::new(3, 1, 1, 2, vec![0.0, 0.1])?,
        ])?;
        Ok((drift, diffusion))
    })
    .unwrap()
}

#[test]
fn time_dependent_coefficients_form_an_evolution_family() {
    let g = TimeGrid::new(0.0, 1.0, 80).unwrap();
    let c = time_dependent(&g);
    let p = BrownianPath::sample(&g, 2, 6, 0).unwrap();
    for split in [1, 40, 79] {
        let r = evolution_check(&c, &p, split).unwrap();
        assert!(r.max_discrepancy <= 1e-10, "{:?}", r.discrepancies);
    }
    // a window solved on its own picks up the coefficients of its own knots
    let shifted = p.window(40, 80).unwrap();
    let s = solve_chain(&c, &id(3, 1), &shifted).unwrap();
    assert_eq!(s.provenance.knot_offset, 40);
    let short = SampledCoefficients::from_fn(&g.window(0, 10).unwrap(), |_| {
        Ok((FormalMapping::zero(3, 1, 1)?, DiffusionFamily::zero(3, 1, 2)?))
    })
    .unwrap();
    assert!(solve_chain(&short, &id(3, 1), &p).is_err());
}

#[test]
fn sampled_constant_coefficients_match_constant_ones() {
    let g = TimeGrid::new(0.0, 1.0, 20).unwrap();
    let c = random_coefficients(3, 2, 1, 0.5, 12).unwrap();
    let sampled = SampledCoefficients::from_fn(&g, |_| Ok((c.drift(0).clone(), c.diffusion(0).clone()))).unwrap();
    let p = BrownianPath::sample(&g, 1, 2, 0).unwrap();
    let a = solve_chain(&c, &id(3, 2), &p).unwrap();
    let b = solve_chain(&sampled, &id(3, 2), &p).unwrap();
    assert_eq!(bits(&a), bits(&b));
    assert_ne!(a.provenance.coefficients, b.provenance.coefficients);
}

#[test]
fn second_component_converges_to_closed_form() {
    let (alpha, gamma) = (1.0, 0.5);
    let c = ConstantCoefficients::scalar(&[alpha, gamma], &[]).unwrap();
    let err = |steps: usize| {
        let g = TimeGrid::new(0.0, 1.0, steps).unwrap();
        let sol = solve_chain(&c, &id(2, 1), &BrownianPath::zero(&g, 1).unwrap()).unwrap();
        (sol.terminal().component(2).entries()[0] - second_component_closed_form(alpha, gamma, 1.0)).abs()
    };
    let ratio = err(256) / err(512);
    assert!((1.8..2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn direct_simulation_basics() {
    let c = random_coefficients(3, 2, 2, 0.5, 9).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 30).unwrap();
    let p = BrownianPath::sample(&g, 2, 9, 0).unwrap();
    let ys = simulate_direct(&c, &[0.0, 0.0], &p).unwrap();
    assert!(ys.iter().all(|y| y.iter().all(|&v| v == 0.0)));

    // linear coefficients only: the direct path is S_1(t_i) y0
    let lin = ConstantCoefficients::new(c.drift(0).truncate(1).unwrap(), c.diffusion(0).truncate(1).unwrap()).unwrap();
    let y0 = [0.7, -0.4];
    let ys = simulate_direct(&lin, &y0, &p).unwrap();
    let sol = solve_chain(&lin, &id(1, 2), &p).unwrap();
    for (y, s) in ys.iter().zip(&sol.states) {
        let z = s.evaluate(&y0).unwrap();
        for (a, b) in y.iter().zip(&z) {
            assert!((a - b).abs() <= 1e-13 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn scalar_linear_direct_path_matches_flow_bitwise_when_products_are_exact() {
    // dyadic coefficients and increments keep every product exact
    let c = ConstantCoefficients::scalar(&[0.5], &[0.25]).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 8).unwrap();
    let inc = vec![0.5, -0.25, 0.125, 0.0, -0.5, 0.25, 0.125, -0.125];
    let p = BrownianPath::from_increments(&g, 1, inc).unwrap();
    let ys = simulate_direct(&c, &[1.0], &p).unwrap();
    let sol = solve_chain(&c, &id(1, 1), &p).unwrap();
    for (y, s) in ys.iter().zip(&sol.states) {
        assert_eq!(y[0], s.evaluate(&[1.0]).unwrap()[0]);
    }
}

#[test]
fn truncated_flow_matches_direct_solution_to_order() {
    // deterministic, N = 3: gap shrinks by about 2^4 when y0 halves
    let c = ConstantCoefficients::scalar(&[1.0, 0.5, -0.3], &[]).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 100).unwrap();
    let p = BrownianPath::zero(&g, 1).unwrap();
    let flow = solve_chain(&c, &id(3, 1), &p).unwrap();
    let gap = |y0: f64| {
        let direct = simulate_direct(&c, &[y0], &p).unwrap();
        (flow.terminal().evaluate(&[y0]).unwrap()[0] - direct.last().unwrap()[0]).abs()
    };
    for y0 in [0.1, 0.05, 0.025] {
        let ratio = gap(y0) / gap(y0 / 2.0);
        assert!((8.0..=32.0).contains(&ratio), "y0 {y0}: ratio {ratio}");
    }
}

#[test]
fn forcing_of_degree_two_on_a_solution() {
    let c = random_coefficients(3, 2, 2, 0.5, 30).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 10).unwrap();
    let sol = solve_chain(&c, &id(3, 2), &BrownianPath::sample(&g, 2, 1, 0).unwrap()).unwrap();
    let s = &sol.states[7];
    let (f, g2) = forcing_terms(2, s, c.drift(7), c.diffusion(7)).unwrap();
    let s1 = s.component(1);
    assert_eq!(f, c.drift(7).component(2).apply_to_tuple(&[s1, s1]).unwrap());
    assert_eq!(g2, c.diffusion(7).component(2).apply_to_tuple(&[s1, s1]).unwrap());
}

#[test]
fn snapshot_and_trajectory_outputs() {
    let c = ConstantCoefficients::scalar(&[0.1, 0.2], &[0.3, 0.0]).unwrap();
    let g = TimeGrid::new(0.0, 1.0, 4).unwrap();
    let sol = solve_chain(&c, &id(2, 1), &BrownianPath::sample(&g, 1, 77, 3).unwrap()).unwrap();
    let json: serde_json::Value = serde_json::to_value(&sol).unwrap();
    assert_eq!(json["provenance"]["seed"], 77);
    assert_eq!(json["provenance"]["path_index"], 3);
    assert_eq!(json["provenance"]["coefficients"].as_str().unwrap().len(), 64);
    assert_eq!(json["states"].as_array().unwrap().len(), 5);
    assert_eq!(json["states"][0], serde_json::to_value(id(2, 1)).unwrap());
    let mut buf = Vec::new();
    sol.write_norms_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "knot,t,norm_s1,norm_s2");
    assert_eq!(lines.len(), 6);
    assert!(lines[1].starts_with("0,0,1,0"));
}
