//! Fast self-contained checks: profile constants, a coarse solve, the
//! inequality battery on random samples, and the scaling laws.

use std::sync::Arc;
use std::time::Instant;

use nlsgraph::functional::{
    energy, gn_linf_check, gn_lp_ratio, holder_check, mass_parametrized_energy,
    profile_sup_distance, rescale, soliton_params, Exponents, SolitonParams,
};
use nlsgraph::graph::{build_graph, GraphSpec};
use nlsgraph::mesh::{build_mesh, GraphFunction, Mesh, PotentialField};
use nlsgraph::rearrange::{monotone_rearrangement, polya_szego_check};
use nlsgraph::sampling;
use nlsgraph::solver::{normalized_gradient_flow, FlowParams};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn pass(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: true,
            detail,
        }
    }
    fn fail(name: &'static str, detail: String) -> Self {
        CheckResult {
            name,
            passed: false,
            detail,
        }
    }
}

fn line_graph() -> Arc<nlsgraph::graph::MetricGraph> {
    Arc::new(
        build_graph(
            &GraphSpec::default()
                .with_vertices(&["o"])
                .half_line("right", "o")
                .half_line("left", "o"),
        )
        .unwrap(),
    )
}

fn two_bridge_mesh() -> Arc<Mesh> {
    let g = Arc::new(
        build_graph(
            &GraphSpec::default()
                .with_vertices(&["v1", "v2"])
                .finite_edge("core", "v1", "v2", 1.0)
                .half_line("h1", "v1")
                .half_line("h2", "v2"),
        )
        .unwrap(),
    );
    build_mesh(&g, 0.02, 6.0).unwrap()
}

/// Verify given profile constants against the unit-mass and closed-form
/// p = 4 anchors. Exposed with an injectable parameter set so a corrupted
/// set is detectable.
pub fn soliton_constants_check(params4: &SolitonParams) -> CheckResult {
    let name = "soliton-constants";
    let exact = [
        (params4.amplitude, 2.0f64.sqrt() / 4.0),
        (params4.decay, 0.25),
        (params4.theta, 1.0 / 96.0),
    ];
    for (got, want) in exact {
        if (got - want).abs() > 1e-10 * want {
            return CheckResult::fail(name, format!("p=4 constant {got} != {want}"));
        }
    }
    // unit mass by quadrature for two more powers
    for p in [3.0, 5.0] {
        let sp = soliton_params(p).unwrap();
        let mesh = build_mesh(&line_graph(), sp.width(1.0) / 200.0, sp.truncation_for(1.0, 1e-14))
            .unwrap();
        let phi = nlsgraph::functional::soliton(
            &sp,
            1.0,
            &mesh,
            nlsgraph::mesh::PointOnEdge {
                edge: 0,
                offset: 0.0,
            },
        );
        let m = phi.mass();
        if (m - 1.0).abs() > 1e-8 {
            return CheckResult::fail(name, format!("p={p} unit profile mass = {m}"));
        }
        if !(sp.theta > 0.0) {
            return CheckResult::fail(name, format!("p={p} theta = {}", sp.theta));
        }
    }
    CheckResult::pass(name, "p=4 closed form and unit-mass quadrature".into())
}

pub fn soliton_recovery_check() -> CheckResult {
    let name = "soliton-recovery";
    let mesh = build_mesh(&line_graph(), 0.04, 32.0).unwrap();
    let w = PotentialField::zero(&mesh);
    let u0 = GraphFunction::sample(&mesh, |_, x| (-x * x / 32.0).exp());
    let mut params = FlowParams::defaults(&mesh, 4.0, 1.0).unwrap();
    params.max_iters = 400_000;
    let report = match normalized_gradient_flow(&u0, &w, 4.0, 1.0, &params) {
        Ok(r) => r,
        Err(e) => return CheckResult::fail(name, format!("flow error: {e}")),
    };
    let sp = soliton_params(4.0).unwrap();
    let e_err = (report.energy.total + 1.0 / 96.0).abs();
    let sup = profile_sup_distance(&report.minimizer, &sp, 1.0);
    if !report.converged || e_err > 1e-5 || sup > 1e-3 {
        return CheckResult::fail(
            name,
            format!(
                "converged={} energy_err={e_err:.2e} sup={sup:.2e}",
                report.converged
            ),
        );
    }
    CheckResult::pass(name, format!("energy_err={e_err:.2e} sup={sup:.2e}"))
}

pub fn inequality_checks(samples: u64) -> Vec<CheckResult> {
    let mesh = two_bridge_mesh();
    let mut gn_ok = true;
    let mut holder_ok = true;
    let mut equim_ok = true;
    let mut ps_ok = true;
    let mut max_ratio: f64 = 0.0;
    for seed in 0..samples {
        let u = sampling::random_function(&mesh, seed);
        let r = gn_linf_check(&u);
        gn_ok &= r.satisfied;
        let h = holder_check(&u, 2.0, 4.0).unwrap();
        holder_ok &= h.satisfied;
        let nn = sampling::random_nonneg_function(&mesh, seed);
        let star = monotone_rearrangement(&nn);
        for r in [1.0, 2.0, 4.0] {
            let direct: f64 = nn
                .values()
                .iter()
                .zip(&mesh.weights)
                .map(|(v, q)| q * v.abs().powf(r))
                .sum::<f64>()
                .powf(1.0 / r);
            equim_ok &= (direct - star.norm(r)).abs() <= 1e-8 * (1.0 + direct);
        }
        let (_, _, ok) = polya_szego_check(&nn);
        ps_ok &= ok;
        if let Some(q) = gn_lp_ratio(&u, 4.0) {
            max_ratio = max_ratio.max(q);
        }
    }
    let verdict = |name: &'static str, ok: bool| {
        if ok {
            CheckResult::pass(name, format!("{samples} samples"))
        } else {
            CheckResult::fail(name, "violation found".into())
        }
    };
    vec![
        verdict("gn-sup-bound", gn_ok),
        verdict("holder-core", holder_ok),
        verdict("rearrange-equimeasurable", equim_ok),
        verdict("polya-szego", ps_ok),
        CheckResult::pass(
            "gn-lp-ratio-diagnostic",
            format!("max empirical ratio {max_ratio:.6} (reported, not asserted)"),
        ),
    ]
}

pub fn scaling_check(samples: u64) -> CheckResult {
    let name = "scaling-invariance";
    let mesh = two_bridge_mesh();
    for seed in 0..samples {
        let u = sampling::random_function(&mesh, seed);
        let w = sampling::random_potential(&mesh, seed);
        for p in [3.0, 4.0, 5.0] {
            let ex = Exponents::new(p).unwrap();
            let e0 = energy(&u, &w, p).unwrap().total;
            let m0 = u.mass();
            for t in [0.5, 2.0, 10.0] {
                let (ut, wt) = rescale(&u, &w, &ex, t).unwrap();
                let et = energy(&ut, &wt, p).unwrap().total;
                let scale = t.powf(ex.energy_power());
                if (et - scale * e0).abs() > 1e-5 * (scale * e0).abs().max(1e-12) {
                    return CheckResult::fail(name, format!("energy law broken at p={p} t={t}"));
                }
                if (ut.mass() - t * m0).abs() > 1e-8 * t * m0 {
                    return CheckResult::fail(name, format!("mass law broken at p={p} t={t}"));
                }
            }
        }
    }
    CheckResult::pass(name, format!("{samples} samples, p in {{3,4,5}}"))
}

pub fn concavity_check(samples: u64) -> CheckResult {
    let name = "mass-concavity";
    let mesh = two_bridge_mesh();
    let w = PotentialField::zero(&mesh);
    for seed in 0..samples {
        let u = sampling::random_nonneg_function(&mesh, seed)
            .renormalized(1.0)
            .unwrap();
        let d2 = mass_parametrized_energy(&u, &w, 4.0, 1.2).unwrap()
            - 2.0 * mass_parametrized_energy(&u, &w, 4.0, 1.0).unwrap()
            + mass_parametrized_energy(&u, &w, 4.0, 0.8).unwrap();
        if !(d2 < 0.0) {
            return CheckResult::fail(name, format!("second difference {d2} at seed {seed}"));
        }
    }
    CheckResult::pass(name, format!("{samples} samples"))
}

/// Run the whole battery; returns the results and the elapsed seconds.
pub fn run_selftest() -> (Vec<CheckResult>, f64) {
    let start = Instant::now();
    let mut results = Vec::new();
    results.push(soliton_constants_check(&soliton_params(4.0).unwrap()));
    results.push(soliton_recovery_check());
    results.extend(inequality_checks(200));
    results.push(scaling_check(20));
    results.push(concavity_check(100));
    (results, start.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corrupted_constants_fail_the_check() {
        let mut bad = soliton_params(4.0).unwrap();
        bad.amplitude *= 1.01;
        let r = soliton_constants_check(&bad);
        assert!(!r.passed);
        let good = soliton_constants_check(&soliton_params(4.0).unwrap());
        assert!(good.passed, "{}", good.detail);
    }

    #[test]
    fn quick_battery_passes() {
        for r in inequality_checks(20) {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
        let r = scaling_check(3);
        assert!(r.passed, "{}", r.detail);
        let r = concavity_check(10);
        assert!(r.passed, "{}", r.detail);
    }
}
