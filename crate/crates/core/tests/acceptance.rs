//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with its measured numbers.
//!
//! The closed-form anchors are the p = 4 line profile (amplitude sqrt(2)/4,
//! decay 1/4, energy -mu^3/96) verified independently by quadrature in the
//! unit tests; everything else is property-based.

use std::sync::Arc;
use std::time::Instant;

use nlsgraph::criteria::{
    candidate_large_mass, existence_criterion, nfork_window, small_mass_inequality,
};
use nlsgraph::functional::{
    energy, gn_linf_check, holder_check, mass_parametrized_energy, profile_sup_distance,
    rescale, soliton_energy_threshold, soliton_params, Exponents,
};
use nlsgraph::graph::{build_graph, GraphSpec, MetricGraph};
use nlsgraph::mesh::{
    build_mesh, sample_potential, GraphFunction, Mesh, PotentialEntry, PotentialField,
    PotentialKind,
};
use nlsgraph::rearrange::{monotone_rearrangement, polya_szego_check};
use nlsgraph::sampling;
use nlsgraph::solver::{
    discrete_energy_gradient, multistart_minimize, normalized_gradient_flow, FlowParams,
};

fn line_graph() -> Arc<MetricGraph> {
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

fn two_bridge() -> Arc<MetricGraph> {
    Arc::new(
        build_graph(
            &GraphSpec::default()
                .with_vertices(&["v1", "v2"])
                .finite_edge("core", "v1", "v2", 1.0)
                .half_line("h1", "v1")
                .half_line("h2", "v2"),
        )
        .unwrap(),
    )
}

fn three_fork() -> Arc<MetricGraph> {
    Arc::new(
        build_graph(
            &GraphSpec::default()
                .with_vertices(&["o", "a", "b", "c"])
                .finite_edge("e1", "o", "a", 0.7)
                .finite_edge("e2", "o", "b", 1.3)
                .finite_edge("e3", "o", "c", 0.4)
                .half_line("h1", "a")
                .half_line("h2", "o"),
        )
        .unwrap(),
    )
}

fn bump_spec() -> Vec<PotentialEntry> {
    vec![PotentialEntry {
        edge: "core".into(),
        kind: PotentialKind::Bump {
            center: 0.5,
            width: 0.5,
            height: 1.0,
        },
    }]
}

/// Mesh adapted to the profile width at mass `mu`.
fn adapted_mesh(graph: &Arc<MetricGraph>, p: f64, mu: f64, points_per_width: f64) -> Arc<Mesh> {
    let sp = soliton_params(p).unwrap();
    let h = (sp.width(mu) / points_per_width).min(0.05);
    let l = sp.truncation_for(mu, 1e-12).max(2.0 * h);
    build_mesh(graph, h, l).unwrap()
}

#[test]
fn acceptance_01_soliton_recovery() {
    let start = Instant::now();
    let graph = line_graph();
    let mesh = build_mesh(&graph, 1e-3, 40.0).unwrap();
    let w = PotentialField::zero(&mesh);
    let mut params = FlowParams::defaults(&mesh, 4.0, 1.0).unwrap();
    params.max_iters = 1500;
    let report = multistart_minimize(&mesh, &w, 4.0, 1.0, &params).unwrap();

    let exact = -1.0 / 96.0;
    let e = report.best.energy.total;
    let rel = ((e - exact) / exact).abs();
    assert!(rel < 1e-4, "energy {e} vs {exact} (rel {rel:.2e})");
    assert!(report.best.converged);

    let sp = soliton_params(4.0).unwrap();
    let sup = profile_sup_distance(&report.best.minimizer, &sp, 1.0);
    assert!(sup < 1e-3, "sup distance {sup:.2e}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.1} s");
    println!(
        "criterion 01 (soliton recovery): PASS  energy_rel={rel:.2e} sup={sup:.2e} elapsed={elapsed:.1}s"
    );
}

#[test]
fn acceptance_02_threshold_scaling() {
    let sp = soliton_params(4.0).unwrap();
    let t1 = soliton_energy_threshold(&sp, 1.0);
    // powers of two: exact arithmetic
    for mu in [1.0f64, 2.0, 4.0] {
        let lhs = soliton_energy_threshold(&sp, mu);
        let rhs = mu * mu * mu * t1;
        assert_eq!(lhs, rhs, "mu = {mu}");
    }
    for mu in [0.5f64, 3.7, 10.0] {
        let lhs = soliton_energy_threshold(&sp, mu);
        let rhs = mu * mu * mu * t1;
        assert!((lhs - rhs).abs() <= 1e-15 * rhs.abs(), "mu = {mu}");
    }

    // solver energies on the line match -mu^3/96
    let graph = line_graph();
    let mesh = build_mesh(&graph, 1e-3, 40.0).unwrap();
    let w = PotentialField::zero(&mesh);
    let mut worst: f64 = 0.0;
    for mu in [1.0, 2.0, 4.0] {
        let mut params = FlowParams::defaults(&mesh, 4.0, mu).unwrap();
        params.max_iters = 800;
        let report = multistart_minimize(&mesh, &w, 4.0, mu, &params).unwrap();
        let exact = -mu * mu * mu / 96.0;
        let rel = ((report.best.energy.total - exact) / exact).abs();
        assert!(rel < 1e-4, "mu = {mu}: rel {rel:.2e}");
        worst = worst.max(rel);
    }
    println!("criterion 02 (threshold scaling): PASS  worst_solver_rel={worst:.2e}");
}

#[test]
fn acceptance_03_scaling_invariance() {
    let start = Instant::now();
    let graphs = [two_bridge(), three_fork()];
    let mut meshes = Vec::new();
    for g in &graphs {
        meshes.push(build_mesh(g, 0.03, 5.0).unwrap());
    }
    let mut samples = 0;
    let mut worst_energy: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    'outer: for seed in 0.. {
        for mesh in &meshes {
            let u = sampling::random_function(mesh, seed);
            let w = sampling::random_potential(mesh, seed);
            let mu = u.mass();
            for p in [3.0, 4.0, 5.0] {
                let ex = Exponents::new(p).unwrap();
                let e0 = energy(&u, &w, p).unwrap().total;
                for t in [0.5, 2.0, 10.0] {
                    let (ut, wt) = rescale(&u, &w, &ex, t).unwrap();
                    let scale = t.powf(ex.energy_power());
                    // t^{-2b-1} E(u_t) == E(u): both sides of the invariant
                    let rel_e = ((energy(&ut, &wt, p).unwrap().total - scale * e0)
                        / (scale * e0).abs().max(1e-300))
                    .abs();
                    let rel_m = ((ut.mass() - t * mu) / (t * mu)).abs();
                    assert!(rel_e < 1e-5, "seed {seed} p {p} t {t}: energy rel {rel_e:.2e}");
                    assert!(rel_m < 1e-8, "seed {seed} p {p} t {t}: mass rel {rel_m:.2e}");
                    worst_energy = worst_energy.max(rel_e);
                    worst_mass = worst_mass.max(rel_m);
                }
            }
            samples += 1;
            if samples >= 100 {
                break 'outer;
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed:.1} s");
    println!(
        "criterion 03 (scaling invariance): PASS  samples={samples} worst_e={worst_energy:.2e} worst_m={worst_mass:.2e} elapsed={elapsed:.1}s"
    );
}

#[test]
fn acceptance_04_inequality_suite() {
    let meshes = [
        build_mesh(&two_bridge(), 0.02, 6.0).unwrap(),
        build_mesh(&three_fork(), 0.03, 5.0).unwrap(),
    ];
    let mut gn = 0usize;
    let mut holder = 0usize;
    let mut equim = 0usize;
    let mut ps = 0usize;
    for seed in 0..1000u64 {
        let mesh = &meshes[(seed % 2) as usize];
        let u = sampling::random_function(mesh, seed);
        // sup bound with the exact constant 2
        let r = gn_linf_check(&u);
        assert!(r.satisfied, "gn violation at seed {seed}: {} > {}", r.lhs, r.rhs);
        gn += 1;
        // core interpolation bound at several exponent pairs
        for (rr, pp) in [(1.0, 2.0), (2.0, 4.0), (1.5, 3.0), (2.0, f64::INFINITY)] {
            let h = holder_check(&u, rr, pp).unwrap();
            assert!(h.satisfied, "holder violation at seed {seed} ({rr},{pp})");
        }
        holder += 1;
        // rearrangement: norms preserved, kinetic energy not increased
        let nn = sampling::random_nonneg_function(mesh, seed);
        let star = monotone_rearrangement(&nn);
        for r in [1.0, 2.0, 4.0] {
            let direct: f64 = nn
                .values()
                .iter()
                .zip(&mesh.weights)
                .map(|(v, q)| q * v.abs().powf(r))
                .sum::<f64>()
                .powf(1.0 / r);
            let diff = (direct - star.norm(r)).abs();
            assert!(diff <= 1e-8 * (1.0 + direct), "equimeasurability at seed {seed}, r {r}");
        }
        assert_eq!(star.norm(f64::INFINITY), nn.sup_norm());
        equim += 1;
        let (before, after, ok) = polya_szego_check(&nn);
        assert!(ok, "rearrangement raised kinetic energy at seed {seed}: {before} -> {after}");
        ps += 1;
    }
    println!(
        "criterion 04 (inequality suite): PASS  gn={gn} holder={holder} equimeasure={equim} polya_szego={ps}, zero violations"
    );
}

#[test]
fn acceptance_05_gradient_correctness() {
    let meshes = [
        build_mesh(&two_bridge(), 0.04, 4.0).unwrap(),
        build_mesh(&three_fork(), 0.04, 4.0).unwrap(),
    ];
    let powers = [2.5, 3.0, 4.0, 5.5];
    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let mesh = &meshes[(seed % 2) as usize];
        let p = powers[(seed % 4) as usize];
        let u = sampling::random_function(mesh, seed);
        let w = sampling::random_potential(mesh, seed + 1000);
        let dir = sampling::random_function(mesh, seed + 2000);
        let grad = discrete_energy_gradient(&u, &w, p).unwrap();
        let pairing: f64 = grad
            .values()
            .iter()
            .zip(dir.values())
            .zip(&mesh.weights)
            .map(|((g, d), q)| q * g * d)
            .sum();
        let eps = 1e-6 * u.mass().sqrt();
        let shift = |s: f64| {
            GraphFunction::from_values(
                mesh,
                u.values()
                    .iter()
                    .zip(dir.values())
                    .map(|(a, b)| a + s * b)
                    .collect(),
            )
        };
        let fd = (energy(&shift(eps), &w, p).unwrap().total
            - energy(&shift(-eps), &w, p).unwrap().total)
            / (2.0 * eps);
        let rel = ((pairing - fd) / fd.abs().max(1e-12)).abs();
        assert!(rel < 1e-6, "seed {seed} p {p}: rel {rel:.2e}");
        worst = worst.max(rel);
    }
    println!("criterion 05 (gradient correctness): PASS  worst_rel={worst:.2e}");
}

#[test]
fn acceptance_06_assumption_h_nonattainment() {
    let graph = two_bridge();
    assert!(nlsgraph::criteria::assumption_h(&graph));
    let sp = soliton_params(4.0).unwrap();
    let grid: Vec<f64> = (0..20)
        .map(|i| 0.1 * (10.0f64 / 0.1).powf(i as f64 / 19.0))
        .collect();
    let mut worst_rel_gap: f64 = 0.0;
    for &mu in &grid {
        let mesh = adapted_mesh(&graph, 4.0, mu, 60.0);
        let w = PotentialField::zero(&mesh);
        let mut params = FlowParams::defaults(&mesh, 4.0, mu).unwrap();
        params.max_iters = 1200;
        let report = multistart_minimize(&mesh, &w, 4.0, mu, &params).unwrap();
        let threshold = soliton_energy_threshold(&sp, mu);
        let gap = report.lowest_energy - threshold;
        let rel = gap / threshold.abs();
        assert!(
            rel >= -1e-4,
            "mu = {mu}: sub-threshold energy on an H-graph (rel gap {rel:.2e})"
        );
        worst_rel_gap = worst_rel_gap.min(rel);
    }
    println!(
        "criterion 06 (H-graph nonattainment proxy): PASS  20 masses, most negative rel gap {worst_rel_gap:.2e}"
    );
}

#[test]
fn acceptance_07_large_mass_existence() {
    let graph = two_bridge();
    let pspec = bump_spec();
    let grid: Vec<f64> = (0..16)
        .map(|i| 1.0 * (1000.0f64).powf(i as f64 / 15.0))
        .collect();
    let mut passes = Vec::new();
    let mut ratios = Vec::new();
    for &mu in &grid {
        // the kinetic-term bias scales like h^2 mu^5 while the gap is O(mu),
        // so the grid must refine like 1/mu^2 to keep the ratio clean
        let sp = soliton_params(4.0).unwrap();
        let h = (sp.width(mu) / 50.0).min(18.0 / (mu * mu));
        let l = sp.truncation_for(mu, 1e-12).max(2.0 * h);
        let mesh = build_mesh(&graph, h, l).unwrap();
        let w = sample_potential(&mesh, &pspec).unwrap();
        let c = candidate_large_mass(&mesh, &w, 4.0, mu).unwrap();
        let rep = existence_criterion(&c.function, &w, 4.0).unwrap();
        passes.push(rep.passed);
        if mu >= 100.0 * (1.0 - 1e-9) {
            let ratio = rep.gap / mu;
            let target = -c.kappa / 2.0;
            assert!(
                (ratio - target).abs() <= 0.2 * target.abs(),
                "mu = {mu}: gap/mu = {ratio} vs -kappa/2 = {target}"
            );
            ratios.push(ratio);
        }
    }
    // a threshold mass exists: all grid points from it on pass
    let first_pass_tail = passes
        .iter()
        .rposition(|&p| !p)
        .map(|i| i + 1)
        .unwrap_or(0);
    assert!(
        first_pass_tail < grid.len(),
        "criterion never passes on the scanned grid"
    );
    let mu0 = grid[first_pass_tail];
    assert!(passes[first_pass_tail..].iter().all(|&p| p));
    assert!(!ratios.is_empty());

    // solver confirms: best multistart energy does not exceed the
    // candidate's
    for &mu in &[100.0, 316.0] {
        let mesh = adapted_mesh(&graph, 4.0, mu, 50.0);
        let w = sample_potential(&mesh, &pspec).unwrap();
        let c = candidate_large_mass(&mesh, &w, 4.0, mu).unwrap();
        let rep = existence_criterion(&c.function, &w, 4.0).unwrap();
        let mut params = FlowParams::defaults(&mesh, 4.0, mu).unwrap();
        params.max_iters = 1500;
        let report = multistart_minimize(&mesh, &w, 4.0, mu, &params).unwrap();
        assert!(
            report.lowest_energy <= rep.candidate_energy + 1e-9 * rep.candidate_energy.abs(),
            "mu = {mu}: E_min {} vs candidate {}",
            report.lowest_energy,
            rep.candidate_energy
        );
    }
    println!(
        "criterion 07 (large-mass existence): PASS  mu0={mu0:.1} gap/mu in [{:.3}, {:.3}] on the last decade",
        ratios.iter().cloned().fold(f64::INFINITY, f64::min),
        ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    );
}

#[test]
fn acceptance_08_small_mass_existence() {
    let graph = two_bridge();
    let mesh = build_mesh(&graph, 2e-3, 4.0).unwrap();
    let w = sample_potential(&mesh, &bump_spec()).unwrap();
    let sp = soliton_params(4.0).unwrap();

    // scan m downward over six decades
    let grid: Vec<f64> = (0..61)
        .map(|i| 1.0 * (1e-6f64 / 1.0).powf(i as f64 / 60.0))
        .collect();
    let mut sat = Vec::new();
    for &m in &grid {
        sat.push(small_mass_inequality(&mesh, 4.0, m, &w).unwrap().satisfied);
    }
    // m_star: all scanned m below it satisfy the inequality
    let first_sat = sat.iter().position(|&s| s).expect("never satisfied");
    assert!(sat[first_sat..].iter().all(|&s| s), "satisfied set not a tail");
    let m_star = grid[first_sat];
    assert!(m_star > 0.0);

    // the ratio converges to -(C^2 |K| / 2) int_K w on the last decade
    let limit = -0.5 * sp.amplitude * sp.amplitude * 1.0 * w.core_integral();
    for &m in grid.iter().filter(|&&m| m <= 1e-5) {
        let r = small_mass_inequality(&mesh, 4.0, m, &w).unwrap();
        assert!(
            (r.ratio / limit - 1.0).abs() <= 0.1,
            "m = {m}: ratio {} vs limit {limit}",
            r.ratio
        );
    }
    println!(
        "criterion 08 (small-mass existence): PASS  m_star={m_star:.3e} ratio limit={limit:.6}"
    );
}

#[test]
fn acceptance_09_nfork_window() {
    let w = nfork_window(1000, 1.0, 0.1, 4.0).unwrap();
    assert!((w.mu_beta_lo - 0.01).abs() < 1e-15);
    assert!((w.mu_beta_hi - 0.05).abs() < 1e-15);
    assert!(w.nonempty);
    let w = nfork_window(100, 1.0, 0.1, 4.0).unwrap();
    assert!(!w.nonempty);

    // 50-point grid: nonemptiness is exactly n eps^2 > 2
    let ns = [1usize, 10, 50, 100, 200, 300, 556, 800, 1000, 5000];
    let eps = [0.0625, 0.125, 0.25, 0.5, 0.75];
    let mut checked = 0;
    for &n in &ns {
        for &e in &eps {
            let win = nfork_window(n, 1.0, e, 4.0).unwrap();
            assert_eq!(win.nonempty, (n as f64) * e * e > 2.0, "n={n} eps={e}");
            checked += 1;
        }
    }
    assert_eq!(checked, 50);
    // exact boundary (representable): n = 2/eps^2
    let win = nfork_window(8, 1.0, 0.5, 4.0).unwrap();
    assert!(!win.nonempty);
    println!("criterion 09 (fork mass window): PASS  50-point grid exact");
}

#[test]
fn acceptance_10_concavity() {
    // level 1: strict concavity of the mass-parametrized energy
    let meshes = [
        build_mesh(&two_bridge(), 0.03, 5.0).unwrap(),
        build_mesh(&three_fork(), 0.03, 5.0).unwrap(),
    ];
    let mut count = 0;
    for seed in 0..500u64 {
        let mesh = &meshes[(seed % 2) as usize];
        let w = sampling::random_potential(mesh, seed + 7000);
        let u = sampling::random_nonneg_function(mesh, seed)
            .renormalized(1.0)
            .unwrap();
        let e = energy(&u, &w, 4.0).unwrap();
        assert!(e.lp > 0.0);
        let d2 = mass_parametrized_energy(&u, &w, 4.0, 1.25).unwrap()
            - 2.0 * mass_parametrized_energy(&u, &w, 4.0, 1.0).unwrap()
            + mass_parametrized_energy(&u, &w, 4.0, 0.75).unwrap();
        assert!(d2 < 0.0, "seed {seed}: second difference {d2}");
        count += 1;
    }

    // level 2: scanned minimum energies stay numerically concave on a
    // sub-threshold segment
    let graph = two_bridge();
    let pspec = bump_spec();
    let sp = soliton_params(4.0).unwrap();
    let grid: Vec<f64> = (0..8)
        .map(|i| 50.0 * (500.0f64 / 50.0).powf(i as f64 / 7.0))
        .collect();
    let mut energies = Vec::new();
    for &mu in &grid {
        let mesh = adapted_mesh(&graph, 4.0, mu, 50.0);
        let w = sample_potential(&mesh, &pspec).unwrap();
        let mut params = FlowParams::defaults(&mesh, 4.0, mu).unwrap();
        params.max_iters = 1500;
        let report = multistart_minimize(&mesh, &w, 4.0, mu, &params).unwrap();
        let threshold = soliton_energy_threshold(&sp, mu);
        assert!(
            report.lowest_energy - threshold < -1e-4 * threshold.abs(),
            "mu = {mu} not sub-threshold"
        );
        energies.push(report.lowest_energy);
    }
    for i in 1..grid.len() - 1 {
        let (m0, m1, m2) = (grid[i - 1], grid[i], grid[i + 1]);
        let (e0, e1, e2) = (energies[i - 1], energies[i], energies[i + 1]);
        let second = 2.0 * ((e2 - e1) / (m2 - m1) - (e1 - e0) / (m1 - m0)) / (m2 - m0);
        assert!(
            second <= 1e-3 * e1.abs(),
            "mu = {m1}: second divided difference {second}"
        );
    }
    println!(
        "criterion 10 (concavity): PASS  {count} random profiles strictly concave; scan segment concave"
    );
}

/// Measured-then-frozen brackets: scaled kinetic, nonlinear, and sup-norm
/// sizes of converged sub-threshold minimizers stay in fixed intervals
/// across a mass decade (weak-potential regime).
#[test]
fn solver_scaled_sizes_stay_bracketed() {
    let graph = two_bridge();
    let pspec = bump_spec();
    let sp = soliton_params(4.0).unwrap();
    let mut rows = Vec::new();
    for &mu in &[20.0, 60.0, 200.0] {
        // weak-potential regime: |w|_inf / mu^2 < theta/2
        assert!(1.0 / (mu * mu) < sp.theta / 2.0);
        let mesh = adapted_mesh(&graph, 4.0, mu, 50.0);
        let w = sample_potential(&mesh, &pspec).unwrap();
        let mut params = FlowParams::defaults(&mesh, 4.0, mu).unwrap();
        params.max_iters = 600_000;
        let c = candidate_large_mass(&mesh, &w, 4.0, mu).unwrap();
        let report = normalized_gradient_flow(&c.function, &w, 4.0, mu, &params).unwrap();
        assert!(report.converged, "mu = {mu}: not converged");
        assert!(report.gap < 0.0, "mu = {mu}: gap {}", report.gap);
        assert!(report.multiplier < 0.0);
        let t_scaled = report.energy.kinetic / mu.powi(3);
        let v_scaled = report.energy.lp / mu.powi(3);
        let sup_scaled = report.minimizer.sup_norm().powi(2) / mu.powi(2);
        rows.push((mu, t_scaled, v_scaled, sup_scaled));
    }
    for &(mu, t, v, s) in &rows {
        // frozen from measurement (exact profile values 1/48, 1/12, 1/8)
        assert!((0.015..0.035).contains(&t), "mu={mu} T/mu^3={t}");
        assert!((0.06..0.13).contains(&v), "mu={mu} V/mu^3={v}");
        assert!((0.10..0.16).contains(&s), "mu={mu} sup^2/mu^2={s}");
    }
    println!("solver scaled sizes: {rows:?}");
}
