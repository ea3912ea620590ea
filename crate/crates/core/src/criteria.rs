//! Existence and nonexistence checks: explicit trial functions against the
//! line-profile energy threshold, the weak-potential nonexistence ratios,
//! the n-fork family, and the two-half-line trail condition.

use std::collections::HashSet;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::functional::{
    energy, soliton_energy_threshold, soliton_params, Exponents, SolitonParams,
};
use crate::graph::{compact_core, EdgeKind, GraphSpec, MetricGraph};
use crate::mesh::{
    GraphFunction, Mesh, PotentialEntry, PotentialField, PotentialKind,
};

/// Comparison of a trial function's energy with the threshold
/// `-theta mu^(2 beta + 1)`. `passed` certifies that a minimizer exists at
/// this mass.
#[derive(Debug, Clone, Copy)]
pub struct CriterionReport {
    pub mass: f64,
    pub candidate_energy: f64,
    pub threshold: f64,
    pub gap: f64,
    pub passed: bool,
}

/// Evaluate the existence criterion for the trial function `v`.
pub fn existence_criterion(
    v: &GraphFunction,
    w: &PotentialField,
    p: f64,
) -> Result<CriterionReport> {
    let mu = v.mass();
    if mu <= 0.0 {
        return Err(Error::ZeroMass);
    }
    let sp = soliton_params(p)?;
    let e = energy(v, w, p)?;
    let threshold = soliton_energy_threshold(&sp, mu);
    let gap = e.total - threshold;
    Ok(CriterionReport {
        mass: mu,
        candidate_energy: e.total,
        threshold,
        gap,
        passed: gap <= 0.0,
    })
}

/// Cut-and-lowered line profile concentrated where the potential is
/// positive, renormalized to exact mass.
#[derive(Debug, Clone)]
pub struct LargeMassCandidate {
    pub function: GraphFunction,
    /// Minimum of the potential over the chosen interval.
    pub kappa: f64,
    pub edge: usize,
    pub center: f64,
    pub half_width: f64,
}

/// Build the large-mass trial function at mass `mu`.
///
/// The center is the interior core DOF maximizing `w` (ties resolved toward
/// the largest symmetric interval of positive potential); the interval grows
/// symmetrically while the potential stays positive and inside the edge. The
/// profile is lowered so it vanishes at the interval ends and is zero
/// elsewhere.
pub fn candidate_large_mass(
    mesh: &Arc<Mesh>,
    w: &PotentialField,
    p: f64,
    mu: f64,
) -> Result<LargeMassCandidate> {
    if w.sup_norm() <= 0.0 {
        return Err(Error::ZeroPotential);
    }
    let sp = soliton_params(p)?;
    let wv = w.values();

    // interior core DOFs attaining the sup
    let mut best: Option<(usize, usize, usize, f64)> = None; // edge, grid k, steps, kappa
    for (ei, grid) in mesh.edges.iter().enumerate() {
        if grid.infinite {
            continue;
        }
        let last = grid.dofs.len() - 1;
        for k in 1..last {
            let dof = grid.dofs[k];
            if wv[dof] + 1e-15 < w.sup_norm() {
                continue;
            }
            // grow a symmetric window of grid steps with positive potential
            let mut steps = 0usize;
            let mut kappa = wv[dof];
            loop {
                let next = steps + 1;
                if k < next || k + next > last {
                    break;
                }
                let lo = wv[grid.dofs[k - next]];
                let hi = wv[grid.dofs[k + next]];
                if lo <= 0.0 || hi <= 0.0 {
                    break;
                }
                steps = next;
                kappa = kappa.min(lo).min(hi);
            }
            let better = match best {
                None => true,
                Some((_, _, s, _)) => steps > s,
            };
            if better {
                best = Some((ei, k, steps, kappa));
            }
        }
    }
    let Some((ei, k, steps, kappa)) = best else {
        return Err(Error::CoreTooShort);
    };
    if steps == 0 {
        return Err(Error::CoreTooShort);
    }

    let grid = &mesh.edges[ei];
    let spacing = grid.spacing;
    let center = k as f64 * spacing;
    let half_width = steps as f64 * spacing;
    let floor = sp.value(mu, half_width);

    let mut values = vec![0.0; mesh.n_dofs];
    for (j, &dof) in grid.dofs.iter().enumerate() {
        let x = j as f64 * spacing;
        let d = (x - center).abs();
        if d <= half_width {
            values[dof] = sp.value(mu, d) - floor;
        }
    }
    let function = GraphFunction::from_values(mesh, values).renormalized(mu)?;
    Ok(LargeMassCandidate {
        function,
        kappa,
        edge: ei,
        center,
        half_width,
    })
}

/// Plateau trial function for small masses, with the parameter of the
/// half-line profiles.
#[derive(Debug, Clone)]
pub struct SmallMassCandidate {
    pub function: GraphFunction,
    /// Mass parameter of the half-line profiles; solves
    /// `mu = (n/2) m + C^2 |K| m^(2 alpha)`.
    pub m: f64,
}

/// Build the small-mass trial function: the mass-`m` line profile on every
/// half-line glued to the constant plateau value on the core. With an empty
/// core this degenerates to the profile split across the half-lines.
pub fn candidate_small_mass(mesh: &Arc<Mesh>, p: f64, mu: f64) -> Result<SmallMassCandidate> {
    if !(mu > 0.0) {
        return Err(Error::ZeroMass);
    }
    let sp = soliton_params(p)?;
    let n = mesh.graph.n_half_lines();
    if n == 0 {
        return Err(Error::InvalidSpec(
            "small-mass trial function needs a half-line".into(),
        ));
    }
    let core = compact_core(&mesh.graph);
    let m = solve_plateau_mass(&sp, n, core.total_length, mu);

    let ex = &sp.exponents;
    let plateau = sp.amplitude * m.powf(ex.alpha);
    let mut values = vec![0.0; mesh.n_dofs];
    for (ei, grid) in mesh.edges.iter().enumerate() {
        if grid.infinite {
            for (k, &dof) in grid.dofs.iter().enumerate() {
                values[dof] = sp.value(m, k as f64 * grid.spacing);
            }
        } else {
            for &dof in &grid.dofs {
                values[dof] = plateau;
            }
        }
        let _ = ei;
    }
    let function = GraphFunction::from_values(mesh, values).renormalized(mu)?;
    Ok(SmallMassCandidate { function, m })
}

/// Solve `mu = (n/2) m + C^2 |K| m^(2 alpha)` for `m` by bisection. The left
/// side is strictly increasing, so the root is unique.
pub fn solve_plateau_mass(sp: &SolitonParams, n: usize, core_length: f64, mu: f64) -> f64 {
    let ex = &sp.exponents;
    let c2 = sp.amplitude * sp.amplitude;
    let f = |m: f64| 0.5 * n as f64 * m + c2 * core_length * m.powf(2.0 * ex.alpha) - mu;
    if core_length == 0.0 {
        return 2.0 * mu / n as f64;
    }
    let mut lo = 0.0;
    let mut hi = 2.0 * mu / n as f64;
    debug_assert!(f(hi) >= 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form comparison of the plateau trial function's energy with the
/// threshold at the matched mass.
#[derive(Debug, Clone, Copy)]
pub struct SmallMassInequality {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    /// `(lhs - rhs) / m^(2 alpha)`; converges to
    /// `-(C^2 |K| / 2) int_K w` as `m -> 0`.
    pub ratio: f64,
}

/// Evaluate both sides of the plateau-versus-profile energy inequality at
/// parameter `m` (`int_K w` by quadrature, everything else in closed form).
pub fn small_mass_inequality(
    mesh: &Arc<Mesh>,
    p: f64,
    m: f64,
    w: &PotentialField,
) -> Result<SmallMassInequality> {
    if !(m > 0.0) {
        return Err(Error::ZeroMass);
    }
    let sp = soliton_params(p)?;
    let core = compact_core(&mesh.graph);
    if core.total_length <= 0.0 {
        return Err(Error::EmptyCore);
    }
    let n = mesh.graph.n_half_lines() as f64;
    let ex = &sp.exponents;
    let klen = core.total_length;
    let c2 = sp.amplitude * sp.amplitude;
    let w_int = w.core_integral();

    let lhs = -0.5 * n * sp.theta * m.powf(ex.energy_power())
        - sp.amplitude.powf(p) / p * klen * m.powf(p * ex.alpha)
        - 0.5 * c2 * klen * m.powf(2.0 * ex.alpha) * w_int;
    let mu = 0.5 * n * m + c2 * klen * m.powf(2.0 * ex.alpha);
    let rhs = -sp.theta * mu.powf(ex.energy_power());
    Ok(SmallMassInequality {
        lhs,
        rhs,
        satisfied: lhs < rhs,
        ratio: (lhs - rhs) / m.powf(2.0 * ex.alpha),
    })
}

/// The three dimensionless ratios of the weak-potential nonexistence
/// condition and their comparison against `epsilon`.
#[derive(Debug, Clone, Copy)]
pub struct NonexistenceReport {
    pub mu: f64,
    pub epsilon: f64,
    /// `mu^beta * diam(K)`
    pub r_diameter: f64,
    /// `1 / (mu^beta |K|)`
    pub r_length: f64,
    /// `|w|_inf / mu^(2 beta)`
    pub r_potential: f64,
    pub condition_met: bool,
    /// `|w|_inf |K|^((p-2)/p)`
    pub g_const: f64,
}

/// Check `max(r_diameter, r_length, r_potential) < epsilon`. When the
/// condition holds for the (p-dependent) admissible `epsilon`, no minimizer
/// exists at mass `mu`.
pub fn nonexistence_condition(
    g: &MetricGraph,
    w: &PotentialField,
    p: f64,
    mu: f64,
    epsilon: f64,
) -> Result<NonexistenceReport> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "epsilon = {epsilon} must be positive"
        )));
    }
    if !(mu > 0.0) {
        return Err(Error::ZeroMass);
    }
    let ex = Exponents::new(p)?;
    let core = compact_core(g);
    if core.total_length <= 0.0 {
        return Err(Error::EmptyCore);
    }
    let mub = mu.powf(ex.beta);
    let r_diameter = mub * core.diameter;
    let r_length = 1.0 / (mub * core.total_length);
    let r_potential = w.sup_norm() / mu.powf(2.0 * ex.beta);
    let condition_met = r_diameter.max(r_length).max(r_potential) < epsilon;
    Ok(NonexistenceReport {
        mu,
        epsilon,
        r_diameter,
        r_length,
        r_potential,
        condition_met,
        g_const: w.sup_norm() * core.total_length.powf((p - 2.0) / p),
    })
}

/// Mass window on which the nonexistence condition can hold for the n-fork.
#[derive(Debug, Clone, Copy)]
pub struct MassWindow {
    pub mu_beta_lo: f64,
    pub mu_beta_hi: f64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub nonempty: bool,
}

/// Window `1/(n l eps) < mu^beta < eps/(2 l)`; nonempty exactly when
/// `n eps^2 > 2`.
pub fn nfork_window(n: usize, l: f64, epsilon: f64, p: f64) -> Result<MassWindow> {
    if n == 0 || !(l > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidSpec(
            "n-fork window needs n >= 1, l > 0, epsilon > 0".into(),
        ));
    }
    let ex = Exponents::new(p)?;
    let mu_beta_lo = 1.0 / (n as f64 * l * epsilon);
    let mu_beta_hi = epsilon / (2.0 * l);
    let inv_beta = 1.0 / ex.beta;
    Ok(MassWindow {
        mu_beta_lo,
        mu_beta_hi,
        mu_lo: mu_beta_lo.powf(inv_beta),
        mu_hi: mu_beta_hi.powf(inv_beta),
        nonempty: mu_beta_lo < mu_beta_hi,
    })
}

/// A fork: `n` finite edges of length `l` and one half-line, all joined at
/// one vertex, with the monomial potential
/// `eps^3 x^(2k) / (4 l^(2k+2))` on every finite edge. The potential's sup
/// is `eps^3 / (4 l^2)`, attained at the tips.
pub fn nfork_build(n: usize, l: f64, k: u32, epsilon: f64) -> Result<(MetricGraph, Vec<PotentialEntry>)> {
    if n == 0 || !(l > 0.0) || !(epsilon > 0.0) {
        return Err(Error::InvalidSpec(
            "n-fork needs n >= 1, l > 0, epsilon > 0".into(),
        ));
    }
    let mut spec = GraphSpec::default();
    spec.vertices.push("o".into());
    for i in 0..n {
        spec.vertices.push(format!("tip{i}"));
    }
    for i in 0..n {
        spec = spec.finite_edge(&format!("e{i}"), "o", &format!("tip{i}"), l);
    }
    spec = spec.half_line("h", "o");
    let graph = crate::graph::build_graph(&spec)?;
    let coefficient = epsilon.powi(3) / (4.0 * l.powi(2 * k as i32 + 2));
    let potential = (0..n)
        .map(|i| PotentialEntry {
            edge: format!("e{i}"),
            kind: PotentialKind::Monomial {
                coefficient,
                exponent: 2 * k,
            },
        })
        .collect();
    Ok((graph, potential))
}

/// True when every point of the graph lies on a trail (no repeated edges)
/// that contains two distinct half-lines.
///
/// Finite edges are checked by exhaustive two-sided depth-first search;
/// points on half-lines need a trail from the half-line's origin to some
/// other half-line. Worst-case exponential in the number of finite edges.
pub fn assumption_h(g: &MetricGraph) -> bool {
    let half_lines: Vec<(usize, usize)> = g
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| e.is_infinite())
        .map(|(i, e)| (i, e.from))
        .collect();
    if half_lines.len() < 2 {
        return false;
    }

    let finite: Vec<(usize, usize, usize)> = g
        .edges
        .iter()
        .enumerate()
        .filter_map(|(i, e)| match e.kind {
            EdgeKind::Finite { to, .. } => Some((i, e.from, to)),
            EdgeKind::HalfLine => None,
        })
        .collect();

    // adjacency over finite edges: vertex -> (edge id, other endpoint)
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); g.n_vertices()];
    for &(id, a, b) in &finite {
        adj[a].push((id, b));
        adj[b].push((id, a));
    }
    let mut lines_at: Vec<Vec<usize>> = vec![Vec::new(); g.n_vertices()];
    for &(id, v) in &half_lines {
        lines_at[v].push(id);
    }

    // every half-line: some other half-line reachable through finite edges
    for &(id, v) in &half_lines {
        let mut seen = vec![false; g.n_vertices()];
        let mut stack = vec![v];
        seen[v] = true;
        let mut ok = false;
        while let Some(x) = stack.pop() {
            if lines_at[x].iter().any(|&h| h != id) {
                ok = true;
                break;
            }
            for &(_, y) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        if !ok {
            return false;
        }
    }

    // every finite edge: a trail through it joining two distinct half-lines
    for &(id, a, b) in &finite {
        let mut used = HashSet::from([id]);
        if !trail_from(a, None, b, &mut used, &adj, &lines_at) {
            return false;
        }
    }
    true
}

/// Phase one walks from `v` to any half-line; phase two (after `chosen` is
/// set) walks from `other` to a different half-line over the remaining
/// unused edges.
fn trail_from(
    v: usize,
    chosen: Option<usize>,
    other: usize,
    used: &mut HashSet<usize>,
    adj: &[Vec<(usize, usize)>],
    lines_at: &[Vec<usize>],
) -> bool {
    match chosen {
        None => {
            for &h in &lines_at[v] {
                if trail_from(other, Some(h), usize::MAX, used, adj, lines_at) {
                    return true;
                }
            }
        }
        Some(first) => {
            if lines_at[v].iter().any(|&h| h != first) {
                return true;
            }
        }
    }
    for &(e, u) in &adj[v] {
        if used.insert(e) {
            if trail_from(u, chosen, other, used, adj, lines_at) {
                used.remove(&e);
                return true;
            }
            used.remove(&e);
        }
    }
    false
}

/// Operational estimate of the admissible `epsilon` of the nonexistence
/// condition: scan `epsilon` downward and accept the first value whose mass
/// window is nonempty and on which the solver finds no state below the
/// threshold. Purely empirical; `None` when every scanned window is empty.
pub fn estimate_epsilon(
    mesh: &Arc<Mesh>,
    w: &PotentialField,
    p: f64,
    epsilons: &[f64],
    params: &crate::solver::FlowParams,
    gap_tol: f64,
) -> Result<Option<f64>> {
    let ex = Exponents::new(p)?;
    let core = compact_core(&mesh.graph);
    if core.total_length <= 0.0 {
        return Err(Error::EmptyCore);
    }
    let sp = soliton_params(p)?;
    for &eps in epsilons {
        let lo = (1.0 / (eps * core.total_length)).max((w.sup_norm() / eps).sqrt());
        let hi = eps / core.diameter.max(1e-300);
        if !(lo < hi) {
            continue;
        }
        let mut all_clear = true;
        for i in 0..5 {
            let mu_beta = lo * (hi / lo).powf((i as f64 + 0.5) / 5.0);
            let mu = mu_beta.powf(1.0 / ex.beta);
            let report = crate::solver::multistart_minimize(mesh, w, p, mu, params)?;
            let threshold = soliton_energy_threshold(&sp, mu);
            if report.lowest_energy - threshold < -gap_tol * threshold.abs() {
                all_clear = false;
                break;
            }
        }
        if all_clear {
            return Ok(Some(eps));
        }
    }
    Ok(None)
}
