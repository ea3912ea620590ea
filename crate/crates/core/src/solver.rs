//! Constrained minimization by normalized gradient flow.
//!
//! Explicit descent on the discrete energy with renormalization to the mass
//! constraint after every step, a nonnegativity clamp, and step backtracking
//! that enforces monotone energy decrease. Natural (Kirchhoff) vertex
//! behaviour emerges from the energy discretization; nothing is imposed at
//! vertices beyond continuity.

use std::sync::Arc;

use rayon::prelude::*;

use crate::criteria;
use crate::error::{Error, Result};
use crate::functional::{
    energy, pow_abs, soliton_energy_threshold, soliton_params, soliton_truncated,
    EnergyBreakdown, SolitonParams,
};
use crate::mesh::{GraphFunction, Mesh, PointOnEdge, PotentialField};

/// Flow controls. `step` is the initial time step; backtracking may shrink
/// it and it re-expands slowly after accepted steps.
#[derive(Debug, Clone)]
pub struct FlowParams {
    pub step: f64,
    pub max_iters: usize,
    /// Relative energy-change threshold, per accepted step, that must hold
    /// over a trailing window before the residual is even examined.
    pub energy_tol: f64,
    /// Threshold on the Lagrange residual `|grad - lambda u|_2 / |u|_2`.
    pub residual_tol: f64,
    pub seed: u64,
    /// Distance from the core beyond which mass counts as delocalized.
    pub deloc_distance: f64,
    /// Record the accepted energy at every iteration.
    pub record_energies: bool,
}

impl FlowParams {
    /// Defaults for a given mesh, power, and mass: diffusion-stable step
    /// `0.4 h^2` and a residual threshold scaled with the stationary
    /// frequency of the problem.
    pub fn defaults(mesh: &Mesh, p: f64, mu: f64) -> Result<FlowParams> {
        let sp = soliton_params(p)?;
        let h = mesh.min_spacing();
        Ok(FlowParams {
            step: 0.4 * h * h,
            max_iters: 20_000,
            energy_tol: 1e-10,
            residual_tol: 1e-4 * (1.0 + sp.frequency(mu)),
            seed: 0,
            deloc_distance: mesh.truncation / 4.0,
            record_energies: false,
        })
    }
}

/// Outcome of one flow run.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub minimizer: GraphFunction,
    pub energy: EnergyBreakdown,
    pub mass: f64,
    /// Lagrange multiplier estimate `<grad, u> / mu` (negative for bound
    /// states).
    pub multiplier: f64,
    pub residual: f64,
    pub iterations: usize,
    /// False when `max_iters` was exhausted; that is data, not an error.
    pub converged: bool,
    /// Fraction of mass farther than `deloc_distance` from the core.
    pub delocalization: f64,
    /// `energy.total` minus the line-profile threshold at the same mass.
    pub gap: f64,
    pub energies: Option<Vec<f64>>,
}

/// L2 gradient of the discrete energy at `u`: the DOF-wise derivative
/// divided by the quadrature weight. Truncation-end DOFs stay at zero.
///
/// Away from vertices this approximates `-u'' - |u|^(p-2) u - w u`; vertex
/// DOFs collect contributions from all incident edges.
pub fn discrete_energy_gradient(
    u: &GraphFunction,
    w: &PotentialField,
    p: f64,
) -> Result<GraphFunction> {
    if !w.same_mesh(u.mesh()) {
        return Err(Error::MeshMismatch);
    }
    crate::functional::Exponents::new(p)?;
    let mut grad = vec![0.0; u.mesh().n_dofs];
    gradient_into(u, w, p, &mut grad);
    Ok(GraphFunction::from_values(u.mesh(), grad))
}

fn gradient_into(u: &GraphFunction, w: &PotentialField, p: f64, grad: &mut [f64]) {
    let mesh = u.mesh();
    let v = u.values();
    let wv = w.values();
    grad.fill(0.0);
    for grid in &mesh.edges {
        let inv = 1.0 / grid.spacing;
        for k in 0..grid.dofs.len() - 1 {
            let a = grid.dofs[k];
            let b = grid.dofs[k + 1];
            let d = (v[b] - v[a]) * inv;
            grad[a] -= d;
            grad[b] += d;
        }
    }
    for i in 0..mesh.n_dofs {
        if mesh.dirichlet[i] {
            grad[i] = 0.0;
            continue;
        }
        let q = mesh.weights[i];
        let nonlinear = pow_abs(v[i], p - 2.0) * v[i];
        grad[i] = grad[i] / q - nonlinear - wv[i] * v[i] * (mesh.core_weights[i] / q);
    }
}

fn weighted_inner(mesh: &Mesh, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .zip(&mesh.weights)
        .map(|((x, y), q)| q * x * y)
        .sum()
}

/// Fraction of the mass of `u` at distance greater than `d0` from the core.
pub fn delocalization_metric(u: &GraphFunction, d0: f64) -> f64 {
    let mesh = u.mesh();
    let dist = mesh.distance_from_core();
    let mut far = 0.0;
    let mut total = 0.0;
    for i in 0..mesh.n_dofs {
        let m = mesh.weights[i] * u.values()[i] * u.values()[i];
        total += m;
        if dist[i] > d0 {
            far += m;
        }
    }
    if total > 0.0 {
        far / total
    } else {
        0.0
    }
}

/// Run the normalized gradient flow from `u0` down to a constrained
/// stationary point at mass `mu`.
///
/// Each iteration steps against the gradient, clamps negative values to
/// zero, and renormalizes to mass `mu`; the step is halved until the energy
/// does not increase. Convergence requires a small relative energy change
/// over a trailing window and a Lagrange residual below `residual_tol`.
pub fn normalized_gradient_flow(
    u0: &GraphFunction,
    w: &PotentialField,
    p: f64,
    mu: f64,
    params: &FlowParams,
) -> Result<SolveReport> {
    if !(mu > 0.0) {
        return Err(Error::ZeroMass);
    }
    let sp = soliton_params(p)?;
    if !w.same_mesh(u0.mesh()) {
        return Err(Error::MeshMismatch);
    }
    let mesh = Arc::clone(u0.mesh());
    let n = mesh.n_dofs;

    let mut u = u0.renormalized(mu)?; // errors on zero mass
    clamp_and_renormalize(&mut u, mu)?;
    let mut e_prev = energy(&u, w, p)?.total;

    let mut grad = vec![0.0; n];
    let mut trial = GraphFunction::zero(&mesh);
    let mut tau = params.step;
    let window = 25usize;
    let mut calm = 0usize; // consecutive steps with tiny relative energy change
    let mut energies = if params.record_energies {
        Some(vec![e_prev])
    } else {
        None
    };

    let mut converged = false;
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut multiplier = 0.0;

    while iterations < params.max_iters {
        iterations += 1;
        gradient_into(&u, w, p, &mut grad);

        // backtracking line search on the renormalized energy
        let mut accepted = false;
        let mut e_new = e_prev;
        for _ in 0..60 {
            {
                let tv = trial.values_mut();
                for i in 0..n {
                    tv[i] = u.values()[i] - tau * grad[i];
                }
            }
            if clamp_and_renormalize(&mut trial, mu).is_err() {
                tau *= 0.5;
                continue;
            }
            e_new = energy(&trial, w, p)?.total;
            if e_new <= e_prev {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if accepted {
            std::mem::swap(&mut u, &mut trial);
        } else {
            // stalled at float resolution; treat as a calm step
            e_new = e_prev;
        }
        if let Some(es) = energies.as_mut() {
            es.push(e_new);
        }

        let rel_change = (e_new - e_prev).abs() / (e_new.abs() + 1e-300);
        calm = if rel_change < params.energy_tol {
            calm + 1
        } else {
            0
        };
        e_prev = e_new;
        tau = (tau * 1.1).min(params.step);

        if calm >= window {
            gradient_into(&u, w, p, &mut grad);
            let lambda = weighted_inner(&mesh, &grad, u.values()) / mu;
            let mut res2 = 0.0;
            for i in 0..n {
                let r = grad[i] - lambda * u.values()[i];
                res2 += mesh.weights[i] * r * r;
            }
            residual = (res2 / mu).sqrt();
            multiplier = lambda;
            if residual < params.residual_tol {
                converged = true;
                break;
            }
            calm = 0;
        }
    }

    if !converged || multiplier == 0.0 {
        gradient_into(&u, w, p, &mut grad);
        let lambda = weighted_inner(&mesh, &grad, u.values()) / mu;
        let mut res2 = 0.0;
        for i in 0..n {
            let r = grad[i] - lambda * u.values()[i];
            res2 += mesh.weights[i] * r * r;
        }
        residual = (res2 / mu).sqrt();
        multiplier = lambda;
    }

    let breakdown = energy(&u, w, p)?;
    let report = SolveReport {
        mass: u.mass(),
        delocalization: delocalization_metric(&u, params.deloc_distance),
        gap: breakdown.total - soliton_energy_threshold(&sp, mu),
        minimizer: u,
        energy: breakdown,
        multiplier,
        residual,
        iterations,
        converged,
        energies,
    };
    Ok(report)
}

fn clamp_and_renormalize(u: &mut GraphFunction, mu: f64) -> Result<()> {
    let mut m = 0.0;
    {
        let mesh = Arc::clone(u.mesh());
        let v = u.values_mut();
        for i in 0..v.len() {
            if v[i] < 0.0 {
                v[i] = 0.0;
            }
            m += mesh.weights[i] * v[i] * v[i];
        }
    }
    if m <= 0.0 || !m.is_finite() {
        return Err(Error::ZeroMass);
    }
    let factor = (mu / m).sqrt();
    for v in u.values_mut() {
        *v *= factor;
    }
    Ok(())
}

/// Initial guesses used by [`multistart_minimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPoint {
    /// Line profile centered far out on the first half-line.
    FarHalfLine,
    /// Line profile centered at the maximum of the potential (at the first
    /// vertex when the potential vanishes).
    PotentialMax,
    /// Half-line profiles glued to a constant plateau on the core.
    SmallMassPlateau,
    /// Seeded uniform positive noise.
    RandomNoise,
    /// Cut-and-lowered profile concentrated where the potential is positive
    /// (only attempted for a nonvanishing potential).
    LargeMassCut,
}

impl StartPoint {
    pub fn label(&self) -> &'static str {
        match self {
            StartPoint::FarHalfLine => "far-half-line",
            StartPoint::PotentialMax => "potential-max",
            StartPoint::SmallMassPlateau => "small-mass-plateau",
            StartPoint::RandomNoise => "random-noise",
            StartPoint::LargeMassCut => "large-mass-cut",
        }
    }
}

/// Final state of one start.
#[derive(Debug, Clone)]
pub struct StartOutcome {
    pub start: StartPoint,
    pub energy: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Result of a multistart run.
#[derive(Debug)]
pub struct MultistartReport {
    /// Lowest-energy converged report; lowest-energy report overall when no
    /// start converged.
    pub best: SolveReport,
    pub starts: Vec<StartOutcome>,
    /// Minimum final energy over all starts. Every final state is an
    /// admissible function of mass `mu`, so this value certifies the
    /// infimum from above regardless of convergence flags.
    pub lowest_energy: f64,
}

fn far_half_line_start(
    mesh: &Arc<Mesh>,
    sp: &SolitonParams,
    mu: f64,
) -> Option<GraphFunction> {
    let ei = mesh.graph.edges.iter().position(|e| e.is_infinite())?;
    let l = mesh.edges[ei].meshed_length();
    let sigma = sp.width(mu);
    let offset = if l > 20.0 * sigma { l - 10.0 * sigma } else { l / 2.0 };
    Some(soliton_truncated(sp, mu, mesh, PointOnEdge { edge: ei, offset }))
}

fn potential_max_start(
    mesh: &Arc<Mesh>,
    w: &PotentialField,
    sp: &SolitonParams,
    mu: f64,
) -> GraphFunction {
    let center = if w.sup_norm() > 0.0 {
        let mut best = (0usize, 0.0f64);
        for (i, &v) in w.values().iter().enumerate() {
            if v > best.1 && mesh.core_weights[i] > 0.0 {
                best = (i, v);
            }
        }
        mesh.dof_location(best.0).unwrap_or(PointOnEdge {
            edge: 0,
            offset: 0.0,
        })
    } else {
        // no potential: any vertex; take the first
        mesh.dof_location(mesh.vertex_dof[0]).unwrap_or(PointOnEdge {
            edge: 0,
            offset: 0.0,
        })
    };
    soliton_truncated(sp, mu, mesh, center)
}

fn random_start(mesh: &Arc<Mesh>, seed: u64) -> GraphFunction {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let values = (0..mesh.n_dofs).map(|_| rng.gen_range(0.0..1.0)).collect();
    GraphFunction::from_values(mesh, values)
}

/// Minimize from several structured starts plus seeded noise and keep the
/// best outcome. Starts run in parallel; the reduction order is fixed, so
/// results are deterministic for a fixed seed.
pub fn multistart_minimize(
    mesh: &Arc<Mesh>,
    w: &PotentialField,
    p: f64,
    mu: f64,
    params: &FlowParams,
) -> Result<MultistartReport> {
    let sp = soliton_params(p)?;
    let mut starts: Vec<(StartPoint, GraphFunction)> = Vec::new();
    if let Some(u) = far_half_line_start(mesh, &sp, mu) {
        starts.push((StartPoint::FarHalfLine, u));
    }
    starts.push((StartPoint::PotentialMax, potential_max_start(mesh, w, &sp, mu)));
    if let Ok(c) = criteria::candidate_small_mass(mesh, p, mu) {
        starts.push((StartPoint::SmallMassPlateau, c.function));
    }
    starts.push((StartPoint::RandomNoise, random_start(mesh, params.seed)));
    if w.sup_norm() > 0.0 {
        if let Ok(c) = criteria::candidate_large_mass(mesh, w, p, mu) {
            starts.push((StartPoint::LargeMassCut, c.function));
        }
    }

    let runs: Vec<(StartPoint, Result<SolveReport>)> = starts
        .into_par_iter()
        .map(|(kind, u0)| {
            let r = normalized_gradient_flow(&u0, w, p, mu, params);
            (kind, r)
        })
        .collect();

    let mut outcomes = Vec::new();
    let mut best: Option<SolveReport> = None;
    let mut best_any: Option<SolveReport> = None;
    let mut lowest_energy = f64::INFINITY;
    for (kind, run) in runs {
        let report = run?;
        outcomes.push(StartOutcome {
            start: kind,
            energy: report.energy.total,
            converged: report.converged,
            iterations: report.iterations,
        });
        lowest_energy = lowest_energy.min(report.energy.total);
        let better_any = best_any
            .as_ref()
            .map(|b| report.energy.total < b.energy.total)
            .unwrap_or(true);
        if better_any {
            best_any = Some(report.clone());
        }
        if report.converged {
            let better = best
                .as_ref()
                .map(|b| report.energy.total < b.energy.total)
                .unwrap_or(true);
            if better {
                best = Some(report);
            }
        }
    }
    let best = best.or(best_any).expect("at least one start ran");
    Ok(MultistartReport {
        best,
        starts: outcomes,
        lowest_energy,
    })
}
