//! Command implementations: solve, mass scan, and the check battery.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Context};
use rayon::prelude::*;

use nlsgraph::criteria::{
    assumption_h, candidate_large_mass, candidate_small_mass, existence_criterion,
    nfork_build, nfork_window, nonexistence_condition, small_mass_inequality,
};
use nlsgraph::functional::{soliton_energy_threshold, soliton_params, SolitonParams};
use nlsgraph::graph::{build_graph, compact_core, MetricGraph};
use nlsgraph::mesh::{build_mesh, sample_potential, Mesh, PotentialField, PotentialSpec};
use nlsgraph::solver::{multistart_minimize, FlowParams};

/// Mesh/flow knobs shared across commands; `None` fields pick defaults that
/// adapt to the mass under consideration.
#[derive(Debug, Clone, Default)]
pub struct NumericsOptions {
    pub h: Option<f64>,
    pub truncation: Option<f64>,
    pub tau: Option<f64>,
    pub max_iters: Option<usize>,
    pub seed: u64,
    /// Relative gap tolerance separating SUB_THRESHOLD from AT_THRESHOLD.
    pub gap_tol: f64,
}

impl NumericsOptions {
    pub fn gap_tol_or_default(&self) -> f64 {
        if self.gap_tol > 0.0 {
            self.gap_tol
        } else {
            1e-4
        }
    }

    /// Grid spacing: fine enough to resolve the mass-`mu` profile.
    fn resolve_h(&self, sp: &SolitonParams, mu: f64) -> f64 {
        self.h.unwrap_or_else(|| (sp.width(mu) / 50.0).min(0.05))
    }

    /// Truncation: the mass-`mu` profile decays below 1e-12 of its peak.
    fn resolve_truncation(&self, sp: &SolitonParams, mu: f64, h: f64) -> f64 {
        self.truncation
            .unwrap_or_else(|| sp.truncation_for(mu, 1e-12))
            .max(2.0 * h)
    }

    pub fn build_mesh_for(
        &self,
        graph: &Arc<MetricGraph>,
        p: f64,
        mu: f64,
    ) -> anyhow::Result<Arc<Mesh>> {
        let sp = soliton_params(p)?;
        let h = self.resolve_h(&sp, mu);
        let l = self.resolve_truncation(&sp, mu, h);
        Ok(build_mesh(graph, h, l)?)
    }

    pub fn flow_params(&self, mesh: &Mesh, p: f64, mu: f64) -> anyhow::Result<FlowParams> {
        let mut params = FlowParams::defaults(mesh, p, mu)?;
        if let Some(tau) = self.tau {
            params.step = tau;
        }
        if let Some(n) = self.max_iters {
            params.max_iters = n;
        }
        params.seed = self.seed;
        Ok(params)
    }
}

/// 17-significant-digit decimal form, stable across runs.
pub fn fmt_g17(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct LoadedProblem {
    pub graph: Arc<MetricGraph>,
    pub potential_spec: PotentialSpec,
}

pub fn load_problem(spec_path: &PathBuf) -> anyhow::Result<LoadedProblem> {
    let (gspec, pspec) = crate::specfile::load_spec(spec_path)?;
    let graph = Arc::new(build_graph(&gspec)?);
    Ok(LoadedProblem {
        graph,
        potential_spec: pspec,
    })
}

fn sample_problem_potential(
    mesh: &Arc<Mesh>,
    pspec: &PotentialSpec,
) -> anyhow::Result<PotentialField> {
    Ok(sample_potential(mesh, pspec)?)
}

/// Row classification of a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    SubThreshold,
    AtThreshold,
    NotConverged,
}

impl Classification {
    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::SubThreshold => "SUB_THRESHOLD",
            Classification::AtThreshold => "AT_THRESHOLD",
            Classification::NotConverged => "NOT_CONVERGED",
        }
    }
}

/// One row of a mass scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub mu: f64,
    pub e_min: f64,
    pub threshold: f64,
    pub gap: f64,
    pub class: Classification,
    pub deloc: f64,
    pub lambda: f64,
}

/// Classify by the energy certificate: below the threshold beyond tolerance
/// means a minimizer exists; within tolerance (and converged) the run sits
/// at the threshold; anything else is not certified.
pub fn classify(gap: f64, threshold: f64, converged: bool, gap_tol: f64) -> Classification {
    let tol = gap_tol * threshold.abs();
    if gap < -tol {
        Classification::SubThreshold
    } else if converged && gap <= tol {
        Classification::AtThreshold
    } else {
        Classification::NotConverged
    }
}

/// Solve at one mass and evaluate one scan row.
pub fn scan_row(
    graph: &Arc<MetricGraph>,
    pspec: &PotentialSpec,
    p: f64,
    mu: f64,
    opts: &NumericsOptions,
) -> anyhow::Result<ScanRow> {
    let sp = soliton_params(p)?;
    let mesh = opts.build_mesh_for(graph, p, mu)?;
    let w = sample_problem_potential(&mesh, pspec)?;
    let params = opts.flow_params(&mesh, p, mu)?;
    let report = multistart_minimize(&mesh, &w, p, mu, &params)?;
    let threshold = soliton_energy_threshold(&sp, mu);
    let gap = report.lowest_energy - threshold;
    Ok(ScanRow {
        mu,
        e_min: report.lowest_energy,
        threshold,
        gap,
        class: classify(gap, threshold, report.best.converged, opts.gap_tol_or_default()),
        deloc: report.best.delocalization,
        lambda: report.best.multiplier,
    })
}

/// Logarithmic mass grid, inclusive of both ends.
pub fn log_grid(mu_min: f64, mu_max: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| mu_min * (mu_max / mu_min).powf(i as f64 / (steps - 1) as f64))
        .collect()
}

pub struct ScanOutcome {
    pub rows: Vec<ScanRow>,
    /// Largest scanned mass below which every row is SUB_THRESHOLD.
    pub mu_star_lower: Option<f64>,
    /// Smallest scanned mass above which every row is SUB_THRESHOLD.
    pub mu_star_upper: Option<f64>,
}

pub fn scan_mass(
    graph: &Arc<MetricGraph>,
    pspec: &PotentialSpec,
    p: f64,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    opts: &NumericsOptions,
) -> anyhow::Result<ScanOutcome> {
    if !(mu_min > 0.0 && mu_max > mu_min) || steps < 2 {
        bail!("need 0 < mu-min < mu-max and steps >= 2");
    }
    let grid = log_grid(mu_min, mu_max, steps);
    let rows: Vec<ScanRow> = grid
        .par_iter()
        .map(|&mu| scan_row(graph, pspec, p, mu, opts))
        .collect::<anyhow::Result<_>>()?;

    let sub: Vec<bool> = rows
        .iter()
        .map(|r| r.class == Classification::SubThreshold)
        .collect();
    let prefix = sub.iter().take_while(|&&s| s).count();
    let mu_star_lower = (prefix > 0).then(|| rows[prefix - 1].mu);
    let suffix = sub.iter().rev().take_while(|&&s| s).count();
    let mu_star_upper = (suffix > 0).then(|| rows[rows.len() - suffix].mu);
    Ok(ScanOutcome {
        rows,
        mu_star_lower,
        mu_star_upper,
    })
}

pub fn write_scan_csv<W: Write>(
    out: &mut W,
    outcome: &ScanOutcome,
    p: f64,
    opts: &NumericsOptions,
) -> std::io::Result<()> {
    writeln!(out, "# nlsgraph scan-mass")?;
    writeln!(
        out,
        "# p={} gap_tol_rel={} seed={}",
        p,
        opts.gap_tol_or_default(),
        opts.seed
    )?;
    writeln!(out, "mu,E_min,threshold,gap,class,deloc,lambda")?;
    for r in &outcome.rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt_g17(r.mu),
            fmt_g17(r.e_min),
            fmt_g17(r.threshold),
            fmt_g17(r.gap),
            r.class.as_str(),
            fmt_g17(r.deloc),
            fmt_g17(r.lambda)
        )?;
    }
    match outcome.mu_star_lower {
        Some(m) => writeln!(out, "# mu_star_lower={}", fmt_g17(m))?,
        None => writeln!(out, "# mu_star_lower=none")?,
    }
    match outcome.mu_star_upper {
        Some(m) => writeln!(out, "# mu_star_upper={}", fmt_g17(m))?,
        None => writeln!(out, "# mu_star_upper=none")?,
    }
    Ok(())
}

/// Run one solve and print the structured report; optionally dump the
/// minimizer profile as `edge_id,coordinate,value` rows.
pub fn cmd_solve(
    spec_path: &PathBuf,
    p: f64,
    mu: f64,
    opts: &NumericsOptions,
    dump: Option<&PathBuf>,
    out: &mut impl Write,
) -> anyhow::Result<()> {
    let problem = load_problem(spec_path)?;
    let sp = soliton_params(p)?;
    let mesh = opts.build_mesh_for(&problem.graph, p, mu)?;
    let w = sample_problem_potential(&mesh, &problem.potential_spec)?;
    let params = opts.flow_params(&mesh, p, mu)?;
    let report = multistart_minimize(&mesh, &w, p, mu, &params)?;
    let threshold = soliton_energy_threshold(&sp, mu);
    let gap = report.lowest_energy - threshold;
    let class = classify(gap, threshold, report.best.converged, opts.gap_tol_or_default());

    writeln!(out, "# nlsgraph solve")?;
    writeln!(
        out,
        "# gap_tol_rel={} seed={} h={} L={}",
        opts.gap_tol_or_default(),
        opts.seed,
        mesh.h,
        mesh.truncation
    )?;
    writeln!(out, "p: {p}")?;
    writeln!(out, "mu: {}", fmt_g17(mu))?;
    writeln!(out, "energy_total: {}", fmt_g17(report.best.energy.total))?;
    writeln!(out, "energy_kinetic: {}", fmt_g17(report.best.energy.kinetic))?;
    writeln!(out, "energy_lp: {}", fmt_g17(report.best.energy.lp))?;
    writeln!(out, "energy_coupling: {}", fmt_g17(report.best.energy.coupling))?;
    writeln!(out, "threshold: {}", fmt_g17(threshold))?;
    writeln!(out, "e_min: {}", fmt_g17(report.lowest_energy))?;
    writeln!(out, "gap: {}", fmt_g17(gap))?;
    writeln!(out, "classification: {}", class.as_str())?;
    writeln!(out, "multiplier: {}", fmt_g17(report.best.multiplier))?;
    writeln!(out, "residual: {}", fmt_g17(report.best.residual))?;
    writeln!(out, "delocalization: {}", fmt_g17(report.best.delocalization))?;
    writeln!(out, "converged: {}", report.best.converged)?;
    writeln!(out, "iterations: {}", report.best.iterations)?;
    writeln!(out, "mass: {}", fmt_g17(report.best.mass))?;
    writeln!(out, "starts:")?;
    for s in &report.starts {
        writeln!(
            out,
            "  {}: energy={} converged={} iterations={}",
            s.start.label(),
            fmt_g17(s.energy),
            s.converged,
            s.iterations
        )?;
    }

    if let Some(path) = dump {
        let mut f = std::fs::File::create(path)
            .with_context(|| format!("cannot create dump file {}", path.display()))?;
        writeln!(f, "edge_id,coordinate,value")?;
        let values = report.best.minimizer.values();
        for (ei, grid) in mesh.edges.iter().enumerate() {
            let id = &mesh.graph.edges[ei].id;
            for (k, &dof) in grid.dofs.iter().enumerate() {
                writeln!(
                    f,
                    "{},{},{}",
                    id,
                    fmt_g17(k as f64 * grid.spacing),
                    fmt_g17(values[dof])
                )?;
            }
        }
    }
    Ok(())
}

/// Which structured check to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    ExistenceLarge,
    ExistenceSmall,
    Nonexistence,
    AssumptionH,
    NforkWindow,
}

#[allow(clippy::too_many_arguments)]
pub fn cmd_check(
    which: CheckKind,
    spec_path: Option<&PathBuf>,
    p: f64,
    mu: Option<f64>,
    epsilon: Option<f64>,
    nfork: Option<(usize, f64, u32)>,
    opts: &NumericsOptions,
    out: &mut impl Write,
) -> anyhow::Result<()> {
    if which == CheckKind::NforkWindow {
        let Some((n, l, _k)) = nfork else {
            bail!("nfork-window needs --n and --l");
        };
        let eps = epsilon.context("nfork-window needs --epsilon")?;
        let w = nfork_window(n, l, eps, p)?;
        writeln!(out, "# nlsgraph check nfork-window")?;
        writeln!(out, "n: {n}")?;
        writeln!(out, "l: {}", fmt_g17(l))?;
        writeln!(out, "epsilon: {}", fmt_g17(eps))?;
        writeln!(out, "mu_beta_lo: {}", fmt_g17(w.mu_beta_lo))?;
        writeln!(out, "mu_beta_hi: {}", fmt_g17(w.mu_beta_hi))?;
        writeln!(out, "mu_lo: {}", fmt_g17(w.mu_lo))?;
        writeln!(out, "mu_hi: {}", fmt_g17(w.mu_hi))?;
        writeln!(out, "verdict: {}", if w.nonempty { "nonempty" } else { "empty" })?;
        return Ok(());
    }

    // remaining checks act on a graph: either a spec file or a synthesized fork
    let (graph, pspec): (Arc<MetricGraph>, PotentialSpec) = match (spec_path, nfork) {
        (Some(path), None) => {
            let problem = load_problem(path)?;
            (problem.graph, problem.potential_spec)
        }
        (None, Some((n, l, k))) => {
            let eps = epsilon.context("synthesizing an n-fork needs --epsilon")?;
            let (g, pspec) = nfork_build(n, l, k, eps)?;
            (Arc::new(g), pspec)
        }
        (Some(_), Some(_)) => bail!("give either --spec or --n/--l, not both"),
        (None, None) => bail!("this check needs --spec (or --n/--l for a fork)"),
    };

    match which {
        CheckKind::AssumptionH => {
            let holds = assumption_h(&graph);
            writeln!(out, "# nlsgraph check assumption-h")?;
            let core = compact_core(&graph);
            writeln!(out, "half_lines: {}", graph.n_half_lines())?;
            writeln!(out, "core_length: {}", fmt_g17(core.total_length))?;
            writeln!(out, "verdict: {holds}")?;
        }
        CheckKind::Nonexistence => {
            let mu = mu.context("nonexistence needs --mu")?;
            let eps = epsilon.context("nonexistence needs --epsilon")?;
            if !(eps > 0.0) {
                bail!("epsilon must be positive");
            }
            let mesh = opts.build_mesh_for(&graph, p, mu)?;
            let w = sample_problem_potential(&mesh, &pspec)?;
            let rep = nonexistence_condition(&graph, &w, p, mu, eps)?;
            writeln!(out, "# nlsgraph check nonexistence")?;
            writeln!(out, "mu: {}", fmt_g17(rep.mu))?;
            writeln!(out, "epsilon: {}", fmt_g17(rep.epsilon))?;
            writeln!(out, "r_diameter: {}", fmt_g17(rep.r_diameter))?;
            writeln!(out, "r_length: {}", fmt_g17(rep.r_length))?;
            writeln!(out, "r_potential: {}", fmt_g17(rep.r_potential))?;
            writeln!(out, "g_const: {}", fmt_g17(rep.g_const))?;
            writeln!(out, "verdict: {}", rep.condition_met)?;
        }
        CheckKind::ExistenceLarge => {
            let mu = mu.context("existence-large needs --mu")?;
            let mesh = opts.build_mesh_for(&graph, p, mu)?;
            let w = sample_problem_potential(&mesh, &pspec)?;
            let c = candidate_large_mass(&mesh, &w, p, mu)?;
            let rep = existence_criterion(&c.function, &w, p)?;
            writeln!(out, "# nlsgraph check existence-large")?;
            writeln!(out, "mu: {}", fmt_g17(mu))?;
            writeln!(out, "kappa: {}", fmt_g17(c.kappa))?;
            writeln!(out, "half_width: {}", fmt_g17(c.half_width))?;
            writeln!(out, "candidate_energy: {}", fmt_g17(rep.candidate_energy))?;
            writeln!(out, "threshold: {}", fmt_g17(rep.threshold))?;
            writeln!(out, "gap: {}", fmt_g17(rep.gap))?;
            writeln!(out, "verdict: {}", rep.passed)?;
        }
        CheckKind::ExistenceSmall => {
            let mu = mu.context("existence-small needs --mu")?;
            let mesh = opts.build_mesh_for(&graph, p, mu)?;
            let w = sample_problem_potential(&mesh, &pspec)?;
            let c = candidate_small_mass(&mesh, p, mu)?;
            let rep = existence_criterion(&c.function, &w, p)?;
            writeln!(out, "# nlsgraph check existence-small")?;
            writeln!(out, "mu: {}", fmt_g17(mu))?;
            writeln!(out, "m: {}", fmt_g17(c.m))?;
            writeln!(out, "candidate_energy: {}", fmt_g17(rep.candidate_energy))?;
            writeln!(out, "threshold: {}", fmt_g17(rep.threshold))?;
            writeln!(out, "gap: {}", fmt_g17(rep.gap))?;
            writeln!(out, "verdict: {}", rep.passed)?;
            // closed-form route when the core is nonempty
            if let Ok(ineq) = small_mass_inequality(&mesh, p, c.m, &w) {
                writeln!(out, "inequality_lhs: {}", fmt_g17(ineq.lhs))?;
                writeln!(out, "inequality_rhs: {}", fmt_g17(ineq.rhs))?;
                writeln!(out, "inequality_satisfied: {}", ineq.satisfied)?;
            }
        }
        CheckKind::NforkWindow => unreachable!(),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_hits_both_ends() {
        let g = log_grid(0.1, 10.0, 5);
        assert_eq!(g.len(), 5);
        assert!((g[0] - 0.1).abs() < 1e-15);
        assert!((g[4] - 10.0).abs() < 1e-12);
        assert!((g[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn classification_thresholds() {
        let thr = -1.0;
        assert_eq!(
            classify(-1e-3, thr, false, 1e-4),
            Classification::SubThreshold
        );
        assert_eq!(classify(5e-5, thr, true, 1e-4), Classification::AtThreshold);
        assert_eq!(
            classify(5e-5, thr, false, 1e-4),
            Classification::NotConverged
        );
        assert_eq!(
            classify(1e-2, thr, true, 1e-4),
            Classification::NotConverged
        );
    }

    #[test]
    fn g17_is_lossless() {
        for x in [1.0 / 96.0, -0.1, 123456.789, 1e-30] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x);
        }
    }
}
