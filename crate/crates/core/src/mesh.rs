//! Uniform per-edge meshes with shared vertex DOFs and trapezoidal weights.
//!
//! Half-lines are truncated at a distance `L` with a homogeneous Dirichlet
//! DOF at the far end. Endpoint grid points of edges meeting at a vertex are
//! identified with a single DOF, so continuity across vertices is structural.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dijkstra, EdgeKind, MetricGraph};

/// Grid of one edge: `dofs[k]` lives at coordinate `k * spacing`.
#[derive(Debug, Clone)]
pub struct EdgeGrid {
    pub spacing: f64,
    pub dofs: Vec<usize>,
    pub infinite: bool,
}

impl EdgeGrid {
    /// Meshed length of this edge (truncated length for half-lines).
    pub fn meshed_length(&self) -> f64 {
        self.spacing * (self.dofs.len() - 1) as f64
    }
}

#[derive(Debug)]
pub struct Mesh {
    pub graph: Arc<MetricGraph>,
    pub edges: Vec<EdgeGrid>,
    pub n_dofs: usize,
    /// Trapezoidal quadrature weight per DOF, summed over incident edges.
    pub weights: Vec<f64>,
    /// Weight contributions from finite edges only (integration over the core).
    pub core_weights: Vec<f64>,
    /// Far-end DOFs of truncated half-lines (functions vanish there).
    pub dirichlet: Vec<bool>,
    /// DOF id of each vertex.
    pub vertex_dof: Vec<usize>,
    /// Target spacing and truncation length the mesh was built with.
    pub h: f64,
    pub truncation: f64,
}

/// A point of the graph: an edge index and a coordinate along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointOnEdge {
    pub edge: usize,
    pub offset: f64,
}

/// Build a mesh with grid spacing at most `h` on every edge and half-lines
/// truncated at `L`. Requires `h > 0`, `L > 0`, `L >= 10 h`.
pub fn build_mesh(graph: &Arc<MetricGraph>, h: f64, l_trunc: f64) -> Result<Arc<Mesh>> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidResolution(format!("h = {h} must be positive")));
    }
    if !(l_trunc > 0.0) || !l_trunc.is_finite() {
        return Err(Error::InvalidResolution(format!(
            "L = {l_trunc} must be positive"
        )));
    }
    if l_trunc < 2.0 * h {
        return Err(Error::InvalidResolution(format!(
            "L = {l_trunc} must be at least 2 h = {}",
            2.0 * h
        )));
    }

    let nv = graph.n_vertices();
    let mut n_dofs = nv;
    let mut edges = Vec::with_capacity(graph.edges.len());
    for e in &graph.edges {
        let (len, infinite, to) = match e.kind {
            EdgeKind::Finite { to, length } => (length, false, Some(to)),
            EdgeKind::HalfLine => (l_trunc, true, None),
        };
        let mut n_int = (len / h).ceil() as usize;
        n_int = n_int.max(1);
        if to == Some(e.from) {
            // self-loop: avoid a single interval joining a DOF to itself
            n_int = n_int.max(2);
        }
        let spacing = len / n_int as f64;
        let mut dofs = Vec::with_capacity(n_int + 1);
        dofs.push(e.from);
        for _ in 1..n_int {
            dofs.push(n_dofs);
            n_dofs += 1;
        }
        match to {
            Some(v) => dofs.push(v),
            None => {
                dofs.push(n_dofs);
                n_dofs += 1;
            }
        }
        edges.push(EdgeGrid {
            spacing,
            dofs,
            infinite,
        });
    }

    let mut weights = vec![0.0; n_dofs];
    let mut core_weights = vec![0.0; n_dofs];
    let mut dirichlet = vec![false; n_dofs];
    for grid in &edges {
        let half = 0.5 * grid.spacing;
        for k in 0..grid.dofs.len() - 1 {
            weights[grid.dofs[k]] += half;
            weights[grid.dofs[k + 1]] += half;
            if !grid.infinite {
                core_weights[grid.dofs[k]] += half;
                core_weights[grid.dofs[k + 1]] += half;
            }
        }
        if grid.infinite {
            dirichlet[*grid.dofs.last().unwrap()] = true;
        }
    }

    Ok(Arc::new(Mesh {
        graph: Arc::clone(graph),
        edges,
        n_dofs,
        weights,
        core_weights,
        dirichlet,
        vertex_dof: (0..nv).collect(),
        h,
        truncation: l_trunc,
    }))
}

impl Mesh {
    /// Total meshed length: sum of finite edge lengths plus `n * L` over
    /// half-lines. Equals the sum of quadrature weights.
    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(EdgeGrid::meshed_length).sum()
    }

    pub fn min_spacing(&self) -> f64 {
        self.edges
            .iter()
            .map(|g| g.spacing)
            .fold(f64::INFINITY, f64::min)
    }

    /// First (edge, coordinate) location of a DOF.
    pub fn dof_location(&self, dof: usize) -> Option<PointOnEdge> {
        for (ei, grid) in self.edges.iter().enumerate() {
            if let Some(k) = grid.dofs.iter().position(|&d| d == dof) {
                return Some(PointOnEdge {
                    edge: ei,
                    offset: k as f64 * grid.spacing,
                });
            }
        }
        None
    }

    /// Same structure with every length multiplied by `factor`.
    pub fn rescaled(&self, factor: f64) -> Arc<Mesh> {
        Arc::new(Mesh {
            graph: Arc::new(self.graph.rescaled(factor)),
            edges: self
                .edges
                .iter()
                .map(|g| EdgeGrid {
                    spacing: g.spacing * factor,
                    dofs: g.dofs.clone(),
                    infinite: g.infinite,
                })
                .collect(),
            n_dofs: self.n_dofs,
            weights: self.weights.iter().map(|w| w * factor).collect(),
            core_weights: self.core_weights.iter().map(|w| w * factor).collect(),
            dirichlet: self.dirichlet.clone(),
            vertex_dof: self.vertex_dof.clone(),
            h: self.h * factor,
            truncation: self.truncation * factor,
        })
    }

    /// Metric distance from `point` to every DOF.
    pub fn distances_from(&self, point: PointOnEdge) -> Vec<f64> {
        let g = &self.graph;
        let n = g.n_vertices();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for e in &g.edges {
            if let EdgeKind::Finite { to, length } = e.kind {
                adj[e.from].push((to, length));
                adj[to].push((e.from, length));
            }
        }
        let center_edge = &g.edges[point.edge];
        let mut sources = vec![(center_edge.from, point.offset)];
        if let EdgeKind::Finite { to, length } = center_edge.kind {
            sources.push((to, length - point.offset));
        }
        let vdist = dijkstra(&adj, n, &sources);

        let mut out = vec![f64::INFINITY; self.n_dofs];
        for (ei, grid) in self.edges.iter().enumerate() {
            let e = &g.edges[ei];
            for (k, &dof) in grid.dofs.iter().enumerate() {
                let x = k as f64 * grid.spacing;
                let mut d = x + vdist[e.from];
                if let EdgeKind::Finite { to, length } = e.kind {
                    d = d.min((length - x) + vdist[to]);
                }
                if ei == point.edge {
                    d = d.min((x - point.offset).abs());
                }
                out[dof] = out[dof].min(d);
            }
        }
        out
    }

    /// Distance from the compact core: zero on finite edges and at vertices,
    /// the coordinate along half-lines otherwise.
    pub fn distance_from_core(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_dofs];
        for grid in &self.edges {
            if grid.infinite {
                for (k, &dof) in grid.dofs.iter().enumerate().skip(1) {
                    out[dof] = k as f64 * grid.spacing;
                }
            }
        }
        // vertex DOFs sit at distance zero even on star graphs
        for &vd in &self.vertex_dof {
            out[vd] = 0.0;
        }
        out
    }
}

/// A real-valued sampled function on a mesh, continuous across vertices by
/// construction and vanishing at truncation ends.
#[derive(Debug, Clone)]
pub struct GraphFunction {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
}

impl GraphFunction {
    pub fn zero(mesh: &Arc<Mesh>) -> Self {
        GraphFunction {
            mesh: Arc::clone(mesh),
            values: vec![0.0; mesh.n_dofs],
        }
    }

    /// Wrap raw DOF values. Panics on non-finite entries; truncation-end
    /// values are forced to zero.
    pub fn from_values(mesh: &Arc<Mesh>, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_dofs, "value vector length != n_dofs");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "non-finite DOF value"
        );
        for (i, &d) in mesh.dirichlet.iter().enumerate() {
            if d {
                values[i] = 0.0;
            }
        }
        GraphFunction {
            mesh: Arc::clone(mesh),
            values,
        }
    }

    /// Sample a scalar field given as (edge, coordinate) -> value.
    pub fn sample<F: Fn(usize, f64) -> f64>(mesh: &Arc<Mesh>, f: F) -> Self {
        let mut values = vec![0.0; mesh.n_dofs];
        for (ei, grid) in mesh.edges.iter().enumerate() {
            for (k, &dof) in grid.dofs.iter().enumerate() {
                values[dof] = f(ei, k as f64 * grid.spacing);
            }
        }
        Self::from_values(mesh, values)
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn same_mesh(&self, other: &Mesh) -> bool {
        std::ptr::eq(Arc::as_ptr(&self.mesh), other as *const Mesh)
    }

    /// Quadrature of `u^2` over the whole mesh.
    pub fn mass(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mesh.weights)
            .map(|(v, w)| w * v * v)
            .sum()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rescale values so the mass becomes exactly `mu`. Errors on zero mass.
    pub fn renormalized(&self, mu: f64) -> Result<GraphFunction> {
        let m = self.mass();
        if m <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let factor = (mu / m).sqrt();
        let values = self.values.iter().map(|v| v * factor).collect();
        Ok(GraphFunction {
            mesh: Arc::clone(&self.mesh),
            values,
        })
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GraphFunction {
        GraphFunction {
            mesh: Arc::clone(&self.mesh),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

/// Per-edge potential primitives. All of them are nonnegative on the edge.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialKind {
    Constant {
        value: f64,
    },
    /// Rectangular bump: `height` on `|x - center| <= width / 2`, zero
    /// elsewhere on the edge.
    Bump {
        center: f64,
        width: f64,
        height: f64,
    },
    Monomial {
        coefficient: f64,
        exponent: u32,
    },
    Samples {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PotentialEntry {
    pub edge: String,
    #[serde(flatten)]
    pub kind: PotentialKind,
}

/// Potential assignment for the finite edges of a graph. Entries for the
/// same edge accumulate additively.
pub type PotentialSpec = Vec<PotentialEntry>;

/// Nonnegative sampled potential supported on the compact core.
#[derive(Debug, Clone)]
pub struct PotentialField {
    mesh: Arc<Mesh>,
    values: Vec<f64>,
    sup_norm: f64,
}

impl PotentialField {
    pub fn zero(mesh: &Arc<Mesh>) -> Self {
        PotentialField {
            mesh: Arc::clone(mesh),
            values: vec![0.0; mesh.n_dofs],
            sup_norm: 0.0,
        }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup_norm
    }

    pub fn same_mesh(&self, other: &Mesh) -> bool {
        std::ptr::eq(Arc::as_ptr(&self.mesh), other as *const Mesh)
    }

    /// Quadrature of `w` over the core.
    pub fn core_integral(&self) -> f64 {
        self.values
            .iter()
            .zip(&self.mesh.core_weights)
            .map(|(v, w)| w * v)
            .sum()
    }

    pub(crate) fn from_raw(mesh: &Arc<Mesh>, values: Vec<f64>) -> Self {
        let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(*v));
        PotentialField {
            mesh: Arc::clone(mesh),
            values,
            sup_norm,
        }
    }
}

/// Sample a potential spec on a mesh. Rejects entries on infinite edges and
/// any negative value; DOFs on half-lines stay at zero.
///
/// Entries for the same edge accumulate additively. At a vertex shared by
/// several edges the sampled value is the maximum over the incident edges
/// (the primitives need not agree across vertices).
pub fn sample_potential(mesh: &Arc<Mesh>, pspec: &PotentialSpec) -> Result<PotentialField> {
    // per-edge totals first, then merge into the shared DOF vector
    let mut per_edge: Vec<Option<Vec<f64>>> = vec![None; mesh.edges.len()];
    for entry in pspec {
        let ei = mesh
            .graph
            .edge_index(&entry.edge)
            .ok_or_else(|| Error::UnknownEdge(entry.edge.clone()))?;
        if mesh.graph.edges[ei].is_infinite() {
            return Err(Error::PotentialOnInfiniteEdge(entry.edge.clone()));
        }
        let grid = &mesh.edges[ei];
        let total = per_edge[ei].get_or_insert_with(|| vec![0.0; grid.dofs.len()]);
        for (k, slot) in total.iter_mut().enumerate() {
            let x = k as f64 * grid.spacing;
            let v = match &entry.kind {
                PotentialKind::Constant { value } => *value,
                PotentialKind::Bump {
                    center,
                    width,
                    height,
                } => {
                    if (x - center).abs() <= width / 2.0 {
                        *height
                    } else {
                        0.0
                    }
                }
                PotentialKind::Monomial {
                    coefficient,
                    exponent,
                } => coefficient * x.powi(*exponent as i32),
                PotentialKind::Samples { values } => {
                    if values.len() != grid.dofs.len() {
                        return Err(Error::InvalidSpec(format!(
                            "edge `{}` has {} grid points but {} samples given",
                            entry.edge,
                            grid.dofs.len(),
                            values.len()
                        )));
                    }
                    values[k]
                }
            };
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativePotentialValue(entry.edge.clone()));
            }
            *slot += v;
        }
    }
    Ok(PotentialField::from_raw(mesh, merge_edge_samples(mesh, &per_edge)))
}

/// Write per-edge sample vectors into a global DOF vector: interior DOFs are
/// owned by one edge, vertex DOFs take the max over incident edges.
fn merge_edge_samples(mesh: &Mesh, per_edge: &[Option<Vec<f64>>]) -> Vec<f64> {
    let mut values = vec![0.0f64; mesh.n_dofs];
    for (ei, total) in per_edge.iter().enumerate() {
        let Some(total) = total else { continue };
        let grid = &mesh.edges[ei];
        let last = grid.dofs.len() - 1;
        for (k, &dof) in grid.dofs.iter().enumerate() {
            if k == 0 || k == last {
                values[dof] = values[dof].max(total[k]);
            } else {
                values[dof] = total[k];
            }
        }
    }
    values
}

/// Potential induced by edge curvature in the thin-channel limit:
/// `w = gamma^2 / 4`, always nonnegative. `gamma` maps edge ids to samples
/// at that edge's grid points.
pub fn curvature_potential(
    mesh: &Arc<Mesh>,
    gamma: &[(String, Vec<f64>)],
) -> Result<PotentialField> {
    let mut per_edge: Vec<Option<Vec<f64>>> = vec![None; mesh.edges.len()];
    for (edge_id, samples) in gamma {
        let ei = mesh
            .graph
            .edge_index(edge_id)
            .ok_or_else(|| Error::UnknownEdge(edge_id.clone()))?;
        if mesh.graph.edges[ei].is_infinite() {
            return Err(Error::CurvatureOnInfiniteEdge(edge_id.clone()));
        }
        let grid = &mesh.edges[ei];
        if samples.len() != grid.dofs.len() {
            return Err(Error::InvalidSpec(format!(
                "edge `{edge_id}` has {} grid points but {} curvature samples given",
                grid.dofs.len(),
                samples.len()
            )));
        }
        let total = per_edge[ei].get_or_insert_with(|| vec![0.0; grid.dofs.len()]);
        for (k, slot) in total.iter_mut().enumerate() {
            *slot += samples[k] * samples[k] / 4.0;
        }
    }
    Ok(PotentialField::from_raw(mesh, merge_edge_samples(mesh, &per_edge)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, GraphSpec};

    fn half_line() -> Arc<MetricGraph> {
        Arc::new(
            build_graph(&GraphSpec::default().with_vertices(&["o"]).half_line("h", "o")).unwrap(),
        )
    }

    pub(crate) fn two_bridge() -> Arc<MetricGraph> {
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

    #[test]
    fn half_line_grid() {
        let mesh = build_mesh(&half_line(), 0.5, 2.0).unwrap();
        let grid = &mesh.edges[0];
        assert_eq!(grid.dofs.len(), 5);
        assert_eq!(grid.spacing, 0.5);
        assert!(mesh.dirichlet[*grid.dofs.last().unwrap()]);
        assert!(!mesh.dirichlet[grid.dofs[0]]);
    }

    #[test]
    fn rejects_bad_resolution() {
        assert!(matches!(
            build_mesh(&half_line(), 0.0, 1.0),
            Err(Error::InvalidResolution(_))
        ));
        assert!(matches!(
            build_mesh(&half_line(), 0.5, 0.9),
            Err(Error::InvalidResolution(_))
        ));
    }

    #[test]
    fn vertex_dofs_are_shared() {
        let mesh = build_mesh(&two_bridge(), 0.25, 2.5).unwrap();
        // edge 0 is the core v1-v2, edges 1 and 2 are half-lines at v1, v2
        assert_eq!(mesh.edges[0].dofs[0], mesh.edges[1].dofs[0]);
        assert_eq!(*mesh.edges[0].dofs.last().unwrap(), mesh.edges[2].dofs[0]);
        assert_eq!(mesh.edges[1].dofs[0], mesh.vertex_dof[0]);
    }

    #[test]
    fn weights_sum_to_total_length() {
        let mesh = build_mesh(&two_bridge(), 0.3, 4.0).unwrap();
        let total: f64 = mesh.weights.iter().sum();
        let expect = 1.0 + 2.0 * 4.0;
        assert!((total - expect).abs() <= 1e-12 * expect);
        assert!((mesh.total_length() - expect).abs() <= 1e-12 * expect);
        let core: f64 = mesh.core_weights.iter().sum();
        assert!((core - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn constant_function_mass() {
        // single finite edge of length 2, u == 1
        let g = Arc::new(
            build_graph(
                &GraphSpec::default()
                    .with_vertices(&["a", "b"])
                    .finite_edge("e", "a", "b", 2.0),
            )
            .unwrap(),
        );
        let mesh = build_mesh(&g, 0.1, 1.0).unwrap();
        let u = GraphFunction::sample(&mesh, |_, _| 1.0);
        assert!((u.mass() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_function_mass_is_zero() {
        let mesh = build_mesh(&two_bridge(), 0.1, 2.0).unwrap();
        assert_eq!(GraphFunction::zero(&mesh).mass(), 0.0);
    }

    #[test]
    fn potential_zero_everywhere() {
        let mesh = build_mesh(&two_bridge(), 0.1, 2.0).unwrap();
        let spec = vec![PotentialEntry {
            edge: "core".into(),
            kind: PotentialKind::Constant { value: 0.0 },
        }];
        let w = sample_potential(&mesh, &spec).unwrap();
        assert_eq!(w.sup_norm(), 0.0);
        assert!(w.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn monomial_potential_sup_norm() {
        // n-fork style monomial: eps^3 x^{2k} / (4 l^{2k+2}) peaks at x = l
        let g = Arc::new(
            build_graph(
                &GraphSpec::default()
                    .with_vertices(&["o", "a"])
                    .finite_edge("e", "o", "a", 1.0)
                    .half_line("h", "o"),
            )
            .unwrap(),
        );
        let mesh = build_mesh(&g, 0.05, 1.0).unwrap();
        let eps: f64 = 0.1;
        let spec = vec![PotentialEntry {
            edge: "e".into(),
            kind: PotentialKind::Monomial {
                coefficient: eps.powi(3) / 4.0,
                exponent: 2,
            },
        }];
        let w = sample_potential(&mesh, &spec).unwrap();
        assert!((w.sup_norm() - 2.5e-4).abs() < 1e-18);
        // zero on the half-line
        for &dof in mesh.edges[1].dofs.iter().skip(1) {
            assert_eq!(w.values()[dof], 0.0);
        }
    }

    #[test]
    fn negative_potential_rejected() {
        let mesh = build_mesh(&two_bridge(), 0.1, 2.0).unwrap();
        let spec = vec![PotentialEntry {
            edge: "core".into(),
            kind: PotentialKind::Bump {
                center: 0.5,
                width: 0.2,
                height: -1.0,
            },
        }];
        assert!(matches!(
            sample_potential(&mesh, &spec),
            Err(Error::NegativePotentialValue(_))
        ));
    }

    #[test]
    fn potential_on_half_line_rejected() {
        let mesh = build_mesh(&two_bridge(), 0.1, 2.0).unwrap();
        let spec = vec![PotentialEntry {
            edge: "h1".into(),
            kind: PotentialKind::Constant { value: 1.0 },
        }];
        assert!(matches!(
            sample_potential(&mesh, &spec),
            Err(Error::PotentialOnInfiniteEdge(_))
        ));
    }

    #[test]
    fn curvature_squares_and_stays_nonnegative() {
        let mesh = build_mesh(&two_bridge(), 0.25, 2.5).unwrap();
        let n = mesh.edges[0].dofs.len();
        let w = curvature_potential(&mesh, &[("core".into(), vec![2.0; n])]).unwrap();
        for &dof in &mesh.edges[0].dofs {
            assert_eq!(w.values()[dof], 1.0);
        }
        let w = curvature_potential(&mesh, &[("core".into(), vec![-2.0; n])]).unwrap();
        assert_eq!(w.sup_norm(), 1.0);
        assert!(matches!(
            curvature_potential(&mesh, &[("h1".into(), vec![0.0; 9])]),
            Err(Error::CurvatureOnInfiniteEdge(_))
        ));
    }

    #[test]
    fn distance_from_core_counts_half_line_coordinate() {
        let mesh = build_mesh(&two_bridge(), 0.25, 2.0).unwrap();
        let d = mesh.distance_from_core();
        for &dof in &mesh.edges[0].dofs {
            assert_eq!(d[dof], 0.0);
        }
        let h1 = &mesh.edges[1];
        assert_eq!(d[h1.dofs[4]], 1.0);
    }

    #[test]
    fn distances_from_interior_point() {
        let mesh = build_mesh(&two_bridge(), 0.25, 2.0).unwrap();
        // center mid-core
        let d = mesh.distances_from(PointOnEdge {
            edge: 0,
            offset: 0.5,
        });
        assert_eq!(d[mesh.vertex_dof[0]], 0.5);
        assert_eq!(d[mesh.vertex_dof[1]], 0.5);
        // one step out on half-line 1
        let dof = mesh.edges[1].dofs[1];
        assert!((d[dof] - 0.75).abs() < 1e-12);
    }
}
