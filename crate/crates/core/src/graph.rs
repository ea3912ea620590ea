//! Metric graphs with finite edges and half-lines, and their compact cores.
//!
//! A graph is a set of vertices joined by edges; every edge is an interval
//! `[0, len]` (finite) or `[0, ∞)` (a half-line attached to its origin
//! vertex). Functions live edge-wise with continuity at vertices; that
//! structure is imposed later by the mesh, not here.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of an edge, as read from a spec file or built
/// programmatically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub kind: EdgeKindSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum EdgeKindSpec {
    Finite { to: String, length: f64 },
    HalfLine,
}

/// Declarative description of a graph: vertex ids plus edges.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

impl GraphSpec {
    pub fn finite_edge(mut self, id: &str, from: &str, to: &str, length: f64) -> Self {
        self.edges.push(EdgeSpec {
            id: id.into(),
            from: from.into(),
            kind: EdgeKindSpec::Finite { to: to.into(), length },
        });
        self
    }

    pub fn half_line(mut self, id: &str, from: &str) -> Self {
        self.edges.push(EdgeSpec {
            id: id.into(),
            from: from.into(),
            kind: EdgeKindSpec::HalfLine,
        });
        self
    }

    pub fn with_vertices(mut self, ids: &[&str]) -> Self {
        self.vertices = ids.iter().map(|s| s.to_string()).collect();
        self
    }
}

/// One edge of a built graph. Coordinates run from the `from` vertex.
#[derive(Debug, Clone)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeKind {
    Finite { to: usize, length: f64 },
    HalfLine,
}

impl Edge {
    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, EdgeKind::HalfLine)
    }

    /// Length of a finite edge; `None` for half-lines.
    pub fn length(&self) -> Option<f64> {
        match self.kind {
            EdgeKind::Finite { length, .. } => Some(length),
            EdgeKind::HalfLine => None,
        }
    }
}

/// A connected metric graph with finitely many vertices and edges.
#[derive(Debug, Clone)]
pub struct MetricGraph {
    pub vertices: Vec<String>,
    pub edges: Vec<Edge>,
}

impl MetricGraph {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_half_lines(&self) -> usize {
        self.edges.iter().filter(|e| e.is_infinite()).count()
    }

    pub fn is_noncompact(&self) -> bool {
        self.n_half_lines() > 0
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Indices of all finite edges.
    pub fn finite_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&i| !self.edges[i].is_infinite())
            .collect()
    }

    /// Scale all edge lengths by `factor` (> 0). Topology is unchanged.
    pub fn rescaled(&self, factor: f64) -> MetricGraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                id: e.id.clone(),
                from: e.from,
                kind: match e.kind {
                    EdgeKind::Finite { to, length } => EdgeKind::Finite {
                        to,
                        length: length * factor,
                    },
                    EdgeKind::HalfLine => EdgeKind::HalfLine,
                },
            })
            .collect();
        MetricGraph {
            vertices: self.vertices.clone(),
            edges,
        }
    }

    /// Shortest-path distances between all vertex pairs, using finite edges
    /// only (half-lines never connect two vertices). `f64::INFINITY` marks
    /// unreachable pairs.
    pub fn vertex_distances(&self) -> Vec<Vec<f64>> {
        let n = self.n_vertices();
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for e in &self.edges {
            if let EdgeKind::Finite { to, length } = e.kind {
                adj[e.from].push((to, length));
                adj[to].push((e.from, length));
            }
        }
        (0..n).map(|src| dijkstra(&adj, n, &[(src, 0.0)])).collect()
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed: BinaryHeap is a max-heap
        other.dist.total_cmp(&self.dist)
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra over a vertex adjacency list.
pub(crate) fn dijkstra(adj: &[Vec<(usize, f64)>], n: usize, sources: &[(usize, f64)]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for &(s, d0) in sources {
        if d0 < dist[s] {
            dist[s] = d0;
            heap.push(HeapEntry { dist: d0, vertex: s });
        }
    }
    while let Some(HeapEntry { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(u, w) in &adj[v] {
            let nd = d + w;
            if nd < dist[u] {
                dist[u] = nd;
                heap.push(HeapEntry { dist: nd, vertex: u });
            }
        }
    }
    dist
}

/// Build and validate a [`MetricGraph`] from its spec.
///
/// Rejects disconnected graphs, nonpositive finite lengths, and edges that
/// reference undeclared vertices.
pub fn build_graph(spec: &GraphSpec) -> Result<MetricGraph> {
    if spec.vertices.is_empty() {
        return Err(Error::InvalidSpec("no vertices declared".into()));
    }
    for (i, v) in spec.vertices.iter().enumerate() {
        if spec.vertices[..i].contains(v) {
            return Err(Error::InvalidSpec(format!("duplicate vertex id `{v}`")));
        }
    }
    let vertex_index = |id: &str, edge: &str| -> Result<usize> {
        spec.vertices
            .iter()
            .position(|v| v == id)
            .ok_or_else(|| Error::DanglingVertexReference {
                edge: edge.into(),
                vertex: id.into(),
            })
    };

    let mut edges = Vec::with_capacity(spec.edges.len());
    for (i, e) in spec.edges.iter().enumerate() {
        if spec.edges[..i].iter().any(|other| other.id == e.id) {
            return Err(Error::InvalidSpec(format!("duplicate edge id `{}`", e.id)));
        }
        let from = vertex_index(&e.from, &e.id)?;
        let kind = match &e.kind {
            EdgeKindSpec::Finite { to, length } => {
                if !(*length > 0.0) || !length.is_finite() {
                    return Err(Error::NonpositiveLength(e.id.clone()));
                }
                EdgeKind::Finite {
                    to: vertex_index(to, &e.id)?,
                    length: *length,
                }
            }
            EdgeKindSpec::HalfLine => EdgeKind::HalfLine,
        };
        edges.push(Edge {
            id: e.id.clone(),
            from,
            kind,
        });
    }

    let graph = MetricGraph {
        vertices: spec.vertices.clone(),
        edges,
    };

    // connectivity over finite edges: a path can never cross a half-line
    let n = graph.n_vertices();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for e in &graph.edges {
            if let EdgeKind::Finite { to, .. } = e.kind {
                for (a, b) in [(e.from, to), (to, e.from)] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::DisconnectedGraph);
    }
    Ok(graph)
}

/// The subgraph of all finite edges, with its total length and diameter.
#[derive(Debug, Clone)]
pub struct CompactCore {
    pub edges: Vec<usize>,
    pub total_length: f64,
    pub diameter: f64,
}

impl CompactCore {
    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// Compute the compact core of `g`.
///
/// The diameter is the maximal metric distance between any two core points.
/// Candidates are vertex pairs plus, for every edge pair, the optimum of the
/// exact point-to-point distance over both edge intervals (distance from an
/// interior point is the minimum over offsets to the edge endpoints plus the
/// vertex distance). An empty core has total length and diameter zero.
pub fn compact_core(g: &MetricGraph) -> CompactCore {
    let finite = g.finite_edges();
    let total_length: f64 = finite
        .iter()
        .map(|&i| g.edges[i].length().unwrap())
        .sum();
    if finite.is_empty() {
        return CompactCore {
            edges: finite,
            total_length: 0.0,
            diameter: 0.0,
        };
    }

    let dist = g.vertex_distances();
    let mut diameter: f64 = 0.0;

    // vertex pairs restricted to core vertices
    let mut in_core = vec![false; g.n_vertices()];
    for &ei in &finite {
        if let EdgeKind::Finite { to, .. } = g.edges[ei].kind {
            in_core[g.edges[ei].from] = true;
            in_core[to] = true;
        }
    }
    for a in 0..g.n_vertices() {
        for b in 0..g.n_vertices() {
            if in_core[a] && in_core[b] && dist[a][b].is_finite() {
                diameter = diameter.max(dist[a][b]);
            }
        }
    }

    for (pos, &ei) in finite.iter().enumerate() {
        let (a, b, le) = match g.edges[ei].kind {
            EdgeKind::Finite { to, length } => (g.edges[ei].from, to, length),
            EdgeKind::HalfLine => unreachable!(),
        };
        // two points on the same edge: direct segment vs the path around
        // through the rest of the graph; closed form of the optimum
        diameter = diameter.max((dist[a][b].min(le) + le) / 2.0);

        for &fi in &finite[pos + 1..] {
            let (c, d, lf) = match g.edges[fi].kind {
                EdgeKind::Finite { to, length } => (g.edges[fi].from, to, length),
                EdgeKind::HalfLine => unreachable!(),
            };
            diameter = diameter.max(edge_pair_max_distance(
                le, lf, dist[a][c], dist[a][d], dist[b][c], dist[b][d],
            ));
        }
    }

    CompactCore {
        edges: finite,
        total_length,
        diameter,
    }
}

/// Exact distance from a point at offset `t` on an edge `(a, b)` of length
/// `le` to a point at offset `s` on a different edge `(c, d)` of length `lf`:
/// the minimum of the four exit routes through the endpoints.
fn point_pair_distance(t: f64, s: f64, le: f64, lf: f64, d: &[f64; 4]) -> f64 {
    let [dac, dad, dbc, dbd] = *d;
    (t + s + dac)
        .min(t + (lf - s) + dad)
        .min((le - t) + s + dbc)
        .min((le - t) + (lf - s) + dbd)
}

/// Maximum of [`point_pair_distance`] over the rectangle `[0,le]×[0,lf]`.
///
/// The objective is a minimum of four affine functions with gradients
/// (±1, ±1), hence concave and piecewise linear; its maximum over the box is
/// attained at an intersection of two lines from the arrangement {four
/// pairwise-equality lines, four box sides}. All such intersections are
/// enumerated, clamped to the box, and evaluated.
fn edge_pair_max_distance(le: f64, lf: f64, dac: f64, dad: f64, dbc: f64, dbd: f64) -> f64 {
    let d = [dac, dad, dbc, dbd];
    if d.iter().all(|x| !x.is_finite()) {
        return 0.0;
    }
    // affine pieces g_i(t,s) = st_i * t + ss_i * s + c_i
    let pieces: [(f64, f64, f64); 4] = [
        (1.0, 1.0, dac),
        (1.0, -1.0, lf + dad),
        (-1.0, 1.0, le + dbc),
        (-1.0, -1.0, le + lf + dbd),
    ];
    // lines a*t + b*s = c: equality lines of all piece pairs, plus box sides
    let mut lines: Vec<(f64, f64, f64)> = Vec::with_capacity(10);
    for i in 0..4 {
        for j in (i + 1)..4 {
            let (ai, bi, ci) = pieces[i];
            let (aj, bj, cj) = pieces[j];
            if ci.is_finite() && cj.is_finite() {
                lines.push((ai - aj, bi - bj, cj - ci));
            }
        }
    }
    lines.push((1.0, 0.0, 0.0));
    lines.push((1.0, 0.0, le));
    lines.push((0.0, 1.0, 0.0));
    lines.push((0.0, 1.0, lf));

    let eval = |t: f64, s: f64| point_pair_distance(t, s, le, lf, &d);
    let mut best = eval(0.0, 0.0)
        .max(eval(le, 0.0))
        .max(eval(0.0, lf))
        .max(eval(le, lf));
    for i in 0..lines.len() {
        for j in (i + 1)..lines.len() {
            let (a1, b1, c1) = lines[i];
            let (a2, b2, c2) = lines[j];
            let det = a1 * b2 - a2 * b1;
            if det.abs() < 1e-12 {
                continue;
            }
            let t = (c1 * b2 - c2 * b1) / det;
            let s = (a1 * c2 - a2 * c1) / det;
            if t < -1e-9 || t > le + 1e-9 || s < -1e-9 || s > lf + 1e-9 {
                continue;
            }
            best = best.max(eval(t.clamp(0.0, le), s.clamp(0.0, lf)));
        }
    }
    best
}
