//! Seeded generators of random admissible functions and potentials, shared
//! by the property suites and the self-test command.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mesh::{GraphFunction, Mesh, PotentialEntry, PotentialField, PotentialKind};

/// A random continuous function on the mesh: linear interpolation between
/// random vertex values plus a few interior sine modes per edge, with an
/// exponential taper to zero at truncation ends. Deterministic in `seed`.
pub fn random_function(mesh: &Arc<Mesh>, seed: u64) -> GraphFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let nv = mesh.graph.n_vertices();
    let vertex_vals: Vec<f64> = (0..nv).map(|_| rng.gen_range(0.1..1.0)).collect();

    let mut values = vec![0.0; mesh.n_dofs];
    for (ei, grid) in mesh.edges.iter().enumerate() {
        let e = &mesh.graph.edges[ei];
        let len = grid.meshed_length();
        let v0 = vertex_vals[e.from];
        let v1 = if grid.infinite {
            0.0
        } else {
            match e.kind {
                crate::graph::EdgeKind::Finite { to, .. } => vertex_vals[to],
                crate::graph::EdgeKind::HalfLine => 0.0,
            }
        };
        let modes: Vec<(f64, f64)> = (1..=4)
            .map(|k| (rng.gen_range(-0.4..0.4) / (k * k) as f64, k as f64))
            .collect();
        let decay = rng.gen_range(0.8..3.0) / len;
        for (k, &dof) in grid.dofs.iter().enumerate() {
            let x = k as f64 * grid.spacing;
            let s = x / len;
            let mut v = if grid.infinite {
                // decay from the origin value, exactly zero at the far end
                v0 * (-decay * x).exp() * (1.0 - s)
            } else {
                v0 + (v1 - v0) * s
            };
            for &(a, m) in &modes {
                v += a * (m * std::f64::consts::PI * s).sin();
            }
            values[dof] = v;
        }
    }
    // edges sharing a vertex wrote the same value there (modes vanish at
    // endpoints), so the result is continuous
    GraphFunction::from_values(mesh, values)
}

/// Nonnegative variant (absolute value of [`random_function`]).
pub fn random_nonneg_function(mesh: &Arc<Mesh>, seed: u64) -> GraphFunction {
    random_function(mesh, seed).map(f64::abs)
}

/// A random nonnegative potential on the core: per finite edge a constant
/// plus a rectangular bump of random placement and height.
pub fn random_potential(mesh: &Arc<Mesh>, seed: u64) -> PotentialField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5851_f42d_4c95_7f2d);
    let mut spec: Vec<PotentialEntry> = Vec::new();
    for (ei, e) in mesh.graph.edges.iter().enumerate() {
        if e.is_infinite() {
            continue;
        }
        let len = mesh.edges[ei].meshed_length();
        spec.push(PotentialEntry {
            edge: e.id.clone(),
            kind: PotentialKind::Constant {
                value: rng.gen_range(0.0..0.5),
            },
        });
        spec.push(PotentialEntry {
            edge: e.id.clone(),
            kind: PotentialKind::Bump {
                center: rng.gen_range(0.2..0.8) * len,
                width: rng.gen_range(0.1..0.6) * len,
                height: rng.gen_range(0.0..2.0),
            },
        });
    }
    crate::mesh::sample_potential(mesh, &spec).expect("generated potential is valid")
}
