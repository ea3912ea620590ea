//! Graph/potential spec files: a TOML document with `vertices`, `edges`,
//! and an optional `potential` array.
//!
//! ```toml
//! vertices = ["v1", "v2"]
//!
//! [[edges]]
//! id = "core"
//! from = "v1"
//! to = "v2"
//! length = 1.0
//!
//! [[edges]]
//! id = "h1"
//! from = "v1"
//! length = "inf"          # half-line: no `to`
//!
//! [[potential]]
//! edge = "core"
//! kind = "bump"            # constant | bump | monomial | samples
//! center = 0.5
//! width = 0.5
//! height = 1.0
//! ```

use anyhow::{bail, Context};
use serde::Deserialize;

use nlsgraph::graph::{EdgeKindSpec, EdgeSpec, GraphSpec};
use nlsgraph::mesh::{PotentialEntry, PotentialSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    #[serde(default)]
    potential: Vec<PotentialEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    id: String,
    from: String,
    #[serde(default)]
    to: Option<String>,
    length: RawLength,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawLength {
    Finite(f64),
    Marker(String),
}

/// Parse a spec document. Errors carry the TOML line/column diagnostics.
pub fn parse_spec(text: &str) -> anyhow::Result<(GraphSpec, PotentialSpec)> {
    let raw: RawSpec = toml::from_str(text).context("spec parse error")?;
    let mut edges = Vec::with_capacity(raw.edges.len());
    for e in raw.edges {
        let kind = match e.length {
            RawLength::Finite(length) => {
                let Some(to) = e.to else {
                    bail!("edge `{}`: finite edge needs a `to` vertex", e.id);
                };
                EdgeKindSpec::Finite { to, length }
            }
            RawLength::Marker(m) if m == "inf" => {
                if e.to.is_some() {
                    bail!(
                        "edge `{}`: a half-line has no `to` endpoint (remove it)",
                        e.id
                    );
                }
                EdgeKindSpec::HalfLine
            }
            RawLength::Marker(m) => {
                bail!("edge `{}`: length must be a number or \"inf\", got \"{m}\"", e.id)
            }
        };
        edges.push(EdgeSpec {
            id: e.id,
            from: e.from,
            kind,
        });
    }
    Ok((
        GraphSpec {
            vertices: raw.vertices,
            edges,
        },
        raw.potential,
    ))
}

/// Read and parse a spec file.
pub fn load_spec(path: &std::path::Path) -> anyhow::Result<(GraphSpec, PotentialSpec)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read spec file {}", path.display()))?;
    parse_spec(&text).with_context(|| format!("in spec file {}", path.display()))
}
