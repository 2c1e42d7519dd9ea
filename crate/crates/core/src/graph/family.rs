use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Graph;
use crate::error::{Error, Result};

/// Graph families whose realizations grow with `N` under fixed parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// Undirected path where each node links to its `q/2` nearest neighbors on each side.
    PathFuzz {
        q: usize,
        w: f64,
    },
    /// Undirected ring.
    Cycle {
        w: f64,
    },
    /// Ring where node `i` measures node `i + 1`.
    DirectedCycle {
        w: f64,
    },
    /// `d`-dimensional torus of side `M = N^{1/d}`, `r` neighbors per direction.
    ToricLattice {
        d: usize,
        r: usize,
        w: f64,
    },
    /// Delaunay triangulation of the first `N` points of a seeded uniform stream.
    DelaunayPlanar {
        seed: u64,
        w: f64,
    },
    TreePath {
        w: f64,
    },
    StarTree {
        w: f64,
    },
    Complete {
        w: f64,
    },
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::PathFuzz { .. } => "path_fuzz",
            Family::Cycle { .. } => "cycle",
            Family::DirectedCycle { .. } => "directed_cycle",
            Family::ToricLattice { .. } => "toric_lattice",
            Family::DelaunayPlanar { .. } => "delaunay_planar",
            Family::TreePath { .. } => "tree_path",
            Family::StarTree { .. } => "star_tree",
            Family::Complete { .. } => "complete",
        }
    }

    /// Parses a family tag together with its parameters.
    pub fn from_tag(tag: &str, q: usize, r: usize, d: usize, seed: u64, w: f64) -> Result<Self> {
        Ok(match tag {
            "path_fuzz" => Family::PathFuzz { q, w },
            "cycle" => Family::Cycle { w },
            "directed_cycle" => Family::DirectedCycle { w },
            "toric_lattice" => Family::ToricLattice { d, r, w },
            "delaunay_planar" => Family::DelaunayPlanar { seed, w },
            "tree_path" => Family::TreePath { w },
            "star_tree" => Family::StarTree { w },
            "complete" => Family::Complete { w },
            other => return Err(Error::domain(format!("unknown graph family '{}'", other))),
        })
    }

    pub fn weight(&self) -> f64 {
        match *self {
            Family::PathFuzz { w, .. }
            | Family::Cycle { w }
            | Family::DirectedCycle { w }
            | Family::ToricLattice { w, .. }
            | Family::DelaunayPlanar { w, .. }
            | Family::TreePath { w }
            | Family::StarTree { w }
            | Family::Complete { w } => w,
        }
    }

    /// Neighborhood bound implied by the parameters, when the family has one.
    pub fn locality(&self) -> Option<usize> {
        match *self {
            Family::PathFuzz { q, .. } => Some(q),
            Family::Cycle { .. } | Family::DirectedCycle { .. } | Family::TreePath { .. } => {
                Some(2)
            }
            Family::ToricLattice { d, r, .. } => Some(2 * r * d),
            Family::DelaunayPlanar { .. } | Family::StarTree { .. } | Family::Complete { .. } => {
                None
            }
        }
    }

    pub fn is_directed(&self) -> bool {
        matches!(self, Family::DirectedCycle { .. })
    }

    /// Realizes the family at size `n`.
    pub fn generate(&self, n: usize) -> Result<Graph> {
        if n < 2 {
            return Err(Error::domain(format!("family needs N >= 2, got {}", n)));
        }
        let w = self.weight();
        if !(w.is_finite() && w > 0.0) {
            return Err(Error::domain(format!(
                "edge weight must be positive, got {}",
                w
            )));
        }
        match *self {
            Family::PathFuzz { q, w } => {
                if q == 0 || q % 2 != 0 {
                    return Err(Error::domain(format!(
                        "path_fuzz needs even q > 0, got {}",
                        q
                    )));
                }
                let reach = q / 2;
                let edges = (0..n).flat_map(|i| {
                    (1..=reach)
                        .filter(move |k| i + k < n)
                        .map(move |k| (i, i + k, w))
                });
                Graph::undirected(n, edges)
            }
            Family::Cycle { w } => Graph::undirected(n, ring_pairs(n, 1).map(|(i, j)| (i, j, w))),
            Family::DirectedCycle { w } => {
                if n == 2 {
                    return Graph::directed(2, [(0, 1, w), (1, 0, w)]);
                }
                Graph::directed(n, (0..n).map(|i| (i, (i + 1) % n, w)))
            }
            Family::ToricLattice { d, r, w } => toric_lattice(n, d, r, w),
            Family::DelaunayPlanar { seed, w } => delaunay(n, seed, w),
            Family::TreePath { w } => Graph::undirected(n, (0..n - 1).map(|i| (i, i + 1, w))),
            Family::StarTree { w } => Graph::undirected(n, (1..n).map(|i| (0, i, w))),
            Family::Complete { w } => {
                Graph::undirected(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, w))))
            }
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Unordered ring pairs at hop distance `1..=r`, deduplicated for small rings.
fn ring_pairs(m: usize, r: usize) -> impl Iterator<Item = (usize, usize)> {
    let mut set = BTreeSet::new();
    for i in 0..m {
        for k in 1..=r {
            let j = (i + k) % m;
            if j != i {
                set.insert((i.min(j), i.max(j)));
            }
        }
    }
    set.into_iter()
}

fn toric_lattice(n: usize, d: usize, r: usize, w: f64) -> Result<Graph> {
    if d == 0 || r == 0 {
        return Err(Error::domain("toric lattice needs d >= 1 and r >= 1"));
    }
    let side = (n as f64).powf(1.0 / d as f64).round() as usize;
    if side.checked_pow(d as u32) != Some(n) {
        return Err(Error::domain(format!(
            "N = {} is not a perfect {}-th power",
            n, d
        )));
    }
    let mut set = BTreeSet::new();
    for node in 0..n {
        let mut stride = 1;
        for _ in 0..d {
            let coord = (node / stride) % side;
            for k in 1..=r {
                let shifted = (coord + k) % side;
                let other = node - coord * stride + shifted * stride;
                if other != node {
                    set.insert((node.min(other), node.max(other)));
                }
            }
            stride *= side;
        }
    }
    Graph::undirected(n, set.into_iter().map(|(i, j)| (i, j, w)))
}

/// Points for the Delaunay family; the first `n` points do not depend on `n`.
pub(crate) fn delaunay_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.gen::<f64>(), rng.gen::<f64>()))
        .collect()
}

fn delaunay(n: usize, seed: u64, w: f64) -> Result<Graph> {
    let pts = delaunay_points(n, seed);
    let set = super::delaunay::triangulation_edges(&pts);
    Graph::undirected(n, set.into_iter().map(|(i, j)| (i, j, w)))
}
