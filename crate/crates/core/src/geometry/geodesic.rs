//! Graph shortest-path approximation of the Riemannian boundary distance on
//! the unit disc.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::riem_dist_to_boundary;
use crate::error::{Error, Result};

/// Neighbour stencil of the grid graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stencil {
    Eight,
    Sixteen,
}

impl Stencil {
    pub fn from_count(count: u32) -> Result<Self> {
        match count {
            8 => Ok(Self::Eight),
            16 => Ok(Self::Sixteen),
            other => Err(Error::Parameter(format!(
                "stencil must have 8 or 16 neighbours, got {other}"
            ))),
        }
    }

    pub fn count(&self) -> u32 {
        match self {
            Self::Eight => 8,
            Self::Sixteen => 16,
        }
    }

    fn offsets(&self) -> &'static [(i64, i64)] {
        const EIGHT: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        const SIXTEEN: [(i64, i64); 16] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
            (2, 1),
            (2, -1),
            (-2, 1),
            (-2, -1),
            (1, 2),
            (1, -2),
            (-1, 2),
            (-1, -2),
        ];
        match self {
            Self::Eight => &EIGHT,
            Self::Sixteen => &SIXTEEN,
        }
    }
}

/// One grid node inside the disc.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicNode {
    pub x: f64,
    pub y: f64,
    pub sigma: f64,
    pub d_exact: f64,
    pub d_graph: f64,
}

/// Distance field on the nodes of a `grid_size × grid_size` cell-centred grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicField {
    pub grid_size: usize,
    pub gamma: f64,
    pub stencil: Stencil,
    /// Row-major over the grid, restricted to nodes inside the disc.
    pub nodes: Vec<GeodesicNode>,
}

impl GeodesicField {
    /// `max |d_graph - d_exact| / t_max`, the sup-norm error relative to the
    /// largest exact distance.
    pub fn relative_sup_error(&self) -> f64 {
        let t_max = 1.0 / (1.0 - self.gamma);
        self.nodes
            .iter()
            .map(|n| (n.d_graph - n.d_exact).abs())
            .fold(0.0, f64::max)
            / t_max
    }

    /// Largest pointwise relative error over nodes at least `min_sigma` from the boundary.
    pub fn max_pointwise_rel_error(&self, min_sigma: f64) -> f64 {
        self.nodes
            .iter()
            .filter(|n| n.sigma >= min_sigma)
            .map(|n| ((n.d_graph - n.d_exact) / n.d_exact).abs())
            .fold(0.0, f64::max)
    }

    /// `min (d_graph - d_exact)`; negative values mean the graph undercut the exact distance.
    pub fn min_margin(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| n.d_graph - n.d_exact)
            .fold(f64::INFINITY, f64::min)
    }

    /// Graph distance at the node nearest the centre.
    pub fn center_value(&self) -> f64 {
        self.nodes
            .iter()
            .min_by(|a, b| a.x.hypot(a.y).total_cmp(&b.x.hypot(b.y)))
            .map(|n| n.d_graph)
            .unwrap_or(f64::NAN)
    }

    /// Cell width of the grid.
    pub fn spacing(&self) -> f64 {
        2.0 / self.grid_size as f64
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra on the grid graph over `[-1, 1]²` with cell-centred nodes.
///
/// Edge weights are the Euclidean edge length times the trapezoidal average of
/// `σ^{-γ}` at the two endpoints. Nodes within one cell of the circle are
/// seeded with the closed-form distance of their `σ`.
pub fn geodesic_field(grid_size: usize, gamma: f64, stencil: Stencil) -> Result<GeodesicField> {
    if grid_size < 64 {
        return Err(Error::Parameter(format!(
            "geodesic grid needs at least 64 cells per side, got {grid_size}"
        )));
    }
    riem_dist_to_boundary(1.0, gamma)?;
    let g = grid_size;
    let h = 2.0 / g as f64;
    let coord = |i: usize| -1.0 + (i as f64 + 0.5) * h;
    let total = g * g;
    let mut sigma = vec![f64::NAN; total];
    let mut inside = vec![false; total];
    for j in 0..g {
        for i in 0..g {
            let r = coord(i).hypot(coord(j));
            if r < 1.0 {
                let k = j * g + i;
                inside[k] = true;
                sigma[k] = 1.0 - r;
            }
        }
    }
    let metric: Vec<f64> = sigma
        .iter()
        .map(|s| if s.is_nan() { f64::NAN } else { s.powf(-gamma) })
        .collect();
    let mut dist = vec![f64::INFINITY; total];
    let mut heap = BinaryHeap::new();
    for k in 0..total {
        if inside[k] && sigma[k] < h {
            dist[k] = riem_dist_to_boundary(sigma[k], gamma)?;
            heap.push(Entry {
                dist: dist[k],
                node: k,
            });
        }
    }
    let steps: Vec<(i64, i64, f64)> = stencil
        .offsets()
        .iter()
        .map(|&(di, dj)| (di, dj, h * ((di * di + dj * dj) as f64).sqrt()))
        .collect();
    while let Some(Entry { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        let (i, j) = ((node % g) as i64, (node / g) as i64);
        for &(di, dj, len) in &steps {
            let (ni, nj) = (i + di, j + dj);
            if ni < 0 || nj < 0 || ni >= g as i64 || nj >= g as i64 {
                continue;
            }
            let nk = nj as usize * g + ni as usize;
            if !inside[nk] {
                continue;
            }
            let cand = d + len * 0.5 * (metric[node] + metric[nk]);
            if cand < dist[nk] {
                dist[nk] = cand;
                heap.push(Entry {
                    dist: cand,
                    node: nk,
                });
            }
        }
    }
    let mut nodes = Vec::new();
    for j in 0..g {
        for i in 0..g {
            let k = j * g + i;
            if inside[k] {
                nodes.push(GeodesicNode {
                    x: coord(i),
                    y: coord(j),
                    sigma: sigma[k],
                    d_exact: riem_dist_to_boundary(sigma[k], gamma)?,
                    d_graph: dist[k],
                });
            }
        }
    }
    Ok(GeodesicField {
        grid_size,
        gamma,
        stencil,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_stencil_and_grid() {
        assert!(matches!(Stencil::from_count(12), Err(Error::Parameter(_))));
        assert!(geodesic_field(32, 0.0, Stencil::Sixteen).is_err());
    }

    #[test]
    fn coarse_field_is_close_and_never_undercuts() {
        for gamma in [0.0, 0.25] {
            let f = geodesic_field(128, gamma, Stencil::Sixteen).unwrap();
            assert!(f.min_margin() > -1e-12, "gamma {gamma}: {}", f.min_margin());
            assert!(f.relative_sup_error() < 0.03, "{}", f.relative_sup_error());
            let t_max = 1.0 / (1.0 - gamma);
            assert!((f.center_value() - t_max).abs() / t_max < 0.03);
        }
    }

    #[test]
    fn sixteen_neighbours_beat_eight() {
        let e8 = geodesic_field(96, 0.0, Stencil::Eight).unwrap();
        let e16 = geodesic_field(96, 0.0, Stencil::Sixteen).unwrap();
        assert!(e16.relative_sup_error() < e8.relative_sup_error());
    }
}
