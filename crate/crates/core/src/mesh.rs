//! One-dimensional node sets, optionally graded toward singular endpoints.
//!
//! A mesh is stored as its element lengths. Node offsets from each endpoint
//! are prefix and suffix sums of those lengths, so a node at distance `1e-12`
//! from `hi` keeps full relative precision in `hi - x` even though `x` itself
//! cannot represent it.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How element sizes are distributed over the interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grading {
    Uniform,
    /// Sizes shrink geometrically toward `lo`.
    GeometricLeft { ratio: f64 },
    /// Sizes shrink geometrically toward `hi`.
    GeometricRight { ratio: f64 },
    /// Sizes shrink geometrically toward both ends.
    DoubleGraded { ratio: f64 },
}

impl Grading {
    fn ratio(&self) -> Option<f64> {
        match *self {
            Grading::Uniform => None,
            Grading::GeometricLeft { ratio }
            | Grading::GeometricRight { ratio }
            | Grading::DoubleGraded { ratio } => Some(ratio),
        }
    }
}

/// Which endpoint an offset is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum End {
    Lo,
    Hi,
}

/// One element with endpoint coordinates and their exact offsets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub a: f64,
    pub b: f64,
    /// `(a - lo, b - lo)`
    pub from_lo: (f64, f64),
    /// `(hi - a, hi - b)`
    pub from_hi: (f64, f64),
    pub len: f64,
}

/// Strictly increasing nodes covering `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MeshRecord")]
pub struct Mesh {
    lo: f64,
    hi: f64,
    gaps: Vec<f64>,
    grading: Grading,
    /// Number of uniform bisections applied since construction.
    refinements: u32,
    from_lo: Vec<f64>,
    from_hi: Vec<f64>,
    nodes: Vec<f64>,
}

#[derive(Serialize)]
struct MeshRecord {
    interval: (f64, f64),
    node_count: usize,
    grading: Grading,
    refinements: u32,
    min_element: f64,
    max_element: f64,
}

impl From<Mesh> for MeshRecord {
    fn from(m: Mesh) -> Self {
        Self {
            interval: (m.lo, m.hi),
            node_count: m.len(),
            grading: m.grading,
            refinements: m.refinements,
            min_element: m.min_element(),
            max_element: m.max_element(),
        }
    }
}

impl Mesh {
    /// Builds a mesh from element lengths laid out from `lo`.
    pub fn from_gaps(lo: f64, hi: f64, gaps: Vec<f64>, grading: Grading) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Input(format!("invalid interval [{lo}, {hi}]")));
        }
        if gaps.is_empty() {
            return Err(Error::Input("mesh needs at least one element".into()));
        }
        if let Some(i) = gaps.iter().position(|g| !(g.is_finite() && *g > 0.0)) {
            return Err(Error::Input(format!(
                "mesh nodes must be strictly increasing (element {i} has length {})",
                gaps[i]
            )));
        }
        if let Some(q) = grading.ratio() {
            if !(q > 0.5 && q < 1.0) {
                return Err(Error::Parameter(format!(
                    "geometric grading ratio must lie in (0.5, 1), got {q}"
                )));
            }
        }
        let total: f64 = gaps.iter().sum();
        if ((total - (hi - lo)) / (hi - lo)).abs() > 1e-9 {
            return Err(Error::Input(format!(
                "element lengths sum to {total}, interval length is {}",
                hi - lo
            )));
        }
        let mut mesh = Self {
            lo,
            hi,
            gaps,
            grading,
            refinements: 0,
            from_lo: Vec::new(),
            from_hi: Vec::new(),
            nodes: Vec::new(),
        };
        mesh.rebuild();
        Ok(mesh)
    }

    /// Wraps an explicit node list; the first and last nodes are the interval.
    pub fn from_nodes(nodes: Vec<f64>, grading: Grading) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::Input("a mesh needs at least two nodes".into()));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::Input("mesh nodes must be finite".into()));
        }
        let gaps: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        Self::from_gaps(nodes[0], nodes[nodes.len() - 1], gaps, grading)
    }

    fn rebuild(&mut self) {
        let n = self.gaps.len() + 1;
        self.from_lo = Vec::with_capacity(n);
        let mut acc = 0.0;
        self.from_lo.push(0.0);
        for g in &self.gaps {
            acc += g;
            self.from_lo.push(acc);
        }
        self.from_hi = vec![0.0; n];
        let mut acc = 0.0;
        for i in (0..n - 1).rev() {
            acc += self.gaps[i];
            self.from_hi[i] = acc;
        }
        self.nodes = (0..n)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i == n - 1 {
                    self.hi
                } else if self.from_lo[i] <= self.from_hi[i] {
                    self.lo + self.from_lo[i]
                } else {
                    self.hi - self.from_hi[i]
                }
            })
            .collect();
    }

    pub fn uniform(lo: f64, hi: f64, elements: usize) -> Result<Self> {
        check_interval(lo, hi, elements)?;
        let h = (hi - lo) / elements as f64;
        Self::from_gaps(lo, hi, vec![h; elements], Grading::Uniform)
    }

    /// Element sizes start at `min_size` on each graded end and grow by `1/ratio`
    /// until they reach a common bulk size, chosen so that exactly `elements`
    /// elements fill `[lo, hi]`.
    pub fn graded(
        lo: f64,
        hi: f64,
        elements: usize,
        grading: Grading,
        min_size: f64,
    ) -> Result<Self> {
        check_interval(lo, hi, elements)?;
        let ratio = match grading.ratio() {
            None => return Self::uniform(lo, hi, elements),
            Some(q) => q,
        };
        if !(ratio > 0.5 && ratio < 1.0) {
            return Err(Error::Parameter(format!(
                "geometric grading ratio must lie in (0.5, 1), got {ratio}"
            )));
        }
        let len = hi - lo;
        if !(min_size > 0.0) || min_size * elements as f64 >= len {
            return Err(Error::Parameter(format!(
                "smallest element {min_size:e} incompatible with {elements} elements on length {len}"
            )));
        }
        let growth = 1.0 / ratio;
        let sizes_for = |bulk: f64| -> Vec<f64> {
            (0..elements)
                .map(|i| {
                    let from_left = min_size * growth.powi(i.min(4000) as i32);
                    let from_right = min_size * growth.powi((elements - 1 - i).min(4000) as i32);
                    let graded = match grading {
                        Grading::GeometricLeft { .. } => from_left,
                        Grading::GeometricRight { .. } => from_right,
                        Grading::DoubleGraded { .. } => from_left.min(from_right),
                        Grading::Uniform => bulk,
                    };
                    graded.min(bulk)
                })
                .collect()
        };
        let total = |bulk: f64| sizes_for(bulk).iter().sum::<f64>();
        let (mut a, mut b) = (min_size, len);
        if total(b) < len {
            return Err(Error::Parameter(format!(
                "{elements} elements with ratio {ratio} cannot span length {len} from size {min_size:e}"
            )));
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if total(m) < len {
                a = m;
            } else {
                b = m;
            }
        }
        let mut sizes = sizes_for(b);
        // absorb the bisection residue in the bulk elements only
        let bulk_count = sizes.iter().filter(|&&h| h >= b * (1.0 - 1e-12)).count();
        let residue = len - sizes.iter().sum::<f64>();
        if bulk_count > 0 {
            let share = residue / bulk_count as f64;
            for h in sizes.iter_mut().filter(|h| **h >= b * (1.0 - 1e-12)) {
                *h += share;
            }
        }
        Self::from_gaps(lo, hi, sizes, grading)
    }

    /// Pure geometric node sequence of `count` nodes. Toward `lo` the nodes are
    /// `lo, lo + L q^{count-2}, …, lo + L q, hi` with `L = hi - lo`, so meshes
    /// with the same ratio and increasing `count` are nested.
    pub fn geometric_sequence(
        lo: f64,
        hi: f64,
        count: usize,
        ratio: f64,
        toward: End,
    ) -> Result<Self> {
        if count < 3 {
            return Err(Error::Input("geometric sequence needs at least 3 nodes".into()));
        }
        check_interval(lo, hi, count - 1)?;
        let len = hi - lo;
        // gap k (counted from the far end) is L q^k (1 - q); the last one is L q^{count-2}
        let mut gaps: Vec<f64> = (0..count - 2)
            .map(|k| len * ratio.powi(k as i32) * (1.0 - ratio))
            .collect();
        gaps.push(len * ratio.powi(count as i32 - 2));
        let grading = match toward {
            End::Lo => {
                gaps.reverse();
                Grading::GeometricLeft { ratio }
            }
            End::Hi => Grading::GeometricRight { ratio },
        };
        Self::from_gaps(lo, hi, gaps, grading)
    }

    /// Bisects every element.
    pub fn refined(&self) -> Self {
        let gaps = self
            .gaps
            .iter()
            .flat_map(|&g| [0.5 * g, 0.5 * g])
            .collect();
        let mut mesh = Self {
            lo: self.lo,
            hi: self.hi,
            gaps,
            grading: self.grading,
            refinements: self.refinements + 1,
            from_lo: Vec::new(),
            from_hi: Vec::new(),
            nodes: Vec::new(),
        };
        mesh.rebuild();
        mesh
    }

    /// Makes the point at distance `offset` from `end` a node, unless a node
    /// already lies within `snap_tol` times the containing element length.
    /// Returns the mesh, the node index, and the snap distance.
    pub fn with_node(&self, offset: f64, end: End, snap_tol: f64) -> Result<(Self, usize, f64)> {
        let len = self.hi - self.lo;
        if !(offset >= 0.0 && offset <= len) {
            return Err(Error::Domain(format!(
                "offset {offset} outside mesh interval of length {len}"
            )));
        }
        let offsets = match end {
            End::Lo => &self.from_lo,
            End::Hi => &self.from_hi,
        };
        // element e spans offsets[e]..offsets[e+1] (decreasing for End::Hi)
        let e = match end {
            End::Lo => self.locate_offset_lo(offset),
            End::Hi => self.locate_offset_hi(offset),
        };
        let (da, db) = (offsets[e], offsets[e + 1]);
        let h = self.gaps[e];
        if (offset - da).abs() <= snap_tol * h {
            return Ok((self.clone(), e, (offset - da).abs()));
        }
        if (offset - db).abs() <= snap_tol * h {
            return Ok((self.clone(), e + 1, (offset - db).abs()));
        }
        let (left, right) = match end {
            End::Lo => (offset - da, h - (offset - da)),
            End::Hi => (h - (offset - db), offset - db),
        };
        let mut gaps = self.gaps.clone();
        gaps.splice(e..=e, [left, right]);
        let mut mesh = Self {
            lo: self.lo,
            hi: self.hi,
            gaps,
            grading: self.grading,
            refinements: self.refinements,
            from_lo: Vec::new(),
            from_hi: Vec::new(),
            nodes: Vec::new(),
        };
        mesh.rebuild();
        Ok((mesh, e + 1, 0.0))
    }

    fn locate_offset_lo(&self, offset: f64) -> usize {
        let n = self.from_lo.len();
        match self.from_lo.binary_search_by(|v| v.total_cmp(&offset)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    fn locate_offset_hi(&self, offset: f64) -> usize {
        // from_hi is decreasing
        let n = self.from_hi.len();
        let idx = self.from_hi.partition_point(|&v| v > offset);
        idx.saturating_sub(1).min(n - 2)
    }

    /// Index of the element containing `x` (clamped to the interval).
    pub fn locate(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    /// Index of the node closest to the point at `offset` from `end`.
    pub fn nearest_node(&self, offset: f64, end: End) -> usize {
        let (e, offsets) = match end {
            End::Lo => (self.locate_offset_lo(offset), &self.from_lo),
            End::Hi => (self.locate_offset_hi(offset), &self.from_hi),
        };
        if (offset - offsets[e]).abs() <= (offset - offsets[e + 1]).abs() {
            e
        } else {
            e + 1
        }
    }

    pub fn element(&self, e: usize) -> Element {
        Element {
            a: self.nodes[e],
            b: self.nodes[e + 1],
            from_lo: (self.from_lo[e], self.from_lo[e + 1]),
            from_hi: (self.from_hi[e], self.from_hi[e + 1]),
            len: self.gaps[e],
        }
    }

    pub fn iter_elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.elements()).map(|e| self.element(e))
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Offsets `x_i - lo`.
    pub fn offsets_from_lo(&self) -> &[f64] {
        &self.from_lo
    }

    /// Offsets `hi - x_i`.
    pub fn offsets_from_hi(&self) -> &[f64] {
        &self.from_hi
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn elements(&self) -> usize {
        self.gaps.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn grading(&self) -> Grading {
        self.grading
    }

    pub fn refinements(&self) -> u32 {
        self.refinements
    }

    pub fn min_element(&self) -> f64 {
        self.gaps.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_element(&self) -> f64 {
        self.gaps.iter().copied().fold(0.0, f64::max)
    }

    /// Short description used in provenance headers.
    pub fn describe(&self) -> String {
        let g = match self.grading {
            Grading::Uniform => "uniform".to_string(),
            Grading::GeometricLeft { ratio } => format!("geometric-left({ratio})"),
            Grading::GeometricRight { ratio } => format!("geometric-right({ratio})"),
            Grading::DoubleGraded { ratio } => format!("double-graded({ratio})"),
        };
        format!(
            "{} nodes on [{}, {}] {g} min-element {:.3e} refinements {}",
            self.len(),
            self.lo,
            self.hi,
            self.min_element(),
            self.refinements
        )
    }
}

fn check_interval(lo: f64, hi: f64, elements: usize) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Input(format!("invalid interval [{lo}, {hi}]")));
    }
    if elements == 0 {
        return Err(Error::Input("mesh needs at least one element".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_mesh_hits_endpoints_and_min_size() {
        let m = Mesh::graded(0.0, 1.0, 400, Grading::DoubleGraded { ratio: 0.9 }, 1e-8).unwrap();
        assert_eq!(m.elements(), 400);
        assert_eq!(m.interval(), (0.0, 1.0));
        assert!((m.gaps()[0] / 1e-8 - 1.0).abs() < 1e-12);
        assert!((m.gaps()[399] / 1e-8 - 1.0).abs() < 1e-12);
        for w in m.gaps().windows(2) {
            let r = w[1] / w[0];
            assert!(r < 1.0 / 0.9 + 1e-9 && r > 0.9 - 1e-9, "{r}");
        }
        // offsets from hi keep relative precision at the graded end
        assert_eq!(m.offsets_from_hi()[399], 1e-8);
    }

    #[test]
    fn geometric_sequences_are_nested() {
        let a = Mesh::geometric_sequence(0.0, 1.0, 16, 0.85, End::Lo).unwrap();
        let b = Mesh::geometric_sequence(0.0, 1.0, 32, 0.85, End::Lo).unwrap();
        for x in a.nodes() {
            assert!(b
                .nodes()
                .iter()
                .any(|y| (x - y).abs() <= 1e-14 * x.abs().max(1e-300)));
        }
        assert!((a.nodes()[14] - 0.85).abs() < 1e-15);
        assert!((a.nodes()[1] - 0.85f64.powi(14)).abs() < 1e-15);
    }

    #[test]
    fn refinement_halves_elements() {
        let m = Mesh::graded(0.0, 2.0, 50, Grading::GeometricRight { ratio: 0.8 }, 1e-5).unwrap();
        let r = m.refined();
        assert_eq!(r.elements(), 100);
        assert!((r.max_element() - 0.5 * m.max_element()).abs() < 1e-15);
        assert_eq!(r.refinements(), 1);
        for (i, x) in m.nodes().iter().enumerate() {
            assert!((r.nodes()[2 * i] - x).abs() < 1e-15);
        }
    }

    #[test]
    fn insertion_and_snapping() {
        let m = Mesh::uniform(0.0, 1.0, 10).unwrap();
        let (m2, i, snap) = m.with_node(0.35, End::Lo, 1e-9).unwrap();
        assert_eq!(m2.len(), 12);
        assert!((m2.nodes()[i] - 0.35).abs() < 1e-15);
        assert_eq!(snap, 0.0);
        let (m3, j, _) = m.with_node(0.3, End::Lo, 1e-9).unwrap();
        assert_eq!(m3.len(), 11);
        assert!((m3.nodes()[j] - 0.3).abs() < 1e-15);
        let (m4, k, _) = m.with_node(1e-12, End::Hi, 0.0).unwrap();
        assert_eq!(m4.offsets_from_hi()[k], 1e-12);
        assert_eq!(k, 10);
        let (_, k_snap, snap) = m.with_node(1e-12, End::Hi, 1e-9).unwrap();
        assert_eq!((k_snap, snap), (10, 1e-12));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(Mesh::from_nodes(vec![0.0, 0.5, 0.5, 1.0], Grading::Uniform).is_err());
        assert!(Mesh::graded(0.0, 1.0, 10, Grading::DoubleGraded { ratio: 0.4 }, 1e-3).is_err());
        assert!(Mesh::uniform(1.0, 0.0, 4).is_err());
    }
}
