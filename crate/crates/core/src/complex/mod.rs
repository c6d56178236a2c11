//! Simplicial complexes with rational vertices.
//!
//! A [`Triangulation`] stores its vertices sorted in canonical point order and
//! its maximal simplexes as ascending index tuples, the list itself sorted
//! lexicographically. Because the vertex array is sorted, index order and
//! point order coincide, so "smallest simplex" or "smallest edge" means the
//! same thing whether read off indices or off coordinates. Lower faces are
//! never stored; they are enumerated from the maximal simplexes on demand.

pub mod linalg;
mod verify;

use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::{farey_mediant, rational_in_unit_interval, HomogeneousPoint, NumericError, Rational};

/// Largest cube dimension accepted by [`Triangulation::kuhn`].
pub const MAX_KUHN_DIM: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("dimension {0} outside supported range 1..={MAX_KUHN_DIM}")]
    DimensionOutOfRange(usize),
    #[error("vertices {0} and {1} do not span an edge of the complex")]
    EdgeNotFound(usize, usize),
    #[error("vertex index {0} out of range")]
    NotAVertex(usize),
    #[error("invalid simplex: {0}")]
    InvalidSimplex(String),
    #[error("expected {expected} vertex values, got {got}")]
    WrongValueCount { expected: usize, got: usize },
    #[error("value at vertex {0} lies outside [0,1]")]
    ValueOutOfRange(usize),
    #[error("simplexes {0:?} and {1:?} intersect outside a common face")]
    Improper(Vec<usize>, Vec<usize>),
    #[error(transparent)]
    Numeric(#[from] NumericError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    dim: usize,
    vertices: Vec<HomogeneousPoint>,
    simplices: Vec<Vec<usize>>,
}

/// Bookkeeping returned by [`Triangulation::blow_up_tracked`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUp {
    /// Index of the new vertex in the refined complex.
    pub mediant: usize,
    /// Indices of the blown edge's endpoints in the original complex.
    pub edge: (usize, usize),
    /// Old vertex index to new vertex index.
    pub remap: Vec<usize>,
}

impl BlowUp {
    /// Carries a function given by vertex values across the blow-up. The new
    /// vertex receives the affine interpolation along the blown edge.
    pub fn carry_values(&self, before: &Triangulation, values: &[Rational]) -> Vec<Rational> {
        let (a, b) = self.edge;
        let da = Rational::from_integer(before.vertex(a).den().clone());
        let db = Rational::from_integer(before.vertex(b).den().clone());
        let at_mediant = (&da * &values[a] + &db * &values[b]) / (da + db);
        let mut out = vec![Rational::zero(); values.len() + 1];
        for (old, v) in values.iter().enumerate() {
            out[self.remap[old]] = v.clone();
        }
        out[self.mediant] = at_mediant;
        out
    }
}

/// A subcomplex re-expressed as a standalone triangulation, with the map back
/// to the parent's vertex indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subcomplex {
    pub triangulation: Triangulation,
    /// `parent_vertex[i]` is the index in the parent of sub-vertex `i`.
    pub parent_vertex: Vec<usize>,
}

impl Subcomplex {
    pub fn restrict<T: Clone>(&self, parent_values: &[T]) -> Vec<T> {
        self.parent_vertex.iter().map(|&i| parent_values[i].clone()).collect()
    }
}

impl Triangulation {
    /// Builds a complex from maximal simplexes given as point lists.
    /// Vertices are collected, sorted and re-indexed; simplexes contained in
    /// other listed simplexes are dropped.
    pub fn from_simplices(dim: usize, simplices: Vec<Vec<HomogeneousPoint>>) -> Result<Self, ComplexError> {
        let set: BTreeSet<&HomogeneousPoint> = simplices.iter().flatten().collect();
        let vertices: Vec<HomogeneousPoint> = set.into_iter().cloned().collect();
        let index = |p: &HomogeneousPoint| vertices.binary_search(p).expect("collected above");
        let idx: Vec<Vec<usize>> = simplices.iter().map(|s| s.iter().map(index).collect()).collect();
        Self::from_indices(dim, vertices, idx)
    }

    /// Builds a complex from a vertex array and index tuples, validating
    /// shape, range and affine independence.
    pub fn from_indices(
        dim: usize,
        vertices: Vec<HomogeneousPoint>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self, ComplexError> {
        if let Some(p) = vertices.iter().find(|p| p.dim() != dim) {
            return Err(ComplexError::InvalidSimplex(format!("vertex {p} is not in dimension {dim}")));
        }
        let mut order: Vec<usize> = (0..vertices.len()).collect();
        order.sort_by(|&a, &b| vertices[a].cmp(&vertices[b]));
        let mut remap = vec![0; vertices.len()];
        for (new, &old) in order.iter().enumerate() {
            remap[old] = new;
        }
        let sorted: Vec<HomogeneousPoint> = order.iter().map(|&i| vertices[i].clone()).collect();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::InvalidSimplex("duplicate vertex".into()));
        }
        let mut out = Vec::with_capacity(simplices.len());
        for s in simplices {
            if s.is_empty() || s.len() > dim + 1 {
                return Err(ComplexError::InvalidSimplex(format!("{s:?} has wrong vertex count")));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= sorted.len()) {
                return Err(ComplexError::NotAVertex(bad));
            }
            let mut s: Vec<usize> = s.iter().map(|&i| remap[i]).collect();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(ComplexError::InvalidSimplex(format!("{s:?} repeats a vertex")));
            }
            out.push(s);
        }
        let t = Triangulation { dim, vertices: sorted, simplices: keep_maximal(out) };
        for s in &t.simplices {
            if t.minor_gcd(s).is_zero() {
                return Err(ComplexError::InvalidSimplex(format!("{s:?} is affinely dependent")));
            }
        }
        Ok(t)
    }

    /// The Kuhn (Freudenthal) triangulation of `[0,1]^d`: one simplex per
    /// permutation of the axes, walking from the origin to `(1,...,1)`.
    pub fn kuhn(d: usize) -> Result<Self, ComplexError> {
        if d == 0 || d > MAX_KUHN_DIM {
            return Err(ComplexError::DimensionOutOfRange(d));
        }
        let mut simplices = Vec::new();
        for perm in permutations(d) {
            let mut bits = vec![false; d];
            let mut chain = vec![HomogeneousPoint::corner(&bits)];
            for &axis in &perm {
                bits[axis] = true;
                chain.push(HomogeneousPoint::corner(&bits));
            }
            simplices.push(chain);
        }
        Self::from_simplices(d, simplices)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[HomogeneousPoint] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &HomogeneousPoint {
        &self.vertices[i]
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Maximal simplexes as ascending vertex-index tuples.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, p: &HomogeneousPoint) -> Option<usize> {
        self.vertices.binary_search(p).ok()
    }

    pub fn max_denominator(&self) -> BigInt {
        self.vertices.iter().map(|v| v.den().clone()).max().unwrap_or_else(BigInt::zero)
    }

    /// Dimension of the largest maximal simplex, or -1 for the empty complex.
    pub fn top_dimension(&self) -> isize {
        self.simplices.iter().map(|s| s.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.simplices.iter().any(|s| s.contains(&a) && s.contains(&b))
    }

    /// Indices of the maximal simplexes having `v` as a vertex.
    pub fn star(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.simplices.iter().enumerate().filter(move |(_, s)| s.contains(&v)).map(|(i, _)| i)
    }

    /// Every face (of every dimension) as an ascending index tuple.
    pub fn faces(&self) -> BTreeSet<Vec<usize>> {
        let mut out = BTreeSet::new();
        for s in &self.simplices {
            for mask in 1u32..(1 << s.len()) {
                out.insert(subset(s, mask));
            }
        }
        out
    }

    /// Face counts `f_0, f_1, ...` up to the top dimension.
    pub fn f_vector(&self) -> Vec<u64> {
        let top = self.top_dimension();
        let mut counts = vec![0u64; (top + 1).max(0) as usize];
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        for s in &self.simplices {
            for mask in 1u32..(1 << s.len()) {
                let face = subset(s, mask);
                let k = face.len() - 1;
                if seen.insert(face) {
                    counts[k] += 1;
                }
            }
        }
        counts
    }

    /// Alternating face count `sum_k (-1)^k f_k`.
    pub fn euler_characteristic(&self) -> i64 {
        self.f_vector()
            .iter()
            .enumerate()
            .map(|(k, &f)| if k % 2 == 0 { f as i64 } else { -(f as i64) })
            .sum()
    }

    fn homogeneous_rows(&self, s: &[usize]) -> Vec<Vec<BigInt>> {
        s.iter().map(|&i| self.vertices[i].homogeneous_row()).collect()
    }

    fn minor_gcd(&self, s: &[usize]) -> BigInt {
        linalg::maximal_minor_gcd(&self.homogeneous_rows(s))
    }

    /// Unimodularity of one simplex: its primitive homogeneous vertex vectors
    /// have maximal minors with gcd 1, i.e. extend to a lattice basis.
    pub fn is_regular_simplex(&self, s: &[usize]) -> bool {
        self.minor_gcd(s).is_one()
    }

    pub fn is_regular(&self) -> bool {
        self.simplices.iter().all(|s| self.is_regular_simplex(s))
    }

    /// Sum of the `d`-volumes of the maximal simplexes (lower-dimensional ones
    /// contribute nothing).
    pub fn volume(&self) -> Rational {
        let mut fact = BigInt::one();
        for k in 2..=self.dim {
            fact *= k;
        }
        self.simplices
            .iter()
            .filter(|s| s.len() == self.dim + 1)
            .map(|s| {
                let dens: BigInt = s.iter().map(|&i| self.vertices[i].den().clone()).product();
                let det = linalg::det(self.homogeneous_rows(s)).abs();
                Rational::new(det, dens * &fact)
            })
            .sum()
    }

    /// Stellar subdivision of the edge `(a, b)` at its Farey mediant.
    pub fn blow_up(&self, a: usize, b: usize) -> Result<Triangulation, ComplexError> {
        self.blow_up_tracked(a, b).map(|(t, _)| t)
    }

    /// Like [`Triangulation::blow_up`], also reporting where the vertices went.
    pub fn blow_up_tracked(&self, a: usize, b: usize) -> Result<(Triangulation, BlowUp), ComplexError> {
        for v in [a, b] {
            if v >= self.vertices.len() {
                return Err(ComplexError::NotAVertex(v));
            }
        }
        if !self.contains_edge(a, b) {
            return Err(ComplexError::EdgeNotFound(a, b));
        }
        let m = farey_mediant(&self.vertices[a], &self.vertices[b])?;
        let pos = match self.vertices.binary_search(&m) {
            Ok(_) => {
                return Err(ComplexError::InvalidSimplex(format!("mediant {m} is already a vertex")));
            }
            Err(pos) => pos,
        };
        let remap: Vec<usize> = (0..self.vertices.len()).map(|i| if i >= pos { i + 1 } else { i }).collect();
        let mut vertices = self.vertices.clone();
        vertices.insert(pos, m);

        let mut simplices = Vec::with_capacity(self.simplices.len() + 4);
        for s in &self.simplices {
            if s.contains(&a) && s.contains(&b) {
                for gone in [a, b] {
                    let mut t: Vec<usize> =
                        s.iter().map(|&i| if i == gone { pos } else { remap[i] }).collect();
                    t.sort_unstable();
                    simplices.push(t);
                }
            } else {
                simplices.push(s.iter().map(|&i| remap[i]).collect());
            }
        }
        simplices.sort();
        let t = Triangulation { dim: self.dim, vertices, simplices };
        Ok((t, BlowUp { mediant: pos, edge: (a, b), remap }))
    }

    /// All faces whose every vertex carries exactly `target`, as a
    /// standalone complex. For a function affine on each simplex with values
    /// bounded by `target` this is precisely the level set at `target`.
    pub fn subcomplex_where(&self, values: &[Rational], target: &Rational) -> Result<Subcomplex, ComplexError> {
        self.check_values(values)?;
        Ok(self.subcomplex_by(|v| values[v] == *target))
    }

    /// The subcomplex spanned, simplex by simplex, by the vertices satisfying
    /// `keep`.
    pub fn subcomplex_by(&self, keep: impl Fn(usize) -> bool) -> Subcomplex {
        let candidates: Vec<Vec<usize>> = self
            .simplices
            .iter()
            .map(|s| s.iter().copied().filter(|&v| keep(v)).collect::<Vec<_>>())
            .filter(|f| !f.is_empty())
            .collect();
        let faces = keep_maximal(candidates);
        let used: BTreeSet<usize> = faces.iter().flatten().copied().collect();
        let parent_vertex: Vec<usize> = used.into_iter().collect();
        let mut to_sub = vec![usize::MAX; self.vertices.len()];
        for (new, &old) in parent_vertex.iter().enumerate() {
            to_sub[old] = new;
        }
        let mut simplices: Vec<Vec<usize>> =
            faces.iter().map(|f| f.iter().map(|&v| to_sub[v]).collect()).collect();
        simplices.sort();
        let vertices = parent_vertex.iter().map(|&i| self.vertices[i].clone()).collect();
        Subcomplex {
            triangulation: Triangulation { dim: self.dim, vertices, simplices },
            parent_vertex,
        }
    }

    pub(crate) fn check_values(&self, values: &[Rational]) -> Result<(), ComplexError> {
        if values.len() != self.vertices.len() {
            return Err(ComplexError::WrongValueCount { expected: self.vertices.len(), got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !rational_in_unit_interval(v)) {
            return Err(ComplexError::ValueOutOfRange(i));
        }
        Ok(())
    }

    /// Finds a maximal simplex containing `p` and the barycentric
    /// coordinates of `p` in it.
    pub fn locate(&self, p: &[Rational]) -> Option<(usize, Vec<Rational>)> {
        self.simplices.iter().enumerate().find_map(|(i, s)| self.barycentric(s, p).map(|b| (i, b)))
    }

    /// Barycentric coordinates of `p` in simplex `s`, if `p` lies in it.
    pub fn barycentric(&self, s: &[usize], p: &[Rational]) -> Option<Vec<Rational>> {
        let pts: Vec<Vec<Rational>> = s.iter().map(|&i| self.vertices[i].to_rationals()).collect();
        let mut a = Vec::with_capacity(self.dim + 1);
        for axis in 0..self.dim {
            a.push(pts.iter().map(|q| q[axis].clone()).collect());
        }
        a.push(vec![Rational::one(); s.len()]);
        let mut rhs = p.to_vec();
        rhs.push(Rational::one());
        let lambda = linalg::solve(&a, &rhs)?;
        lambda.iter().all(|l| !l.is_negative()).then_some(lambda)
    }

    /// Point with the given barycentric coordinates in simplex `s`.
    pub fn point_at(&self, s: &[usize], bary: &[Rational]) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.dim];
        for (&v, l) in s.iter().zip(bary) {
            for (o, x) in out.iter_mut().zip(self.vertices[v].to_rationals()) {
                *o += l * x;
            }
        }
        out
    }

    /// Exact pairwise check that any two maximal simplexes meet in a common
    /// face. Quadratic; meant for tests and diagnostics.
    pub fn verify(&self) -> Result<(), ComplexError> {
        verify::check(self)
    }
}

pub(crate) fn subset(s: &[usize], mask: u32) -> Vec<usize> {
    s.iter().enumerate().filter(|(j, _)| mask & (1 << j) != 0).map(|(_, &v)| v).collect()
}

/// Drops duplicates and tuples contained in other tuples; sorts the result.
fn keep_maximal(mut candidates: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut covered: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for c in candidates {
        if covered.contains(&c) {
            continue;
        }
        for mask in 1u32..(1 << c.len()) {
            covered.insert(subset(&c, mask));
        }
        out.push(c);
    }
    out.sort();
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(rest: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let x = rest.remove(i);
            cur.push(x);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, x);
        }
    }
    let mut out = Vec::new();
    go(&mut (0..n).collect(), &mut Vec::new(), &mut out);
    out
}

#[derive(Serialize, Deserialize)]
struct TriangulationJson {
    dim: usize,
    vertices: Vec<HomogeneousPoint>,
    simplices: Vec<Vec<usize>>,
}

impl Serialize for Triangulation {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TriangulationJson { dim: self.dim, vertices: self.vertices.clone(), simplices: self.simplices.clone() }
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Triangulation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = TriangulationJson::deserialize(deserializer)?;
        Triangulation::from_indices(raw.dim, raw.vertices, raw.simplices).map_err(serde::de::Error::custom)
    }
}
