//! Graph Hamiltonians `H = -A` for the tree + runway family.
//!
//! Flat indices are laid out as
//!
//! ```text
//! [ runway r = -M..=M | tree nodes, level order from the root | extra nodes ]
//! ```
//!
//! with tree node `(level, pos)` at offset `2^level - 1 + pos` inside the tree
//! block and extra node `i` sitting above leaf `i`. Any block may be absent:
//! the oracle lives on tree + extras, the driver on runway + tree.

use std::fmt;
use std::io::{self, Write};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::StateVector;
use crate::error::{Error, Result};
use crate::nand::TreeInput;

/// Default dimension cap for [`dense_eig`].
pub const DEFAULT_EIG_CAP: usize = 4000;

/// Rows above this count are multiplied in parallel.
const PAR_MATVEC_ROWS: usize = 1 << 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeId {
    Runway(i64),
    Tree { level: u32, pos: usize },
    Extra(usize),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Runway(r) => write!(f, "runway({r})"),
            NodeId::Tree { level, pos } => write!(f, "tree({level},{pos})"),
            NodeId::Extra(i) => write!(f, "extra({i})"),
        }
    }
}

/// Bijection between [`NodeId`]s and flat indices for one graph layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexMap {
    half_len: Option<usize>,
    depth: Option<u32>,
    extras: bool,
}

impl IndexMap {
    pub fn new(half_len: Option<usize>, depth: Option<u32>, extras: bool) -> Self {
        assert!(!extras || depth.is_some(), "extra nodes need a tree");
        IndexMap {
            half_len,
            depth,
            extras,
        }
    }

    /// Runway + tree + extras.
    pub fn full(depth: u32, half_len: usize) -> Self {
        IndexMap::new(Some(half_len), Some(depth), true)
    }

    /// Runway half-length `M`, if the layout has a runway.
    pub fn half_len(&self) -> Option<usize> {
        self.half_len
    }

    pub fn depth(&self) -> Option<u32> {
        self.depth
    }

    pub fn has_extras(&self) -> bool {
        self.extras
    }

    pub fn leaves(&self) -> usize {
        self.depth.map_or(0, |n| 1 << n)
    }

    fn runway_count(&self) -> usize {
        self.half_len.map_or(0, |m| 2 * m + 1)
    }

    fn tree_count(&self) -> usize {
        self.depth.map_or(0, |n| (2 << n) - 1)
    }

    fn extra_count(&self) -> usize {
        if self.extras {
            self.leaves()
        } else {
            0
        }
    }

    pub fn dim(&self) -> usize {
        self.runway_count() + self.tree_count() + self.extra_count()
    }

    pub fn flat(&self, node: NodeId) -> Option<usize> {
        match node {
            NodeId::Runway(r) => {
                let m = self.half_len? as i64;
                (-m..=m).contains(&r).then(|| (r + m) as usize)
            }
            NodeId::Tree { level, pos } => {
                let n = self.depth?;
                (level <= n && pos < 1 << level)
                    .then(|| self.runway_count() + (1 << level) - 1 + pos)
            }
            NodeId::Extra(i) => (self.extras && i < self.leaves())
                .then(|| self.runway_count() + self.tree_count() + i),
        }
    }

    pub fn node(&self, flat: usize) -> Option<NodeId> {
        let mut k = flat;
        if k < self.runway_count() {
            return Some(NodeId::Runway(k as i64 - self.half_len? as i64));
        }
        k -= self.runway_count();
        if k < self.tree_count() {
            let level = (k + 1).ilog2();
            return Some(NodeId::Tree {
                level,
                pos: k + 1 - (1 << level),
            });
        }
        k -= self.tree_count();
        (k < self.extra_count()).then_some(NodeId::Extra(k))
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.dim()).map(|i| self.node(i).expect("flat index within dim"))
    }

    /// Flat index of runway site `r`.
    pub fn runway(&self, r: i64) -> Option<usize> {
        self.flat(NodeId::Runway(r))
    }

    pub fn root(&self) -> Option<usize> {
        self.flat(NodeId::Tree { level: 0, pos: 0 })
    }

    /// Flat index range of runway sites `1..=M`.
    pub fn right_runway(&self) -> std::ops::Range<usize> {
        match self.half_len {
            Some(m) => m + 1..2 * m + 1,
            None => 0..0,
        }
    }
}

/// Compressed sparse rows with sorted column indices.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Sums duplicate entries; drops entries that sum to zero.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (i, j, v) in triplets {
            assert!(i < dim && j < dim, "entry ({i}, {j}) outside dim {dim}");
            match merged.last_mut() {
                Some(last) if (last.0, last.1) == (i, j) => last.2 += v,
                _ => merged.push((i, j, v)),
            }
        }
        merged.retain(|&(_, _, v)| v != 0.0);
        let mut row_ptr = vec![0; dim + 1];
        for &(i, _, _) in &merged {
            row_ptr[i + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let (cols, vals) = merged.into_iter().map(|(_, j, v)| (j, v)).unzip();
        CsrMatrix {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    /// `-1` on both `(u, v)` and `(v, u)` for every undirected edge.
    pub fn minus_adjacency(dim: usize, edges: &[(usize, usize)]) -> Self {
        let triplets = edges
            .iter()
            .flat_map(|&(u, v)| [(u, v, -1.0), (v, u, -1.0)])
            .collect();
        CsrMatrix::from_triplets(dim, triplets)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn is_symmetric(&self) -> bool {
        self.entries().all(|(i, j, v)| self.get(j, i) == v)
    }

    /// Number of stored entries in row `i`; the node degree for a graph.
    pub fn row_nnz(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn add(&self, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.dim, other.dim);
        CsrMatrix::from_triplets(self.dim, self.entries().chain(other.entries()).collect())
    }

    /// `out = A x`. Each row is summed sequentially in column order, so the
    /// result does not depend on the thread count.
    pub fn matvec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        let row = |(i, o): (usize, &mut Complex64)| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += x[self.cols[k]] * self.vals[k];
            }
            *o = acc;
        };
        if self.dim >= PAR_MATVEC_ROWS {
            out.par_iter_mut().enumerate().for_each(row);
        } else {
            out.iter_mut().enumerate().for_each(row);
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }
}

/// `H = -A` over an [`IndexMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianGraph {
    index: IndexMap,
    matrix: CsrMatrix,
}

impl HamiltonianGraph {
    fn from_edges(index: IndexMap, edges: &[(NodeId, NodeId)]) -> Self {
        let flat = |n: NodeId| index.flat(n).expect("edge endpoint inside layout");
        let flat_edges: Vec<_> = edges.iter().map(|&(u, v)| (flat(u), flat(v))).collect();
        HamiltonianGraph {
            index,
            matrix: CsrMatrix::minus_adjacency(index.dim(), &flat_edges),
        }
    }

    pub fn index_map(&self) -> &IndexMap {
        &self.index
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.index.dim()
    }

    pub fn degree(&self, flat: usize) -> usize {
        self.matrix.row_nnz(flat)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.dim()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// Undirected edges `(u, v)` with `u < v`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.matrix
            .entries()
            .filter(|&(i, j, _)| i < j)
            .map(|(i, j, _)| (i, j))
    }

    /// One `u v` line per undirected edge, flat indices.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (u, v) in self.edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    /// Re-indexes into a larger layout containing every node of this one.
    pub fn embed_into(&self, target: IndexMap) -> Result<HamiltonianGraph> {
        let remap = |i: usize| {
            let node = self.index.node(i).expect("index within dim");
            target
                .flat(node)
                .ok_or_else(|| Error::MissingNode(node.to_string()))
        };
        let triplets = self
            .matrix
            .entries()
            .map(|(i, j, v)| Ok((remap(i)?, remap(j)?, v)))
            .collect::<Result<Vec<_>>>()?;
        Ok(HamiltonianGraph {
            index: target,
            matrix: CsrMatrix::from_triplets(target.dim(), triplets),
        })
    }

    /// Entrywise sum of two Hamiltonians on the same layout.
    pub fn plus(&self, other: &HamiltonianGraph) -> Result<HamiltonianGraph> {
        if self.index != other.index {
            return Err(Error::IndexMapMismatch);
        }
        Ok(HamiltonianGraph {
            index: self.index,
            matrix: self.matrix.add(&other.matrix),
        })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        apply_h(self, v)
    }
}

fn tree_edges(depth: u32, edges: &mut Vec<(NodeId, NodeId)>) {
    for level in 0..depth {
        for pos in 0..1usize << level {
            let parent = NodeId::Tree { level, pos };
            for child in [2 * pos, 2 * pos + 1] {
                edges.push((
                    parent,
                    NodeId::Tree {
                        level: level + 1,
                        pos: child,
                    },
                ));
            }
        }
    }
}

fn runway_edges(half_len: usize, edges: &mut Vec<(NodeId, NodeId)>) {
    let m = half_len as i64;
    for r in -m..m {
        edges.push((NodeId::Runway(r), NodeId::Runway(r + 1)));
    }
}

fn oracle_edges(input: &TreeInput, edges: &mut Vec<(NodeId, NodeId)>) {
    let depth = input.depth();
    for (i, _) in input.bits().iter().enumerate().filter(|(_, &b)| b) {
        edges.push((
            NodeId::Tree {
                level: depth,
                pos: i,
            },
            NodeId::Extra(i),
        ));
    }
}

/// `H_O`: a `-1` between leaf `i` and extra node `i` for each set bit, on the
/// tree + extras layout.
pub fn build_oracle(input: &TreeInput) -> HamiltonianGraph {
    let mut edges = Vec::new();
    oracle_edges(input, &mut edges);
    HamiltonianGraph::from_edges(IndexMap::new(None, Some(input.depth()), true), &edges)
}

/// `H_D`: the depth-`n` tree with its root hung off runway site 0 of a path
/// `-M..=M`.
pub fn build_driver(depth: u32, half_len: usize) -> Result<HamiltonianGraph> {
    if half_len < 1 {
        return Err(Error::InvalidConfig(
            "runway half-length must be at least 1".into(),
        ));
    }
    let mut edges = Vec::new();
    runway_edges(half_len, &mut edges);
    edges.push((NodeId::Runway(0), NodeId::Tree { level: 0, pos: 0 }));
    tree_edges(depth, &mut edges);
    Ok(HamiltonianGraph::from_edges(
        IndexMap::new(Some(half_len), Some(depth), false),
        &edges,
    ))
}

/// `H_O + H_D` on the full layout.
pub fn build_full(input: &TreeInput, half_len: usize) -> Result<HamiltonianGraph> {
    if half_len < 1 {
        return Err(Error::InvalidConfig(
            "runway half-length must be at least 1".into(),
        ));
    }
    let mut edges = Vec::new();
    runway_edges(half_len, &mut edges);
    edges.push((NodeId::Runway(0), NodeId::Tree { level: 0, pos: 0 }));
    tree_edges(input.depth(), &mut edges);
    oracle_edges(input, &mut edges);
    Ok(HamiltonianGraph::from_edges(
        IndexMap::full(input.depth(), half_len),
        &edges,
    ))
}

/// A bare path `-M..=M` with nothing attached.
pub fn build_runway(half_len: usize) -> Result<HamiltonianGraph> {
    if half_len < 1 {
        return Err(Error::InvalidConfig(
            "runway half-length must be at least 1".into(),
        ));
    }
    let mut edges = Vec::new();
    runway_edges(half_len, &mut edges);
    Ok(HamiltonianGraph::from_edges(
        IndexMap::new(Some(half_len), None, false),
        &edges,
    ))
}

pub fn apply_h(h: &HamiltonianGraph, v: &StateVector) -> Result<StateVector> {
    if v.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            got: v.dim(),
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); h.dim()];
    h.matrix.matvec_into(v.amplitudes(), &mut out);
    Ok(StateVector::from_amplitudes(out))
}

/// Full spectrum of a Hamiltonian, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct DenseEigen {
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: DMatrix<f64>,
}

impl DenseEigen {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// `⟨v_i | ψ⟩` for every eigenvector.
    pub fn project(&self, psi: &StateVector) -> Vec<Complex64> {
        let amps = psi.amplitudes();
        (0..self.dim())
            .map(|i| {
                self.vectors
                    .column(i)
                    .iter()
                    .zip(amps)
                    .map(|(&v, &a)| a * v)
                    .sum()
            })
            .collect()
    }
}

pub fn dense_eig(h: &HamiltonianGraph) -> Result<DenseEigen> {
    dense_eig_with_cap(h, DEFAULT_EIG_CAP)
}

pub fn dense_eig_with_cap(h: &HamiltonianGraph, cap: usize) -> Result<DenseEigen> {
    if h.dim() > cap {
        return Err(Error::EigenCapExceeded { dim: h.dim(), cap });
    }
    let eig = SymmetricEigen::new(h.matrix.to_dense());
    let mut order: Vec<usize> = (0..h.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.dim(), h.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(DenseEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TreeInput {
        s.parse().unwrap()
    }

    #[test]
    fn oracle_edges_follow_bits() {
        assert_eq!(build_oracle(&t("00")).matrix().nnz(), 0);
        let h = build_oracle(&t("11"));
        assert_eq!(h.matrix().nnz(), 4);
        let idx = h.index_map();
        for i in 0..2 {
            let leaf = idx.flat(NodeId::Tree { level: 1, pos: i }).unwrap();
            let extra = idx.flat(NodeId::Extra(i)).unwrap();
            assert_eq!(h.matrix().get(leaf, extra), -1.0);
            assert_eq!(h.matrix().get(extra, leaf), -1.0);
        }
        assert_eq!(build_oracle(&t("0110")).matrix().nnz(), 4);
    }

    #[test]
    fn small_driver() {
        let h = build_driver(1, 1).unwrap();
        assert_eq!(h.dim(), 6);
        assert_eq!(h.matrix().nnz(), 10);
        let idx = h.index_map();
        let r0 = idx.runway(0).unwrap();
        let root = idx.root().unwrap();
        assert_eq!(h.matrix().get(r0, root), -1.0);
        assert_eq!(h.degree(r0), 3);
        assert_eq!(h.degree(root), 3);
        assert!(h.max_degree() <= 3);
        assert_eq!(build_driver(2, 2).unwrap().dim(), 12);
        assert!(build_driver(2, 0).is_err());
    }

    #[test]
    fn full_dimension() {
        let h = build_full(&t("0110"), 8).unwrap();
        assert_eq!(h.dim(), 17 + 7 + 4);
        assert!(h.matrix().is_symmetric());
        assert!(h.max_degree() <= 3);
        assert!((0..h.dim()).all(|i| h.matrix().get(i, i) == 0.0));
        assert!(h.matrix().entries().all(|(_, _, v)| v == -1.0));
    }

    #[test]
    fn index_map_round_trip() {
        for idx in [
            IndexMap::full(3, 5),
            IndexMap::new(None, Some(2), true),
            IndexMap::new(Some(4), Some(2), false),
            IndexMap::new(Some(3), None, false),
        ] {
            for i in 0..idx.dim() {
                let node = idx.node(i).unwrap();
                assert_eq!(idx.flat(node), Some(i), "{node}");
            }
            assert_eq!(idx.node(idx.dim()), None);
        }
        let idx = IndexMap::full(2, 3);
        assert_eq!(idx.runway(-4), None);
        assert_eq!(idx.flat(NodeId::Tree { level: 3, pos: 0 }), None);
        assert_eq!(idx.flat(NodeId::Tree { level: 1, pos: 2 }), None);
        assert_eq!(idx.flat(NodeId::Extra(4)), None);
    }

    #[test]
    fn apply_on_runway_basis() {
        let h = build_full(&t("0110"), 6).unwrap();
        let idx = *h.index_map();
        let basis = |i| StateVector::basis(h.dim(), i);
        let w = apply_h(&h, &basis(idx.runway(3).unwrap())).unwrap();
        for (i, a) in w.amplitudes().iter().enumerate() {
            let expect = if i == idx.runway(2).unwrap() || i == idx.runway(4).unwrap() {
                -1.0
            } else {
                0.0
            };
            assert_eq!(*a, Complex64::new(expect, 0.0));
        }
        let w = apply_h(&h, &basis(idx.runway(0).unwrap())).unwrap();
        let hits: Vec<usize> = (0..h.dim())
            .filter(|&i| w.amplitudes()[i] != Complex64::new(0.0, 0.0))
            .collect();
        let mut expect = vec![
            idx.runway(-1).unwrap(),
            idx.runway(1).unwrap(),
            idx.root().unwrap(),
        ];
        expect.sort_unstable();
        assert_eq!(hits, expect);
        assert!(hits
            .iter()
            .all(|&i| w.amplitudes()[i] == Complex64::new(-1.0, 0.0)));
        let zero = StateVector::zeros(h.dim());
        assert_eq!(apply_h(&h, &zero).unwrap(), zero);
        let err = apply_h(&h, &StateVector::zeros(3)).unwrap_err();
        assert_eq!(
            err,
            Error::DimensionMismatch {
                expected: h.dim(),
                got: 3
            }
        );
    }

    #[test]
    fn path_graph_spectrum() {
        let h = build_runway(1).unwrap();
        let eig = dense_eig(&h).unwrap();
        let s2 = 2f64.sqrt();
        for (got, want) in eig.values.iter().zip([-s2, 0.0, s2]) {
            assert!((got - want).abs() < 1e-12);
        }
        // longer path against -2cos(kπ/(d+1))
        let h = build_runway(7).unwrap();
        let d = h.dim();
        let mut want: Vec<f64> = (1..=d)
            .map(|k| -2.0 * (k as f64 * std::f64::consts::PI / (d + 1) as f64).cos())
            .collect();
        want.sort_by(f64::total_cmp);
        let eig = dense_eig(&h).unwrap();
        for (g, w) in eig.values.iter().zip(&want) {
            assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_cap() {
        let h = build_full(&t("0110"), 8).unwrap();
        assert_eq!(
            dense_eig_with_cap(&h, 10).unwrap_err(),
            Error::EigenCapExceeded { dim: 28, cap: 10 }
        );
    }

    #[test]
    fn edge_list_format() {
        let h = build_driver(1, 1).unwrap();
        let mut buf = Vec::new();
        h.write_edge_list(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.lines().all(|l| l.split(' ').count() == 2));
        assert!(text.contains("1 3\n"));
    }
}
