//! Classical NAND-tree semantics.
//!
//! Leaves are indexed left to right; leaf `i` carries `bits[i]`. Internal nodes
//! are addressed level by level with the root at level 0, which is the same
//! convention the [`crate::lattice`] index map uses.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Leaf assignment of a perfect binary NAND tree with `N = 2^n` leaves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TreeInputRepr", into = "TreeInputRepr")]
pub struct TreeInput {
    bits: Vec<bool>,
    depth: u32,
}

#[derive(Serialize, Deserialize)]
struct TreeInputRepr {
    n: u32,
    bits: String,
}

impl TryFrom<TreeInputRepr> for TreeInput {
    type Error = Error;

    fn try_from(repr: TreeInputRepr) -> Result<Self> {
        let input: TreeInput = repr.bits.parse()?;
        if input.depth != repr.n {
            return Err(Error::DepthMismatch {
                declared: repr.n,
                leaves: input.len(),
            });
        }
        Ok(input)
    }
}

impl From<TreeInput> for TreeInputRepr {
    fn from(input: TreeInput) -> Self {
        TreeInputRepr {
            n: input.depth,
            bits: input.to_string(),
        }
    }
}

impl TreeInput {
    /// Wraps a leaf vector. The length must be a power of two and at least 2.
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        match bits.len() {
            0 => Err(Error::EmptyInput),
            1 => Err(Error::NonPowerOfTwo(1)),
            len if !len.is_power_of_two() => Err(Error::NonPowerOfTwo(len)),
            len => Ok(TreeInput {
                depth: len.trailing_zeros(),
                bits,
            }),
        }
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn parse(text: &str) -> Result<Self> {
        text.parse()
    }

    /// Number of leaves, `N`.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Tree depth `n = log2 N`.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, leaf: usize) -> bool {
        self.bits[leaf]
    }

    /// Uniformly random instance of the given depth.
    pub fn random<R: Rng + ?Sized>(depth: u32, rng: &mut R) -> Self {
        let bits = (0..1usize << depth).map(|_| rng.random_bool(0.5)).collect();
        TreeInput { bits, depth }
    }

    /// Every instance with `N = 2^depth` leaves, in binary counting order
    /// (leaf 0 is the most significant bit).
    pub fn all(depth: u32) -> impl Iterator<Item = TreeInput> {
        let n = 1usize << depth;
        assert!(
            n < usize::BITS as usize,
            "exhaustive enumeration limited to small trees"
        );
        (0..1u64 << n).map(move |mask| {
            let bits = (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect();
            TreeInput { bits, depth }
        })
    }
}

impl FromStr for TreeInput {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .enumerate()
            .map(|(pos, ch)| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::IllegalCharacter { ch, pos }),
            })
            .collect::<Result<Vec<_>>>()?;
        TreeInput::from_bits(bits)
    }
}

impl fmt::Display for TreeInput {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[inline]
pub fn nand(a: bool, b: bool) -> bool {
    !(a && b)
}

/// Root value of the NAND tree.
pub fn eval_nand(input: &TreeInput) -> bool {
    let mut level = input.bits.clone();
    while level.len() > 1 {
        level = level.chunks_exact(2).map(|p| nand(p[0], p[1])).collect();
    }
    level[0]
}

/// Result of a randomized evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalTrace {
    pub value: bool,
    /// Distinct leaves read.
    pub queries: usize,
}

/// Zero-error randomized evaluation: at each gate a uniformly random child is
/// evaluated first, and the sibling is skipped when that child is 0.
pub fn randomized_eval(input: &TreeInput, seed: u64) -> EvalTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    randomized_eval_with(input, &mut rng)
}

pub fn randomized_eval_with<R: Rng + ?Sized>(input: &TreeInput, rng: &mut R) -> EvalTrace {
    let mut queries = 0;
    let value = eval_subtree(&input.bits, rng, &mut queries);
    EvalTrace { value, queries }
}

fn eval_subtree<R: Rng + ?Sized>(leaves: &[bool], rng: &mut R, queries: &mut usize) -> bool {
    if leaves.len() == 1 {
        *queries += 1;
        return leaves[0];
    }
    let (left, right) = leaves.split_at(leaves.len() / 2);
    let (first, second) = if rng.random_bool(0.5) {
        (left, right)
    } else {
        (right, left)
    };
    if !eval_subtree(first, rng, queries) {
        return true;
    }
    !eval_subtree(second, rng, queries)
}

/// Draws an instance from the reluctant distribution, the standard hard
/// input family for randomized NAND evaluation.
///
/// A gate with value 0 gets two 1-children. A gate with value 1 gets exactly
/// one 0-child, placed left or right uniformly at random. Against this
/// distribution the randomized evaluator reads about `N^0.7537` leaves in
/// expectation.
pub fn hard_instance<R: Rng + ?Sized>(depth: u32, root_value: bool, rng: &mut R) -> TreeInput {
    let mut level = vec![root_value];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 2);
        for &v in &level {
            if v {
                let zero_left = rng.random_bool(0.5);
                next.push(!zero_left);
                next.push(zero_left);
            } else {
                next.push(true);
                next.push(true);
            }
        }
        level = next;
    }
    TreeInput { bits: level, depth }
}

/// One leaf of a parity embedding: the leaf carries `x[var]`, or its
/// complement when `negated`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        assignment[self.var] ^ self.negated
    }
}

/// Leaf layout of the NAND tree computing `(1 + x_0 + … + x_{k-1}) mod 2`.
///
/// `k` must be a power of two, at least 2; the tree has `k²` leaves. Two
/// 4-leaf gadgets are composed recursively over halves `P`, `Q` of the
/// variables:
///
/// * XNOR(P, Q) has subtrees `(XOR P, XOR Q, XNOR P, XNOR Q)`,
/// * XOR(P, Q) has subtrees `(XOR P, XNOR Q, XNOR P, XOR Q)`,
///
/// and a single variable is its own XOR (the plain literal) with its
/// negation as XNOR. For `k = 2` this gives the leaves `(a, b, ¬a, ¬b)` and
/// `(a, ¬b, ¬a, b)`.
pub fn parity_layout(k: usize) -> Result<Vec<Literal>> {
    if k < 2 || !k.is_power_of_two() {
        return Err(Error::InvalidParityLength(k));
    }
    let mut out = Vec::with_capacity(k * k);
    push_gadget(0, k, true, &mut out);
    Ok(out)
}

fn push_gadget(start: usize, len: usize, xnor: bool, out: &mut Vec<Literal>) {
    if len == 1 {
        out.push(Literal {
            var: start,
            negated: xnor,
        });
        return;
    }
    let half = len / 2;
    let (p, q) = (start, start + half);
    push_gadget(p, half, false, out);
    push_gadget(q, half, !xnor, out);
    push_gadget(p, half, true, out);
    push_gadget(q, half, xnor, out);
}

/// Builds the NAND tree instance that evaluates to `(1 + Σ x) mod 2`.
pub fn embed_parity(parity_bits: &[bool]) -> Result<TreeInput> {
    let layout = parity_layout(parity_bits.len())?;
    TreeInput::from_bits(layout.iter().map(|lit| lit.eval(parity_bits)).collect())
}

/// Leaf indices owned by each parity variable. Every leaf belongs to exactly
/// one block, so each variable controls a disjoint set of oracle edges.
pub fn parity_blocks(k: usize) -> Result<Vec<Vec<usize>>> {
    let layout = parity_layout(k)?;
    let mut blocks = vec![Vec::new(); k];
    for (leaf, lit) in layout.iter().enumerate() {
        blocks[lit.var].push(leaf);
    }
    Ok(blocks)
}
