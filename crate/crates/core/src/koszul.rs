//! Multigraded blocks of the twisted Koszul complex of `P^n`.
//!
//! With `V = H^0(O(d))` the chain spaces are
//! `C_{p,q} = ^p V (x) H^0(O(b + q d))` and the differential
//! `d_{p,q}: C_{p,q} -> C_{p-1,q+1}` sends
//! `v_S (x) u` to `sum_j (-1)^j v_{S - s_j} (x) (v_{s_j} u)`.
//! The torus of `P^n` acts diagonally and the differential preserves the
//! total exponent vector, so every `d_{p,q}` splits into blocks indexed by a
//! multidegree `w`. Inside a block the coefficient monomial is determined by
//! the wedge part (`u = w - sum_{i in S} v_i`), so block elements are just
//! index sets `S`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bounds::VeroneseParams;
use crate::error::{Error, Result};
use crate::polyspace::{Monomial, MonomialBasis, MultiDegree};
use crate::wedge::{choose, rank_indices, WedgeBasisElement};

/// Identifies one block of `d_{p,q}` (source bidegree `(p, q)`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockKey {
    pub params: VeroneseParams,
    pub p: i64,
    pub q: i64,
    pub mdeg: MultiDegree,
}

/// Shared tables for one `(n, d, b)`.
#[derive(Clone, Debug)]
pub struct KoszulContext {
    pub params: VeroneseParams,
    v: Arc<MonomialBasis>,
}

impl KoszulContext {
    pub fn new(params: VeroneseParams) -> Result<Self> {
        let v = MonomialBasis::shared(params.n as usize, params.d as i64)?;
        Ok(Self { params, v })
    }

    /// The ordered basis of `V = H^0(O(d))`.
    pub fn v(&self) -> &MonomialBasis {
        &self.v
    }

    pub fn v_dim(&self) -> usize {
        self.v.len()
    }

    pub fn nvars(&self) -> usize {
        self.params.n as usize + 1
    }

    /// Degree of the coefficient space of `C_{p,q}`.
    pub fn coeff_degree(&self, q: i64) -> i64 {
        self.params.b + q * self.params.d as i64
    }

    /// `dim C_{p,q}`, or `None` if it does not fit in 64 bits.
    pub fn space_dim(&self, p: i64, q: i64) -> Option<u64> {
        let m = self.coeff_degree(q);
        if p < 0 || p as usize > self.v_dim() || m < 0 {
            return Some(0);
        }
        let wedge = choose(self.v_dim() as u64, p as u64);
        let coeff = choose(m as u64 + self.params.n as u64, self.params.n as u64);
        wedge.checked_mul(coeff)
    }

    /// Number of `p`-subsets of the basis of `V` with each exponent sum.
    pub fn subset_sum_counts(&self, p: usize) -> HashMap<Vec<u32>, u64> {
        let nv = self.nvars();
        let mut layers: Vec<HashMap<Vec<u32>, u64>> = vec![HashMap::new(); p + 1];
        layers[0].insert(vec![0; nv], 1);
        for (i, mono) in self.v.monomials().iter().enumerate() {
            for k in (1..=p.min(i + 1)).rev() {
                let (lo, hi) = layers.split_at_mut(k);
                for (s, &c) in &lo[k - 1] {
                    let t: Vec<u32> = s.iter().zip(mono.exponents()).map(|(a, b)| a + b).collect();
                    *hi[0].entry(t).or_insert(0) += c;
                }
            }
        }
        std::mem::take(&mut layers[p])
    }

    /// Every multidegree with a nonzero block in `C_{p,q}`, with its dimension,
    /// in lexicographic order of multidegree.
    pub fn block_multidegrees(&self, p: i64, q: i64) -> Result<Vec<(MultiDegree, u64)>> {
        let m = self.coeff_degree(q);
        if p < 0 || p as usize > self.v_dim() || m < 0 {
            return Ok(Vec::new());
        }
        let coeffs = MonomialBasis::shared(self.params.n as usize, m)?;
        let mut dims: BTreeMap<MultiDegree, u64> = BTreeMap::new();
        for (s, c) in self.subset_sum_counts(p as usize) {
            for u in coeffs.monomials() {
                let w: Vec<u32> = s.iter().zip(u.exponents()).map(|(a, b)| a + b).collect();
                *dims.entry(MultiDegree(w)).or_insert(0) += c;
            }
        }
        Ok(dims.into_iter().collect())
    }

    /// The wedge parts `S` of the basis of block `w` of `C_{p,q}`, in
    /// lexicographic order of `S`.
    pub fn block_elements(&self, p: i64, q: i64, w: &MultiDegree) -> Vec<WedgeBasisElement> {
        let m = self.coeff_degree(q);
        let expected = p * self.params.d as i64 + m;
        if p < 0 || p as usize > self.v_dim() || m < 0 || w.total() as i64 != expected {
            return Vec::new();
        }
        let exps: Vec<&[u32]> = self.v.monomials().iter().map(Monomial::exponents).collect();
        let mut out = Vec::new();
        let mut chosen = Vec::with_capacity(p as usize);
        let mut budget = w.0.clone();
        enumerate_subsets(&exps, p as usize, 0, &mut chosen, &mut budget, &mut out);
        out
    }

    /// Coefficient monomial paired with `S` inside block `w`.
    pub fn coefficient_of(&self, w: &MultiDegree, s: &WedgeBasisElement) -> Option<Monomial> {
        let mut rest = w.0.clone();
        for &i in s.indices() {
            for (r, e) in rest.iter_mut().zip(self.v.get(i as usize).exponents()) {
                *r = r.checked_sub(*e)?;
            }
        }
        Some(Monomial::new(rest))
    }

    /// Multidegree of the basis element `v_S (x) u`.
    pub fn multidegree_of(&self, s: &WedgeBasisElement, u: &Monomial) -> MultiDegree {
        let mut w = MultiDegree::from(u);
        for &i in s.indices() {
            w.add_monomial(self.v.get(i as usize));
        }
        w
    }

    /// Materialized basis of `C_{p,q}` grouped by multidegree. Intended for small spaces.
    pub fn space_basis(&self, p: i64, q: i64) -> Result<KoszulSpaceBasis> {
        let mut groups = Vec::new();
        for (w, dim) in self.block_multidegrees(p, q)? {
            let elems: Vec<(WedgeBasisElement, Monomial)> = self
                .block_elements(p, q, &w)
                .into_iter()
                .map(|s| {
                    let u = self.coefficient_of(&w, &s).expect("element of block");
                    (s, u)
                })
                .collect();
            if elems.len() as u64 != dim {
                return Err(Error::Invariant(format!(
                    "block {w} of C_({p},{q}): counted {dim}, enumerated {}",
                    elems.len()
                )));
            }
            groups.push((w, elems));
        }
        Ok(KoszulSpaceBasis {
            params: self.params,
            p,
            q,
            groups,
        })
    }

    /// The block of `d_{p,q}` at `key.mdeg`.
    pub fn differential_block(&self, key: &BlockKey) -> KoszulBlockMatrix {
        self.differential_block_with(key, standard_sign)
    }

    /// As [`Self::differential_block`] with a caller-supplied deletion sign.
    /// Used by the self-test to show that a corrupted sign rule is detected.
    pub fn differential_block_with(&self, key: &BlockKey, sign: fn(usize) -> i8) -> KoszulBlockMatrix {
        let cols = self.block_elements(key.p, key.q, &key.mdeg);
        let rows = if key.p >= 1 {
            self.block_elements(key.p - 1, key.q + 1, &key.mdeg)
        } else {
            Vec::new()
        };
        let row_index: HashMap<u64, u32> = rows
            .iter()
            .enumerate()
            .map(|(i, t)| (rank_indices(t.indices()), i as u32))
            .collect();
        let mut entries = Vec::with_capacity(cols.len() * key.p.max(0) as usize);
        if !rows.is_empty() {
            let mut buf = Vec::with_capacity(key.p as usize);
            for (c, s) in cols.iter().enumerate() {
                let idx = s.indices();
                for j in 0..idx.len() {
                    buf.clear();
                    buf.extend_from_slice(&idx[..j]);
                    buf.extend_from_slice(&idx[j + 1..]);
                    let r = row_index[&rank_indices(&buf)];
                    entries.push((r, c as u32, sign(j)));
                }
            }
        }
        KoszulBlockMatrix {
            key: key.clone(),
            n_rows: rows.len(),
            n_cols: cols.len(),
            rows,
            cols,
            entries,
        }
    }

    /// `d_{p-1,q+1} o d_{p,q} = 0` on block `key.mdeg`, checked exactly over the integers.
    pub fn square_vanishes(&self, key: &BlockKey, sign: fn(usize) -> i8) -> bool {
        let first = self.differential_block_with(key, sign);
        let next_key = BlockKey {
            params: key.params,
            p: key.p - 1,
            q: key.q + 1,
            mdeg: key.mdeg.clone(),
        };
        if key.p < 2 {
            return true;
        }
        let second = self.differential_block_with(&next_key, sign);
        debug_assert_eq!(first.rows, second.cols);
        let second_cols = second.source_rows();
        for col in first.source_rows() {
            let mut acc: HashMap<u32, i64> = HashMap::new();
            for (mid, s1) in col {
                for &(r, s2) in &second_cols[mid as usize] {
                    *acc.entry(r).or_insert(0) += (s1 * s2) as i64;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }
}

/// `(-1)^j`.
pub fn standard_sign(j: usize) -> i8 {
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn enumerate_subsets(
    exps: &[&[u32]],
    p: usize,
    start: usize,
    chosen: &mut Vec<u32>,
    budget: &mut [u32],
    out: &mut Vec<WedgeBasisElement>,
) {
    if chosen.len() == p {
        out.push(WedgeBasisElement::from_sorted(chosen.clone()));
        return;
    }
    let need = p - chosen.len();
    for i in start..exps.len() {
        if exps.len() - i < need {
            break;
        }
        let e = exps[i];
        if e.iter().zip(budget.iter()).any(|(x, b)| x > b) {
            continue;
        }
        for (b, x) in budget.iter_mut().zip(e) {
            *b -= x;
        }
        chosen.push(i as u32);
        enumerate_subsets(exps, p, i + 1, chosen, budget, out);
        chosen.pop();
        for (b, x) in budget.iter_mut().zip(e) {
            *b += x;
        }
    }
}

/// Basis of `C_{p,q}` as `(S, u)` pairs grouped by multidegree.
#[derive(Clone, Debug)]
pub struct KoszulSpaceBasis {
    pub params: VeroneseParams,
    pub p: i64,
    pub q: i64,
    pub groups: Vec<(MultiDegree, Vec<(WedgeBasisElement, Monomial)>)>,
}

impl KoszulSpaceBasis {
    pub fn dim(&self) -> usize {
        self.groups.iter().map(|(_, g)| g.len()).sum()
    }
}

/// One block of a Koszul differential; every entry is `+1` or `-1`.
///
/// Rows index the target block (wedge parts of degree `p - 1`), columns the
/// source block (degree `p`).
#[derive(Clone, Debug)]
pub struct KoszulBlockMatrix {
    pub key: BlockKey,
    pub n_rows: usize,
    pub n_cols: usize,
    pub rows: Vec<WedgeBasisElement>,
    pub cols: Vec<WedgeBasisElement>,
    /// `(row, col, sign)`.
    pub entries: Vec<(u32, u32, i8)>,
}

impl KoszulBlockMatrix {
    /// Entries grouped by column: for each source element the `(row, sign)` list.
    pub fn source_rows(&self) -> Vec<Vec<(u32, i8)>> {
        let mut out = vec![Vec::new(); self.n_cols];
        for &(r, c, s) in &self.entries {
            out[c as usize].push((r, s));
        }
        for col in out.iter_mut() {
            col.sort_unstable_by_key(|&(r, _)| r);
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }
}

/// Groups multidegrees into coordinate-permutation orbits. Returns the
/// sorted-descending representative of each orbit with the number of input
/// multidegrees it stands for, ordered by representative.
pub fn orbit_reduce(blocks: &[MultiDegree]) -> Vec<(MultiDegree, usize)> {
    let mut counts: BTreeMap<MultiDegree, usize> = BTreeMap::new();
    for w in blocks {
        *counts.entry(w.sorted_desc()).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}

/// Number of distinct coordinate permutations of `w`.
pub fn orbit_size(w: &MultiDegree) -> u64 {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &x in &w.0 {
        *counts.entry(x).or_insert(0) += 1;
    }
    let mut size: u64 = (1..=w.0.len() as u64).product();
    for &c in counts.values() {
        size /= (1..=c).product::<u64>();
    }
    size
}
