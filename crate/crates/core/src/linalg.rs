//! Exact linear algebra: word-size prime fields, sparse rank with a
//! fill-aware pivot rule, dense echelon forms for small solves, and a
//! fraction-free rank over the rationals used as a certification oracle.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{domain, Error, Result};
use crate::koszul::KoszulBlockMatrix;

/// Ten 31-bit primes, the largest below `2^31`. Runs pick primes from this
/// list by seed so that every result names a reproducible field.
pub const PINNED_PRIMES: [u32; 10] = [
    2147483647, 2147483629, 2147483587, 2147483579, 2147483563, 2147483549, 2147483543,
    2147483497, 2147483489, 2147483477,
];

/// Default size cap (rows and columns) for the dense rational path.
pub const DEFAULT_DENSE_LIMIT: usize = 2000;

/// Deterministic Miller-Rabin; the witness set is exact below `3.3 * 10^24`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut a: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, a);
            }
            a = mul(a, a);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `GF(p)` for an odd prime `p < 2^31`. Elements are `u32` in `[0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u32,
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(3..1 << 31).contains(&p) {
            return domain(format!("prime {p} outside (2, 2^31)"));
        }
        if !is_prime(p as u64) {
            return domain(format!("{p} is not prime"));
        }
        Ok(Self { p })
    }

    /// The `i`-th pinned prime (wrapping).
    pub fn pinned(i: usize) -> Self {
        Self {
            p: PINNED_PRIMES[i % PINNED_PRIMES.len()],
        }
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (if s >= self.p as u64 { s - self.p as u64 } else { s }) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + (self.p - b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero in GF({})", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    /// Sign `+1`/`-1` as a field element.
    #[inline]
    pub fn sign(&self, s: i8) -> u32 {
        if s >= 0 {
            1
        } else {
            self.p - 1
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

/// The coefficient field of a computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Prime(PrimeField),
    Rationals,
}

impl FieldSpec {
    pub fn prime(p: u32) -> Result<Self> {
        PrimeField::new(p).map(FieldSpec::Prime)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Prime(fp) => fp.fmt(f),
            FieldSpec::Rationals => write!(f, "QQ"),
        }
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Rank over `GF(p)` of a Koszul block.
///
/// The elimination runs on the transpose: one row per source basis element,
/// each with at most `p` nonzeros.
pub fn sparse_rank(m: &KoszulBlockMatrix, f: PrimeField) -> usize {
    let rows = m
        .source_rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|(c, s)| (c, f.sign(s)))
                .collect::<Vec<_>>()
        })
        .collect();
    SparseEliminator::new(rows, m.n_rows, f).rank()
}

/// Rank over `GF(p)` of a sparse matrix given by rows of `(column, value)`
/// pairs. Columns within a row must be distinct; values must be reduced.
pub fn rank_mod_p(rows: Vec<Vec<(u32, u32)>>, ncols: usize, f: PrimeField) -> usize {
    let rows = rows
        .into_iter()
        .map(|mut r| {
            r.retain(|&(_, v)| v != 0);
            r.sort_unstable_by_key(|&(c, _)| c);
            r
        })
        .collect();
    SparseEliminator::new(rows, ncols, f).rank()
}

/// Gaussian elimination on sparse rows with a Markowitz-style pivot rule:
/// take the shortest active row (lowest index on ties), then within it the
/// column with the fewest active entries (lowest index on ties).
struct SparseEliminator {
    field: PrimeField,
    rows: Vec<Vec<(u32, u32)>>,
    active: BTreeSet<(u32, u32)>,
    col_rows: Vec<Vec<u32>>,
    col_count: Vec<u32>,
}

impl SparseEliminator {
    fn new(rows: Vec<Vec<(u32, u32)>>, ncols: usize, field: PrimeField) -> Self {
        let mut col_rows = vec![Vec::new(); ncols];
        let mut col_count = vec![0u32; ncols];
        let mut active = BTreeSet::new();
        for (i, row) in rows.iter().enumerate() {
            if row.is_empty() {
                continue;
            }
            active.insert((row.len() as u32, i as u32));
            for &(c, _) in row {
                col_rows[c as usize].push(i as u32);
                col_count[c as usize] += 1;
            }
        }
        Self {
            field,
            rows,
            active,
            col_rows,
            col_count,
        }
    }

    fn rank(mut self) -> usize {
        let f = self.field;
        let mut rank = 0;
        let mut scratch = Vec::new();
        while let Some((_, r)) = self.active.pop_first() {
            let r = r as usize;
            let pivot_row = std::mem::take(&mut self.rows[r]);
            let &(pc, pv) = pivot_row
                .iter()
                .min_by_key(|&&(c, _)| (self.col_count[c as usize], c))
                .expect("active rows are nonempty");
            for &(c, _) in &pivot_row {
                self.col_count[c as usize] -= 1;
            }
            rank += 1;
            let inv = f.inv(pv);
            let mut touched = std::mem::take(&mut self.col_rows[pc as usize]);
            touched.sort_unstable();
            touched.dedup();
            for t in touched {
                let t = t as usize;
                if t == r {
                    continue;
                }
                let target = &self.rows[t];
                let Ok(pos) = target.binary_search_by_key(&pc, |&(c, _)| c) else {
                    continue;
                };
                let factor = f.mul(target[pos].1, inv);
                let old_len = target.len() as u32;
                scratch.clear();
                merge_axpy(
                    f,
                    target,
                    &pivot_row,
                    f.neg(factor),
                    &mut scratch,
                    &mut self.col_count,
                    &mut self.col_rows,
                    t as u32,
                );
                std::mem::swap(&mut self.rows[t], &mut scratch);
                self.active.remove(&(old_len, t as u32));
                if !self.rows[t].is_empty() {
                    self.active.insert((self.rows[t].len() as u32, t as u32));
                }
            }
        }
        rank
    }
}

/// `out = target + factor * pivot`, keeping column bookkeeping for `target`'s row id.
#[allow(clippy::too_many_arguments)]
fn merge_axpy(
    f: PrimeField,
    target: &[(u32, u32)],
    pivot: &[(u32, u32)],
    factor: u32,
    out: &mut Vec<(u32, u32)>,
    col_count: &mut [u32],
    col_rows: &mut [Vec<u32>],
    row_id: u32,
) {
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot.len() {
        let ti = target.get(i).map(|e| e.0).unwrap_or(u32::MAX);
        let pj = pivot.get(j).map(|e| e.0).unwrap_or(u32::MAX);
        if ti < pj {
            out.push(target[i]);
            i += 1;
        } else if pj < ti {
            let v = f.mul(factor, pivot[j].1);
            if v != 0 {
                out.push((pj, v));
                col_count[pj as usize] += 1;
                col_rows[pj as usize].push(row_id);
            }
            j += 1;
        } else {
            let v = f.add(target[i].1, f.mul(factor, pivot[j].1));
            if v != 0 {
                out.push((ti, v));
            } else {
                col_count[ti as usize] -= 1;
            }
            i += 1;
            j += 1;
        }
    }
}

/// Exact rank over the rationals of a Koszul block, by dense fraction-free
/// elimination. Blocks larger than `dense_limit` in either dimension are refused.
pub fn rational_rank(m: &KoszulBlockMatrix, dense_limit: usize) -> Result<usize> {
    if m.n_rows > dense_limit || m.n_cols > dense_limit {
        return Err(Error::ResourceLimit(format!(
            "block {}x{} exceeds dense limit {}",
            m.n_rows, m.n_cols, dense_limit
        )));
    }
    let mut dense = vec![vec![0i64; m.n_rows]; m.n_cols];
    for (c, row) in m.source_rows().into_iter().enumerate() {
        for (r, s) in row {
            dense[c][r as usize] += s as i64;
        }
    }
    Ok(small_integer_rank(dense))
}

/// [`integer_rank`] on machine integers, switching to big integers only if
/// an entry would overflow. Every step is invertible over `Q`, so the
/// partially reduced matrix can be handed over as is.
pub fn small_integer_rank(mut rows: Vec<Vec<i64>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        // smallest pivot keeps growth down
        let Some(pivot) = (rank..rows.len())
            .filter(|&i| rows[i][col] != 0)
            .min_by_key(|&i| rows[i][col].unsigned_abs())
        else {
            continue;
        };
        rows.swap(rank, pivot);
        let (done, rest) = rows.split_at_mut(rank + 1);
        let prow = &done[rank];
        let a = prow[col];
        let mut overflowed = false;
        'rows: for row in rest.iter_mut() {
            if row[col] == 0 {
                continue;
            }
            let g = a.gcd(&row[col]);
            let (ma, mb) = (a / g, row[col] / g);
            let mut content = 0i64;
            let mut next = Vec::with_capacity(ncols - col);
            for k in col..ncols {
                let (x, y) = (row[k], prow[k]);
                let v = if x == 0 && y == 0 {
                    0
                } else {
                    match ma.checked_mul(x).zip(mb.checked_mul(y)).and_then(|(u, v)| u.checked_sub(v)) {
                        Some(v) => v,
                        None => {
                            overflowed = true;
                            break 'rows;
                        }
                    }
                };
                content = content.gcd(&v);
                next.push(v);
            }
            if content > 1 {
                for v in next.iter_mut() {
                    *v /= content;
                }
            }
            row[col..].copy_from_slice(&next);
        }
        if overflowed {
            log::debug!("integer elimination overflowed i64, switching to big integers");
            return integer_rank(to_big(rows));
        }
        rank += 1;
    }
    rank
}

fn to_big(rows: Vec<Vec<i64>>) -> Vec<Vec<BigInt>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect()
}

/// Rank over `Q` of an integer matrix. Each elimination step replaces a row
/// `r` by `(a * r - b * pivot) / content`, so entries stay integral and
/// primitive; rows without an entry in the pivot column are left alone.
pub fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows.len() {
            break;
        }
        let Some(pivot) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (done, rest) = rows.split_at_mut(rank + 1);
        let prow = &done[rank];
        let a = &prow[col];
        for row in rest.iter_mut() {
            if row[col].is_zero() {
                continue;
            }
            let g = a.gcd(&row[col]);
            let ma = a / &g;
            let mb = &row[col] / &g;
            let mut content = BigInt::zero();
            for k in col..ncols {
                let v = &ma * &row[k] - &mb * &prow[k];
                if !v.is_zero() {
                    content = content.gcd(&v);
                }
                row[k] = v;
            }
            if !content.is_zero() && content.abs() != BigInt::from(1) {
                for v in row[col..].iter_mut() {
                    *v = &*v / &content;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Incremental echelon basis over `GF(p)` of dense vectors, where each basis
/// row remembers which combination of tagged inputs produced it.
///
/// Insert boundary vectors untagged, then candidate vectors with tags; the
/// tag of a reduced vector is its coordinate in the tagged part of the span.
#[derive(Clone, Debug)]
pub struct TaggedEchelon {
    field: PrimeField,
    dim: usize,
    tag_len: usize,
    rows: Vec<EchelonRow>,
}

#[derive(Clone, Debug)]
struct EchelonRow {
    pivot: usize,
    vec: Vec<u32>,
    tag: Vec<u32>,
}

impl TaggedEchelon {
    pub fn new(field: PrimeField, dim: usize, tag_len: usize) -> Self {
        Self {
            field,
            dim,
            tag_len,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Reduces `v` in place and returns the accumulated tag combination
    /// `c` with `v_in = v_out + sum_k c_k * (tagged input k) + (untagged span)`.
    pub fn reduce(&self, v: &mut [u32]) -> Vec<u32> {
        let f = self.field;
        let mut coords = vec![0u32; self.tag_len];
        for row in &self.rows {
            let x = v[row.pivot];
            if x == 0 {
                continue;
            }
            // rows are normalized to pivot 1
            for (k, &e) in row.vec.iter().enumerate().skip(row.pivot) {
                if e != 0 {
                    v[k] = f.sub(v[k], f.mul(x, e));
                }
            }
            for (k, &t) in row.tag.iter().enumerate() {
                if t != 0 {
                    coords[k] = f.add(coords[k], f.mul(x, t));
                }
            }
        }
        coords
    }

    /// Inserts `v` with an optional tag index. Returns whether `v` was
    /// independent of the current span.
    pub fn insert(&mut self, mut v: Vec<u32>, tag: Option<usize>) -> bool {
        assert_eq!(v.len(), self.dim);
        let f = self.field;
        let coords = self.reduce(&mut v);
        let Some(pivot) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let mut t: Vec<u32> = coords.iter().map(|&c| f.neg(c)).collect();
        if let Some(i) = tag {
            t[i] = f.add(t[i], 1);
        }
        let inv = f.inv(v[pivot]);
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for x in t.iter_mut() {
            *x = f.mul(*x, inv);
        }
        self.rows.push(EchelonRow { pivot, vec: v, tag: t });
        true
    }
}

/// Dense matrix over `GF(p)`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u32>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn rank(&self, f: PrimeField) -> usize {
        let mut ech = TaggedEchelon::new(f, self.cols, 0);
        (0..self.rows)
            .filter(|&r| ech.insert(self.data[r * self.cols..(r + 1) * self.cols].to_vec(), None))
            .count()
    }

    /// Basis of the right kernel `{x : A x = 0}`.
    pub fn nullspace(&self, f: PrimeField) -> Vec<Vec<u32>> {
        // reduced row echelon form
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
                continue;
            };
            if pr != r {
                for k in 0..cols {
                    m.swap(pr * cols + k, r * cols + k);
                }
            }
            let inv = f.inv(m[r * cols + c]);
            for k in 0..cols {
                m[r * cols + k] = f.mul(m[r * cols + k], inv);
            }
            for i in 0..rows {
                if i == r {
                    continue;
                }
                let x = m[i * cols + c];
                if x == 0 {
                    continue;
                }
                for k in c..cols {
                    let e = m[r * cols + k];
                    if e != 0 {
                        m[i * cols + k] = f.sub(m[i * cols + k], f.mul(x, e));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut is_pivot = vec![false; cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        let mut basis = Vec::new();
        for free in (0..cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![0u32; cols];
            v[free] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[i * cols + free]);
            }
            basis.push(v);
        }
        basis
    }

    /// Some `x` with `A x = b`, if one exists.
    pub fn solve(&self, b: &[u32], f: PrimeField) -> Option<Vec<u32>> {
        assert_eq!(b.len(), self.rows);
        let mut ech = TaggedEchelon::new(f, self.rows, self.cols);
        for c in 0..self.cols {
            ech.insert(self.column(c), Some(c));
        }
        let mut residual = b.to_vec();
        let x = ech.reduce(&mut residual);
        residual.iter().all(|&v| v == 0).then_some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f() -> PrimeField {
        PrimeField::pinned(0)
    }

    #[test]
    fn pinned_primes_are_prime_and_31_bit() {
        for &p in &PINNED_PRIMES {
            assert!(PrimeField::new(p).is_ok(), "{p}");
            assert!(p > 1 << 30 && p < 1 << 31);
        }
        assert!(PrimeField::new(2147483645).is_err());
        assert!(PrimeField::new(2).is_err());
        assert!(FieldSpec::prime(7).is_ok());
    }

    #[test]
    fn field_arithmetic() {
        let f = PrimeField::new(7).unwrap();
        assert_eq!(f.add(5, 4), 2);
        assert_eq!(f.sub(2, 5), 4);
        assert_eq!(f.mul(3, 5), 1);
        assert_eq!(f.inv(3), 5);
        assert_eq!(f.from_i64(-1), 6);
        assert_eq!(f.sign(-1), 6);
    }

    #[test]
    fn rank_of_zero_and_identity() {
        assert_eq!(rank_mod_p(vec![vec![]; 4], 4, f()), 0);
        let id = (0..7).map(|i| vec![(i as u32, 1)]).collect();
        assert_eq!(rank_mod_p(id, 7, f()), 7);
    }

    #[test]
    fn rank_detects_dependent_rows() {
        let p = f().modulus();
        let rows = vec![
            vec![(0, 1), (1, 1)],
            vec![(1, 1), (2, 1)],
            vec![(0, 1), (2, p - 1)],
        ];
        assert_eq!(rank_mod_p(rows, 3, f()), 2);
    }

    #[test]
    fn integer_rank_small() {
        let m = |v: Vec<Vec<i64>>| {
            v.into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect::<Vec<_>>()
        };
        assert_eq!(integer_rank(m(vec![vec![1, 2], vec![2, 4]])), 1);
        assert_eq!(integer_rank(m(vec![vec![0, 0], vec![0, 0]])), 0);
        assert_eq!(integer_rank(m(vec![vec![2, 1, 0], vec![1, 2, 1], vec![0, 1, 2]])), 3);
        // singular mod 2 only
        assert_eq!(integer_rank(m(vec![vec![1, 1], vec![1, -1]])), 2);
    }

    #[test]
    fn small_integer_rank_falls_back_on_overflow() {
        let big = 3_000_000_019i64;
        // second elimination step multiplies entries near 2^62
        let rows = vec![vec![big, 1, 0], vec![big - 1, 0, big], vec![1, big, big + 2]];
        let as_big = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(small_integer_rank(rows), integer_rank(as_big));
        assert_eq!(small_integer_rank(vec![vec![1, 2], vec![2, 4]]), 1);
    }

    #[test]
    fn nullspace_and_solve() {
        let f = PrimeField::new(101).unwrap();
        let mut a = DenseMatrix::zeros(2, 3);
        for (r, c, v) in [(0, 0, 1), (0, 1, 1), (1, 1, 1), (1, 2, 1)] {
            a.set(r, c, v);
        }
        let ns = a.nullspace(f);
        assert_eq!(ns.len(), 1);
        let x = &ns[0];
        assert_eq!(f.add(x[0], x[1]), 0);
        assert_eq!(f.add(x[1], x[2]), 0);
        let y = a.solve(&[3, 5], f).unwrap();
        assert_eq!(f.add(y[0], y[1]), 3);
        assert_eq!(f.add(y[1], y[2]), 5);
        let mut b = DenseMatrix::zeros(2, 1);
        b.set(0, 0, 1);
        assert!(b.solve(&[0, 1], f).is_none());
    }

    fn dense_rank_oracle(m: &[Vec<u32>], f: PrimeField) -> usize {
        let mut m = m.to_vec();
        let cols = m.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
            m.swap(rank, p);
            let inv = f.inv(m[rank][c]);
            for i in rank + 1..m.len() {
                let x = f.mul(m[i][c], inv);
                for k in 0..cols {
                    m[i][k] = f.sub(m[i][k], f.mul(x, m[rank][k]));
                }
            }
            rank += 1;
        }
        rank
    }

    proptest! {
        #[test]
        fn sparse_rank_matches_dense(entries in proptest::collection::vec((0u32..12, 0u32..10, 0u32..5), 0..60)) {
            let f = PrimeField::new(5).unwrap();
            let mut dense = vec![vec![0u32; 10]; 12];
            for &(r, c, v) in &entries {
                dense[r as usize][c as usize] = v;
            }
            let rows: Vec<Vec<(u32, u32)>> = dense
                .iter()
                .map(|r| r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, &v)| (c as u32, v)).collect())
                .collect();
            let expected = dense_rank_oracle(&dense, f);
            prop_assert_eq!(rank_mod_p(rows, 10, f), expected);
            let mut dm = DenseMatrix::zeros(12, 10);
            for (r, row) in dense.iter().enumerate() {
                for (c, &v) in row.iter().enumerate() {
                    dm.set(r, c, v);
                }
            }
            prop_assert_eq!(dm.rank(f), expected);
            prop_assert_eq!(dm.nullspace(f).len(), 10 - expected);
        }

        #[test]
        fn integer_rank_matches_large_prime(entries in proptest::collection::vec((0usize..8, 0usize..8, -2i64..3), 0..40)) {
            let f = f();
            let mut dense = vec![vec![0i64; 8]; 8];
            for &(r, c, v) in &entries {
                dense[r][c] = v;
            }
            let big: Vec<Vec<BigInt>> = dense.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            let modp: Vec<Vec<u32>> = dense.iter().map(|r| r.iter().map(|&v| f.from_i64(v)).collect()).collect();
            prop_assert_eq!(integer_rank(big.clone()), dense_rank_oracle(&modp, f));
            prop_assert_eq!(small_integer_rank(dense), integer_rank(big));
        }
    }
}
