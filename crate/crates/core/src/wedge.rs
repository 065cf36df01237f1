//! Exterior powers of a space with a fixed ordered basis: colex indexing of
//! basis wedges, deletion signs, contraction with linear functionals, and the
//! s-fold contraction built from a determinant.
//!
//! Sign convention: deleting the factor at 0-based position `j` of a sorted
//! wedge contributes `(-1)^j`. The same rule drives the Koszul differential,
//! so every contraction here anticommutes with it exactly.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::PrimeField;

/// `C(n, k)` in machine arithmetic; panics on overflow of `u64`.
pub fn choose(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).expect("binomial exceeds u64")
}

/// A basis element `v_{i_1} ^ ... ^ v_{i_p}` with `i_1 < ... < i_p`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct WedgeBasisElement(Vec<u32>);

impl WedgeBasisElement {
    pub fn new(indices: Vec<u32>, basis_size: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!("wedge indices not strictly increasing: {indices:?}"));
        }
        if let Some(&last) = indices.last() {
            if last as usize >= basis_size {
                return domain(format!("wedge index {last} out of range {basis_size}"));
            }
        }
        Ok(Self(indices))
    }

    /// Caller guarantees strict monotonicity.
    pub(crate) fn from_sorted(indices: Vec<u32>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn indices(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn without(&self, j: usize) -> Self {
        let mut v = self.0.clone();
        v.remove(j);
        Self(v)
    }
}

/// Colexicographic rank: `sum_i C(c_i, i + 1)`.
pub fn wedge_rank(e: &WedgeBasisElement) -> u64 {
    rank_indices(e.indices())
}

pub(crate) fn rank_indices(idx: &[u32]) -> u64 {
    idx.iter()
        .enumerate()
        .map(|(i, &c)| choose(c as u64, i as u64 + 1))
        .sum()
}

/// Inverse of [`wedge_rank`] for `p`-subsets of `0..basis_size`.
pub fn wedge_unrank(basis_size: usize, p: usize, r: u64) -> Result<WedgeBasisElement> {
    let total = choose(basis_size as u64, p as u64);
    if r >= total {
        return domain(format!("rank {r} out of range C({basis_size},{p}) = {total}"));
    }
    let mut out = vec![0u32; p];
    let mut rest = r;
    let mut hi = basis_size as u64;
    for i in (1..=p as u64).rev() {
        // largest c < hi with C(c, i) <= rest
        let mut c = hi - 1;
        while choose(c, i) > rest {
            c -= 1;
        }
        rest -= choose(c, i);
        out[i as usize - 1] = c as u32;
        hi = c;
    }
    Ok(WedgeBasisElement(out))
}

/// `(-1)^j` for deleting the factor at 0-based position `j`.
pub fn deletion_sign(e: &WedgeBasisElement, j: usize) -> i8 {
    assert!(j < e.degree(), "position {j} out of range for degree {}", e.degree());
    if j.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A linear functional on the base space, given by its values on the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Functional {
    pub field: PrimeField,
    pub coeffs: Vec<u32>,
}

impl Functional {
    pub fn new(field: PrimeField, coeffs: Vec<u32>) -> Self {
        Self { field, coeffs }
    }

    /// The dual basis functional `v_i^*`.
    pub fn dual(field: PrimeField, basis_size: usize, i: usize) -> Self {
        let mut coeffs = vec![0; basis_size];
        coeffs[i] = 1;
        Self { field, coeffs }
    }

    #[inline]
    pub fn at(&self, i: u32) -> u32 {
        self.coeffs[i as usize]
    }

    pub fn scaled(&self, c: u32) -> Self {
        Self {
            field: self.field,
            coeffs: self.coeffs.iter().map(|&x| self.field.mul(x, c)).collect(),
        }
    }
}

/// A sparse element of `^p` of the base space over a prime field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeVector {
    pub field: PrimeField,
    pub p: usize,
    pub basis_size: usize,
    terms: HashMap<WedgeBasisElement, u32>,
}

impl WedgeVector {
    pub fn zero(field: PrimeField, p: usize, basis_size: usize) -> Self {
        Self {
            field,
            p,
            basis_size,
            terms: HashMap::new(),
        }
    }

    pub fn basis(field: PrimeField, basis_size: usize, e: WedgeBasisElement) -> Self {
        let mut v = Self::zero(field, e.degree(), basis_size);
        v.add_term(e, 1);
        v
    }

    pub fn add_term(&mut self, e: WedgeBasisElement, c: u32) {
        assert_eq!(e.degree(), self.p, "mixed wedge degrees");
        if c == 0 {
            return;
        }
        let f = self.field;
        match self.terms.entry(e) {
            Entry::Occupied(mut o) => {
                let v = f.add(*o.get(), c);
                if v == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(c);
            }
        }
    }

    pub fn coeff(&self, e: &WedgeBasisElement) -> u32 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing basis order.
    pub fn terms(&self) -> Vec<(&WedgeBasisElement, u32)> {
        let mut v: Vec<_> = self.terms.iter().map(|(k, &c)| (k, c)).collect();
        v.sort();
        v
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(self.field, self.p, self.basis_size);
        for (e, &x) in &self.terms {
            out.add_term(e.clone(), self.field.mul(x, c));
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, &x) in &other.terms {
            out.add_term(e.clone(), self.field.neg(x));
        }
        out
    }

    /// If `other = c * self` for some scalar `c`, returns `c`.
    pub fn ratio_to(&self, other: &Self) -> Option<u32> {
        let f = self.field;
        if self.is_zero() {
            return other.is_zero().then_some(1);
        }
        let (e, &x) = self.terms.iter().next()?;
        let c = f.mul(other.coeff(e), f.inv(x));
        (self.scale(c) == *other).then_some(c)
    }
}

/// Contraction `i_phi(v_1 ^ ... ^ v_p) = sum_j (-1)^j phi(v_j) v_1 ^ .. v_j-hat .. ^ v_p`.
pub fn contract(phi: &Functional, v: &WedgeVector) -> WedgeVector {
    let f = v.field;
    if v.p == 0 {
        return WedgeVector::zero(f, 0, v.basis_size);
    }
    let mut out = WedgeVector::zero(f, v.p - 1, v.basis_size);
    for (e, &c) in &v.terms {
        for (j, &i) in e.indices().iter().enumerate() {
            let val = phi.at(i);
            if val == 0 {
                continue;
            }
            let mut x = f.mul(c, val);
            if deletion_sign(e, j) < 0 {
                x = f.neg(x);
            }
            out.add_term(e.without(j), x);
        }
    }
    out
}

/// `i_{phi_s} o ... o i_{phi_1}`: contract by `phi_1` first.
pub fn iterated_contraction(functionals: &[Functional], v: &WedgeVector) -> WedgeVector {
    functionals
        .iter()
        .fold(v.clone(), |acc, phi| contract(phi, &acc))
}

/// `gamma(w_1 ^ ... ^ w_s) = det[phi_a(w_b)]`.
pub fn gamma(functionals: &[Functional], factors: &[u32]) -> u32 {
    let f = functionals[0].field;
    let s = functionals.len();
    assert_eq!(factors.len(), s);
    let mut m: Vec<Vec<u32>> = functionals
        .iter()
        .map(|phi| factors.iter().map(|&w| phi.at(w)).collect())
        .collect();
    determinant(&mut m, f)
}

/// Determinant over `GF(p)` by elimination; consumes the matrix contents.
pub fn determinant(m: &mut [Vec<u32>], f: PrimeField) -> u32 {
    let s = m.len();
    let mut det = 1u32;
    for c in 0..s {
        let Some(pr) = (c..s).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if pr != c {
            m.swap(pr, c);
            det = f.neg(det);
        }
        det = f.mul(det, m[c][c]);
        let inv = f.inv(m[c][c]);
        for r in c + 1..s {
            let x = f.mul(m[r][c], inv);
            if x == 0 {
                continue;
            }
            for k in c..s {
                let e = m[c][k];
                m[r][k] = f.sub(m[r][k], f.mul(x, e));
            }
        }
    }
    det
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub(crate) fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// The s-fold contraction
/// `v_1 ^ ... ^ v_p -> sum_{i_1 < ... < i_s} (-1)^{i_1 + ... + i_s} (remaining wedge) * gamma(v_{i_1} ^ ... ^ v_{i_s})`
/// with 0-based positions `i_k` and `gamma` the determinant of functional values.
/// For `s = 1` this is exactly [`contract`].
///
/// Agrees with [`iterated_contraction`] up to a sign depending only on `s`.
pub fn alpha_s(functionals: &[Functional], v: &WedgeVector) -> Result<WedgeVector> {
    let s = functionals.len();
    if v.p < s {
        return domain(format!("alpha_s: need p >= s, got p={} s={s}", v.p));
    }
    let f = v.field;
    let mut out = WedgeVector::zero(f, v.p - s, v.basis_size);
    let position_sets = subsets(v.p, s);
    for (e, &c) in &v.terms {
        let idx = e.indices();
        // factors killed by every functional never contribute
        let live: Vec<bool> = idx
            .iter()
            .map(|&i| functionals.iter().any(|phi| phi.at(i) != 0))
            .collect();
        for pos in &position_sets {
            if pos.iter().any(|&j| !live[j]) {
                continue;
            }
            let deleted: Vec<u32> = pos.iter().map(|&j| idx[j]).collect();
            let g = gamma(functionals, &deleted);
            if g == 0 {
                continue;
            }
            let mut x = f.mul(c, g);
            if pos.iter().sum::<usize>() % 2 == 1 {
                x = f.neg(x);
            }
            let rest: Vec<u32> = idx
                .iter()
                .enumerate()
                .filter(|(j, _)| !pos.contains(j))
                .map(|(_, &i)| i)
                .collect();
            out.add_term(WedgeBasisElement::from_sorted(rest), x);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn el(v: &[u32]) -> WedgeBasisElement {
        WedgeBasisElement::from_sorted(v.to_vec())
    }

    #[test]
    fn rank_examples() {
        for i in 0..10 {
            assert_eq!(wedge_rank(&el(&[i])), i as u64);
        }
        let ranks: Vec<u64> = [[0, 1], [0, 2], [1, 2]].iter().map(|e| wedge_rank(&el(e))).collect();
        assert_eq!(ranks, [0, 1, 2]);
        assert!(wedge_unrank(3, 2, 3).is_err());
    }

    #[test]
    fn rank_unrank_roundtrip() {
        for h in 1..=12usize {
            for p in 0..=6.min(h) {
                let total = choose(h as u64, p as u64);
                for r in 0..total {
                    let e = wedge_unrank(h, p, r).unwrap();
                    assert!(e.indices().iter().all(|&i| (i as usize) < h));
                    assert_eq!(wedge_rank(&e), r);
                }
            }
        }
    }

    #[test]
    fn new_rejects_bad_indices() {
        assert!(WedgeBasisElement::new(vec![1, 1], 4).is_err());
        assert!(WedgeBasisElement::new(vec![2, 1], 4).is_err());
        assert!(WedgeBasisElement::new(vec![1, 4], 4).is_err());
        assert!(WedgeBasisElement::new(vec![0, 3], 4).is_ok());
    }

    #[test]
    fn deletion_signs() {
        let e = el(&[0, 1, 2]);
        assert_eq!(deletion_sign(&e, 0), 1);
        assert_eq!(deletion_sign(&e, 1), -1);
        assert_eq!(deletion_sign(&e, 2), 1);
    }

    #[test]
    fn contract_two_factors() {
        let f = f();
        let phi = Functional::new(f, vec![3, 5, 0]);
        let v = WedgeVector::basis(f, 3, el(&[0, 1]));
        let out = contract(&phi, &v);
        // phi(v0) v1 - phi(v1) v0
        assert_eq!(out.coeff(&el(&[1])), 3);
        assert_eq!(out.coeff(&el(&[0])), f.neg(5));
        let dual = Functional::dual(f, 3, 0);
        let out = contract(&dual, &v);
        assert_eq!(out, WedgeVector::basis(f, 3, el(&[1])));
        let scalar = WedgeVector::basis(f, 3, el(&[]));
        assert!(contract(&phi, &scalar).is_zero());
    }

    fn random_vector(rng: &mut ChaCha8Rng, f: PrimeField, h: usize, p: usize, terms: usize) -> WedgeVector {
        let mut v = WedgeVector::zero(f, p, h);
        let total = choose(h as u64, p as u64);
        for _ in 0..terms {
            let e = wedge_unrank(h, p, rng.gen_range(0..total)).unwrap();
            v.add_term(e, rng.gen_range(1..f.modulus()));
        }
        v
    }

    fn random_functional(rng: &mut ChaCha8Rng, f: PrimeField, h: usize) -> Functional {
        Functional::new(f, (0..h).map(|_| rng.gen_range(0..f.modulus())).collect())
    }

    #[test]
    fn contraction_squares_to_zero() {
        let f = f();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let h = rng.gen_range(2..=10);
            let p = rng.gen_range(1..=5.min(h));
            let v = random_vector(&mut rng, f, h, p, 6);
            let phi = random_functional(&mut rng, f, h);
            assert!(contract(&phi, &contract(&phi, &v)).is_zero());
        }
    }

    #[test]
    fn contractions_anticommute() {
        let f = f();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let v = random_vector(&mut rng, f, 8, 4, 5);
            let a = random_functional(&mut rng, f, 8);
            let b = random_functional(&mut rng, f, 8);
            let ab = contract(&a, &contract(&b, &v));
            let ba = contract(&b, &contract(&a, &v));
            assert_eq!(ab, ba.scale(f.neg(1)));
        }
    }

    #[test]
    fn alpha_one_is_contract() {
        let f = f();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = random_vector(&mut rng, f, 6, 3, 8);
        let phi = random_functional(&mut rng, f, 6);
        let a = alpha_s(std::slice::from_ref(&phi), &v).unwrap();
        assert_eq!(a, contract(&phi, &v));
    }

    #[test]
    fn alpha_two_on_paired_block() {
        let f = f();
        // w1 = v0, w2 = v1 dual to phi_1, phi_2; u = v2 killed by both
        let phis = [Functional::dual(f, 3, 0), Functional::dual(f, 3, 1)];
        let v = WedgeVector::basis(f, 3, el(&[0, 1, 2]));
        let out = alpha_s(&phis, &v).unwrap();
        let u = WedgeVector::basis(f, 3, el(&[2]));
        let c = u.ratio_to(&out).expect("proportional");
        assert!(c == 1 || c == f.neg(1));
        assert!(alpha_s(&phis, &WedgeVector::basis(f, 3, el(&[0]))).is_err());
        // p = s lands in the scalars: gamma of the whole wedge
        let top = alpha_s(&phis, &WedgeVector::basis(f, 3, el(&[0, 1]))).unwrap();
        assert_eq!(top.terms(), vec![(&el(&[]), f.neg(1))]);
    }

    #[test]
    fn alpha_matches_iterated_contraction_up_to_one_sign() {
        // (n, d) = (2, 2): base space of dimension 6; s = 3, p = 5
        let f = f();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let phis: Vec<Functional> = (0..3).map(|_| random_functional(&mut rng, f, 6)).collect();
        let mut signs = Vec::new();
        for _ in 0..100 {
            let v = random_vector(&mut rng, f, 6, 5, 4);
            let a = alpha_s(&phis, &v).unwrap();
            let c = iterated_contraction(&phis, &v);
            if c.is_zero() {
                assert!(a.is_zero());
                continue;
            }
            let r = c.ratio_to(&a).expect("alpha and the composite are proportional");
            signs.push(r);
        }
        assert!(!signs.is_empty());
        assert!(signs.iter().all(|&r| r == signs[0]));
        assert!(signs[0] == 1 || signs[0] == f.neg(1));
    }

    #[test]
    fn gamma_is_alternating() {
        let f = f();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let phis: Vec<Functional> = (0..3).map(|_| random_functional(&mut rng, f, 6)).collect();
        let g = gamma(&phis, &[0, 2, 4]);
        assert_eq!(gamma(&phis, &[2, 0, 4]), f.neg(g));
        assert_eq!(gamma(&phis, &[0, 0, 4]), 0);
    }

    proptest! {
        #[test]
        fn contract_is_bilinear(seed in 0u64..1000, c in 1u32..1000) {
            let f = f();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = random_vector(&mut rng, f, 7, 3, 5);
            let w = random_vector(&mut rng, f, 7, 3, 5);
            let phi = random_functional(&mut rng, f, 7);
            let psi = random_functional(&mut rng, f, 7);
            let lhs = contract(&phi, &v.sub(&w.scale(c)));
            let rhs = contract(&phi, &v).sub(&contract(&phi, &w).scale(c));
            prop_assert_eq!(lhs, rhs);
            let sum = Functional::new(f, phi.coeffs.iter().zip(&psi.coeffs).map(|(&a, &b)| f.add(a, b)).collect());
            let lhs = contract(&sum, &v);
            let rhs = contract(&phi, &v).sub(&contract(&psi, &v).scale(f.neg(1)));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
