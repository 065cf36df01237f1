//! Monomial bases of `H^0(P^n, O(m))`, multidegrees, and evaluation at
//! points over a prime field.
//!
//! Bases are listed in graded reverse-lexicographic order with
//! `x_0 > x_1 > ... > x_n`, which fixes every matrix index downstream. The
//! hyperplane used for restriction is always `D = {x_0 = 0}`.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Self { exps }
    }

    pub fn one(n: usize) -> Self {
        Self {
            exps: vec![0; n + 1],
        }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn num_vars(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn divisible_by_x0(&self) -> bool {
        self.exps[0] > 0
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => {
                    write!(f, "x{i}")?;
                    wrote = true;
                }
                _ => {
                    write!(f, "x{i}^{e}")?;
                    wrote = true;
                }
            }
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// Graded reverse-lexicographic comparison, `Greater` meaning earlier in the basis.
pub fn grevlex_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        other => return other,
    }
    for (x, y) in a.exps.iter().zip(&b.exps).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            // smaller power of the last differing variable wins
            other => return other.reverse(),
        }
    }
    Ordering::Equal
}

/// Torus weight in `Z_{>=0}^{n+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(n: usize) -> Self {
        Self(vec![0; n + 1])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add_monomial(&mut self, m: &Monomial) {
        for (w, e) in self.0.iter_mut().zip(m.exponents()) {
            *w += e;
        }
    }

    /// `self - m` if it stays nonnegative.
    pub fn checked_sub(&self, m: &Monomial) -> Option<MultiDegree> {
        self.0
            .iter()
            .zip(m.exponents())
            .map(|(w, e)| w.checked_sub(*e))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    /// Coordinates sorted in descending order: the canonical orbit representative.
    pub fn sorted_desc(&self) -> MultiDegree {
        let mut v = self.0.clone();
        v.sort_unstable_by(|a, b| b.cmp(a));
        MultiDegree(v)
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl From<&Monomial> for MultiDegree {
    fn from(m: &Monomial) -> Self {
        MultiDegree(m.exps.clone())
    }
}

/// All degree-`m` monomials in `n + 1` variables, in basis order.
pub fn monomial_basis(n: usize, m: i64) -> Result<Vec<Monomial>> {
    if n < 1 {
        return domain(format!("monomial_basis: n must be at least 1, got {n}"));
    }
    if m < 0 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut cur = vec![0u32; n + 1];
    fill(&mut cur, 0, m as u32, &mut out);
    out.sort_by(|a, b| grevlex_cmp(b, a));
    Ok(out)
}

fn fill(cur: &mut Vec<u32>, i: usize, left: u32, out: &mut Vec<Monomial>) {
    if i + 1 == cur.len() {
        cur[i] = left;
        out.push(Monomial::new(cur.clone()));
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e;
        fill(cur, i + 1, left - e, out);
    }
}

/// An indexed monomial basis of one graded piece.
#[derive(Debug)]
pub struct MonomialBasis {
    pub n: usize,
    pub degree: i64,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl MonomialBasis {
    pub fn new(n: usize, degree: i64) -> Result<Self> {
        let monomials = monomial_basis(n, degree)?;
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Ok(Self {
            n,
            degree,
            monomials,
            index,
        })
    }

    /// Process-wide shared table for `(n, degree)`.
    pub fn shared(n: usize, degree: i64) -> Result<Arc<MonomialBasis>> {
        static TABLES: OnceLock<Mutex<HashMap<(usize, i64), Arc<MonomialBasis>>>> = OnceLock::new();
        let tables = TABLES.get_or_init(Default::default);
        if let Some(b) = tables.lock().unwrap().get(&(n, degree)) {
            return Ok(Arc::clone(b));
        }
        let built = Arc::new(MonomialBasis::new(n, degree)?);
        let mut guard = tables.lock().unwrap();
        Ok(Arc::clone(guard.entry((n, degree)).or_insert(built)))
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn get(&self, i: usize) -> &Monomial {
        &self.monomials[i]
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Index of the monomial with exponent vector `w`, if it has this degree.
    pub fn index_of_exps(&self, w: &[u32]) -> Option<usize> {
        self.index.get(&Monomial::new(w.to_vec())).copied()
    }
}

pub fn multiply(a: &Monomial, b: &Monomial) -> Result<Monomial> {
    if a.num_vars() != b.num_vars() {
        return domain(format!(
            "multiply: {} vs {} variables",
            a.num_vars(),
            b.num_vars()
        ));
    }
    Ok(Monomial::new(
        a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect(),
    ))
}

/// Splits `monomial_basis(n, d)` into monomials divisible by `x_0` (the
/// kernel of restriction to `D`) and monomials in `x_1..x_n` (a basis of
/// `H^0(O_D(d))`). Returns index lists into the basis.
pub fn restriction_split(n: usize, d: i64) -> Result<(Vec<usize>, Vec<usize>)> {
    let basis = monomial_basis(n, d)?;
    Ok(basis
        .iter()
        .enumerate()
        .fold((Vec::new(), Vec::new()), |(mut div, mut tr), (i, m)| {
            if m.divisible_by_x0() {
                div.push(i);
            } else {
                tr.push(i);
            }
            (div, tr)
        }))
}

/// A point of `P^n(GF(p))`, normalized so the first nonzero coordinate is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointOverField {
    coords: Vec<u32>,
}

impl PointOverField {
    pub fn new(coords: Vec<u32>, f: PrimeField) -> Result<Self> {
        let Some(first) = coords.iter().position(|&c| c != 0) else {
            return domain("point with all coordinates zero");
        };
        if coords.iter().any(|&c| c >= f.modulus()) {
            return domain(format!("coordinate not reduced modulo {}", f.modulus()));
        }
        let inv = f.inv(coords[first]);
        Ok(Self {
            coords: coords.into_iter().map(|c| f.mul(c, inv)).collect(),
        })
    }

    pub fn coords(&self) -> &[u32] {
        &self.coords
    }

    pub fn on_hyperplane(&self) -> bool {
        self.coords[0] == 0
    }
}

pub fn evaluate(m: &Monomial, x: &PointOverField, f: PrimeField) -> u32 {
    m.exps
        .iter()
        .zip(&x.coords)
        .fold(1, |acc, (&e, &c)| f.mul(acc, f.pow(c, e as u64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{h0, projection_codim, VeroneseParams};
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn mono(v: &[u32]) -> Monomial {
        Monomial::new(v.to_vec())
    }

    #[test]
    fn basis_order_is_grevlex() {
        let b = monomial_basis(1, 2).unwrap();
        assert_eq!(b, vec![mono(&[2, 0]), mono(&[1, 1]), mono(&[0, 2])]);
        let b = monomial_basis(2, 2).unwrap();
        let shown: Vec<String> = b.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, ["x0^2", "x0x1", "x1^2", "x0x2", "x1x2", "x2^2"]);
        assert_eq!(monomial_basis(2, 3).unwrap().len(), 10);
        assert!(monomial_basis(2, -1).unwrap().is_empty());
        assert!(monomial_basis(0, 2).is_err());
    }

    #[test]
    fn basis_sizes_match_h0() {
        for n in 1..=6 {
            for m in 0..=12 {
                let expected = h0(n as i64, m).unwrap().to_usize().unwrap();
                assert_eq!(monomial_basis(n, m).unwrap().len(), expected, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn multiply_examples() {
        assert_eq!(multiply(&mono(&[2, 0]), &mono(&[1, 1])).unwrap(), mono(&[3, 1]));
        assert_eq!(multiply(&mono(&[1, 2, 0]), &Monomial::one(2)).unwrap(), mono(&[1, 2, 0]));
        assert_eq!(multiply(&mono(&[1, 1, 0]), &mono(&[0, 2, 1])).unwrap().degree(), 5);
        assert!(multiply(&mono(&[1, 1]), &mono(&[1, 1, 1])).is_err());
    }

    #[test]
    fn restriction_split_examples() {
        let basis = monomial_basis(2, 2).unwrap();
        let (_, tr) = restriction_split(2, 2).unwrap();
        let tr: Vec<String> = tr.iter().map(|&i| basis[i].to_string()).collect();
        assert_eq!(tr, ["x1^2", "x1x2", "x2^2"]);
        assert_eq!(restriction_split(3, 2).unwrap().1.len(), 6);
        for d in 1..6 {
            let (_, tr) = restriction_split(1, d).unwrap();
            assert_eq!(tr.len(), 1);
            assert_eq!(monomial_basis(1, d).unwrap()[tr[0]], mono(&[0, d as u32]));
        }
    }

    #[test]
    fn restriction_split_sizes() {
        for n in 1..=5usize {
            for d in 1..=6i64 {
                let (div, tr) = restriction_split(n, d).unwrap();
                let p = VeroneseParams::new(n as u32, d as u32).unwrap();
                assert_eq!(div.len(), h0(n as i64, d - 1).unwrap().to_usize().unwrap());
                assert_eq!(tr.len(), projection_codim(&p).to_usize().unwrap());
                if n >= 2 {
                    assert_eq!(tr.len(), h0(n as i64 - 1, d).unwrap().to_usize().unwrap());
                }
            }
        }
    }

    #[test]
    fn evaluate_examples() {
        let f = PrimeField::new(101).unwrap();
        let one = PointOverField::new(vec![1, 1], f).unwrap();
        assert_eq!(evaluate(&mono(&[2, 0]), &one, f), 1);
        let on_d = PointOverField::new(vec![0, 7], f).unwrap();
        assert!(on_d.on_hyperplane());
        assert_eq!(evaluate(&mono(&[1, 1]), &on_d, f), 0);
        let pt = PointOverField::new(vec![3, 5, 9], f).unwrap();
        assert_eq!(evaluate(&Monomial::one(2), &pt, f), 1);
    }

    #[test]
    fn points_are_normalized() {
        let f = PrimeField::new(101).unwrap();
        let p = PointOverField::new(vec![0, 5, 10], f).unwrap();
        assert_eq!(p.coords(), &[0, 1, 2]);
        assert!(PointOverField::new(vec![0, 0], f).is_err());
    }

    #[test]
    fn shared_tables_are_reused() {
        let a = MonomialBasis::shared(2, 3).unwrap();
        let b = MonomialBasis::shared(2, 3).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(a.index_of_exps(&[0, 0, 3]), Some(9));
    }

    fn arb_mono(nvars: usize) -> impl Strategy<Value = Monomial> {
        proptest::collection::vec(0u32..5, nvars).prop_map(Monomial::new)
    }

    proptest! {
        #[test]
        fn multiply_laws(a in arb_mono(3), b in arb_mono(3), c in arb_mono(3)) {
            let ab = multiply(&a, &b).unwrap();
            prop_assert_eq!(&ab, &multiply(&b, &a).unwrap());
            prop_assert_eq!(
                multiply(&ab, &c).unwrap(),
                multiply(&a, &multiply(&b, &c).unwrap()).unwrap()
            );
            prop_assert_eq!(ab.degree(), a.degree() + b.degree());
        }

        #[test]
        fn evaluate_is_multiplicative(a in arb_mono(3), b in arb_mono(3), x in proptest::collection::vec(0u32..1000, 3)) {
            let f = PrimeField::new(1009).unwrap();
            prop_assume!(x.iter().any(|&c| c != 0));
            let pt = PointOverField::new(x, f).unwrap();
            let ab = multiply(&a, &b).unwrap();
            prop_assert_eq!(evaluate(&ab, &pt, f), f.mul(evaluate(&a, &pt, f), evaluate(&b, &pt, f)));
        }
    }
}
