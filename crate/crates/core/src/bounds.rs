//! Exact binomial arithmetic and the closed-form vanishing ranges for
//! Veronese syzygies.
//!
//! All arithmetic is done with [`BigInt`]; none of the formulas here are
//! allowed to overflow. Ranges are returned as [`RangePrediction`] values that
//! carry their own applicability flag, so callers can report a prediction as
//! out of scope instead of dropping it.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{domain, Error, Result};

/// `P^n` embedded by `O(d)`, with coefficient twist `B = O(b)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VeroneseParams {
    pub n: u32,
    pub d: u32,
    #[serde(default)]
    pub b: i64,
}

impl VeroneseParams {
    pub fn new(n: u32, d: u32) -> Result<Self> {
        Self::with_twist(n, d, 0)
    }

    pub fn with_twist(n: u32, d: u32, b: i64) -> Result<Self> {
        if n < 1 {
            return domain(format!("n must be at least 1, got {n}"));
        }
        if d < 1 {
            return domain(format!("d must be at least 1, got {d}"));
        }
        Ok(Self { n, d, b })
    }

    /// `h^0(O(d))`, the number of variables of the ambient projective space plus one.
    pub fn num_sections(&self) -> BigInt {
        h0(self.n as i64, self.d as i64).expect("n >= 1 by construction")
    }
}

impl fmt::Display for VeroneseParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} d={} b={}", self.n, self.d, self.b)
    }
}

/// Binomial coefficient `C(a, k)`.
///
/// Zero when `k < 0` or `k > a`. A negative upper index is rejected rather
/// than extended.
pub fn binom(a: i64, k: i64) -> Result<BigInt> {
    if a < 0 {
        return domain(format!("binom: negative upper index {a}"));
    }
    if k < 0 || k > a {
        return Ok(BigInt::zero());
    }
    let k = k.min(a - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= a - i;
        acc /= i + 1;
    }
    Ok(acc)
}

/// `h^0(P^n, O(m))`: the number of degree-`m` monomials in `n + 1` variables.
pub fn h0(n: i64, m: i64) -> Result<BigInt> {
    if n < 1 {
        return domain(format!("h0: n must be at least 1, got {n}"));
    }
    if m < 0 {
        return Ok(BigInt::zero());
    }
    binom(m + n, n)
}

/// Which closed-form statement a range comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Source {
    /// Two-sided nonvanishing range for `1 <= q <= n`, `d >= n + 1`.
    ElConj,
    /// Linear-strand vanishing for `p >= C(d+n-1, n) + n - 1`, `d >= n + 1`.
    LinearConj,
    /// Linear-strand vanishing for `p >= C(d+n-1, n) + C(d+n-2, n-2)`, `n >= 3`.
    MainThm,
    /// `K_{p,n} = 0` for `p <= C(d+n, n) - C(d-1, n) - n - 1`, `d >= n + 1`.
    QnThm,
    /// `K_{p,q}(B; L) = 0` for `p >= h^0(B + qL)`.
    GreenVanishing,
    /// `K_{p,2}(P^2, O(d)) = 0` for `p < 3d - 2`.
    GbVanishing,
    /// `K_{p,n} = 0` for `p >= C(d+n, n) - n`; the dual group has negative index.
    DualityTrivial,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::ElConj => "EL_CONJ",
            Source::LinearConj => "LINEAR_CONJ",
            Source::MainThm => "MAIN_THM",
            Source::QnThm => "QN_THM",
            Source::GreenVanishing => "GREEN_VANISHING",
            Source::GbVanishing => "GB_VANISHING",
            Source::DualityTrivial => "DUALITY_TRIVIAL",
        }
    }
}

/// Whether a range is where the group is predicted nonzero or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RangeKind {
    /// Nonzero exactly inside the interval (and zero outside).
    Nonvanishing,
    /// Zero everywhere inside the interval; nothing claimed outside.
    Vanishing,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Endpoint {
    NegInf,
    Finite(BigInt),
    PosInf,
}

impl Endpoint {
    pub fn finite(v: impl Into<BigInt>) -> Self {
        Endpoint::Finite(v.into())
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Endpoint::Finite(v) => v.to_i64(),
            _ => None,
        }
    }
}

impl Serialize for Endpoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Endpoint::NegInf => s.serialize_str("-inf"),
            Endpoint::PosInf => s.serialize_str("+inf"),
            Endpoint::Finite(v) => match v.to_i64() {
                Some(x) => s.serialize_i64(x),
                None => s.serialize_str(&v.to_string()),
            },
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInf => write!(f, "-inf"),
            Endpoint::PosInf => write!(f, "+inf"),
            Endpoint::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// A predicted interval of `p` for one strand `q`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RangePrediction {
    pub source: Source,
    pub kind: RangeKind,
    pub q: i64,
    pub lo: Endpoint,
    pub hi: Endpoint,
    pub applicable: bool,
    pub reason: String,
}

impl RangePrediction {
    pub fn contains(&self, p: i64) -> bool {
        let p = BigInt::from(p);
        let above = match &self.lo {
            Endpoint::NegInf => true,
            Endpoint::PosInf => false,
            Endpoint::Finite(lo) => &p >= lo,
        };
        let below = match &self.hi {
            Endpoint::NegInf => false,
            Endpoint::PosInf => true,
            Endpoint::Finite(hi) => &p <= hi,
        };
        above && below
    }

    /// The verdict this range implies for `K_{p,q}`: `Some(true)` means
    /// predicted nonzero, `Some(false)` predicted zero, `None` no claim.
    pub fn expects_nonzero(&self, p: i64) -> Option<bool> {
        match (self.kind, self.contains(p)) {
            (RangeKind::Nonvanishing, inside) => Some(inside),
            (RangeKind::Vanishing, true) => Some(false),
            (RangeKind::Vanishing, false) => None,
        }
    }
}

impl fmt::Display for RangePrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            RangeKind::Nonvanishing => "nonzero exactly on",
            RangeKind::Vanishing => "zero on",
        };
        write!(
            f,
            "{:<16} q={} {} [{}, {}]{}",
            self.source.label(),
            self.q,
            kind,
            self.lo,
            self.hi,
            if self.applicable {
                String::new()
            } else {
                format!("  (not applicable: {})", self.reason)
            }
        )
    }
}

fn nn(params: &VeroneseParams) -> (i64, i64) {
    (params.n as i64, params.d as i64)
}

/// Two-sided nonvanishing range for `K_{p,q}(P^n, O(d))`:
/// `C(d+q,q) - C(d-1,q) - q <= p <= C(d+n,n) - C(d+n-q,n-q) + C(n,n-q) - q - 1`.
pub fn el_range(params: &VeroneseParams, q: i64) -> Result<RangePrediction> {
    let (n, d) = nn(params);
    if q < 1 || q > n {
        return domain(format!("el_range: q={q} outside [1, {n}]"));
    }
    let lo = binom(d + q, q)? - binom(d - 1, q)? - q;
    let hi = binom(d + n, n)? - binom(d + n - q, n - q)? + binom(n, n - q)? - q - 1;
    let applicable = d > n;
    Ok(RangePrediction {
        source: Source::ElConj,
        kind: RangeKind::Nonvanishing,
        q,
        lo: Endpoint::Finite(lo),
        hi: Endpoint::Finite(hi),
        applicable,
        reason: if applicable {
            "d >= n+1".into()
        } else {
            format!("requires d >= n+1 (d={d}, n={n})")
        },
    })
}

/// `C(d+n-1, n) + n - 1`; the linear strand is predicted to vanish from here on.
pub fn linear_conj_bound(params: &VeroneseParams) -> Result<BigInt> {
    let (n, d) = nn(params);
    if n < 2 {
        return domain(format!("linear_conj_bound: requires n >= 2, got {n}"));
    }
    Ok(binom(d + n - 1, n)? + n - 1)
}

/// `C(d+n-1, n) + C(d+n-2, n-2)`; `K_{p,1} = 0` for `p` at least this.
///
/// For `n = 3` this is `C(d+2, 3) + d + 1`.
pub fn main_thm_bound(params: &VeroneseParams) -> Result<BigInt> {
    let (n, d) = nn(params);
    if n < 3 {
        return domain(format!("main_thm_bound: requires n >= 3, got {n}"));
    }
    Ok(binom(d + n - 1, n)? + binom(d + n - 2, n - 2)?)
}

/// `C(d+n, n) - C(d-1, n) - n - 1`; `K_{p,n} = 0` for `p` at most this.
pub fn qn_thm_bound(params: &VeroneseParams) -> Result<BigInt> {
    let (n, d) = nn(params);
    if n < 2 {
        return domain(format!("qn_thm_bound: requires n >= 2, got {n}"));
    }
    if d <= n {
        return domain(format!("qn_thm_bound: requires d >= n+1 (d={d}, n={n})"));
    }
    Ok(binom(d + n, n)? - binom(d - 1, n)? - n - 1)
}

/// Number of points cut out on the hyperplane: `h^0(O(d)) - h^0(O(d-1)) = C(d+n-1, n-1)`.
pub fn projection_codim(params: &VeroneseParams) -> BigInt {
    let (n, d) = nn(params);
    let s = binom(d + n - 1, n - 1).expect("nonnegative arguments");
    debug_assert_eq!(
        s,
        h0(n, d).expect("n >= 1") - h0(n, d - 1).expect("n >= 1")
    );
    s
}

/// `h^0(O(b + q d))`: `K_{p,q}(P^n; O(b), O(d)) = 0` for `p` at least this.
pub fn green_vanishing_bound(params: &VeroneseParams, q: i64) -> Result<BigInt> {
    if q < 0 {
        return domain(format!("green_vanishing_bound: q must be >= 0, got {q}"));
    }
    let (n, d) = nn(params);
    h0(n, params.b + q * d)
}

/// Index triple of the dual group:
/// `K_{p,q}(O(b); O(d))` pairs with `K_{r-n-p, n+1-q}(O(-n-1-b); O(d))`, `r = h^0(O(d)) - 1`.
pub fn duality_partner(params: &VeroneseParams, p: i64, q: i64) -> Result<(i64, i64, i64)> {
    let n = params.n as i64;
    let r: BigInt = params.num_sections() - BigInt::one();
    let p_dual = (r - n - p)
        .to_i64()
        .ok_or_else(|| Error::Domain("duality_partner: index exceeds 64 bits".into()))?;
    Ok((p_dual, n + 1 - q, -n - 1 - params.b))
}

/// `3d - 2`; `K_{p,2}(P^2, O(d)) = 0` below it.
pub fn gb_bound(d: i64) -> Result<i64> {
    if d < 1 {
        return domain(format!("gb_bound: d must be >= 1, got {d}"));
    }
    Ok(3 * d - 2)
}

/// Every range that says something about the strand `q` for these parameters.
///
/// Statements whose hypotheses cannot even be written down (for example the
/// linear-strand theorem for `n < 3`) are omitted; statements that are
/// well-defined but outside their stated hypotheses are returned with
/// `applicable = false`.
pub fn predictions(params: &VeroneseParams, q: i64) -> Result<Vec<RangePrediction>> {
    let (n, d) = nn(params);
    let mut out = Vec::new();
    let untwisted = params.b == 0;

    if untwisted && (1..=n).contains(&q) {
        out.push(el_range(params, q)?);
    }
    if untwisted && q == 1 && n >= 2 {
        let applicable = d > n;
        out.push(RangePrediction {
            source: Source::LinearConj,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::Finite(linear_conj_bound(params)?),
            hi: Endpoint::PosInf,
            applicable,
            reason: if applicable {
                "n >= 2, d >= n+1".into()
            } else {
                format!("requires d >= n+1 (d={d}, n={n})")
            },
        });
    }
    if untwisted && q == 1 && n >= 3 {
        out.push(RangePrediction {
            source: Source::MainThm,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::Finite(main_thm_bound(params)?),
            hi: Endpoint::PosInf,
            applicable: true,
            reason: "n >= 3, d >= 1".into(),
        });
    }
    if untwisted && q == n && n >= 2 {
        let applicable = d > n;
        // below d = n+1 the same expression is evaluated with C(d-1, n) = 0
        let hi = binom(d + n, n)? - binom(d - 1, n)? - n - 1;
        out.push(RangePrediction {
            source: Source::QnThm,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::NegInf,
            hi: Endpoint::Finite(hi),
            applicable,
            reason: if applicable {
                "n >= 2, d >= n+1".into()
            } else {
                format!("requires d >= n+1 (d={d}, n={n})")
            },
        });
    }
    if untwisted && q == n {
        out.push(RangePrediction {
            source: Source::DualityTrivial,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::Finite(binom(d + n, n)? - n),
            hi: Endpoint::PosInf,
            applicable: true,
            reason: "dual index r-n-p is negative".into(),
        });
    }
    if untwisted && n == 2 && q == 2 {
        out.push(RangePrediction {
            source: Source::GbVanishing,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::NegInf,
            hi: Endpoint::finite(gb_bound(d)? - 1),
            applicable: true,
            reason: "n = 2".into(),
        });
    }
    if q >= 0 {
        // needs H^1(O(b + (q-1)d)) = 0, automatic for n >= 2
        let prev = params.b + (q - 1) * d;
        let applicable = n >= 2 || prev >= -1;
        out.push(RangePrediction {
            source: Source::GreenVanishing,
            kind: RangeKind::Vanishing,
            q,
            lo: Endpoint::Finite(green_vanishing_bound(params, q)?),
            hi: Endpoint::PosInf,
            applicable,
            reason: if applicable {
                "H^1(B + (q-1)L) = 0".into()
            } else {
                format!("H^1(O({prev})) != 0 on P^1")
            },
        });
    }
    Ok(out)
}

/// Convenience for callers that need a machine-size bound.
pub fn to_i64(v: &BigInt) -> Result<i64> {
    v.to_i64()
        .ok_or_else(|| Error::Domain(format!("value {v} exceeds 64 bits")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(n: u32, d: u32) -> VeroneseParams {
        VeroneseParams::new(n, d).unwrap()
    }

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn binom_examples() {
        assert_eq!(binom(5, 2).unwrap(), big(10));
        assert_eq!(binom(3, 5).unwrap(), big(0));
        assert_eq!(binom(7, 0).unwrap(), big(1));
        assert_eq!(binom(4, -1).unwrap(), big(0));
        assert!(binom(-1, 0).is_err());
    }

    #[test]
    fn binom_beyond_64_bits() {
        let v = binom(200, 100).unwrap();
        assert_eq!(
            v.to_string(),
            "90548514656103281165404177077484163874504589675413336841320"
        );
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(2, 3).unwrap(), big(10));
        assert_eq!(h0(3, 2).unwrap(), big(10));
        assert_eq!(h0(2, -1).unwrap(), big(0));
        assert!(h0(0, 2).is_err());
    }

    #[test]
    fn el_range_examples() {
        let r = el_range(&params(2, 3), 1).unwrap();
        assert_eq!((r.lo.as_i64(), r.hi.as_i64(), r.applicable), (Some(1), Some(6), true));
        let r = el_range(&params(2, 3), 2).unwrap();
        assert_eq!((r.lo.as_i64(), r.hi.as_i64(), r.applicable), (Some(7), Some(7), true));
        // C(4,2) - C(3,1) + C(2,1) - 1 - 1 = 3, matching the 6-8-3 strand
        let r = el_range(&params(2, 2), 1).unwrap();
        assert_eq!((r.lo.as_i64(), r.hi.as_i64(), r.applicable), (Some(1), Some(3), false));
        let r = el_range(&params(2, 4), 2).unwrap();
        assert_eq!((r.lo.as_i64(), r.hi.as_i64()), (Some(10), Some(12)));
        assert!(el_range(&params(2, 3), 0).is_err());
        assert!(el_range(&params(2, 3), 3).is_err());
    }

    #[test]
    fn linear_conj_examples() {
        assert_eq!(linear_conj_bound(&params(2, 3)).unwrap(), big(7));
        assert_eq!(linear_conj_bound(&params(3, 4)).unwrap(), big(22));
        assert_eq!(linear_conj_bound(&params(2, 4)).unwrap(), big(11));
        assert!(linear_conj_bound(&params(1, 4)).is_err());
    }

    #[test]
    fn main_thm_examples() {
        assert_eq!(main_thm_bound(&params(3, 2)).unwrap(), big(7));
        assert_eq!(main_thm_bound(&params(3, 4)).unwrap(), big(25));
        assert_eq!(main_thm_bound(&params(4, 1)).unwrap(), big(4));
        assert!(main_thm_bound(&params(2, 4)).is_err());
    }

    #[test]
    fn main_thm_for_n3_is_tetrahedral_plus_d_plus_one() {
        for d in 1..30i64 {
            let expected = binom(d + 2, 3).unwrap() + d + 1;
            assert_eq!(main_thm_bound(&params(3, d as u32)).unwrap(), expected);
        }
    }

    #[test]
    fn qn_thm_examples() {
        assert_eq!(qn_thm_bound(&params(2, 3)).unwrap(), big(6));
        assert_eq!(qn_thm_bound(&params(2, 4)).unwrap(), big(9));
        assert_eq!(qn_thm_bound(&params(3, 4)).unwrap(), big(30));
        assert!(qn_thm_bound(&params(3, 3)).is_err());
    }

    #[test]
    fn projection_codim_examples() {
        assert_eq!(projection_codim(&params(3, 2)), big(6));
        assert_eq!(projection_codim(&params(2, 3)), big(4));
        assert_eq!(projection_codim(&params(1, 5)), big(1));
    }

    #[test]
    fn green_vanishing_examples() {
        let p = VeroneseParams::with_twist(2, 2, -1).unwrap();
        assert_eq!(green_vanishing_bound(&p, 1).unwrap(), big(3));
        let p = VeroneseParams::with_twist(3, 1, -1).unwrap();
        assert_eq!(green_vanishing_bound(&p, 1).unwrap(), big(1));
        assert_eq!(green_vanishing_bound(&params(2, 3), 1).unwrap(), big(10));
        assert!(green_vanishing_bound(&params(2, 3), -1).is_err());
    }

    #[test]
    fn duality_partner_examples() {
        assert_eq!(duality_partner(&params(2, 3), 7, 2).unwrap(), (0, 1, -3));
        assert_eq!(duality_partner(&params(1, 3), 1, 1).unwrap(), (1, 1, -2));
        for d in 1..6 {
            let (_, q, _) = duality_partner(&params(2, d), 3, 2).unwrap();
            assert_eq!(q, 1);
        }
    }

    #[test]
    fn gb_examples() {
        assert_eq!(gb_bound(3).unwrap(), 7);
        assert_eq!(gb_bound(4).unwrap(), 10);
        assert_eq!(gb_bound(1).unwrap(), 1);
        assert!(gb_bound(0).is_err());
    }

    #[test]
    fn predictions_respect_hypotheses() {
        let preds = predictions(&params(2, 2), 1).unwrap();
        let el = preds.iter().find(|r| r.source == Source::ElConj).unwrap();
        assert!(!el.applicable);
        assert!(preds.iter().all(|r| r.source != Source::MainThm));
        let preds = predictions(&params(3, 2), 1).unwrap();
        assert!(preds.iter().any(|r| r.source == Source::MainThm && r.applicable));
    }

    #[test]
    fn endpoint_serializes_as_number_or_string() {
        let r = el_range(&params(2, 3), 1).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["lo"], 1);
        assert_eq!(v["source"], "EL_CONJ");
        let huge = Endpoint::Finite(binom(200, 100).unwrap());
        assert!(serde_json::to_value(&huge).unwrap().is_string());
        assert_eq!(serde_json::to_value(&Endpoint::PosInf).unwrap(), "+inf");
    }

    proptest! {
        #[test]
        fn pascal_consistency(n in 1u32..12, d in 1u32..40) {
            let (ni, di) = (n as i64, d as i64);
            prop_assert_eq!(
                binom(di + ni, ni).unwrap() - binom(di + ni - 1, ni - 1).unwrap(),
                binom(di + ni - 1, ni).unwrap()
            );
            if n >= 2 && d > n {
                let el = el_range(&params(n, d), 1).unwrap();
                let hi = match el.hi { Endpoint::Finite(v) => v, _ => unreachable!() };
                prop_assert_eq!(hi + 1, linear_conj_bound(&params(n, d)).unwrap());
            }
        }

        #[test]
        fn qn_consistency(n in 2u32..10, extra in 1u32..30) {
            let p = params(n, n + extra);
            let el = el_range(&p, n as i64).unwrap();
            let lo = match el.lo { Endpoint::Finite(v) => v, _ => unreachable!() };
            prop_assert_eq!(qn_thm_bound(&p).unwrap(), lo - 1);
        }

        #[test]
        fn theorem_dominates_conjecture(n in 3u32..10, d in 1u32..40) {
            let p = params(n, d);
            let thm = main_thm_bound(&p).unwrap();
            let conj = linear_conj_bound(&p).unwrap();
            prop_assert!(thm >= conj);
            prop_assert_eq!(thm == conj, d == 1);
        }

        #[test]
        fn pascal_chain_of_linear_proof(n in 3u32..10, d in 1u32..40) {
            let p = params(n, d);
            let (ni, di) = (n as i64, d as i64);
            prop_assert_eq!(
                binom(di - 2 + ni, ni).unwrap() + projection_codim(&p),
                main_thm_bound(&p).unwrap()
            );
        }

        #[test]
        fn duality_is_an_involution(n in 1u32..6, d in 1u32..8, b in -10i64..10, p in -5i64..60, q in -3i64..8) {
            let params = VeroneseParams::with_twist(n, d, b).unwrap();
            let (p1, q1, b1) = duality_partner(&params, p, q).unwrap();
            let dual = VeroneseParams::with_twist(n, d, b1).unwrap();
            prop_assert_eq!(duality_partner(&dual, p1, q1).unwrap(), (p, q, b));
        }
    }
}
