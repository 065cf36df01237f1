//! Cycle-level evaluation and projection maps on Koszul cohomology.
//!
//! Chains are sparse combinations of basis elements `v_S (x) u` over a prime
//! field. Contraction against a functional on `V` acts on the wedge part only
//! and anticommutes with the Koszul differential, so it induces maps on
//! homology. Evaluation at a point `x` is contraction with `v -> v(x)`;
//! evaluation along the hyperplane `D = {x_0 = 0}` uses `s` general points of
//! `D`, where `s` is the number of degree-`d` monomials in `x_1..x_n`.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::betti::Engine;
use crate::bounds::{h0, main_thm_bound, projection_codim, to_i64, VeroneseParams};
use crate::error::{domain, Error, Result};
use crate::harness::Verdict;
use crate::koszul::{standard_sign, BlockKey, KoszulBlockMatrix, KoszulContext};
use crate::linalg::{DenseMatrix, PrimeField, TaggedEchelon, DEFAULT_DENSE_LIMIT};
use crate::polyspace::{evaluate, multiply, restriction_split, Monomial, MonomialBasis, MultiDegree, PointOverField};
use crate::wedge::{alpha_s, contract, determinant, Functional, WedgeBasisElement, WedgeVector};

/// How many point sets [`sample_points_on_d`] draws before giving up.
pub const MAX_GENERICITY_ATTEMPTS: usize = 16;

type Term = (WedgeBasisElement, Monomial);

/// A sparse element of `C_{p,q}` over `GF(p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub params: VeroneseParams,
    pub p: i64,
    pub q: i64,
    field: PrimeField,
    terms: BTreeMap<Term, u32>,
}

impl Chain {
    pub fn zero(params: VeroneseParams, p: i64, q: i64, field: PrimeField) -> Self {
        Self {
            params,
            p,
            q,
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn add_term(&mut self, s: WedgeBasisElement, u: Monomial, c: u32) {
        if c == 0 {
            return;
        }
        let f = self.field;
        let key = (s, u);
        let x = f.add(self.terms.get(&key).copied().unwrap_or(0), c);
        if x == 0 {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, x);
        }
    }

    pub fn coeff(&self, s: &WedgeBasisElement, u: &Monomial) -> u32 {
        self.terms.get(&(s.clone(), u.clone())).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WedgeBasisElement, &Monomial, u32)> {
        self.terms.iter().map(|((s, u), &c)| (s, u, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: u32) -> Self {
        let mut out = Self::zero(self.params, self.p, self.q, self.field);
        for (s, u, x) in self.terms() {
            out.add_term(s.clone(), u.clone(), self.field.mul(x, c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.p, self.q), (other.p, other.q), "adding chains of different bidegree");
        let mut out = self.clone();
        for (s, u, x) in other.terms() {
            out.add_term(s.clone(), u.clone(), x);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(self.field.neg(1)))
    }

    /// Terms grouped by multidegree.
    pub fn blocks(&self, ctx: &KoszulContext) -> BTreeMap<MultiDegree, Vec<(WedgeBasisElement, Monomial, u32)>> {
        let mut out: BTreeMap<MultiDegree, Vec<_>> = BTreeMap::new();
        for (s, u, c) in self.terms() {
            out.entry(ctx.multidegree_of(s, u)).or_default().push((s.clone(), u.clone(), c));
        }
        out
    }

    /// Applies a linear map on the wedge part, leaving coefficients alone.
    fn map_wedge(
        &self,
        new_p: i64,
        basis_size: usize,
        f: impl Fn(&WedgeVector) -> Result<WedgeVector>,
    ) -> Result<Chain> {
        let mut by_coeff: BTreeMap<&Monomial, WedgeVector> = BTreeMap::new();
        for (s, u, c) in self.terms() {
            by_coeff
                .entry(u)
                .or_insert_with(|| WedgeVector::zero(self.field, self.p as usize, basis_size))
                .add_term(s.clone(), c);
        }
        let mut out = Chain::zero(self.params, new_p, self.q, self.field);
        for (u, v) in by_coeff {
            for (t, c) in f(&v)?.terms() {
                out.add_term(t.clone(), u.clone(), c);
            }
        }
        Ok(out)
    }
}

/// The Koszul differential on a chain: `C_{p,q} -> C_{p-1,q+1}`.
pub fn boundary(ctx: &KoszulContext, c: &Chain) -> Chain {
    let f = c.field;
    let mut out = Chain::zero(c.params, c.p - 1, c.q + 1, f);
    for (s, u, x) in c.terms() {
        for (j, &i) in s.indices().iter().enumerate() {
            let v = ctx.v().get(i as usize);
            let prod = multiply(v, u).expect("same number of variables");
            let y = if standard_sign(j) < 0 { f.neg(x) } else { x };
            out.add_term(s.without(j), prod, y);
        }
    }
    out
}

/// A cycle in `C_{p,q}`; the cycle condition is checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulClass {
    representative: Chain,
}

impl KoszulClass {
    pub fn new(ctx: &KoszulContext, representative: Chain) -> Result<Self> {
        if !boundary(ctx, &representative).is_zero() {
            return Err(Error::Invariant(format!(
                "chain in C_({},{}) with {} terms is not a cycle",
                representative.p,
                representative.q,
                representative.len()
            )));
        }
        Ok(Self { representative })
    }

    pub fn representative(&self) -> &Chain {
        &self.representative
    }

    pub fn p(&self) -> i64 {
        self.representative.p
    }

    pub fn q(&self) -> i64 {
        self.representative.q
    }
}

fn dense_block(m: &KoszulBlockMatrix, f: PrimeField) -> DenseMatrix {
    let mut a = DenseMatrix::zeros(m.n_rows, m.n_cols);
    for &(r, c, s) in &m.entries {
        a.set(r as usize, c as usize, f.sign(s));
    }
    a
}

struct BlockHomology {
    index: HashMap<WedgeBasisElement, usize>,
    echelon: TaggedEchelon,
    /// Global class index for each kernel vector that became a class.
    class_of_tag: Vec<Option<usize>>,
}

/// A basis of `K_{p,q}` with a way to read off coordinates of any cycle.
///
/// Built block by block: boundaries are inserted into an echelon form first,
/// then kernel vectors, and every kernel vector that is independent of what
/// came before becomes a basis class.
pub struct HomologyBasis {
    pub params: VeroneseParams,
    pub p: i64,
    pub q: i64,
    field: PrimeField,
    classes: Vec<KoszulClass>,
    blocks: BTreeMap<MultiDegree, BlockHomology>,
}

impl HomologyBasis {
    pub fn new(ctx: &KoszulContext, p: i64, q: i64, f: PrimeField) -> Result<Self> {
        Self::with_limit(ctx, p, q, f, DEFAULT_DENSE_LIMIT)
    }

    /// As [`Self::new`], refusing blocks larger than `limit` in either dimension.
    pub fn with_limit(ctx: &KoszulContext, p: i64, q: i64, f: PrimeField, limit: usize) -> Result<Self> {
        let params = ctx.params;
        let mut classes = Vec::new();
        let mut blocks = BTreeMap::new();
        for (w, dim) in ctx.block_multidegrees(p, q)? {
            if dim as usize > limit {
                return Err(Error::ResourceLimit(format!(
                    "homology block {w} of C_({p},{q}) has dimension {dim}, above {limit}"
                )));
            }
            let key = |p, q| BlockKey {
                params,
                p,
                q,
                mdeg: w.clone(),
            };
            let out = ctx.differential_block(&key(p, q));
            let inc = ctx.differential_block(&key(p + 1, q - 1));
            if out.n_rows > limit || inc.n_cols > limit {
                return Err(Error::ResourceLimit(format!(
                    "neighbouring blocks of {w} in C_({p},{q}) exceed {limit}"
                )));
            }
            let kernel = dense_block(&out, f).nullspace(f);
            let mut echelon = TaggedEchelon::new(f, out.n_cols, kernel.len());
            let image = dense_block(&inc, f);
            for c in 0..image.cols {
                echelon.insert(image.column(c), None);
            }
            let mut class_of_tag = vec![None; kernel.len()];
            for (k, vec) in kernel.into_iter().enumerate() {
                if echelon.insert(vec.clone(), Some(k)) {
                    let mut chain = Chain::zero(params, p, q, f);
                    for (i, &x) in vec.iter().enumerate() {
                        let s = &out.cols[i];
                        let u = ctx.coefficient_of(&w, s).expect("element of block");
                        chain.add_term(s.clone(), u, x);
                    }
                    class_of_tag[k] = Some(classes.len());
                    classes.push(KoszulClass::new(ctx, chain)?);
                }
            }
            let index = out.cols.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
            blocks.insert(
                w,
                BlockHomology {
                    index,
                    echelon,
                    class_of_tag,
                },
            );
        }
        Ok(Self {
            params,
            p,
            q,
            field: f,
            classes,
            blocks,
        })
    }

    pub fn dim(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[KoszulClass] {
        &self.classes
    }

    /// Coordinates of the homology class of `z` in this basis.
    pub fn coords(&self, ctx: &KoszulContext, z: &KoszulClass) -> Result<Vec<u32>> {
        let chain = z.representative();
        if (chain.p, chain.q) != (self.p, self.q) || chain.params != self.params {
            return domain(format!(
                "class in C_({},{}) for {} measured against basis of K_({},{}) for {}",
                chain.p, chain.q, chain.params, self.p, self.q, self.params
            ));
        }
        let f = self.field;
        let mut out = vec![0u32; self.dim()];
        for (w, terms) in chain.blocks(ctx) {
            let block = self
                .blocks
                .get(&w)
                .ok_or_else(|| Error::Invariant(format!("multidegree {w} is not a block of C_({},{})", self.p, self.q)))?;
            let mut v = vec![0u32; block.echelon.dim()];
            for (s, _, c) in terms {
                v[block.index[&s]] = c;
            }
            let tags = block.echelon.reduce(&mut v);
            if v.iter().any(|&x| x != 0) {
                return Err(Error::Invariant(format!("block {w} of a class left a residual after reduction")));
            }
            for (k, c) in tags.into_iter().enumerate() {
                if c != 0 {
                    let i = block.class_of_tag[k].ok_or_else(|| {
                        Error::Invariant("dependent kernel vector carried a tag".into())
                    })?;
                    out[i] = f.add(out[i], c);
                }
            }
        }
        Ok(out)
    }

    pub fn is_boundary(&self, ctx: &KoszulContext, z: &KoszulClass) -> Result<bool> {
        Ok(self.coords(ctx, z)?.iter().all(|&c| c == 0))
    }
}

/// A basis of `K_{p,q}` as classes. Empty exactly when the group vanishes.
pub fn cycle_basis(ctx: &KoszulContext, p: i64, q: i64, f: PrimeField) -> Result<Vec<KoszulClass>> {
    Ok(HomologyBasis::new(ctx, p, q, f)?.classes)
}

/// The functional `v -> v(x)` on `V`.
pub fn evaluation_functional(ctx: &KoszulContext, x: &PointOverField, f: PrimeField) -> Functional {
    Functional::new(f, ctx.v().monomials().iter().map(|m| evaluate(m, x, f)).collect())
}

/// Contraction of the wedge part against evaluation at `x`; lowers `p` by one.
pub fn ev_point(ctx: &KoszulContext, c: &KoszulClass, x: &PointOverField) -> Result<KoszulClass> {
    let chain = c.representative();
    if chain.p < 1 {
        return domain(format!("ev_point needs p >= 1, got {}", chain.p));
    }
    let phi = evaluation_functional(ctx, x, chain.field);
    let out = chain.map_wedge(chain.p - 1, ctx.v_dim(), |v| Ok(contract(&phi, v)))?;
    KoszulClass::new(ctx, out)
}

/// `s` points on `D = {x_0 = 0}` whose transversal-monomial matrix is invertible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivisorPoints {
    pub points: Vec<PointOverField>,
    /// Determinant of `[t_a(x_b)]` over the transversal monomials `t_a`.
    pub certificate: u32,
    /// Point sets drawn before this one was accepted (1 if the first worked).
    pub attempts: usize,
    #[serde(skip)]
    functionals: Vec<Functional>,
}

impl DivisorPoints {
    /// Validates user-supplied points: on `D`, `s` of them, and general.
    pub fn new(ctx: &KoszulContext, points: Vec<PointOverField>, f: PrimeField) -> Result<Self> {
        let s = to_i64(&projection_codim(&ctx.params))? as usize;
        if points.len() != s {
            return domain(format!("need exactly s = {s} points on D, got {}", points.len()));
        }
        if let Some(x) = points.iter().find(|x| !x.on_hyperplane()) {
            return domain(format!("point {:?} is not on x0 = 0", x.coords()));
        }
        let certificate = transversal_determinant(ctx, &points, f)?;
        if certificate == 0 {
            return Err(Error::Genericity {
                attempts: 1,
                detail: "transversal-monomial matrix is singular; choose other points or another seed".into(),
            });
        }
        let functionals = points.iter().map(|x| evaluation_functional(ctx, x, f)).collect();
        Ok(Self {
            points,
            certificate,
            attempts: 1,
            functionals,
        })
    }

    pub fn s(&self) -> usize {
        self.points.len()
    }

    pub fn functionals(&self) -> &[Functional] {
        &self.functionals
    }
}

fn transversal_determinant(ctx: &KoszulContext, points: &[PointOverField], f: PrimeField) -> Result<u32> {
    let (_, transversal) = restriction_split(ctx.params.n as usize, ctx.params.d as i64)?;
    let mut m: Vec<Vec<u32>> = transversal
        .iter()
        .map(|&t| points.iter().map(|x| evaluate(ctx.v().get(t), x, f)).collect())
        .collect();
    Ok(determinant(&mut m, f))
}

/// Draws `s` uniformly random points of `D` from a seeded stream until the
/// genericity certificate is nonzero.
pub fn sample_points_on_d(ctx: &KoszulContext, f: PrimeField, seed: u64) -> Result<DivisorPoints> {
    let s = to_i64(&projection_codim(&ctx.params))? as usize;
    let n = ctx.params.n as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for attempt in 1..=MAX_GENERICITY_ATTEMPTS {
        let mut points = Vec::with_capacity(s);
        while points.len() < s {
            let mut coords = vec![0u32; n + 1];
            for c in coords.iter_mut().skip(1) {
                *c = rng.gen_range(0..f.modulus());
            }
            if let Ok(x) = PointOverField::new(coords, f) {
                points.push(x);
            }
        }
        if let Ok(mut pts) = DivisorPoints::new(ctx, points, f) {
            pts.attempts = attempt;
            return Ok(pts);
        }
        log::debug!("point set {attempt} on D is degenerate, resampling");
    }
    Err(Error::Genericity {
        attempts: MAX_GENERICITY_ATTEMPTS,
        detail: format!("no general set of {s} points on D from seed {seed}; try another seed"),
    })
}

/// Evaluation along `D`: the s-fold contraction built from the points,
/// multiplied by `scale` (the normalisation of the determinant is arbitrary).
pub fn ev_d(ctx: &KoszulContext, c: &KoszulClass, pts: &DivisorPoints, scale: u32) -> Result<KoszulClass> {
    let chain = c.representative();
    let s = pts.s() as i64;
    if chain.p < s {
        return domain(format!("ev_D needs p >= s = {s}, got p = {}", chain.p));
    }
    let out = chain.map_wedge(chain.p - s, ctx.v_dim(), |v| Ok(alpha_s(pts.functionals(), v)?.scale(scale)))?;
    KoszulClass::new(ctx, out)
}

/// The composite of `s` single-point evaluations, first point applied first.
pub fn ev_d_composite(ctx: &KoszulContext, c: &KoszulClass, pts: &DivisorPoints) -> Result<KoszulClass> {
    pts.points.iter().try_fold(c.clone(), |acc, x| ev_point(ctx, &acc, x))
}

/// Matrix of a homology map in the given bases (columns are images of source classes).
pub fn induced_matrix(
    ctx: &KoszulContext,
    source: &HomologyBasis,
    target: &HomologyBasis,
    map: impl Fn(&KoszulClass) -> Result<KoszulClass>,
) -> Result<DenseMatrix> {
    let mut m = DenseMatrix::zeros(target.dim(), source.dim());
    for (j, c) in source.classes().iter().enumerate() {
        let image = map(c)?;
        for (i, x) in target.coords(ctx, &image)?.into_iter().enumerate() {
            m.set(i, j, x);
        }
    }
    Ok(m)
}

/// `Some(l)` with `a = l * b` if the matrices are proportional; `l = 0` only when both vanish.
pub fn proportionality(a: &DenseMatrix, b: &DenseMatrix, f: PrimeField) -> Option<u32> {
    if (a.rows, a.cols) != (b.rows, b.cols) {
        return None;
    }
    let Some(k) = b.data.iter().position(|&x| x != 0) else {
        return a.data.iter().all(|&x| x == 0).then_some(0);
    };
    let l = f.mul(a.data[k], f.inv(b.data[k]));
    (l != 0 && a.data.iter().zip(&b.data).all(|(&x, &y)| x == f.mul(l, y))).then_some(l)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorCheck {
    pub in_subspace_mod_boundary: bool,
    /// `y` with `ev_D(c) - d(y)` supported on wedges of multiples of `x_0`.
    pub witness: Option<Chain>,
}

/// Is `ev_D(c)` congruent modulo boundaries to a chain whose wedge factors
/// all vanish on `D`?
pub fn projection_factor_check(
    ctx: &KoszulContext,
    c: &KoszulClass,
    pts: &DivisorPoints,
    scale: u32,
) -> Result<FactorCheck> {
    let z = ev_d(ctx, c, pts, scale)?;
    let chain = z.representative();
    let f = chain.field;
    let (p, q) = (chain.p, chain.q);
    let (divisible, _) = restriction_split(ctx.params.n as usize, ctx.params.d as i64)?;
    let mut on_d = vec![false; ctx.v_dim()];
    for i in divisible {
        on_d[i] = true;
    }
    let off_subspace = |s: &WedgeBasisElement| s.indices().iter().any(|&i| !on_d[i as usize]);
    let mut witness = Chain::zero(ctx.params, p + 1, q - 1, f);
    for (w, terms) in chain.blocks(ctx) {
        if terms.iter().all(|(s, _, _)| !off_subspace(s)) {
            continue;
        }
        let inc = ctx.differential_block(&BlockKey {
            params: ctx.params,
            p: p + 1,
            q: q - 1,
            mdeg: w.clone(),
        });
        let bad_rows: Vec<usize> = (0..inc.n_rows).filter(|&r| off_subspace(&inc.rows[r])).collect();
        let row_pos: HashMap<usize, usize> = bad_rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let mut a = DenseMatrix::zeros(bad_rows.len(), inc.n_cols);
        for &(r, col, sgn) in &inc.entries {
            if let Some(&i) = row_pos.get(&(r as usize)) {
                a.set(i, col as usize, f.sign(sgn));
            }
        }
        let row_of: HashMap<&WedgeBasisElement, usize> = inc.rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut rhs = vec![0u32; bad_rows.len()];
        for (s, _, x) in &terms {
            if let Some(&i) = row_of.get(s).and_then(|r| row_pos.get(r)) {
                rhs[i] = *x;
            }
        }
        let Some(y) = a.solve(&rhs, f) else {
            return Ok(FactorCheck {
                in_subspace_mod_boundary: false,
                witness: None,
            });
        };
        for (col, &x) in y.iter().enumerate() {
            let s = &inc.cols[col];
            let u = ctx.coefficient_of(&w, s).expect("element of block");
            witness.add_term(s.clone(), u, x);
        }
    }
    let rest = chain.sub(&boundary(ctx, &witness));
    if rest.terms().any(|(s, _, _)| off_subspace(s)) {
        return Err(Error::Invariant("projection witness does not clear the transversal part".into()));
    }
    Ok(FactorCheck {
        in_subspace_mod_boundary: true,
        witness: Some(witness),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TwistCheck {
    pub n: u32,
    pub d: u32,
    pub p: i64,
    /// `dim K_{p,1}(P^n; O(-1), O(d-1))`.
    pub lhs: u64,
    /// `dim K_{p,0}(P^n; O(d-2), O(d-1))`.
    pub rhs: u64,
    pub equal: bool,
}

/// Compares `K_{p,1}(O(-1); O(d-1))` with `K_{p,0}(O(d-2); O(d-1))`. Both are
/// kernels of the same map since `H^0(O(-1)) = 0`.
pub fn twist_identification_check(engine: &Engine, n: u32, d: u32, p: i64) -> Result<TwistCheck> {
    if d < 2 {
        return domain(format!("twist identification needs d >= 2, got {d}"));
    }
    let lhs = engine.kpq_dim(VeroneseParams::with_twist(n, d - 1, -1)?, p, 1)?;
    let rhs = engine.kpq_dim(VeroneseParams::with_twist(n, d - 1, d as i64 - 2)?, p, 0)?;
    Ok(TwistCheck {
        n,
        d,
        p,
        lhs,
        rhs,
        equal: lhs == rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub n: u32,
    pub d: u32,
    pub p: i64,
    pub s: i64,
    /// `dim K_{p,1}(P^n, O(d))`.
    pub first: u64,
    /// `dim K_{p-s,1}(P^n; O(-1), O(d-1))`, absent when `p < s`.
    pub second: Option<u64>,
    /// `C(d-2+n, n)`: the second group vanishes from here on.
    pub green_bound: i64,
    pub main_bound: i64,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Checks, for one `p`, the implication from nonvanishing of `K_{p,1}(O(d))`
/// to nonvanishing of `K_{p-s,1}(O(-1); O(d-1))`, Green vanishing of the
/// latter for `p - s >= C(d-2+n, n)`, and its nonvanishing one step below.
pub fn theorem_chain_check(engine: &Engine, n: u32, d: u32, p: i64) -> Result<ChainReport> {
    if d < 2 {
        return domain(format!("chain check needs d >= 2, got {d}"));
    }
    let params = VeroneseParams::new(n, d)?;
    let s = to_i64(&projection_codim(&params))?;
    let green_bound = to_i64(&h0(n as i64, d as i64 - 2)?)?;
    // equals main_thm_bound for n >= 3, and is meaningful for every n
    let main_bound = green_bound + s;
    debug_assert!(n < 3 || main_thm_bound(&params).ok().and_then(|b| to_i64(&b).ok()) == Some(main_bound));
    let first = engine.kpq_dim(params, p, 1)?;
    let mut notes = Vec::new();
    if p < s {
        notes.push(format!("p = {p} < s = {s}: no s-fold evaluation out of K_{{p,1}}"));
        return Ok(ChainReport {
            n,
            d,
            p,
            s,
            first,
            second: None,
            green_bound,
            main_bound,
            verdict: Verdict::OutOfApplicability,
            notes,
        });
    }
    let twisted = VeroneseParams::with_twist(n, d - 1, -1)?;
    let second = engine.kpq_dim(twisted, p - s, 1)?;
    let mut violation = false;
    if first != 0 && second == 0 {
        violation = true;
        notes.push("K_{p,1}(O(d)) is nonzero but K_{p-s,1}(O(-1);O(d-1)) vanishes".into());
    }
    if p - s >= green_bound && second != 0 {
        violation = true;
        notes.push(format!("Green vanishing fails: p - s = {} >= {green_bound}", p - s));
    }
    if p - s == green_bound - 1 && second == 0 {
        violation = true;
        notes.push(format!("optimality edge p - s = {} has a zero group", p - s));
    }
    if p >= main_bound && first != 0 {
        violation = true;
        notes.push(format!("K_{{p,1}} nonzero at p = {p} >= {main_bound}"));
    }
    Ok(ChainReport {
        n,
        d,
        p,
        s,
        first,
        second: Some(second),
        green_bound,
        main_bound,
        verdict: if violation { Verdict::Violation } else { Verdict::Consistent },
        notes,
    })
}

/// A chain with `terms` random basis elements of `C_{p,q}` and random coefficients.
pub fn random_chain<R: Rng>(ctx: &KoszulContext, p: i64, q: i64, f: PrimeField, terms: usize, rng: &mut R) -> Result<Chain> {
    let mut out = Chain::zero(ctx.params, p, q, f);
    let m = ctx.coeff_degree(q);
    if p < 0 || p as usize > ctx.v_dim() || m < 0 {
        return Ok(out);
    }
    let coeffs = MonomialBasis::shared(ctx.params.n as usize, m)?;
    for _ in 0..terms {
        let mut idx: Vec<u32> = rand::seq::index::sample(rng, ctx.v_dim(), p as usize)
            .into_iter()
            .map(|i| i as u32)
            .collect();
        idx.sort_unstable();
        let s = WedgeBasisElement::new(idx, ctx.v_dim())?;
        let u = coeffs.get(rng.gen_range(0..coeffs.len())).clone();
        out.add_term(s, u, rng.gen_range(1..f.modulus()));
    }
    Ok(out)
}
