//! Rank engine and Betti tables.
//!
//! `dim K_{p,q} = dim C_{p,q} - rank d_{p,q} - rank d_{p+1,q-1}`, with each
//! rank summed over multidegree blocks. Blocks in one coordinate-permutation
//! orbit have equal rank, so only the sorted-descending representative is
//! eliminated and its rank is weighted by the orbit size.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{duality_partner, green_vanishing_bound, to_i64, VeroneseParams};
use crate::cache::{BlockCache, BlockCacheRecord, CacheKey};
use crate::error::{Error, Result};
use crate::koszul::{orbit_reduce, BlockKey, KoszulContext};
use crate::linalg::{rational_rank, sparse_rank, FieldSpec, PrimeField, DEFAULT_DENSE_LIMIT, PINNED_PRIMES};
use crate::polyspace::MultiDegree;

/// Size ceilings checked before any block of a differential is built.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResourceLimits {
    /// Largest allowed block, in rows or columns.
    pub max_block_dim: u64,
    /// Largest allowed number of nonzeros over all representative blocks of one differential.
    pub max_total_nonzeros: u64,
}

impl Default for ResourceLimits {
    fn default() -> Self {
        Self {
            max_block_dim: 250_000,
            max_total_nonzeros: 200_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub prime: PrimeField,
    pub limits: ResourceLimits,
    pub cache_dir: Option<PathBuf>,
    pub dense_limit: usize,
    /// Recompute every block with a second pinned prime and, within the dense
    /// limit, over the rationals.
    pub certify: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            prime: PrimeField::pinned(0),
            limits: ResourceLimits::default(),
            cache_dir: None,
            dense_limit: DEFAULT_DENSE_LIMIT,
            certify: false,
        }
    }
}

impl EngineConfig {
    /// Picks the working prime from the pinned list by seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            prime: PrimeField::pinned((seed % PINNED_PRIMES.len() as u64) as usize),
            ..Self::default()
        }
    }

    /// The pinned prime used for certification: the next one in the list.
    pub fn second_prime(&self) -> PrimeField {
        let i = PINNED_PRIMES
            .iter()
            .position(|&p| p == self.prime.modulus())
            .map_or(0, |i| (i + 1) % PINNED_PRIMES.len());
        PrimeField::pinned(i)
    }
}

/// A block whose rank differed between fields.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Disagreement {
    pub p: i64,
    pub q: i64,
    pub mdeg: Vec<u32>,
    pub field: String,
    pub rank: u64,
    pub reference: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub primes: Vec<u32>,
    pub certified: bool,
    pub blocks_second_prime: u64,
    pub blocks_rational: u64,
    pub blocks_beyond_dense_limit: u64,
    pub disagreements: Vec<Disagreement>,
}

#[derive(Default)]
struct CertLog {
    second: AtomicU64,
    rational: AtomicU64,
    beyond: AtomicU64,
    disagreements: Mutex<Vec<Disagreement>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryStatus {
    Zero,
    Nonzero(u64),
    Skipped(String),
}

impl EntryStatus {
    pub fn from_dim(dim: u64) -> Self {
        if dim == 0 {
            EntryStatus::Zero
        } else {
            EntryStatus::Nonzero(dim)
        }
    }

    pub fn dim(&self) -> Option<u64> {
        match self {
            EntryStatus::Zero => Some(0),
            EntryStatus::Nonzero(d) => Some(*d),
            EntryStatus::Skipped(_) => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            EntryStatus::Zero => "ZERO",
            EntryStatus::Nonzero(_) => "NONZERO",
            EntryStatus::Skipped(_) => "SKIPPED",
        }
    }
}

impl Serialize for EntryStatus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Result of comparing a group with its dual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualityCheck {
    pub p: i64,
    pub q: i64,
    pub partner: (i64, i64, i64),
    pub lhs: u64,
    pub rhs: u64,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GreenReport {
    pub q: i64,
    pub bound: i64,
    /// `(p, dim)` for every `p` from the bound up to the top exterior power.
    pub above: Vec<(i64, u64)>,
    /// `dim K_{bound-1, q}` when `bound >= 1`.
    pub edge: Option<u64>,
    pub vanishing_holds: bool,
    pub edge_nonzero: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EulerCheck {
    /// `p + q` along the antidiagonal.
    pub k: i64,
    pub space_dims: u64,
    pub ranks: u64,
    pub homology_dims: u64,
    pub alternating_spaces: i128,
    pub alternating_homology: i128,
    pub holds: bool,
}

/// Computes block ranks and Koszul cohomology dimensions.
pub struct Engine {
    config: EngineConfig,
    cache: BlockCache,
    contexts: Mutex<HashMap<VeroneseParams, Arc<KoszulContext>>>,
    eliminations: AtomicU64,
}

impl Engine {
    pub fn new(config: EngineConfig) -> Result<Self> {
        let cache = match &config.cache_dir {
            Some(dir) => BlockCache::open(dir)?,
            None => BlockCache::in_memory(),
        };
        Ok(Self {
            config,
            cache,
            contexts: Mutex::new(HashMap::new()),
            eliminations: AtomicU64::new(0),
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn prime(&self) -> PrimeField {
        self.config.prime
    }

    /// Number of sparse eliminations actually run (cache hits excluded).
    pub fn eliminations(&self) -> u64 {
        self.eliminations.load(Ordering::Relaxed)
    }

    pub fn context(&self, params: VeroneseParams) -> Result<Arc<KoszulContext>> {
        let mut map = self.contexts.lock().expect("context lock");
        if let Some(c) = map.get(&params) {
            return Ok(c.clone());
        }
        let c = Arc::new(KoszulContext::new(params)?);
        map.insert(params, c.clone());
        Ok(c)
    }

    /// Rank of one block over `f`, through the cache.
    pub fn block_rank(&self, key: &BlockKey, f: PrimeField) -> Result<u64> {
        let ctx = self.context(key.params)?;
        let ckey = cache_key(key, f);
        if let Some(r) = self.cache.get(&ckey) {
            return Ok(r);
        }
        let m = ctx.differential_block(key);
        self.eliminations.fetch_add(1, Ordering::Relaxed);
        let r = sparse_rank(&m, f) as u64;
        self.cache.insert_all(&[BlockCacheRecord::new(ckey, r)])?;
        Ok(r)
    }

    /// Rank of `d_{p,q}` over the working prime.
    pub fn differential_rank(&self, params: VeroneseParams, p: i64, q: i64) -> Result<u64> {
        self.differential_rank_logged(params, p, q, None)
    }

    fn differential_rank_logged(
        &self,
        params: VeroneseParams,
        p: i64,
        q: i64,
        log: Option<&CertLog>,
    ) -> Result<u64> {
        let ctx = self.context(params)?;
        if p < 1 {
            return Ok(0);
        }
        let blocks = ctx.block_multidegrees(p, q)?;
        if blocks.is_empty() {
            return Ok(0);
        }
        let dims: HashMap<MultiDegree, u64> = blocks.iter().cloned().collect();
        let mdegs: Vec<MultiDegree> = blocks.into_iter().map(|b| b.0).collect();
        let reps = orbit_reduce(&mdegs);
        self.check_limits(&ctx, p, q, &reps, &dims)?;

        let f = self.config.prime;
        let results: Vec<Result<(u64, Option<BlockCacheRecord>)>> = reps
            .par_iter()
            .map(|(w, _)| {
                let key = BlockKey {
                    params,
                    p,
                    q,
                    mdeg: w.clone(),
                };
                let ckey = cache_key(&key, f);
                let cached = self.cache.get(&ckey);
                if cached.is_some() && log.is_none() {
                    return Ok((cached.unwrap_or_default(), None));
                }
                let m = ctx.differential_block(&key);
                let r = match cached {
                    Some(r) => r,
                    None => {
                        self.eliminations.fetch_add(1, Ordering::Relaxed);
                        sparse_rank(&m, f) as u64
                    }
                };
                if let Some(log) = log {
                    self.certify_block(&m, r, log)?;
                }
                let record = cached.is_none().then(|| BlockCacheRecord::new(ckey, r));
                Ok((r, record))
            })
            .collect();

        let mut total = 0u64;
        let mut records = Vec::new();
        for ((_, mult), res) in reps.iter().zip(results) {
            let (r, rec) = res?;
            total += r * *mult as u64;
            records.extend(rec);
        }
        // one append per differential, in representative order
        self.cache.insert_all(&records)?;
        Ok(total)
    }

    fn check_limits(
        &self,
        ctx: &KoszulContext,
        p: i64,
        q: i64,
        reps: &[(MultiDegree, usize)],
        dims: &HashMap<MultiDegree, u64>,
    ) -> Result<()> {
        let limits = self.config.limits;
        let targets: HashMap<MultiDegree, u64> = ctx.block_multidegrees(p - 1, q + 1)?.into_iter().collect();
        let mut nnz = 0u64;
        for (w, _) in reps {
            let src = dims[w];
            let tgt = targets.get(w).copied().unwrap_or(0);
            if src.max(tgt) > limits.max_block_dim {
                return Err(Error::ResourceLimit(format!(
                    "d_({p},{q}) block {w} is {tgt}x{src}, above max_block_dim {}",
                    limits.max_block_dim
                )));
            }
            nnz += src * p as u64;
        }
        if nnz > limits.max_total_nonzeros {
            return Err(Error::ResourceLimit(format!(
                "d_({p},{q}) needs {nnz} nonzeros, above max_total_nonzeros {}",
                limits.max_total_nonzeros
            )));
        }
        Ok(())
    }

    fn certify_block(&self, m: &crate::koszul::KoszulBlockMatrix, r: u64, log: &CertLog) -> Result<()> {
        let key = &m.key;
        let second = self.config.second_prime();
        let r2 = sparse_rank(m, second) as u64;
        log.second.fetch_add(1, Ordering::Relaxed);
        let mut found = Vec::new();
        if r2 != r {
            found.push(Disagreement {
                p: key.p,
                q: key.q,
                mdeg: key.mdeg.0.clone(),
                field: second.to_string(),
                rank: r2,
                reference: r,
            });
        }
        match rational_rank(m, self.config.dense_limit) {
            Ok(rq) => {
                log.rational.fetch_add(1, Ordering::Relaxed);
                if rq as u64 != r {
                    found.push(Disagreement {
                        p: key.p,
                        q: key.q,
                        mdeg: key.mdeg.0.clone(),
                        field: "QQ".into(),
                        rank: rq as u64,
                        reference: r,
                    });
                }
            }
            Err(Error::ResourceLimit(_)) => {
                log.beyond.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => return Err(e),
        }
        if !found.is_empty() {
            log::warn!("rank disagreement on block {:?}: {:?}", key, found);
            log.disagreements.lock().expect("log lock").extend(found);
        }
        Ok(())
    }

    /// `dim K_{p,q}(P^n; O(b), O(d))` over the working prime.
    pub fn kpq_dim(&self, params: VeroneseParams, p: i64, q: i64) -> Result<u64> {
        self.kpq_dim_logged(params, p, q, None)
    }

    fn kpq_dim_logged(&self, params: VeroneseParams, p: i64, q: i64, log: Option<&CertLog>) -> Result<u64> {
        let ctx = self.context(params)?;
        let middle = ctx.space_dim(p, q).ok_or_else(|| {
            Error::ResourceLimit(format!("dim C_({p},{q}) does not fit in 64 bits"))
        })?;
        if middle == 0 {
            return Ok(0);
        }
        let out = self.differential_rank_logged(params, p, q, log)?;
        let inc = self.differential_rank_logged(params, p + 1, q - 1, log)?;
        if out + inc > middle {
            return Err(Error::Invariant(format!(
                "ranks {out} + {inc} exceed dim C_({p},{q}) = {middle} for {params}"
            )));
        }
        Ok(middle - out - inc)
    }

    /// Every entry `(p, q)` with `p` in `p_range` and `q` in `q_range` (inclusive).
    /// Entries refused on resource grounds are recorded as skipped.
    pub fn betti_table(
        &self,
        params: VeroneseParams,
        p_range: (i64, i64),
        q_range: (i64, i64),
    ) -> Result<BettiTable> {
        let log = self.config.certify.then(CertLog::default);
        let mut entries = BTreeMap::new();
        for q in q_range.0..=q_range.1 {
            for p in p_range.0..=p_range.1 {
                let status = match self.kpq_dim_logged(params, p, q, log.as_ref()) {
                    Ok(dim) => EntryStatus::from_dim(dim),
                    Err(Error::ResourceLimit(msg)) => EntryStatus::Skipped(msg),
                    Err(e) => return Err(e),
                };
                entries.insert((p, q), status);
            }
        }
        let provenance = match log {
            Some(log) => {
                let disagreements = log.disagreements.into_inner().expect("log lock");
                Provenance {
                    primes: vec![self.config.prime.modulus(), self.config.second_prime().modulus()],
                    certified: disagreements.is_empty(),
                    blocks_second_prime: log.second.into_inner(),
                    blocks_rational: log.rational.into_inner(),
                    blocks_beyond_dense_limit: log.beyond.into_inner(),
                    disagreements,
                }
            }
            None => Provenance {
                primes: vec![self.config.prime.modulus()],
                ..Provenance::default()
            },
        };
        Ok(BettiTable {
            params,
            field: FieldSpec::Prime(self.config.prime),
            p_range,
            q_range,
            entries,
            provenance,
        })
    }

    /// The full table: `p` from 0 to `h^0(O(d))`, `q` from 0 to `n + 1`.
    pub fn full_table(&self, params: VeroneseParams) -> Result<BettiTable> {
        let top = self.context(params)?.v_dim() as i64;
        self.betti_table(params, (0, top), (0, params.n as i64 + 1))
    }

    pub fn duality_check(&self, params: VeroneseParams, p: i64, q: i64) -> Result<DualityCheck> {
        let partner = duality_partner(&params, p, q)?;
        let dual = VeroneseParams::with_twist(params.n, params.d, partner.2)?;
        let lhs = self.kpq_dim(params, p, q)?;
        let rhs = self.kpq_dim(dual, partner.0, partner.1)?;
        Ok(DualityCheck {
            p,
            q,
            partner,
            lhs,
            rhs,
            equal: lhs == rhs,
        })
    }

    pub fn green_vanishing_check(&self, params: VeroneseParams, q: i64) -> Result<GreenReport> {
        let bound = to_i64(&green_vanishing_bound(&params, q)?)?;
        let top = self.context(params)?.v_dim() as i64;
        let mut above = Vec::new();
        for p in bound.max(0)..=top {
            above.push((p, self.kpq_dim(params, p, q)?));
        }
        let edge = if bound >= 1 {
            Some(self.kpq_dim(params, bound - 1, q)?)
        } else {
            None
        };
        Ok(GreenReport {
            q,
            bound,
            vanishing_holds: above.iter().all(|&(_, d)| d == 0),
            edge_nonzero: edge.map(|e| e > 0),
            above,
            edge,
        })
    }

    /// Bookkeeping along `p + q = k`: space dimensions split into ranks and
    /// homology, and the alternating sums of spaces and homology agree.
    pub fn euler_check(&self, params: VeroneseParams, k: i64) -> Result<EulerCheck> {
        let ctx = self.context(params)?;
        let top = ctx.v_dim() as i64;
        let (mut spaces, mut ranks, mut homology) = (0u64, 0u64, 0u64);
        let (mut alt_c, mut alt_h) = (0i128, 0i128);
        for p in 0..=top {
            let q = k - p;
            let c = ctx
                .space_dim(p, q)
                .ok_or_else(|| Error::ResourceLimit(format!("dim C_({p},{q}) overflows")))?;
            if c == 0 {
                continue;
            }
            let h = self.kpq_dim(params, p, q)?;
            spaces += c;
            homology += h;
            ranks += self.differential_rank(params, p, q)? + self.differential_rank(params, p + 1, q - 1)?;
            let sign = if p % 2 == 0 { 1 } else { -1 };
            alt_c += sign * c as i128;
            alt_h += sign * h as i128;
        }
        Ok(EulerCheck {
            k,
            space_dims: spaces,
            ranks,
            homology_dims: homology,
            alternating_spaces: alt_c,
            alternating_homology: alt_h,
            holds: ranks + homology == spaces && alt_c == alt_h,
        })
    }
}

fn cache_key(key: &BlockKey, f: PrimeField) -> CacheKey {
    CacheKey {
        n: key.params.n,
        d: key.params.d,
        b: key.params.b,
        p: key.p,
        q: key.q,
        mdeg: key.mdeg.0.clone(),
        prime: f.modulus(),
    }
}

/// Computed `K_{p,q}` over a rectangle of indices.
///
/// Entries inside the rectangle that are not stored as nonzero or skipped are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BettiTable {
    pub params: VeroneseParams,
    pub field: FieldSpec,
    pub p_range: (i64, i64),
    pub q_range: (i64, i64),
    pub entries: BTreeMap<(i64, i64), EntryStatus>,
    pub provenance: Provenance,
}

#[derive(Serialize)]
struct JsonEntry<'a> {
    p: i64,
    q: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dim: Option<u64>,
    status: &'a EntryStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonTable<'a> {
    params: &'a VeroneseParams,
    field: String,
    p_range: [i64; 2],
    q_range: [i64; 2],
    entries: Vec<JsonEntry<'a>>,
    provenance: &'a Provenance,
}

impl BettiTable {
    pub fn get(&self, p: i64, q: i64) -> Option<&EntryStatus> {
        self.entries.get(&(p, q))
    }

    /// Dimension of a computed entry; `None` if skipped or outside the table.
    pub fn dim(&self, p: i64, q: i64) -> Option<u64> {
        self.get(p, q).and_then(EntryStatus::dim)
    }

    /// The `p` with `K_{p,q} != 0`, in increasing order.
    pub fn nonzero_ps(&self, q: i64) -> Vec<i64> {
        self.entries
            .iter()
            .filter(|((_, qq), s)| *qq == q && matches!(s, EntryStatus::Nonzero(_)))
            .map(|((p, _), _)| *p)
            .collect()
    }

    pub fn has_skipped(&self) -> bool {
        self.entries.values().any(|s| matches!(s, EntryStatus::Skipped(_)))
    }

    pub fn to_json(&self) -> Result<String> {
        let entries = self
            .entries
            .iter()
            .filter(|(_, s)| !matches!(s, EntryStatus::Zero))
            .map(|(&(p, q), s)| JsonEntry {
                p,
                q,
                dim: s.dim(),
                status: s,
                reason: match s {
                    EntryStatus::Skipped(r) => Some(r.as_str()),
                    _ => None,
                },
            })
            .collect();
        let doc = JsonTable {
            params: &self.params,
            field: self.field.to_string(),
            p_range: [self.p_range.0, self.p_range.1],
            q_range: [self.q_range.0, self.q_range.1],
            entries,
            provenance: &self.provenance,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// One line per computed entry, zeros included.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,q,dim,status\n");
        for (&(p, q), s) in &self.entries {
            let dim = s.dim().map(|d| d.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{p},{q},{dim},{}", s.label());
        }
        out
    }

    /// Betti diagram with rows `q` and columns `p`; `.` is zero, `?` skipped.
    pub fn to_ascii(&self) -> String {
        let ps: Vec<i64> = (self.p_range.0..=self.p_range.1).collect();
        let cell = |p: i64, q: i64| match self.get(p, q) {
            Some(EntryStatus::Nonzero(d)) => d.to_string(),
            Some(EntryStatus::Skipped(_)) => "?".into(),
            _ => ".".into(),
        };
        let totals: Vec<String> = ps
            .iter()
            .map(|&p| {
                let col: Vec<&EntryStatus> = (self.q_range.0..=self.q_range.1)
                    .filter_map(|q| self.get(p, q))
                    .collect();
                if col.iter().any(|s| matches!(s, EntryStatus::Skipped(_))) {
                    "?".into()
                } else {
                    col.iter().filter_map(|s| s.dim()).sum::<u64>().to_string()
                }
            })
            .collect();
        let mut rows: Vec<(String, Vec<String>)> = vec![
            (String::new(), ps.iter().map(|p| p.to_string()).collect()),
            ("total:".into(), totals),
        ];
        for q in self.q_range.0..=self.q_range.1 {
            rows.push((format!("{q}:"), ps.iter().map(|&p| cell(p, q)).collect()));
        }
        let label_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let widths: Vec<usize> = (0..ps.len())
            .map(|i| rows.iter().map(|r| r.1[i].len()).max().unwrap_or(1))
            .collect();
        let mut out = String::new();
        for (label, cells) in rows {
            let _ = write!(out, "{label:>label_w$}");
            for (c, w) in cells.iter().zip(&widths) {
                let _ = write!(out, " {c:>w$}");
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, d: u32, b: i64) -> VeroneseParams {
        VeroneseParams::with_twist(n, d, b).unwrap()
    }

    fn engine() -> Engine {
        Engine::new(EngineConfig::default()).unwrap()
    }

    #[test]
    fn conic() {
        let e = engine();
        assert_eq!(e.kpq_dim(params(1, 2, 0), 1, 1).unwrap(), 1);
        assert_eq!(e.differential_rank(params(1, 2, 0), 1, 1).unwrap(), 5);
        assert_eq!(e.differential_rank(params(1, 2, 0), 2, 0).unwrap(), 3);
        assert_eq!(e.kpq_dim(params(1, 2, 0), 0, 0).unwrap(), 1);
        assert_eq!(e.kpq_dim(params(1, 2, 0), -1, 1).unwrap(), 0);
    }

    #[test]
    fn twisted_cubic_and_plane_cubic() {
        let e = engine();
        let cubic = params(1, 3, 0);
        assert_eq!(e.kpq_dim(cubic, 1, 1).unwrap(), 3);
        assert_eq!(e.kpq_dim(cubic, 2, 1).unwrap(), 2);
        assert_eq!(e.kpq_dim(cubic, 3, 1).unwrap(), 0);
        assert_eq!(e.kpq_dim(params(2, 3, 0), 1, 1).unwrap(), 27);
    }

    #[test]
    fn veronese_surface_table() {
        let e = engine();
        let t = e.full_table(params(2, 2, 0)).unwrap();
        assert_eq!(t.dim(0, 0), Some(1));
        assert_eq!(t.nonzero_ps(1), vec![1, 2, 3]);
        assert_eq!((t.dim(1, 1), t.dim(2, 1), t.dim(3, 1)), (Some(6), Some(8), Some(3)));
        for q in [0, 2, 3] {
            assert_eq!(t.nonzero_ps(q), if q == 0 { vec![0] } else { vec![] });
        }
        let ascii = t.to_ascii();
        assert!(ascii.contains("1: . 6 8 3 . ."), "{ascii}");
        let csv = t.to_csv();
        assert!(csv.starts_with("p,q,dim,status\n"));
        assert!(csv.contains("\n2,1,8,NONZERO\n"));
        let json: serde_json::Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(json["field"], "GF(2147483647)");
        assert_eq!(json["entries"][1], serde_json::json!({"p":1,"q":1,"dim":6,"status":"NONZERO"}));
        assert_eq!(json["provenance"]["certified"], false);
    }

    #[test]
    fn duality_examples() {
        let e = engine();
        let c = e.duality_check(params(1, 3, 0), 1, 1).unwrap();
        assert_eq!((c.lhs, c.partner, c.equal), (3, (1, 1, -2), true));
        let c = e.duality_check(params(2, 3, 0), 7, 2).unwrap();
        assert_eq!((c.lhs, c.rhs, c.partner), (1, 1, (0, 1, -3)));
        let c = e.duality_check(params(2, 2, 0), 3, 1).unwrap();
        assert_eq!((c.lhs, c.rhs), (3, 3));
    }

    #[test]
    fn green_examples() {
        let e = engine();
        let g = e.green_vanishing_check(params(2, 2, -1), 1).unwrap();
        assert_eq!(g.bound, 3);
        assert!(g.vanishing_holds);
        assert_eq!(g.edge_nonzero, Some(true));
        let g = e.green_vanishing_check(params(1, 3, 0), 1).unwrap();
        assert_eq!(g.bound, 4);
        assert!(g.vanishing_holds);
        let twisted = params(2, 2, 1);
        let g = e.green_vanishing_check(twisted, 0).unwrap();
        assert_eq!(g.bound, 3);
        assert!(g.vanishing_holds);
        for p in 0..=2 {
            assert!(e.kpq_dim(twisted, p, 0).unwrap() > 0);
        }
    }

    #[test]
    fn euler_bookkeeping() {
        let e = engine();
        for (n, d, b) in [(1, 3, 0), (2, 2, 0), (2, 2, -1)] {
            for k in 0..6 {
                let c = e.euler_check(params(n, d, b), k).unwrap();
                assert!(c.holds, "{c:?}");
            }
        }
    }

    #[test]
    fn limits_give_skipped_entries() {
        let mut cfg = EngineConfig::default();
        cfg.limits.max_block_dim = 2;
        let e = Engine::new(cfg).unwrap();
        let t = e.betti_table(params(2, 2, 0), (1, 2), (1, 1)).unwrap();
        assert!(t.has_skipped());
        assert!(matches!(t.get(2, 1), Some(EntryStatus::Skipped(_))));
        assert!(t.to_ascii().contains('?'));
    }

    #[test]
    fn certification_runs_second_prime_and_rationals() {
        let cfg = EngineConfig {
            certify: true,
            ..EngineConfig::default()
        };
        let e = Engine::new(cfg).unwrap();
        let t = e.full_table(params(1, 3, 0)).unwrap();
        assert!(t.provenance.certified);
        assert_eq!(t.provenance.primes.len(), 2);
        assert!(t.provenance.blocks_rational > 0);
        assert_eq!(t.provenance.blocks_rational, t.provenance.blocks_second_prime);
    }

    #[test]
    fn cache_makes_rerun_free() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = EngineConfig {
            cache_dir: Some(dir.path().to_path_buf()),
            ..EngineConfig::default()
        };
        let first = Engine::new(cfg.clone()).unwrap();
        let t1 = first.full_table(params(2, 2, 0)).unwrap();
        assert!(first.eliminations() > 0);
        drop(first);
        let second = Engine::new(cfg).unwrap();
        let t2 = second.full_table(params(2, 2, 0)).unwrap();
        assert_eq!(second.eliminations(), 0);
        assert_eq!(t1, t2);
    }
}
