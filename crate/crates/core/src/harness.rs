//! Verification reports and the self-test suite.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::betti::{Engine, EngineConfig, EntryStatus};
use crate::bounds::{self, predictions, Source, VeroneseParams};
use crate::error::{Error, Result};
use crate::koszul::{orbit_reduce, standard_sign, BlockKey, KoszulContext};
use crate::linalg::{DenseMatrix, PrimeField};
use crate::maps::{self, boundary, HomologyBasis, KoszulClass};
use crate::polyspace::MultiDegree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Consistent,
    Violation,
    OutOfApplicability,
    Skipped,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Expectation {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictionCheck {
    pub source: Source,
    pub expected: Expectation,
    pub applicable: bool,
    pub verdict: Verdict,
}

/// What is needed to recompute a row by hand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowProvenance {
    pub primes: Vec<u32>,
    /// Representative blocks of the two differentials touching the entry.
    pub blocks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub p: i64,
    pub q: i64,
    pub computed: EntryStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<u64>,
    pub predictions: Vec<PredictionCheck>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub provenance: Option<RowProvenance>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SourceSummary {
    pub consistent: usize,
    pub violation: usize,
    pub out_of_applicability: usize,
    pub skipped: usize,
    /// Every row in scope is consistent and none was skipped.
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub params: VeroneseParams,
    pub field: String,
    pub strands: Vec<i64>,
    pub rows: Vec<ReportRow>,
    pub summary: BTreeMap<Source, SourceSummary>,
}

impl VerificationReport {
    pub fn violations(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.verdict == Verdict::Violation)
    }

    pub fn row(&self, p: i64, q: i64) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.p == p && r.q == q)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("verification of {} over {}\n", self.params, self.field);
        for r in &self.rows {
            let dim = r.dim.map_or("?".to_string(), |d| d.to_string());
            let preds: Vec<String> = r
                .predictions
                .iter()
                .map(|c| format!("{}:{:?}", c.source.label(), c.verdict))
                .collect();
            out.push_str(&format!(
                "  K_{{{},{}}} = {dim:<8} {:<20} {}\n",
                r.p,
                r.q,
                format!("{:?}", r.verdict),
                preds.join(" ")
            ));
        }
        for (source, s) in &self.summary {
            out.push_str(&format!(
                "{:<16} consistent {} violation {} n/a {} skipped {}{}\n",
                source.label(),
                s.consistent,
                s.violation,
                s.out_of_applicability,
                s.skipped,
                if s.verified { "  VERIFIED" } else { "" }
            ));
        }
        out
    }
}

/// Computes every `K_{p,q}` for `q` in `strands` and `0 <= p <= h^0(O(d))`,
/// and compares each with every range that speaks about it.
pub fn verify(engine: &Engine, params: VeroneseParams, strands: &[i64]) -> Result<VerificationReport> {
    let ctx = engine.context(params)?;
    let top = ctx.v_dim() as i64;
    let mut rows = Vec::new();
    let mut summary: BTreeMap<Source, SourceSummary> = BTreeMap::new();
    for &q in strands {
        let preds = predictions(&params, q)?;
        for p in 0..=top {
            let computed = match engine.kpq_dim(params, p, q) {
                Ok(d) => EntryStatus::from_dim(d),
                Err(Error::ResourceLimit(msg)) => EntryStatus::Skipped(msg),
                Err(e) => return Err(e),
            };
            let mut checks = Vec::new();
            for pred in &preds {
                let Some(expect_nonzero) = pred.expects_nonzero(p) else {
                    continue;
                };
                let verdict = match (&computed, pred.applicable) {
                    (EntryStatus::Skipped(_), _) => Verdict::Skipped,
                    (_, false) => Verdict::OutOfApplicability,
                    (status, true) => {
                        let nonzero = matches!(status, EntryStatus::Nonzero(_));
                        if nonzero == expect_nonzero {
                            Verdict::Consistent
                        } else {
                            Verdict::Violation
                        }
                    }
                };
                let entry = summary.entry(pred.source).or_default();
                match verdict {
                    Verdict::Consistent => entry.consistent += 1,
                    Verdict::Violation => entry.violation += 1,
                    Verdict::OutOfApplicability => entry.out_of_applicability += 1,
                    Verdict::Skipped => entry.skipped += 1,
                }
                checks.push(PredictionCheck {
                    source: pred.source,
                    expected: if expect_nonzero { Expectation::Nonzero } else { Expectation::Zero },
                    applicable: pred.applicable,
                    verdict,
                });
            }
            let verdict = row_verdict(&computed, &checks);
            let provenance = if verdict == Verdict::Violation {
                Some(row_provenance(engine, &ctx, p, q)?)
            } else {
                None
            };
            rows.push(ReportRow {
                p,
                q,
                dim: computed.dim(),
                computed,
                predictions: checks,
                verdict,
                provenance,
            });
        }
    }
    for s in summary.values_mut() {
        s.verified = s.consistent > 0 && s.violation == 0 && s.skipped == 0 && s.out_of_applicability == 0;
    }
    Ok(VerificationReport {
        params,
        field: engine.prime().to_string(),
        strands: strands.to_vec(),
        rows,
        summary,
    })
}

fn row_verdict(computed: &EntryStatus, checks: &[PredictionCheck]) -> Verdict {
    if matches!(computed, EntryStatus::Skipped(_)) {
        Verdict::Skipped
    } else if checks.iter().any(|c| c.verdict == Verdict::Violation) {
        Verdict::Violation
    } else if checks.iter().any(|c| c.verdict == Verdict::Consistent) {
        Verdict::Consistent
    } else {
        Verdict::OutOfApplicability
    }
}

fn row_provenance(engine: &Engine, ctx: &KoszulContext, p: i64, q: i64) -> Result<RowProvenance> {
    let mut blocks = Vec::new();
    for (pp, qq) in [(p, q), (p + 1, q - 1)] {
        let mdegs: Vec<MultiDegree> = ctx.block_multidegrees(pp, qq)?.into_iter().map(|b| b.0).collect();
        for (w, _) in orbit_reduce(&mdegs) {
            blocks.push(format!("d_({pp},{qq})@{w}"));
        }
    }
    Ok(RowProvenance {
        primes: vec![engine.prime().modulus()],
        blocks,
    })
}

#[derive(Clone, Debug, Default)]
pub struct SelftestOptions {
    /// Replace the alternating deletion sign by `+1` everywhere.
    pub corrupt_signs: bool,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<CheckResult>,
    pub passed: bool,
}

impl SelftestReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!(
                "[{}] {}: {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            ));
        }
        out.push_str(if self.passed { "selftest passed\n" } else { "selftest FAILED\n" });
        out
    }
}

fn params(n: u32, d: u32) -> VeroneseParams {
    VeroneseParams::new(n, d).expect("valid parameters")
}

/// Runs the invariant suite at small pinned parameters.
pub fn selftest(options: &SelftestOptions) -> SelftestReport {
    type Check = (&'static str, Box<dyn Fn(&SelftestOptions) -> Result<(bool, String)>>);
    let checks: Vec<Check> = vec![
        ("differential squares to zero", Box::new(check_d_squared)),
        ("blocks agree with the dense differential", Box::new(|_: &SelftestOptions| check_block_vs_dense())),
        ("two primes agree", Box::new(|_: &SelftestOptions| check_dual_prime())),
        ("binomial identities", Box::new(|_: &SelftestOptions| check_pascal())),
        ("duality", Box::new(|_: &SelftestOptions| check_duality())),
        ("evaluation and projection maps", Box::new(check_maps)),
        ("cache round trip", Box::new(|_: &SelftestOptions| check_cache())),
    ];
    let mut results = Vec::new();
    for (name, check) in checks {
        let (passed, detail) = match check(options) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        results.push(CheckResult {
            name: name.to_string(),
            passed,
            detail,
        });
    }
    SelftestReport {
        passed: results.iter().all(|c| c.passed),
        checks: results,
    }
}

fn check_d_squared(options: &SelftestOptions) -> Result<(bool, String)> {
    let sign: fn(usize) -> i8 = if options.corrupt_signs { |_| 1 } else { standard_sign };
    let mut blocks = 0;
    for (n, d) in [(1, 3), (2, 2)] {
        let ctx = KoszulContext::new(params(n, d))?;
        for p in 2..=ctx.v_dim() as i64 {
            for q in 0..=2 {
                for (w, _) in ctx.block_multidegrees(p, q)? {
                    let key = BlockKey {
                        params: ctx.params,
                        p,
                        q,
                        mdeg: w,
                    };
                    blocks += 1;
                    if !ctx.square_vanishes(&key, sign) {
                        return Ok((false, format!("d^2 != 0 on {} d_({p},{q}) block {}", ctx.params, key.mdeg)));
                    }
                }
            }
        }
    }
    Ok((true, format!("{blocks} blocks")))
}

/// The whole differential as one dense matrix over `GF(p)`, indexed through
/// the global bases of source and target.
fn dense_differential(ctx: &KoszulContext, p: i64, q: i64, f: PrimeField) -> Result<DenseMatrix> {
    let src = ctx.space_basis(p, q)?;
    let tgt = ctx.space_basis(p - 1, q + 1)?;
    let index: std::collections::HashMap<_, usize> = tgt
        .groups
        .iter()
        .flat_map(|(_, g)| g.iter())
        .enumerate()
        .map(|(i, e)| (e.clone(), i))
        .collect();
    let mut m = DenseMatrix::zeros(tgt.dim(), src.dim());
    let mut col = 0;
    for (_, group) in &src.groups {
        for (s, u) in group {
            for j in 0..s.degree() {
                let v = ctx.v().get(s.indices()[j] as usize);
                let prod = crate::polyspace::multiply(v, u)?;
                let r = index[&(s.without(j), prod)];
                let x = f.add(m.get(r, col), f.sign(standard_sign(j)));
                m.set(r, col, x);
            }
            col += 1;
        }
    }
    Ok(m)
}

fn check_block_vs_dense() -> Result<(bool, String)> {
    let engine = Engine::new(EngineConfig::default())?;
    let f = engine.prime();
    let mut count = 0;
    for (n, d) in [(1, 2), (1, 3), (2, 2)] {
        let ctx = KoszulContext::new(params(n, d))?;
        for p in 1..=ctx.v_dim() as i64 {
            for q in 0..=2 {
                let dense = dense_differential(&ctx, p, q, f)?.rank(f) as u64;
                let blocks = engine.differential_rank(ctx.params, p, q)?;
                count += 1;
                if dense != blocks {
                    return Ok((false, format!("{} d_({p},{q}): dense {dense}, blocks {blocks}", ctx.params)));
                }
            }
        }
    }
    Ok((true, format!("{count} differentials")))
}

fn check_dual_prime() -> Result<(bool, String)> {
    let a = Engine::new(EngineConfig::with_seed(0))?;
    let b = Engine::new(EngineConfig::with_seed(1))?;
    for (n, d) in [(1, 4), (2, 2), (2, 3)] {
        let ta = a.full_table(params(n, d))?;
        let tb = b.full_table(params(n, d))?;
        if ta.entries != tb.entries {
            return Ok((false, format!("tables for {} differ between {} and {}", params(n, d), a.prime(), b.prime())));
        }
    }
    Ok((true, format!("{} and {}", a.prime(), b.prime())))
}

fn check_pascal() -> Result<(bool, String)> {
    for n in 1..=6i64 {
        for d in 2..=8i64 {
            let vp = VeroneseParams::new(n as u32, d as u32)?;
            let s = bounds::projection_codim(&vp);
            if s != bounds::h0(n, d)? - bounds::h0(n, d - 1)? {
                return Ok((false, format!("s != h0 difference at n={n} d={d}")));
            }
            if n >= 3 && bounds::main_thm_bound(&vp)? != bounds::h0(n, d - 2)? + s {
                return Ok((false, format!("main bound != green + s at n={n} d={d}")));
            }
        }
    }
    Ok((true, "n <= 6, d <= 8".into()))
}

fn check_duality() -> Result<(bool, String)> {
    let engine = Engine::new(EngineConfig::default())?;
    let mut checked = 0;
    for (n, d) in [(1, 3), (1, 4), (2, 2)] {
        let vp = params(n, d);
        let top = engine.context(vp)?.v_dim() as i64;
        for q in 0..=n as i64 + 1 {
            for p in 0..=top {
                let c = engine.duality_check(vp, p, q)?;
                checked += 1;
                if !c.equal {
                    return Ok((false, format!("{vp} K_({p},{q}) = {} but dual gives {}", c.lhs, c.rhs)));
                }
            }
        }
    }
    Ok((true, format!("{checked} pairs")))
}

fn check_maps(options: &SelftestOptions) -> Result<(bool, String)> {
    let engine = Engine::new(EngineConfig::default())?;
    let f = engine.prime();
    let ctx = engine.context(params(2, 2))?;
    let pts = maps::sample_points_on_d(&ctx, f, options.seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let h1 = HomologyBasis::new(&ctx, 1, 1, f)?;
    for _ in 0..10 {
        let y = maps::random_chain(&ctx, 3, 0, f, 3, &mut rng)?;
        let b = KoszulClass::new(&ctx, boundary(&ctx, &y))?;
        if !h1.is_boundary(&ctx, &maps::ev_point(&ctx, &b, &pts.points[0])?)? {
            return Ok((false, "evaluation of a boundary is not a boundary".into()));
        }
    }
    for c in maps::cycle_basis(&ctx, 3, 1, f)? {
        if !maps::projection_factor_check(&ctx, &c, &pts, 1)?.in_subspace_mod_boundary {
            return Ok((false, "projection factorization failed".into()));
        }
    }
    Ok((true, format!("{} points on D, certificate {}", pts.s(), pts.certificate)))
}

fn check_cache() -> Result<(bool, String)> {
    let dir: PathBuf = std::env::temp_dir().join(format!(
        "vsl-selftest-{}-{}",
        std::process::id(),
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_nanos())
    ));
    let cfg = EngineConfig {
        cache_dir: Some(dir.clone()),
        ..EngineConfig::default()
    };
    let result = (|| {
        let first = Engine::new(cfg.clone())?;
        let t1 = first.full_table(params(2, 2))?;
        let work = first.eliminations();
        drop(first);
        let second = Engine::new(cfg.clone())?;
        let t2 = second.full_table(params(2, 2))?;
        let again = second.eliminations();
        Ok::<_, Error>((
            t1 == t2 && again == 0 && work > 0,
            format!("{work} eliminations, then {again}"),
        ))
    })();
    let _ = std::fs::remove_dir_all(&dir);
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plane_cubic_report_is_consistent() {
        let e = Engine::new(EngineConfig::default()).unwrap();
        let r = verify(&e, params(2, 3), &[1, 2]).unwrap();
        assert_eq!(r.violations().count(), 0);
        let el = &r.summary[&Source::ElConj];
        assert!(el.verified, "{el:?}");
        assert_eq!(r.row(7, 2).unwrap().dim, Some(1));
        assert_eq!(r.row(7, 2).unwrap().verdict, Verdict::Consistent);
    }

    #[test]
    fn veronese_surface_rows_out_of_applicability() {
        let e = Engine::new(EngineConfig::default()).unwrap();
        let r = verify(&e, params(2, 2), &[1]).unwrap();
        assert!(!r.summary.contains_key(&Source::MainThm));
        let el = &r.summary[&Source::ElConj];
        assert!(el.out_of_applicability > 0 && el.consistent == 0);
        assert!(r.rows.iter().all(|row| row.verdict != Verdict::Violation));
        let row = r.row(1, 1).unwrap();
        assert!(row
            .predictions
            .iter()
            .any(|c| c.source == Source::ElConj && c.verdict == Verdict::OutOfApplicability));
    }

    #[test]
    fn report_json_independent_of_threads() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let e = Engine::new(EngineConfig::default()).unwrap();
                verify(&e, params(2, 3), &[1, 2]).unwrap().to_json().unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn selftest_passes_and_detects_corruption() {
        let ok = selftest(&SelftestOptions::default());
        assert!(ok.passed, "{}", ok.to_text());
        let bad = selftest(&SelftestOptions {
            corrupt_signs: true,
            ..Default::default()
        });
        assert!(!bad.passed);
        assert!(!bad.checks[0].passed);
        assert!(bad.checks[0].detail.contains("d^2"));
    }
}
