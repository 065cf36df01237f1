use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use vsl_core::betti::{Engine, EngineConfig, ResourceLimits};
use vsl_core::bounds::{self, VeroneseParams};
use vsl_core::cache::{cache_gc, cache_stats, CACHE_DIR_ENV};
use vsl_core::harness::{self, SelftestOptions, Verdict};
use vsl_core::linalg::{PrimeField, PINNED_PRIMES};
use vsl_core::maps::{self, DivisorPoints, HomologyBasis};
use vsl_core::polyspace::PointOverField;

#[derive(Parser, Debug)]
#[command(name = "vsl", version, about = "Koszul cohomology of Veronese embeddings")]
struct Cli {
    #[command(flatten)]
    run: RunFlags,
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand. Each one can also be set in the config file.
#[derive(Args, Debug, Default)]
struct RunFlags {
    /// TOML file with default values for the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// `auto` (pick from the pinned list by seed) or an explicit odd prime below 2^31.
    #[arg(long, global = true)]
    prime: Option<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for block eliminations (0 = all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Block-rank cache directory.
    #[arg(long, global = true, env = CACHE_DIR_ENV)]
    cache: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Re-check every block with a second prime and, within the dense limit, over Q.
    #[arg(long, global = true)]
    certify: bool,
    #[arg(long, global = true)]
    dense_limit: Option<usize>,
    #[arg(long, global = true)]
    max_block_dim: Option<u64>,
    #[arg(long, global = true)]
    max_total_nonzeros: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Ascii,
    Text,
}

/// Config file contents; every key mirrors a flag.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    prime: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<Format>,
    certify: Option<bool>,
    dense_limit: Option<usize>,
    max_block_dim: Option<u64>,
    max_total_nonzeros: Option<u64>,
}

#[derive(Args, Debug, Clone, Copy)]
struct Target {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    d: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    b: i64,
}

impl Target {
    fn params(&self) -> Result<VeroneseParams> {
        Ok(VeroneseParams::with_twist(self.n, self.d, self.b)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form ranges for every strand.
    Bounds {
        #[command(flatten)]
        target: Target,
    },
    /// Compute a Betti table.
    Betti {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        p_min: Option<i64>,
        #[arg(long)]
        p_max: Option<i64>,
        #[arg(long)]
        q_min: Option<i64>,
        #[arg(long)]
        q_max: Option<i64>,
    },
    /// Compare computed strands with every predicted range.
    Verify {
        #[command(flatten)]
        target: Target,
        /// Strands to compute (default 1..=n).
        #[arg(long, value_delimiter = ',')]
        strands: Vec<i64>,
    },
    /// Evaluation maps and the proof-chain checks.
    Maps {
        #[command(subcommand)]
        command: MapsCommand,
    },
    /// Run the invariant suite; exit code 0 iff everything passes.
    Selftest {
        /// Flip the deletion sign to check that the suite notices.
        #[arg(long)]
        corrupt_signs: bool,
    },
    /// Inspect or compact the block-rank cache.
    Cache {
        #[command(subcommand)]
        command: CacheCommand,
    },
}

#[derive(Subcommand, Debug)]
enum MapsCommand {
    /// Evaluation along x0 = 0 on the linear strand at one p.
    Ev {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        p: i64,
        /// `random`, or a JSON file holding a list of coordinate lists.
        #[arg(long, default_value = "random")]
        points: String,
    },
    /// Implication and vanishing checks relating the linear strand to the twisted one.
    Chain {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u32,
        /// Single p; all p from 0 to h^0(O(d)) when omitted.
        #[arg(long)]
        p: Option<i64>,
    },
}

#[derive(Subcommand, Debug)]
enum CacheCommand {
    Stats,
    /// Drop duplicate records and records whose prime is not kept.
    Gc {
        /// Primes to keep (default: the pinned list).
        #[arg(long, value_delimiter = ',')]
        keep: Vec<u32>,
    },
}

/// Flags after merging the config file (CLI wins) and defaults.
struct Settings {
    prime: PrimeField,
    seed: u64,
    threads: usize,
    cache: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<Format>,
    certify: bool,
    dense_limit: usize,
    limits: ResourceLimits,
}

impl Settings {
    fn resolve(flags: RunFlags) -> Result<Self> {
        let file: FileConfig = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
            }
            None => FileConfig::default(),
        };
        let seed = flags.seed.or(file.seed).unwrap_or(0);
        let prime = match flags.prime.or(file.prime).as_deref() {
            None | Some("auto") => PrimeField::pinned((seed % PINNED_PRIMES.len() as u64) as usize),
            Some(p) => {
                let p: u32 = p.parse().with_context(|| format!("--prime expects `auto` or an integer, got {p}"))?;
                if p < 3 || p.is_multiple_of(2) {
                    bail!("--prime must be an odd prime, got {p}");
                }
                PrimeField::new(p)?
            }
        };
        let defaults = ResourceLimits::default();
        Ok(Self {
            prime,
            seed,
            threads: flags.threads.or(file.threads).unwrap_or(0),
            cache: flags.cache.or(file.cache),
            out: flags.out.or(file.out),
            format: flags.format.or(file.format),
            certify: flags.certify || file.certify.unwrap_or(false),
            dense_limit: flags
                .dense_limit
                .or(file.dense_limit)
                .unwrap_or(vsl_core::linalg::DEFAULT_DENSE_LIMIT),
            limits: ResourceLimits {
                max_block_dim: flags.max_block_dim.or(file.max_block_dim).unwrap_or(defaults.max_block_dim),
                max_total_nonzeros: flags
                    .max_total_nonzeros
                    .or(file.max_total_nonzeros)
                    .unwrap_or(defaults.max_total_nonzeros),
            },
        })
    }

    fn engine(&self) -> Result<Engine> {
        Ok(Engine::new(EngineConfig {
            prime: self.prime,
            limits: self.limits,
            cache_dir: self.cache.clone(),
            dense_limit: self.dense_limit,
            certify: self.certify,
        })?)
    }

    fn format(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
            None => {
                let mut stdout = std::io::stdout().lock();
                let newline = if text.ends_with('\n') { "" } else { "\n" };
                match write!(stdout, "{text}{newline}").and_then(|()| stdout.flush()) {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    r => r.context("writing to stdout"),
                }
            }
        }
    }

    fn cache_dir(&self) -> Result<&Path> {
        self.cache
            .as_deref()
            .context("no cache directory: pass --cache or set VSL_CACHE_DIR")
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = Settings::resolve(cli.run)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build_global()
        .context("starting worker pool")?;
    match cli.command {
        Command::Bounds { target } => cmd_bounds(&settings, target),
        Command::Betti {
            target,
            p_min,
            p_max,
            q_min,
            q_max,
        } => cmd_betti(&settings, target, (p_min, p_max), (q_min, q_max)),
        Command::Verify { target, strands } => cmd_verify(&settings, target, strands),
        Command::Maps { command } => match command {
            MapsCommand::Ev { n, d, p, points } => cmd_maps_ev(&settings, n, d, p, &points),
            MapsCommand::Chain { n, d, p } => cmd_maps_chain(&settings, n, d, p),
        },
        Command::Selftest { corrupt_signs } => {
            let report = harness::selftest(&SelftestOptions {
                corrupt_signs,
                seed: settings.seed,
            });
            let text = match settings.format(Format::Text) {
                Format::Json => to_json(&report)?,
                _ => report.to_text(),
            };
            settings.emit(&text)?;
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::FAILURE })
        }
        Command::Cache { command } => {
            let dir = settings.cache_dir()?;
            let text = match command {
                CacheCommand::Stats => {
                    let stats = cache_stats(dir)?;
                    match settings.format(Format::Text) {
                        Format::Json => to_json(&stats)?,
                        _ => {
                            let mut s = format!("{} records, {} quarantined\n", stats.records, stats.quarantined);
                            for g in &stats.groups {
                                s.push_str(&format!(
                                    "  n={} d={} b={} prime={}: {}\n",
                                    g.n, g.d, g.b, g.prime, g.records
                                ));
                            }
                            s
                        }
                    }
                }
                CacheCommand::Gc { keep } => {
                    let keep = if keep.is_empty() { PINNED_PRIMES.to_vec() } else { keep };
                    let gc = cache_gc(dir, &keep)?;
                    match settings.format(Format::Text) {
                        Format::Json => to_json(&gc)?,
                        _ => format!(
                            "{} -> {} records ({} for other primes, {} duplicates)\n",
                            gc.before, gc.after, gc.dropped_primes, gc.duplicates
                        ),
                    }
                }
            };
            settings.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct BoundsReport {
    params: VeroneseParams,
    num_sections: String,
    projection_codim: String,
    linear_conj_bound: Option<String>,
    main_thm_bound: Option<String>,
    qn_thm_bound: Option<String>,
    gb_bound: Option<i64>,
    predictions: Vec<bounds::RangePrediction>,
}

fn cmd_bounds(settings: &Settings, target: Target) -> Result<ExitCode> {
    let params = target.params()?;
    let mut predictions = Vec::new();
    for q in 0..=params.n as i64 + 1 {
        predictions.extend(bounds::predictions(&params, q)?);
    }
    let report = BoundsReport {
        params,
        num_sections: params.num_sections().to_string(),
        projection_codim: bounds::projection_codim(&params).to_string(),
        linear_conj_bound: bounds::linear_conj_bound(&params).ok().map(|b| b.to_string()),
        main_thm_bound: bounds::main_thm_bound(&params).ok().map(|b| b.to_string()),
        qn_thm_bound: bounds::qn_thm_bound(&params).ok().map(|b| b.to_string()),
        gb_bound: (params.n == 2).then(|| bounds::gb_bound(params.d as i64)).transpose()?,
        predictions,
    };
    let text = match settings.format(Format::Text) {
        Format::Json => to_json(&report)?,
        _ => {
            let mut s = format!("{params}: h0(O(d)) = {}\n", report.num_sections);
            s.push_str(&format!("points on x0 = 0: {}\n", report.projection_codim));
            for (name, v) in [
                ("linear conjecture bound", &report.linear_conj_bound),
                ("linear strand theorem bound", &report.main_thm_bound),
                ("last strand theorem bound", &report.qn_thm_bound),
            ] {
                if let Some(v) = v {
                    s.push_str(&format!("{name}: {v}\n"));
                }
            }
            for p in &report.predictions {
                s.push_str(&format!("{p}\n"));
            }
            s
        }
    };
    settings.emit(&text)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_betti(
    settings: &Settings,
    target: Target,
    p: (Option<i64>, Option<i64>),
    q: (Option<i64>, Option<i64>),
) -> Result<ExitCode> {
    let params = target.params()?;
    let engine = settings.engine()?;
    let top = engine.context(params)?.v_dim() as i64;
    let p_range = (p.0.unwrap_or(0), p.1.unwrap_or(top));
    let q_range = (q.0.unwrap_or(0), q.1.unwrap_or(params.n as i64 + 1));
    if p_range.0 > p_range.1 || q_range.0 > q_range.1 {
        bail!("empty index range p {p_range:?}, q {q_range:?}");
    }
    let table = engine.betti_table(params, p_range, q_range)?;
    log::info!("{} block eliminations", engine.eliminations());
    let text = match settings.format(Format::Ascii) {
        Format::Json => table.to_json()?,
        Format::Csv => table.to_csv(),
        Format::Ascii | Format::Text => table.to_ascii(),
    };
    settings.emit(&text)?;
    Ok(if table.provenance.disagreements.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn cmd_verify(settings: &Settings, target: Target, strands: Vec<i64>) -> Result<ExitCode> {
    let params = target.params()?;
    let engine = settings.engine()?;
    let strands = if strands.is_empty() {
        (1..=params.n as i64).collect()
    } else {
        strands
    };
    let report = harness::verify(&engine, params, &strands)?;
    let text = match settings.format(Format::Text) {
        Format::Json => report.to_json()?,
        _ => report.to_text(),
    };
    settings.emit(&text)?;
    Ok(if report.violations().next().is_some() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

#[derive(Serialize)]
struct EvReport {
    params: VeroneseParams,
    field: String,
    p: i64,
    s: usize,
    points: DivisorPoints,
    source_dim: usize,
    target_dim: usize,
    rank: usize,
    /// Scalar relating the induced matrix to the composite of point evaluations.
    composite_scalar: Option<u32>,
    factorization: Vec<bool>,
}

fn read_points(path: &Path, f: PrimeField) -> Result<Vec<PointOverField>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let raw: Vec<Vec<u32>> = serde_json::from_str(&text).context("points file must be a JSON list of coordinate lists")?;
    raw.into_iter()
        .map(|c| Ok(PointOverField::new(c, f)?))
        .collect()
}

fn cmd_maps_ev(settings: &Settings, n: u32, d: u32, p: i64, points: &str) -> Result<ExitCode> {
    let engine = settings.engine()?;
    let f = engine.prime();
    let ctx = engine.context(VeroneseParams::new(n, d)?)?;
    let pts = match points {
        "random" => maps::sample_points_on_d(&ctx, f, settings.seed)?,
        path => DivisorPoints::new(&ctx, read_points(Path::new(path), f)?, f)?,
    };
    let s = pts.s();
    let source = HomologyBasis::new(&ctx, p, 1, f)?;
    let target = HomologyBasis::new(&ctx, p - s as i64, 1, f)?;
    let ev = maps::induced_matrix(&ctx, &source, &target, |c| maps::ev_d(&ctx, c, &pts, 1))?;
    let composite = maps::induced_matrix(&ctx, &source, &target, |c| maps::ev_d_composite(&ctx, c, &pts))?;
    let mut factorization = Vec::new();
    for c in source.classes() {
        factorization.push(maps::projection_factor_check(&ctx, c, &pts, 1)?.in_subspace_mod_boundary);
    }
    let report = EvReport {
        params: ctx.params,
        field: f.to_string(),
        p,
        s,
        source_dim: source.dim(),
        target_dim: target.dim(),
        rank: ev.rank(f),
        composite_scalar: maps::proportionality(&ev, &composite, f),
        factorization,
        points: pts,
    };
    let text = match settings.format(Format::Text) {
        Format::Json => to_json(&report)?,
        _ => format!(
            "{}: ev_D K_({p},1) -> K_({},1), s = {s}\n  dims {} -> {}, rank {}\n  proportional to composite: {}\n  factorization: {}/{} classes\n",
            report.params,
            p - s as i64,
            report.source_dim,
            report.target_dim,
            report.rank,
            report.composite_scalar.map_or("no".to_string(), |l| format!("yes (scalar {l})")),
            report.factorization.iter().filter(|&&b| b).count(),
            report.factorization.len(),
        ),
    };
    settings.emit(&text)?;
    let ok = report.composite_scalar.is_some() && report.factorization.iter().all(|&b| b);
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_maps_chain(settings: &Settings, n: u32, d: u32, p: Option<i64>) -> Result<ExitCode> {
    let engine = settings.engine()?;
    let ps: Vec<i64> = match p {
        Some(p) => vec![p],
        None => (0..=engine.context(VeroneseParams::new(n, d)?)?.v_dim() as i64).collect(),
    };
    let mut reports = Vec::new();
    for p in ps {
        reports.push(maps::theorem_chain_check(&engine, n, d, p)?);
    }
    let text = match settings.format(Format::Text) {
        Format::Json => to_json(&reports)?,
        _ => {
            let mut s = String::new();
            for r in &reports {
                let second = r.second.map_or("-".to_string(), |x| x.to_string());
                s.push_str(&format!(
                    "p={:<3} K_p,1 = {:<8} K_p-s,1(-1) = {:<8} {:?}\n",
                    r.p, r.first, second, r.verdict
                ));
                for note in &r.notes {
                    s.push_str(&format!("       {note}\n"));
                }
            }
            s
        }
    };
    settings.emit(&text)?;
    Ok(if reports.iter().any(|r| r.verdict == Verdict::Violation) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}
