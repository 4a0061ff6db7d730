use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robloc::distmodel::{solve_param_for_kurtosis, DistributionSpec, Family};
use robloc::estimators::SortedSample;
use robloc::orderliness::QuantileTable;
use robloc_bench::breakdown::{self, BreakdownConfig, DEFAULT_MAGNITUDE};
use robloc_bench::check::{self, Check, CheckConfig, Model};
use robloc_bench::config::{parse_number, split_list, Config};
use robloc_bench::error::{config, Result};
use robloc_bench::output::{self, num};
use robloc_bench::roster::EstimatorSpec;
use robloc_bench::sweep::{self, SeStudyConfig, SweepConfig};
use robloc_bench::tables;
use robloc_bench::variance::{self, VarianceConfig};

#[derive(Parser)]
#[command(name = "robloc", version, about = "Robust location estimators: benchmarks, bounds and orderliness checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply one estimator to a data file (one real per line).
    Estimate {
        /// Data file; `-` reads stdin.
        data: PathBuf,
        /// Estimator spec, e.g. `tm:eps=1/8` or `mhlm:k=2`.
        #[arg(short, long)]
        estimator: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Standardized-bias sweep over kurtosis-matched families.
    Sweep(SweepArgs),
    /// Replicated pseudo-sample SE study.
    SeStudy(SeArgs),
    /// Var(mHLM_k) versus Var(MoM_k) on shared samples.
    VarianceCompare(VarianceArgs),
    /// Replace the top fraction of a sample with a huge value.
    Breakdown(BreakdownArgs),
    /// Tabulate the QA bounds or the concentration bound.
    Bounds(BoundsArgs),
    /// Orderliness, weighted-inequality and U-orderliness verdicts.
    Orderliness(OrderArgs),
}

#[derive(Args)]
struct Common {
    /// `key = value` config file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path (default stdout).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Comma-separated families.
    #[arg(long)]
    families: Option<String>,
    /// Comma-separated estimator specs or `standard`.
    #[arg(long)]
    roster: Option<String>,
    /// Full-size runs (n = 3.686M sweep, R = 1000 SE study).
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// quasi or pseudo.
    #[arg(long)]
    mode: Option<String>,
    /// Pseudo replicates behind the se column (0 = bootstrap SE only).
    #[arg(long)]
    se_reps: Option<usize>,
}

#[derive(Args)]
struct SeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, default_value = "gaussian")]
    family: String,
    /// Shape parameter (ignored by shape-free families).
    #[arg(long, conflicts_with = "kurtosis")]
    shape: Option<f64>,
    /// Pick the shape that matches this kurtosis.
    #[arg(long)]
    kurtosis: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

impl FamilyArgs {
    fn spec(&self) -> Result<DistributionSpec> {
        let f: Family = self.family.parse()?;
        Ok(match (self.kurtosis, self.shape) {
            (Some(k), _) => solve_param_for_kurtosis(f, k, self.scale)?,
            (None, Some(a)) => DistributionSpec::new(f, a, self.scale, 0.0)?,
            (None, None) if f.has_shape() => {
                return Err(config(format!("{f} needs --shape or --kurtosis")))
            }
            (None, None) => DistributionSpec::new(f, 1.0, self.scale, 0.0)?,
        })
    }
}

#[derive(Args)]
struct VarianceArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 1024)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BreakdownArgs {
    #[command(flatten)]
    family: FamilyArgs,
    #[arg(short, long)]
    estimator: String,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Comma-separated contamination fractions.
    #[arg(long, default_value = "0,0.05,0.1,0.15,0.2,0.25,0.3,0.35,0.4,0.45,0.5")]
    fractions: String,
    #[arg(long, default_value_t = DEFAULT_MAGNITUDE)]
    magnitude: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BoundsArgs {
    /// qa or concentration.
    #[arg(long, default_value = "qa")]
    kind: String,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Deviation in units of σ/√k (concentration).
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 10)]
    k_max: usize,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OrderArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Tabulated quantiles (`p q` per line) instead of a family.
    #[arg(long)]
    quantiles: Option<PathBuf>,
    /// orderliness, tm, qa_vs_tm, wm, bwm, sqm_vs_bm2 or u.
    #[arg(long, default_value = "orderliness")]
    check: String,
    #[arg(long, default_value_t = 1)]
    nu: u32,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 4096)]
    points: usize,
    #[arg(long)]
    tol: Option<f64>,
    /// Kernel orders for the U check.
    #[arg(long, default_value = "1,2,3,5")]
    k_list: String,
    #[arg(long, default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 1_000_000)]
    budget: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn merged(c: &Common, extra: &[(&str, Option<String>)]) -> Result<Config> {
    let mut cfg = match &c.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    let flags = [
        ("seed", c.seed.map(|v| v.to_string())),
        ("n", c.n.map(|v| v.to_string())),
        ("families", c.families.clone()),
        ("roster", c.roster.clone()),
        ("paper_scale", c.paper_scale.then(|| "true".to_string())),
    ];
    for (k, v) in flags.into_iter().chain(extra.iter().cloned().map(|(k, v)| (k, v))) {
        if let Some(v) = v {
            cfg.set(k, v);
        }
    }
    Ok(cfg)
}

fn numbers(s: &str) -> Result<Vec<f64>> {
    split_list(s).iter().map(|x| parse_number(x).map_err(config)).collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Estimate { data, estimator, seed } => {
            let e = EstimatorSpec::parse(&estimator)?;
            let text = if data.as_os_str() == "-" {
                io::read_to_string(io::stdin())?
            } else {
                std::fs::read_to_string(&data)
                    .map_err(|err| config(format!("cannot read {}: {err}", data.display())))?
            };
            let mut xs = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let t = line.trim();
                if t.is_empty() || t.starts_with('#') {
                    continue;
                }
                xs.push(t.parse::<f64>().map_err(|_| config(format!("line {}: bad number '{t}'", i + 1)))?);
            }
            let s = SortedSample::from_unsorted(xs)?;
            e.check_n(s.len())?;
            let r = e.estimate(&s, seed)?;
            let mut out = io::stdout().lock();
            match r.se {
                Some(se) => writeln!(out, "{}\t{}\tse={}", e.name(), r.value, se)?,
                None => writeln!(out, "{}\t{}", e.name(), r.value)?,
            }
        }
        Cmd::Sweep(a) => {
            let c = merged(&a.common, &[("mode", a.mode), ("se_reps", a.se_reps.map(|v| v.to_string()))])?;
            let cfg = SweepConfig::from_config(&c)?;
            let rows = sweep::run_bias_sweep(&cfg)?;
            let meta = vec![format!("sweep n={} mode={:?} seed={}", cfg.n, cfg.mode, cfg.seed)];
            output::write_results(sink(&a.common.out)?, &meta, &rows)?;
        }
        Cmd::SeStudy(a) => {
            let c = merged(&a.common, &[("reps", a.reps.map(|v| v.to_string()))])?;
            let cfg = SeStudyConfig::from_config(&c)?;
            let rows = sweep::run_se_study(&cfg)?;
            let meta = vec![format!("se-study n={} reps={} seed={}", cfg.n, cfg.reps, cfg.seed)];
            output::write_results(sink(&a.common.out)?, &meta, &rows)?;
        }
        Cmd::VarianceCompare(a) => {
            let cfg = VarianceConfig {
                dist: a.family.spec()?,
                k: a.k,
                n: a.n,
                reps: a.reps,
                budget: a.budget,
                seed: a.seed,
            };
            let rep = variance::run_variance_compare(&cfg)?;
            let meta = vec![format!(
                "var_mhlm={} var_mom={} ratio={}",
                num(Some(rep.var_mhlm)),
                num(Some(rep.var_mom)),
                num(Some(rep.ratio))
            )];
            output::write_table(sink(&a.out)?, &meta, &variance::VARIANCE_COLUMNS, &variance::variance_rows(&cfg, &rep))?;
        }
        Cmd::Breakdown(a) => {
            let cfg = BreakdownConfig {
                estimator: EstimatorSpec::parse(&a.estimator)?,
                dist: a.family.spec()?,
                n: a.n,
                fractions: numbers(&a.fractions)?,
                magnitude: a.magnitude,
                seed: a.seed,
            };
            let rows = breakdown::run_breakdown_probe(&cfg)?;
            let meta = vec![format!(
                "first_break={} threshold={}",
                num(breakdown::first_break(&rows)),
                breakdown::BREAK_THRESHOLD
            )];
            output::write_table(sink(&a.out)?, &meta, &breakdown::BREAKDOWN_COLUMNS, &breakdown::breakdown_rows(&cfg, &rows))?;
        }
        Cmd::Bounds(a) => match a.kind.as_str() {
            "qa" => {
                let rows = tables::qa_bound_rows(a.gamma, a.points)?;
                output::write_table(sink(&a.out)?, &[], &tables::QA_COLUMNS, &rows)?;
            }
            "concentration" => {
                let (interval, rows) = tables::concentration_rows(a.gamma, a.t, a.n, a.k_max)?;
                let meta = vec![match interval {
                    Some((lo, hi)) => format!("monotone_k_interval=[{lo}, {hi}]"),
                    None => "monotone_k_interval=empty".to_string(),
                }];
                output::write_table(sink(&a.out)?, &meta, &tables::CONCENTRATION_COLUMNS, &rows)?;
            }
            other => return Err(config(format!("unknown bound kind '{other}'"))),
        },
        Cmd::Orderliness(a) => {
            let model = match &a.quantiles {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|err| config(format!("cannot read {}: {err}", p.display())))?;
                    Model::Table(QuantileTable::parse(&text)?)
                }
                None => Model::Parametric(a.family.spec()?),
            };
            let grid = check::grid_for(&model, a.gamma, a.points);
            let cfg = CheckConfig {
                model,
                check: a.check.parse::<Check>()?,
                nu: a.nu,
                gamma: a.gamma,
                grid,
                tol: a.tol,
                k_list: numbers(&a.k_list)?,
                n: a.n,
                budget: a.budget,
                seed: a.seed,
            };
            let rep = check::run_check(&cfg)?;
            let (meta, header, rows) = check::report_table(&rep);
            output::write_table(sink(&a.out)?, &meta, &header, &rows)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("robloc: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

