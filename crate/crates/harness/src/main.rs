use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cubeconc::capacity::{self, Cap};
use cubeconc::hamming::tail_bound;
use cubeconc::report::Check;
use cubeconc::set::{concentration_alpha, concentration_alpha_lower_bound};
use cubeconc::CubePoint;
use cubeconc_harness::spec::{self, SetSelect, SourceArgs, SweepSpec, YSelect};
use cubeconc_harness::sweep::{run_and_write, run_on, COLUMNS};
use cubeconc_harness::{mc_estimate_tail, Status};

/// Exact and Monte Carlo concentration checks for distributions on the
/// Boolean cube.
#[derive(Parser)]
#[command(name = "cubeconc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a distribution JSON file.
    Gen {
        #[command(flatten)]
        source: SourceFlags,
        /// Output path (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a single check at one (y, t).
    Eval {
        #[command(flatten)]
        source: SourceFlags,
        #[arg(long)]
        check: Check,
        /// Bit string (x_1 first).
        #[arg(long)]
        y: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        /// Deviation level for `tail`.
        #[arg(long)]
        c: Option<f64>,
        /// Enlargement radius for `alpha`.
        #[arg(long)]
        eps: Option<u32>,
        /// Set file for `set` and `talagrand`.
        #[arg(long)]
        set: Option<PathBuf>,
        /// Measure distances from the complement of y.
        #[arg(long)]
        complement_y: bool,
    },
    /// Run a grid of checks and write a CSV report.
    Sweep(SweepFlags),
    /// Concentration function of a small cube.
    Alpha {
        #[command(flatten)]
        source: SourceFlags,
        /// Radii `a:b` or a comma list (default 0..=n).
        #[arg(long)]
        eps: Option<String>,
    },
    /// Monte Carlo estimate of a deviation probability.
    Mc {
        #[command(flatten)]
        source: SourceFlags,
        #[arg(long)]
        y: String,
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        /// Sampling seed (defaults to --seed).
        #[arg(long)]
        sample_seed: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        delta: f64,
        #[arg(long)]
        complement_y: bool,
    },
}

#[derive(Args, Clone)]
struct SourceFlags {
    /// Distribution JSON file.
    #[arg(long)]
    dist: Option<PathBuf>,
    /// Generator: dense, product, markov or delta_mix.
    #[arg(long)]
    kind: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mass parameter of `delta_mix`.
    #[arg(long)]
    mix_eps: Option<f64>,
    /// Common marginal of a `product` (random when absent).
    #[arg(long)]
    p0: Option<f64>,
    /// Law of the first coordinate of a `markov` chain.
    #[arg(long)]
    initial_p0: Option<f64>,
}

impl SourceFlags {
    fn args(&self) -> SourceArgs {
        SourceArgs {
            dist: self.dist.clone(),
            kind: self.kind.clone(),
            n: self.n,
            seed: self.seed,
            eps: self.mix_eps,
            p0: self.p0,
            initial_p0: self.initial_p0,
        }
    }
}

#[derive(Args)]
struct SweepFlags {
    /// JSON sweep spec; replaces the other flags.
    #[arg(long, conflicts_with_all = ["dist", "kind", "t", "checks"])]
    spec: Option<PathBuf>,
    #[command(flatten)]
    source: SourceFlags,
    /// Bit strings, `all` or `sample:K`.
    #[arg(long, default_value = "all")]
    y: String,
    #[arg(long)]
    complement_y: bool,
    /// `a:b:step` (inclusive) or a comma list.
    #[arg(long)]
    t: Option<String>,
    /// Comma list of checks, or `all`.
    #[arg(long)]
    checks: Option<String>,
    /// Deviation levels for `tail`.
    #[arg(long)]
    c: Option<String>,
    /// Radii for `alpha`.
    #[arg(long)]
    eps: Option<String>,
    /// `random:K` or a set JSON file.
    #[arg(long, default_value = "random:4")]
    sets: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl SweepFlags {
    fn spec(&self) -> Result<SweepSpec> {
        if let Some(path) = &self.spec {
            let mut spec = SweepSpec::from_json_file(path)?;
            if self.out.is_some() {
                spec.out = self.out.clone();
            }
            return Ok(spec);
        }
        let t = self
            .t
            .as_deref()
            .context("--t is required without --spec")?;
        let checks = self
            .checks
            .as_deref()
            .context("--checks is required without --spec")?;
        Ok(SweepSpec {
            source: self.source.args().source()?,
            y: YSelect::parse(&self.y)?,
            complement_y: self.complement_y,
            t: spec::parse_grid(t)?,
            checks: spec::parse_checks(checks)?,
            seed: self.source.seed,
            c: self
                .c
                .as_deref()
                .map(spec::parse_grid)
                .transpose()?
                .unwrap_or_default(),
            eps: self.eps.as_deref().map(spec::parse_radii).transpose()?,
            sets: SetSelect::parse(&self.sets)?,
            out: self.out.clone(),
        })
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn failed(fail: bool) -> ExitCode {
    if fail {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen { source, out } => {
            if source.dist.is_some() {
                bail!("gen writes generator output; use --kind");
            }
            let mu = source.args().source()?.load()?;
            let text = mu.to_json_string();
            match out {
                Some(path) => std::fs::write(&path, text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval {
            source,
            check,
            y,
            t,
            c,
            eps,
            set,
            complement_y,
        } => {
            let src = source.args().source()?;
            let mu = src.load()?;
            let needs_t = !matches!(check, Check::Tail | Check::Alpha);
            let spec = SweepSpec {
                source: src,
                y: YSelect::parse(y.as_deref().unwrap_or("all"))?,
                complement_y,
                t: match (t, needs_t) {
                    (Some(t), _) => spec::parse_grid(&t.to_string())?,
                    (None, false) => vec![1.0],
                    (None, true) => bail!("--t is required for {check}"),
                },
                checks: vec![check],
                seed: source.seed,
                c: c.into_iter().collect(),
                eps: eps.map(|e| vec![e]),
                sets: match set {
                    Some(path) => SetSelect::File(path),
                    None => SetSelect::Random(1),
                },
                out: None,
            };
            if matches!(
                check,
                Check::Inductive | Check::SmallVariance | Check::PositiveCorrelation | Check::Tail
            ) && y.is_none()
            {
                bail!("--y is required for {check}");
            }
            let outcome = run_on(&mu, &spec)?;
            let stdout = std::io::stdout();
            let mut out = stdout.lock();
            for row in &outcome.rows {
                let fields = row_fields(row);
                for (name, value) in COLUMNS.iter().zip(fields) {
                    if !value.is_empty() {
                        writeln!(out, "{name}: {value}")?;
                    }
                }
                writeln!(out)?;
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            Ok(failed(outcome.failures() > 0))
        }
        Command::Sweep(flags) => {
            let spec = flags.spec()?;
            let outcome = run_and_write(&spec, std::io::stdout().lock())?;
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            let count = |s: Status| outcome.rows.iter().filter(|r| r.status == s).count();
            eprintln!(
                "{} rows: {} ok, {} FAIL, {} not-applicable, {} expected-nonconcentration, {} hypothesis-violated, {} info",
                outcome.rows.len(),
                count(Status::Ok),
                count(Status::Fail),
                count(Status::NotApplicable),
                count(Status::ExpectedNonconcentration),
                count(Status::HypothesisViolated),
                count(Status::Info),
            );
            Ok(failed(outcome.failures() > 0))
        }
        Command::Alpha { source, eps } => {
            let mu = source.args().source()?.load()?;
            let n = mu.n();
            let radii = match eps {
                Some(text) => spec::parse_radii(&text)?,
                None => (0..=n as u32).collect(),
            };
            let exact = n <= capacity::max_n(Cap::ExactAlpha);
            for e in radii {
                if exact {
                    println!("eps={e} alpha={:e} exact", concentration_alpha(&mu, e)?);
                } else {
                    let lb = concentration_alpha_lower_bound(&mu, e)?;
                    println!(
                        "eps={e} alpha>={:e} lower-bound witness_size={} witness_mass={:e}",
                        lb.value,
                        lb.witness.len(),
                        lb.witness_mass
                    );
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc {
            source,
            y,
            c,
            samples,
            sample_seed,
            delta,
            complement_y,
        } => {
            let mu = source.args().source()?.load()?;
            let mut y: CubePoint = y.parse()?;
            if complement_y {
                y = y.complement();
            }
            let est = mc_estimate_tail(
                &mu,
                &y,
                c,
                samples,
                sample_seed.unwrap_or(source.seed),
                delta,
            )?;
            println!("samples: {}", est.samples);
            println!("mean: {:e}", est.mean);
            println!("estimate: {:e}", est.estimate);
            println!("radius: {:e}", est.radius);
            println!("delta: {}", est.delta);
            if mu.n() <= capacity::max_n(Cap::Dense) {
                let exact = tail_bound(&mu, &y, c)?.exact_tail;
                println!("exact: {exact:e}");
                println!("covered: {}", est.covers(exact));
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn row_fields(row: &cubeconc_harness::Row) -> Vec<String> {
    let mut buf = Vec::new();
    let outcome = cubeconc_harness::SweepOutcome {
        rows: vec![row.clone()],
        warnings: Vec::new(),
    };
    outcome.write_csv(&mut buf, "").expect("in-memory write");
    let text = String::from_utf8(buf).expect("utf-8 csv");
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .next()
        .expect("one row")
        .expect("valid csv")
        .iter()
        .map(str::to_string)
        .collect()
}
