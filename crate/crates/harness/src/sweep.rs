//! Runs a [`SweepSpec`] and produces one report row per `(y, t, check)`.

use std::cmp::Ordering;
use std::fmt;
use std::io::Write;

use anyhow::{Context, Result};
use cubeconc::capacity::{self, Cap};
use cubeconc::hamming::{
    centered_mgf, count_good_y, inductive_bound, mean_hamming, pc_theorem_check,
    small_variance_bound, tail_bound, verdict_string, verdicts,
};
use cubeconc::report::Check;
use cubeconc::set::{
    concentration_alpha, concentration_alpha_lower_bound, lipschitz_set_bound,
    median_concentration_check, talagrand_product_baseline, CubeSet,
};
use cubeconc::{CubeDistribution, CubePoint, Error};

use crate::spec::SweepSpec;

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// An asserted inequality held.
    Ok,
    /// An asserted inequality failed.
    Fail,
    /// The hypotheses of the inequality do not hold; nothing asserted.
    NotApplicable,
    /// Independent-case tail bound exceeded by a dependent distribution.
    ExpectedNonconcentration,
    /// The set bound's first-marginal hypothesis fails; nothing asserted.
    HypothesisViolated,
    /// Reported quantity with no inequality attached.
    Info,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Fail => "FAIL",
            Status::NotApplicable => "not-applicable",
            Status::ExpectedNonconcentration => "expected-nonconcentration",
            Status::HypothesisViolated => "hypothesis-violated",
            Status::Info => "info",
        }
    }

    fn asserted(holds: bool) -> Self {
        if holds {
            Status::Ok
        } else {
            Status::Fail
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub kind: String,
    pub seed: Option<u64>,
    /// Bit string; empty for rows that do not depend on `y`.
    pub y: String,
    pub t: Option<f64>,
    pub c: Option<f64>,
    pub check: Check,
    pub mean: Option<f64>,
    pub mgf: Option<f64>,
    pub bound_inductive: Option<f64>,
    pub bound_smallvar: Option<f64>,
    pub bound_hoeffding: Option<f64>,
    pub slack_inductive: Option<f64>,
    pub slack_smallvar: Option<f64>,
    pub verdicts: Option<String>,
    pub lhs: Option<f64>,
    pub bound: Option<f64>,
    pub mid: Option<f64>,
    pub outer: Option<f64>,
    pub mu_a: Option<f64>,
    pub c_prod: Option<f64>,
    pub pass: Option<bool>,
    pub status: Status,
    pub detail: String,
}

pub const COLUMNS: [&str; 24] = [
    "n",
    "kind",
    "seed",
    "y",
    "t",
    "c",
    "check",
    "mean",
    "mgf",
    "bound_inductive",
    "bound_smallvar",
    "bound_hoeffding",
    "slack_inductive",
    "slack_smallvar",
    "verdicts",
    "lhs",
    "bound",
    "mid",
    "outer",
    "mu_A",
    "c_prod",
    "pass",
    "status",
    "detail",
];

fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

impl Row {
    fn fields(&self) -> Vec<String> {
        vec![
            self.n.to_string(),
            self.kind.clone(),
            self.seed.map(|s| s.to_string()).unwrap_or_default(),
            self.y.clone(),
            num(self.t),
            num(self.c),
            self.check.to_string(),
            num(self.mean),
            num(self.mgf),
            num(self.bound_inductive),
            num(self.bound_smallvar),
            num(self.bound_hoeffding),
            num(self.slack_inductive),
            num(self.slack_smallvar),
            self.verdicts.clone().unwrap_or_default(),
            num(self.lhs),
            num(self.bound),
            num(self.mid),
            num(self.outer),
            num(self.mu_a),
            num(self.c_prod),
            self.pass.map(|p| p.to_string()).unwrap_or_default(),
            self.status.to_string(),
            self.detail.clone(),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub rows: Vec<Row>,
    pub warnings: Vec<String>,
}

impl SweepOutcome {
    pub fn failures(&self) -> usize {
        self.rows
            .iter()
            .filter(|r| r.status == Status::Fail)
            .count()
    }

    /// Writes the `# schema=...` header line and the CSV body.
    pub fn write_csv<W: Write>(&self, mut out: W, generated: &str) -> Result<()> {
        writeln!(
            out,
            "# schema={SCHEMA} rng={} generated={generated}",
            cubeconc::dist::RNG_NAME
        )?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for row in &self.rows {
            w.write_record(row.fields())?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Ctx<'a> {
    mu: &'a CubeDistribution,
    kind: String,
    seed: Option<u64>,
}

impl Ctx<'_> {
    fn row(&self, check: Check, y: Option<&CubePoint>, t: Option<f64>) -> Row {
        Row {
            n: self.mu.n(),
            kind: self.kind.clone(),
            seed: self.seed,
            y: y.map(|p| p.to_string()).unwrap_or_default(),
            t,
            c: None,
            check,
            mean: None,
            mgf: None,
            bound_inductive: None,
            bound_smallvar: None,
            bound_hoeffding: None,
            slack_inductive: None,
            slack_smallvar: None,
            verdicts: None,
            lhs: None,
            bound: None,
            mid: None,
            outer: None,
            mu_a: None,
            c_prod: None,
            pass: None,
            status: Status::Info,
            detail: String::new(),
        }
    }
}

fn named(check: Check) -> impl Fn(Error) -> anyhow::Error {
    move |e| anyhow::Error::new(e).context(format!("check {check}"))
}

/// Loads the distribution and runs every requested check.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepOutcome> {
    let mu = spec.source.load()?;
    run_on(&mu, spec)
}

/// Runs the checks of `spec` against an already loaded distribution.
pub fn run_on(mu: &CubeDistribution, spec: &SweepSpec) -> Result<SweepOutcome> {
    let n = mu.n();
    let ctx = Ctx {
        mu,
        kind: mu.kind().as_str().to_string(),
        seed: spec.source.seed(),
    };
    let needs_y = spec.checks.iter().any(|c| {
        matches!(
            c,
            Check::Inductive
                | Check::SmallVariance
                | Check::PositiveCorrelation
                | Check::Tail
                | Check::Alpha
        )
    });
    let ys: Vec<CubePoint> = if needs_y {
        spec.y
            .resolve(n, spec.seed)?
            .into_iter()
            .map(|y| if spec.complement_y { y.complement() } else { y })
            .collect()
    } else {
        Vec::new()
    };
    let needs_sets = spec
        .checks
        .iter()
        .any(|c| matches!(c, Check::SetLipschitz | Check::Talagrand));
    let sets = if needs_sets {
        spec.sets.resolve(n, spec.seed)?
    } else {
        Vec::new()
    };

    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &check in &spec.checks {
        let err = named(check);
        match check {
            Check::Inductive | Check::SmallVariance | Check::PositiveCorrelation => {
                for y in &ys {
                    for &t in &spec.t {
                        rows.push(mgf_row(&ctx, check, y, t).map_err(&err)?);
                    }
                }
            }
            Check::CountGoodY => {
                for &t in &spec.t {
                    let count = count_good_y(mu, t).map_err(&err)?;
                    let mut row = ctx.row(check, None, Some(t));
                    row.lhs = Some(count.count as f64);
                    row.bound = Some(count.formula as f64);
                    row.detail = format!(
                        "uniform_marginals={} hypotheses={} hypotheses_half_weight={}",
                        count.marginals_uniform,
                        count.hypotheses_hold,
                        count.hypotheses_hold_half_weight
                    );
                    rows.push(row);
                }
            }
            Check::Tail => {
                if spec.c.is_empty() {
                    anyhow::bail!("check tail needs deviation levels (--c)");
                }
                for y in &ys {
                    for &c in &spec.c {
                        let tail = tail_bound(mu, y, c).map_err(&err)?;
                        let mut row = ctx.row(check, Some(y), None);
                        row.c = Some(c);
                        row.mean = Some(tail.mean);
                        row.lhs = Some(tail.exact_tail);
                        row.bound_hoeffding = Some(tail.hoeffding_tail);
                        row.pass = Some(tail.holds());
                        row.status = match (tail.holds(), mu.is_product()) {
                            (_, true) => Status::asserted(tail.holds()),
                            (true, false) => Status::Ok,
                            (false, false) => Status::ExpectedNonconcentration,
                        };
                        if !mu.is_product() {
                            row.detail = "not asserted for dependent distributions".into();
                        }
                        rows.push(row);
                    }
                }
            }
            Check::Alpha => {
                alpha_rows(&ctx, spec, &ys, &mut rows).map_err(|e| e.context("check alpha"))?
            }
            Check::SetLipschitz => {
                for (i, a) in sets.iter().enumerate() {
                    for &t in &spec.t {
                        let b = lipschitz_set_bound(mu, a, t).map_err(&err)?;
                        if !b.c_monotone && i == 0 && t == spec.t[0] {
                            warnings.push(format!(
                                "conditional bounds c_2..c_n are not non-increasing: {:?}",
                                b.c
                            ));
                        }
                        let mut row = ctx.row(check, None, Some(t));
                        row.lhs = Some(b.lhs);
                        row.mid = Some(b.mid);
                        row.outer = Some(b.outer);
                        row.mu_a = Some(b.mu_a);
                        row.c_prod = Some(b.c_prod);
                        row.pass = Some(b.chain_holds());
                        row.status = if b.hypothesis_holds {
                            Status::asserted(b.chain_holds())
                        } else {
                            Status::HypothesisViolated
                        };
                        row.detail = set_label(i, a);
                        rows.push(row);
                    }
                }
            }
            Check::Talagrand => {
                for (i, a) in sets.iter().enumerate() {
                    for &t in &spec.t {
                        let mut row = ctx.row(check, None, Some(t));
                        row.detail = set_label(i, a);
                        match talagrand_product_baseline(mu, a, t) {
                            Ok(b) => {
                                row.lhs = Some(b.lhs);
                                row.bound = Some(b.bound);
                                row.mu_a = Some(b.mu_a);
                                row.pass = Some(b.holds());
                                row.status = Status::asserted(b.holds());
                            }
                            Err(Error::NotApplicable(_)) => row.status = Status::NotApplicable,
                            Err(e) => return Err(err(e)),
                        }
                        rows.push(row);
                    }
                }
            }
        }
    }
    sort_rows(&mut rows);
    Ok(SweepOutcome { rows, warnings })
}

fn set_label(i: usize, a: &CubeSet) -> String {
    format!("set={i} size={}", a.len())
}

fn mgf_row(ctx: &Ctx, check: Check, y: &CubePoint, t: f64) -> cubeconc::Result<Row> {
    let mu = ctx.mu;
    let mut row = ctx.row(check, Some(y), Some(t));
    row.mean = Some(mean_hamming(mu, y)?);
    match check {
        Check::Inductive => {
            let (ledger, report) = inductive_bound(mu, y, t)?;
            row.mgf = Some(report.lhs);
            row.bound_inductive = Some(report.bound);
            row.slack_inductive = Some(report.slack);
            let agree = ledger.routes_agree();
            row.pass = Some(report.holds && agree);
            row.status = Status::asserted(report.holds && agree);
            if !agree {
                row.detail = format!("route gap {:e}", ledger.max_route_gap());
            }
        }
        Check::SmallVariance => {
            let (sv, report) = small_variance_bound(mu, y, t)?;
            row.mgf = Some(report.lhs);
            row.bound_smallvar = Some(report.bound);
            row.slack_smallvar = Some(report.slack);
            row.lhs = Some(sv.abs_bound);
            let holds = report.holds && sv.chain_holds();
            row.pass = Some(holds);
            row.status = Status::asserted(holds);
        }
        Check::PositiveCorrelation => {
            let report = pc_theorem_check(mu, y, t)?;
            row.mgf = Some(report.lhs);
            row.bound = Some(report.bound);
            row.verdicts = Some(verdict_string(&verdicts(mu, y, t)?));
            row.pass = Some(report.holds);
            row.status = if report.applicable {
                Status::asserted(report.holds)
            } else {
                Status::NotApplicable
            };
        }
        _ => unreachable!("not an MGF check"),
    }
    if row.mgf.is_none() {
        row.mgf = Some(centered_mgf(mu, y, t)?.value);
    }
    Ok(row)
}

fn alpha_rows(ctx: &Ctx, spec: &SweepSpec, ys: &[CubePoint], rows: &mut Vec<Row>) -> Result<()> {
    let mu = ctx.mu;
    let n = mu.n();
    let radii = spec.eps.clone().unwrap_or_else(|| (0..=n as u32).collect());
    let exact = n <= capacity::max_n(Cap::ExactAlpha);
    for &eps in &radii {
        let mut row = ctx.row(Check::Alpha, None, None);
        if exact {
            row.lhs = Some(concentration_alpha(mu, eps)?);
            row.detail = format!("eps={eps} exact");
        } else {
            let lb = concentration_alpha_lower_bound(mu, eps)?;
            row.lhs = Some(lb.value);
            row.detail = format!("eps={eps} lower-bound witness_size={}", lb.witness.len());
        }
        rows.push(row);
        if exact {
            for y in ys {
                let m = median_concentration_check(mu, y, eps)?;
                let mut row = ctx.row(Check::Alpha, Some(y), None);
                row.lhs = Some(m.lhs);
                row.bound = Some(m.rhs);
                let holds = m.holds() && m.is_median();
                row.pass = Some(holds);
                row.status = Status::asserted(holds);
                row.detail = format!("eps={eps} median={} lhs>=bound", m.median);
                rows.push(row);
            }
        }
    }
    Ok(())
}

fn cmp_t(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

/// Stable sort by `(y, t, check)`.
fn sort_rows(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        a.y.cmp(&b.y)
            .then_with(|| cmp_t(a.t, b.t))
            .then_with(|| a.check.cmp(&b.check))
    });
}

/// RFC 3339 timestamp for the CSV header.
pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

/// Runs the sweep and writes the CSV to `spec.out` (or `fallback`).
pub fn run_and_write<W: Write>(spec: &SweepSpec, fallback: W) -> Result<SweepOutcome> {
    let outcome = run_sweep(spec)?;
    match &spec.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            outcome.write_csv(std::io::BufWriter::new(file), &timestamp())?;
        }
        None => outcome.write_csv(fallback, &timestamp())?,
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{DistSource, GeneratorSpec, SetSelect, YSelect};
    use cubeconc::Kind;

    fn spec(kind: Kind, n: usize, seed: u64, checks: Vec<Check>) -> SweepSpec {
        SweepSpec {
            source: DistSource::Generator(GeneratorSpec {
                kind,
                n,
                seed,
                eps: None,
                p0: None,
                initial_p0: None,
            }),
            y: YSelect::Sample(4),
            complement_y: false,
            t: vec![0.5, 1.0],
            checks,
            seed,
            c: vec![2.0],
            eps: None,
            sets: SetSelect::Random(2),
            out: None,
        }
    }

    #[test]
    fn dense_checks_pass_and_sort() {
        let s = spec(
            Kind::Dense,
            6,
            7,
            vec![
                Check::Inductive,
                Check::SmallVariance,
                Check::PositiveCorrelation,
            ],
        );
        let out = run_sweep(&s).unwrap();
        assert_eq!(out.rows.len(), 4 * 2 * 3);
        assert_eq!(out.failures(), 0);
        let keys: Vec<_> = out
            .rows
            .iter()
            .map(|r| (r.y.clone(), r.t.unwrap(), r.check))
            .collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)).then(a.2.cmp(&b.2)));
        assert_eq!(keys, sorted);
    }

    #[test]
    fn dependent_tail_is_flagged_not_failed() {
        let mut s = spec(Kind::DeltaMix, 8, 0, vec![Check::Tail]);
        s.y = YSelect::parse("00000000,11111111").unwrap();
        s.c = vec![4.0];
        let out = run_sweep(&s).unwrap();
        assert_eq!(out.failures(), 0);
        assert!(out
            .rows
            .iter()
            .all(|r| r.status == Status::ExpectedNonconcentration && r.lhs == Some(1.0)));
    }

    #[test]
    fn every_check_runs_on_a_small_cube() {
        let s = spec(Kind::Markov, 4, 3, Check::ALL.to_vec());
        let out = run_sweep(&s).unwrap();
        assert_eq!(
            out.failures(),
            0,
            "{:#?}",
            out.rows
                .iter()
                .filter(|r| r.status == Status::Fail)
                .collect::<Vec<_>>()
        );
        for check in Check::ALL {
            assert!(out.rows.iter().any(|r| r.check == check), "{check}");
        }
        assert!(out
            .rows
            .iter()
            .filter(|r| r.check == Check::Talagrand)
            .all(|r| r.status == Status::NotApplicable));
    }

    #[test]
    fn csv_is_deterministic_apart_from_header() {
        let s = spec(
            Kind::Product,
            5,
            11,
            vec![Check::Inductive, Check::Tail, Check::Talagrand],
        );
        let render = || {
            let mut buf = Vec::new();
            run_sweep(&s).unwrap().write_csv(&mut buf, "T").unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render();
        assert_eq!(a, render());
        let mut lines = a.lines();
        assert_eq!(
            lines.next().unwrap(),
            "# schema=1 rng=ChaCha8Rng generated=T"
        );
        assert_eq!(lines.next().unwrap(), COLUMNS.join(","));
    }

    #[test]
    fn capacity_errors_name_the_check() {
        let s = spec(Kind::DeltaMix, 13, 0, vec![Check::CountGoodY]);
        let e = run_sweep(&s).unwrap_err();
        assert!(format!("{e:#}").contains("check count"), "{e:#}");
    }
}
