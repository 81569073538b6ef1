//! Sweep specifications: where the distribution comes from, which `y` and
//! `t` values to visit and which checks to run.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, ensure, Context, Result};
use cubeconc::report::Check;
use cubeconc::set::CubeSet;
use cubeconc::{CubeDistribution, CubePoint, Kind};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

/// Distribution source: a JSON file or one of the seeded generators.
#[derive(Debug, Clone, PartialEq)]
pub enum DistSource {
    File(PathBuf),
    Generator(GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: Kind,
    pub n: usize,
    pub seed: u64,
    /// `delta_mix` mass parameter (default 0).
    pub eps: Option<f64>,
    /// Common `mu^(i)(0)` for a product; random marginals when absent.
    pub p0: Option<f64>,
    /// First-coordinate law of a Markov chain; random when absent.
    pub initial_p0: Option<f64>,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<CubeDistribution> {
        let n = self.n;
        let mu = match self.kind {
            Kind::Dense => CubeDistribution::make_random_dense(n, self.seed)?,
            Kind::Product => match self.p0 {
                Some(p) => CubeDistribution::make_product(&vec![p; n])?,
                None => CubeDistribution::make_random_product(n, self.seed)?,
            },
            Kind::Markov => CubeDistribution::make_random_markov(n, self.seed, self.initial_p0)?,
            Kind::DeltaMix => CubeDistribution::make_delta_mix(n, self.eps.unwrap_or(0.0))?,
        };
        Ok(mu)
    }
}

impl DistSource {
    pub fn load(&self) -> Result<CubeDistribution> {
        match self {
            DistSource::File(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                CubeDistribution::from_json_str(&text)
                    .with_context(|| format!("parsing {}", path.display()))
            }
            DistSource::Generator(g) => g.build(),
        }
    }

    /// Seed column of the report; empty for files.
    pub fn seed(&self) -> Option<u64> {
        match self {
            DistSource::File(_) => None,
            DistSource::Generator(g) => Some(g.seed),
        }
    }
}

/// Which `y` to visit.
#[derive(Debug, Clone, PartialEq)]
pub enum YSelect {
    All,
    /// `K` distinct points drawn with the sweep seed (all of `I_n` when
    /// `K >= 2^n`).
    Sample(usize),
    Explicit(Vec<String>),
}

impl YSelect {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "all" {
            return Ok(YSelect::All);
        }
        if let Some(k) = text.strip_prefix("sample:") {
            let k: usize = k
                .parse()
                .with_context(|| format!("bad sample count {k:?}"))?;
            ensure!(k > 0, "sample count must be positive");
            return Ok(YSelect::Sample(k));
        }
        let points: Vec<String> = text.split(',').map(|s| s.trim().to_string()).collect();
        for p in &points {
            ensure!(
                !p.is_empty() && p.chars().all(|c| c == '0' || c == '1'),
                "y must be a bit string, \"all\" or \"sample:K\", got {p:?}"
            );
        }
        Ok(YSelect::Explicit(points))
    }

    pub fn resolve(&self, n: usize, seed: u64) -> Result<Vec<CubePoint>> {
        let all = |n: usize| -> Result<Vec<CubePoint>> {
            ensure!(n <= 24, "cannot enumerate all 2^{n} points");
            Ok((0..1u64 << n)
                .map(|i| CubePoint::new(n, i).unwrap())
                .collect())
        };
        match self {
            YSelect::All => all(n),
            YSelect::Sample(k) => {
                if n < 63 && (*k as u64) >= 1u64 << n {
                    return all(n);
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ Y_STREAM);
                let mut picked: Vec<u64> = if n <= 24 {
                    index::sample(&mut rng, 1usize << n, *k)
                        .into_iter()
                        .map(|i| i as u64)
                        .collect()
                } else {
                    let mut seen = std::collections::BTreeSet::new();
                    while seen.len() < *k {
                        seen.insert(rng.random_range(0..1u64 << n));
                    }
                    seen.into_iter().collect()
                };
                picked.sort_unstable();
                picked
                    .into_iter()
                    .map(|i| CubePoint::new(n, i).map_err(Into::into))
                    .collect()
            }
            YSelect::Explicit(points) => points
                .iter()
                .map(|s| {
                    let p: CubePoint = s.parse()?;
                    ensure!(p.dim() == n, "y = {s} has length {}, expected {n}", p.dim());
                    Ok(p)
                })
                .collect(),
        }
    }
}

/// Which sets `A` the set checks use.
#[derive(Debug, Clone, PartialEq)]
pub enum SetSelect {
    Random(usize),
    File(PathBuf),
}

impl SetSelect {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        match text.strip_prefix("random:") {
            Some(k) => {
                let k: usize = k.parse().with_context(|| format!("bad set count {k:?}"))?;
                ensure!(k > 0, "set count must be positive");
                Ok(SetSelect::Random(k))
            }
            None => Ok(SetSelect::File(PathBuf::from(text))),
        }
    }

    pub fn resolve(&self, n: usize, seed: u64) -> Result<Vec<CubeSet>> {
        match self {
            SetSelect::File(path) => {
                let set = read_set(path)?;
                ensure!(
                    set.dim() == n,
                    "set in {} has n = {}, expected {n}",
                    path.display(),
                    set.dim()
                );
                Ok(vec![set])
            }
            SetSelect::Random(k) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ SET_STREAM);
                (0..*k).map(|_| random_set(n, &mut rng)).collect()
            }
        }
    }
}

pub fn read_set(path: &Path) -> Result<CubeSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    CubeSet::from_json_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A random non-empty set: each point kept independently with a density
/// drawn from `[0.02, 0.6)`.
pub fn random_set(n: usize, rng: &mut impl Rng) -> Result<CubeSet> {
    let density: f64 = rng.random_range(0.02..0.6);
    let mut set = CubeSet::from_predicate(n, |_| rng.random_bool(density))?;
    if set.is_empty() {
        set = CubeSet::from_members(n, [rng.random_range(0..1u64 << n)])?;
    }
    Ok(set)
}

const Y_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;
const SET_STREAM: u64 = 0xc2b2_ae3d_27d4_eb4f;

/// `a:b:step` (inclusive), a single value, or a comma-separated list. Every
/// value must be finite and positive.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let values: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        ensure!(
            parts.len() == 3,
            "grid must look like a:b:step, got {text:?}"
        );
        let [a, b, step] = [parts[0], parts[1], parts[2]].map(|p| p.trim().parse::<f64>());
        let (a, b, step) = (a?, b?, step?);
        ensure!(step > 0.0, "grid step must be positive");
        ensure!(b >= a, "grid end {b} is below its start {a}");
        let count = ((b - a) / step + 1e-9).floor() as usize;
        (0..=count).map(|i| a + i as f64 * step).collect()
    } else {
        text.split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .with_context(|| format!("bad number {s:?}"))
            })
            .collect::<Result<_>>()?
    };
    for v in &values {
        ensure!(
            v.is_finite() && *v > 0.0,
            "grid values must be positive, got {v}"
        );
    }
    Ok(values)
}

/// Comma-separated check names, or `all`.
pub fn parse_checks(text: &str) -> Result<Vec<Check>> {
    if text.trim() == "all" {
        return Ok(Check::ALL.to_vec());
    }
    let mut checks: Vec<Check> = text
        .split(',')
        .map(|s| s.parse::<Check>().map_err(|e| anyhow!(e)))
        .collect::<Result<_>>()?;
    checks.sort();
    checks.dedup();
    Ok(checks)
}

/// Non-negative integer radii: `a:b` (inclusive) or a comma list.
pub fn parse_radii(text: &str) -> Result<Vec<u32>> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once(':') {
        let (a, b): (u32, u32) = (a.trim().parse()?, b.trim().parse()?);
        ensure!(b >= a, "radius range {a}:{b} is empty");
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<u32>()
                .with_context(|| format!("bad radius {s:?}"))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub source: DistSource,
    pub y: YSelect,
    /// Replace each `y` by its complement, i.e. measure `n - d_H(x, y)`.
    pub complement_y: bool,
    pub t: Vec<f64>,
    pub checks: Vec<Check>,
    pub seed: u64,
    /// Deviation levels for the tail check.
    pub c: Vec<f64>,
    /// Enlargement radii for the alpha check (default `0..=n`).
    pub eps: Option<Vec<u32>>,
    pub sets: SetSelect,
    pub out: Option<PathBuf>,
}

/// On-disk sweep spec; strings use the same syntax as the CLI flags.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    #[serde(default)]
    dist: Option<PathBuf>,
    #[serde(default)]
    kind: Option<String>,
    #[serde(default)]
    n: Option<usize>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    dist_eps: Option<f64>,
    #[serde(default)]
    p0: Option<f64>,
    #[serde(default)]
    initial_p0: Option<f64>,
    #[serde(default = "default_y")]
    y: String,
    #[serde(default)]
    complement_y: bool,
    t: String,
    checks: Vec<String>,
    #[serde(default)]
    c: Option<String>,
    #[serde(default)]
    eps: Option<String>,
    #[serde(default)]
    sets: Option<String>,
    #[serde(default)]
    out: Option<PathBuf>,
}

fn default_y() -> String {
    "all".into()
}

/// Flag values shared by the CLI and spec files before validation.
#[derive(Debug, Clone, Default)]
pub struct SourceArgs {
    pub dist: Option<PathBuf>,
    pub kind: Option<String>,
    pub n: Option<usize>,
    pub seed: u64,
    pub eps: Option<f64>,
    pub p0: Option<f64>,
    pub initial_p0: Option<f64>,
}

impl SourceArgs {
    pub fn source(&self) -> Result<DistSource> {
        match (&self.dist, &self.kind) {
            (Some(path), None) => Ok(DistSource::File(path.clone())),
            (None, Some(kind)) => {
                let kind: Kind = kind.parse()?;
                let n = self.n.ok_or_else(|| anyhow!("--kind needs --n"))?;
                Ok(DistSource::Generator(GeneratorSpec {
                    kind,
                    n,
                    seed: self.seed,
                    eps: self.eps,
                    p0: self.p0,
                    initial_p0: self.initial_p0,
                }))
            }
            (Some(_), Some(_)) => bail!("give either --dist or --kind, not both"),
            (None, None) => {
                bail!("a distribution is required: --dist <path> or --kind <kind> --n <n>")
            }
        }
    }
}

impl SweepSpec {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json_str(&text)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).context("parsing sweep spec")?;
        let source = SourceArgs {
            dist: file.dist,
            kind: file.kind,
            n: file.n,
            seed: file.seed,
            eps: file.dist_eps,
            p0: file.p0,
            initial_p0: file.initial_p0,
        }
        .source()?;
        Ok(SweepSpec {
            source,
            y: YSelect::parse(&file.y)?,
            complement_y: file.complement_y,
            t: parse_grid(&file.t)?,
            checks: parse_checks(&file.checks.join(","))?,
            seed: file.seed,
            c: file
                .c
                .as_deref()
                .map(parse_grid)
                .transpose()?
                .unwrap_or_default(),
            eps: file.eps.as_deref().map(parse_radii).transpose()?,
            sets: SetSelect::parse(file.sets.as_deref().unwrap_or("random:4"))?,
            out: file.out,
        })
    }
}
