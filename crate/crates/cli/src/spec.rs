//! Experiment spec files.
//!
//! A spec is a flat list of `key = value` lines. Blank lines are skipped,
//! `#` starts a comment anywhere on a line and list values are separated by
//! commas:
//!
//! ```text
//! # desk-scale subcritical sweep
//! name       = figure1-desk
//! lambda     = 1
//! mu         = 1.5, 2, 3
//! theta      = 0.005
//! m          = 200
//! replicates = 400
//! seed       = 2024
//! ```
//!
//! | key                | value                                                  | default        |
//! |--------------------|--------------------------------------------------------|----------------|
//! | `name`             | label copied into the output                           | `experiment`   |
//! | `lambda`, `mu`     | lists of positive rates; `lambda = mu` ties `λ` to `μ`  | required       |
//! | `theta`            | list of competition rates `≥ 0`                        | required       |
//! | `m`                | list of initial sizes, or the word `capacity`          | per command    |
//! | `a`                | list of scaled initial sizes, `m = round(a/θ)`         |                |
//! | `replicates`       | simulated paths per grid point                         | 100            |
//! | `seed`             | master seed                                            | 1              |
//! | `out`              | output path, stdout when absent                        |                |
//! | `tolerance`        | relative acceptance tolerance                          | 0.10           |
//! | `series-tolerance` | relative truncation tolerance of the exact series      | 1e-10          |
//! | `law`              | `subcritical-gumbel`, `supercritical-exponential`, `linear-ex1` or `linear-ex2` | |
//! | `horizon`          | jump horizon `n` of the separation estimate            | 100            |
//! | `lemma-horizon`    | range `T` of the weight approximation check            | `2λ`           |
//! | `max-steps`        | jump cap per path                                      | 1e8            |
//! | `max-time`         | time cap per path                                      | 1e6            |
//! | `budget`           | rejection budget of conditioned coupling runs          | 1e6            |
//!
//! `m` and `a` are exclusive. Unknown and repeated keys are errors. The grid
//! is the product `lambda × mu × theta × (m | a)`, expanded in that order.

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use logistic_bd::exact::DEFAULT_REL_TOL;
use logistic_bd::model::carrying_capacity;
use logistic_bd::sim::path::{DEFAULT_MAX_STEPS, DEFAULT_MAX_TIME};
use logistic_bd::ModelParams;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    Count(u64),
    /// `m = round(a/θ)`.
    Density(f64),
    Capacity,
}

impl fmt::Display for Start {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Start::Count(m) => write!(f, "m={m}"),
            Start::Density(a) => write!(f, "a={a}"),
            Start::Capacity => f.write_str("m=capacity"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawKind {
    SubcriticalGumbel,
    SupercriticalExponential,
    LinearEx1,
    LinearEx2,
}

impl LawKind {
    pub fn label(self) -> &'static str {
        match self {
            LawKind::SubcriticalGumbel => "subcritical-gumbel",
            LawKind::SupercriticalExponential => "supercritical-exponential",
            LawKind::LinearEx1 => "linear-ex1",
            LawKind::LinearEx2 => "linear-ex2",
        }
    }
}

impl FromStr for LawKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        [
            LawKind::SubcriticalGumbel,
            LawKind::SupercriticalExponential,
            LawKind::LinearEx1,
            LawKind::LinearEx2,
        ]
        .into_iter()
        .find(|k| k.label() == s)
        .ok_or_else(|| format!("unknown law `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub lambda: Vec<f64>,
    /// `lambda = mu`: every grid point has `λ = μ`.
    pub lambda_tied: bool,
    pub mu: Vec<f64>,
    pub theta: Vec<f64>,
    /// Empty when neither `m` nor `a` is given.
    pub starts: Vec<Start>,
    pub replicates: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tolerance: f64,
    pub series_tolerance: f64,
    pub law: Option<LawKind>,
    pub horizon: u64,
    pub lemma_horizon: Option<f64>,
    pub max_steps: u64,
    pub max_time: f64,
    pub budget: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            name: "experiment".into(),
            lambda: Vec::new(),
            lambda_tied: false,
            mu: Vec::new(),
            theta: Vec::new(),
            starts: Vec::new(),
            replicates: 100,
            seed: 1,
            out: None,
            tolerance: 0.10,
            series_tolerance: DEFAULT_REL_TOL,
            law: None,
            horizon: 100,
            lemma_horizon: None,
            max_steps: DEFAULT_MAX_STEPS,
            max_time: DEFAULT_MAX_TIME,
            budget: 1_000_000,
        }
    }
}

/// One point of the expanded grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    /// Position in the canonical order; seeds the point's random streams.
    pub index: u64,
    pub params: ModelParams,
    pub start: Option<Start>,
}

impl GridPoint {
    /// Initial size `m` and scaled size `a = θm`.
    pub fn initial(&self) -> Result<(u64, f64)> {
        let th = self.params.theta();
        let m = match self.start {
            None => return Err(CliError::Usage("this command needs an initial size: set m or a".into())),
            Some(Start::Count(m)) => m,
            Some(Start::Capacity) => carrying_capacity(&self.params)?.get(),
            Some(Start::Density(a)) => {
                if th == 0.0 {
                    return Err(CliError::Usage("a needs θ > 0; use m for the linear process".into()));
                }
                (a / th).round() as u64
            }
        };
        if m == 0 {
            return Err(CliError::Usage(format!("initial size at {} is zero", self.params)));
        }
        Ok((m, th * m as f64))
    }
}

fn list<T: FromStr>(key: &str, value: &str) -> std::result::Result<Vec<T>, String> {
    value
        .split(',')
        .map(|v| {
            let v = v.trim();
            v.parse().map_err(|_| format!("{key}: cannot parse `{v}`"))
        })
        .collect()
}

fn scalar<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    // accept `1e6` for integer keys
    value
        .parse()
        .or_else(|_| match value.parse::<f64>() {
            Ok(x) if x.fract() == 0.0 && x >= 0.0 => format!("{x:.0}").parse(),
            _ => value.parse(),
        })
        .map_err(|_| format!("{key}: cannot parse `{value}`"))
}

impl ExperimentSpec {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        let mut spec = Self::default();
        let mut seen = HashSet::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", n + 1))?;
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(format!("line {}: `{key}` given twice", n + 1));
            }
            if (key == "m" && seen.contains("a")) || (key == "a" && seen.contains("m")) {
                return Err(format!("line {}: `m` and `a` are exclusive", n + 1));
            }
            spec.set(key, value.trim())
                .map_err(|e| format!("line {}: {e}", n + 1))?;
        }
        Ok(spec)
    }

    /// Sets one key; later calls override earlier ones.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        if value.is_empty() {
            return Err(format!("{key}: empty value"));
        }
        match key {
            "name" => self.name = value.to_string(),
            "lambda" if value == "mu" => {
                self.lambda.clear();
                self.lambda_tied = true;
            }
            "lambda" => {
                self.lambda = list(key, value)?;
                self.lambda_tied = false;
            }
            "mu" => self.mu = list(key, value)?,
            "theta" => self.theta = list(key, value)?,
            "m" => {
                self.starts = value
                    .split(',')
                    .map(|v| match v.trim() {
                        "capacity" => Ok(Start::Capacity),
                        v => scalar(key, v).map(Start::Count),
                    })
                    .collect::<std::result::Result<_, _>>()?
            }
            "a" => self.starts = list(key, value)?.into_iter().map(Start::Density).collect(),
            "replicates" => self.replicates = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "tolerance" => self.tolerance = positive(key, scalar(key, value)?)?,
            "series-tolerance" => self.series_tolerance = positive(key, scalar(key, value)?)?,
            "law" => self.law = Some(value.parse()?),
            "horizon" => self.horizon = scalar(key, value)?,
            "lemma-horizon" => self.lemma_horizon = Some(positive(key, scalar(key, value)?)?),
            "max-steps" => self.max_steps = scalar(key, value)?,
            "max-time" => self.max_time = positive(key, scalar(key, value)?)?,
            "budget" => self.budget = scalar(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Replaces the θ list by its decreasing order; reports whether it moved.
    pub fn sort_theta_decreasing(&mut self) -> bool {
        let before = self.theta.clone();
        self.theta.sort_by(|a, b| b.total_cmp(a));
        self.theta != before
    }

    pub fn grid(&self) -> Result<Vec<GridPoint>> {
        for (key, values) in [("lambda", &self.lambda), ("mu", &self.mu), ("theta", &self.theta)] {
            if values.is_empty() && !(key == "lambda" && self.lambda_tied) {
                return Err(CliError::Usage(format!("empty grid: `{key}` has no values")));
            }
        }
        if self.replicates < 2 {
            return Err(CliError::Usage("replicates must be at least 2".into()));
        }
        let starts: Vec<Option<Start>> = if self.starts.is_empty() {
            vec![None]
        } else {
            self.starts.iter().copied().map(Some).collect()
        };
        let lambdas = if self.lambda_tied {
            vec![None]
        } else {
            self.lambda.iter().copied().map(Some).collect()
        };
        let mut points = Vec::new();
        for &l in &lambdas {
            for &mu in &self.mu {
                let l = l.unwrap_or(mu);
                for &th in &self.theta {
                    let params = ModelParams::new(l, mu, th)?;
                    for &start in &starts {
                        let index = points.len() as u64;
                        points.push(GridPoint { index, params, start });
                    }
                }
            }
        }
        Ok(points)
    }
}

fn positive(key: &str, x: f64) -> std::result::Result<f64, String> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(format!("{key} must be positive, got {x}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_comments_and_capacity() {
        let spec = ExperimentSpec::parse(
            "# sweep\nname = s\nlambda = 1\nmu = 1.5, 2 ,3  # trailing\ntheta=0.005\nm = 200, capacity\nmax-steps = 1e6\n",
        )
        .unwrap();
        assert_eq!(spec.mu, vec![1.5, 2.0, 3.0]);
        assert_eq!(spec.starts, vec![Start::Count(200), Start::Capacity]);
        assert_eq!(spec.max_steps, 1_000_000);
        assert_eq!(spec.grid().unwrap().len(), 6);
    }

    #[test]
    fn rejects_malformed_specs() {
        for text in [
            "lambda = 1\nlamda = 2",
            "mu = 1\nmu = 2",
            "m = 5\na = 1",
            "theta = x",
            "law = gauss",
            "tolerance = -1",
            "just words",
            "seed =",
        ] {
            assert!(ExperimentSpec::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn empty_grid_is_an_error() {
        let spec = ExperimentSpec::parse("lambda = 1\nmu = 2").unwrap();
        assert!(matches!(spec.grid(), Err(CliError::Usage(_))));
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let spec = ExperimentSpec::parse("lambda = 1, 2\nmu = 3\ntheta = 0.1, 0.2\na = 1").unwrap();
        let pts = spec.grid().unwrap();
        let keys: Vec<(f64, f64)> = pts.iter().map(|p| (p.params.lambda(), p.params.theta())).collect();
        assert_eq!(keys, [(1.0, 0.1), (1.0, 0.2), (2.0, 0.1), (2.0, 0.2)]);
        assert!(pts.iter().enumerate().all(|(i, p)| p.index == i as u64));
        assert_eq!(pts[1].initial().unwrap(), (5, 1.0));
    }

    #[test]
    fn tied_rates_follow_mu() {
        let spec = ExperimentSpec::parse("lambda = mu\nmu = 1, 2\ntheta = 0.001").unwrap();
        let pts = spec.grid().unwrap();
        assert!(pts.iter().all(|p| p.params.lambda() == p.params.mu()));
        assert_eq!(pts.len(), 2);
    }

    #[test]
    fn theta_reordering_is_reported() {
        let mut spec = ExperimentSpec::parse("theta = 0.01, 0.1, 0.05").unwrap();
        assert!(spec.sort_theta_decreasing());
        assert_eq!(spec.theta, [0.1, 0.05, 0.01]);
        assert!(!spec.sort_theta_decreasing());
    }
}
