//! The experiment commands. Each turns a spec into one [`Table`].
//!
//! Grid points are evaluated in parallel and collected in grid order. Point
//! `k` draws its replicates from streams keyed by `(seed, k)`, or by
//! `(seed, 2k)` and `(seed, 2k + 1)` when it needs two independent samples,
//! so every row can be regenerated on its own.

use rayon::prelude::*;

use logistic_bd::asymptotics::{
    constants, critical_mean, lemma_error_sup, linear_prediction, predict, reciprocal_sum_asymptote, subcritical_mean,
    supercritical_mean, upcross_deficit_asymptote, LimitLaw, PredictionSet,
};
use logistic_bd::exact::{
    excursion_decomposition, expected_absorption, expected_step_down, linear_extinction_prob, log_upcross_deficit,
    SeriesResult,
};
use logistic_bd::model::carrying_capacity;
use logistic_bd::sim::{
    conditioned_sample, estimate, ks_critical_1pct, ks_statistic, run_replicates, sample_coupled_with,
    sample_linear_extinction, separation_probability, Condition, EstimatorReport, SimConfig,
};
use logistic_bd::{Error, ModelParams, Regime};

use crate::error::{CliError, Result};
use crate::spec::{ExperimentSpec, GridPoint, LawKind, Start};
use crate::table::{Cell, PlotHint, Row, Table};

/// A z-score above this fails an exact-mean check.
const Z_LIMIT: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Exact,
    Asymptote,
    Simulate,
    Couple,
    Figure1,
    Figure2,
    LimitLaw,
    Convergence,
    CouplingStudy,
}

impl Command {
    pub fn label(self) -> &'static str {
        match self {
            Command::Exact => "exact",
            Command::Asymptote => "asymptote",
            Command::Simulate => "simulate",
            Command::Couple => "couple",
            Command::Figure1 => "figure1",
            Command::Figure2 => "figure2",
            Command::LimitLaw => "limit-law",
            Command::Convergence => "convergence",
            Command::CouplingStudy => "coupling-study",
        }
    }
}

pub fn run(command: Command, spec: &ExperimentSpec) -> Result<Table> {
    match command {
        Command::Exact => run_exact(spec),
        Command::Asymptote => run_asymptote(spec),
        Command::Simulate => run_simulate(spec),
        Command::Couple => run_couple(spec),
        Command::Figure1 => run_figure1(spec),
        Command::Figure2 => run_figure2(spec),
        Command::LimitLaw => run_limit_law(spec),
        Command::Convergence => run_convergence(spec),
        Command::CouplingStudy => run_coupling_study(spec),
    }
}

fn par_rows<F>(points: &[GridPoint], f: F) -> Result<Vec<Row>>
where
    F: Fn(&GridPoint) -> Result<Row> + Sync + Send,
{
    points.par_iter().map(f).collect()
}

fn require_regime(points: &[GridPoint], regime: Regime, command: &str) -> Result<()> {
    for pt in points {
        if pt.params.regime() != regime {
            return Err(Error::Regime(format!(
                "{command} needs the {regime} regime on every grid point, got {} at {}",
                pt.params.regime(),
                pt.params
            ))
            .into());
        }
    }
    Ok(())
}

fn require_competition(points: &[GridPoint], command: &str) -> Result<()> {
    match points.iter().find(|pt| pt.params.theta() == 0.0) {
        Some(pt) => Err(Error::Parameter(format!("{command} needs θ > 0, got {}", pt.params)).into()),
        None => Ok(()),
    }
}

fn params_row(p: &ModelParams) -> Row {
    vec![
        ("lambda", Cell::num(p.lambda())),
        ("mu", Cell::num(p.mu())),
        ("theta", Cell::num(p.theta())),
    ]
}

fn base_row(p: &ModelParams, m: Option<u64>) -> Row {
    let mut row = params_row(p);
    row.push(("m", m.map_or(Cell::Na, Cell::Int)));
    row.push(("regime", Cell::text(p.regime().label())));
    row
}

fn sim_config(spec: &ExperimentSpec, pt: &GridPoint, m: u64, grid: u64) -> SimConfig {
    SimConfig::new(pt.params, m, spec.seed)
        .with_grid(grid)
        .with_caps(spec.max_steps, spec.max_time)
}

/// `None` when the mean is infinite.
fn exact_mean(params: &ModelParams, m: u64, tol: f64) -> Result<Option<SeriesResult>> {
    match expected_absorption(params, m as usize, tol) {
        Ok(r) => Ok(Some(r)),
        Err(Error::Divergence(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn mean_cells(exact: &Option<SeriesResult>) -> (Cell, Cell) {
    match exact {
        Some(r) => (Cell::num(r.value), Cell::num(r.log_value)),
        None => (Cell::Divergent, Cell::Divergent),
    }
}

/// Extinction times from `m`. The linear process is sampled through its
/// closed-form law, which also reports lineages that never die.
struct Simulated {
    report: EstimatorReport,
    survived: usize,
}

impl Simulated {
    fn mean_cell(&self) -> Cell {
        if self.survived > 0 {
            Cell::Divergent
        } else if self.report.capped > 0 {
            Cell::Capped
        } else {
            Cell::num(self.report.mean)
        }
    }
}

fn simulate(spec: &ExperimentSpec, pt: &GridPoint, m: u64) -> Result<Simulated> {
    if pt.params.is_linear() {
        let draws = run_replicates(spec.seed, pt.index, spec.replicates, |rng| {
            sample_linear_extinction(&pt.params, m, rng)
        })
        .into_iter()
        .collect::<logistic_bd::Result<Vec<f64>>>()?;
        let finite: Vec<f64> = draws.iter().copied().filter(|t| t.is_finite()).collect();
        let survived = draws.len() - finite.len();
        let report = EstimatorReport::from_samples(finite, 0, None)?;
        return Ok(Simulated { report, survived });
    }
    let report = estimate(&sim_config(spec, pt, m, pt.index), spec.replicates, None)?;
    Ok(Simulated { report, survived: 0 })
}

/// Adds a violation for every row whose `pass` cell is false.
fn collect_failures(table: &mut Table) {
    let Some(pass) = table.column("pass") else { return };
    let failed: Vec<usize> = pass
        .iter()
        .enumerate()
        .filter(|(_, c)| matches!(c, Cell::Bool(false)))
        .map(|(k, _)| k)
        .collect();
    let (l, mu, th) = (table.floats("lambda"), table.floats("mu"), table.floats("theta"));
    for k in failed {
        let v = |x: &[Option<f64>]| x[k].map_or("na".to_string(), |x| x.to_string());
        table.violations.push(format!(
            "row {k} (λ={}, μ={}, θ={}) failed its check",
            v(&l),
            v(&mu),
            v(&th)
        ));
    }
}

pub fn run_exact(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    let rows = par_rows(&points, |pt| {
        let (m, _) = pt.initial()?;
        let p = &pt.params;
        let exact = exact_mean(p, m, spec.series_tolerance)?;
        let (mean, log_mean) = mean_cells(&exact);
        let extinction = if p.is_linear() {
            linear_extinction_prob(p, m)?
        } else {
            1.0
        };
        let mut row = base_row(p, Some(m));
        row.extend([
            (
                "carrying_capacity",
                carrying_capacity(p).map_or(Cell::Na, |c| Cell::Int(c.get())),
            ),
            ("exact_mean", mean),
            ("log_exact_mean", log_mean),
            (
                "truncation_index",
                exact.map_or(Cell::Na, |r| Cell::Int(r.truncation_index as u64)),
            ),
            ("tail_bound", exact.map_or(Cell::Na, |r| Cell::num(r.tail_bound))),
            ("extinction_probability", Cell::num(extinction)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "exact", rows);
    table.plot = Some(PlotHint {
        x: "mu",
        y: vec!["exact_mean"],
        log_x: false,
        log_y: true,
    });
    Ok(table)
}

fn prediction_cells(pred: &PredictionSet) -> Row {
    let mean = if pred.mean.is_finite() {
        Cell::num(pred.mean)
    } else {
        Cell::Divergent
    };
    vec![
        ("law", Cell::text(pred.law.map_or("none", |l| l.name()))),
        ("predicted_mean", mean),
        ("log_predicted_mean", Cell::num(pred.log_mean)),
        ("shift", Cell::num(pred.shift)),
        ("scale", Cell::num(pred.scale)),
    ]
}

pub fn run_asymptote(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    let rows = par_rows(&points, |pt| {
        let p = &pt.params;
        let needs_start = p.is_linear() || p.regime() == Regime::Subcritical;
        let start = if needs_start || pt.start.is_some() {
            Some(pt.initial()?)
        } else {
            None
        };
        let mut row = base_row(p, start.map(|s| s.0));
        row.push(("a", start.map_or(Cell::Na, |s| Cell::num(s.1))));
        if p.is_linear() && p.regime() == Regime::Supercritical {
            row.extend([
                ("law", Cell::text("none")),
                ("predicted_mean", Cell::Divergent),
                ("log_predicted_mean", Cell::Divergent),
                ("shift", Cell::Na),
                ("scale", Cell::Na),
            ]);
        } else if p.is_linear() {
            row.extend(prediction_cells(&linear_prediction(p, start.map_or(0, |s| s.0))?));
        } else {
            row.extend(prediction_cells(&predict(p, start.map_or(f64::NAN, |s| s.1))?));
        }
        let k = constants(p).ok();
        row.push(("c1", Cell::opt(k.map(|k| k.c1))));
        row.push(("c2", Cell::opt(k.map(|k| k.c2))));
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "asymptote", rows);
    table.plot = Some(PlotHint {
        x: "mu",
        y: vec!["predicted_mean"],
        log_x: false,
        log_y: true,
    });
    Ok(table)
}

pub fn run_simulate(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    let rows = par_rows(&points, |pt| {
        let (m, _) = pt.initial()?;
        let sim = simulate(spec, pt, m)?;
        let exact = exact_mean(&pt.params, m, spec.series_tolerance)?;
        let r = &sim.report;
        let mut row = base_row(&pt.params, Some(m));
        row.extend([
            ("replicates", Cell::Int(spec.replicates as u64)),
            ("sim_mean", sim.mean_cell()),
            ("std_error", Cell::num(r.std_error)),
            ("sample_sd", Cell::num(r.sample_sd)),
            ("capped", Cell::Int(r.capped as u64)),
            ("survived", Cell::Int(sim.survived as u64)),
            ("exact_mean", mean_cells(&exact).0),
            ("z_exact", exact.map_or(Cell::Na, |e| Cell::num(r.z_score(e.value)))),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "simulate", rows);
    table.notes.push(format!("rng {}", logistic_bd::sim::RNG_ALGORITHM));
    table.plot = Some(PlotHint {
        x: "mu",
        y: vec!["sim_mean", "exact_mean"],
        log_x: false,
        log_y: false,
    });
    Ok(table)
}

pub fn run_couple(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    let rows = par_rows(&points, |pt| {
        let (m, _) = pt.initial()?;
        let cfg = sim_config(spec, pt, m, pt.index);
        cfg.validate()?;
        let runs = run_replicates(spec.seed, pt.index, spec.replicates, |rng| {
            sample_coupled_with(&cfg, rng)
        });
        let n = runs.len() as f64;
        let kappas: Vec<f64> = runs.iter().filter_map(|s| s.kappa).map(|k| k as f64).collect();
        let gaps: Vec<f64> = runs
            .iter()
            .filter(|s| s.linear_died && !s.capped)
            .map(|s| (s.tau_theta - s.tau_0).abs())
            .collect();
        let mean = |xs: &[f64]| (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64);
        let mut row = base_row(&pt.params, Some(m));
        row.extend([
            ("replicates", Cell::Int(spec.replicates as u64)),
            ("separated_fraction", Cell::num(kappas.len() as f64 / n)),
            ("mean_kappa", Cell::opt(mean(&kappas))),
            (
                "linear_died_fraction",
                Cell::num(runs.iter().filter(|s| s.linear_died).count() as f64 / n),
            ),
            ("mean_gap_linear_died", Cell::opt(mean(&gaps))),
            ("capped", Cell::Int(runs.iter().filter(|s| s.capped).count() as u64)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "couple", rows);
    table.plot = Some(PlotHint {
        x: "theta",
        y: vec!["separated_fraction"],
        log_x: true,
        log_y: false,
    });
    Ok(table)
}

pub fn run_figure1(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    require_regime(&points, Regime::Subcritical, "figure1")?;
    require_competition(&points, "figure1")?;
    let rows = par_rows(&points, |pt| {
        let (m, a) = pt.initial()?;
        let sim = simulate(spec, pt, m)?;
        let r = &sim.report;
        let exact = exact_mean(&pt.params, m, spec.series_tolerance)?.expect("subcritical means are finite");
        let prediction = subcritical_mean(&pt.params, a)?;
        let rel = (r.mean - prediction).abs() / prediction;
        let z = r.z_score(exact.value);
        let mut row = base_row(&pt.params, Some(m));
        row.extend([
            ("a", Cell::num(a)),
            ("replicates", Cell::Int(spec.replicates as u64)),
            ("sim_mean", sim.mean_cell()),
            ("std_error", Cell::num(r.std_error)),
            ("capped", Cell::Int(r.capped as u64)),
            ("exact_mean", Cell::num(exact.value)),
            ("sme_prediction", Cell::num(prediction)),
            ("rel_dev_prediction", Cell::num(rel)),
            ("z_exact", Cell::num(z)),
            ("pass", Cell::Bool(r.capped == 0 && rel < spec.tolerance && z < Z_LIMIT)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "figure1", rows);
    table.notes.push(format!(
        "pass: relative deviation from sme_prediction below {} and |z| against exact_mean below {Z_LIMIT}",
        spec.tolerance
    ));
    collect_failures(&mut table);
    table.plot = Some(PlotHint {
        x: "mu",
        y: vec!["sim_mean", "exact_mean", "sme_prediction"],
        log_x: false,
        log_y: false,
    });
    Ok(table)
}

pub fn run_figure2(spec: &ExperimentSpec) -> Result<Table> {
    let points = spec.grid()?;
    require_regime(&points, Regime::Critical, "figure2")?;
    require_competition(&points, "figure2")?;
    let rows = par_rows(&points, |pt| {
        let (m, a) = pt.initial()?;
        let sim = simulate(spec, pt, m)?;
        let r = &sim.report;
        let exact = exact_mean(&pt.params, m, spec.series_tolerance)?.expect("critical means are finite for θ > 0");
        let prediction = critical_mean(&pt.params)?;
        let rel = (r.mean - prediction).abs() / prediction;
        let mut row = base_row(&pt.params, Some(m));
        row.extend([
            ("a", Cell::num(a)),
            ("replicates", Cell::Int(spec.replicates as u64)),
            ("sim_mean", sim.mean_cell()),
            ("std_error", Cell::num(r.std_error)),
            ("capped", Cell::Int(r.capped as u64)),
            ("exact_mean", Cell::num(exact.value)),
            ("prediction", Cell::num(prediction)),
            ("rel_dev_prediction", Cell::num(rel)),
            ("z_exact", Cell::num(r.z_score(exact.value))),
            ("pass", Cell::Bool(r.capped == 0 && rel < spec.tolerance)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "figure2", rows);
    table.notes.push(format!(
        "pass: relative deviation from prediction below {}",
        spec.tolerance
    ));
    collect_failures(&mut table);
    table.plot = Some(PlotHint {
        x: "mu",
        y: vec!["sim_mean", "exact_mean", "prediction"],
        log_x: false,
        log_y: false,
    });
    Ok(table)
}

fn sorted(mut xs: Vec<f64>) -> Vec<f64> {
    xs.sort_by(f64::total_cmp);
    xs
}

pub fn run_limit_law(spec: &ExperimentSpec) -> Result<Table> {
    let law = spec
        .law
        .ok_or_else(|| CliError::Usage("limit-law needs a law (spec key `law` or --law)".into()))?;
    let (regime, linear) = match law {
        LawKind::SubcriticalGumbel => (Regime::Subcritical, false),
        LawKind::SupercriticalExponential => (Regime::Supercritical, false),
        LawKind::LinearEx1 => (Regime::Subcritical, true),
        LawKind::LinearEx2 => (Regime::Critical, true),
    };
    let mut points = spec.grid()?;
    require_regime(&points, regime, law.label())?;
    if linear {
        if let Some(pt) = points.iter().find(|pt| !pt.params.is_linear()) {
            return Err(Error::Parameter(format!("{} needs θ = 0, got {}", law.label(), pt.params)).into());
        }
    } else {
        require_competition(&points, law.label())?;
    }
    if law == LawKind::SupercriticalExponential {
        for pt in points.iter_mut().filter(|pt| pt.start.is_none()) {
            pt.start = Some(Start::Capacity);
        }
    }
    let crit = ks_critical_1pct(spec.replicates);
    let rows = par_rows(&points, |pt| {
        let (m, a) = pt.initial()?;
        let p = &pt.params;
        let sim = simulate(spec, pt, m)?;
        let taus = &sim.report.support;
        let (pred, ks, ks_asym) = match law {
            LawKind::SupercriticalExponential => {
                let exact = exact_mean(p, m, spec.series_tolerance)?.expect("finite for θ > 0");
                let asym = supercritical_mean(p)?;
                let d = |scale: f64| {
                    ks_statistic(&sorted(taus.iter().map(|t| t / scale).collect()), |x| {
                        LimitLaw::Exponential.cdf(x)
                    })
                };
                let pred = PredictionSet {
                    regime: Regime::Supercritical,
                    mean: exact.value,
                    log_mean: exact.log_value,
                    shift: 0.0,
                    scale: exact.value,
                    law: Some(LimitLaw::Exponential),
                };
                (pred, d(exact.value), Some(d(asym.value)))
            }
            _ => {
                let pred = if linear {
                    linear_prediction(p, m)?
                } else {
                    predict(p, a)?
                };
                let cdf = |t: f64| pred.cdf(t).expect("law is known in this regime");
                (pred, ks_statistic(taus, cdf), None)
            }
        };
        let mut row = base_row(p, Some(m));
        row.extend([
            ("law", Cell::text(law.label())),
            ("replicates", Cell::Int(spec.replicates as u64)),
            ("sim_mean", sim.mean_cell()),
            ("std_error", Cell::num(sim.report.std_error)),
            ("capped", Cell::Int(sim.report.capped as u64)),
            ("survived", Cell::Int(sim.survived as u64)),
            ("shift", Cell::num(pred.shift)),
            ("scale", Cell::num(pred.scale)),
            ("ks", Cell::num(ks)),
            ("ks_asymptotic_scaling", Cell::opt(ks_asym)),
            ("ks_critical", Cell::num(crit)),
            ("pass", Cell::Bool(sim.report.capped == 0 && ks < crit)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "limit-law", rows);
    table.notes.push(format!(
        "law {}; pass: KS below the 1% critical value 1.63/sqrt(N)",
        law.label()
    ));
    if law == LawKind::SupercriticalExponential {
        table
            .notes
            .push("ks scales by the exact mean, ks_asymptotic_scaling by c1 sqrt(theta) exp(c2/theta)".into());
    }
    collect_failures(&mut table);
    table.plot = Some(PlotHint {
        x: "theta",
        y: vec!["ks", "ks_asymptotic_scaling", "ks_critical"],
        log_x: true,
        log_y: false,
    });
    Ok(table)
}

/// Indices of maximal runs of rows sharing everything but θ.
fn theta_groups(points: &[GridPoint]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let key = |pt: &GridPoint| (pt.params.lambda(), pt.params.mu(), pt.start);
    for (k, pt) in points.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if key(&points[g[0]]) == key(pt) => g.push(k),
            _ => groups.push(vec![k]),
        }
    }
    groups
}

/// Grid with θ in decreasing order, plus a note when it had to be reordered.
/// The θ loop is innermost, so each group of equal `(λ, μ, start)` becomes a
/// contiguous run of rows.
fn decreasing_theta_grid(spec: &ExperimentSpec) -> Result<(Vec<GridPoint>, Option<String>)> {
    let mut spec = spec.clone();
    let given = spec.theta.clone();
    let note = spec
        .sort_theta_decreasing()
        .then(|| format!("theta reordered to decreasing: given {given:?}, used {:?}", spec.theta));
    let mut points = spec.grid()?;
    // θ must vary fastest, so move the start loop outside it
    points.sort_by(|a, b| {
        (a.params.lambda(), a.params.mu())
            .partial_cmp(&(b.params.lambda(), b.params.mu()))
            .unwrap()
            .then_with(|| start_rank(&spec, a.start).cmp(&start_rank(&spec, b.start)))
            .then_with(|| b.params.theta().total_cmp(&a.params.theta()))
    });
    for (k, pt) in points.iter_mut().enumerate() {
        pt.index = k as u64;
    }
    Ok((points, note))
}

fn start_rank(spec: &ExperimentSpec, start: Option<Start>) -> usize {
    start
        .and_then(|s| spec.starts.iter().position(|&t| t == s))
        .unwrap_or(0)
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

pub fn run_convergence(spec: &ExperimentSpec) -> Result<Table> {
    if !spec.starts.is_empty() {
        return Err(CliError::Usage(
            "convergence always starts at the carrying capacity; remove m / a".into(),
        ));
    }
    let (points, note) = decreasing_theta_grid(spec)?;
    require_regime(&points, Regime::Supercritical, "convergence")?;
    require_competition(&points, "convergence")?;
    let tol = spec.series_tolerance;
    let rows = par_rows(&points, |pt| {
        let p = &pt.params;
        let cap = carrying_capacity(p)?.get();
        let exact = exact_mean(p, cap, tol)?.expect("finite for θ > 0");
        let decomposition = excursion_decomposition(p, tol)?;
        let asym = supercritical_mean(p)?;
        let deficit = log_upcross_deficit(p, cap as usize)?;
        let deficit_asym = upcross_deficit_asymptote(p)?;
        let recip = expected_step_down(p, 1, tol)?;
        let recip_asym = reciprocal_sum_asymptote(p)?;
        let horizon = spec.lemma_horizon.unwrap_or(2.0 * p.lambda());
        let mut row = params_row(p);
        row.extend([
            ("regime", Cell::text(p.regime().label())),
            ("carrying_capacity", Cell::Int(cap)),
            ("exact_mean", Cell::num(exact.value)),
            ("log_exact_mean", Cell::num(exact.log_value)),
            ("log_decomposition_mean", Cell::num(decomposition.log_mean)),
            ("asymptotic_mean", Cell::num(asym.value)),
            ("log_asymptotic_mean", Cell::num(asym.log_value)),
            ("ratio_mean_exact", Cell::num((exact.log_value - asym.log_value).exp())),
            (
                "ratio_mean_decomposition",
                Cell::num((decomposition.log_mean - asym.log_value).exp()),
            ),
            ("log_upcross_deficit", Cell::num(deficit)),
            (
                "ratio_upcross_deficit",
                Cell::num((deficit - deficit_asym.log_value).exp()),
            ),
            ("reciprocal_sum", Cell::num(recip.value)),
            (
                "ratio_reciprocal_sum",
                Cell::num((recip.log_value - recip_asym.log_value).exp()),
            ),
            ("lemma_horizon", Cell::num(horizon)),
            ("lemma_sup_eta", Cell::num(lemma_error_sup(p, horizon)?)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "convergence", rows);
    table.notes.extend(note);
    let columns = [
        "ratio_mean_exact",
        "ratio_mean_decomposition",
        "ratio_upcross_deficit",
        "ratio_reciprocal_sum",
        "lemma_sup_eta",
    ];
    for group in theta_groups(&points) {
        if group.len() < 2 {
            table.notes.push(format!(
                "single θ at {}: no monotonicity claim",
                points[group[0]].params
            ));
            continue;
        }
        for name in columns {
            let values = table.floats(name);
            let devs: Vec<f64> = group
                .iter()
                .map(|&k| {
                    let v = values[k].unwrap_or(f64::NAN);
                    if name == "lemma_sup_eta" {
                        v
                    } else {
                        (v - 1.0).abs()
                    }
                })
                .collect();
            if !strictly_decreasing(&devs) {
                table.violations.push(format!(
                    "{name} deviation not decreasing in θ at λ={}, μ={}: {devs:?}",
                    points[group[0]].params.lambda(),
                    points[group[0]].params.mu()
                ));
            }
        }
    }
    table
        .notes
        .push("check: |ratio - 1| and lemma_sup_eta strictly decreasing as θ decreases".into());
    table.plot = Some(PlotHint {
        x: "theta",
        y: columns.to_vec(),
        log_x: true,
        log_y: false,
    });
    Ok(table)
}

pub fn run_coupling_study(spec: &ExperimentSpec) -> Result<Table> {
    if spec.starts.iter().any(|s| !matches!(s, Start::Count(_))) || spec.starts.is_empty() {
        return Err(CliError::Usage("coupling-study needs a fixed initial size m".into()));
    }
    let (points, note) = decreasing_theta_grid(spec)?;
    let n = spec.replicates;
    let rows = par_rows(&points, |pt| {
        let (m, _) = pt.initial()?;
        let p = &pt.params;
        let sep = separation_probability(&sim_config(spec, pt, m, 2 * pt.index), spec.horizon, n)?;
        let cfg = sim_config(spec, pt, m, 2 * pt.index + 1);
        cfg.validate()?;
        let conditioned = p.regime() == Regime::Supercritical;
        let samples = run_replicates(spec.seed, cfg.grid, n, |rng| {
            if conditioned {
                conditioned_sample(&cfg, Condition::LinearDiesOut, spec.budget, rng).map(|c| c.sample)
            } else {
                Ok(sample_coupled_with(&cfg, rng))
            }
        })
        .into_iter()
        .collect::<logistic_bd::Result<Vec<_>>>()?;
        let capped = samples.iter().filter(|s| s.capped).count();
        let gaps: Vec<f64> = samples.iter().map(|s| (s.tau_theta - s.tau_0).abs()).collect();
        let gap = EstimatorReport::from_samples(gaps, capped, None)?;
        let bound_ok = sep.estimate <= sep.bound + 3.0 * sep.std_error;
        let mut row = base_row(p, Some(m));
        row.extend([
            ("replicates", Cell::Int(n as u64)),
            ("horizon", Cell::Int(spec.horizon)),
            ("separation_estimate", Cell::num(sep.estimate)),
            ("separation_se", Cell::num(sep.std_error)),
            ("separation_bound", Cell::num(sep.bound)),
            ("bound_ok", Cell::Bool(bound_ok)),
            (
                "conditioning",
                Cell::text(if conditioned { "linear-dies-out" } else { "none" }),
            ),
            ("mean_gap", if capped > 0 { Cell::Capped } else { Cell::num(gap.mean) }),
            ("gap_se", Cell::num(gap.std_error)),
            (
                "separated_fraction",
                Cell::num(samples.iter().filter(|s| s.kappa.is_some()).count() as f64 / n as f64),
            ),
            ("capped", Cell::Int(capped as u64)),
        ]);
        Ok(row)
    })?;
    let mut table = Table::new(&spec.name, "coupling-study", rows);
    table.notes.extend(note);
    table.notes.push(
        "check: separation_estimate <= separation_bound + 3 SE; mean_gap decreasing as θ decreases and zero at θ = 0"
            .into(),
    );
    let above: Vec<usize> = (table.column("bound_ok").unwrap_or_default().iter())
        .enumerate()
        .filter(|(_, ok)| matches!(ok, Cell::Bool(false)))
        .map(|(k, _)| k)
        .collect();
    for k in above {
        table
            .violations
            .push(format!("row {k}: separation estimate above bound + 3 SE"));
    }
    let gaps = table.floats("mean_gap");
    for group in theta_groups(&points) {
        let (linear, positive): (Vec<usize>, Vec<usize>) = group.iter().partition(|&&k| points[k].params.is_linear());
        for k in linear {
            if gaps[k] != Some(0.0) {
                table
                    .violations
                    .push(format!("row {k}: θ = 0 gap is {:?}, expected 0", gaps[k]));
            }
        }
        let devs: Vec<f64> = positive.iter().map(|&k| gaps[k].unwrap_or(f64::NAN)).collect();
        if devs.len() > 1 && !strictly_decreasing(&devs) {
            table.violations.push(format!(
                "mean_gap not decreasing in θ at {}: {devs:?}",
                points[group[0]].params
            ));
        }
    }
    table.plot = Some(PlotHint {
        x: "theta",
        y: vec!["mean_gap", "separation_estimate", "separation_bound"],
        log_x: true,
        log_y: true,
    });
    Ok(table)
}
