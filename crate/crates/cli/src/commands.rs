//! The six batch commands. Each validates the whole configuration before
//! doing any work and returns a [`ResultTable`].

use lrqc::bounds::{
    area_law_bound, boundary_probability, correlated_convergence_bound, entangling_power,
    first_moment_convergence_bound, reachable_boundary_extremes, swap_constant, t_design_delta, trace_distance_bound,
    BoundKind, BoundReport,
};
use lrqc::oracle::{mc_purity_trajectory, OracleConfig};
use lrqc::path1d::{self, PathParams};
use lrqc::spectral::{local_matrix, mixture_matrix, product_matrix, spectral_radius_gap};
use lrqc::{
    build_swap_matrix, connected_components, fixed_space_dimension, purity_infinity, purity_trajectory,
    spectral_gap_swap, EnsembleSpec, LocalStructure, Policy, Region,
};

use crate::config::{named_structure, ExperimentConfig, PolicyConfig};
use crate::error::CliError;
use crate::table::{Metadata, ResultTable, Values};

/// Largest site count `fixcheck` will diagonalize.
pub const FIXCHECK_MAX_SITES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Evolve,
    Path1d,
    Gap,
    Oracle,
    Bounds,
    Fixcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evolve => "evolve",
            Command::Path1d => "path1d",
            Command::Gap => "gap",
            Command::Oracle => "oracle",
            Command::Bounds => "bounds",
            Command::Fixcheck => "fixcheck",
        }
    }
}

pub fn execute(command: Command, config: &ExperimentConfig) -> Result<ResultTable, CliError> {
    config.validate()?;
    let mut table = ResultTable::new(Metadata::new(command.name(), config));
    match command {
        Command::Evolve => evolve(config, &mut table)?,
        Command::Path1d => path1d_series(config, &mut table)?,
        Command::Gap => gap(config, &mut table)?,
        Command::Oracle => oracle(config, &mut table)?,
        Command::Bounds => bounds(config, &mut table)?,
        Command::Fixcheck => fixcheck(config, &mut table)?,
    }
    Ok(table)
}

fn floats(v: impl IntoIterator<Item = f64>) -> Values {
    Values::Float(v.into_iter().map(Some).collect())
}

fn ints(v: impl IntoIterator<Item = usize>) -> Values {
    Values::Int(v.into_iter().map(|x| x as i64).collect())
}

fn evolve(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let spec = c.ensemble()?;
    let a = c.initial_region()?;
    let k_max = c.run.k_max;
    if c.run.bound && !matches!(spec.policy(), Policy::Uncorrelated { per_step: None }) {
        return Err(CliError::Validation("the area-law bound needs the uncorrelated policy with fixed weights".into()));
    }
    let traj = purity_trajectory(&a, &spec, k_max)?;
    let p_inf = purity_infinity(&a, spec.structure(), spec.d())?;
    table
        .push("k", ints(0..=k_max))
        .push("P_k", floats(traj))
        .push("P_infinity", floats(vec![p_inf; k_max + 1]));
    if c.run.bound {
        let bound = (0..=k_max)
            .map(|k| {
                let ext = reachable_boundary_extremes(&a, spec.structure(), k)?;
                Ok(area_law_bound(ext.p_max, ext.p_min, spec.d(), k)?.value)
            })
            .collect::<Result<Vec<f64>, lrqc::Error>>()?;
        table.push("bound", floats(bound));
    }
    Ok(())
}

fn path_params(c: &ExperimentConfig) -> Result<PathParams, CliError> {
    if let Some(p) = &c.path1d {
        return Ok(PathParams::new(p.length, c.model.d, p.cut)?);
    }
    let cut = c.run.initial_region.len();
    let a = c.initial_region()?;
    if a != Region::interval(0, cut, c.model.n)? {
        return Err(CliError::Validation(
            "path1d: initial_region must be a prefix {0, …, l−1}, or give a path1d section".into(),
        ));
    }
    Ok(PathParams::new(c.model.n, c.model.d, cut)?)
}

/// Long format: one row per (quantity, index).
fn path1d_series(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let p = path_params(c)?;
    let data = path1d::spectrum(&p);
    let horizon = p.cut.min(p.length - p.cut);
    let base = 1.0 - path1d::e_p(p.d) / (p.length - 1) as f64;
    let (mut quantity, mut index, mut value, mut valid) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut row = |q: &str, i: usize, v: f64, ok: bool| {
        quantity.push(q.to_string());
        index.push(i);
        value.push(v);
        valid.push(ok);
    };
    for (h, &lambda) in data.eigenvalues.iter().enumerate() {
        row("eigenvalue", h, lambda, true);
    }
    row("gap", 0, data.gap, true);
    for k in 0..=c.run.k_max {
        row("exact", k, path1d::purity_exact(&p, k), true);
    }
    for k in 0..=c.run.k_max {
        row("short_time", k, base.powi(k as i32), k <= horizon);
    }
    table
        .push("quantity", Values::Text(quantity))
        .push("index", ints(index))
        .push("value", floats(value))
        .push("valid", Values::Bool(valid));
    Ok(())
}

struct GapPoint {
    n: usize,
    policy: PolicyConfig,
    spec: EnsembleSpec,
}

fn gap(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let mut points = Vec::new();
    match &c.gap {
        Some(sweep) => {
            for &n in &sweep.sizes {
                let s = named_structure(sweep.structure, n)?;
                for policy in &sweep.policies {
                    let spec = EnsembleSpec::new(s.clone(), policy.to_policy(&s)?, c.model.d)?;
                    points.push(GapPoint { n, policy: policy.clone(), spec });
                }
            }
        }
        None => points.push(GapPoint { n: c.model.n, policy: c.policy.clone(), spec: c.ensemble()? }),
    }
    // build every matrix first so a bad point fails before any output
    let matrices = points.iter().map(|p| build_swap_matrix(&p.spec)).collect::<Result<Vec<_>, _>>()?;
    let mut gaps = Vec::new();
    let mut radius = Vec::new();
    for m in &matrices {
        gaps.push(spectral_gap_swap(m)?);
        radius.push(spectral_radius_gap(m)?);
    }
    table
        .push("n", ints(points.iter().map(|p| p.n)))
        .push("policy", Values::Text(points.iter().map(|p| p.policy.name().to_string()).collect()))
        .push("order", Values::Text(points.iter().map(|p| p.policy.order_label()).collect()))
        .push("gap", floats(gaps))
        .push("radius_gap", floats(radius));
    Ok(())
}

fn oracle(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let spec = c.ensemble()?;
    let a = c.initial_region()?;
    let cfg = OracleConfig { seed: c.run.seed, samples: c.run.samples, d: c.model.d, n: c.model.n };
    cfg.validate()?;
    let exact = purity_trajectory(&a, &spec, c.run.k_max)?;
    let mc = mc_purity_trajectory(&spec, &a, c.run.k_max, &cfg)?;
    let z: Vec<f64> = exact
        .iter()
        .zip(&mc)
        .map(|(p, e)| if e.stderr == 0.0 { 0.0 } else { (e.mean - p) / e.stderr })
        .collect();
    table
        .push("k", ints(0..=c.run.k_max))
        .push("P_k", floats(exact))
        .push("mc_mean", floats(mc.iter().map(|e| e.mean)))
        .push("mc_stderr", floats(mc.iter().map(|e| e.stderr)))
        .push("z", floats(z));
    Ok(())
}

fn kind_label(kind: BoundKind) -> &'static str {
    match kind {
        BoundKind::UpperBound => "upper-bound",
        BoundKind::LowerBound => "lower-bound",
        BoundKind::Estimate => "estimate",
    }
}

fn estimate(value: f64, inputs: &[(&str, f64)]) -> BoundReport {
    BoundReport {
        value,
        kind: BoundKind::Estimate,
        inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        alternate: None,
    }
}

fn format_inputs(inputs: &[(String, f64)]) -> String {
    inputs.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

/// Whether the configured policy has a single-step matrix with a gap.
fn gap_available(spec: &EnsembleSpec) -> bool {
    let single_step = matches!(spec.policy(), Policy::Uncorrelated { per_step: None } | Policy::CorrelatedSweep { .. });
    single_step && spec.n() <= lrqc::spectral::MAX_DENSE_SITES
}

fn bounds(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let spec = c.ensemble()?;
    let s: &LocalStructure = spec.structure();
    let a = c.initial_region()?;
    let d = spec.d();
    let n = spec.n();
    let b = c.bounds_config();
    let eps = c.run.epsilon;
    let p = boundary_probability(&a, s)?;
    let ext = reachable_boundary_extremes(&a, s, c.run.k_max)?;
    let q_min = s.weights().into_iter().fold(f64::INFINITY, f64::min);

    let mut rows: Vec<(&str, BoundReport)> = vec![
        ("entangling_power", estimate(entangling_power(d), &[("d", d as f64)])),
        ("swap_constant", estimate(swap_constant(d), &[("d", d as f64)])),
        ("boundary_probability", estimate(p, &[("region_size", a.len() as f64)])),
        ("area_law_first_step", area_law_bound(p, p, d, 1)?),
        ("area_law", area_law_bound(ext.p_max, ext.p_min, d, c.run.k_max)?),
        ("first_moment_steps", first_moment_convergence_bound(b.omega_norm, b.a_norm, eps, q_min, s.len())?),
    ];
    if gap_available(&spec) {
        let g = spectral_gap_swap(&build_swap_matrix(&spec)?)?;
        rows.push(("correlated_steps", correlated_convergence_bound(g, n, eps)?));
    }
    let size = a.len() as f64;
    let trace = trace_distance_bound(size, (n - a.len()) as f64, eps, d);
    rows.push((
        "trace_distance",
        BoundReport {
            value: trace,
            kind: BoundKind::UpperBound,
            inputs: vec![
                ("region_size".into(), size),
                ("complement_size".into(), (n - a.len()) as f64),
                ("epsilon".into(), eps),
                ("d".into(), d as f64),
            ],
            alternate: None,
        },
    ));
    rows.push(("t_design_delta", t_design_delta(a.len(), b.alpha, b.t, d)?));

    table
        .push("bound", Values::Text(rows.iter().map(|(name, _)| name.to_string()).collect()))
        .push("kind", Values::Text(rows.iter().map(|(_, r)| kind_label(r.kind).to_string()).collect()))
        .push("value", floats(rows.iter().map(|(_, r)| r.value)))
        .push("alternate", Values::Float(rows.iter().map(|(_, r)| r.alternate).collect()))
        .push("inputs", Values::Text(rows.iter().map(|(_, r)| format_inputs(&r.inputs)).collect()));
    Ok(())
}

fn fixcheck(c: &ExperimentConfig, table: &mut ResultTable) -> Result<(), CliError> {
    let s = c.structure()?;
    let n = s.n();
    let d = c.model.d;
    if n > FIXCHECK_MAX_SITES {
        return Err(CliError::Cap(format!("fixcheck handles at most {FIXCHECK_MAX_SITES} sites, got {n}")));
    }
    let regions = s.regions();
    let pow = |e: usize| 1usize << e;
    let mut cases: Vec<(&str, usize, lrqc::spectral::SwapMatrix)> = Vec::new();
    cases.push(("single", pow(n - regions[0].len() + 1), local_matrix(&regions[0], d)?));
    let pairs = (0..regions.len()).flat_map(|i| (i + 1..regions.len()).map(move |j| (i, j)));
    let overlap = pairs.clone().find(|&(i, j)| regions[i].intersects(&regions[j]));
    let disjoint = pairs.clone().find(|&(i, j)| !regions[i].intersects(&regions[j]));
    if let Some((i, j)) = disjoint {
        let (x, y) = (regions[i], regions[j]);
        cases.push(("pair-disjoint", pow(n - x.len() - y.len() + 2), product_matrix(n, &[x, y], d)?));
    }
    if let Some((i, j)) = overlap {
        let (x, y) = (regions[i], regions[j]);
        let union = x.union(&y)?;
        cases.push(("pair-overlap", pow(n - union.len() + 1), product_matrix(n, &[x, y], d)?));
    }
    let parts = connected_components(&s);
    cases.push((
        "full-ensemble",
        pow(parts.len() + parts.residual.len()),
        mixture_matrix(n, regions, &s.weights(), d)?,
    ));
    let measured = cases.iter().map(|(_, _, m)| fixed_space_dimension(m)).collect::<Result<Vec<_>, _>>()?;
    let predicted: Vec<usize> = cases.iter().map(|(_, p, _)| *p).collect();
    table
        .push("case", Values::Text(cases.iter().map(|(name, _, _)| name.to_string()).collect()))
        .push("predicted", ints(predicted.iter().copied()))
        .push("measured", ints(measured.iter().copied()))
        .push("pass", Values::Bool(predicted.iter().zip(&measured).map(|(p, m)| p == m).collect()));
    Ok(())
}
