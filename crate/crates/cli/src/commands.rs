//! The four subcommands. Each one validates its inputs, computes every
//! result, and only then returns the files to write.

use qmeasure::bathmodel::{gamma0, BathCorrelator, BathSpec};
use qmeasure::decoherence::{d_peak, DecoherenceParams};
use qmeasure::measurement::MeasurementSetup;
use qmeasure::oracle::{compare_with_qclt, DiscreteBath, OracleSetup};
use qmeasure::regimes::{classify_regime, figure1_curve, log_grid, DecoherenceCurve};
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::{BathChoice, RunConfig};
use crate::output::{num, Cell, OutputFile, Table};
use crate::CliError;

/// Result of a command: files to write and a short message for stdout.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub files: Vec<OutputFile>,
    pub summary: String,
}

fn curve_table(curve: &DecoherenceCurve) -> Table {
    let mut t = Table::new(&["tent_over_eta", "tdec_numeric", "tdec_slow", "tdec_markov"]);
    for r in &curve.rows {
        t.push(vec![r.tent_over_eta.into(), r.tdec_numeric.into(), r.tdec_slow.into(), r.tdec_markov.into()]);
    }
    t
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Figure1Run {
    pub tdec_min: f64,
    pub tdec_max: f64,
    pub points: usize,
}

impl Default for Figure1Run {
    fn default() -> Self {
        Self { tdec_min: 0.01, tdec_max: 100.0, points: 60 }
    }
}

pub fn figure1(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run: Figure1Run = cfg.run_params()?;
    let (ms, cutoff, tau_max, grid_points) = match cfg.bath()? {
        None => (vec![1, 3, 5], 5.0, None, None),
        Some(BathChoice::Spectral { ms, cutoff, tau_max, grid_points }) => (ms, cutoff, tau_max, grid_points),
        Some(BathChoice::Preset(_)) => {
            return Err(CliError::Config("figure1 needs a `spectral` bath section".into()))
        }
    };
    let grid = log_grid(run.tdec_min, run.tdec_max, run.points)?;
    let tau_max = tau_max.unwrap_or(run.tdec_max);

    let curves = ms
        .par_iter()
        .map(|&m| {
            let corr = BathSpec::Spectral { m, cutoff, tau_max: Some(tau_max), grid_points }.build(tau_max)?;
            Ok((m, figure1_curve(&corr, &grid)?))
        })
        .collect::<Result<Vec<_>, qmeasure::Error>>()?;

    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (m, curve) in &curves {
        let stem = format!("figure1_m{m}");
        files.push(OutputFile::table(&stem, &curve_table(curve), cfg.output.format));
        entries.push(json!({
            "m": m,
            "file": files.last().map(|f| f.name.clone()),
            "gamma": curve.metadata.gamma,
            "c_m": num(curve.metadata.c_m),
            "rows": curve.rows.len(),
        }));
    }
    let manifest = json!({
        "cutoff": num(cutoff),
        "tau_max": num(tau_max),
        "grid": {
            "spacing": "log",
            "tdec_min": num(run.tdec_min),
            "tdec_max": num(run.tdec_max),
            "points": run.points,
        },
        "curves": entries,
    });
    files.push(OutputFile::json("figure1_manifest.json", &manifest));
    Ok(Outcome { summary: format!("figure1: {} curve(s), {} points each", curves.len(), run.points), files })
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DpeakRun {
    pub tau_max: f64,
    pub points: usize,
    pub eps_ds: f64,
}

impl Default for DpeakRun {
    fn default() -> Self {
        Self { tau_max: 5.0, points: 200, eps_ds: 1.0 }
    }
}

pub fn dpeak(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run: DpeakRun = cfg.run_params()?;
    if run.points < 2 || !(run.tau_max > 0.0) {
        return Err(CliError::Config("dpeak needs points >= 2 and tau_max > 0".into()));
    }
    let spec = match cfg.bath()? {
        None => BathSpec::Spectral { m: 3, cutoff: 5.0, tau_max: None, grid_points: None },
        Some(b) => b.single()?,
    };
    let corr = spec.build(run.tau_max)?;
    let p = DecoherenceParams::new(run.eps_ds, &corr)?;
    let taus: Vec<f64> = (0..run.points).map(|i| run.tau_max * i as f64 / (run.points - 1) as f64).collect();
    let values = taus.par_iter().map(|&t| d_peak(&p, t)).collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["tau", "d_peak"]);
    for (t, d) in taus.iter().zip(&values) {
        table.push(vec![(*t).into(), (*d).into()]);
    }
    Ok(Outcome {
        summary: format!("dpeak: {} points on [0, {}]", run.points, run.tau_max),
        files: vec![OutputFile::table("dpeak", &table, cfg.output.format)],
    })
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveRun {
    /// Snapshot times; defaults to `0, t_ent, t_dec, max(t_ent, 5 t_dec)`.
    pub times: Option<Vec<f64>>,
}

pub fn build_setup(cfg: &RunConfig) -> Result<MeasurementSetup, CliError> {
    let pointer = *cfg.require(&cfg.pointer, "pointer")?;
    let object = cfg.require(&cfg.object, "object")?;
    let eps = cfg.require(&cfg.coupling, "coupling")?.epsilon;
    let spec = cfg
        .bath()?
        .ok_or_else(|| CliError::Config("missing bath section (`spectral` or `preset`)".into()))?
        .single()?;
    let corr: BathCorrelator = spec.build(100.0)?;
    Ok(MeasurementSetup::from_spec(object, eps, pointer, corr)?)
}

fn label(s: f64) -> String {
    format!("s={}", crate::output::fmt_f64(s))
}

pub fn evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let run: EvolveRun = cfg.run_params()?;
    let setup = build_setup(cfg)?;
    let base = setup.validate_timescales(0.0);
    let times = match run.times {
        Some(t) => {
            if t.is_empty() || t.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(CliError::Config("run.times must be a non-empty list of times >= 0".into()));
            }
            t
        }
        None => {
            let t_ent = setup.entanglement_time()?;
            let t_dec = setup.max_decoherence_time()?;
            vec![0.0, t_ent, t_dec, t_ent.max(5.0 * t_dec)]
        }
    };

    let first = setup.snapshot(0.0)?;
    let snapshots = times.par_iter().map(|&t| setup.snapshot(t)).collect::<Result<Vec<_>, _>>()?;
    let reports: Vec<_> = times.iter().map(|&t| setup.validate_timescales(t)).collect();

    let eig = setup.eigenvalues();
    let mut files = Vec::new();
    let mut columns = vec!["x".to_string()];
    columns.extend(eig.iter().map(|&s| label(s)));
    let cols: Vec<&str> = columns.iter().map(String::as_str).collect();
    for (k, snap) in snapshots.iter().enumerate() {
        let mut t = Table::new(&cols);
        for (i, &x) in snap.grid.iter().enumerate() {
            let mut row: Vec<Cell> = vec![x.into()];
            row.extend(snap.marginals.iter().map(|m| Cell::Num(m[i])));
            t.push(row);
        }
        files.push(OutputFile::table(&format!("marginals_{k:03}"), &t, cfg.output.format));
    }

    let mut summary = Table::new(&[
        "t",
        "s",
        "s_prime",
        "max_element",
        "max_element_ratio",
        "reduced_coherence",
        "born_s",
        "born_s_prime",
    ]);
    for snap in &snapshots {
        for (p, p0) in snap.pairs.iter().zip(&first.pairs) {
            let i = eig.iter().position(|&s| s == p.s).expect("pair from spectrum");
            let j = eig.iter().position(|&s| s == p.s_prime).expect("pair from spectrum");
            let ratio = if p0.max_element > 0.0 { p.max_element / p0.max_element } else { 0.0 };
            summary.push(vec![
                snap.t.into(),
                p.s.into(),
                p.s_prime.into(),
                p.max_element.into(),
                ratio.into(),
                p.reduced_coherence.into(),
                snap.born_weights[i].into(),
                snap.born_weights[j].into(),
            ]);
        }
    }
    files.push(OutputFile::table("summary", &summary, cfg.output.format));

    let g = gamma0(setup.correlator());
    let scales = setup.pointer().scales();
    let report = json!({
        "gamma0": num(g.value),
        "t_ent": base.t_ent.map(num),
        "t_dec": base.t_dec.map(num),
        "t_int": base.t_int.map(num),
        "t_s": num(base.t_s),
        "t_p": num(base.t_p),
        "regime": base.t_dec.map(|t| classify_regime(t).label()),
        "length_scales": {
            "lambda_th": num(scales.lambda_th),
            "delta_th": num(scales.delta_th),
            "delta_eff": num(scales.delta_eff),
            "w_eff": scales.w_eff.map(num),
            "v0_eff": scales.v0_eff.map(num),
            "delta_class": num(scales.delta_class),
        },
        "warnings": setup.warnings().iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        "snapshots": reports.iter().enumerate().map(|(k, r)| json!({
            "index": k,
            "t": num(r.t),
            "ratios": r.ratios.iter().map(|q| json!({"name": q.name, "value": num(q.value)})).collect::<Vec<_>>(),
            "within_threshold": r.all_within(),
            "warnings": r.warnings.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
        })).collect::<Vec<Value>>(),
    });
    files.push(OutputFile::json("timescales.json", &report));
    Ok(Outcome { summary: format!("evolve: {} snapshot(s)", snapshots.len()), files })
}

pub fn oracle_check(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = cfg.require(&cfg.oracle, "oracle")?;
    if !(o.tolerance >= 0.0) {
        return Err(CliError::Config(format!("oracle tolerance must be >= 0, got {}", o.tolerance)));
    }
    let bath = DiscreteBath::new(o.modes.clone(), o.n_fock)?;
    let epsilon = cfg.coupling.as_ref().map_or(1.0, |c| c.epsilon);
    let setup = OracleSetup { epsilon, s: o.s, s_prime: o.s_prime, x: o.x, x_prime: o.x_prime };
    let times = match &o.times {
        Some(t) if t.is_empty() || t.iter().any(|&v| !(v >= 0.0 && v.is_finite())) => {
            return Err(CliError::Config("oracle.times must be a non-empty list of times >= 0".into()))
        }
        Some(t) => t.clone(),
        None => (0..10).map(|i| 0.1 + 2.9 * i as f64 / 9.0).collect(),
    };
    let report = compare_with_qclt(&bath, &setup, &times, o.steps)?;
    let mut table = Table::new(&["t", "exact_abs", "qclt", "rel_deviation", "phase", "step_delta"]);
    for r in &report.rows {
        table.push(vec![
            r.t.into(),
            r.exact_abs.into(),
            r.qclt.into(),
            r.rel_deviation.into(),
            r.phase.into(),
            r.step_delta.into(),
        ]);
    }
    let outcome = Outcome {
        summary: format!("oracle-check: max relative deviation {:e} (tolerance {:e})", report.max_deviation, o.tolerance),
        files: vec![OutputFile::table("oracle", &table, cfg.output.format)],
    };
    if report.max_deviation > o.tolerance {
        return Err(CliError::OracleDeviation { outcome, deviation: report.max_deviation, tolerance: o.tolerance });
    }
    Ok(outcome)
}
