use rabi_core::dynamics::{max_difference, recommended_n_tr, revival_contrast, rms_difference};
use rabi_core::observables::LevelRow;
use rabi_core::strong::{perturbative_evolution, perturbative_population, printed_cutoffs};
use rabi_core::{
    emission_spectrum, evolve_exact, evolve_rwa, level_diagram, mean_photon_ground, solve_fock_oracle, DynamicsResult,
    Error, Method, ModelParams, SectorPair,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::{Cell, Sink, Table};

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;
pub const EXIT_TRUNCATION: i32 = 3;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Truncation { .. } => EXIT_TRUNCATION,
            Error::Invariant(_) | Error::NoConvergence { .. } => EXIT_INVARIANT,
            Error::Domain(_) | Error::InvalidParams(_) => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: format!("output: {e}"),
        }
    }
}

pub fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type Outcome = Result<Value, Failure>;

fn grid(cfg: &RunConfig) -> Result<Vec<f64>, Failure> {
    cfg.sweep.points().map_err(usage)
}

fn at(model: &ModelParams, g: f64) -> ModelParams {
    ModelParams { g, ..*model }
}

fn level_columns(k: usize) -> Vec<String> {
    let mut h = vec!["g".to_string()];
    h.extend((0..k).map(|i| format!("E{i}")));
    h.extend((0..k).map(|i| format!("parity{i}")));
    h
}

fn level_cells(row: &LevelRow, k: usize) -> Vec<Cell> {
    let mut cells = vec![Cell::Num(row.g)];
    cells.extend((0..k).map(|i| Cell::Num(row.levels[i].energy)));
    cells.extend((0..k).map(|i| Cell::Text(row.levels[i].parity.symbol().to_string())));
    cells
}

pub fn levels(cfg: &RunConfig, sink: &mut Sink) -> Outcome {
    cfg.model.validate()?;
    let g = grid(cfg)?;
    let k = cfg.sweep.levels;
    if k == 0 || k > 2 * (cfg.model.n_tr + 1) {
        return Err(usage(format!("levels must lie in 1..={}", 2 * (cfg.model.n_tr + 1))));
    }
    let rows = level_diagram(&cfg.model, &g, k)?;
    let photons: Vec<f64> = g
        .par_iter()
        .map(|&x| mean_photon_ground(&at(&cfg.model, x)))
        .collect::<Result<_, _>>()?;
    let mut lv = Table::new(level_columns(k));
    for row in &rows {
        lv.push(level_cells(row, k));
    }
    sink.table("levels", &lv)?;
    let mut np = Table::new(["g", "nphoton"]);
    for (x, n) in g.iter().zip(&photons) {
        np.push(vec![Cell::Num(*x), Cell::Num(*n)]);
    }
    sink.table("nphoton", &np)?;
    Ok(json!({ "points": g.len(), "levels": k }))
}

pub fn spectrum(cfg: &RunConfig, sink: &mut Sink) -> Outcome {
    let s = emission_spectrum(&cfg.model, &cfg.spectrum)?;
    let mut t = Table::new(["nu", "S"]);
    for (nu, v) in s.grid.iter().zip(&s.curve) {
        t.push(vec![Cell::Num(*nu), Cell::Num(*v)]);
    }
    sink.table("spectrum", &t)?;
    let peaks = json!({
        "kappa": s.kappa,
        "weight_sum": s.weight_sum,
        "peaks": s.peaks,
        "splittings": s.splittings,
    });
    sink.json("peaks.json", &peaks)?;
    Ok(json!({
        "peaks": s.peaks.len(),
        "splittings": s.splittings,
        "weight_sum": s.weight_sum,
        "resolved_splitting": s.has_resolved_splitting(),
    }))
}

fn run_method(cfg: &RunConfig, model: &ModelParams, method: Method) -> Result<DynamicsResult, Error> {
    let dc = cfg.dynamics.config(method);
    match method {
        Method::Exact => evolve_exact(model, &dc),
        Method::Rwa => evolve_rwa(model, &dc),
        Method::Perturbative => perturbative_evolution(model, &dc, 2),
        Method::Printed => {
            let cut = printed_cutoffs(model, dc.nbar);
            perturbative_population(model, &dc, cut, cut)
        }
    }
}

pub fn dynamics(cfg: &RunConfig, sink: &mut Sink) -> Outcome {
    let mut methods = cfg.dynamics.methods.clone();
    methods.dedup();
    if methods.is_empty() {
        return Err(usage("no dynamics method requested"));
    }
    let mut model = cfg.model;
    if cfg.dynamics.auto_n_tr {
        model.n_tr = recommended_n_tr(&model, cfg.dynamics.nbar);
    }
    let mut traces = Vec::new();
    for &m in &methods {
        traces.push(run_method(cfg, &model, m)?);
    }
    let axis = cfg.dynamics.axis.label();
    let mut per_method = serde_json::Map::new();
    for r in &traces {
        let mut t = Table::new([axis, "P"]);
        for (x, p) in r.grid.iter().zip(&r.p) {
            t.push(vec![Cell::Num(*x), Cell::Num(*p)]);
        }
        sink.table(&format!("dynamics_{}", r.method.name()), &t)?;
        let contrast = revival_contrast(r, cfg.dynamics.nbar).ok();
        per_method.insert(
            r.method.name().into(),
            json!({
                "captured_norm": r.captured_norm,
                "energy_drift": r.energy_drift,
                "spectral_width": r.spectral_width,
                "n_tr": r.n_tr,
                "n_cut": r.n_cut,
                "revival_contrast": contrast,
            }),
        );
    }
    let mut comparisons = serde_json::Map::new();
    if let Some(exact) = traces.iter().find(|r| r.method == Method::Exact) {
        let end = cfg.dynamics.t_max;
        for r in traces.iter().filter(|r| r.method != Method::Exact) {
            comparisons.insert(
                r.method.name().into(),
                json!({
                    "rms_vs_exact": rms_difference(exact, r, end)?,
                    "max_abs_vs_exact": max_difference(exact, r, end)?,
                }),
            );
        }
    }
    Ok(json!({
        "n_tr_used": model.n_tr,
        "methods": per_method,
        "comparisons": comparisons,
    }))
}

pub fn verify(cfg: &RunConfig, sink: &mut Sink) -> Outcome {
    let k = cfg.verify.levels;
    let model = cfg.model;
    let ours = SectorPair::solve(&model)?.lowest(k);
    let oracle = solve_fock_oracle(&model, cfg.verify.oracle_cut)?;
    let threshold = if model.coupling() > 2.0 { 1e-5 } else { 1e-6 } * model.omega;
    let mut t = Table::new(["level", "parity", "E_displaced", "E_oracle", "abs_diff"]);
    let mut worst: f64 = 0.0;
    println!(
        "level parity {:>24} {:>24} {:>10}",
        "displaced basis", "bare Fock", "|diff|"
    );
    for (i, (l, e)) in ours.iter().zip(&oracle.energies).enumerate() {
        let d = (l.energy - e).abs();
        worst = worst.max(d);
        println!(
            "{i:>5} {:>6} {:>24.16e} {:>24.16e} {d:>10.3e}",
            l.parity.symbol(),
            l.energy,
            e
        );
        t.push(vec![
            Cell::Int(i),
            Cell::Text(l.parity.symbol().into()),
            Cell::Num(l.energy),
            Cell::Num(*e),
            Cell::Num(d),
        ]);
    }
    sink.table("verify", &t)?;
    let pass = worst <= threshold;
    println!(
        "{} max |diff| {worst:.3e} (threshold {threshold:.0e}, n_tr={}, oracle n_cut={})",
        if pass { "PASS" } else { "FAIL" },
        model.n_tr,
        cfg.verify.oracle_cut
    );
    Ok(json!({
        "pass": pass,
        "max_abs_diff": worst,
        "threshold": threshold,
    }))
}

/// Checks the verify outcome after metadata has been written.
pub fn verify_gate(results: &Value, n_tr: usize) -> Result<(), Failure> {
    if results["pass"].as_bool() == Some(true) {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_INVARIANT,
            message: format!("verification failed; raise n_tr above {n_tr} (or the oracle cutoff) and rerun"),
        })
    }
}

pub fn sweep(cfg: &RunConfig, sink: &mut Sink) -> Outcome {
    cfg.model.validate()?;
    let g = grid(cfg)?;
    let k = cfg.sweep.levels;
    let rows: Vec<Vec<Cell>> = g
        .par_iter()
        .map(|&x| -> Result<Vec<Cell>, Error> {
            let p = at(&cfg.model, x);
            let lv = SectorPair::solve(&p)?.lowest(k.max(2));
            let s = emission_spectrum(&p, &cfg.spectrum)?;
            let mut row = vec![Cell::Num(x)];
            row.extend(lv.iter().take(k).map(|l| Cell::Num(l.energy)));
            row.push(Cell::Num(mean_photon_ground(&p)?));
            row.push(Cell::Num(lv[1].energy - lv[0].energy));
            row.push(Cell::Int(s.peaks.len()));
            row.push(Cell::Num(s.splittings.first().copied().unwrap_or(f64::NAN)));
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let mut header = vec!["g".to_string()];
    header.extend((0..k).map(|i| format!("E{i}")));
    header.extend(["nphoton", "gap", "peaks", "first_splitting"].map(String::from));
    let mut t = Table::new(header);
    for r in rows {
        t.push(r);
    }
    sink.table("sweep", &t)?;
    Ok(json!({ "points": g.len() }))
}
