//! Static observables: level diagram, ground-state photon number, and the
//! emission spectrum of the dressed ground state after an atomic flip.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelParams, Parity};
use crate::solver::{fock_cutoff, solve_sector, to_fock_basis, FockBasis, Level, SectorPair};

/// Allowed deviation of the total emission weight from 1.
pub const WEIGHT_SUM_TOL: f64 = 1e-8;

/// `⟨gs|a†a|gs⟩` of the even-parity ground state.
pub fn mean_photon_ground(params: &ModelParams) -> Result<f64> {
    let even = solve_sector(params, Parity::Even)?;
    let n_cut = fock_cutoff(&even)?;
    let gs = to_fock_basis(&even, 0, n_cut)?;
    Ok(gs.mean_photon() / gs.norm_sqr())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelRow {
    pub g: f64,
    pub levels: Vec<Level>,
}

/// Lowest `k_levels` energies, both sectors merged, for each coupling in `g_grid`.
pub fn level_diagram(base: &ModelParams, g_grid: &[f64], k_levels: usize) -> Result<Vec<LevelRow>> {
    if g_grid.is_empty() {
        return Err(Error::InvalidParams("coupling grid must not be empty".into()));
    }
    g_grid
        .par_iter()
        .map(|&g| {
            let p = ModelParams { g, ..*base };
            p.validate()?;
            Ok(LevelRow {
                g,
                levels: SectorPair::solve(&p)?.lowest(k_levels),
            })
        })
        .collect()
}

/// Vacuum Rabi splitting of the resonant RWA model, `2g`.
pub fn rwa_vacuum_splitting(params: &ModelParams) -> f64 {
    if !params.is_resonant() {
        log::warn!(
            "RWA vacuum splitting 2g assumes resonance; omega={} omega_eg={}",
            params.omega,
            params.omega_eg
        );
    }
    2.0 * params.g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    /// Lorentzian half-width, same units as ω.
    pub kappa: f64,
    pub nu_min: f64,
    pub nu_max: f64,
    pub nu_step: f64,
    /// A line is reported as a peak when its weight is at least this
    /// fraction of the total weight.
    pub weight_floor: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            kappa: 0.02,
            nu_min: 0.0,
            nu_max: 4.0,
            nu_step: 0.001,
            weight_floor: 0.01,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidParams(format!("spectrum config: {m}")));
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return bad("kappa must be > 0");
        }
        if !self.nu_min.is_finite() || !self.nu_max.is_finite() || self.nu_min >= self.nu_max {
            return bad("nu_min must be < nu_max");
        }
        if self.nu_step.is_nan() || self.nu_step <= 0.0 {
            return bad("nu_step must be > 0");
        }
        if !(self.weight_floor > 0.0 && self.weight_floor < 1.0) {
            return bad("weight_floor must lie in (0, 1)");
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let count = ((self.nu_max - self.nu_min) / self.nu_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.nu_min + i as f64 * self.nu_step).collect()
    }
}

/// A transition from odd eigenstate `index` to the even ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub frequency: f64,
    pub weight: f64,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumResult {
    pub kappa: f64,
    /// All lines, ascending in frequency.
    pub lines: Vec<Line>,
    /// Lines above the weight floor, ascending in frequency.
    pub peaks: Vec<Line>,
    pub grid: Vec<f64>,
    pub curve: Vec<f64>,
    /// Distances between consecutive reported peaks.
    pub splittings: Vec<f64>,
    pub weight_sum: f64,
}

impl SpectrumResult {
    /// `S(ν) = Σ_k w_k (κ/π) / ((ν − ν_k)² + κ²)`.
    pub fn intensity(&self, nu: f64) -> f64 {
        lorentzian_sum(&self.lines, self.kappa, nu)
    }

    /// True when the curve dips between the two lowest reported peaks.
    pub fn has_resolved_splitting(&self) -> bool {
        if self.peaks.len() < 2 {
            return false;
        }
        let (a, b) = (self.peaks[0].frequency, self.peaks[1].frequency);
        let floor = self.intensity(a).min(self.intensity(b));
        let samples = 512;
        (1..samples).any(|i| {
            let nu = a + (b - a) * i as f64 / samples as f64;
            self.intensity(nu) < floor * (1.0 - 1e-9)
        })
    }
}

fn lorentzian_sum(lines: &[Line], kappa: f64, nu: f64) -> f64 {
    let norm = kappa / std::f64::consts::PI;
    lines
        .iter()
        .map(|l| l.weight * norm / ((nu - l.frequency).powi(2) + kappa * kappa))
        .sum()
}

/// Emission after exciting the dressed ground state with `V = |e⟩⟨g| + |g⟩⟨e|`.
///
/// `V|gs⟩` lies in the odd sector; its weight on odd eigenstate `k` gives a
/// line at `E_k^− − E_0^+`.
pub fn emission_spectrum(params: &ModelParams, cfg: &SpectrumConfig) -> Result<SpectrumResult> {
    cfg.validate()?;
    let pair = SectorPair::solve(params)?;
    let basis = FockBasis::build(&pair)?;
    emission_from_basis(&basis, cfg)
}

pub fn emission_from_basis(basis: &FockBasis, cfg: &SpectrumConfig) -> Result<SpectrumResult> {
    cfg.validate()?;
    let e0 = basis.even_energies[0];
    let excited = basis.even[0].flip_atom();
    let mut lines: Vec<Line> = basis
        .odd
        .iter()
        .zip(&basis.odd_energies)
        .enumerate()
        .map(|(k, (state, &e))| Line {
            frequency: e - e0,
            weight: state.dot(&excited).powi(2),
            index: k,
        })
        .collect();
    lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
    let weight_sum: f64 = lines.iter().map(|l| l.weight).sum();
    if (weight_sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Err(Error::Invariant(format!(
            "emission weights sum to {weight_sum:.12}, expected 1 within {WEIGHT_SUM_TOL:e}"
        )));
    }
    let peaks: Vec<Line> = lines
        .iter()
        .copied()
        .filter(|l| l.weight >= cfg.weight_floor * weight_sum)
        .collect();
    let splittings = peaks.windows(2).map(|w| w[1].frequency - w[0].frequency).collect();
    let grid = cfg.grid();
    let curve = grid.iter().map(|&nu| lorentzian_sum(&lines, cfg.kappa, nu)).collect();
    Ok(SpectrumResult {
        kappa: cfg.kappa,
        lines,
        peaks,
        grid,
        curve,
        splittings,
        weight_sum,
    })
}
