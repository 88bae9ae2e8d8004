//! Atomic population inversion for an atom starting in `|g⟩` and the field in
//! a real coherent state `|α⟩`.
//!
//! The exact trace expands the initial state in reconstructed eigenstates of
//! both parity sectors and evolves each component with its own phase. All
//! frame bookkeeping is avoided by working in the bare Fock basis
//! throughout.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boson::{poisson_weights, CoherentState};
use crate::error::{Error, Result};
use crate::fock::{apply_hamiltonian, ComplexFock, FockVector};
use crate::model::{ModelParams, Parity};
use crate::solver::{default_fock_cutoff, FockBasis, SectorPair};

/// Minimum captured norm of the initial state in the truncated eigenbasis.
pub const CAPTURED_NORM_TOL: f64 = 1e-8;
/// Allowed deviation of `Tr ρ_a` from 1.
pub const TRACE_TOL: f64 = 1e-8;
/// Number of samples on which `⟨H⟩` is re-evaluated in the bare basis.
const ENERGY_PROBES: usize = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rwa,
    /// Zeroth-order strong-coupling states with perturbative energies in the phases.
    Perturbative,
    /// The closed cosine-sum formula of strong-coupling theory, evaluated as written.
    Printed,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Rwa => "rwa",
            Method::Perturbative => "perturbative",
            Method::Printed => "printed",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Method::Exact),
            "rwa" => Ok(Method::Rwa),
            "perturbative" => Ok(Method::Perturbative),
            "printed" => Ok(Method::Printed),
            other => Err(Error::InvalidParams(format!("unknown dynamics method {other:?}"))),
        }
    }
}

/// Output time axis. Internally evolution always runs in physical time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeAxis {
    /// `τ = 2gt`.
    Tau,
    /// `ωt`.
    OmegaT,
}

impl TimeAxis {
    pub fn label(self) -> &'static str {
        match self {
            TimeAxis::Tau => "tau",
            TimeAxis::OmegaT => "omega_t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub nbar: f64,
    /// End of the grid, in axis units.
    pub t_max: f64,
    /// Grid step, in axis units.
    pub t_step: f64,
    pub axis: TimeAxis,
    pub method: Method,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        Self {
            nbar: 10.0,
            t_max: 100.0,
            t_step: 0.02,
            axis: TimeAxis::Tau,
            method: Method::Exact,
        }
    }
}

impl DynamicsConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.nbar >= 0.0 && self.nbar.is_finite()) {
            return Err(Error::InvalidParams(format!("nbar must be >= 0, got {}", self.nbar)));
        }
        if !(self.t_step > 0.0 && self.t_step.is_finite()) {
            return Err(Error::InvalidParams(format!("t_step must be > 0, got {}", self.t_step)));
        }
        if !(self.t_max >= 0.0 && self.t_max.is_finite()) {
            return Err(Error::InvalidParams(format!("t_max must be >= 0, got {}", self.t_max)));
        }
        Ok(())
    }

    /// Sample points in axis units.
    pub fn grid(&self) -> Vec<f64> {
        let count = (self.t_max / self.t_step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| i as f64 * self.t_step).collect()
    }

    /// Sample points converted to physical time.
    pub fn physical_times(&self, params: &ModelParams) -> Result<Vec<f64>> {
        let scale = match self.axis {
            TimeAxis::Tau => {
                if params.g == 0.0 {
                    return Err(Error::InvalidParams(
                        "the tau = 2gt axis is undefined at g = 0; use the omega-t axis".into(),
                    ));
                }
                1.0 / (2.0 * params.g)
            }
            TimeAxis::OmegaT => 1.0 / params.omega,
        };
        Ok(self.grid().into_iter().map(|x| x * scale).collect())
    }
}

/// Reduced atomic density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomDensity {
    pub ee: f64,
    pub gg: f64,
    /// `ρ_eg = ⟨e|ρ|g⟩`.
    pub eg: Complex64,
}

impl AtomDensity {
    pub fn trace(&self) -> f64 {
        self.ee + self.gg
    }

    pub fn inversion(&self) -> f64 {
        self.ee - self.gg
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * self.trace();
        let r = (0.25 * (self.ee - self.gg).powi(2) + self.eg.norm_sqr()).sqrt();
        [mean - r, mean + r]
    }
}

/// `P = ρ_ee − ρ_gg` for each sample; fails if a trace strays from 1 by more than `1e−8`.
pub fn population_trace(rho: &[AtomDensity]) -> Result<Vec<f64>> {
    rho.iter()
        .enumerate()
        .map(|(i, r)| {
            let tr = r.trace();
            if (tr - 1.0).abs() > TRACE_TOL {
                return Err(Error::Invariant(format!("Tr rho at sample {i} is {tr:.12}")));
            }
            Ok(r.inversion())
        })
        .collect()
}

/// Projection coefficients of the initial state onto the eigenstates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionState {
    pub f_even: Vec<f64>,
    pub f_odd: Vec<f64>,
    pub captured_norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsResult {
    pub method: Method,
    pub axis: TimeAxis,
    /// Sample points in axis units.
    pub grid: Vec<f64>,
    pub p: Vec<f64>,
    pub captured_norm: Option<f64>,
    /// `max_t |⟨H⟩(t) − ⟨H⟩(0)|`, re-evaluated in the bare basis.
    pub energy_drift: Option<f64>,
    /// Spread of the energies carrying weight; the scale for `energy_drift`.
    pub spectral_width: Option<f64>,
    pub n_tr: Option<usize>,
    pub n_cut: Option<usize>,
    #[serde(skip)]
    pub rho: Option<Vec<AtomDensity>>,
}

impl DynamicsResult {
    pub(crate) fn plain(method: Method, cfg: &DynamicsConfig, p: Vec<f64>) -> Self {
        Self {
            method,
            axis: cfg.axis,
            grid: cfg.grid(),
            p,
            captured_norm: None,
            energy_drift: None,
            spectral_width: None,
            n_tr: None,
            n_cut: None,
            rho: None,
        }
    }

    pub fn step(&self) -> f64 {
        if self.grid.len() < 2 {
            0.0
        } else {
            self.grid[1] - self.grid[0]
        }
    }
}

/// Displaced-basis truncation large enough for `|g⟩|α⟩` at coupling `g/ω`.
pub fn recommended_n_tr(params: &ModelParams, nbar: f64) -> usize {
    let r = nbar.max(0.0).sqrt() + params.coupling();
    let need = (r * r + 10.0 * r + 20.0).ceil() as usize;
    need.max(params.n_tr)
}

fn coherent_cutoff(nbar: f64) -> usize {
    (nbar + 12.0 * nbar.sqrt() + 20.0).ceil() as usize
}

/// A state written as `Σ_k f_k e^{−iE_k t}|φ_k⟩` with the `φ_k` held in the bare basis.
pub(crate) struct Expansion {
    n_cut: usize,
    energies: Vec<f64>,
    coeffs: Vec<f64>,
    // row-major (n_cut+1) × K
    phi_e: Vec<f64>,
    phi_g: Vec<f64>,
}

impl Expansion {
    /// Project `psi0` on `states`; returns the expansion (renormalized to the
    /// captured norm) and the raw projection coefficients.
    pub(crate) fn project(states: &[(f64, &FockVector)], psi0: &FockVector) -> (Self, Vec<f64>, f64) {
        let raw: Vec<f64> = states.iter().map(|(_, s)| s.dot(psi0)).collect();
        let captured: f64 = raw.iter().map(|f| f * f).sum();
        let scale = if captured > 0.0 { captured.sqrt().recip() } else { 0.0 };
        let keep: Vec<usize> = (0..states.len()).filter(|&k| raw[k].abs() > 1e-16).collect();
        let n_cut = psi0.n_cut;
        let kk = keep.len();
        let mut phi_e = vec![0.0; (n_cut + 1) * kk];
        let mut phi_g = vec![0.0; (n_cut + 1) * kk];
        for (j, &k) in keep.iter().enumerate() {
            let s = states[k].1;
            for n in 0..=n_cut.min(s.n_cut) {
                phi_e[n * kk + j] = s.amp_e[n];
                phi_g[n * kk + j] = s.amp_g[n];
            }
        }
        let exp = Self {
            n_cut,
            energies: keep.iter().map(|&k| states[k].0).collect(),
            coeffs: keep.iter().map(|&k| raw[k] * scale).collect(),
            phi_e,
            phi_g,
        };
        (exp, raw, captured)
    }

    pub(crate) fn spectral_width(&self) -> f64 {
        let (lo, hi) = self
            .energies
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &e| (a.min(e), b.max(e)));
        if hi > lo {
            hi - lo
        } else {
            0.0
        }
    }

    pub(crate) fn state_at(&self, t: f64) -> ComplexFock {
        let kk = self.energies.len();
        let c: Vec<Complex64> = self
            .energies
            .iter()
            .zip(&self.coeffs)
            .map(|(&e, &f)| Complex64::from_polar(f, -e * t))
            .collect();
        let mut out = ComplexFock::zeros(self.n_cut);
        for n in 0..=self.n_cut {
            let re = &self.phi_e[n * kk..(n + 1) * kk];
            let rg = &self.phi_g[n * kk..(n + 1) * kk];
            let mut se = Complex64::new(0.0, 0.0);
            let mut sg = Complex64::new(0.0, 0.0);
            for j in 0..kk {
                se += c[j] * re[j];
                sg += c[j] * rg[j];
            }
            out.amp_e[n] = se;
            out.amp_g[n] = sg;
        }
        out
    }

    pub(crate) fn density_at(&self, t: f64) -> AtomDensity {
        let psi = self.state_at(t);
        let ee = psi.amp_e.iter().map(|a| a.norm_sqr()).sum();
        let gg = psi.amp_g.iter().map(|a| a.norm_sqr()).sum();
        let eg = psi.amp_e.iter().zip(&psi.amp_g).map(|(e, g)| e * g.conj()).sum();
        AtomDensity { ee, gg, eg }
    }

    /// `max |⟨H⟩(t) − ⟨H⟩(t₀)|` over a subsample of `times`.
    pub(crate) fn energy_drift(&self, params: &ModelParams, times: &[f64]) -> f64 {
        if times.is_empty() {
            return 0.0;
        }
        let stride = (times.len() / (ENERGY_PROBES - 1)).max(1);
        let mut probes: Vec<f64> = times.iter().step_by(stride).copied().collect();
        probes.push(*times.last().unwrap());
        let energies: Vec<f64> = probes
            .par_iter()
            .map(|&t| {
                let psi = self.state_at(t);
                psi.dot(&apply_hamiltonian(params, &psi)).re
            })
            .collect();
        energies.iter().map(|e| (e - energies[0]).abs()).fold(0.0, f64::max)
    }
}

fn initial_state(nbar: f64, n_cut: usize) -> Result<FockVector> {
    let coherent = CoherentState::from_nbar(nbar)?;
    let amps = coherent.amplitudes(n_cut);
    let mass: f64 = amps.iter().map(|a| a * a).sum();
    if mass < 1.0 - 1e-12 {
        return Err(Error::Truncation {
            what: format!("coherent-state mass below n_cut={n_cut}"),
            achieved: mass,
            required: 1.0 - 1e-12,
            advice: format!("raise n_cut to at least {}", coherent_cutoff(nbar)),
        });
    }
    Ok(FockVector::ground_atom(&amps))
}

/// Bare cutoff for a dynamics run: covers every eigenstate and the initial coherent state.
fn dynamics_basis(params: &ModelParams, nbar: f64) -> Result<FockBasis> {
    let pair = SectorPair::solve(params)?;
    let basis = FockBasis::build(&pair)?;
    let need = coherent_cutoff(nbar).max(default_fock_cutoff(params));
    if basis.n_cut >= need {
        Ok(basis)
    } else {
        FockBasis::at_cutoff(&pair, need)
    }
}

/// Expansion coefficients of `|g⟩|α⟩` in the truncated eigenbasis.
pub fn expand_initial_state(params: &ModelParams, nbar: f64) -> Result<ExpansionState> {
    let basis = dynamics_basis(params, nbar)?;
    let psi0 = initial_state(nbar, basis.n_cut)?;
    let f = |p: Parity| -> Vec<f64> { basis.states(p).iter().map(|s| s.dot(&psi0)).collect() };
    let f_even = f(Parity::Even);
    let f_odd = f(Parity::Odd);
    let captured_norm = f_even.iter().chain(&f_odd).map(|x| x * x).sum();
    Ok(ExpansionState {
        f_even,
        f_odd,
        captured_norm,
    })
}

/// Exact evolution of `|g⟩|α⟩` under the full Hamiltonian.
///
/// Uses `params.n_tr` as given; raise it (see [`recommended_n_tr`]) if the
/// captured-norm check fails.
pub fn evolve_exact(params: &ModelParams, cfg: &DynamicsConfig) -> Result<DynamicsResult> {
    params.validate()?;
    cfg.validate()?;
    let times = cfg.physical_times(params)?;
    let basis = dynamics_basis(params, cfg.nbar)?;
    let psi0 = initial_state(cfg.nbar, basis.n_cut)?;
    let states: Vec<(f64, &FockVector)> = Parity::BOTH
        .iter()
        .flat_map(|&p| basis.energies(p).iter().copied().zip(basis.states(p)))
        .collect();
    let (exp, _, captured) = Expansion::project(&states, &psi0);
    if captured < 1.0 - CAPTURED_NORM_TOL {
        return Err(Error::Truncation {
            what: format!("captured norm of the initial state at n_tr={}", params.n_tr),
            achieved: captured,
            required: 1.0 - CAPTURED_NORM_TOL,
            advice: format!(
                "raise n_tr to at least {}",
                recommended_n_tr(params, cfg.nbar).max(params.n_tr + 1)
            ),
        });
    }
    let rho: Vec<AtomDensity> = times.par_iter().map(|&t| exp.density_at(t)).collect();
    let p = population_trace(&rho)?;
    let drift = exp.energy_drift(params, &times);
    Ok(DynamicsResult {
        method: Method::Exact,
        axis: cfg.axis,
        grid: cfg.grid(),
        p,
        captured_norm: Some(captured),
        energy_drift: Some(drift),
        spectral_width: Some(exp.spectral_width()),
        n_tr: Some(params.n_tr),
        n_cut: Some(basis.n_cut),
        rho: Some(rho),
    })
}

/// Resonant rotating-wave dynamics of `|g⟩|α⟩`:
/// `P(t) = −Σₙ pₙ cos(2g√n t)` with Poisson weights `pₙ`.
pub fn evolve_rwa(params: &ModelParams, cfg: &DynamicsConfig) -> Result<DynamicsResult> {
    params.validate()?;
    cfg.validate()?;
    if !params.is_resonant() {
        return Err(Error::InvalidParams(
            "RWA reference dynamics is defined for omega_eg = omega only".into(),
        ));
    }
    let mut weights = poisson_weights(cfg.nbar, 1e-12);
    // renormalize the truncated distribution so that P(0) = −1 exactly
    let mass: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= mass);
    let rabi: Vec<f64> = (0..weights.len()).map(|n| 2.0 * params.g * (n as f64).sqrt()).collect();
    let p = cfg
        .physical_times(params)?
        .iter()
        .map(|&t| -weights.iter().zip(&rabi).map(|(w, r)| w * (r * t).cos()).sum::<f64>())
        .collect();
    Ok(DynamicsResult::plain(Method::Rwa, cfg, p))
}

/// RWA revival time in `τ = 2gt` units, `4π√n̄`.
pub fn rwa_revival_tau(nbar: f64) -> f64 {
    4.0 * std::f64::consts::PI * nbar.sqrt()
}

/// Variance of `P` on the collapse plateau `τ ∈ [0.3, 0.6]·τ_r` divided by its
/// variance on the first revival `τ ∈ [0.85, 1.15]·τ_r`, `τ_r = 4π√n̄`.
///
/// Small for a clean collapse and revival, of order one when the collapse
/// never forms.
pub fn revival_contrast(result: &DynamicsResult, nbar: f64) -> Result<f64> {
    if result.axis != TimeAxis::Tau {
        return Err(Error::InvalidParams("revival contrast needs a tau axis".into()));
    }
    let tr = rwa_revival_tau(nbar);
    let window = |lo: f64, hi: f64| -> Result<f64> {
        let vals: Vec<f64> = result
            .grid
            .iter()
            .zip(&result.p)
            .filter(|(x, _)| **x >= lo * tr && **x <= hi * tr)
            .map(|(_, p)| *p)
            .collect();
        if vals.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "grid does not cover tau in [{:.2}, {:.2}]",
                lo * tr,
                hi * tr
            )));
        }
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        Ok(vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64)
    };
    let plateau = window(0.3, 0.6)?;
    let revival = window(0.85, 1.15)?;
    if revival == 0.0 {
        return Err(Error::Invariant("flat revival window".into()));
    }
    Ok(plateau / revival)
}

/// Pearson correlation between `P(x)` and `P(x + lag)` for grid points `x ≤ window`.
///
/// `lag` must be a whole number of grid steps.
pub fn lagged_correlation(result: &DynamicsResult, lag: f64, window: f64) -> Result<f64> {
    let step = result.step();
    if step <= 0.0 {
        return Err(Error::InvalidParams("need at least two samples".into()));
    }
    let shift = (lag / step).round() as usize;
    if ((shift as f64) * step - lag).abs() > 1e-9 * lag.abs().max(1.0) {
        return Err(Error::InvalidParams(format!(
            "lag {lag} is not a multiple of the grid step {step}"
        )));
    }
    let count = result.grid.iter().take_while(|&&x| x <= window + 1e-12).count();
    if count + shift > result.p.len() || count < 2 {
        return Err(Error::InvalidParams(
            "grid too short for the requested lag and window".into(),
        ));
    }
    let a = &result.p[..count];
    let b = &result.p[shift..shift + count];
    Ok(pearson(a, b))
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}

/// Root-mean-square difference over grid points `x ≤ upto`; grids must match.
pub fn rms_difference(a: &DynamicsResult, b: &DynamicsResult, upto: f64) -> Result<f64> {
    if a.grid.len() != b.grid.len()
        || a.axis != b.axis
        || a.grid.iter().zip(&b.grid).any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::InvalidParams("traces are on different grids".into()));
    }
    let diffs: Vec<f64> = a
        .grid
        .iter()
        .zip(a.p.iter().zip(&b.p))
        .filter(|(x, _)| **x <= upto + 1e-12)
        .map(|(_, (p, q))| (p - q).powi(2))
        .collect();
    if diffs.is_empty() {
        return Err(Error::InvalidParams("empty comparison window".into()));
    }
    Ok((diffs.iter().sum::<f64>() / diffs.len() as f64).sqrt())
}

/// Largest `|Δ P|` over grid points `x ≤ upto`.
pub fn max_difference(a: &DynamicsResult, b: &DynamicsResult, upto: f64) -> Result<f64> {
    if a.grid.len() != b.grid.len() || a.axis != b.axis {
        return Err(Error::InvalidParams("traces are on different grids".into()));
    }
    Ok(a.grid
        .iter()
        .zip(a.p.iter().zip(&b.p))
        .filter(|(x, _)| **x <= upto + 1e-12)
        .map(|(_, (p, q))| (p - q).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn population_from_density() {
        let d = |ee: f64, gg: f64| AtomDensity {
            ee,
            gg,
            eg: Complex64::new(0.0, 0.0),
        };
        let p = population_trace(&[d(1.0, 0.0), d(0.5, 0.5), d(0.25, 0.75)]).unwrap();
        assert_eq!(p, vec![1.0, 0.0, -0.5]);
        assert!(matches!(population_trace(&[d(0.6, 0.6)]), Err(Error::Invariant(_))));
    }

    #[test]
    fn density_eigenvalues() {
        let r = AtomDensity {
            ee: 0.5,
            gg: 0.5,
            eg: Complex64::new(0.5, 0.0),
        };
        let [lo, hi] = r.eigenvalues();
        assert!(lo.abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
    }

    #[test]
    fn config_grid_and_validation() {
        let cfg = DynamicsConfig {
            t_max: 1.0,
            t_step: 0.25,
            ..Default::default()
        };
        assert_eq!(cfg.grid(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(DynamicsConfig::default().grid().len(), 5001);
        assert!(DynamicsConfig {
            t_step: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(DynamicsConfig {
            nbar: -1.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(cfg.physical_times(&ModelParams::resonant(0.0)).is_err());
        let t = cfg.physical_times(&ModelParams::resonant(0.5)).unwrap();
        assert_eq!(t[4], 1.0);
    }

    #[test]
    fn rwa_vacuum_stays_put() {
        let cfg = DynamicsConfig {
            nbar: 0.0,
            t_max: 10.0,
            t_step: 0.5,
            ..Default::default()
        };
        let r = evolve_rwa(&ModelParams::resonant(0.1), &cfg).unwrap();
        assert!(r.p.iter().all(|&p| (p + 1.0).abs() < 1e-15));
    }

    #[test]
    fn rwa_is_tau_invariant() {
        let cfg = DynamicsConfig {
            t_max: 60.0,
            t_step: 0.05,
            ..Default::default()
        };
        let a = evolve_rwa(&ModelParams::resonant(0.01), &cfg).unwrap();
        let b = evolve_rwa(&ModelParams::resonant(0.05), &cfg).unwrap();
        assert!((a.p[0] + 1.0).abs() < 1e-14);
        for (x, y) in a.p.iter().zip(&b.p) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn rwa_single_photon_number() {
        // the Poisson sum at tiny nbar is dominated by n = 0, 1
        let nbar = 1e-3;
        let cfg = DynamicsConfig {
            nbar,
            t_max: 5.0,
            t_step: 0.5,
            ..Default::default()
        };
        let r = evolve_rwa(&ModelParams::resonant(0.1), &cfg).unwrap();
        for (tau, p) in r.grid.iter().zip(&r.p) {
            let p0 = (-nbar).exp();
            let expect = -(p0 + p0 * nbar * tau.cos()) - (1.0 - p0 - p0 * nbar) * (2f64.sqrt() * tau).cos();
            assert!((p - expect).abs() < 1e-6, "tau={tau}: {p} vs {expect}");
        }
    }

    #[test]
    fn rwa_needs_resonance() {
        let p = ModelParams::resonant(0.1).with_omega_eg(0.9);
        assert!(evolve_rwa(&p, &DynamicsConfig::default()).is_err());
    }

    #[test]
    fn rwa_first_revival_location() {
        let cfg = DynamicsConfig {
            t_max: 60.0,
            t_step: 0.01,
            ..Default::default()
        };
        let r = evolve_rwa(&ModelParams::resonant(0.02), &cfg).unwrap();
        let (tau_at, _) = r
            .grid
            .iter()
            .zip(&r.p)
            .filter(|(x, _)| **x > 10.0)
            .fold(
                (0.0, 0.0),
                |(bx, bp), (x, p)| if p.abs() > bp { (*x, p.abs()) } else { (bx, bp) },
            );
        let tr = rwa_revival_tau(10.0);
        assert!((tau_at - tr).abs() < 0.1 * tr, "revival at {tau_at}, estimate {tr}");
    }

    #[test]
    fn uncoupled_exact_is_frozen() {
        let p = ModelParams::resonant(0.0);
        let cfg = DynamicsConfig {
            axis: TimeAxis::OmegaT,
            t_max: 20.0,
            t_step: 0.5,
            ..Default::default()
        };
        let r = evolve_exact(&p.with_n_tr(recommended_n_tr(&p, 10.0)), &cfg).unwrap();
        for v in &r.p {
            assert!((v + 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn undersized_basis_reports_truncation() {
        let p = ModelParams::resonant(2.0).with_n_tr(10);
        let cfg = DynamicsConfig {
            axis: TimeAxis::OmegaT,
            t_max: 1.0,
            t_step: 0.5,
            ..Default::default()
        };
        match evolve_exact(&p, &cfg) {
            Err(Error::Truncation { advice, .. }) => assert!(advice.contains("n_tr")),
            other => panic!("expected truncation, got {other:?}"),
        }
    }

    #[test]
    fn correlation_and_rms_helpers() {
        let cfg = DynamicsConfig {
            axis: TimeAxis::OmegaT,
            t_max: 20.0,
            t_step: 0.25,
            ..Default::default()
        };
        let p: Vec<f64> = cfg
            .grid()
            .iter()
            .map(|x| (std::f64::consts::FRAC_PI_2 * x).sin())
            .collect();
        let r = DynamicsResult::plain(Method::Rwa, &cfg, p);
        assert!((lagged_correlation(&r, 4.0, 10.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((lagged_correlation(&r, 2.0, 10.0).unwrap() + 1.0).abs() < 1e-12);
        assert!(lagged_correlation(&r, 0.3, 10.0).is_err());
        assert_eq!(rms_difference(&r, &r, 20.0).unwrap(), 0.0);
        assert_eq!(max_difference(&r, &r, 20.0).unwrap(), 0.0);
    }

    #[test]
    fn method_names_round_trip() {
        for m in [Method::Exact, Method::Rwa, Method::Perturbative, Method::Printed] {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }
}
