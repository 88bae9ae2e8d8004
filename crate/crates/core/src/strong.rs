//! Strong-coupling perturbation theory in `ω_eg`.
//!
//! At `ω_eg = 0` the eigenstates are displaced Fock states `|k±⟩` with
//! energies `ωk − g²/ω`, doubly degenerate across the two parity sectors.
//! The atomic splitting enters through `L_kl = 2(−1)^l ⟨k|D(2g/ω)|l⟩`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boson::{coherent_amplitude, parity_sign, OverlapTable};
use crate::dynamics::{recommended_n_tr, DynamicsConfig, DynamicsResult, Expansion, Method, CAPTURED_NORM_TOL};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::model::{ModelParams, Parity};
use crate::solver::{default_fock_cutoff, Reconstructor};

/// Coverage each shifted coherent distribution must reach inside the cutoffs.
pub const COVERAGE_TOL: f64 = 1e-10;
/// Tail magnitude of the second-order sum above which a warning is attached.
pub const TAIL_WARN: f64 = 1e-12;
/// How many of the last terms of the second-order sum make up the tail estimate.
const TAIL_TERMS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbativeLevel {
    pub k: usize,
    pub sector: Parity,
    /// `ωk − g²/ω`.
    pub e0: f64,
    /// `∓(ω_eg/4) L_kk`, upper sign for the even sector.
    pub e1: f64,
    /// `(ω_eg/4)² Σ_{l≠k} L_kl² / (ω(k − l))`.
    pub e2: f64,
}

impl PerturbativeLevel {
    pub fn energy(&self, order: usize) -> f64 {
        match order {
            0 => self.e0,
            1 => self.e0 + self.e1,
            _ => self.e0 + self.e1 + self.e2,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbativeSpectrum {
    pub l_cut: usize,
    /// Ordered by `k`, even before odd.
    pub levels: Vec<PerturbativeLevel>,
    /// Largest summed magnitude of the last few second-order terms over all `k`.
    pub tail: f64,
    pub tail_warning: Option<String>,
}

impl PerturbativeSpectrum {
    pub fn level(&self, k: usize, sector: Parity) -> Option<&PerturbativeLevel> {
        self.levels.iter().find(|l| l.k == k && l.sector == sector)
    }

    /// `E_k^− − E_k^+` to first order, `(ω_eg/2) L_kk`.
    pub fn doublet_splitting(&self, k: usize) -> Option<f64> {
        Some(self.level(k, Parity::Odd)?.energy(1) - self.level(k, Parity::Even)?.energy(1))
    }
}

/// Default truncation of the second-order sum: at least `k_max + 60`, widened
/// to cover the spread of row `k_max` of `⟨k|D(2g/ω)|l⟩`, which reaches
/// `l ≈ (√k_max + 2g/ω)²`.
pub fn default_l_cut(params: &ModelParams, k_max: usize) -> usize {
    let r = (k_max as f64).sqrt() + 2.0 * params.coupling();
    let reach = (r * r + 10.0 * r + 20.0).ceil() as usize;
    (k_max + 60).max(reach)
}

/// `L_kl` for `k, l < dim` from one overlap table.
pub fn l_matrix(g_over_omega: f64, dim: usize) -> Result<Vec<Vec<f64>>> {
    let t = OverlapTable::new(2.0 * g_over_omega, dim)?;
    Ok((0..dim)
        .map(|k| (0..dim).map(|l| 2.0 * parity_sign(l) * t.get(k, l)).collect())
        .collect())
}

/// Energies of `|k±⟩` for `k ≤ k_max` through second order in `ω_eg`.
///
/// `l_cut = None` picks [`default_l_cut`]; an explicit value must be at least
/// `k_max + 20`.
pub fn perturbative_energies(params: &ModelParams, k_max: usize, l_cut: Option<usize>) -> Result<PerturbativeSpectrum> {
    params.validate()?;
    let l_cut = l_cut.unwrap_or_else(|| default_l_cut(params, k_max));
    if l_cut < k_max + 20 {
        return Err(Error::InvalidParams(format!(
            "l_cut={l_cut} must be at least k_max + 20 = {}",
            k_max + 20
        )));
    }
    let (w, c) = (params.omega, params.coupling());
    let l = l_matrix(c, l_cut + 1)?;
    let q = 0.25 * params.omega_eg;
    let mut levels = Vec::with_capacity(2 * (k_max + 1));
    let mut tail: f64 = 0.0;
    for (k, row) in l.iter().enumerate().take(k_max + 1) {
        let terms: Vec<f64> = row
            .iter()
            .enumerate()
            .map(|(j, &v)| {
                if j == k {
                    0.0
                } else {
                    q * q * v.powi(2) / (w * (k as f64 - j as f64))
                }
            })
            .collect();
        let e2: f64 = terms.iter().sum();
        tail = tail.max(terms[l_cut + 1 - TAIL_TERMS..].iter().map(|t| t.abs()).sum());
        let e0 = w * k as f64 - params.g * params.g / w;
        for sector in Parity::BOTH {
            levels.push(PerturbativeLevel {
                k,
                sector,
                e0,
                e1: -sector.sign() * q * l[k][k],
                e2,
            });
        }
    }
    let tail_warning = if tail > TAIL_WARN * w {
        let msg = format!("second-order tail {tail:.3e} at l_cut={l_cut}; raise l_cut");
        log::warn!("{msg}");
        Some(msg)
    } else {
        None
    };
    Ok(PerturbativeSpectrum {
        l_cut,
        levels,
        tail,
        tail_warning,
    })
}

/// The zeroth-order state `|k±⟩`: `|k⟩_A|e⟩ ± |k⟩_B|g⟩` up to normalization and
/// phase, expressed through the displaced-basis coefficient `c_m = δ_mk` of
/// its sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZerothOrderState {
    pub k: usize,
    pub sector: Parity,
    /// `g/ω`; the two branches sit at `∓g/ω`.
    pub displacement: f64,
    pub params: ModelParams,
}

impl ZerothOrderState {
    pub fn to_fock(&self, n_cut: usize) -> Result<FockVector> {
        let dim = self.k + 1;
        let r = Reconstructor::new(&self.params, self.sector, dim, n_cut)?;
        let mut c = vec![0.0; dim];
        c[self.k] = 1.0;
        Ok(r.state(&c))
    }
}

pub fn zeroth_order_states(params: &ModelParams, k: usize) -> [ZerothOrderState; 2] {
    Parity::BOTH.map(|sector| ZerothOrderState {
        k,
        sector,
        displacement: params.coupling(),
        params: *params,
    })
}

/// `a_n = ⟨n_A|α⟩² + ⟨n_B|α⟩²` and
/// `b_nm = ⟨n_A|α⟩⟨n_B|α⟩(⟨m_B|n_A⟩ + ⟨m_A|n_B⟩)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerturbativeCoefficients {
    pub a: Vec<f64>,
    /// Row-major `(n_cut+1) × (m_cut+1)`.
    pub b: Vec<f64>,
    pub n_cut: usize,
    pub m_cut: usize,
}

impl PerturbativeCoefficients {
    pub fn new(params: &ModelParams, alpha: f64, n_cut: usize, m_cut: usize) -> Result<Self> {
        let c = params.coupling();
        // ⟨n_A|α⟩ = ⟨n|α + g/ω⟩ and ⟨n_B|α⟩ = ⟨n|α − g/ω⟩ for real α
        let amp = |n: usize, beta: f64| coherent_amplitude(n, beta);
        for (cut, label) in [(n_cut, "n_cut"), (m_cut, "m_cut")] {
            for beta in [alpha + c, alpha - c] {
                let mass: f64 = (0..=cut).map(|n| amp(n, beta).powi(2)).sum();
                if mass < 1.0 - COVERAGE_TOL {
                    return Err(Error::Truncation {
                        what: format!("{label} coverage of the coherent state at {beta:.4}"),
                        achieved: mass,
                        required: 1.0 - COVERAGE_TOL,
                        advice: format!("raise {label} to at least {}", coverage_cutoff(beta)),
                    });
                }
            }
        }
        let big = n_cut.max(m_cut) + 1;
        let plus = OverlapTable::new(2.0 * c, big)?;
        let minus = OverlapTable::new(-2.0 * c, big)?;
        let ka: Vec<f64> = (0..=n_cut).map(|n| amp(n, alpha + c)).collect();
        let kb: Vec<f64> = (0..=n_cut).map(|n| amp(n, alpha - c)).collect();
        let a = ka.iter().zip(&kb).map(|(x, y)| x * x + y * y).collect();
        let mut b = vec![0.0; (n_cut + 1) * (m_cut + 1)];
        for n in 0..=n_cut {
            for m in 0..=m_cut {
                // ⟨m_B|n_A⟩ = ⟨m|D(−2g/ω)|n⟩, ⟨m_A|n_B⟩ = ⟨m|D(2g/ω)|n⟩
                b[n * (m_cut + 1) + m] = ka[n] * kb[n] * (minus.get(m, n) + plus.get(m, n));
            }
        }
        Ok(Self { a, b, n_cut, m_cut })
    }

    pub fn b(&self, n: usize, m: usize) -> f64 {
        self.b[n * (self.m_cut + 1) + m]
    }

    /// Weight of `cos(ω j t)` for `j = 0, 1, …` after folding `n − m = ±j`.
    pub fn harmonics(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.n_cut.max(self.m_cut) + 1];
        for n in 0..=self.n_cut {
            let an = self.a[n];
            for m in 0..=self.m_cut {
                let bnm = self.b(n, m);
                let den = (an * an + bnm * bnm).sqrt();
                if den > 0.0 {
                    h[n.abs_diff(m)] += -2.0 * an * bnm / den;
                }
            }
        }
        h
    }
}

fn coverage_cutoff(beta: f64) -> usize {
    let nb = beta * beta;
    (nb + 12.0 * nb.sqrt() + 20.0).ceil() as usize
}

/// Cutoffs that cover both shifted coherent distributions for `n̄`.
pub fn printed_cutoffs(params: &ModelParams, nbar: f64) -> usize {
    let alpha = nbar.max(0.0).sqrt();
    coverage_cutoff(alpha + params.coupling())
}

/// The closed cosine-sum approximation
/// `P(t) ≈ Σ_{n,m} −2 a_n b_nm / √(a_n² + b_nm²) · cos(ω(n − m)t)`,
/// evaluated as written.
pub fn perturbative_population(
    params: &ModelParams,
    cfg: &DynamicsConfig,
    n_cut: usize,
    m_cut: usize,
) -> Result<DynamicsResult> {
    params.validate()?;
    cfg.validate()?;
    let times = cfg.physical_times(params)?;
    let coeffs = PerturbativeCoefficients::new(params, cfg.nbar.sqrt(), n_cut, m_cut)?;
    let h = coeffs.harmonics();
    let w = params.omega;
    let p = times
        .par_iter()
        .map(|&t| h.iter().enumerate().map(|(j, c)| c * (w * j as f64 * t).cos()).sum())
        .collect();
    Ok(DynamicsResult::plain(Method::Printed, cfg, p))
}

/// Evolution of `|g⟩|α⟩` in the zeroth-order states `|k±⟩` with phases from
/// the perturbative energies of the given order (0, 1 or 2).
///
/// At order 0 this is the exact evolution of the `ω_eg = 0` model.
pub fn perturbative_evolution(params: &ModelParams, cfg: &DynamicsConfig, order: usize) -> Result<DynamicsResult> {
    params.validate()?;
    cfg.validate()?;
    if order > 2 {
        return Err(Error::InvalidParams(format!("energy order {order} is not available")));
    }
    let times = cfg.physical_times(params)?;
    let k_max = recommended_n_tr(params, cfg.nbar);
    let spec = perturbative_energies(params, k_max, None)?;
    let sized = params.with_n_tr(k_max);
    let coherent_cut = printed_cutoffs(params, cfg.nbar);
    let n_cut = default_fock_cutoff(&sized).max(coherent_cut);
    let alpha = cfg.nbar.sqrt();
    let field: Vec<f64> = (0..=n_cut).map(|n| coherent_amplitude(n, alpha)).collect();
    let psi0 = FockVector::ground_atom(&field);
    let mut states = Vec::with_capacity(2 * (k_max + 1));
    for sector in Parity::BOTH {
        let r = Reconstructor::new(&sized, sector, k_max + 1, n_cut)?;
        for k in 0..=k_max {
            let mut c = vec![0.0; k_max + 1];
            c[k] = 1.0;
            let e = spec.level(k, sector).expect("level present").energy(order);
            states.push((e, r.state(&c)));
        }
    }
    let borrowed: Vec<(f64, &FockVector)> = states.iter().map(|(e, s)| (*e, s)).collect();
    let (exp, _, captured) = Expansion::project(&borrowed, &psi0);
    if captured < 1.0 - CAPTURED_NORM_TOL {
        return Err(Error::Truncation {
            what: format!("captured norm in zeroth-order states k <= {k_max}"),
            achieved: captured,
            required: 1.0 - CAPTURED_NORM_TOL,
            advice: "raise the state count".into(),
        });
    }
    let p = times.par_iter().map(|&t| exp.density_at(t).inversion()).collect();
    let mut out = DynamicsResult::plain(Method::Perturbative, cfg, p);
    out.captured_norm = Some(captured);
    out.n_tr = Some(k_max);
    out.n_cut = Some(n_cut);
    Ok(out)
}
