//! Overlap kernels for displaced Fock states and real coherent states.
//!
//! Everything here is real arithmetic. The central quantity is the matrix
//! element `⟨n|D(d)|m⟩` of the displacement operator `D(d) = exp(d(a† − a))`
//! for real `d`:
//!
//! ```text
//! n ≥ m:  ⟨n|D(d)|m⟩ = sqrt(m!/n!) d^(n−m) e^(−d²/2) L_m^(n−m)(d²)
//! n < m:  ⟨n|D(d)|m⟩ = (−1)^(m−n) ⟨m|D(d)|n⟩
//! ```
//!
//! With `A = a + g/ω` and `B = a − g/ω` the two branch bases are
//! `|m⟩_A = D(−g/ω)|m⟩` and `|m⟩_B = D(g/ω)|m⟩`, so `⟨n_A|m_B⟩ = ⟨n|D(2g/ω)|m⟩`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest photon index accepted by the kernels.
pub const MAX_INDEX: usize = 2048;

/// A real displacement of the boson mode, in units of the quadrature shift.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Displacement(f64);

impl Displacement {
    pub fn new(d: f64) -> Result<Self> {
        if !d.is_finite() {
            return Err(Error::Domain(format!("displacement must be finite, got {d}")));
        }
        Ok(Self(d))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A real-amplitude coherent state |α⟩, α ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentState {
    alpha: f64,
}

impl CoherentState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::Domain(format!(
                "coherent amplitude must be finite and >= 0, got {alpha}"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn from_nbar(nbar: f64) -> Result<Self> {
        if !nbar.is_finite() || nbar < 0.0 {
            return Err(Error::Domain(format!(
                "mean photon number must be finite and >= 0, got {nbar}"
            )));
        }
        Ok(Self { alpha: nbar.sqrt() })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nbar(&self) -> f64 {
        self.alpha * self.alpha
    }

    /// Fock amplitude `⟨n|α⟩`.
    pub fn amplitude(&self, n: usize) -> f64 {
        coherent_amplitude(n, self.alpha)
    }

    /// Fock amplitudes `⟨n|α⟩` for `n = 0..=n_cut`.
    pub fn amplitudes(&self, n_cut: usize) -> Vec<f64> {
        (0..=n_cut).map(|n| self.amplitude(n)).collect()
    }
}

fn ln_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(MAX_INDEX + 1);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..=MAX_INDEX {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)` for `n ≤ MAX_INDEX`.
pub fn ln_factorial(n: usize) -> f64 {
    ln_factorial_table()[n]
}

fn check_index(n: usize) -> Result<()> {
    if n > MAX_INDEX {
        return Err(Error::Domain(format!(
            "photon index {n} exceeds kernel maximum {MAX_INDEX}"
        )));
    }
    Ok(())
}

/// `e^(−β²/2) βⁿ / sqrt(n!)`, the Fock amplitude of a real coherent state |β⟩.
pub fn coherent_amplitude(n: usize, beta: f64) -> f64 {
    if beta == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let n = n.min(MAX_INDEX);
    let ln_mag = -0.5 * beta * beta + n as f64 * beta.abs().ln() - 0.5 * ln_factorial(n);
    let sign = if beta < 0.0 && n % 2 == 1 { -1.0 } else { 1.0 };
    sign * ln_mag.exp()
}

/// `⟨m+k|D(d)|m⟩` for `m = 0..len`, the `k`-th subdiagonal.
///
/// Runs the associated-Laguerre recurrence on the normalized elements
/// `t_m = sqrt(m!/(m+k)!) d^k e^(−d²/2) L_m^(k)(d²)`:
///
/// ```text
/// sqrt((m+1)(m+1+k)) t_{m+1} = (2m+1+k−d²) t_m − sqrt(m(m+k)) t_{m−1}
/// ```
///
/// The `t_m` are entries of a unitary matrix, so nothing overflows.
fn subdiagonal(k: usize, d: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let x = d * d;
    let kf = k as f64;
    out.push(coherent_amplitude(k, d));
    if len == 1 {
        return out;
    }
    out.push((1.0 + kf - x) * out[0] / (1.0 + kf).sqrt());
    for m in 1..len - 1 {
        let mf = m as f64;
        let next = ((2.0 * mf + 1.0 + kf - x) * out[m] - (mf * (mf + kf)).sqrt() * out[m - 1])
            / ((mf + 1.0) * (mf + 1.0 + kf)).sqrt();
        out.push(next);
    }
    out
}

/// `⟨n|D(d)|m⟩` for real `d`.
pub fn displaced_fock_overlap(n: usize, m: usize, d: f64) -> Result<f64> {
    check_index(n)?;
    check_index(m)?;
    let d = Displacement::new(d)?.value();
    if n < m {
        return Ok(parity_sign(m - n) * lower_overlap(m, n, d));
    }
    Ok(lower_overlap(n, m, d))
}

// n ≥ m
fn lower_overlap(n: usize, m: usize, d: f64) -> f64 {
    subdiagonal(n - m, d, m + 1)[m]
}

/// `⟨n_A|α⟩ = ⟨n|α + d⟩` for an A-branch displacement `d`; pass `−d` for the B branch.
pub fn displaced_fock_coherent_overlap(n: usize, d: f64, state: CoherentState) -> Result<f64> {
    check_index(n)?;
    let d = Displacement::new(d)?.value();
    Ok(coherent_amplitude(n, state.alpha() + d))
}

/// `L_kl = ⟨k_A|l_B⟩(−1)^l + (−1)^k⟨k_B|l_A⟩` at coupling `g/ω`.
pub fn l_polynomial(k: usize, l: usize, g_over_omega: f64) -> Result<f64> {
    let two_d = 2.0 * g_over_omega;
    let ab = displaced_fock_overlap(k, l, two_d)?;
    let ba = displaced_fock_overlap(k, l, -two_d)?;
    Ok(parity_sign(l) * ab + parity_sign(k) * ba)
}

/// `(−1)^n`.
pub fn parity_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Dense table of `⟨n|D(d)|m⟩` for `n, m < dim`.
///
/// Each subdiagonal comes from one Laguerre recurrence run; the upper
/// triangle is the reflection `(−1)^(n−m)⟨m|D|n⟩`, so the reflection
/// identity holds bit-for-bit.
#[derive(Debug, Clone)]
pub struct OverlapTable {
    d: f64,
    dim: usize,
    data: Vec<f64>,
}

impl OverlapTable {
    pub fn new(d: f64, dim: usize) -> Result<Self> {
        let d = Displacement::new(d)?.value();
        if dim == 0 || dim > MAX_INDEX + 1 {
            return Err(Error::Domain(format!("overlap table dimension {dim} out of range")));
        }
        let mut data = vec![0.0; dim * dim];
        for k in 0..dim {
            for (m, t) in subdiagonal(k, d, dim - k).into_iter().enumerate() {
                data[(m + k) * dim + m] = t;
                data[m * dim + m + k] = parity_sign(k) * t;
            }
        }
        Ok(Self { d, dim, data })
    }

    pub fn displacement(&self) -> f64 {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.data[n * self.dim + m]
    }
}

/// Poisson weights `e^(−n̄) n̄ⁿ/n!`, truncated once the cumulative mass reaches `1 − tol`
/// (and never before the mode).
pub fn poisson_weights(nbar: f64, tol: f64) -> Vec<f64> {
    if nbar == 0.0 {
        return vec![1.0];
    }
    let mut out = Vec::new();
    let mut total = 0.0;
    for n in 0..=MAX_INDEX {
        let ln_p = -nbar + n as f64 * nbar.ln() - ln_factorial(n);
        let p = ln_p.exp();
        out.push(p);
        total += p;
        if total >= 1.0 - tol && n as f64 > nbar {
            break;
        }
    }
    out
}
