//! Atom ⊗ field states in the bare basis `{|n,e⟩, |n,g⟩ : n ≤ n_cut}` and the
//! brute-force diagonalization of the full Hamiltonian in that basis.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Real amplitudes on `|n,e⟩` and `|n,g⟩`, `n = 0..=n_cut`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    pub n_cut: usize,
    pub amp_e: Vec<f64>,
    pub amp_g: Vec<f64>,
}

impl FockVector {
    pub fn zeros(n_cut: usize) -> Self {
        Self {
            n_cut,
            amp_e: vec![0.0; n_cut + 1],
            amp_g: vec![0.0; n_cut + 1],
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amp_e.iter().chain(&self.amp_g).map(|a| a * a).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`; the shorter cutoff bounds the sum.
    pub fn dot(&self, other: &FockVector) -> f64 {
        let e: f64 = self.amp_e.iter().zip(&other.amp_e).map(|(a, b)| a * b).sum();
        let g: f64 = self.amp_g.iter().zip(&other.amp_g).map(|(a, b)| a * b).sum();
        e + g
    }

    /// `⟨a†a⟩` (unnormalized).
    pub fn mean_photon(&self) -> f64 {
        (0..=self.n_cut)
            .map(|n| n as f64 * (self.amp_e[n].powi(2) + self.amp_g[n].powi(2)))
            .sum()
    }

    /// `⟨exp(iπ(a†a + (σz + 1)/2))⟩`; `|n,e⟩` carries `(−1)^(n+1)`, `|n,g⟩` carries `(−1)^n`.
    pub fn parity_expectation(&self) -> f64 {
        (0..=self.n_cut)
            .map(|n| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                s * (self.amp_g[n].powi(2) - self.amp_e[n].powi(2))
            })
            .sum()
    }

    /// `(|e⟩⟨g| + |g⟩⟨e|) |self⟩`.
    pub fn flip_atom(&self) -> FockVector {
        FockVector {
            n_cut: self.n_cut,
            amp_e: self.amp_g.clone(),
            amp_g: self.amp_e.clone(),
        }
    }

    /// `|g⟩ ⊗ Σₙ cₙ|n⟩`.
    pub fn ground_atom(field: &[f64]) -> FockVector {
        let n_cut = field.len().saturating_sub(1);
        FockVector {
            n_cut,
            amp_e: vec![0.0; n_cut + 1],
            amp_g: field.to_vec(),
        }
    }

    pub fn to_complex(&self) -> ComplexFock {
        ComplexFock {
            amp_e: self.amp_e.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            amp_g: self.amp_g.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

/// Complex amplitudes, used for time-evolved states.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexFock {
    pub amp_e: Vec<Complex64>,
    pub amp_g: Vec<Complex64>,
}

impl ComplexFock {
    pub fn zeros(n_cut: usize) -> Self {
        Self {
            amp_e: vec![Complex64::new(0.0, 0.0); n_cut + 1],
            amp_g: vec![Complex64::new(0.0, 0.0); n_cut + 1],
        }
    }

    pub fn n_cut(&self) -> usize {
        self.amp_e.len() - 1
    }

    pub fn dot(&self, other: &ComplexFock) -> Complex64 {
        let e: Complex64 = self.amp_e.iter().zip(&other.amp_e).map(|(a, b)| a.conj() * b).sum();
        let g: Complex64 = self.amp_g.iter().zip(&other.amp_g).map(|(a, b)| a.conj() * b).sum();
        e + g
    }
}

/// `H|ψ⟩` for the full Hamiltonian on the truncated bare basis.
pub fn apply_hamiltonian(params: &ModelParams, psi: &ComplexFock) -> ComplexFock {
    let n_cut = psi.n_cut();
    let mut out = ComplexFock::zeros(n_cut);
    let half = 0.5 * params.omega_eg;
    for n in 0..=n_cut {
        let w = params.omega * n as f64;
        let mut he = psi.amp_e[n] * (half + w);
        let mut hg = psi.amp_g[n] * (w - half);
        // g(a + a†)σx: |n,e⟩ couples to |n±1,g⟩
        if n > 0 {
            let s = params.g * (n as f64).sqrt();
            he += psi.amp_g[n - 1] * s;
            hg += psi.amp_e[n - 1] * s;
        }
        if n < n_cut {
            let s = params.g * ((n + 1) as f64).sqrt();
            he += psi.amp_g[n + 1] * s;
            hg += psi.amp_e[n + 1] * s;
        }
        out.amp_e[n] = he;
        out.amp_g[n] = hg;
    }
    out
}

/// Eigenpairs of the full Hamiltonian in the bare basis.
#[derive(Debug, Clone)]
pub struct FockSpectrum {
    pub n_cut: usize,
    pub energies: Vec<f64>,
    pub states: Vec<FockVector>,
}

/// Diagonalize `H` directly on `{|n,e⟩, |n,g⟩ : n ≤ n_cut}`, dimension `2(n_cut+1)`,
/// with no parity blocking. This is the independent reference for the
/// displaced-basis solver.
pub fn solve_fock_oracle(params: &ModelParams, n_cut: usize) -> Result<FockSpectrum> {
    params.validate()?;
    if n_cut < 1 {
        return Err(Error::InvalidParams("oracle n_cut must be >= 1".into()));
    }
    let dim = 2 * (n_cut + 1);
    // index 2n ↔ |n,e⟩, 2n+1 ↔ |n,g⟩
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let half = 0.5 * params.omega_eg;
    for n in 0..=n_cut {
        let w = params.omega * n as f64;
        h[(2 * n, 2 * n)] = w + half;
        h[(2 * n + 1, 2 * n + 1)] = w - half;
        if n < n_cut {
            let s = params.g * ((n + 1) as f64).sqrt();
            h[(2 * n, 2 * (n + 1) + 1)] = s;
            h[(2 * (n + 1) + 1, 2 * n)] = s;
            h[(2 * n + 1, 2 * (n + 1))] = s;
            h[(2 * (n + 1), 2 * n + 1)] = s;
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(h, f64::EPSILON, 0).ok_or(Error::NoConvergence {
        sector: None,
        size: dim,
    })?;
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let states = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k);
            let mut v = FockVector::zeros(n_cut);
            for n in 0..=n_cut {
                v.amp_e[n] = col[2 * n];
                v.amp_g[n] = col[2 * n + 1];
            }
            v
        })
        .collect();
    Ok(FockSpectrum {
        n_cut,
        energies,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uncoupled_spectrum() {
        let sp = solve_fock_oracle(&ModelParams::resonant(0.0), 5).unwrap();
        let expect = [-0.5, 0.5, 0.5, 1.5, 1.5, 2.5];
        for (e, x) in sp.energies.iter().zip(expect) {
            assert!((e - x).abs() < 1e-14, "{e} vs {x}");
        }
    }

    #[test]
    fn oracle_needs_cutoff() {
        assert!(solve_fock_oracle(&ModelParams::resonant(0.1), 0).is_err());
    }

    #[test]
    fn hamiltonian_matches_oracle_eigenpairs() {
        let p = ModelParams::resonant(0.7);
        let sp = solve_fock_oracle(&p, 30).unwrap();
        for k in 0..4 {
            let v = sp.states[k].to_complex();
            let hv = apply_hamiltonian(&p, &v);
            let ev = v.dot(&hv).re;
            assert!((ev - sp.energies[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn parity_of_bare_states() {
        let mut v = FockVector::zeros(3);
        v.amp_g[0] = 1.0;
        assert_eq!(v.parity_expectation(), 1.0);
        assert_eq!(v.flip_atom().parity_expectation(), -1.0);
        let mut w = FockVector::zeros(3);
        w.amp_e[1] = 1.0;
        assert_eq!(w.parity_expectation(), 1.0);
        assert_eq!(w.mean_photon(), 1.0);
    }
}
