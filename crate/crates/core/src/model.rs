//! Problem definition: model parameters and the two parity sectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default number of displaced Fock states kept per atomic branch is `n_tr + 1`.
pub const DEFAULT_N_TR: usize = 40;

/// Parameters of `H = (ω_eg/2)σz + ω a†a + g(a† + a)σx`.
///
/// Energies are in arbitrary units with ħ = 1; the displacement that enters
/// the displaced Fock basis is `g/ω`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(default = "one")]
    pub omega: f64,
    #[serde(default = "one")]
    pub omega_eg: f64,
    #[serde(default)]
    pub g: f64,
    #[serde(default = "default_n_tr")]
    pub n_tr: usize,
}

fn one() -> f64 {
    1.0
}

fn default_n_tr() -> usize {
    DEFAULT_N_TR
}

impl Default for ModelParams {
    fn default() -> Self {
        Self::resonant(0.0)
    }
}

impl ModelParams {
    pub fn new(omega: f64, omega_eg: f64, g: f64, n_tr: usize) -> Result<Self> {
        let p = Self {
            omega,
            omega_eg,
            g,
            n_tr,
        };
        p.validate()?;
        Ok(p)
    }

    /// `ω = ω_eg = 1`, default truncation.
    pub fn resonant(g: f64) -> Self {
        Self {
            omega: 1.0,
            omega_eg: 1.0,
            g,
            n_tr: DEFAULT_N_TR,
        }
    }

    pub fn with_n_tr(mut self, n_tr: usize) -> Self {
        self.n_tr = n_tr;
        self
    }

    pub fn with_omega_eg(mut self, omega_eg: f64) -> Self {
        self.omega_eg = omega_eg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.omega.is_finite() && self.omega_eg.is_finite() && self.g.is_finite();
        if !finite {
            return Err(Error::InvalidParams(format!("non-finite parameter in {self:?}")));
        }
        if self.omega <= 0.0 {
            return Err(Error::InvalidParams(format!("omega must be > 0, got {}", self.omega)));
        }
        if self.omega_eg < 0.0 {
            return Err(Error::InvalidParams(format!(
                "omega_eg must be >= 0, got {}",
                self.omega_eg
            )));
        }
        if self.g < 0.0 {
            return Err(Error::InvalidParams(format!("g must be >= 0, got {}", self.g)));
        }
        if self.n_tr < 1 {
            return Err(Error::InvalidParams("n_tr must be >= 1".into()));
        }
        Ok(())
    }

    /// Dimensionless coupling `g/ω`.
    pub fn coupling(&self) -> f64 {
        self.g / self.omega
    }

    /// Basis dimension per sector, `n_tr + 1`.
    pub fn dim(&self) -> usize {
        self.n_tr + 1
    }

    pub fn is_resonant(&self) -> bool {
        (self.omega - self.omega_eg).abs() <= 1e-12 * self.omega
    }
}

/// Eigenvalue of the conserved parity `exp(-iπ N̂)`, `N̂ = a†a + σz/2 + 1/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];

    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Parity::Even => '+',
            Parity::Odd => '-',
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ModelParams::new(1.0, 1.0, 0.3, 40).is_ok());
        assert!(ModelParams::new(0.0, 1.0, 0.3, 40).is_err());
        assert!(ModelParams::new(1.0, -1.0, 0.3, 40).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1, 40).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.3, 0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 4).is_err());
    }

    #[test]
    fn dimensionless_coupling() {
        let p = ModelParams::new(2.0, 2.0, 1.0, 10).unwrap();
        assert_eq!(p.coupling(), 0.5);
        assert_eq!(p.dim(), 11);
        assert!(p.is_resonant());
    }
}
