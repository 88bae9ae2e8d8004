//! Parity-sector eigenproblem in the displaced Fock basis.
//!
//! With `|1⟩ = (|e⟩+|g⟩)/√2`, `|2⟩ = (−|e⟩+|g⟩)/√2` the eigenstates of parity
//! `±` are `Σ_m c_m (|m⟩_A|1⟩ ± (−1)^m |m⟩_B|2⟩)/√2`, and the coefficients
//! solve the symmetric problem
//!
//! ```text
//! H^±_nm = ω(n − g²/ω²)δ_nm ∓ (ω_eg/2)(−1)^m ⟨n|D(2g/ω)|m⟩
//! ```
//!
//! The even sector takes the upper sign; at `g = 0` it holds `|g,0⟩` at `−ω_eg/2`.

use serde::{Deserialize, Serialize};

use crate::boson::{parity_sign, OverlapTable, MAX_INDEX};
use crate::eigen::{symmetric_eigen, SymMatrix};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::model::{ModelParams, Parity};

/// Norm a single reconstructed eigenstate must reach in [`to_fock_basis`].
pub const RECONSTRUCTION_NORM_TOL: f64 = 1e-8;
/// Norm the ground state must reach when choosing a reconstruction cutoff.
pub const CUTOFF_NORM_TOL: f64 = 1e-10;

/// `H^±` for one parity sector, dimension `n_tr + 1`.
pub fn assemble_hamiltonian(params: &ModelParams, sector: Parity) -> Result<SymMatrix> {
    params.validate()?;
    let dim = params.dim();
    let c = params.coupling();
    let omega = OverlapTable::new(2.0 * c, dim)?;
    let coupling = -sector.sign() * 0.5 * params.omega_eg;
    Ok(SymMatrix::from_fn(dim, |n, m| {
        let diag = if n == m { params.omega * (n as f64 - c * c) } else { 0.0 };
        diag + coupling * parity_sign(m) * omega.get(n, m)
    }))
}

/// Eigenpairs of one parity sector.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EigenSolution {
    pub params: ModelParams,
    pub sector: Parity,
    /// Ascending.
    pub energies: Vec<f64>,
    /// Row-major `(n_tr+1)²`; column `k` holds `c_{m}` of eigenstate `k` in the `|m⟩_A` basis.
    pub coeffs: Vec<f64>,
}

impl EigenSolution {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn coefficient(&self, m: usize, k: usize) -> f64 {
        self.coeffs[m * self.dim() + k]
    }

    pub fn column(&self, k: usize) -> Vec<f64> {
        (0..self.dim()).map(|m| self.coefficient(m, k)).collect()
    }

    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }
}

pub fn solve_sector(params: &ModelParams, sector: Parity) -> Result<EigenSolution> {
    let h = assemble_hamiltonian(params, sector)?;
    let eig = symmetric_eigen(&h).map_err(|e| match e {
        Error::NoConvergence { size, .. } => Error::NoConvergence {
            sector: Some(sector),
            size,
        },
        other => other,
    })?;
    Ok(EigenSolution {
        params: *params,
        sector,
        energies: eig.values,
        coeffs: eig.vectors,
    })
}

/// Both parity sectors at the same parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SectorPair {
    pub even: EigenSolution,
    pub odd: EigenSolution,
}

impl SectorPair {
    pub fn solve(params: &ModelParams) -> Result<Self> {
        Ok(Self {
            even: solve_sector(params, Parity::Even)?,
            odd: solve_sector(params, Parity::Odd)?,
        })
    }

    pub fn sector(&self, p: Parity) -> &EigenSolution {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    /// Lowest `k` levels of the merged spectrum.
    pub fn lowest(&self, k: usize) -> Vec<Level> {
        merge_levels(&self.even, &self.odd, k)
    }
}

/// One eigenvalue tagged with its sector and in-sector index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub energy: f64,
    pub parity: Parity,
    pub index: usize,
}

/// Merge both sectors, ascending; exact ties put the even level first.
pub fn merge_levels(even: &EigenSolution, odd: &EigenSolution, k: usize) -> Vec<Level> {
    let mut all: Vec<Level> = [even, odd]
        .iter()
        .flat_map(|sol| {
            sol.energies.iter().enumerate().map(|(i, &e)| Level {
                energy: e,
                parity: sol.sector,
                index: i,
            })
        })
        .collect();
    all.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.parity.cmp(&b.parity)));
    all.truncate(k);
    all
}

/// Maps displaced-basis coefficient vectors of one sector to bare Fock amplitudes.
///
/// `⟨n|m⟩_B = ⟨n|D(g/ω)|m⟩` and `⟨n|m⟩_A = (−1)^(n+m)⟨n|m⟩_B`; with
/// `yₙ = Σ_m (−1)^m ⟨n|D(g/ω)|m⟩ c_m` the even sector is
/// `amp_g[n even] = yₙ`, `amp_e[n odd] = −yₙ` and the odd sector
/// `amp_e[n even] = yₙ`, `amp_g[n odd] = −yₙ`.
#[derive(Debug, Clone)]
pub struct Reconstructor {
    sector: Parity,
    n_cut: usize,
    basis_dim: usize,
    table: OverlapTable,
}

impl Reconstructor {
    pub fn new(params: &ModelParams, sector: Parity, basis_dim: usize, n_cut: usize) -> Result<Self> {
        if n_cut > MAX_INDEX {
            return Err(Error::Truncation {
                what: "Fock cutoff".into(),
                achieved: n_cut as f64,
                required: MAX_INDEX as f64,
                advice: "reduce n_tr or the coupling".into(),
            });
        }
        let dim = (n_cut + 1).max(basis_dim);
        Ok(Self {
            sector,
            n_cut,
            basis_dim,
            table: OverlapTable::new(params.coupling(), dim)?,
        })
    }

    pub fn n_cut(&self) -> usize {
        self.n_cut
    }

    pub fn state(&self, coeffs: &[f64]) -> FockVector {
        debug_assert_eq!(coeffs.len(), self.basis_dim);
        let signed: Vec<f64> = coeffs.iter().enumerate().map(|(m, &c)| parity_sign(m) * c).collect();
        let mut v = FockVector::zeros(self.n_cut);
        for n in 0..=self.n_cut {
            let y: f64 = signed.iter().enumerate().map(|(m, &c)| self.table.get(n, m) * c).sum();
            let even_n = n % 2 == 0;
            match (self.sector, even_n) {
                (Parity::Even, true) => v.amp_g[n] = y,
                (Parity::Even, false) => v.amp_e[n] = -y,
                (Parity::Odd, true) => v.amp_e[n] = y,
                (Parity::Odd, false) => v.amp_g[n] = -y,
            }
        }
        v
    }
}

/// Starting reconstruction cutoff `n_tr + ⌈4c² + 10c⌉ + 20`, `c = g/ω`.
pub fn default_fock_cutoff(params: &ModelParams) -> usize {
    let c = params.coupling();
    params.n_tr + (4.0 * c * c + 10.0 * c).ceil() as usize + 20
}

fn grow(n_cut: usize) -> usize {
    (n_cut + n_cut.div_ceil(4)).max(n_cut + 1)
}

/// Smallest cutoff on the 25% growth ladder from [`default_fock_cutoff`] at
/// which the even ground state reconstructs with norm ≥ `1 − 1e−10`.
pub fn fock_cutoff(sol: &EigenSolution) -> Result<usize> {
    let ground = sol.column(0);
    let mut n_cut = default_fock_cutoff(&sol.params);
    loop {
        let r = Reconstructor::new(&sol.params, sol.sector, sol.dim(), n_cut)?;
        let norm = r.state(&ground).norm_sqr();
        if norm >= 1.0 - CUTOFF_NORM_TOL {
            return Ok(n_cut);
        }
        n_cut = grow(n_cut);
    }
}

/// Expand eigenstate `k` of `sol` into the bare basis.
///
/// Fails with [`Error::Truncation`] if the reconstructed norm falls short of
/// `1 − 1e−8`; no renormalization is applied.
pub fn to_fock_basis(sol: &EigenSolution, k: usize, n_cut: usize) -> Result<FockVector> {
    if k >= sol.dim() {
        return Err(Error::Domain(format!(
            "eigenstate index {k} out of range for sector of size {}",
            sol.dim()
        )));
    }
    let r = Reconstructor::new(&sol.params, sol.sector, sol.dim(), n_cut)?;
    let v = r.state(&sol.column(k));
    let norm = v.norm_sqr();
    if norm < 1.0 - RECONSTRUCTION_NORM_TOL {
        return Err(Error::Truncation {
            what: format!("norm of {:?} eigenstate {k} at n_cut={n_cut}", sol.sector),
            achieved: norm,
            required: 1.0 - RECONSTRUCTION_NORM_TOL,
            advice: format!("raise n_cut above {n_cut}"),
        });
    }
    Ok(v)
}

/// Every eigenstate of both sectors reconstructed on a common bare cutoff.
#[derive(Debug, Clone)]
pub struct FockBasis {
    pub params: ModelParams,
    pub n_cut: usize,
    pub even_energies: Vec<f64>,
    pub odd_energies: Vec<f64>,
    pub even: Vec<FockVector>,
    pub odd: Vec<FockVector>,
}

impl FockBasis {
    /// Reconstruct at the smallest ladder cutoff where every state has norm ≥ `1 − 1e−10`.
    pub fn build(pair: &SectorPair) -> Result<Self> {
        let params = pair.even.params;
        let mut n_cut = default_fock_cutoff(&params);
        loop {
            let basis = Self::at_cutoff(pair, n_cut)?;
            if basis.min_norm_sqr() >= 1.0 - CUTOFF_NORM_TOL {
                return Ok(basis);
            }
            n_cut = grow(n_cut);
        }
    }

    pub fn at_cutoff(pair: &SectorPair, n_cut: usize) -> Result<Self> {
        let params = pair.even.params;
        let rebuild = |sol: &EigenSolution| -> Result<Vec<FockVector>> {
            let r = Reconstructor::new(&params, sol.sector, sol.dim(), n_cut)?;
            Ok((0..sol.dim()).map(|k| r.state(&sol.column(k))).collect())
        };
        Ok(Self {
            params,
            n_cut,
            even_energies: pair.even.energies.clone(),
            odd_energies: pair.odd.energies.clone(),
            even: rebuild(&pair.even)?,
            odd: rebuild(&pair.odd)?,
        })
    }

    pub fn min_norm_sqr(&self) -> f64 {
        self.even
            .iter()
            .chain(&self.odd)
            .map(FockVector::norm_sqr)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn states(&self, p: Parity) -> &[FockVector] {
        match p {
            Parity::Even => &self.even,
            Parity::Odd => &self.odd,
        }
    }

    pub fn energies(&self, p: Parity) -> &[f64] {
        match p {
            Parity::Even => &self.even_energies,
            Parity::Odd => &self.odd_energies,
        }
    }
}

/// Lowest merged levels for one truncation and their change from the previous one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n_tr: usize,
    pub energies: Vec<f64>,
    /// `|E(n_tr) − E(previous n_tr)| / |E(n_tr)|`, absent on the first row.
    pub rel_change: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub tolerance: f64,
    pub rows: Vec<ConvergenceRow>,
    /// First truncation whose levels agree with the next truncation in the list.
    pub converged_at: Option<usize>,
}

/// Track the lowest `k_levels` energies as the truncation grows.
pub fn convergence_report(
    params: &ModelParams,
    n_tr_list: &[usize],
    k_levels: usize,
    tolerance: f64,
) -> Result<ConvergenceReport> {
    if n_tr_list.is_empty() {
        return Err(Error::InvalidParams("n_tr list must not be empty".into()));
    }
    if n_tr_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams("n_tr list must be strictly ascending".into()));
    }
    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(n_tr_list.len());
    for &n_tr in n_tr_list {
        let pair = SectorPair::solve(&params.with_n_tr(n_tr))?;
        let energies: Vec<f64> = pair.lowest(k_levels).iter().map(|l| l.energy).collect();
        let rel_change = rows.last().map(|prev| {
            energies
                .iter()
                .zip(&prev.energies)
                .map(|(e, p)| {
                    let diff = (e - p).abs();
                    if diff == 0.0 {
                        0.0
                    } else {
                        diff / e.abs()
                    }
                })
                .collect()
        });
        rows.push(ConvergenceRow {
            n_tr,
            energies,
            rel_change,
        });
    }
    let converged_at = rows.windows(2).find_map(|w| {
        let ok = w[1]
            .rel_change
            .as_ref()
            .is_some_and(|r| r.iter().all(|&x| x < tolerance));
        ok.then_some(w[0].n_tr)
    });
    Ok(ConvergenceReport {
        tolerance,
        rows,
        converged_at,
    })
}
