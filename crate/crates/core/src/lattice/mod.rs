//! Gauge-phase hopping lattices: the effective single-particle models.
//!
//! A hopping `(i, j, J, φ)` stands for `J e^{iφ} b_i† b_j + h.c.`, i.e. `φ` is
//! the phase picked up when a particle hops from `j` to `i`.

mod gauge;
mod models;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cis, cplx, Real};

pub use gauge::{
    gauge_transform, loop_flux, time_reversal_symmetric, tree_gauge, trs_invariant, uniform_gauge, FluxReport,
    TRS_TOLERANCE,
};
pub use models::{
    ab_effective, ladder_bloch_spectrum, ladder_hamiltonian, ladder_lattice, ladder_plaquette,
    ladder_spectrum, three_site_effective, two_site_effective, Boundary, LadderSpec,
};

/// Sense of circulation around a loop `1 → 2 → 3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `1 → 2 → 3 → 1`.
    Ccw,
    /// `1 → 3 → 2 → 1`.
    Cw,
    None,
}

impl Direction {
    /// Target of site `j` on an `n`-site ring.
    pub fn next(self, j: usize, n: usize) -> usize {
        match self {
            Direction::Ccw => (j + 1) % n,
            Direction::Cw => (j + n - 1) % n,
            Direction::None => j,
        }
    }
}

/// One directed hopping term.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hopping<T> {
    pub i: usize,
    pub j: usize,
    #[serde(rename = "J_MHz")]
    pub amplitude: T,
    #[serde(rename = "phi_rad")]
    pub phase: T,
}

/// Sites, complex hoppings, onsite detunings and per-site losses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaugeLattice<T> {
    pub n_sites: usize,
    pub hoppings: Vec<Hopping<T>>,
    #[serde(rename = "onsite_MHz")]
    pub onsite: Vec<T>,
    #[serde(rename = "kappa_MHz")]
    pub losses: Vec<T>,
}

impl<T: Real> GaugeLattice<T> {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            hoppings: Vec::new(),
            onsite: vec![T::zero(); n_sites],
            losses: vec![T::zero(); n_sites],
        }
    }

    /// Adds `J e^{iφ} b_i† b_j + h.c.`. Negative amplitudes are folded into
    /// the phase.
    pub fn add_hopping(&mut self, i: usize, j: usize, amplitude: T, phase: T) -> Result<&mut Self> {
        for k in [i, j] {
            if k >= self.n_sites {
                return Err(Error::IndexOutOfRange {
                    index: k,
                    len: self.n_sites,
                });
            }
        }
        if i == j {
            return Err(Error::param("j", j as f64, "hopping endpoints must differ"));
        }
        if !amplitude.is_finite() || !phase.is_finite() {
            return Err(Error::param("J", amplitude.as_f64(), "amplitude and phase must be finite"));
        }
        if self.edge_index(i, j).is_some() {
            return Err(Error::Parse(format!("duplicate hopping between {i} and {j}")));
        }
        let (amplitude, phase) = if amplitude < T::zero() {
            (-amplitude, phase + T::pi())
        } else {
            (amplitude, phase)
        };
        self.hoppings.push(Hopping {
            i,
            j,
            amplitude,
            phase: crate::scalar::wrap_angle(phase),
        });
        Ok(self)
    }

    pub fn with_losses(mut self, losses: Vec<T>) -> Result<Self> {
        if losses.len() != self.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.n_sites,
                got: losses.len(),
            });
        }
        self.losses = losses;
        self.validate()?;
        Ok(self)
    }

    pub fn with_onsite(mut self, onsite: Vec<T>) -> Result<Self> {
        if onsite.len() != self.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.n_sites,
                got: onsite.len(),
            });
        }
        self.onsite = onsite;
        Ok(self)
    }

    fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.hoppings
            .iter()
            .position(|h| (h.i == a && h.j == b) || (h.i == b && h.j == a))
    }

    /// Phase attached to `b_a† b_b`, if the two sites are connected.
    pub fn edge_phase(&self, a: usize, b: usize) -> Option<T> {
        self.edge_index(a, b).map(|k| {
            let h = &self.hoppings[k];
            if h.i == a {
                h.phase
            } else {
                -h.phase
            }
        })
    }

    pub fn edge_amplitude(&self, a: usize, b: usize) -> Option<T> {
        self.edge_index(a, b).map(|k| self.hoppings[k].amplitude)
    }

    /// Checks every structural invariant (used after deserialization).
    pub fn validate(&self) -> Result<()> {
        if self.onsite.len() != self.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.n_sites,
                got: self.onsite.len(),
            });
        }
        if self.losses.len() != self.n_sites {
            return Err(Error::LengthMismatch {
                expected: self.n_sites,
                got: self.losses.len(),
            });
        }
        if let Some(k) = self.losses.iter().find(|k| !(**k >= T::zero())) {
            return Err(Error::param("kappa", k.as_f64(), "losses must be >= 0"));
        }
        let mut check = GaugeLattice::new(self.n_sites);
        for h in &self.hoppings {
            if h.amplitude < T::zero() {
                return Err(Error::param("J", h.amplitude.as_f64(), "amplitudes must be >= 0"));
            }
            check.add_hopping(h.i, h.j, h.amplitude, h.phase)?;
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self>
    where
        T: for<'de> Deserialize<'de>,
    {
        let lattice: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        lattice.validate()?;
        Ok(lattice)
    }

    pub fn to_json(&self) -> String
    where
        T: Serialize,
    {
        serde_json::to_string_pretty(self).expect("lattice serialization cannot fail")
    }

    /// Single-particle matrix `H_ij = J e^{iφ_ij}`, onsite terms on the diagonal.
    pub fn hopping_matrix(&self) -> DMatrix<Complex<T>> {
        let n = self.n_sites;
        let mut h = DMatrix::from_fn(n, n, |r, c| if r == c { cplx(self.onsite[r]) } else { cplx(T::zero()) });
        for hop in &self.hoppings {
            let z = cis(hop.phase) * hop.amplitude;
            h[(hop.i, hop.j)] += z;
            h[(hop.j, hop.i)] += z.conj();
        }
        h
    }

    /// Sorted eigenvalues of [`Self::hopping_matrix`].
    pub fn spectrum(&self) -> Vec<T> {
        hermitian_eigenvalues(self.hopping_matrix())
    }

    /// Adjacency lists, ordered by neighbour index.
    pub(crate) fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n_sites];
        for h in &self.hoppings {
            adj[h.i].push(h.j);
            adj[h.j].push(h.i);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        adj
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues<T: Real>(m: DMatrix<Complex<T>>) -> Vec<T> {
    let mut ev: Vec<T> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    ev
}
