use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{GaugeLattice, hermitian_eigenvalues};
use crate::error::{Error, Result};
use crate::floquet::K_VALIDITY;
use crate::scalar::{cis, cplx, Real};

fn check_k<T: Real>(name: &'static str, k: T) -> Result<()> {
    if !(k.mag() < T::one()) {
        return Err(Error::param(name, k.as_f64(), "|K| must be < 1 for the sideband expansion"));
    }
    if k.mag() >= T::lit(K_VALIDITY) {
        log::warn!("|{name}| = {} >= {K_VALIDITY}: effective hopping is only qualitative", k.mag());
    }
    Ok(())
}

/// Two detuned cavities bridged by the first sideband: `J = g₁₂K₁/2` with
/// phase `±φ` depending on which cavity sits higher.
pub fn two_site_effective<T: Real>(g12: T, k1: T, phi: T, detuning_sign: i8) -> Result<GaugeLattice<T>> {
    check_k("K1", k1)?;
    if detuning_sign != 1 && detuning_sign != -1 {
        return Err(Error::param("detuning_sign", f64::from(detuning_sign), "must be +1 or -1"));
    }
    let mut l = GaugeLattice::new(2);
    let phase = if detuning_sign > 0 { phi } else { -phi };
    l.add_hopping(0, 1, g12 * k1 / T::lit(2.0), phase)?;
    Ok(l)
}

/// Three-cavity loop: a direct plus second-order channel between 1 and 2,
/// and sideband-assisted hoppings `2↔3`, `3↔1` carrying the drive phases.
#[allow(clippy::too_many_arguments)]
pub fn three_site_effective<T: Real>(
    g12: T,
    g13: T,
    g23: T,
    omega_d: T,
    k1: T,
    k2: T,
    phi1: T,
    phi2: T,
) -> Result<GaugeLattice<T>> {
    if omega_d == T::zero() {
        return Err(Error::param("omega_d", 0.0, "must be nonzero"));
    }
    check_k("K1", k1)?;
    check_k("K2", k2)?;
    let half = T::lit(0.5);
    let mut l = GaugeLattice::new(3);
    l.add_hopping(0, 1, g12 - g13 * g23 / omega_d, T::zero())?;
    l.add_hopping(1, 2, g23 * k2 * half, phi2)?;
    l.add_hopping(2, 0, g13 * k1 * half, -phi1)?;
    Ok(l)
}

/// Four-site plaquette `1–2–4–3` with two interfering paths from 1 to 4.
/// Flux through the loop is `2(φ₁ + φ₄)`.
pub fn ab_effective<T: Real>(j: T, phi1: T, phi4: T) -> Result<GaugeLattice<T>> {
    if !(j > T::zero()) {
        return Err(Error::param("J", j.as_f64(), "must be > 0"));
    }
    let mut l = GaugeLattice::new(4);
    l.add_hopping(0, 1, j, phi1)?;
    l.add_hopping(0, 2, j, -phi1)?;
    l.add_hopping(1, 3, j, phi4)?;
    l.add_hopping(2, 3, j, -phi4)?;
    Ok(l)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Two-leg flux ladder. Leg `a` occupies sites `0..n`, leg `b` sites `n..2n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec<T> {
    pub n_rungs: usize,
    pub t_prime: T,
    pub j_rung: T,
    pub phi: T,
    pub boundary: Boundary,
}

impl<T: Real> LadderSpec<T> {
    fn check(&self) -> Result<()> {
        if self.n_rungs < 2 {
            return Err(Error::param("n_rungs", self.n_rungs as f64, "must be >= 2"));
        }
        Ok(())
    }

    fn links(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n_rungs;
        let last = if self.boundary == Boundary::Periodic { n } else { n - 1 };
        (0..last).map(move |i| (i, (i + 1) % n))
    }
}

/// `t′e^{iφ} a†_{i+1}a_i + t′e^{−iφ} b†_{i+1}b_i + J a†_i b_i + h.c.`
pub fn ladder_hamiltonian<T: Real>(spec: &LadderSpec<T>) -> Result<DMatrix<Complex<T>>> {
    spec.check()?;
    let n = spec.n_rungs;
    let mut h = DMatrix::from_element(2 * n, 2 * n, cplx(T::zero()));
    let mut add = |r: usize, c: usize, z: Complex<T>| {
        h[(r, c)] += z;
        h[(c, r)] += z.conj();
    };
    for (i, next) in spec.links() {
        add(next, i, cis(spec.phi) * spec.t_prime);
        add(n + next, n + i, cis(-spec.phi) * spec.t_prime);
    }
    for i in 0..n {
        add(i, n + i, cplx(spec.j_rung));
    }
    Ok(h)
}

/// The ladder as a [`GaugeLattice`]; periodic rings need at least three rungs
/// so that every link is distinct.
pub fn ladder_lattice<T: Real>(spec: &LadderSpec<T>) -> Result<GaugeLattice<T>> {
    spec.check()?;
    let n = spec.n_rungs;
    let mut l = GaugeLattice::new(2 * n);
    for (i, next) in spec.links() {
        l.add_hopping(next, i, spec.t_prime, spec.phi)?;
        l.add_hopping(n + next, n + i, spec.t_prime, -spec.phi)?;
    }
    for i in 0..n {
        l.add_hopping(i, n + i, spec.j_rung, T::zero())?;
    }
    Ok(l)
}

/// Elementary square between rungs `i` and `i+1`, oriented so that its flux
/// is `+2φ`.
pub fn ladder_plaquette(n_rungs: usize, i: usize) -> [usize; 4] {
    let next = (i + 1) % n_rungs;
    [i, n_rungs + i, n_rungs + next, next]
}

/// Lower and upper Bloch bands of the infinite ladder at each `k`.
pub fn ladder_bloch_spectrum<T: Real>(t_prime: T, j_rung: T, phi: T, k_grid: &[T]) -> (Vec<T>, Vec<T>) {
    let two = T::lit(2.0);
    k_grid
        .iter()
        .map(|&k| {
            // 2×2 Bloch matrix [[ε_a, J], [J, ε_b]].
            let ea = two * t_prime * (k - phi).cos();
            let eb = two * t_prime * (k + phi).cos();
            let mean = (ea + eb) / two;
            let half = (ea - eb) / two;
            let root = (half * half + j_rung * j_rung).sqrt();
            (mean - root, mean + root)
        })
        .unzip()
}

/// Ascending eigenvalues of [`ladder_hamiltonian`].
pub fn ladder_spectrum<T: Real>(spec: &LadderSpec<T>) -> Result<Vec<T>> {
    Ok(hermitian_eigenvalues(ladder_hamiltonian(spec)?))
}
