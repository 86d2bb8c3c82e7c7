//! Steady-state input–output scattering of gauge lattices, in closed form
//! and by direct time-domain integration of the modulated network.

mod floquet;
mod output;

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{ab_effective, Direction, GaugeLattice};
use crate::scalar::{cplx, Real};

pub use floquet::{floquet_transmission, floquet_transmission_sweep, SteadyStateOptions};
pub use output::{format_significant, SweepResult, SIGNIFICANT_DIGITS};

/// Scattering matrix between the lossy sites (ports) of a lattice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScatteringResult<T: Real> {
    pub delta_d: T,
    /// Site index of each port, ascending.
    pub ports: Vec<usize>,
    #[serde(skip)]
    pub s: DMatrix<Complex<T>>,
    /// `T_ij = |S_ij|²`, output port `i`, input port `j`.
    pub transmissions: DMatrix<T>,
}

impl<T: Real> ScatteringResult<T> {
    pub fn n_ports(&self) -> usize {
        self.ports.len()
    }

    fn port_of(&self, site: usize) -> Option<usize> {
        self.ports.iter().position(|&p| p == site)
    }

    /// Power transmission from site `from` to site `to`, both ports.
    pub fn transmission(&self, to: usize, from: usize) -> Option<T> {
        Some(self.transmissions[(self.port_of(to)?, self.port_of(from)?)])
    }
}

/// `S = I − √K (i(δ_d + H) + K/2)⁻¹ √K` restricted to the sites with
/// `κ_i > 0`. Port-less sites stay in `H` as internal modes.
pub fn scattering_matrix<T: Real>(lattice: &GaugeLattice<T>, delta_d: T) -> Result<ScatteringResult<T>> {
    lattice.validate()?;
    let ports: Vec<usize> = (0..lattice.n_sites).filter(|&i| lattice.losses[i] > T::zero()).collect();
    if ports.is_empty() {
        return Err(Error::param("kappa", 0.0, "at least one site needs a port (kappa > 0)"));
    }
    let n = lattice.n_sites;
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let mut m = lattice.hopping_matrix() * i;
    for k in 0..n {
        m[(k, k)] += i * delta_d + cplx(half * lattice.losses[k]);
    }
    let inv = m
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("input-output matrix at delta_d = {delta_d}")))?;
    let np = ports.len();
    let mut s = DMatrix::from_element(np, np, cplx(T::zero()));
    for (a, &pa) in ports.iter().enumerate() {
        for (b, &pb) in ports.iter().enumerate() {
            let root = (lattice.losses[pa] * lattice.losses[pb]).sqrt();
            s[(a, b)] = -inv[(pa, pb)] * root;
            if a == b {
                s[(a, b)] += cplx(T::one());
            }
        }
    }
    let transmissions = s.map(|z| z.norm_sqr());
    Ok(ScatteringResult {
        delta_d,
        ports,
        s,
        transmissions,
    })
}

/// Mean transmission along the cyclic permutation of a three-port device.
pub fn circulator_fidelity<T: Real>(result: &ScatteringResult<T>, direction: Direction) -> Result<T> {
    if result.n_ports() != 3 {
        return Err(Error::LengthMismatch {
            expected: 3,
            got: result.n_ports(),
        });
    }
    if direction == Direction::None {
        return Err(Error::param("direction", 0.0, "must be ccw or cw"));
    }
    let sum = (0..3)
        .map(|j| result.transmissions[(direction.next(j, 3), j)])
        .fold(T::zero(), |a, b| a + b);
    Ok(sum / T::lit(3.0))
}

/// `T_i(δ_d)` for light entering at site `input`; curves `T1..Tn` are
/// labelled by 1-based site index.
pub fn transmission_sweep<T: Real>(lattice: &GaugeLattice<T>, delta_range: &[T], input: usize) -> Result<SweepResult<T>> {
    if input >= lattice.n_sites || !(lattice.losses[input] > T::zero()) {
        return Err(Error::param("input_port", input as f64, "must be a site with kappa > 0"));
    }
    let results: Vec<ScatteringResult<T>> = delta_range
        .par_iter()
        .map(|&d| scattering_matrix(lattice, d))
        .collect::<Result<_>>()?;
    let mut sweep = SweepResult::new("delta_d_MHz", delta_range.to_vec());
    for &port in &results[0].ports {
        let curve = results
            .iter()
            .map(|r| r.transmission(port, input).expect("port exists"))
            .collect();
        sweep.push_curve(format!("T{}", port + 1), curve)?;
    }
    Ok(sweep)
}

/// Transmission from site 1 to site 4 of the two-path plaquette versus loop
/// flux, in the gauge `φ₁ = φ₄ = Φ_B/4`. Sites 2 and 3 lose `kappa_p`.
pub fn ab_interference<T: Real>(j: T, kappa: T, kappa_p: T, flux_range: &[T]) -> Result<SweepResult<T>> {
    if !(kappa > T::zero()) {
        return Err(Error::param("kappa", kappa.as_f64(), "port loss must be > 0"));
    }
    if !(kappa_p >= T::zero()) {
        return Err(Error::param("kappa_p", kappa_p.as_f64(), "must be >= 0"));
    }
    let quarter = T::lit(0.25);
    let t41 = flux_range
        .par_iter()
        .map(|&flux| {
            let lattice = ab_effective(j, flux * quarter, flux * quarter)?
                .with_losses(vec![kappa, kappa_p, kappa_p, kappa])?;
            let r = scattering_matrix(&lattice, T::zero())?;
            Ok(r.transmission(3, 0).expect("both ends are ports"))
        })
        .collect::<Result<Vec<T>>>()?;
    let mut sweep = SweepResult::new("flux_rad", flux_range.to_vec());
    sweep.push_curve("T41", t41)?;
    Ok(sweep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{gauge_transform, time_reversal_symmetric};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ring(j: f64, phi_c: f64, kappa: f64) -> GaugeLattice<f64> {
        let mut l = GaugeLattice::new(3).with_losses(vec![kappa; 3]).unwrap();
        l.add_hopping(0, 1, j, phi_c).unwrap();
        l.add_hopping(1, 2, j, phi_c).unwrap();
        l.add_hopping(2, 0, j, phi_c).unwrap();
        l
    }

    #[test]
    fn ideal_circulator() {
        let r = scattering_matrix(&ring(0.1, PI / 6.0, 0.2), 0.0).unwrap();
        let target = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for a in 0..3 {
            for b in 0..3 {
                assert!((r.s[(a, b)].norm() - target[a][b]).abs() < 1e-12);
            }
        }
        assert!((circulator_fidelity(&r, Direction::Ccw).unwrap() - 1.0).abs() < 1e-10);
        assert!(circulator_fidelity(&r, Direction::Cw).unwrap() < 1e-10);
    }

    #[test]
    fn conjugate_flux_reverses_circulation() {
        for d in [-0.3, 0.0, 0.17] {
            let p = scattering_matrix(&ring(0.1, PI / 6.0, 0.2), d).unwrap();
            let m = scattering_matrix(&ring(0.1, -PI / 6.0, 0.2), d).unwrap();
            let a = circulator_fidelity(&m, Direction::Ccw).unwrap();
            let b = circulator_fidelity(&p, Direction::Cw).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn far_detuned_reflects() {
        let r = scattering_matrix(&ring(0.1, 0.3, 0.2), 1e7).unwrap();
        assert!((r.s.clone() - DMatrix::identity(3, 3)).norm() < 1e-6);
    }

    #[test]
    fn zero_flux_splits_reciprocally() {
        let r = scattering_matrix(&ring(0.1, 0.0, 0.2), 0.05).unwrap();
        assert!((r.transmissions[(1, 0)] - r.transmissions[(2, 0)]).abs() < 1e-14);
    }

    #[test]
    fn internal_sites_are_not_ports() {
        let mut l = GaugeLattice::new(3).with_losses(vec![0.2, 0.0, 0.2]).unwrap();
        l.add_hopping(0, 1, 0.1, 0.0).unwrap();
        l.add_hopping(1, 2, 0.1, 0.0).unwrap();
        let r = scattering_matrix(&l, 0.0).unwrap();
        assert_eq!(r.ports, vec![0, 2]);
        let flux: f64 = (0..2).map(|i| r.transmissions[(i, 0)]).sum();
        assert!((flux - 1.0).abs() < 1e-12);
        assert!(r.transmission(1, 0).is_none());
        assert!(scattering_matrix(&GaugeLattice::<f64>::new(2), 0.0).is_err());
    }

    #[test]
    fn wrong_port_count() {
        let mut l = GaugeLattice::new(2).with_losses(vec![0.2, 0.2]).unwrap();
        l.add_hopping(0, 1, 0.1, 0.0).unwrap();
        let r = scattering_matrix(&l, 0.0).unwrap();
        assert!(circulator_fidelity(&r, Direction::Ccw).is_err());
    }

    #[test]
    fn sweep_symmetry() {
        let deltas: Vec<f64> = (-10..=10).map(|k| k as f64 * 0.05).collect();
        let s = transmission_sweep(&ring(0.1, PI / 6.0, 0.2), &deltas, 0).unwrap();
        let t1 = s.curve("T1").unwrap();
        for k in 0..deltas.len() {
            assert!((t1[k] - t1[deltas.len() - 1 - k]).abs() < 1e-12);
            let total: f64 = ["T1", "T2", "T3"].iter().map(|c| s.curve(c).unwrap()[k]).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        assert!(transmission_sweep(&ring(0.1, 0.0, 0.2), &deltas, 5).is_err());
    }

    #[test]
    fn ab_destructive_point() {
        let flux = [0.0, PI, 2.0 * PI];
        let s = ab_interference(0.1, 0.2, 0.02, &flux).unwrap();
        let t = s.curve("T41").unwrap();
        assert!(t[1] < 1e-10);
        assert!((t[0] - t[2]).abs() < 1e-12 && t[0] > 0.5);
        assert!(ab_interference(0.1, 0.0, 0.0, &flux).is_err());
    }

    #[test]
    fn ab_depends_on_flux_only() {
        let base = ab_effective(0.1, 0.3, 0.5).unwrap().with_losses(vec![0.2, 0.05, 0.05, 0.2]).unwrap();
        let shifted = ab_effective(0.1, 0.3 + 0.4, 0.5 - 0.4).unwrap().with_losses(vec![0.2, 0.05, 0.05, 0.2]).unwrap();
        let a = scattering_matrix(&base, 0.02).unwrap();
        let b = scattering_matrix(&shifted, 0.02).unwrap();
        assert!((a.transmissions.clone() - b.transmissions.clone()).norm() < 1e-12);
    }

    fn random_ring(p: &[f64], a: &[f64]) -> GaugeLattice<f64> {
        let mut l = GaugeLattice::new(3).with_losses(vec![0.2; 3]).unwrap();
        l.add_hopping(0, 1, a[0], p[0]).unwrap();
        l.add_hopping(1, 2, a[1], p[1]).unwrap();
        l.add_hopping(2, 0, a[2], p[2]).unwrap();
        l
    }

    proptest! {
        #[test]
        fn cayley_unitarity(p in prop::collection::vec(-PI..PI, 3), a in prop::collection::vec(0.0f64..0.5, 3), d in -1.0f64..1.0) {
            let r = scattering_matrix(&random_ring(&p, &a), d).unwrap();
            let defect = (r.s.adjoint() * &r.s - DMatrix::identity(3, 3)).norm();
            prop_assert!(defect < 1e-10);
        }

        #[test]
        fn gauge_leaves_transmissions(
            p in prop::collection::vec(-PI..PI, 3),
            a in prop::collection::vec(0.0f64..0.5, 3),
            theta in prop::collection::vec(-PI..PI, 3),
        ) {
            let l = random_ring(&p, &a);
            let g = gauge_transform(&l, &theta).unwrap();
            let x = scattering_matrix(&l, 0.03).unwrap();
            let y = scattering_matrix(&g, 0.03).unwrap();
            prop_assert!((x.transmissions - y.transmissions).norm() < 1e-10);
        }

        #[test]
        fn reciprocity_follows_trs(p in prop::collection::vec(-PI..PI, 2), a in prop::collection::vec(0.01f64..0.5, 3), z in 0i32..4) {
            // Third phase chosen so that the loop flux is a multiple of π.
            let p3 = z as f64 * PI - p[0] - p[1];
            let l = random_ring(&[p[0], p[1], p3], &a);
            prop_assert!(time_reversal_symmetric(&l));
            let r = scattering_matrix(&l, 0.07).unwrap();
            prop_assert!((r.transmissions.clone() - r.transmissions.transpose()).norm() < 1e-10);
        }
    }
}
