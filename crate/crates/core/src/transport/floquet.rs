use nalgebra::DVector;
#[cfg(test)]
use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::output::SweepResult;
use crate::dynamics::{SingleParticleModel, ThreeSiteFullSpec, ThreeSiteMode};
use crate::error::{Error, Result};
use crate::integrate::{Rk4, SparseMatrix};
use crate::scalar::{angular, cabs, cplx, Real};

/// Time-domain steady-state settings. Times are in units of `1/κ` (µs·MHz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SteadyStateOptions {
    /// Integration time before the first convergence check.
    pub settle: f64,
    /// Integration time after which the run is abandoned.
    pub limit: f64,
    /// Relative change of the period-averaged output powers accepted as
    /// steady.
    pub tolerance: f64,
    /// Relative change above which hitting `limit` is a failure.
    pub failure_drift: f64,
}

impl Default for SteadyStateOptions {
    fn default() -> Self {
        Self {
            settle: 20.0,
            limit: 60.0,
            tolerance: 1e-3,
            failure_drift: 1e-2,
        }
    }
}

/// Integrates the classical amplitudes `ẋ = −i(H(t) + δ_d)x − (κ/2)x − √κ c_in`
/// (all rates ×2π) driven through site `input`, and returns the output
/// power `|√κ x + c_in|²` of every site averaged over one modulation period
/// in the steady state. Every site carries loss `kappa` and a port.
pub fn floquet_transmission<T: Real>(
    spec: &ThreeSiteFullSpec<T>,
    kappa: T,
    input: usize,
    delta_d: T,
    options: &SteadyStateOptions,
) -> Result<Vec<T>> {
    if spec.mode != ThreeSiteMode::QubitEliminated {
        return Err(Error::param("mode", 0.0, "time-domain transmission needs the qubit-eliminated model"));
    }
    if !(kappa > T::zero()) {
        return Err(Error::param("kappa", kappa.as_f64(), "must be > 0"));
    }
    let model = spec.single_particle()?;
    if input >= model.n_sites() {
        return Err(Error::IndexOutOfRange {
            index: input,
            len: model.n_sites(),
        });
    }
    steady_output(&model, kappa, input, delta_d, spec.omega_d, options)
}

fn steady_output<T: Real>(
    model: &SingleParticleModel<T>,
    kappa: T,
    input: usize,
    delta_d: T,
    omega_d: T,
    options: &SteadyStateOptions,
) -> Result<Vec<T>> {
    let n = model.n_sites();
    let i = Complex::new(T::zero(), T::one());
    let zero = cplx(T::zero());
    let half = T::lit(0.5);

    // Static generator A = −2πi(H₀ + δ_d) − πκ.
    let mut a0 = model.static_matrix.map(|z| -i * z * angular(T::one()));
    for k in 0..n {
        a0[(k, k)] += -i * angular(delta_d) - cplx(angular(half * kappa));
    }
    let bound = (0..n)
        .map(|r| a0.row(r).iter().map(|z| cabs(*z)).fold(T::zero(), |x, y| x + y))
        .fold(T::zero(), |x, y| x.max(y))
        + model
            .modulations
            .iter()
            .map(|m| angular(m.amplitude.mag()))
            .fold(T::zero(), |x, y| x + y);
    let a0 = SparseMatrix::from_dense(&a0);
    let mods: Vec<_> = model
        .modulations
        .iter()
        .map(|m| (m.site, angular(m.amplitude), angular(m.frequency), m.phase))
        .collect();

    let period = T::one() / omega_d.mag();
    let scale = bound.max(angular(omega_d.mag()));
    let h_max = T::one() / (T::lit(100.0) * scale);
    let steps = (period / h_max).ceil().to_usize().unwrap_or(1).max(1);
    let h = period / T::from_usize_lossy(steps);

    let drive = cplx(-angular(kappa).sqrt());
    let out_gain = angular(kappa).sqrt();
    let mut rhs = |t: T, x: &DVector<Complex<T>>, dx: &mut DVector<Complex<T>>| {
        dx.fill(zero);
        a0.apply_acc(x, dx, cplx(T::one()));
        for &(site, amp, w, phase) in &mods {
            dx[site] += -i * x[site] * (amp * (w * t + phase).cos());
        }
        dx[input] += drive;
    };

    let inv_kappa = T::one() / kappa;
    let settle_periods = (T::lit(options.settle) * inv_kappa / period).ceil().to_usize().unwrap_or(1);
    let limit_periods = (T::lit(options.limit) * inv_kappa / period).ceil().to_usize().unwrap_or(1);

    let mut x = DVector::from_element(n, zero);
    let mut rk = Rk4::new(n);
    let mut t = T::zero();
    let mut previous: Option<Vec<T>> = None;
    let mut drift = T::max_value().unwrap_or(T::lit(1e300));
    for p in 0..limit_periods.max(settle_periods + 2) {
        let mut power = vec![T::zero(); n];
        for k in 0..steps {
            for (site, acc) in power.iter_mut().enumerate() {
                let mut c = x[site] * out_gain;
                if site == input {
                    c += cplx(T::one());
                }
                *acc += c.norm_sqr();
            }
            let tk = T::from_usize_lossy(p * steps + k) * h;
            rk.step(&mut rhs, tk, &mut x, h);
        }
        t = T::from_usize_lossy((p + 1) * steps) * h;
        for v in &mut power {
            *v /= T::from_usize_lossy(steps);
        }
        if p + 1 >= settle_periods {
            if let Some(prev) = &previous {
                let scale = power.iter().fold(T::lit(1e-12), |m, v| m.max(*v));
                drift = power
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| (*a - *b).mag())
                    .fold(T::zero(), |m, v| m.max(v))
                    / scale;
                if drift < T::lit(options.tolerance) {
                    return Ok(power);
                }
            }
        }
        previous = Some(power);
    }
    if drift < T::lit(options.failure_drift) {
        log::warn!("transmission at delta_d = {delta_d} settled only to relative drift {drift}");
        return Ok(previous.expect("at least one period"));
    }
    Err(Error::NonConvergence(format!(
        "output power still drifting by {:.2e} per period at t = {} µs",
        drift.as_f64(),
        t
    )))
}

/// [`floquet_transmission`] over a detuning grid, in parallel.
pub fn floquet_transmission_sweep<T: Real>(
    spec: &ThreeSiteFullSpec<T>,
    kappa: T,
    input: usize,
    delta_range: &[T],
    options: &SteadyStateOptions,
) -> Result<SweepResult<T>> {
    let rows: Vec<Vec<T>> = delta_range
        .par_iter()
        .map(|&d| floquet_transmission(spec, kappa, input, d, options))
        .collect::<Result<_>>()?;
    let mut sweep = SweepResult::new("delta_d_MHz", delta_range.to_vec());
    for site in 0..rows.first().map_or(0, Vec::len) {
        sweep.push_curve(format!("T{}", site + 1), rows.iter().map(|r| r[site]).collect())?;
    }
    Ok(sweep)
}

/// Static-limit helper used by tests: steady output of a time-independent
/// single-particle matrix.
#[cfg(test)]
fn static_model<T: Real>(h: DMatrix<Complex<T>>) -> SingleParticleModel<T> {
    SingleParticleModel {
        static_matrix: h,
        modulations: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::PumpQubit;
    use crate::lattice::GaugeLattice;
    use crate::transport::scattering_matrix;

    #[test]
    fn static_limit_matches_scattering() {
        let mut l = GaugeLattice::new(3).with_losses(vec![0.2; 3]).unwrap();
        l.add_hopping(0, 1, 0.1, 0.4).unwrap();
        l.add_hopping(1, 2, 0.08, -0.2).unwrap();
        l.add_hopping(2, 0, 0.12, 0.9).unwrap();
        let model = static_model(l.hopping_matrix());
        let opts = SteadyStateOptions::default();
        for d in [-0.2f64, 0.0, 0.13] {
            let t = steady_output(&model, 0.2, 0, d, 20.0, &opts).unwrap();
            let s = scattering_matrix(&l, d).unwrap();
            for k in 0..3 {
                assert!((t[k] - s.transmissions[(k, 0)]).abs() < 1e-6, "{d} {k}");
            }
        }
    }

    fn spec(lambda: f64) -> ThreeSiteFullSpec<f64> {
        let pump = PumpQubit { g_p: 60.0, delta_p: 600.0, lambda, phi: 0.0 };
        ThreeSiteFullSpec {
            g12: 0.042,
            g13: 1.1,
            g23: 1.1,
            omega_d: -20.0,
            pumps: vec![pump, pump],
            mode: ThreeSiteMode::QubitEliminated,
            boson_dim: 3,
            stark_compensation: true,
        }
    }

    #[test]
    fn strong_loss_reflects() {
        let t = floquet_transmission(&spec(0.5), 50.0, 0, 0.0, &SteadyStateOptions::default()).unwrap();
        assert!(t[0] > 0.99 && t[1] < 0.01 && t[2] < 0.01);
    }

    #[test]
    fn unmodulated_is_reciprocal() {
        let opts = SteadyStateOptions::default();
        let from1 = floquet_transmission(&spec(0.0), 0.2, 0, 0.03, &opts).unwrap();
        let from2 = floquet_transmission(&spec(0.0), 0.2, 1, 0.03, &opts).unwrap();
        assert!((from1[1] - from2[0]).abs() < 1e-3, "{from1:?} {from2:?}");
    }

    #[test]
    fn rejects_invalid_inputs() {
        let opts = SteadyStateOptions::default();
        assert!(floquet_transmission(&spec(0.5), 0.0, 0, 0.0, &opts).is_err());
        assert!(floquet_transmission(&spec(0.5), 0.2, 3, 0.0, &opts).is_err());
        let mut s = spec(0.5);
        s.mode = ThreeSiteMode::WithQubits;
        assert!(floquet_transmission(&s, 0.2, 0, 0.0, &opts).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let opts = SteadyStateOptions {
            settle: 0.05,
            limit: 0.1,
            tolerance: 1e-12,
            failure_drift: 1e-12,
        };
        assert!(matches!(
            floquet_transmission(&spec(0.5), 0.2, 0, 0.0, &opts),
            Err(Error::NonConvergence(_))
        ));
    }
}
