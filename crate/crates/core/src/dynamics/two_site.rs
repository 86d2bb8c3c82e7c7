use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::calibration::{exact_shift_harmonics, sideband_stark};
use super::peaks::{first_peak, period_average};
use crate::error::{Error, Result};
use crate::floquet::{chi_harmonics, dispersive_shift, drive_strengths, DriveSpec, DEFAULT_NMAX};
use crate::lattice::two_site_effective;
use crate::quantum::{
    basis_state, build_space, evolve, mode_operator, ModeOp, Operator, SpaceDescriptor, SubsystemSpec,
    TimeDependentModel, Trajectory,
};
use crate::scalar::{angular, cabs, cplx, Real};

/// Which sideband bridges the two cavities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Resonance {
    /// `δ₁₂ = −ω_d`; the hopping carries `+φ`.
    Lower,
    /// `δ₁₂ = +ω_d`; the hopping carries `−φ`.
    Upper,
}

impl Resonance {
    pub fn sign(self) -> i8 {
        match self {
            Resonance::Lower => 1,
            Resonance::Upper => -1,
        }
    }
}

/// How the bare cavity detuning is chosen from the resonance condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetuningCalibration {
    /// Invert the leading-order renormalized detuning.
    LeadingOrder,
    /// Use the exact two-level shift and all sideband Stark shifts.
    Exact,
}

/// Two cavities, cavity 1 dispersively coupled to a longitudinally driven
/// qubit. Frequencies in MHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoSiteFullSpec<T> {
    pub g12: T,
    pub g_p: T,
    pub delta_p: T,
    pub lambda: T,
    pub omega_d: T,
    pub phi: T,
    pub resonance: Resonance,
    pub boson_dim: usize,
    pub calibration: DetuningCalibration,
}

impl<T: Real> TwoSiteFullSpec<T> {
    /// Drive amplitude `Ω_p = λΔ_p`.
    pub fn omega_p(&self) -> T {
        self.lambda * self.delta_p
    }

    /// Target renormalized detuning `δ₁₂ = ∓ω_d`.
    pub fn delta12(&self) -> T {
        match self.resonance {
            Resonance::Lower => -self.omega_d,
            Resonance::Upper => self.omega_d,
        }
    }

    pub fn drive(&self) -> Result<DriveSpec<T>> {
        DriveSpec::new(self.lambda, self.omega_d, self.phi)
    }

    fn validate(&self) -> Result<()> {
        if self.boson_dim < 2 {
            return Err(Error::param("boson_dim", self.boson_dim as f64, "must be >= 2"));
        }
        self.drive()?;
        dispersive_shift(self.g_p, self.delta_p)?;
        Ok(())
    }

    /// `K₁` and the effective hopping `J₁₂ = g₁₂K₁/2` (MHz).
    pub fn effective_coupling(&self) -> Result<(T, T)> {
        let chi0 = dispersive_shift(self.g_p, self.delta_p)?;
        let h = chi_harmonics(&self.drive()?, DEFAULT_NMAX)?;
        let k1 = drive_strengths(chi0, self.omega_d, &h)?[0];
        Ok((k1, self.g12 * k1 / T::lit(2.0)))
    }

    /// Bare detuning `δ′₁₂` of cavity 2 below cavity 1 that places the
    /// dressed cavities on the selected sideband resonance.
    pub fn bare_detuning(&self) -> Result<T> {
        let target = self.delta12();
        match self.calibration {
            DetuningCalibration::LeadingOrder => {
                let chi0 = dispersive_shift(self.g_p, self.delta_p)?;
                let c0 = chi_harmonics(&self.drive()?, 1)?.c0();
                // δ′² − aδ′ + 2g₁₂² = 0, keeping the root continuous with g₁₂ → 0.
                let a = target - chi0 * c0;
                let disc = a * a - T::lit(8.0) * self.g12 * self.g12;
                if disc < T::zero() {
                    return Err(Error::param("g12", self.g12.as_f64(), "no real bare detuning"));
                }
                let root = disc.sqrt();
                Ok(if a >= T::zero() { (a + root) / T::lit(2.0) } else { (a - root) / T::lit(2.0) })
            }
            DetuningCalibration::Exact => {
                let (mean, first) = exact_shift_harmonics(self.g_p, self.delta_p, self.lambda);
                let k = cabs(first) / self.omega_d;
                let stark = T::lit(2.0) * sideband_stark(self.g12, target, self.omega_d, k);
                Ok(target - mean - stark)
            }
        }
    }
}

/// Subsystem order of the full model: `[cavity 1, cavity 2, qubit]`.
pub fn build_two_site_full<T: Real>(spec: &TwoSiteFullSpec<T>) -> Result<TimeDependentModel<T>> {
    spec.validate()?;
    let space = Arc::new(build_space(vec![
        SubsystemSpec::boson("b1", spec.boson_dim),
        SubsystemSpec::boson("b2", spec.boson_dim),
        SubsystemSpec::qubit("p"),
    ])?);
    let b1 = mode_operator::<T>(&space, 0, ModeOp::Lower)?;
    let b2 = mode_operator::<T>(&space, 1, ModeOp::Lower)?;
    let n2 = mode_operator::<T>(&space, 1, ModeOp::Number)?;
    let sz = mode_operator::<T>(&space, 2, ModeOp::SigmaZ)?;
    let sm = mode_operator::<T>(&space, 2, ModeOp::SigmaMinus)?;
    let w = |f: T| angular(f);
    let half = T::lit(0.5);

    let hop = &(&b1.adjoint() * &b2) + &(&b2.adjoint() * &b1);
    let jc = &(&b1.adjoint() * &sm) + &(&sm.adjoint() * &b1);
    let mut model = TimeDependentModel::new(space.clone());
    model
        .add_static(n2.scale_real(-w(spec.bare_detuning()?)))?
        .add_static(hop.scale_real(w(spec.g12)))?
        .add_static(sz.scale_real(-w(spec.delta_p) * half))?
        .add_static(jc.scale_real(w(spec.g_p)))?
        .add_driven(
            sz,
            crate::quantum::Envelope::cosine(-w(spec.omega_p()) * half, w(spec.omega_d), spec.phi),
        )?;
    Ok(model)
}

/// Full and effective population dynamics on a common grid.
#[derive(Clone, Debug, Serialize)]
pub struct RabiComparison<T: Real> {
    pub full: Trajectory<T>,
    pub effective: Trajectory<T>,
    /// `max_{t,i} |P_i^full − P_i^eff|` over `P1`, `P2`.
    pub max_deviation: T,
    pub k1: T,
    /// Effective hopping in MHz.
    pub j12: T,
    /// First period-averaged maximum of `P2` in the full model (µs).
    pub swap_time: Option<T>,
    /// Same quantity for the effective model.
    pub effective_swap_time: Option<T>,
}

/// Grid samples per modulation period.
pub const SAMPLES_PER_PERIOD: usize = 40;

/// Uniform grid on `[0, t_max]` resolving the modulation period `1/|f|`
/// with [`SAMPLES_PER_PERIOD`] points; extends slightly past `t_max`.
pub(crate) fn period_grid<T: Real>(t_max: T, omega_d: T) -> Vec<T> {
    let dt = T::one() / (omega_d.mag() * T::from_usize_lossy(SAMPLES_PER_PERIOD));
    let steps = (t_max / dt).ceil().to_usize().unwrap_or(0).max(1);
    (0..=steps).map(|k| dt * T::from_usize_lossy(k)).collect()
}

fn population_ops<T: Real>(space: &Arc<SpaceDescriptor>, qubit: bool) -> Result<BTreeMap<String, Operator<T>>> {
    let mut obs = BTreeMap::new();
    let (one, two) = if qubit { (vec![1, 0, 0], vec![0, 1, 0]) } else { (vec![1, 0], vec![0, 1]) };
    obs.insert("P1".to_string(), Operator::projector(space.clone(), &one)?);
    obs.insert("P2".to_string(), Operator::projector(space.clone(), &two)?);
    if qubit {
        let sz = mode_operator::<T>(space, 2, ModeOp::SigmaZ)?;
        let id = Operator::identity(space.clone());
        obs.insert("Pe".to_string(), (&sz + &id).scale_real(T::lit(0.5)));
    }
    Ok(obs)
}

/// Effective two-cavity model with the sideband hopping alone.
pub fn build_two_site_effective<T: Real>(spec: &TwoSiteFullSpec<T>) -> Result<TimeDependentModel<T>> {
    spec.validate()?;
    let (k1, _) = spec.effective_coupling()?;
    let lattice = two_site_effective(spec.g12, k1, spec.phi, spec.resonance.sign())?;
    let space = Arc::new(build_space(vec![
        SubsystemSpec::boson("b1", spec.boson_dim),
        SubsystemSpec::boson("b2", spec.boson_dim),
    ])?);
    let b1 = mode_operator::<T>(&space, 0, ModeOp::Lower)?;
    let b2 = mode_operator::<T>(&space, 1, ModeOp::Lower)?;
    let h = lattice.hopping_matrix();
    let term = &(&b1.adjoint() * &b2).scale(h[(0, 1)] * cplx(angular(T::one()))) + &(&b2.adjoint() * &b1).scale(h[(1, 0)] * cplx(angular(T::one())));
    let mut model = TimeDependentModel::new(space);
    model.add_static(term)?;
    Ok(model)
}

/// Integrates the full and effective models from one phonon in cavity 1
/// (qubit in its ground state) up to `t_max` µs.
pub fn rabi_compare<T: Real>(spec: &TwoSiteFullSpec<T>, t_max: T) -> Result<RabiComparison<T>> {
    let full_model = build_two_site_full(spec)?;
    let eff_model = build_two_site_effective(spec)?;
    let (k1, j12) = spec.effective_coupling()?;
    let grid = period_grid(t_max, spec.omega_d);

    let full_space = full_model.space().clone();
    let eff_space = eff_model.space().clone();
    let full = evolve(
        &full_model,
        &basis_state(&full_space, &[1, 0, 0])?,
        &grid,
        &population_ops(&full_space, true)?,
    )?;
    let effective = evolve(
        &eff_model,
        &basis_state(&eff_space, &[1, 0])?,
        &grid,
        &population_ops(&eff_space, false)?,
    )?;

    let mut max_deviation = T::zero();
    for label in ["P1", "P2"] {
        let a = full.observable(label).expect("registered");
        let b = effective.observable(label).expect("registered");
        for (x, y) in a.iter().zip(b) {
            max_deviation = max_deviation.max((*x - *y).mag());
        }
    }
    let threshold = T::lit(super::PEAK_THRESHOLD);
    let swap = |traj: &Trajectory<T>| {
        let avg = period_average(traj.observable("P2").expect("registered"), SAMPLES_PER_PERIOD);
        first_peak(&traj.times, &avg, threshold)
    };
    Ok(RabiComparison {
        swap_time: swap(&full),
        effective_swap_time: swap(&effective),
        full,
        effective,
        max_deviation,
        k1,
        j12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn figure3() -> TwoSiteFullSpec<f64> {
        TwoSiteFullSpec {
            g12: 1.0,
            g_p: 60.0,
            delta_p: 600.0,
            lambda: 0.5,
            omega_d: 15.0,
            phi: 0.0,
            resonance: Resonance::Lower,
            boson_dim: 3,
            calibration: DetuningCalibration::Exact,
        }
    }

    #[test]
    fn coupling_constants() {
        let (k1, j) = figure3().effective_coupling().unwrap();
        assert!((k1 - 0.2475).abs() < 1e-3);
        assert!((j - 0.1238).abs() < 1e-3);
    }

    #[test]
    fn leading_order_inversion_satisfies_renormalization() {
        let mut s = figure3();
        s.calibration = DetuningCalibration::LeadingOrder;
        let dp = s.bare_detuning().unwrap();
        let chi0c0 = 6.0 * 1.154_700_538_379_251_7;
        assert!((dp + 2.0 / dp + chi0c0 - s.delta12()).abs() < 1e-9);
        assert!(dp < 0.0);
    }

    #[test]
    fn model_structure() {
        let m = build_two_site_full(&figure3()).unwrap();
        assert_eq!(m.space().total_dim(), 18);
        assert_eq!(m.driven_terms().len(), 1);
        let n = crate::quantum::excitation_number::<f64>(m.space());
        for t in [0.0, 0.013, 0.4] {
            let h = Operator::new(m.space().clone(), m.hamiltonian_at(t)).unwrap();
            assert!(h.commutator(&n).norm() < 1e-9);
            assert!(h.is_hermitian(1e-12));
        }
        let mut bad = figure3();
        bad.boson_dim = 1;
        assert!(build_two_site_full(&bad).is_err());
    }

    #[test]
    fn no_bridge_without_qubit_coupling() {
        let mut s = figure3();
        s.g_p = 0.0;
        let r = rabi_compare(&s, 1.0).unwrap();
        let bound = (2.0 * s.g12 / s.delta12()).powi(2);
        let p2max = r.full.observable("P2").unwrap().iter().cloned().fold(0.0, f64::max);
        assert!(p2max <= bound * 1.0001, "{p2max} vs {bound}");
    }

    #[test]
    fn effective_swap_scales_inversely_with_hopping() {
        let swap = |s: &TwoSiteFullSpec<f64>| {
            let m = build_two_site_effective(s).unwrap();
            let space = m.space().clone();
            let obs = population_ops(&space, false).unwrap();
            let psi = basis_state(&space, &[1, 0]).unwrap();
            let tr = evolve(&m, &psi, &period_grid(3.0, s.omega_d), &obs).unwrap();
            first_peak(&tr.times, tr.observable("P2").unwrap(), 0.3).unwrap()
        };
        let s = figure3();
        let mut d = s;
        d.g12 = 2.0;
        let (t1, t2) = (swap(&s), swap(&d));
        assert!((t1 - 1.0 / (4.0 * s.effective_coupling().unwrap().1)).abs() < 1e-6);
        assert!((t1 / t2 - 2.0).abs() < 1e-6);
    }
}
