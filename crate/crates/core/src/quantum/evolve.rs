use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex;
use serde::Serialize;

use super::model::TimeDependentModel;
use super::operator::Operator;
use super::space::SubsystemKind;
use crate::error::{Error, Result};
use crate::integrate::{substeps, Rk4, SparseMatrix};
use crate::scalar::Real;

/// Sampled expectation values of a unitary evolution.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory<T: Real> {
    /// Sample times in µs.
    pub times: Vec<T>,
    pub observables: BTreeMap<String, Vec<T>>,
    pub norms: Vec<T>,
    /// Largest population found in the top Fock level of any boson.
    pub max_leakage: T,
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub final_state: DVector<Complex<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn observable(&self, label: &str) -> Option<&[T]> {
        self.observables.get(label).map(Vec::as_slice)
    }

    /// `max_t |‖ψ(t)‖ − 1|`.
    pub fn max_norm_drift(&self) -> T {
        self.norms
            .iter()
            .map(|n| (*n - T::one()).mag())
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Leakage threshold for the top Fock level.
pub const LEAKAGE_WARN: f64 = 1e-6;

/// Integrates `i dψ/dt = H(t) ψ` with the model's default fixed step.
pub fn evolve<T: Real>(
    model: &TimeDependentModel<T>,
    initial: &DVector<Complex<T>>,
    t_grid: &[T],
    observables: &BTreeMap<String, Operator<T>>,
) -> Result<Trajectory<T>> {
    evolve_with_step(model, initial, t_grid, observables, model.default_step())
}

/// As [`evolve`], with an explicit upper bound on the RK4 step. Each grid
/// interval is split into equal substeps no longer than `max_step`.
pub fn evolve_with_step<T: Real>(
    model: &TimeDependentModel<T>,
    initial: &DVector<Complex<T>>,
    t_grid: &[T],
    observables: &BTreeMap<String, Operator<T>>,
    max_step: T,
) -> Result<Trajectory<T>> {
    let space = model.space();
    let n = space.total_dim();
    if initial.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: initial.len(),
        });
    }
    let norm0 = initial.norm();
    let norm_tol = T::lit(1e-10).max(T::lit(100.0) * T::eps());
    if (norm0 - T::one()).mag() > norm_tol {
        return Err(Error::NotNormalized(norm0.as_f64()));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::BadTimeGrid);
    }
    let scale = model.frequency_scale();
    if !(max_step > T::zero()) || max_step * T::lit(50.0) * scale > T::one() {
        return Err(Error::param(
            "max_step",
            max_step.as_f64(),
            format!("must be positive and at most 1/(50·{})", scale),
        ));
    }
    for op in observables.values() {
        if op.dim() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: op.dim(),
            });
        }
    }

    // Spot-check Hermiticity of the assembled H(t) on up to 64 grid samples.
    let stride = (t_grid.len() / 64).max(1);
    for &t in t_grid.iter().step_by(stride).chain(t_grid.last()) {
        let h = model.hamiltonian_at(t);
        let defect = (&h - h.adjoint()).norm();
        let tol = T::lit(1e-12) * (T::one() + h.norm());
        if !(defect <= tol) {
            return Err(Error::NonHermitian {
                t: t.as_f64(),
                deviation: defect.as_f64(),
            });
        }
    }

    let minus_i = Complex::new(T::zero(), -T::one());
    let static_sparse = SparseMatrix::from_dense(&model.static_part());
    let driven: Vec<_> = model
        .driven_terms()
        .iter()
        .map(|d| (SparseMatrix::from_dense(d.operator.matrix()), d.envelope.clone()))
        .collect();
    let mut rhs = |t: T, y: &DVector<Complex<T>>, out: &mut DVector<Complex<T>>| {
        out.fill(Complex::new(T::zero(), T::zero()));
        static_sparse.apply_acc(y, out, minus_i);
        for (op, env) in &driven {
            op.apply_acc(y, out, minus_i * env.value(t));
        }
    };

    let obs_sparse: Vec<(String, SparseMatrix<T>)> = observables
        .iter()
        .map(|(k, op)| (k.clone(), SparseMatrix::from_dense(op.matrix())))
        .collect();

    // Basis indices sitting in the top Fock level of some boson.
    let top_levels: Vec<usize> = (0..n)
        .filter(|&i| {
            space
                .subsystems()
                .iter()
                .enumerate()
                .any(|(k, s)| s.kind == SubsystemKind::Boson && space.level(i, k) == s.dim - 1)
        })
        .collect();

    let mut traj = Trajectory {
        times: Vec::with_capacity(t_grid.len()),
        observables: obs_sparse
            .iter()
            .map(|(k, _)| (k.clone(), Vec::with_capacity(t_grid.len())))
            .collect(),
        norms: Vec::with_capacity(t_grid.len()),
        max_leakage: T::zero(),
        warnings: Vec::new(),
        final_state: initial.clone(),
    };

    let mut psi = initial.clone();
    let mut scratch = DVector::zeros(n);
    let mut rk = Rk4::new(n);
    let record = |t: T, psi: &DVector<Complex<T>>, traj: &mut Trajectory<T>, scratch: &mut DVector<Complex<T>>| {
        traj.times.push(t);
        traj.norms.push(psi.norm());
        for (label, op) in &obs_sparse {
            scratch.fill(Complex::new(T::zero(), T::zero()));
            op.apply_acc(psi, scratch, Complex::new(T::one(), T::zero()));
            let v = psi.dotc(scratch).re;
            traj.observables.get_mut(label).expect("label registered").push(v);
        }
        let leak = top_levels.iter().map(|&i| psi[i].norm_sqr()).fold(T::zero(), |a, b| a + b);
        traj.max_leakage = traj.max_leakage.max(leak);
    };

    record(t_grid[0], &psi, &mut traj, &mut scratch);
    for w in t_grid.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let m = substeps(t1 - t0, max_step);
        let h = (t1 - t0) / T::from_usize_lossy(m);
        for k in 0..m {
            rk.step(&mut rhs, t0 + h * T::from_usize_lossy(k), &mut psi, h);
        }
        record(t1, &psi, &mut traj, &mut scratch);
    }

    if traj.max_leakage > T::lit(LEAKAGE_WARN) && !top_levels.is_empty() {
        let msg = format!(
            "top Fock level population reached {:.3e}; increase the boson truncation",
            traj.max_leakage.as_f64()
        );
        log::warn!("{msg}");
        traj.warnings.push(msg);
    }
    traj.final_state = psi;
    Ok(traj)
}

/// Evenly spaced grid `t0, t0 + dt, …, t1` with `samples` points.
pub fn linear_grid<T: Real>(t0: T, t1: T, samples: usize) -> Vec<T> {
    assert!(samples >= 2, "a grid needs at least two samples");
    let last = T::from_usize_lossy(samples - 1);
    (0..samples)
        .map(|k| t0 + (t1 - t0) * T::from_usize_lossy(k) / last)
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::quantum::model::Envelope;
    use crate::quantum::operator::{basis_state, mode_operator, ModeOp};
    use crate::quantum::space::{build_space, SubsystemSpec};

    fn two_bosons() -> Arc<crate::quantum::SpaceDescriptor> {
        Arc::new(build_space(vec![SubsystemSpec::boson("b1", 3), SubsystemSpec::boson("b2", 3)]).unwrap())
    }

    fn hopping(space: &Arc<crate::quantum::SpaceDescriptor>, j: f64) -> Operator<f64> {
        let b1 = mode_operator::<f64>(space, 0, ModeOp::Lower).unwrap();
        let b2 = mode_operator::<f64>(space, 1, ModeOp::Lower).unwrap();
        let h = &(&b1.adjoint() * &b2) + &(&b2.adjoint() * &b1);
        h.scale_real(j)
    }

    #[test]
    fn resonant_rabi_transfer() {
        let space = two_bosons();
        let j = 0.7;
        let mut model = TimeDependentModel::new(space.clone());
        model.add_static(hopping(&space, j)).unwrap();
        let psi0 = basis_state::<f64>(&space, &[1, 0]).unwrap();
        let mut obs = BTreeMap::new();
        obs.insert("P2".to_string(), Operator::projector(space.clone(), &[0, 1]).unwrap());
        let grid = linear_grid(0.0, 5.0, 101);
        let traj = evolve(&model, &psi0, &grid, &obs).unwrap();
        for (t, p) in traj.times.iter().zip(traj.observable("P2").unwrap()) {
            assert!((p - (j * t).sin().powi(2)).abs() < 1e-9, "t={t}");
        }
        assert!(traj.max_norm_drift() < 1e-10);
        assert!(traj.warnings.is_empty());
    }

    #[test]
    fn zero_hamiltonian_is_identity() {
        let space = two_bosons();
        let model = TimeDependentModel::new(space.clone());
        let psi0 = basis_state::<f64>(&space, &[0, 1]).unwrap();
        let mut obs = BTreeMap::new();
        obs.insert("n2".to_string(), mode_operator(&space, 1, ModeOp::Number).unwrap());
        let traj = evolve(&model, &psi0, &linear_grid(0.0, 1.0, 11), &obs).unwrap();
        assert!(traj.observable("n2").unwrap().iter().all(|&v| v == 1.0));
        assert_eq!(traj.final_state, psi0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let space = two_bosons();
        let mut model = TimeDependentModel::new(space.clone());
        model.add_static(hopping(&space, 1.0)).unwrap();
        let obs = BTreeMap::new();
        let bad = basis_state::<f64>(&space, &[1, 0]).unwrap() * Complex::new(2.0, 0.0);
        assert!(matches!(
            evolve(&model, &bad, &[0.0, 1.0], &obs),
            Err(Error::NotNormalized(_))
        ));
        let psi = basis_state::<f64>(&space, &[1, 0]).unwrap();
        assert!(matches!(evolve(&model, &psi, &[0.0, 0.0], &obs), Err(Error::BadTimeGrid)));
        assert!(evolve_with_step(&model, &psi, &[0.0, 1.0], &obs, 0.5).is_err());
    }

    #[test]
    fn non_hermitian_term_rejected() {
        let space = two_bosons();
        let b1 = mode_operator::<f64>(&space, 0, ModeOp::Lower).unwrap();
        let mut model = TimeDependentModel::new(space);
        assert!(matches!(model.add_static(b1.clone()), Err(Error::NonHermitian { .. })));
        assert!(model.add_driven(b1, Envelope::cosine(1.0, 1.0, 0.0)).is_err());
    }

    #[test]
    fn leakage_warning_fires() {
        let space = Arc::new(build_space(vec![SubsystemSpec::boson("b", 2)]).unwrap());
        let b = mode_operator::<f64>(&space, 0, ModeOp::Lower).unwrap();
        let x = &b + &b.adjoint();
        let mut model = TimeDependentModel::new(space.clone());
        model.add_static(x).unwrap();
        let psi0 = basis_state::<f64>(&space, &[0]).unwrap();
        let traj = evolve(&model, &psi0, &linear_grid(0.0, 1.0, 5), &BTreeMap::new()).unwrap();
        assert!(traj.max_leakage > 0.1);
        assert_eq!(traj.warnings.len(), 1);
    }

    fn driven_pair() -> (Arc<crate::quantum::SpaceDescriptor>, TimeDependentModel<f64>) {
        let space = two_bosons();
        let mut model = TimeDependentModel::new(space.clone());
        model.add_static(hopping(&space, 1.0)).unwrap();
        let n1 = mode_operator::<f64>(&space, 0, ModeOp::Number).unwrap();
        model.add_driven(n1, Envelope::cosine(2.0, 3.0, 0.4)).unwrap();
        (space, model)
    }

    #[test]
    fn step_halving_is_fourth_order() {
        let (space, model) = driven_pair();
        let psi0 = basis_state::<f64>(&space, &[1, 0]).unwrap();
        let obs = BTreeMap::new();
        let h0 = model.default_step();
        let run = |h: f64| evolve_with_step(&model, &psi0, &[0.0, 10.0], &obs, h).unwrap().final_state;
        let reference = run(h0 / 16.0);
        let e1 = (run(h0) - &reference).norm();
        let e2 = (run(h0 / 2.0) - &reference).norm();
        assert!(e1 / e2 >= 8.0, "{e1} {e2}");
    }

    #[test]
    fn conserves_norm_and_excitations() {
        let (space, model) = driven_pair();
        let psi0 = basis_state::<f64>(&space, &[1, 0]).unwrap();
        let mut obs = BTreeMap::new();
        obs.insert("N".to_string(), crate::quantum::excitation_number(&space));
        let traj = evolve(&model, &psi0, &linear_grid(0.0, 20.0, 201), &obs).unwrap();
        assert!(traj.max_norm_drift() < 1e-8);
        assert!(traj.observable("N").unwrap().iter().all(|n| (n - 1.0).abs() < 1e-8));
    }
}
