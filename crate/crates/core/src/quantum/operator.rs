use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::space::{SpaceDescriptor, SubsystemKind};
use crate::error::{Error, Result};
use crate::scalar::{cplx, Real};

/// Local single-mode operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeOp {
    Lower,
    Raise,
    Number,
    SigmaZ,
    SigmaPlus,
    SigmaMinus,
}

impl ModeOp {
    pub fn name(self) -> &'static str {
        match self {
            ModeOp::Lower => "lower",
            ModeOp::Raise => "raise",
            ModeOp::Number => "number",
            ModeOp::SigmaZ => "sigma_z",
            ModeOp::SigmaPlus => "sigma_plus",
            ModeOp::SigmaMinus => "sigma_minus",
        }
    }

    fn acts_on(self) -> SubsystemKind {
        match self {
            ModeOp::Lower | ModeOp::Raise | ModeOp::Number => SubsystemKind::Boson,
            ModeOp::SigmaZ | ModeOp::SigmaPlus | ModeOp::SigmaMinus => SubsystemKind::Qubit,
        }
    }

    fn local_matrix<T: Real>(self, dim: usize) -> DMatrix<Complex<T>> {
        let mut m = DMatrix::zeros(dim, dim);
        match self {
            ModeOp::Lower => {
                for n in 1..dim {
                    m[(n - 1, n)] = cplx(T::from_usize_lossy(n).sqrt());
                }
            }
            ModeOp::Raise => {
                for n in 1..dim {
                    m[(n, n - 1)] = cplx(T::from_usize_lossy(n).sqrt());
                }
            }
            ModeOp::Number => {
                for n in 0..dim {
                    m[(n, n)] = cplx(T::from_usize_lossy(n));
                }
            }
            ModeOp::SigmaZ => {
                m[(0, 0)] = cplx(-T::one());
                m[(1, 1)] = cplx(T::one());
            }
            ModeOp::SigmaPlus => m[(1, 0)] = cplx(T::one()),
            ModeOp::SigmaMinus => m[(0, 1)] = cplx(T::one()),
        }
        m
    }
}

/// Dense operator on a product space.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator<T: Real> {
    space: Arc<SpaceDescriptor>,
    matrix: DMatrix<Complex<T>>,
}

impl<T: Real> Operator<T> {
    pub fn new(space: Arc<SpaceDescriptor>, matrix: DMatrix<Complex<T>>) -> Result<Self> {
        let n = space.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvalidSpace(format!(
                "operator is {}x{}, space dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                n
            )));
        }
        Ok(Self { space, matrix })
    }

    pub fn zero(space: Arc<SpaceDescriptor>) -> Self {
        let n = space.total_dim();
        Self {
            space,
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn identity(space: Arc<SpaceDescriptor>) -> Self {
        let n = space.total_dim();
        Self {
            space,
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Projector `|s⟩⟨s|` onto a product basis state.
    pub fn projector(space: Arc<SpaceDescriptor>, levels: &[usize]) -> Result<Self> {
        let idx = space.index_of(levels)?;
        let mut op = Self::zero(space);
        op.matrix[(idx, idx)] = cplx(T::one());
        Ok(op)
    }

    pub fn space(&self) -> &Arc<SpaceDescriptor> {
        &self.space
    }

    pub fn matrix(&self) -> &DMatrix<Complex<T>> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex<T>> {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex<T>) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * factor,
        }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(cplx(factor))
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            space: self.space.clone(),
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> T {
        self.matrix.iter().map(|z| z.norm_sqr()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Frobenius norm of `A − A†`.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.dim();
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += (self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm_sqr();
            }
        }
        acc.sqrt()
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, psi: &DVector<Complex<T>>) -> Complex<T> {
        psi.dotc(&(&self.matrix * psi))
    }

    pub fn apply(&self, psi: &DVector<Complex<T>>) -> DVector<Complex<T>> {
        &self.matrix * psi
    }

    fn check_same_space(&self, other: &Self) {
        assert!(
            Arc::ptr_eq(&self.space, &other.space) || self.space == other.space,
            "operators act on different spaces"
        );
    }
}

impl<T: Real> Add for &Operator<T> {
    type Output = Operator<T>;
    fn add(self, rhs: Self) -> Operator<T> {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl<T: Real> Sub for &Operator<T> {
    type Output = Operator<T>;
    fn sub(self, rhs: Self) -> Operator<T> {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

impl<T: Real> Mul for &Operator<T> {
    type Output = Operator<T>;
    fn mul(self, rhs: Self) -> Operator<T> {
        self.check_same_space(rhs);
        Operator {
            space: self.space.clone(),
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Embeds a single-mode operator on subsystem `index`, acting as the identity
/// on every other factor.
pub fn mode_operator<T: Real>(space: &Arc<SpaceDescriptor>, index: usize, kind: ModeOp) -> Result<Operator<T>> {
    let sub = space.subsystem(index)?;
    if sub.kind != kind.acts_on() {
        return Err(Error::IncompatibleOperator {
            kind: kind.name(),
            subsystem: sub.kind.name(),
            index,
        });
    }
    let local = kind.local_matrix::<T>(sub.dim);
    let n = space.total_dim();
    let stride = space.stride(index);
    let mut m = DMatrix::zeros(n, n);
    for col in 0..n {
        let l = space.level(col, index);
        for a in 0..sub.dim {
            let v = local[(a, l)];
            if v != Complex::new(T::zero(), T::zero()) {
                let row = col + a * stride - l * stride;
                m[(row, col)] = v;
            }
        }
    }
    Ok(Operator {
        space: space.clone(),
        matrix: m,
    })
}

/// Total excitation number `Σ b†b + Σ (σz + 1)/2`.
pub fn excitation_number<T: Real>(space: &Arc<SpaceDescriptor>) -> Operator<T> {
    let n = space.total_dim();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = cplx(T::from_usize_lossy(space.excitations(i)));
    }
    Operator {
        space: space.clone(),
        matrix: m,
    }
}

/// Product basis state as a column vector.
pub fn basis_state<T: Real>(space: &SpaceDescriptor, levels: &[usize]) -> Result<DVector<Complex<T>>> {
    let idx = space.index_of(levels)?;
    let mut v = DVector::zeros(space.total_dim());
    v[idx] = cplx(T::one());
    Ok(v)
}
