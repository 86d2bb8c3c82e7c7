use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;

use super::operator::Operator;
use super::space::SpaceDescriptor;
use crate::error::{Error, Result};
use crate::scalar::{cabs, cplx, Real};

/// Real scalar time dependence multiplying a driven operator. Angular
/// frequencies are in rad/µs, time in µs.
#[derive(Clone)]
pub enum Envelope<T: Real> {
    /// `amplitude · cos(ω t + phase)`.
    Cosine { amplitude: T, angular_freq: T, phase: T },
    /// Arbitrary function with caller-supplied bounds used for step selection.
    Custom {
        f: Arc<dyn Fn(T) -> T + Send + Sync>,
        max_abs: T,
        max_angular_freq: T,
    },
}

impl<T: Real> Envelope<T> {
    pub fn cosine(amplitude: T, angular_freq: T, phase: T) -> Self {
        Envelope::Cosine {
            amplitude,
            angular_freq,
            phase,
        }
    }

    pub fn custom(f: impl Fn(T) -> T + Send + Sync + 'static, max_abs: T, max_angular_freq: T) -> Self {
        Envelope::Custom {
            f: Arc::new(f),
            max_abs,
            max_angular_freq,
        }
    }

    #[inline]
    pub fn value(&self, t: T) -> T {
        match self {
            Envelope::Cosine {
                amplitude,
                angular_freq,
                phase,
            } => *amplitude * (*angular_freq * t + *phase).cos(),
            Envelope::Custom { f, .. } => f(t),
        }
    }

    pub fn max_abs(&self) -> T {
        match self {
            Envelope::Cosine { amplitude, .. } => amplitude.mag(),
            Envelope::Custom { max_abs, .. } => *max_abs,
        }
    }

    pub fn angular_frequency(&self) -> T {
        match self {
            Envelope::Cosine { angular_freq, .. } => angular_freq.mag(),
            Envelope::Custom { max_angular_freq, .. } => max_angular_freq.mag(),
        }
    }
}

impl<T: Real> fmt::Debug for Envelope<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Envelope::Cosine {
                amplitude,
                angular_freq,
                phase,
            } => write!(f, "{amplitude}·cos({angular_freq}·t + {phase})"),
            Envelope::Custom {
                max_abs,
                max_angular_freq,
                ..
            } => write!(f, "custom(|f| ≤ {max_abs}, ω ≤ {max_angular_freq})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DrivenTerm<T: Real> {
    pub operator: Operator<T>,
    pub envelope: Envelope<T>,
}

/// `H(t) = Σ static + Σ envelope(t)·op`, in rad/µs.
#[derive(Clone, Debug)]
pub struct TimeDependentModel<T: Real> {
    space: Arc<SpaceDescriptor>,
    static_terms: Vec<Operator<T>>,
    driven_terms: Vec<DrivenTerm<T>>,
}

fn hermitian_tol<T: Real>(op: &Operator<T>) -> T {
    T::lit(1e-12) * (T::one() + op.norm())
}

impl<T: Real> TimeDependentModel<T> {
    pub fn new(space: Arc<SpaceDescriptor>) -> Self {
        Self {
            space,
            static_terms: Vec::new(),
            driven_terms: Vec::new(),
        }
    }

    fn check_term(&self, op: &Operator<T>) -> Result<()> {
        if op.space().as_ref() != self.space.as_ref() {
            return Err(Error::InvalidSpace("term acts on a different space".into()));
        }
        let defect = op.hermiticity_defect();
        if defect > hermitian_tol(op) {
            return Err(Error::NonHermitian {
                t: f64::NAN,
                deviation: defect.as_f64(),
            });
        }
        Ok(())
    }

    /// Adds a time-independent Hermitian term.
    pub fn add_static(&mut self, op: Operator<T>) -> Result<&mut Self> {
        self.check_term(&op)?;
        self.static_terms.push(op);
        Ok(self)
    }

    /// Adds a Hermitian term multiplied by a real envelope.
    pub fn add_driven(&mut self, op: Operator<T>, envelope: Envelope<T>) -> Result<&mut Self> {
        self.check_term(&op)?;
        self.driven_terms.push(DrivenTerm { operator: op, envelope });
        Ok(self)
    }

    pub fn space(&self) -> &Arc<SpaceDescriptor> {
        &self.space
    }

    pub fn static_terms(&self) -> &[Operator<T>] {
        &self.static_terms
    }

    pub fn driven_terms(&self) -> &[DrivenTerm<T>] {
        &self.driven_terms
    }

    pub fn static_part(&self) -> DMatrix<Complex<T>> {
        let n = self.space.total_dim();
        self.static_terms
            .iter()
            .fold(DMatrix::zeros(n, n), |acc, op| acc + op.matrix())
    }

    pub fn hamiltonian_at(&self, t: T) -> DMatrix<Complex<T>> {
        let mut h = self.static_part();
        for term in &self.driven_terms {
            h += term.operator.matrix() * cplx(term.envelope.value(t));
        }
        h
    }

    /// Upper bound on the spectral radius of `H(t)` over all `t`
    /// (row-sum norm of `Σ|static| + Σ max|envelope|·|op|`).
    pub fn spectral_bound(&self) -> T {
        let n = self.space.total_dim();
        let mut rows = vec![T::zero(); n];
        let stat = self.static_part();
        for i in 0..n {
            rows[i] += stat.row(i).iter().map(|z| cabs(*z)).fold(T::zero(), |a, b| a + b);
        }
        for term in &self.driven_terms {
            let a = term.envelope.max_abs();
            for i in 0..n {
                rows[i] += a * term
                    .operator
                    .matrix()
                    .row(i)
                    .iter()
                    .map(|z| cabs(*z))
                    .fold(T::zero(), |acc, b| acc + b);
            }
        }
        rows.into_iter().fold(T::zero(), |a, b| a.max(b))
    }

    pub fn max_envelope_frequency(&self) -> T {
        self.driven_terms
            .iter()
            .map(|d| d.envelope.angular_frequency())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Largest frequency scale of the model (rad/µs).
    pub fn frequency_scale(&self) -> T {
        self.spectral_bound().max(self.max_envelope_frequency())
    }

    /// Default fixed RK4 step: `1 / (100 · frequency scale)`.
    pub fn default_step(&self) -> T {
        let scale = self.frequency_scale();
        if scale == T::zero() {
            T::lit(1e-2)
        } else {
            T::one() / (T::lit(100.0) * scale)
        }
    }
}
