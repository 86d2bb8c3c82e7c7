use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemKind {
    Boson,
    Qubit,
}

impl SubsystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SubsystemKind::Boson => "boson",
            SubsystemKind::Qubit => "qubit",
        }
    }
}

/// One tensor factor of a truncated Hilbert space.
///
/// Boson levels are Fock numbers `0..dim`. Qubit level 0 is `|g⟩` and level 1
/// is `|e⟩`, so the level index always counts excitations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubsystemSpec {
    pub kind: SubsystemKind,
    pub dim: usize,
    pub label: String,
}

impl SubsystemSpec {
    pub fn boson(label: impl Into<String>, dim: usize) -> Self {
        Self {
            kind: SubsystemKind::Boson,
            dim,
            label: label.into(),
        }
    }

    pub fn qubit(label: impl Into<String>) -> Self {
        Self {
            kind: SubsystemKind::Qubit,
            dim: 2,
            label: label.into(),
        }
    }
}

/// Ordered product of subsystems. Subsystem 0 is the most significant digit
/// of the flattened basis index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    subsystems: Vec<SubsystemSpec>,
    total_dim: usize,
}

/// Builds a product space from its factors.
pub fn build_space(subsystems: Vec<SubsystemSpec>) -> Result<SpaceDescriptor> {
    if subsystems.is_empty() {
        return Err(Error::InvalidSpace("at least one subsystem is required".into()));
    }
    for s in &subsystems {
        if s.dim < 2 {
            return Err(Error::InvalidSpace(format!(
                "subsystem `{}` has dimension {} (< 2)",
                s.label, s.dim
            )));
        }
        if s.kind == SubsystemKind::Qubit && s.dim != 2 {
            return Err(Error::InvalidSpace(format!(
                "qubit `{}` must have dimension 2, got {}",
                s.label, s.dim
            )));
        }
    }
    let total_dim = subsystems.iter().map(|s| s.dim).product();
    Ok(SpaceDescriptor {
        subsystems,
        total_dim,
    })
}

impl SpaceDescriptor {
    pub fn subsystems(&self) -> &[SubsystemSpec] {
        &self.subsystems
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn subsystem(&self, index: usize) -> Result<&SubsystemSpec> {
        self.subsystems.get(index).ok_or(Error::IndexOutOfRange {
            index,
            len: self.subsystems.len(),
        })
    }

    /// Position of the first subsystem carrying `label`.
    pub fn find(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    /// Basis-index distance between consecutive levels of subsystem `index`.
    pub fn stride(&self, index: usize) -> usize {
        self.subsystems[index + 1..].iter().map(|s| s.dim).product()
    }

    /// Flattened basis index of a product state.
    pub fn index_of(&self, levels: &[usize]) -> Result<usize> {
        if levels.len() != self.subsystems.len() {
            return Err(Error::LengthMismatch {
                expected: self.subsystems.len(),
                got: levels.len(),
            });
        }
        let mut idx = 0;
        for (s, &l) in self.subsystems.iter().zip(levels) {
            if l >= s.dim {
                return Err(Error::IndexOutOfRange { index: l, len: s.dim });
            }
            idx = idx * s.dim + l;
        }
        Ok(idx)
    }

    /// Per-subsystem levels of a flattened basis index.
    pub fn levels_of(&self, mut index: usize) -> Vec<usize> {
        let mut levels = vec![0; self.subsystems.len()];
        for (slot, s) in levels.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % s.dim;
            index /= s.dim;
        }
        levels
    }

    /// Level of subsystem `sub` in the basis state `index`.
    pub fn level(&self, index: usize, sub: usize) -> usize {
        (index / self.stride(sub)) % self.subsystems[sub].dim
    }

    /// Total number of excitations (phonons plus excited qubits) of a basis state.
    pub fn excitations(&self, index: usize) -> usize {
        self.levels_of(index).iter().sum()
    }
}
