//! Three-valued certificates with structured evidence.

use serde::{Deserialize, Serialize};

/// Outcome of a check.
///
/// `CertifiedTrue` / `CertifiedFalse` rest on an exact condition (up to the
/// stated tolerances); `NumericallySupported` means grid evidence with
/// certified asymptotics but no closed-form certificate; `Inconclusive`
/// means the available conditions do not decide the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    CertifiedTrue,
    CertifiedFalse,
    NumericallySupported,
    Inconclusive,
}

/// Machine-readable evidence attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Witness {
    /// Integer multipliers for support inclusion: (den_index, num_index, n)
    /// with `B_j = n * A_i`, zero-based factor indices.
    Multipliers(Vec<(usize, usize, u64)>),
    /// A concrete lattice index where the signed mass is negative.
    LatticeIndex { class: String, k: u64, mass: f64 },
    /// Per-family finite-check and tail-certificate outcomes.
    Families(Vec<FamilyReport>),
    /// A grid point where the tested function violates its sign condition.
    GridPoint { u: f64, value: f64 },
    /// A finite-difference stencil with a sign violation.
    Stencil { x: f64, h: f64, order: u32, value: f64 },
    /// A two-sided comparison that decided the verdict.
    Comparison { lhs: f64, rhs: f64, relation: String },
    /// A factor that triggered a structural failure.
    FactorIndex { side: String, index: usize },
    /// Named sub-conditions with their truth values.
    Conditions(Vec<(String, bool)>),
    Note(String),
}

/// Finite-check plus tail-certificate record for one inequality family
/// (one set of denominator factors contributing at the same lattice
/// residues).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    /// Zero-based indices of the denominator factors in this family.
    pub denominators: Vec<usize>,
    /// Lattice residues (mod period) covered by the family.
    pub residues: Vec<u64>,
    /// Smallest lattice index of the family (the binding case).
    pub first_k: u64,
    pub finite_check_ok: bool,
    pub tail_certified: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    /// Name of the condition that decided the verdict, when one did.
    pub condition: Option<String>,
    pub detail: String,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn certified_true(detail: impl Into<String>) -> Self {
        Verdict {
            status: Status::CertifiedTrue,
            condition: None,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn certified_false(condition: impl Into<String>, detail: impl Into<String>) -> Self {
        Verdict {
            status: Status::CertifiedFalse,
            condition: Some(condition.into()),
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn supported(detail: impl Into<String>) -> Self {
        Verdict {
            status: Status::NumericallySupported,
            condition: None,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn inconclusive(detail: impl Into<String>) -> Self {
        Verdict {
            status: Status::Inconclusive,
            condition: None,
            detail: detail.into(),
            witness: None,
        }
    }

    pub fn with_condition(mut self, condition: impl Into<String>) -> Self {
        self.condition = Some(condition.into());
        self
    }

    pub fn with_witness(mut self, witness: Witness) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn is_true(&self) -> bool {
        self.status == Status::CertifiedTrue
    }

    pub fn is_false(&self) -> bool {
        self.status == Status::CertifiedFalse
    }
}
