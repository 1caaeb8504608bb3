//! Structured verdicts emitted by the stability checkers.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    ProvedBibo,
    ConditionFailed,
    Inconclusive,
}

/// Which sufficient condition produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `Σ |bₙ cₙ*/Re λₙ| < ∞` with every `Re λₙ < 0`.
    CondRiesz,
    /// Same sum over the stable modes; unstable modes must carry `bₙ cₙ* = 0`.
    FiniteUnstableExt,
    /// The impulse density is in `L¹(0, ∞)`.
    ImpulseL1,
    /// Admissibility of `B`, `C` with fractional orders summing to at most 1.
    FractionalOrders,
    /// Transfer function is a constant (pure feedthrough).
    TransferConstant,
}

/// Where a reported number came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    TruncatedSum,
    TailBound,
    Quadrature,
    ClosedForm,
    Simulation,
    Heuristic,
}

/// A reported number tagged with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub value: f64,
    pub provenance: Provenance,
}

impl Quantity {
    pub fn new(value: f64, provenance: Provenance) -> Self {
        Quantity { value, provenance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiboReport {
    pub verdict: Verdict,
    pub condition_used: Condition,
    /// Upper estimate of the total variation `‖h‖_M` of the impulse response.
    pub bound: Option<Quantity>,
    pub tail_bound: Option<Quantity>,
    /// Raw sum over the truncated modes, when the condition computes one.
    pub truncated_sum: Option<Quantity>,
    pub empirical_ratio: Option<Quantity>,
    pub notes: Vec<String>,
}

impl BiboReport {
    pub fn new(verdict: Verdict, condition_used: Condition) -> Self {
        BiboReport {
            verdict,
            condition_used,
            bound: None,
            tail_bound: None,
            truncated_sum: None,
            empirical_ratio: None,
            notes: Vec::new(),
        }
    }

    pub fn proved(condition: Condition, bound: Quantity) -> Self {
        let mut r = Self::new(Verdict::ProvedBibo, condition);
        r.bound = Some(bound);
        r
    }

    pub fn note(mut self, text: impl Into<String>) -> Self {
        self.notes.push(text.into());
        self
    }

    pub fn is_proved(&self) -> bool {
        self.verdict == Verdict::ProvedBibo
    }

    /// `ProvedBibo` must come with a finite bound.
    pub fn is_consistent(&self) -> bool {
        self.verdict != Verdict::ProvedBibo || self.bound.is_some_and(|b| b.value.is_finite())
    }
}
