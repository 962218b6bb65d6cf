//! Conditioning one arm of a twin-beam on a measurement of the other.
//!
//! With the twin-beam in Schmidt form the partial trace collapses to
//! `ϱ̃_x = (1-λ²) λ^{a†a} Π_xᵀ λ^{a†a}` on mode a, whose trace is the outcome
//! probability. The two-mode state is never built.

use crate::error::{Error, Result};
use crate::fock::{FockOperator, TwinBeamParams};
use crate::povm::{Outcome, PovmElement};
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Outcomes less likely than this are rejected instead of normalized.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Largest twin-beam marginal mass allowed outside the POVM's dimension.
pub const TAIL_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalResult {
    pub outcome: Outcome,
    /// Probability, or probability density for continuous outcomes.
    pub probability: f64,
    /// Normalized conditional state of mode a.
    pub state: FockOperator,
    /// State after the feedback unitary; equal to `state` without feedback.
    pub post_state: FockOperator,
}

fn check_truncation(twb: &TwinBeamParams, dim: usize) -> Result<()> {
    let tail = twb.lambda_sq().powi(dim as i32);
    if tail > TAIL_LIMIT {
        return Err(Error::Truncation {
            tail,
            tolerance: TAIL_LIMIT,
            dim,
        });
    }
    Ok(())
}

/// `(1-λ²) λ^{a†a} Πᵀ λ^{a†a}`, the conditional state before normalization.
pub fn unnormalized_conditional(twb: &TwinBeamParams, povm: &PovmElement) -> Result<FockOperator> {
    let d = povm.operator.dim();
    check_truncation(twb, d)?;
    let lam = twb.lambda();
    let powers: Vec<f64> = (0..d).map(|n| lam.powi(n as i32)).collect();
    let pi = povm.operator.matrix();
    let scale = 1.0 - lam * lam;
    let m = DMatrix::from_fn(d, d, |p, q| pi[(q, p)] * (scale * powers[p] * powers[q]));
    FockOperator::from_matrix(m)
}

/// `P_x = (1-λ²) Σ_q λ^{2q} ⟨q|Π_x|q⟩`.
pub fn outcome_probability(twb: &TwinBeamParams, povm: &PovmElement) -> Result<f64> {
    let d = povm.operator.dim();
    check_truncation(twb, d)?;
    let l2 = twb.lambda_sq();
    let diag = povm.operator.matrix().diagonal();
    Ok((1.0 - l2) * (0..d).map(|q| l2.powi(q as i32) * diag[q].re).sum::<f64>())
}

/// Conditional state of mode a given outcome `Π_x` on mode b.
pub fn conditional_state(twb: &TwinBeamParams, povm: &PovmElement) -> Result<ConditionalResult> {
    let raw = unnormalized_conditional(twb, povm)?;
    let probability = raw.trace();
    if !(probability > PROBABILITY_FLOOR) {
        return Err(Error::ProbabilityUnderflow {
            probability,
            floor: PROBABILITY_FLOOR,
        });
    }
    let state = raw.scaled(1.0 / probability);
    Ok(ConditionalResult {
        outcome: povm.outcome,
        probability,
        post_state: state.clone(),
        state,
    })
}

/// Conditional state followed by the outcome-dependent unitary `U_x`.
///
/// `U_x` must act on the same dimension, be unitary on the leading half of the
/// space to 1e-8 and keep the conditional state's trace within 1e-8.
pub fn conditional_with_feedback<F>(twb: &TwinBeamParams, povm: &PovmElement, feedback: F) -> Result<ConditionalResult>
where
    F: Fn(&Outcome) -> Result<FockOperator>,
{
    let mut result = conditional_state(twb, povm)?;
    let u = feedback(&result.outcome)?;
    check_unitary(&u)?;
    let post = result.state.conjugate_by(&u)?;
    let tr = post.trace();
    if (tr - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidOperator {
            expected: "trace-preserving feedback",
            reason: format!("post-feedback trace {tr}; enlarge the truncation"),
        });
    }
    result.post_state = post;
    Ok(result)
}

fn check_unitary(u: &FockOperator) -> Result<()> {
    let k = (u.dim() / 2).max(1);
    let g = u.matrix().adjoint() * u.matrix();
    let defect = (g.view((0, 0), (k, k)) - DMatrix::<Complex64>::identity(k, k)).camax();
    if defect > 1e-8 {
        return Err(Error::InvalidOperator {
            expected: "unitary",
            reason: format!("U†U deviates from I by {defect:.2e} on the leading {k} levels"),
        });
    }
    Ok(())
}

/// `Σ_i w_i P_{x_i} N_{x_i}` over a weighted outcome family, with `N_x` the
/// conditional mean photon number.
///
/// The family must carry all but 1e-6 of the probability; otherwise the
/// coverage deficit is reported as an error.
pub fn average_conditional_energy(twb: &TwinBeamParams, family: &[(PovmElement, f64)]) -> Result<f64> {
    let mut coverage = 0.0;
    let mut energy = 0.0;
    for (povm, w) in family {
        let raw = unnormalized_conditional(twb, povm)?;
        let diag = raw.matrix().diagonal();
        coverage += w * raw.trace();
        energy += w * (0..raw.dim()).map(|n| n as f64 * diag[n].re).sum::<f64>();
    }
    if (coverage - 1.0).abs() > 1e-6 {
        return Err(Error::Convergence {
            what: "outcome family coverage",
            detail: format!("probabilities sum to {coverage} (deficit {:.3e})", 1.0 - coverage),
        });
    }
    Ok(energy)
}

/// Matrix elements as CSV rows `n,m,re,im` under a header line.
pub fn matrix_elements_csv(op: &FockOperator) -> String {
    let mut out = String::from("n,m,re,im\n");
    for n in 0..op.dim() {
        for m in 0..op.dim() {
            let z = op.get(n, m);
            let _ = writeln!(out, "{n},{m},{:.17e},{:.17e}", z.re, z.im);
        }
    }
    out
}
