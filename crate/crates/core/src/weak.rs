//! Weak values between pre- and post-selected states.
//!
//! For a pre-selected `|Ψ⟩` and post-selected `|Φ⟩` the weak value of `A` is
//! `A_w = ⟨Φ|A|Ψ⟩ / ⟨Φ|Ψ⟩`. For a rank-one projector `|Ω⟩⟨Ω|` the numerator times
//! `⟨Ψ|Φ⟩` is the third-order Bargmann invariant `Δ3(Φ, Ω, Ψ)`, so
//! `A_w = Δ3 / |⟨Φ|Ψ⟩|²` and `arg A_w = arg Δ3`.

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, expectation, inner, normalize, orthonormality_deviation};
use crate::{Complex, Error, HermitianOperator, Ket, Projector, Result, EXACT_TOL};

/// Weak value together with its polar form and the post-selection probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakValueResult {
    pub value: Complex,
    pub modulus: f64,
    /// In `(−π, π]`.
    pub argument: f64,
    /// `Δ3(post, ω, pre)`; only for projector observables.
    pub bargmann3: Option<Complex>,
    /// `|⟨post|pre⟩|²`
    pub postselect_prob: f64,
}

impl WeakValueResult {
    fn from_value(value: Complex, bargmann3: Option<Complex>, postselect_prob: f64) -> Self {
        let argument = match bargmann3 {
            Some(b) => crate::angle::wrap_pi(b.arg()),
            None => crate::angle::wrap_pi(value.arg()),
        };
        WeakValueResult {
            value,
            modulus: value.norm(),
            argument,
            bargmann3,
            postselect_prob,
        }
    }

    pub fn to_record(&self) -> WeakValueRecord {
        WeakValueRecord {
            re: self.value.re,
            im: self.value.im,
            modulus: self.modulus,
            argument: self.argument,
            postselect_prob: self.postselect_prob,
            bargmann3: self.bargmann3.map(|b| [b.re, b.im]),
        }
    }
}

/// JSON shape of a [`WeakValueResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakValueRecord {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
    pub argument: f64,
    pub postselect_prob: f64,
    pub bargmann3: Option<[f64; 2]>,
}

/// `A|Ψ⟩ = ⟨A⟩|Ψ⟩ + ΔA|Ψ⊥⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionDecomposition {
    pub mean: f64,
    pub spread: f64,
    /// Absent when `Ψ` is an eigenstate (`spread < 1e-12`).
    pub residual: Option<Ket>,
}

/// Checks dimensions and the overlap floor; returns `(⟨post|pre⟩, |⟨post|pre⟩|²)`.
fn selection_overlap(pre: &Ket, post: &Ket, overlap_floor: f64) -> Result<(Complex, f64)> {
    let overlap = inner(post, pre)?;
    let prob = overlap.norm_sqr();
    if prob <= overlap_floor {
        return Err(Error::OrthogonalSelection {
            prob,
            floor: overlap_floor,
        });
    }
    Ok((overlap, prob))
}

pub fn weak_value(op: &HermitianOperator, pre: &Ket, post: &Ket) -> Result<WeakValueResult> {
    weak_value_with_floor(op, pre, post, crate::DEFAULT_OVERLAP_FLOOR)
}

pub fn weak_value_with_floor(
    op: &HermitianOperator,
    pre: &Ket,
    post: &Ket,
    overlap_floor: f64,
) -> Result<WeakValueResult> {
    let (overlap, prob) = selection_overlap(pre, post, overlap_floor)?;
    let numerator = op.matrix_element(post, pre)?;
    Ok(WeakValueResult::from_value(numerator / overlap, None, prob))
}

pub fn projector_weak_value(omega: &Ket, pre: &Ket, post: &Ket) -> Result<WeakValueResult> {
    projector_weak_value_with_floor(omega, pre, post, crate::DEFAULT_OVERLAP_FLOOR)
}

/// Weak value of `|ω⟩⟨ω|`, computed as `Δ3(post, ω, pre) / |⟨post|pre⟩|²`.
pub fn projector_weak_value_with_floor(
    omega: &Ket,
    pre: &Ket,
    post: &Ket,
    overlap_floor: f64,
) -> Result<WeakValueResult> {
    let (overlap, prob) = selection_overlap(pre, post, overlap_floor)?;
    let delta3 = Projector::new(omega.clone()).matrix_element(post, pre)? * overlap.conj();
    Ok(WeakValueResult::from_value(
        delta3 / prob,
        Some(delta3),
        prob,
    ))
}

/// `Σ_b Re[A_w(pre → b)]·|⟨b|pre⟩|²` over an orthonormal basis; equals `⟨A⟩`.
pub fn expectation_from_weak_values(
    op: &HermitianOperator,
    pre: &Ket,
    basis: &[Ket],
) -> Result<f64> {
    expectation_from_weak_values_with_floor(op, pre, basis, crate::DEFAULT_OVERLAP_FLOOR)
}

pub fn expectation_from_weak_values_with_floor(
    op: &HermitianOperator,
    pre: &Ket,
    basis: &[Ket],
    overlap_floor: f64,
) -> Result<f64> {
    let deviation = orthonormality_deviation(basis, op.dim())?;
    if deviation > 1e-10 {
        return Err(Error::NonOrthonormalBasis { deviation });
    }
    let mut total = 0.0;
    for b in basis {
        match weak_value_with_floor(op, pre, b, overlap_floor) {
            Ok(w) => total += w.value.re * w.postselect_prob,
            // outcome never happens, so it carries no weight
            Err(Error::OrthogonalSelection { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(total)
}

pub fn decompose_action(op: &HermitianOperator, psi: &Ket) -> Result<ActionDecomposition> {
    let mean = expectation(op, psi)?;
    let action = op.apply(psi)?;
    let deviation: Vec<Complex> = action
        .iter()
        .zip(psi.amplitudes())
        .map(|(a, p)| a - p * mean)
        .collect();
    let spread = crate::linalg::norm(&deviation);
    let residual = if spread < EXACT_TOL {
        None
    } else {
        Some(normalize(deviation)?)
    };
    Ok(ActionDecomposition {
        mean,
        spread,
        residual,
    })
}

impl ActionDecomposition {
    /// `mean·|Ψ⟩ + spread·|Ψ⊥⟩`
    pub fn reconstruct(&self, psi: &Ket) -> Vec<Complex> {
        let mut out: Vec<Complex> = psi.amplitudes().iter().map(|p| p * self.mean).collect();
        if let Some(r) = &self.residual {
            for (o, x) in out.iter_mut().zip(r.amplitudes()) {
                *o += x * self.spread;
            }
        }
        out
    }
}

/// The ratio `⟨post|Ψ⊥⟩ / ⟨post|pre⟩` that carries the non-trivial part of the weak value.
/// Zero when `pre` is an eigenstate of `op`.
pub fn decomposition_ratio(op: &HermitianOperator, pre: &Ket, post: &Ket) -> Result<Complex> {
    let (overlap, _) = selection_overlap(pre, post, crate::DEFAULT_OVERLAP_FLOOR)?;
    let dec = decompose_action(op, pre)?;
    match &dec.residual {
        Some(r) => Ok(inner(post, r)? / overlap),
        None => Ok(Complex::new(0.0, 0.0)),
    }
}

/// `⟨A⟩ + ΔA·⟨post|Ψ⊥⟩/⟨post|pre⟩`; agrees with [`weak_value`].
pub fn weak_value_via_decomposition(
    op: &HermitianOperator,
    pre: &Ket,
    post: &Ket,
) -> Result<Complex> {
    let (overlap, _) = selection_overlap(pre, post, crate::DEFAULT_OVERLAP_FLOOR)?;
    let dec = decompose_action(op, pre)?;
    let second = match &dec.residual {
        Some(r) => dot(post.amplitudes(), r.amplitudes())? / overlap * dec.spread,
        None => Complex::new(0.0, 0.0),
    };
    Ok(Complex::new(dec.mean, 0.0) + second)
}
