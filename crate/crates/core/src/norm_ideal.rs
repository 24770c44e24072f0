//! Sample-level checks of the identity between the Lefschetz ideal
//! `(sigma(b)/b - 1 : b in L^x)` and the ideal generated by `1/h` over
//! Artin-Schreier generators `h`.
//!
//! For a generator `b` of `L/K` with minimal polynomial `g`, the element
//! `gamma = b^(p-1) / g'(b)` has trace 1, so `y = (sigma - 1)^(p-2)(gamma)`
//! satisfies `sigma(y) = y + 1` and is an Artin-Schreier generator. The
//! checks here construct `y` and compare `s = v(sigma(b)/b - 1)` with
//! `s' = -v(y)`.

use thiserror::Error;

use crate::best_f::{classical_swan, BestError, NormalizeOutcome};
use crate::extension::{ASExtension, ExtElt, ExtError};
use crate::series::{SeriesElt, SeriesError, SeriesField};
use crate::value_group::GroupElt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormIdealError {
    #[error("sigma fixes the element to precision")]
    FixedElement,
    #[error("the element does not generate the extension (conjugates {0} and {1} agree)")]
    NotAGenerator(usize, usize),
    #[error("construction check failed: {0}")]
    ConstructionAssertFailed(String),
    #[error("trace identity failed at m = {m}: got {got}")]
    IdentityViolated { m: usize, got: String },
    #[error("trace at m = {m} is only known to precision {precision}")]
    InsufficientPrecision { m: usize, precision: String },
    #[error("outcome is not defectless")]
    NotDefectless,
    #[error(transparent)]
    Swan(#[from] BestError),
    #[error(transparent)]
    Extension(#[from] ExtError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Everything computed from one generator `b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzSample {
    pub b: ExtElt,
    pub gamma: ExtElt,
    pub y: ExtElt,
    /// `y^p - y`, an element of `K`.
    pub as_constant: SeriesElt,
    pub norm_y: SeriesElt,
    /// `v(sigma(b)/b - 1)`.
    pub s: GroupElt,
    /// `-v(y)`.
    pub s_prime: GroupElt,
    /// `v((sigma-1)^i gamma) - v((sigma-1)^(i-1) gamma)` for `i = 1..p-2`.
    pub c: Vec<GroupElt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SReport {
    pub s: GroupElt,
    pub s_prime: GroupElt,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceReport {
    /// `Tr(b^m / g'(b))` for `m = 1..p-1`.
    pub traces: Vec<SeriesElt>,
}

/// `v(sigma^j(b) - b) - v(b)`, the valuation of `sigma^j(b)/b - 1`.
pub fn lefschetz_val_power(
    ext: &ASExtension,
    b: &ExtElt,
    j: usize,
) -> Result<GroupElt, NormIdealError> {
    let d = ext.sub(&ext.sigma(b, j), b);
    if d.coeffs().iter().all(SeriesElt::has_no_terms) {
        return Err(NormIdealError::FixedElement);
    }
    Ok(ext.valuation_l(&d)?.sub(&ext.valuation_l(b)?))
}

pub fn lefschetz_val(ext: &ASExtension, b: &ExtElt) -> Result<GroupElt, NormIdealError> {
    lefschetz_val_power(ext, b, 1)
}

/// `g'(b) = prod_{i=1..p-1} (b - sigma^i(b))`.
fn derivative_at(ext: &ASExtension, b: &ExtElt) -> Result<ExtElt, NormIdealError> {
    let mut acc = ext.one();
    for i in 1..ext.p() {
        let d = ext.sub(b, &ext.sigma(b, i));
        if d.coeffs().iter().all(SeriesElt::has_no_terms) {
            return Err(NormIdealError::NotAGenerator(0, i));
        }
        acc = ext.mul(&acc, &d);
    }
    Ok(acc)
}

/// `b^(p-1) / g'(b)`.
pub fn gamma_of(ext: &ASExtension, b: &ExtElt) -> Result<ExtElt, NormIdealError> {
    let dg = derivative_at(ext, b)?;
    Ok(ext.mul(&ext.pow(b, ext.p() as u64 - 1), &ext.invert_ext(&dg)?))
}

/// Builds `y = (sigma - 1)^(p-2)(gamma)` and checks that it is an
/// Artin-Schreier generator.
pub fn y_construct(ext: &ASExtension, b: &ExtElt) -> Result<LefschetzSample, NormIdealError> {
    let k = ext.base();
    let gamma = gamma_of(ext, b)?;
    let s = lefschetz_val(ext, b)?;
    let mut y = gamma.clone();
    let mut c = Vec::new();
    let mut prev = ext.valuation_l(&y)?;
    if prev != s.scale(1 - ext.p() as i64) {
        return Err(NormIdealError::ConstructionAssertFailed(
            "v(gamma) != -(p-1)s".into(),
        ));
    }
    for _ in 0..ext.p() - 2 {
        y = ext.sub(&ext.sigma(&y, 1), &y);
        let v = ext.valuation_l(&y)?;
        c.push(v.sub(&prev));
        prev = v;
    }
    if !ext.eq_to_precision(&ext.sigma(&y, 1), &ext.add(&y, &ext.one())) {
        return Err(NormIdealError::ConstructionAssertFailed(
            "sigma(y) != y + 1".into(),
        ));
    }
    let as_elt = ext.sub(&ext.pow(&y, ext.p() as u64), &y);
    let as_constant = ext.to_base(&as_elt).map_err(|_| {
        NormIdealError::ConstructionAssertFailed("y^p - y has alpha components".into())
    })?;
    let norm_y = ext.norm(&y)?;
    let s_prime = k.valuation(&norm_y)?.div_int(ext.p() as i64).neg();
    Ok(LefschetzSample {
        b: b.clone(),
        gamma,
        s,
        s_prime,
        y,
        as_constant,
        norm_y,
        c,
    })
}

/// Checks `Tr(b^m / g'(b))` is `0` for `m <= p-2` and `1` for `m = p-1`.
pub fn verify_trace_lemma(ext: &ASExtension, b: &ExtElt) -> Result<TraceReport, NormIdealError> {
    let k = ext.base();
    let inv = ext.invert_ext(&derivative_at(ext, b)?)?;
    let p = ext.p();
    let mut traces = Vec::with_capacity(p - 1);
    let mut power = ext.one();
    for m in 1..p {
        power = ext.mul(&power, b);
        let t = ext.trace(&ext.mul(&power, &inv))?;
        let expected = if m == p - 1 { k.one() } else { k.zero() };
        if let Some(q) = t.precision() {
            if !q.is_positive() {
                return Err(NormIdealError::InsufficientPrecision {
                    m,
                    precision: q.to_string(),
                });
            }
        }
        if !k.eq_to_precision(&t, &expected) {
            return Err(NormIdealError::IdentityViolated {
                m,
                got: k.format(&t),
            });
        }
        traces.push(t);
    }
    Ok(TraceReport { traces })
}

/// Computes `s` and `s'` for `b` and whether `s >= s'`.
pub fn verify_s_inequality(ext: &ASExtension, b: &ExtElt) -> Result<SReport, NormIdealError> {
    let sample = y_construct(ext, b)?;
    let pass = sample.s >= sample.s_prime;
    Ok(SReport {
        s: sample.s,
        s_prime: sample.s_prime,
        pass,
    })
}

/// `v(N(1/a)) = -v(f*)` for a best generator found by normalization.
pub fn hn_defectless_check(
    k: &SeriesField,
    outcome: &NormalizeOutcome,
) -> Result<GroupElt, NormIdealError> {
    match outcome {
        NormalizeOutcome::BestFound { f_star, .. } => Ok(classical_swan(k, f_star)?),
        _ => Err(NormIdealError::NotDefectless),
    }
}
