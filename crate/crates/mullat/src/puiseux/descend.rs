//! Root descent along an evaluation place: for b = c·α^m with c free of a
//! distinguished variable λ, substituting λ ↦ v yields the exact rewriting
//! b = π(b)·(α/π(α))^m, descending the m-th-root witness to the smaller
//! function field.

use crate::epmod::EpScalar;
use crate::multfield::{
    combine, pow_scalar, substitute_element, CombineOp, Irreducible, MfError, MultElement,
};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::One;
use std::collections::BTreeMap;
use thiserror::Error;

/// Largest evaluation point tried when none is forced.
pub const MAX_POINT_SEARCH: i64 = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DescendError {
    #[error("identity fails: {0}")]
    IdentityFails(String),
    #[error("place undefined: {0}")]
    PlaceUndefined(String),
    #[error(transparent)]
    Element(#[from] MfError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DescentReport {
    /// The chosen evaluation point v of the place λ ↦ v.
    pub point: BigRational,
    /// The λ-free multiplier b/α^m.
    pub multiplier: MultElement,
    /// π(b).
    pub base: MultElement,
    /// π(α), the descended root.
    pub descended: MultElement,
    /// α/π(α), the witness carrying the λ-content.
    pub witness: MultElement,
    /// Outcome of the exact check π(b)·(α/π(α))^m = b.
    pub verified: bool,
}

/// The sub-product of factors supported entirely on `var` (exponents kept,
/// constant 1).
pub fn var_content(e: &MultElement, var: &str) -> Result<MultElement, MfError> {
    let mut factors = Vec::new();
    for (irr, exp) in e.factors() {
        if let Irreducible::Poly(p) = irr {
            let vs = p.vars();
            if !vs.is_empty() && vs.iter().all(|v| v == var) {
                factors.push((irr.clone(), exp.clone()));
            }
        }
    }
    MultElement::from_parts(e.field(), BigRational::one(), factors)
}

fn try_place(
    b: &MultElement,
    alpha: &MultElement,
    lambda_var: &str,
    v: &BigRational,
) -> Result<Option<(MultElement, MultElement)>, DescendError> {
    let mut assignment = BTreeMap::new();
    assignment.insert(lambda_var.to_string(), v.clone());
    match (
        substitute_element(b, &assignment),
        substitute_element(alpha, &assignment),
    ) {
        (Ok(pb), Ok(pa)) => Ok(Some((pb, pa))),
        (Err(MfError::PlaceUndefined), _) | (_, Err(MfError::PlaceUndefined)) => Ok(None),
        (Err(e), _) | (_, Err(e)) => Err(DescendError::Element(e)),
    }
}

/// Verifies b = (λ-free)·α^m, picks an evaluation point for λ (the smallest
/// non-negative integer keeping b and α defined and nonzero, unless one is
/// forced), and certifies π(b)·(α/π(α))^m = b by exact multiplication.
pub fn descend_root(
    b: &MultElement,
    alpha: &MultElement,
    lambda_part: Option<&MultElement>,
    m: u32,
    lambda_var: &str,
    point: Option<&BigRational>,
) -> Result<DescentReport, DescendError> {
    if b.field() != alpha.field() {
        return Err(DescendError::Element(MfError::FieldMismatch));
    }
    if m == 0 {
        return Err(DescendError::IdentityFails("m must be positive".to_string()));
    }
    let alpha_m = pow_scalar(alpha, &EpScalar::from_int(m as i64))?;
    let multiplier = combine(b, &alpha_m, CombineOp::Divide)?;
    if multiplier.vars().iter().any(|v| v == lambda_var) {
        return Err(DescendError::IdentityFails(format!(
            "b/α^{m} still involves '{lambda_var}'; b is not a declared-multiplier times an m-th power"
        )));
    }
    if let Some(l) = lambda_part {
        if l.vars().iter().any(|v| v != lambda_var) {
            return Err(DescendError::IdentityFails(format!(
                "the declared λ-part involves variables other than '{lambda_var}'"
            )));
        }
        let content = var_content(b, lambda_var)?;
        if l != &content {
            return Err(DescendError::IdentityFails(format!(
                "declared λ-part {l} does not match the λ-content {content} of b"
            )));
        }
    }

    let (v, pb, pa) = match point {
        Some(v) => match try_place(b, alpha, lambda_var, v)? {
            Some((pb, pa)) => (v.clone(), pb, pa),
            None => {
                return Err(DescendError::PlaceUndefined(format!(
                    "{lambda_var} ↦ {v} hits a zero or pole of b or α"
                )))
            }
        },
        None => {
            let mut found = None;
            for k in 0..=MAX_POINT_SEARCH {
                let v = BigRational::from(BigInt::from(k));
                if let Some((pb, pa)) = try_place(b, alpha, lambda_var, &v)? {
                    found = Some((v, pb, pa));
                    break;
                }
            }
            found.ok_or_else(|| {
                DescendError::PlaceUndefined(format!(
                    "no point in 0..={MAX_POINT_SEARCH} keeps b and α defined and nonzero"
                ))
            })?
        }
    };

    let witness = combine(alpha, &pa, CombineOp::Divide)?;
    let witness_m = pow_scalar(&witness, &EpScalar::from_int(m as i64))?;
    let rebuilt = combine(&pb, &witness_m, CombineOp::Multiply)?;
    if &rebuilt != b {
        return Err(DescendError::IdentityFails(format!(
            "π(b)·(α/π(α))^{m} = {rebuilt} differs from b = {b}"
        )));
    }
    Ok(DescentReport {
        point: v,
        multiplier,
        base: pb,
        descended: pa,
        witness,
        verified: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfield::{factor, BaseField};

    fn el(src: &str) -> MultElement {
        factor(BaseField::Q, src).unwrap()
    }

    #[test]
    fn trivial_descent_without_lambda() {
        let b = el("x^2");
        let alpha = el("x");
        let one = MultElement::one(BaseField::Q);
        let rep = descend_root(&b, &alpha, Some(&one), 2, "l", None).unwrap();
        assert!(rep.verified);
        assert_eq!(rep.point, BigRational::from(BigInt::from(0)));
        assert_eq!(rep.base, b);
        assert_eq!(rep.descended, alpha);
        assert_eq!(rep.witness, one);
        assert_eq!(rep.multiplier, one);
    }

    #[test]
    fn lambda_content_descends_into_the_witness() {
        let b = el("l^2 * x^2");
        let alpha = el("l * x");
        let part = el("l^2");
        let rep = descend_root(&b, &alpha, Some(&part), 2, "l", None).unwrap();
        // l ↦ 0 kills α, so the smallest admissible point is 1.
        assert_eq!(rep.point, BigRational::from(BigInt::from(1)));
        assert_eq!(rep.base, el("x^2"));
        assert_eq!(rep.descended, el("x"));
        assert_eq!(rep.witness, el("l"));
        assert!(rep.verified);
    }

    #[test]
    fn rational_multipliers_are_preserved() {
        let b = el("6 * l^3 * x^3");
        let alpha = el("l * x");
        let rep = descend_root(&b, &alpha, None, 3, "l", None).unwrap();
        assert_eq!(rep.multiplier, el("6"));
        assert_eq!(rep.witness, el("l"));
        assert!(rep.verified);
    }

    #[test]
    fn forced_point_at_a_pole_is_rejected() {
        let b = el("x^2 / l^2");
        let alpha = el("x / l");
        let zero = BigRational::from(BigInt::from(0));
        let err = descend_root(&b, &alpha, None, 2, "l", Some(&zero)).unwrap_err();
        assert!(matches!(err, DescendError::PlaceUndefined(_)));
        // The automatic search walks past the pole.
        let rep = descend_root(&b, &alpha, None, 2, "l", None).unwrap();
        assert_eq!(rep.point, BigRational::from(BigInt::from(1)));
        assert!(rep.verified);
    }

    #[test]
    fn residual_lambda_dependence_fails() {
        let b = el("l * x^2");
        let alpha = el("x");
        let err = descend_root(&b, &alpha, None, 2, "l", None).unwrap_err();
        assert!(matches!(err, DescendError::IdentityFails(_)));
    }

    #[test]
    fn mismatched_declared_part_fails() {
        let b = el("l^2 * x^2");
        let alpha = el("l * x");
        let wrong = el("l");
        let err = descend_root(&b, &alpha, Some(&wrong), 2, "l", None).unwrap_err();
        assert!(matches!(err, DescendError::IdentityFails(_)));
    }

    #[test]
    fn evaluation_points_avoid_roots_of_shifted_factors() {
        // α vanishes at l = 0, 1, 2, so the place lands on 3.
        let b = el("(l * (l - 1) * (l - 2))^2 * x^2");
        let alpha = el("l * (l - 1) * (l - 2) * x");
        let rep = descend_root(&b, &alpha, None, 2, "l", None).unwrap();
        assert_eq!(rep.point, BigRational::from(BigInt::from(3)));
        assert!(rep.verified);
    }
}
