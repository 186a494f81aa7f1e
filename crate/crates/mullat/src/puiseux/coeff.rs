//! Coefficient arithmetic for generalized power series: ℚ, a prime field
//! F_p, or a simple extension ℚ(θ) given by a monic irreducible minimal
//! polynomial of degree ≤ 4. Rational values keep their `Rat` tag inside an
//! extension field, so residues of series built from rational data stay
//! visibly rational (subfield preservation).

use crate::multfield::poly::BaseField;
use crate::multfield::unifactor;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Maximal degree of a supported extension label.
pub const MAX_EXT_DEGREE: usize = 4;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CoeffField {
    Q,
    /// ℚ(θ) for θ a root of the monic irreducible `min_poly` (dense, degree
    /// 2..=4, last coefficient 1), printed with the given label.
    QExt { label: String, min_poly: Vec<BigRational> },
    Fp(u64),
}

impl CoeffField {
    pub fn extension(label: &str, min_poly: Vec<BigRational>) -> Result<Self, String> {
        let deg = min_poly.len().saturating_sub(1);
        if !(2..=MAX_EXT_DEGREE).contains(&deg) {
            return Err(format!("extension degree {deg} outside 2..={MAX_EXT_DEGREE}"));
        }
        if min_poly.last().map_or(true, |c| !c.is_one()) {
            return Err("minimal polynomial must be monic".to_string());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x636f_6566);
        if !unifactor::is_irreducible_dense(BaseField::Q, &min_poly, &mut rng) {
            return Err("minimal polynomial is not irreducible".to_string());
        }
        Ok(CoeffField::QExt { label: label.to_string(), min_poly })
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            CoeffField::Fp(p) => *p,
            _ => 0,
        }
    }

    pub fn ext_degree(&self) -> usize {
        match self {
            CoeffField::QExt { min_poly, .. } => min_poly.len() - 1,
            _ => 1,
        }
    }

    /// The common field of two operands: equal fields, or ℚ refined by an
    /// extension of ℚ.
    pub fn join(&self, other: &CoeffField) -> Result<CoeffField, String> {
        if self == other {
            return Ok(self.clone());
        }
        match (self, other) {
            (CoeffField::Q, CoeffField::QExt { .. }) => Ok(other.clone()),
            (CoeffField::QExt { .. }, CoeffField::Q) => Ok(self.clone()),
            _ => Err(format!("incompatible coefficient fields {self} and {other}")),
        }
    }
}

impl fmt::Display for CoeffField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoeffField::Q => write!(f, "Q"),
            CoeffField::QExt { label, min_poly } => {
                write!(f, "Q({label}); {label} root of {}", poly_text(min_poly, label))
            }
            CoeffField::Fp(p) => write!(f, "F{p}"),
        }
    }
}

/// Dense-univariate pretty printer used for minimal polynomials and
/// extension coefficients.
pub fn poly_text(coeffs: &[BigRational], var: &str) -> String {
    let mut parts: Vec<String> = Vec::new();
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        let mag_s = rat_text(&mag);
        let body = match i {
            0 => mag_s,
            1 if mag.is_one() => var.to_string(),
            1 => format!("{mag_s}*{var}"),
            _ if mag.is_one() => format!("{var}^{i}"),
            _ => format!("{mag_s}*{var}^{i}"),
        };
        if parts.is_empty() {
            parts.push(if c.is_negative() { format!("-{body}") } else { body });
        } else {
            parts.push(format!("{}{body}", if c.is_negative() { " - " } else { " + " }));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.concat()
    }
}

pub fn rat_text(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A coefficient value. `Rat` is used for every value expressible over ℚ
/// (also inside an extension field); `Ext` is a dense polynomial in θ of
/// degree ≥ 1 after reduction; `Fp` a residue in [0, p).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Coeff {
    Rat(BigRational),
    Ext(Vec<BigRational>),
    Fp(u64),
}

impl Coeff {
    pub fn from_int(field: &CoeffField, n: i64) -> Coeff {
        Coeff::from_rational(field, &BigRational::from(BigInt::from(n)))
    }

    pub fn from_rational(field: &CoeffField, q: &BigRational) -> Coeff {
        match field {
            CoeffField::Fp(p) => {
                let r = BaseField::Fp(*p).reduce(q);
                Coeff::Fp(r.numer().to_string().parse().expect("residue fits u64"))
            }
            _ => Coeff::Rat(q.clone()),
        }
    }

    pub fn zero(field: &CoeffField) -> Coeff {
        Coeff::from_int(field, 0)
    }

    pub fn one(field: &CoeffField) -> Coeff {
        Coeff::from_int(field, 1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Rat(q) => q.is_zero(),
            Coeff::Ext(v) => v.iter().all(Zero::is_zero),
            Coeff::Fp(r) => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Rat(q) => q.is_one(),
            Coeff::Ext(_) => false,
            Coeff::Fp(r) => *r == 1,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Coeff::Rat(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Rat(q) => Some(q),
            _ => None,
        }
    }

    /// Collapses an `Ext` that reduced to a constant back to `Rat`.
    fn normalize(self) -> Coeff {
        match self {
            Coeff::Ext(mut v) => {
                while v.len() > 1 && v.last().map_or(false, Zero::is_zero) {
                    v.pop();
                }
                if v.len() <= 1 {
                    Coeff::Rat(v.pop().unwrap_or_else(BigRational::zero))
                } else {
                    Coeff::Ext(v)
                }
            }
            other => other,
        }
    }

    fn dense(&self, deg: usize) -> Vec<BigRational> {
        let mut v = match self {
            Coeff::Rat(q) => vec![q.clone()],
            Coeff::Ext(v) => v.clone(),
            Coeff::Fp(_) => panic!("dense() on a prime-field coefficient"),
        };
        v.resize(deg.max(v.len()), BigRational::zero());
        v
    }
}

fn reduce_mod(v: &mut Vec<BigRational>, min_poly: &[BigRational]) {
    let d = min_poly.len() - 1;
    while v.len() > d {
        let lead = v.pop().expect("nonempty");
        if lead.is_zero() {
            continue;
        }
        let k = v.len() - d;
        for i in 0..d {
            let sub = &lead * &min_poly[i];
            v[k + i] -= sub;
        }
    }
    while v.len() < d {
        v.push(BigRational::zero());
    }
}

impl CoeffField {
    pub fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (CoeffField::Fp(p), Coeff::Fp(x), Coeff::Fp(y)) => Coeff::Fp((x + y) % p),
            (_, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x + y),
            (CoeffField::QExt { min_poly, .. }, _, _) => {
                let d = min_poly.len() - 1;
                let (x, y) = (a.dense(d), b.dense(d));
                let v = x.iter().zip(&y).map(|(p, q)| p + q).collect();
                Coeff::Ext(v).normalize()
            }
            _ => panic!("coefficient does not belong to the field"),
        }
    }

    pub fn neg(&self, a: &Coeff) -> Coeff {
        match (self, a) {
            (CoeffField::Fp(p), Coeff::Fp(x)) => Coeff::Fp((p - x % p) % p),
            (_, Coeff::Rat(x)) => Coeff::Rat(-x),
            (_, Coeff::Ext(v)) => Coeff::Ext(v.iter().map(|c| -c).collect()),
            _ => panic!("coefficient does not belong to the field"),
        }
    }

    pub fn sub(&self, a: &Coeff, b: &Coeff) -> Coeff {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        match (self, a, b) {
            (CoeffField::Fp(p), Coeff::Fp(x), Coeff::Fp(y)) => {
                Coeff::Fp(((*x as u128 * *y as u128) % *p as u128) as u64)
            }
            (_, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x * y),
            (CoeffField::QExt { min_poly, .. }, _, _) => {
                let d = min_poly.len() - 1;
                let (x, y) = (a.dense(d), b.dense(d));
                let mut prod = vec![BigRational::zero(); x.len() + y.len() - 1];
                for (i, p) in x.iter().enumerate() {
                    if p.is_zero() {
                        continue;
                    }
                    for (j, q) in y.iter().enumerate() {
                        let add = p * q;
                        prod[i + j] += add;
                    }
                }
                reduce_mod(&mut prod, min_poly);
                Coeff::Ext(prod).normalize()
            }
            _ => panic!("coefficient does not belong to the field"),
        }
    }

    pub fn inv(&self, a: &Coeff) -> Option<Coeff> {
        if a.is_zero() {
            return None;
        }
        match (self, a) {
            (CoeffField::Fp(p), Coeff::Fp(x)) => {
                let inv = BaseField::Fp(*p).inv(&BigRational::from(BigInt::from(*x)))?;
                Some(Coeff::Fp(inv.numer().to_string().parse().expect("residue")))
            }
            (_, Coeff::Rat(x)) => Some(Coeff::Rat(x.recip())),
            (CoeffField::QExt { min_poly, .. }, Coeff::Ext(v)) => {
                // Extended Euclid in ℚ[z]: s·v + t·min_poly = 1.
                let inv = poly_inverse_mod(v, min_poly)?;
                Some(Coeff::Ext(inv).normalize())
            }
            _ => panic!("coefficient does not belong to the field"),
        }
    }

    pub fn div(&self, a: &Coeff, b: &Coeff) -> Option<Coeff> {
        let bi = self.inv(b)?;
        Some(self.mul(a, &bi))
    }

    pub fn pow(&self, a: &Coeff, e: u32) -> Coeff {
        let mut acc = Coeff::one(self);
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    /// A square root of `a` in this field, when one exists.
    ///
    /// Over ℚ: exact rational square root. Over F_p: exhaustive (p is desk
    /// scale). Over a quadratic ℚ(θ): reduce (x+yθ)² = a+bθ to a rational
    /// biquadratic in y and solve exactly; higher-degree extensions only
    /// resolve rational squares of rationals.
    pub fn sqrt(&self, a: &Coeff) -> Option<Coeff> {
        match (self, a) {
            (CoeffField::Fp(p), Coeff::Fp(x)) => (0..*p)
                .find(|r| ((*r as u128 * *r as u128) % *p as u128) as u64 == *x)
                .map(Coeff::Fp),
            (CoeffField::Q, Coeff::Rat(q)) => rational_sqrt(q).map(Coeff::Rat),
            (CoeffField::QExt { min_poly, .. }, _) => {
                if let Coeff::Rat(q) = a {
                    if let Some(r) = rational_sqrt(q) {
                        return Some(Coeff::Rat(r));
                    }
                }
                if min_poly.len() != 3 {
                    return None;
                }
                // θ² = Pθ + Q with P = -min_poly[1], Q = -min_poly[0].
                let p_c = -&min_poly[1];
                let q_c = -&min_poly[0];
                let dense = a.dense(2);
                let (av, bv) = (dense[0].clone(), dense[1].clone());
                let four = BigRational::from(BigInt::from(4));
                let two = BigRational::from(BigInt::from(2));
                // (x + yθ)² = x² + Qy² + (2xy + Py²)θ = av + bvθ.
                // y = 0 branch: rational square root of av (bv must vanish).
                if bv.is_zero() {
                    if let Some(x) = rational_sqrt(&av) {
                        return Some(Coeff::Rat(x));
                    }
                }
                // y ≠ 0: x = (bv − P y²)/(2y); substituting gives
                // (P² + 4Q)·Y² − (2 bv P + 4 av)·Y + bv² = 0 with Y = y².
                let ca = &p_c * &p_c + &four * &q_c;
                let cb = -(&two * &bv * &p_c + &four * &av);
                let cc = &bv * &bv;
                for y2 in quadratic_rational_roots(&ca, &cb, &cc) {
                    if y2.is_negative() || y2.is_zero() {
                        continue;
                    }
                    if let Some(y) = rational_sqrt(&y2) {
                        if y.is_zero() {
                            continue;
                        }
                        let x = (&bv - &p_c * &y2) / (&two * &y);
                        let cand = Coeff::Ext(vec![x, y]).normalize();
                        let sq = self.mul(&cand, &cand);
                        if &sq == a {
                            return Some(cand);
                        }
                    }
                }
                None
            }
            _ => None,
        }
    }

    pub fn to_text(&self, a: &Coeff) -> String {
        match (self, a) {
            (_, Coeff::Rat(q)) => rat_text(q),
            (CoeffField::QExt { label, .. }, Coeff::Ext(v)) => poly_text(v, label),
            (_, Coeff::Fp(r)) => r.to_string(),
            _ => panic!("coefficient does not belong to the field"),
        }
    }
}

/// Rational roots of a·Y² + b·Y + c (a may be zero).
fn quadratic_rational_roots(
    a: &BigRational,
    b: &BigRational,
    c: &BigRational,
) -> Vec<BigRational> {
    if a.is_zero() {
        if b.is_zero() {
            return Vec::new();
        }
        return vec![-(c / b)];
    }
    let four = BigRational::from(BigInt::from(4));
    let two = BigRational::from(BigInt::from(2));
    let disc = b * b - four * a * c;
    match rational_sqrt(&disc) {
        None => Vec::new(),
        Some(s) if s.is_zero() => vec![-(b / (&two * a))],
        Some(s) => vec![(-b + &s) / (&two * a), (-b - &s) / (&two * a)],
    }
}

pub fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    if &(&n * &n) == q.numer() && &(&d * &d) == q.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

/// Inverse of `v` modulo the monic `m` in ℚ[z] via extended Euclid;
/// None exactly when gcd(v, m) is nonconstant (impossible for irreducible m
/// and v ≢ 0, but kept defensive).
fn poly_inverse_mod(v: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
    fn deg(p: &[BigRational]) -> Option<usize> {
        p.iter().rposition(|c| !c.is_zero())
    }
    fn trim(mut p: Vec<BigRational>) -> Vec<BigRational> {
        while p.last().map_or(false, Zero::is_zero) {
            p.pop();
        }
        p
    }
    fn divrem(num: &[BigRational], den: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let dd = deg(den).expect("nonzero divisor");
        let mut rem = num.to_vec();
        let mut quo = vec![BigRational::zero(); num.len().saturating_sub(dd)];
        while let Some(dr) = deg(&rem) {
            if dr < dd {
                break;
            }
            let f = &rem[dr] / &den[dd];
            quo[dr - dd] = f.clone();
            for i in 0..=dd {
                let sub = &f * &den[i];
                rem[dr - dd + i] -= sub;
            }
        }
        (trim(quo), trim(rem))
    }
    fn sub_mul(a: &[BigRational], q: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        // a − q·b
        let mut out = a.to_vec();
        let need = q.len() + b.len();
        if out.len() < need {
            out.resize(need, BigRational::zero());
        }
        for (i, qc) in q.iter().enumerate() {
            if qc.is_zero() {
                continue;
            }
            for (j, bc) in b.iter().enumerate() {
                let sub = qc * bc;
                out[i + j] -= sub;
            }
        }
        trim(out)
    }

    let mut r0 = trim(m.to_vec());
    let mut r1 = trim(v.to_vec());
    let mut s0: Vec<BigRational> = vec![];
    let mut s1: Vec<BigRational> = vec![BigRational::one()];
    while deg(&r1).is_some() {
        let (q, r2) = divrem(&r0, &r1);
        let s2 = sub_mul(&s0, &q, &s1);
        r0 = std::mem::replace(&mut r1, r2);
        s0 = std::mem::replace(&mut s1, s2);
    }
    // r0 = gcd; invertible iff constant.
    match deg(&r0) {
        Some(0) => {
            let c = r0[0].clone();
            Some(s0.into_iter().map(|x| x / &c).collect())
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn sqrt2_field() -> CoeffField {
        CoeffField::extension("w", vec![q(-2, 1), q(0, 1), q(1, 1)]).unwrap()
    }

    #[test]
    fn extension_validation() {
        assert!(CoeffField::extension("w", vec![q(-2, 1), q(0, 1), q(1, 1)]).is_ok());
        // z² − 4 is reducible.
        assert!(CoeffField::extension("w", vec![q(-4, 1), q(0, 1), q(1, 1)]).is_err());
        // Degree 5 unsupported.
        assert!(CoeffField::extension(
            "w",
            vec![q(-2, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]
        )
        .is_err());
        // Not monic.
        assert!(CoeffField::extension("w", vec![q(-2, 1), q(0, 1), q(2, 1)]).is_err());
    }

    #[test]
    fn rational_tags_survive_extension_arithmetic() {
        let f = sqrt2_field();
        let a = Coeff::Rat(q(2, 3));
        let b = Coeff::Rat(q(1, 6));
        assert!(f.add(&a, &b).is_rational());
        assert!(f.mul(&a, &b).is_rational());
        assert!(f.inv(&a).unwrap().is_rational());
        // θ·θ = 2 collapses back to a rational.
        let theta = Coeff::Ext(vec![q(0, 1), q(1, 1)]);
        assert_eq!(f.mul(&theta, &theta), Coeff::Rat(q(2, 1)));
    }

    #[test]
    fn extension_field_axioms() {
        let f = sqrt2_field();
        let theta = Coeff::Ext(vec![q(0, 1), q(1, 1)]);
        let x = f.add(&Coeff::Rat(q(3, 1)), &theta); // 3 + √2
        let xi = f.inv(&x).unwrap();
        assert!(f.mul(&x, &xi).is_one());
        // (3+√2)(3−√2) = 7.
        let conj = f.sub(&Coeff::Rat(q(3, 1)), &theta);
        assert_eq!(f.mul(&x, &conj), Coeff::Rat(q(7, 1)));
    }

    #[test]
    fn cubic_extension_inverse() {
        // ℚ(∛2): θ³ = 2.
        let f = CoeffField::extension("c", vec![q(-2, 1), q(0, 1), q(0, 1), q(1, 1)]).unwrap();
        let theta = Coeff::Ext(vec![q(0, 1), q(1, 1), q(0, 1)]);
        let inv = f.inv(&theta).unwrap();
        assert!(f.mul(&theta, &inv).is_one());
        // 1/θ = θ²/2.
        assert_eq!(inv, Coeff::Ext(vec![q(0, 1), q(0, 1), q(1, 2)]));
    }

    #[test]
    fn square_roots() {
        let f = sqrt2_field();
        // √(3+2√2) = 1+√2.
        let arg = Coeff::Ext(vec![q(3, 1), q(2, 1)]);
        let r = f.sqrt(&arg).unwrap();
        assert_eq!(f.mul(&r, &r), arg);
        // √2 = θ: the rational 2 has a root in the extension.
        let r2 = f.sqrt(&Coeff::Rat(q(2, 1))).unwrap();
        assert_eq!(f.mul(&r2, &r2), Coeff::Rat(q(2, 1)));
        // 3 has no square root in ℚ(√2).
        assert!(f.sqrt(&Coeff::Rat(q(3, 1))).is_none());
        // Plain rational squares.
        assert_eq!(
            CoeffField::Q.sqrt(&Coeff::Rat(q(9, 4))),
            Some(Coeff::Rat(q(3, 2)))
        );
        assert!(CoeffField::Q.sqrt(&Coeff::Rat(q(2, 1))).is_none());
        // Prime field.
        let f5 = CoeffField::Fp(5);
        let r4 = f5.sqrt(&Coeff::Fp(4)).unwrap();
        assert_eq!(f5.mul(&r4, &r4), Coeff::Fp(4));
        assert!(f5.sqrt(&Coeff::Fp(2)).is_none());
    }

    #[test]
    fn prime_field_ops() {
        let f = CoeffField::Fp(7);
        let a = Coeff::Fp(5);
        let b = Coeff::Fp(4);
        assert_eq!(f.add(&a, &b), Coeff::Fp(2));
        assert_eq!(f.mul(&a, &b), Coeff::Fp(6));
        assert_eq!(f.inv(&a), Some(Coeff::Fp(3)));
        assert_eq!(f.sub(&b, &a), Coeff::Fp(6));
        assert!(f.inv(&Coeff::Fp(0)).is_none());
    }

    #[test]
    fn joins_and_text() {
        let f = sqrt2_field();
        assert_eq!(CoeffField::Q.join(&f).unwrap(), f);
        assert!(CoeffField::Q.join(&CoeffField::Fp(3)).is_err());
        assert_eq!(f.to_text(&Coeff::Ext(vec![q(1, 1), q(2, 1)])), "2*w + 1");
        assert_eq!(f.to_text(&Coeff::Rat(q(-1, 2))), "-1/2");
        assert_eq!(poly_text(&[q(-2, 1), q(0, 1), q(1, 1)], "z"), "z^2 - 2");
    }
}
