//! Truncated generalized power series with rational exponents, exact
//! window-tracked arithmetic, valuations, the residue place, and
//! Newton–Puiseux root finding over ℚ, small extensions of ℚ, and prime
//! fields.
//!
//! Every series carries an explicit exclusive truncation order; operations
//! compute the exact achievable output window (e.g. inverting a series of
//! valuation v known below t^T yields a series known below t^(T−2v)).

pub mod coeff;
pub mod descend;

use coeff::{rat_text, Coeff, CoeffField};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use std::fmt;
use thiserror::Error;

/// Bound on the p-adic valuation of slope denominators in characteristic p;
/// past this the polygon is treated as an unresolvable ramification cascade.
pub const P_DENOM_CAP: u32 = 12;
const DEPTH_CAP: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PuiError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient field mismatch: {0}")]
    Field(String),
    #[error("series is zero within its window; no inverse")]
    ZeroSeries,
    #[error("negative valuation: series lies outside the valuation ring")]
    NegativeValuation,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("inseparable step: slope denominators exceeded p^{0}; the classical algorithm cannot resolve this ramification")]
    InseparableStep(u32),
    #[error("coefficient field not closed: a root of {0} is required")]
    FieldNotClosed(String),
    #[error("recursion depth exhausted before the requested precision")]
    DepthExceeded,
}

fn qint(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

/// A truncated series Σ c_e·t^e with strictly increasing rational exponents
/// below the exclusive truncation order `trunc`. The empty term list is the
/// window-zero series: provably ≡ 0 below t^trunc, unknown beyond.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PuiseuxSeries {
    field: CoeffField,
    terms: Vec<(BigRational, Coeff)>,
    trunc: BigRational,
}

impl PuiseuxSeries {
    pub fn new(
        field: CoeffField,
        terms: Vec<(BigRational, Coeff)>,
        trunc: BigRational,
    ) -> PuiseuxSeries {
        let mut sorted = terms;
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BigRational, Coeff)> = Vec::with_capacity(sorted.len());
        for (e, c) in sorted {
            if e >= trunc {
                continue;
            }
            match merged.last_mut() {
                Some((pe, pc)) if *pe == e => *pc = field.add(pc, &c),
                _ => merged.push((e, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        PuiseuxSeries { field, terms: merged, trunc }
    }

    pub fn zero(field: &CoeffField, trunc: &BigRational) -> PuiseuxSeries {
        PuiseuxSeries { field: field.clone(), terms: Vec::new(), trunc: trunc.clone() }
    }

    pub fn constant(field: &CoeffField, c: &Coeff, trunc: &BigRational) -> PuiseuxSeries {
        Self::monomial(field, &BigRational::zero(), c, trunc)
    }

    pub fn one(field: &CoeffField, trunc: &BigRational) -> PuiseuxSeries {
        Self::constant(field, &Coeff::one(field), trunc)
    }

    pub fn monomial(
        field: &CoeffField,
        exp: &BigRational,
        c: &Coeff,
        trunc: &BigRational,
    ) -> PuiseuxSeries {
        Self::new(field.clone(), vec![(exp.clone(), c.clone())], trunc.clone())
    }

    /// Σ coeffs[i]·t^i for quick polynomial-in-t construction.
    pub fn poly_in_t(field: &CoeffField, coeffs: &[i64], trunc: &BigRational) -> PuiseuxSeries {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| (qint(i as i64), Coeff::from_int(field, *c)))
            .collect();
        Self::new(field.clone(), terms, trunc.clone())
    }

    pub fn field(&self) -> &CoeffField {
        &self.field
    }

    pub fn trunc(&self) -> &BigRational {
        &self.trunc
    }

    pub fn terms(&self) -> &[(BigRational, Coeff)] {
        &self.terms
    }

    pub fn is_window_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Least exponent, or None for the window-zero series (valuation +∞ as
    /// far as the window can tell).
    pub fn val(&self) -> Option<BigRational> {
        self.terms.first().map(|(e, _)| e.clone())
    }

    /// The p-free part of the lcm of exponent denominators (the Rayner
    /// ramification witness).
    pub fn ram(&self) -> BigInt {
        let p = self.field.characteristic();
        let mut m = BigInt::one();
        for (e, _) in &self.terms {
            let mut d = e.denom().clone();
            if p > 0 {
                let pb = BigInt::from(p);
                while (&d % &pb).is_zero() {
                    d /= &pb;
                }
            }
            m = m.lcm(&d);
        }
        m
    }

    pub fn coeff_at(&self, e: &BigRational) -> Coeff {
        match self.terms.binary_search_by(|(te, _)| te.cmp(e)) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => Coeff::zero(&self.field),
        }
    }

    pub fn with_trunc(&self, t: &BigRational) -> PuiseuxSeries {
        let tr = self.trunc.clone().min(t.clone());
        PuiseuxSeries::new(self.field.clone(), self.terms.clone(), tr)
    }

    pub fn shift(&self, d: &BigRational) -> PuiseuxSeries {
        PuiseuxSeries {
            field: self.field.clone(),
            terms: self.terms.iter().map(|(e, c)| (e + d, c.clone())).collect(),
            trunc: &self.trunc + d,
        }
    }

    pub fn scale(&self, c: &Coeff) -> PuiseuxSeries {
        let terms = self
            .terms
            .iter()
            .map(|(e, tc)| (e.clone(), self.field.mul(tc, c)))
            .filter(|(_, tc)| !tc.is_zero())
            .collect();
        PuiseuxSeries { field: self.field.clone(), terms, trunc: self.trunc.clone() }
    }

    /// Retags the series into a joined coefficient field (ℚ data lifts into
    /// an extension unchanged).
    pub fn lift(&self, field: &CoeffField) -> Result<PuiseuxSeries, PuiError> {
        let joined = self.field.join(field).map_err(PuiError::Field)?;
        if &joined != field {
            return Err(PuiError::Field(format!(
                "cannot lift a series over {} into {}",
                self.field, field
            )));
        }
        Ok(PuiseuxSeries {
            field: joined,
            terms: self.terms.clone(),
            trunc: self.trunc.clone(),
        })
    }

    pub fn neg(&self) -> PuiseuxSeries {
        PuiseuxSeries {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), self.field.neg(c)))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn add(&self, other: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiError> {
        let field = self.field.join(&other.field).map_err(PuiError::Field)?;
        let trunc = self.trunc.clone().min(other.trunc.clone());
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(PuiseuxSeries::new(field, terms, trunc))
    }

    pub fn sub(&self, other: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiError> {
        let field = self.field.join(&other.field).map_err(PuiError::Field)?;
        let trunc = match (self.val(), other.val()) {
            (Some(va), Some(vb)) => (&self.trunc + &vb).min(&other.trunc + &va),
            (Some(va), None) => &other.trunc + &va,
            (None, Some(vb)) => &self.trunc + &vb,
            (None, None) => &self.trunc + &other.trunc,
        };
        let mut terms: Vec<(BigRational, Coeff)> =
            Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e < trunc {
                    terms.push((e, field.mul(ca, cb)));
                }
            }
        }
        Ok(PuiseuxSeries::new(field, terms, trunc))
    }

    pub fn pow(&self, e: u32) -> Result<PuiseuxSeries, PuiError> {
        let mut acc = PuiseuxSeries::one(&self.field, &self.trunc);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Valuation-shifted geometric expansion: for a of valuation v known
    /// below t^T, the inverse is known below t^(T−2v).
    pub fn invert(&self) -> Result<PuiseuxSeries, PuiError> {
        let v = self.val().ok_or(PuiError::ZeroSeries)?;
        let c = self.terms[0].1.clone();
        let cinv = self.field.inv(&c).expect("leading coefficient is nonzero");
        // u = a·c⁻¹·t^(−v) − 1 has positive valuation and window T−v.
        let unit = self.shift(&-v.clone()).scale(&cinv);
        let window = &self.trunc - &v;
        let one = PuiseuxSeries::one(&self.field, &window);
        let u = unit.sub(&one)?;
        let mut acc = one.clone();
        let mut term = one;
        let neg_u = u.neg();
        while !term.is_window_zero() {
            // Re-clamp to the fixed window: the product's own window grows
            // with the valuation, which would keep the loop alive forever.
            term = term.mul(&neg_u)?.with_trunc(&window);
            acc = acc.add(&term)?;
        }
        // 1/a = c⁻¹·t^(−v)·acc, with the window shrinking by another v.
        let out = acc.scale(&cinv).shift(&-v.clone());
        Ok(out.with_trunc(&(&self.trunc - &(qint(2) * &v))))
    }

    /// The residue place: the coefficient at t^0 (zero if absent), defined
    /// on the valuation ring {val ≥ 0}.
    pub fn residue(&self) -> Result<Coeff, PuiError> {
        if let Some(v) = self.val() {
            if v.is_negative() {
                return Err(PuiError::NegativeValuation);
            }
        }
        Ok(self.coeff_at(&BigRational::zero()))
    }

    pub fn to_text(&self) -> String {
        format!("{self}")
    }

    pub fn parse(field: &CoeffField, src: &str) -> Result<PuiseuxSeries, PuiError> {
        parse_series(field, src)
    }
}

fn exp_text(e: &BigRational) -> String {
    if e.denom().is_one() && !e.is_negative() {
        e.numer().to_string()
    } else {
        format!("({})", rat_text(e))
    }
}

fn tpow_text(e: &BigRational) -> String {
    if e.is_one() {
        "t".to_string()
    } else {
        format!("t^{}", exp_text(e))
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (e, c) in &self.terms {
            // Negative rational coefficients donate their sign to the
            // joining " - "; extension and prime-field values never do.
            let (neg, mag) = match c {
                Coeff::Rat(q) if q.is_negative() => (true, Coeff::Rat(-q)),
                other => (false, other.clone()),
            };
            let coeff_s = match &mag {
                Coeff::Ext(_) => format!("({})", self.field.to_text(&mag)),
                _ => self.field.to_text(&mag),
            };
            let body = if e.is_zero() {
                coeff_s
            } else if mag.is_one() {
                tpow_text(e)
            } else {
                format!("{coeff_s}*{}", tpow_text(e))
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            write!(f, "O({})", tpow_text(&self.trunc))
        } else {
            write!(f, "{out} + O({})", tpow_text(&self.trunc))
        }
    }
}

fn parse_rational_token(s: &str) -> Result<BigRational, PuiError> {
    crate::jsonio::parse_rational(s.trim()).map_err(PuiError::Parse)
}

/// Splits at top-level " + " / " - " (depth-aware so extension coefficients
/// in parentheses survive). Returns (sign, chunk) pairs.
fn split_signed_terms(src: &str) -> Vec<(bool, String)> {
    let mut parts = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    let mut depth = 0usize;
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if depth == 0
            && ch == ' '
            && i + 2 < bytes.len()
            && (bytes[i + 1] == '+' || bytes[i + 1] == '-')
            && bytes[i + 2] == ' '
        {
            parts.push((neg, cur.trim().to_string()));
            neg = bytes[i + 1] == '-';
            cur = String::new();
            i += 3;
            continue;
        }
        cur.push(ch);
        i += 1;
    }
    parts.push((neg, cur.trim().to_string()));
    parts
}

fn parse_tpow(s: &str) -> Result<BigRational, PuiError> {
    let rest = s
        .strip_prefix('t')
        .ok_or_else(|| PuiError::Parse(format!("expected a power of t, found '{s}'")))?;
    if rest.is_empty() {
        return Ok(BigRational::one());
    }
    let rest = rest
        .strip_prefix('^')
        .ok_or_else(|| PuiError::Parse(format!("malformed power of t: '{s}'")))?;
    if let Some(inner) = rest.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| PuiError::Parse(format!("unbalanced exponent in '{s}'")))?;
        parse_rational_token(inner)
    } else {
        parse_rational_token(rest)
    }
}

fn parse_coeff_token(field: &CoeffField, s: &str) -> Result<Coeff, PuiError> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(') {
        let inner = inner
            .strip_suffix(')')
            .ok_or_else(|| PuiError::Parse(format!("unbalanced coefficient '{s}'")))?;
        let label = match field {
            CoeffField::QExt { label, .. } => label.clone(),
            _ => {
                return Err(PuiError::Parse(format!(
                    "parenthesized coefficient '{s}' needs an extension field"
                )))
            }
        };
        let p = crate::multfield::poly::parse_poly(inner, crate::multfield::BaseField::Q)
            .map_err(PuiError::Parse)?;
        if let Some(q) = p.as_constant() {
            return Ok(Coeff::from_rational(field, &q));
        }
        let (var, dense) = p
            .to_dense_univariate()
            .ok_or_else(|| PuiError::Parse(format!("coefficient '{s}' is not univariate")))?;
        if var != label {
            return Err(PuiError::Parse(format!(
                "coefficient '{s}' uses '{var}', expected the extension label '{label}'"
            )));
        }
        if dense.len() > field.ext_degree() {
            return Err(PuiError::Parse(format!(
                "coefficient '{s}' exceeds the extension degree"
            )));
        }
        let theta = {
            let mut v = vec![BigRational::zero(); field.ext_degree()];
            v[1] = BigRational::one();
            Coeff::Ext(v)
        };
        let mut acc = Coeff::zero(field);
        for c in dense.iter().rev() {
            acc = field.add(&field.mul(&acc, &theta), &Coeff::Rat(c.clone()));
        }
        Ok(acc)
    } else {
        Ok(Coeff::from_rational(field, &parse_rational_token(s)?))
    }
}

fn parse_series(field: &CoeffField, src: &str) -> Result<PuiseuxSeries, PuiError> {
    let src = src.trim();
    let opos = src
        .rfind("O(")
        .ok_or_else(|| PuiError::Parse("missing O(...) truncation tail".to_string()))?;
    let tail = &src[opos..];
    let inner = tail
        .strip_prefix("O(")
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| PuiError::Parse(format!("malformed truncation tail '{tail}'")))?;
    let trunc = parse_tpow(inner)?;
    let head = src[..opos].trim_end();
    let head = head.strip_suffix('+').unwrap_or(head).trim_end();
    let mut terms = Vec::new();
    if !head.is_empty() {
        for (neg, chunk) in split_signed_terms(head) {
            let (lead_neg, body) = match chunk.strip_prefix('-') {
                Some(r) => (true, r.trim_start().to_string()),
                None => (false, chunk),
            };
            if body.is_empty() {
                return Err(PuiError::Parse("empty term".to_string()));
            }
            let (coeff_s, exp) = if let Some(star) = find_top_level_star(&body) {
                let (c, t) = body.split_at(star);
                (Some(c.trim().to_string()), parse_tpow(t[1..].trim())?)
            } else if body.starts_with('t') {
                (None, parse_tpow(&body)?)
            } else {
                (Some(body.clone()), BigRational::zero())
            };
            let mut c = match coeff_s {
                Some(cs) => parse_coeff_token(field, &cs)?,
                None => Coeff::one(field),
            };
            if neg != lead_neg {
                c = field.neg(&c);
            }
            terms.push((exp, c));
        }
    }
    Ok(PuiseuxSeries::new(field.clone(), terms, trunc))
}

fn find_top_level_star(s: &str) -> Option<usize> {
    let mut depth = 0usize;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            '*' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Evaluates Σ f[i]·x^i by Horner's rule.
pub fn eval_poly(f: &[PuiseuxSeries], x: &PuiseuxSeries) -> Result<PuiseuxSeries, PuiError> {
    let mut it = f.iter().rev();
    let mut acc = it.next().ok_or(PuiError::ZeroPolynomial)?.clone();
    for c in it {
        acc = acc.mul(x)?.add(c)?;
    }
    Ok(acc)
}

fn binom_big(n: usize, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k.min(n - k) {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

fn p_adic_val(mut n: BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut v = 0;
    while !n.is_zero() && (&n % &pb).is_zero() {
        n /= &pb;
        v += 1;
    }
    v
}

/// Strictly convex lower hull of points sorted by abscissa.
fn lower_hull(pts: &[(usize, BigRational)]) -> Vec<(usize, BigRational)> {
    let mut hull: Vec<(usize, BigRational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2];
            let a = &hull[hull.len() - 1];
            let cross = (qint((a.0 - o.0) as i64) * (&p.1 - &o.1))
                - ((&a.1 - &o.1) * qint((p.0 - o.0) as i64));
            if cross <= BigRational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

fn coeff_poly_text(field: &CoeffField, phi: &[Coeff]) -> String {
    let mut parts = Vec::new();
    for (i, c) in phi.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let cs = match c {
            Coeff::Ext(_) => format!("({})", field.to_text(c)),
            _ => field.to_text(c),
        };
        let body = match i {
            0 => cs,
            1 if c.is_one() => "z".to_string(),
            1 => format!("{cs}*z"),
            _ if c.is_one() => format!("z^{i}"),
            _ => format!("{cs}*z^{i}"),
        };
        parts.push(body);
    }
    parts.reverse();
    parts.join(" + ")
}

/// One distinct root of the characteristic polynomial of a polygon edge,
/// together with the (possibly extended) field it lives in. Multiplicities
/// are re-derived by each branch's own polygon, so roots are listed once.
struct SplitRoot {
    field: CoeffField,
    value: Coeff,
}

fn quadratic_roots_in(
    field: &CoeffField,
    a: &Coeff,
    b: &Coeff,
    c: &Coeff,
    phi_text: String,
) -> Result<Vec<SplitRoot>, PuiError> {
    let four = Coeff::from_int(field, 4);
    let two = Coeff::from_int(field, 2);
    let disc = field.sub(&field.mul(b, b), &field.mul(&four, &field.mul(a, c)));
    let s = field
        .sqrt(&disc)
        .ok_or(PuiError::FieldNotClosed(phi_text))?;
    let denom = field.mul(&two, a);
    if s.is_zero() {
        let r = field.div(&field.neg(b), &denom).expect("a is nonzero");
        return Ok(vec![SplitRoot { field: field.clone(), value: r }]);
    }
    let r1 = field.div(&field.add(&field.neg(b), &s), &denom).expect("a is nonzero");
    let r2 = field.div(&field.sub(&field.neg(b), &s), &denom).expect("a is nonzero");
    Ok(vec![
        SplitRoot { field: field.clone(), value: r1 },
        SplitRoot { field: field.clone(), value: r2 },
    ])
}

/// Splits a rational dense factor of degree 2..=4 by adjoining one root as a
/// fresh extension label, then extracting the remaining roots expressible in
/// that same extension.
fn split_rational_factor(fac: &[BigRational]) -> Result<Vec<SplitRoot>, PuiError> {
    let deg = fac.len() - 1;
    let lc = fac.last().expect("nonempty factor").clone();
    let min_poly: Vec<BigRational> = fac.iter().map(|c| c / &lc).collect();
    let text = coeff::poly_text(&min_poly, "z");
    if deg > coeff::MAX_EXT_DEGREE {
        return Err(PuiError::FieldNotClosed(text));
    }
    let field = CoeffField::extension("w", min_poly.clone())
        .map_err(|_| PuiError::FieldNotClosed(text.clone()))?;
    let mut theta_vec = vec![BigRational::zero(); deg];
    theta_vec[1] = BigRational::one();
    let theta = Coeff::Ext(theta_vec);
    let mut out = vec![SplitRoot { field: field.clone(), value: theta.clone() }];
    // Synthetic division of the minimal polynomial by (z − θ).
    let mp: Vec<Coeff> = min_poly.iter().map(|c| Coeff::Rat(c.clone())).collect();
    let mut cof = vec![Coeff::zero(&field); deg];
    cof[deg - 1] = Coeff::one(&field);
    for j in (1..deg).rev() {
        cof[j - 1] = field.add(&mp[j], &field.mul(&theta, &cof[j]));
    }
    match deg - 1 {
        0 => {}
        1 => {
            let r = field.div(&field.neg(&cof[0]), &cof[1]).expect("monic cofactor");
            out.push(SplitRoot { field: field.clone(), value: r });
        }
        2 => {
            let more = quadratic_roots_in(&field, &cof[2], &cof[1], &cof[0], text)?;
            out.extend(more);
        }
        _ => return Err(PuiError::FieldNotClosed(text)),
    }
    Ok(out)
}

/// Roots with multiplicity of a dense characteristic polynomial φ (nonzero
/// constant and leading terms) over the given field, extending ℚ by at most
/// one label when necessary.
fn root_split(field: &CoeffField, phi: &[Coeff]) -> Result<Vec<SplitRoot>, PuiError> {
    let text = coeff_poly_text(field, phi);
    match field {
        CoeffField::Fp(p) => {
            let dense: Vec<BigRational> = phi
                .iter()
                .map(|c| match c {
                    Coeff::Fp(r) => BigRational::from(BigInt::from(*r)),
                    _ => panic!("prime-field polynomial with foreign coefficients"),
                })
                .collect();
            let mut rng = crate::multfield::factor_rng();
            let (_, factors) =
                crate::multfield::unifactor::factor_dense(
                    crate::multfield::BaseField::Fp(*p),
                    &dense,
                    &mut rng,
                )
                .map_err(PuiError::Parse)?;
            let mut out = Vec::new();
            for (fac, _) in factors {
                if fac.len() == 2 {
                    let neg = crate::multfield::BaseField::Fp(*p).neg(&fac[0]);
                    let r: u64 = neg.numer().to_string().parse().expect("residue");
                    out.push(SplitRoot { field: field.clone(), value: Coeff::Fp(r) });
                } else {
                    return Err(PuiError::FieldNotClosed(coeff::poly_text(&fac, "z")));
                }
            }
            Ok(out)
        }
        CoeffField::Q => {
            let dense: Vec<BigRational> = phi
                .iter()
                .map(|c| c.as_rational().cloned().expect("rational coefficients over Q"))
                .collect();
            let mut rng = crate::multfield::factor_rng();
            let (_, factors) = crate::multfield::unifactor::factor_dense(
                crate::multfield::BaseField::Q,
                &dense,
                &mut rng,
            )
            .map_err(PuiError::Parse)?;
            let mut out = Vec::new();
            for (fac, _) in factors {
                if fac.len() == 2 {
                    let r = -&fac[0] / &fac[1];
                    out.push(SplitRoot { field: CoeffField::Q, value: Coeff::Rat(r) });
                } else {
                    out.extend(split_rational_factor(&fac)?);
                }
            }
            Ok(out)
        }
        CoeffField::QExt { .. } => {
            if phi.iter().all(Coeff::is_rational) {
                // Rational polygon data inside an existing extension: factor
                // over ℚ and only accept roots already in this extension.
                let dense: Vec<BigRational> =
                    phi.iter().map(|c| c.as_rational().cloned().unwrap()).collect();
                let mut rng = crate::multfield::factor_rng();
                let (_, factors) = crate::multfield::unifactor::factor_dense(
                    crate::multfield::BaseField::Q,
                    &dense,
                    &mut rng,
                )
                .map_err(PuiError::Parse)?;
                let mut out = Vec::new();
                for (fac, _) in factors {
                    match fac.len() {
                        2 => out.push(SplitRoot {
                            field: field.clone(),
                            value: Coeff::Rat(-&fac[0] / &fac[1]),
                        }),
                        3 => {
                            let fc = coeff::poly_text(&fac, "z");
                            let more = quadratic_roots_in(
                                field,
                                &Coeff::Rat(fac[2].clone()),
                                &Coeff::Rat(fac[1].clone()),
                                &Coeff::Rat(fac[0].clone()),
                                fc,
                            )?;
                            out.extend(more);
                        }
                        _ => return Err(PuiError::FieldNotClosed(coeff::poly_text(&fac, "z"))),
                    }
                }
                Ok(out)
            } else {
                match phi.len() - 1 {
                    1 => {
                        let r = field
                            .div(&field.neg(&phi[0]), &phi[1])
                            .expect("nonzero leading coefficient");
                        Ok(vec![SplitRoot { field: field.clone(), value: r }])
                    }
                    2 => quadratic_roots_in(field, &phi[2], &phi[1], &phi[0], text),
                    _ => Err(PuiError::FieldNotClosed(text)),
                }
            }
        }
    }
}

/// Drops window-zero leading coefficients; None when every coefficient is
/// window-zero.
fn trim_leading(f: &[PuiseuxSeries]) -> Option<&[PuiseuxSeries]> {
    let top = f.iter().rposition(|c| !c.is_window_zero())?;
    Some(&f[..=top])
}

/// All roots of Σ f[i]·y^i to precision `prec` (exponents < prec), with
/// multiplicities. Coefficient fields may grow by one rational extension
/// label per branch; characteristic-p ramification cascades and unsupported
/// splitting fields raise typed errors.
pub fn newton_puiseux(
    f: &[PuiseuxSeries],
    prec: &BigRational,
) -> Result<Vec<(PuiseuxSeries, u32)>, PuiError> {
    if f.is_empty() {
        return Err(PuiError::ZeroPolynomial);
    }
    let mut field = f[0].field().clone();
    for c in &f[1..] {
        field = field.join(c.field()).map_err(PuiError::Field)?;
    }
    let lifted: Vec<PuiseuxSeries> = f
        .iter()
        .map(|c| c.lift(&field))
        .collect::<Result<_, _>>()?;
    let trimmed = trim_leading(&lifted).ok_or(PuiError::ZeroPolynomial)?;
    np_rec(trimmed, prec, None, 0)
}

fn np_rec(
    f: &[PuiseuxSeries],
    prec: &BigRational,
    min_exp: Option<&BigRational>,
    depth: u32,
) -> Result<Vec<(PuiseuxSeries, u32)>, PuiError> {
    if depth > DEPTH_CAP {
        return Err(PuiError::DepthExceeded);
    }
    let field = f[0].field().clone();
    let p = field.characteristic();
    let mut out: Vec<(PuiseuxSeries, u32)> = Vec::new();

    // Window-certified y = 0 roots.
    let i0 = f
        .iter()
        .position(|c| !c.is_window_zero())
        .expect("leading coefficient is trimmed");
    if i0 > 0 {
        out.push((PuiseuxSeries::zero(&field, prec), i0 as u32));
    }
    let f = &f[i0..];
    if f.len() == 1 {
        return Ok(out);
    }

    let pts: Vec<(usize, BigRational)> = f
        .iter()
        .enumerate()
        .filter_map(|(i, c)| c.val().map(|v| (i, v)))
        .collect();
    let hull = lower_hull(&pts);

    for edge in hull.windows(2) {
        let (i1, v1) = (edge[0].0, &edge[0].1);
        let (i2, v2) = (edge[1].0, &edge[1].1);
        let width = i2 - i1;
        let gamma = (v1 - v2) / qint(width as i64);
        if let Some(me) = min_exp {
            if &gamma <= me {
                continue;
            }
        }
        if &gamma >= prec {
            // Every root on this edge agrees with the accumulated prefix
            // below the requested precision.
            out.push((PuiseuxSeries::zero(&field, prec), width as u32));
            continue;
        }
        if p > 0 && p_adic_val(gamma.denom().clone(), p) > P_DENOM_CAP {
            return Err(PuiError::InseparableStep(P_DENOM_CAP));
        }

        // Characteristic polynomial of the edge: coefficients on the line
        // through the edge (off-line or window-hidden data contributes 0).
        let phi: Vec<Coeff> = (0..=width)
            .map(|k| {
                let e = v1 - &gamma * qint(k as i64);
                f[i1 + k].coeff_at(&e)
            })
            .collect();
        debug_assert!(!phi[0].is_zero() && !phi[width].is_zero());

        for root in root_split(&field, &phi)? {
            let branch_field = root.field;
            let c = root.value;
            // Substitute y = c·t^γ + y': g_j = Σ_{i≥j} C(i,j)·f_i·(c·t^γ)^{i−j}.
            let deg = f.len() - 1;
            let mut g: Vec<PuiseuxSeries> = Vec::with_capacity(f.len());
            for j in 0..=deg {
                let mut acc: Option<PuiseuxSeries> = None;
                for i in j..=deg {
                    let fi = f[i].lift(&branch_field)?;
                    let k = (i - j) as u32;
                    let b = Coeff::from_rational(
                        &branch_field,
                        &BigRational::from(binom_big(i, j)),
                    );
                    let scaled = fi
                        .scale(&branch_field.mul(&b, &branch_field.pow(&c, k)))
                        .shift(&(&gamma * qint(k as i64)));
                    acc = Some(match acc {
                        None => scaled,
                        Some(prev) => prev.add(&scaled)?,
                    });
                }
                g.push(acc.expect("at least the i = deg summand"));
            }
            let trimmed = trim_leading(&g).expect("leading coefficient survives substitution");
            let prefix = PuiseuxSeries::monomial(&branch_field, &gamma, &c, prec);
            for (tail, m) in np_rec(trimmed, prec, Some(&gamma), depth + 1)? {
                out.push((prefix.add(&tail)?, m));
            }
        }
    }
    Ok(out)
}
