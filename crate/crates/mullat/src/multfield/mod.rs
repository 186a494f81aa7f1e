//! Multiplicative arithmetic in rational function fields over ℚ or F_p
//! (with exponents in E_p, i.e. the perfect closure in positive
//! characteristic): elements kept in factored form, exponent lattices over
//! the irreducible index, multiplicative independence, and pure hulls of
//! spans taken modulo constants.

pub mod poly;
pub mod unifactor;

use crate::epmod::matrix::{hnf, snf, IntMat};
use crate::epmod::{canonical_lattice_ints, pure_hull, Characteristic, EpLattice, EpScalar};
use crate::jsonio;
use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{One, Signed, Zero};
use poly::parse_product;
pub use poly::{BaseField, Poly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum MfError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("zero input")]
    ZeroInput,
    #[error("claimed irreducible factors further: {0}")]
    ReducibleClaim(String),
    #[error("claimed irreducibles share a factor: {0} and {1}")]
    CommonFactor(String, String),
    #[error("exponent is not in E_p: {0}")]
    NotInEp(String),
    #[error("base field mismatch between operands")]
    FieldMismatch,
    #[error("elements are dependent modulo constants")]
    DependentInput,
    #[error("element has a fractional exponent and cannot be expanded")]
    FractionalExponent,
    #[error("substitution sends a factor to zero (place undefined)")]
    PlaceUndefined,
}

/// A canonical irreducible of the multiplicative free basis: a rational
/// prime (characteristic 0 constants), or an irreducible polynomial in
/// canonical form (content 1 with positive leading coefficient over ℚ,
/// monic over F_p).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Irreducible {
    Prime(BigUint),
    Poly(Poly),
}

impl Irreducible {
    pub fn to_text(&self) -> String {
        match self {
            Irreducible::Prime(p) => p.to_string(),
            Irreducible::Poly(p) => p.to_string(),
        }
    }

    fn poly_key(p: &Poly) -> (u32, Vec<String>, Vec<String>) {
        // Deterministic comparison key: total degree, variable support,
        // then the term list (descending graded-lex) printed exactly.
        let terms: Vec<String> = p
            .terms()
            .iter()
            .rev()
            .map(|(m, c)| format!("{m}:{c}"))
            .collect();
        (p.total_degree(), p.vars(), terms)
    }
}

impl Ord for Irreducible {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Irreducible::Prime(a), Irreducible::Prime(b)) => a.cmp(b),
            (Irreducible::Prime(_), Irreducible::Poly(_)) => Ordering::Less,
            (Irreducible::Poly(_), Irreducible::Prime(_)) => Ordering::Greater,
            (Irreducible::Poly(a), Irreducible::Poly(b)) => {
                Irreducible::poly_key(a).cmp(&Irreducible::poly_key(b))
            }
        }
    }
}

impl PartialOrd for Irreducible {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Irreducible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// An element of the multiplicative group in factored form:
/// constant × Π irreducibleᵢ^{eᵢ} with eᵢ ∈ E_p nonzero.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultElement {
    field: BaseField,
    constant: BigRational,
    factors: BTreeMap<Irreducible, EpScalar>,
}

pub enum CombineOp {
    Multiply,
    Divide,
}

impl MultElement {
    pub fn one(field: BaseField) -> Self {
        MultElement { field, constant: BigRational::one(), factors: BTreeMap::new() }
    }

    /// Builds an element from parts without prime-splitting the constant;
    /// zero exponents are dropped. Errors on a zero constant.
    pub fn from_parts(
        field: BaseField,
        constant: BigRational,
        factors: Vec<(Irreducible, EpScalar)>,
    ) -> Result<Self, MfError> {
        let constant = field.reduce(&constant);
        if constant.is_zero() {
            return Err(MfError::ZeroInput);
        }
        let mut map = BTreeMap::new();
        for (irr, e) in factors {
            if e.is_zero() {
                continue;
            }
            insert_exponent(&mut map, field.chr(), irr, e);
        }
        Ok(MultElement { field, constant, factors: map })
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn constant(&self) -> &BigRational {
        &self.constant
    }

    pub fn factors(&self) -> &BTreeMap<Irreducible, EpScalar> {
        &self.factors
    }

    pub fn is_constant(&self) -> bool {
        self.factors.is_empty()
    }

    /// Variables appearing in any factor.
    pub fn vars(&self) -> Vec<String> {
        let mut s = std::collections::BTreeSet::new();
        for irr in self.factors.keys() {
            if let Irreducible::Poly(p) = irr {
                for v in p.vars() {
                    s.insert(v);
                }
            }
        }
        s.into_iter().collect()
    }
}

fn insert_exponent(
    map: &mut BTreeMap<Irreducible, EpScalar>,
    chr: Characteristic,
    irr: Irreducible,
    e: EpScalar,
) {
    match map.entry(irr) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(e);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().add(&e, chr);
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
}

fn trial_division(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let one = BigUint::one();
    if n <= one {
        return out;
    }
    let mut d = BigUint::from(2u32);
    while &d * &d <= n {
        let mut m = 0u32;
        while (&n % &d).is_zero() {
            n /= &d;
            m += 1;
        }
        if m > 0 {
            out.push((d.clone(), m));
        }
        d += 1u32;
    }
    if n > one {
        out.push((n, 1));
    }
    out
}

/// Splits a nonzero rational into sign and prime-power factors.
pub fn split_rational(q: &BigRational) -> (bool, Vec<(BigUint, BigInt)>) {
    let negative = q.is_negative();
    let num = q.numer().abs().to_biguint().expect("nonnegative");
    let den = q.denom().abs().to_biguint().expect("nonnegative");
    let mut map: BTreeMap<BigUint, BigInt> = BTreeMap::new();
    for (p, m) in trial_division(&num) {
        *map.entry(p).or_insert_with(BigInt::zero) += BigInt::from(m);
    }
    for (p, m) in trial_division(&den) {
        *map.entry(p).or_insert_with(BigInt::zero) -= BigInt::from(m);
    }
    (negative, map.into_iter().filter(|(_, e)| !e.is_zero()).collect())
}

/// Exponent vector of a nonzero rational over the prime index, with the
/// torsion part {±1} dropped.
pub fn rationals_mod_torsion(q: &BigRational) -> Result<Vec<(BigUint, BigInt)>, MfError> {
    if q.is_zero() {
        return Err(MfError::ZeroInput);
    }
    Ok(split_rational(q).1)
}

pub(crate) fn factor_rng() -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6d66_6163)
}

/// Factors a univariate polynomial completely into canonical irreducibles,
/// returning the scalar split off by canonicalization.
fn factor_univariate(
    p: &Poly,
    rng: &mut ChaCha8Rng,
) -> Result<(BigRational, Vec<(Poly, u32)>), MfError> {
    let field = p.field();
    let (var, dense) = p.to_dense_univariate().expect("univariate");
    let (constant, factors) =
        unifactor::factor_dense(field, &dense, rng).map_err(MfError::Parse)?;
    let polys = factors
        .into_iter()
        .map(|(coeffs, m)| (Poly::from_dense(field, &var, &coeffs), m))
        .collect();
    Ok((constant, polys))
}

/// Best-effort irreducibility check for a canonical nonconstant polynomial.
/// Univariate inputs are checked completely. Multivariate: total degree 1
/// passes; bivariate total degree 2 is decided exactly (discriminant square
/// test over ℚ, exhaustive linear divisors over F_p); anything bigger is
/// trusted after the support checks.
fn claim_irreducible(p: &Poly, rng: &mut ChaCha8Rng) -> Result<(), MfError> {
    let vars = p.vars();
    if vars.len() <= 1 {
        let (_, dense) = p.to_dense_univariate().expect("nonconstant");
        if !unifactor::is_irreducible_dense(p.field(), &dense, rng) {
            return Err(MfError::ReducibleClaim(p.to_string()));
        }
        return Ok(());
    }
    if p.total_degree() == 1 {
        return Ok(());
    }
    if vars.len() == 2 && p.total_degree() == 2 {
        if bivariate_quadratic_reducible(p, &vars) {
            return Err(MfError::ReducibleClaim(p.to_string()));
        }
        return Ok(());
    }
    Ok(())
}

/// Exact reducibility decision for a primitive bivariate quadratic.
fn bivariate_quadratic_reducible(p: &Poly, vars: &[String]) -> bool {
    let field = p.field();
    match field {
        BaseField::Fp(q) => {
            // Degree-2 reducible ⟺ a linear polynomial divides. Enumerate
            // all monic-leading linear candidates over the two variables.
            let (u, v) = (&vars[0], &vars[1]);
            for a in 0..q {
                for b in 0..q {
                    // u + a·v + b
                    let cand = Poly::var(field, u)
                        .add(&Poly::var(field, v).mul_scalar(&BigRational::from(BigInt::from(a))))
                        .add(&Poly::constant(field, &BigRational::from(BigInt::from(b))));
                    if p.exact_div(&cand).is_some() {
                        return true;
                    }
                }
            }
            for b in 0..q {
                // v + b
                let cand = Poly::var(field, v)
                    .add(&Poly::constant(field, &BigRational::from(BigInt::from(b))));
                if p.exact_div(&cand).is_some() {
                    return true;
                }
            }
            false
        }
        BaseField::Q => {
            // Write p = A·u² + B(v)·u + C(v) with A rational (the total
            // degree bound keeps the u² coefficient constant).
            let (u, v) = (&vars[0], &vars[1]);
            let mut a_coef = BigRational::zero();
            let mut b_dense = vec![BigRational::zero(); 2];
            let mut c_dense = vec![BigRational::zero(); 3];
            for (m, c) in p.terms() {
                let eu = m.0.get(u).copied().unwrap_or(0);
                let ev = m.0.get(v).copied().unwrap_or(0);
                match eu {
                    2 => a_coef = c.clone(),
                    1 => b_dense[ev as usize] += c,
                    0 => c_dense[ev as usize] += c,
                    _ => unreachable!("degree bound"),
                }
            }
            if a_coef.is_zero() {
                // p = B(v)·u + C(v): reducible iff gcd(B, C) is nonconstant.
                let g = unifactor::gcd_dense(field, &b_dense, &c_dense);
                return g.len() > 1;
            }
            // Reducible over ℚ ⟺ disc(v) = B² − 4AC is a square in ℚ[v].
            let mut disc = vec![BigRational::zero(); 3];
            for i in 0..2 {
                for j in 0..2 {
                    let prod = &b_dense[i] * &b_dense[j];
                    disc[i + j] += prod;
                }
            }
            for (i, c) in c_dense.iter().enumerate() {
                disc[i] -= BigRational::from(BigInt::from(4)) * &a_coef * c;
            }
            while disc.last().map_or(false, Zero::is_zero) {
                disc.pop();
            }
            rational_poly_is_square(&disc)
        }
    }
}

fn rational_square_root(q: &BigRational) -> Option<BigRational> {
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

/// Is the (degree ≤ 2) rational polynomial a perfect square in ℚ[v]?
fn rational_poly_is_square(p: &[BigRational]) -> bool {
    match p.len() {
        0 => true,
        1 => rational_square_root(&p[0]).is_some(),
        2 => false,
        3 => {
            // (a·v + b)²: leading coefficient square and zero discriminant.
            let disc = &p[1] * &p[1] - BigRational::from(BigInt::from(4)) * &p[2] * &p[0];
            disc.is_zero() && rational_square_root(&p[2]).is_some()
        }
        _ => false,
    }
}

/// Certifies that two polynomials with no common variable restriction share
/// no nonconstant factor, by substituting values for all but one variable
/// and taking univariate gcds; exact divisibility is used when one side is
/// univariate.
fn check_coprime(a: &Poly, b: &Poly, rng: &mut ChaCha8Rng) -> Result<(), MfError> {
    use rand::Rng;
    let field = a.field();
    if a.vars().len() <= 1 {
        if b.exact_div(a).is_some() {
            return Err(MfError::CommonFactor(a.to_string(), b.to_string()));
        }
        return Ok(());
    }
    if b.vars().len() <= 1 {
        if a.exact_div(b).is_some() {
            return Err(MfError::CommonFactor(a.to_string(), b.to_string()));
        }
        return Ok(());
    }
    let mut union: Vec<String> = a.vars();
    for v in b.vars() {
        if !union.contains(&v) {
            union.push(v);
        }
    }
    union.sort();
    if a.vars() != b.vars() && a.vars().iter().all(|v| !b.vars().contains(v)) {
        // Disjoint supports: a common factor would have to be constant.
        return Ok(());
    }
    // A common factor must involve some variable; certify each variable x by
    // finding a substitution of the others that preserves both x-degrees and
    // yields coprime univariate images.
    'vars: for x in &union {
        if a.degree_in(x) == 0 || b.degree_in(x) == 0 {
            continue; // a common factor involving x would divide both
        }
        let others: Vec<String> = union.iter().filter(|v| *v != x).cloned().collect();
        let range: i64 = match field {
            BaseField::Q => 40,
            BaseField::Fp(p) => p as i64,
        };
        for _attempt in 0..200 {
            let mut asg = BTreeMap::new();
            for v in &others {
                let val = rng.gen_range(0..range);
                asg.insert(v.clone(), BigRational::from(BigInt::from(val)));
            }
            let ax = a.eval_partial(&asg);
            let bx = b.eval_partial(&asg);
            if ax.degree_in(x) != a.degree_in(x) || bx.degree_in(x) != b.degree_in(x) {
                continue;
            }
            let (_, da) = ax.to_dense_univariate().unwrap_or((x.clone(), vec![]));
            let (_, db) = bx.to_dense_univariate().unwrap_or((x.clone(), vec![]));
            if da.is_empty() || db.is_empty() {
                continue;
            }
            let g = unifactor::gcd_dense(field, &da, &db);
            if g.len() == 1 {
                continue 'vars; // coprime in x certified
            }
        }
        return Err(MfError::CommonFactor(a.to_string(), b.to_string()));
    }
    Ok(())
}

/// Factors an input — a rational constant, a univariate polynomial, or a
/// formal product of claimed irreducibles — into a canonical MultElement.
///
/// Univariate bases are factored completely; multivariate bases must pass
/// the best-effort irreducibility and pairwise-coprimality checks. Over ℚ
/// the accumulated rational constant is split into prime factors, leaving
/// constant ±1.
pub fn factor(field: BaseField, input: &str) -> Result<MultElement, MfError> {
    let product = parse_product(input, field).map_err(MfError::Parse)?;
    factor_product(field, product.constant, &product.factors)
}

pub fn factor_product(
    field: BaseField,
    constant: BigRational,
    bases: &[(Poly, i64)],
) -> Result<MultElement, MfError> {
    let chr = field.chr();
    let mut rng = factor_rng();
    let mut constant = field.reduce(&constant);
    if constant.is_zero() {
        return Err(MfError::ZeroInput);
    }
    let mut map: BTreeMap<Irreducible, EpScalar> = BTreeMap::new();
    for (base, e) in bases {
        if *e == 0 {
            continue;
        }
        if base.is_zero() {
            return Err(MfError::ZeroInput);
        }
        let (scale, prim) = base.content_primitive();
        let scaled = field
            .pow_int(&scale, *e)
            .ok_or(MfError::ZeroInput)?;
        constant = field.mul(&constant, &scaled);
        if let Some(c) = prim.as_constant() {
            let v = field.pow_int(&c, *e).ok_or(MfError::ZeroInput)?;
            constant = field.mul(&constant, &v);
            continue;
        }
        if prim.vars().len() == 1 {
            let (cst, factors) = factor_univariate(&prim, &mut rng)?;
            let extra = field.pow_int(&cst, *e).ok_or(MfError::ZeroInput)?;
            constant = field.mul(&constant, &extra);
            for (irr, m) in factors {
                let exp = EpScalar::from_int(BigInt::from(*e) * BigInt::from(m));
                insert_exponent(&mut map, chr, Irreducible::Poly(irr), exp);
            }
        } else {
            claim_irreducible(&prim, &mut rng)?;
            insert_exponent(
                &mut map,
                chr,
                Irreducible::Poly(prim),
                EpScalar::from_int(*e),
            );
        }
    }
    // Pairwise coprimality across distinct claimed keys (and against the
    // certified univariate irreducibles).
    let keys: Vec<Irreducible> = map.keys().cloned().collect();
    for (i, a) in keys.iter().enumerate() {
        let Irreducible::Poly(pa) = a else { continue };
        if pa.vars().len() <= 1 {
            continue;
        }
        for b in keys.iter().skip(i + 1) {
            let Irreducible::Poly(pb) = b else { continue };
            check_coprime(pa, pb, &mut rng)?;
        }
        // Univariate established irreducibles with smaller keys.
        for b in keys.iter().take(i) {
            let Irreducible::Poly(pb) = b else { continue };
            if pb.vars().len() <= 1 {
                check_coprime(pb, pa, &mut rng)?;
            }
        }
    }
    if field == BaseField::Q {
        let (negative, primes) = split_rational(&constant);
        constant = if negative { -BigRational::one() } else { BigRational::one() };
        for (p, e) in primes {
            insert_exponent(
                &mut map,
                chr,
                Irreducible::Prime(p),
                EpScalar::from_int(e),
            );
        }
    }
    MultElement::from_parts(field, constant, map.into_iter().collect())
}

/// Multiplies or divides two factored elements: exponent maps add or
/// subtract, constants multiply or divide; no re-factoring happens.
pub fn combine(a: &MultElement, b: &MultElement, op: CombineOp) -> Result<MultElement, MfError> {
    if a.field != b.field {
        return Err(MfError::FieldMismatch);
    }
    let chr = a.field.chr();
    let constant = match op {
        CombineOp::Multiply => a.field.mul(&a.constant, &b.constant),
        CombineOp::Divide => a
            .field
            .div(&a.constant, &b.constant)
            .ok_or(MfError::ZeroInput)?,
    };
    let mut map = a.factors.clone();
    for (irr, e) in &b.factors {
        let e = match op {
            CombineOp::Multiply => e.clone(),
            CombineOp::Divide => e.neg(),
        };
        insert_exponent(&mut map, chr, irr.clone(), e);
    }
    MultElement::from_parts(a.field, constant, map.into_iter().collect())
}

/// Raises a factored element to an E_p scalar power. Exponents scale; the
/// constant is raised exactly (p-power roots of F_p constants are resolved
/// by Frobenius, and over ℚ the scalar is an integer by the E₀ invariant).
pub fn pow_scalar(a: &MultElement, q: &EpScalar) -> Result<MultElement, MfError> {
    let chr = a.field.chr();
    if q.is_zero() {
        return Ok(MultElement::one(a.field));
    }
    if a.field == BaseField::Q && !q.is_integer() {
        return Err(MfError::NotInEp(format!("{}/p^{}", q.num, q.p_pow)));
    }
    // Over F_p the constant of c^(n/p^j) is c^n: x ↦ x^p fixes F_p, so the
    // p-power root of a constant is the constant itself.
    let e: i64 = q
        .num
        .to_string()
        .parse()
        .map_err(|_| MfError::Parse("exponent numerator too large".to_string()))?;
    let constant = a.field.pow_int(&a.constant, e).ok_or(MfError::ZeroInput)?;
    let factors = a
        .factors
        .iter()
        .map(|(irr, e)| (irr.clone(), e.mul(q, chr)))
        .collect();
    MultElement::from_parts(a.field, constant, factors)
}

/// The exponent lattice context of a tuple of elements: the ordered
/// irreducible index and one exponent row per element.
#[derive(Clone, Debug)]
pub struct ExponentMatrixContext {
    pub index: Vec<Irreducible>,
    pub rows: Vec<Vec<EpScalar>>,
}

pub fn exponent_matrix(elems: &[MultElement]) -> Result<ExponentMatrixContext, MfError> {
    if let Some(first) = elems.first() {
        if elems.iter().any(|e| e.field != first.field) {
            return Err(MfError::FieldMismatch);
        }
    }
    let mut index: Vec<Irreducible> = Vec::new();
    for e in elems {
        for irr in e.factors.keys() {
            if !index.contains(irr) {
                index.push(irr.clone());
            }
        }
    }
    index.sort();
    let rows = elems
        .iter()
        .map(|e| {
            index
                .iter()
                .map(|irr| e.factors.get(irr).cloned().unwrap_or_else(EpScalar::zero))
                .collect()
        })
        .collect();
    Ok(ExponentMatrixContext { index, rows })
}

/// Clears p-power denominators rowwise (multiplication by units of E_p)
/// to get an integer exponent matrix over the same index.
pub fn cleared_rows(ctx: &ExponentMatrixContext, chr: Characteristic) -> Vec<Vec<BigInt>> {
    ctx.rows
        .iter()
        .map(|row| {
            let v = crate::epmod::ExponentVector(row.clone());
            v.clear_denominators(chr).0
        })
        .collect()
}

pub fn independent_mod_constants(elems: &[MultElement]) -> Result<bool, MfError> {
    if elems.is_empty() {
        return Ok(true);
    }
    let chr = elems[0].field.chr();
    let ctx = exponent_matrix(elems)?;
    let rows = cleared_rows(&ctx, chr);
    let k = ctx.index.len();
    let mat = IntMat::from_rows(k, rows);
    Ok(hnf(&mat).h.nrows() == elems.len())
}

/// The pure hull of the span of element classes mod constants, together
/// with the inclusion data of the input span. Accepts dependent inputs
/// (the span rank then falls below the element count).
#[derive(Clone, Debug)]
pub struct HullModConstants {
    pub field: BaseField,
    pub index: Vec<Irreducible>,
    /// Canonical basis of the pure hull (rows over `index`).
    pub hull: EpLattice,
    /// The span of the input rows inside the full index lattice.
    pub span: EpLattice,
    /// Hull basis rows reconstituted as factored elements (constant 1).
    pub basis_elements: Vec<MultElement>,
    /// Integer coordinates of each (p-cleared) input row in the hull basis.
    pub inclusion: Vec<Vec<BigInt>>,
    /// p-stripped invariant factors of span ⊆ hull (one per span rank).
    pub invariant_factors: Vec<BigInt>,
    /// Product of the invariant factors: the index [hull : span].
    pub index_product: BigInt,
    /// Largest invariant factor: least m ≥ 1 with m·hull ⊆ span.
    pub m: BigInt,
}

fn element_from_row(
    field: BaseField,
    index: &[Irreducible],
    row: &[BigInt],
) -> MultElement {
    let factors = index
        .iter()
        .zip(row.iter())
        .filter(|(_, e)| !e.is_zero())
        .map(|(irr, e)| (irr.clone(), EpScalar::from_int(e.clone())))
        .collect();
    MultElement::from_parts(field, BigRational::one(), factors).expect("nonzero constant")
}

/// Lenient hull computation: dependent rows allowed.
pub fn hull_of_span_mod_constants(
    elems: &[MultElement],
) -> Result<HullModConstants, MfError> {
    let field = elems.first().map_or(BaseField::Q, |e| e.field);
    if elems.iter().any(|e| e.field != field) {
        return Err(MfError::FieldMismatch);
    }
    let chr = field.chr();
    let ctx = exponent_matrix(elems)?;
    let rows = cleared_rows(&ctx, chr);
    let k = ctx.index.len();
    let span =
        canonical_lattice_ints(chr, k, rows.clone()).expect("dimensions consistent");
    let ambient = EpLattice::full(chr, k);
    let hull = pure_hull(&span, &ambient).expect("span lies in the full lattice");
    let idx = crate::epmod::saturation_index(&span, &ambient).expect("computable");
    let basis_elements = (0..hull.rank())
        .map(|i| element_from_row(field, &ctx.index, hull.basis().row(i)))
        .collect();
    let hull_pivots: Vec<usize> = (0..hull.rank())
        .map(|i| (0..k).find(|&j| !hull.basis().at(i, j).is_zero()).expect("nonzero row"))
        .collect();
    let mut inclusion = Vec::with_capacity(rows.len());
    for row in &rows {
        let coords = crate::epmod::matrix::hnf_solve(hull.basis(), &hull_pivots, row)
            .expect("input rows lie in their hull");
        inclusion.push(coords);
    }
    let m = idx.factors.last().cloned().unwrap_or_else(BigInt::one);
    Ok(HullModConstants {
        field,
        index: ctx.index,
        hull,
        span,
        basis_elements,
        inclusion,
        invariant_factors: idx.factors,
        index_product: idx.index,
        m,
    })
}

/// Strict variant used by the saturation pipeline: the input tuple must be
/// independent mod constants.
pub fn pure_hull_basis_mod_constants(
    elems: &[MultElement],
) -> Result<HullModConstants, MfError> {
    if !independent_mod_constants(elems)? {
        return Err(MfError::DependentInput);
    }
    hull_of_span_mod_constants(elems)
}

/// Expands a factored element with integer exponents into a rational
/// function (numerator, denominator) pair of polynomials.
pub fn expand_numden(e: &MultElement) -> Result<(Poly, Poly), MfError> {
    let field = e.field;
    let mut num = Poly::constant(field, &e.constant);
    let mut den = Poly::one(field);
    for (irr, exp) in &e.factors {
        if !exp.is_integer() {
            return Err(MfError::FractionalExponent);
        }
        let n = &exp.num;
        let absn: u32 = n
            .abs()
            .to_string()
            .parse()
            .map_err(|_| MfError::Parse("exponent too large to expand".to_string()))?;
        let base = match irr {
            Irreducible::Prime(p) => {
                Poly::constant(field, &BigRational::from(BigInt::from(p.clone())))
            }
            Irreducible::Poly(p) => p.clone(),
        };
        let powed = base.pow(absn);
        if n.is_negative() {
            den = den.mul(&powed);
        } else {
            num = num.mul(&powed);
        }
    }
    Ok((num, den))
}

/// Substitutes constants for some variables and re-factors the result.
/// Factors that collapse to zero make the substitution undefined.
pub fn substitute_element(
    e: &MultElement,
    assignment: &BTreeMap<String, BigRational>,
) -> Result<MultElement, MfError> {
    let field = e.field;
    let mut bases: Vec<(Poly, i64)> = Vec::new();
    let mut constant = e.constant.clone();
    for (irr, exp) in &e.factors {
        if !exp.is_integer() {
            return Err(MfError::FractionalExponent);
        }
        let n: i64 = exp
            .num
            .to_string()
            .parse()
            .map_err(|_| MfError::Parse("exponent too large".to_string()))?;
        match irr {
            Irreducible::Prime(p) => {
                let base = BigRational::from(BigInt::from(p.clone()));
                let v = field.pow_int(&base, n).expect("prime is nonzero");
                constant = field.mul(&constant, &v);
            }
            Irreducible::Poly(poly) => {
                let sub = poly.eval_partial(assignment);
                if sub.is_zero() {
                    return Err(MfError::PlaceUndefined);
                }
                bases.push((sub, n));
            }
        }
    }
    factor_product(field, constant, &bases)
}

impl fmt::Display for MultElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_one() || self.factors.is_empty() {
            parts.push(if self.constant.denom().is_one() {
                self.constant.numer().to_string()
            } else {
                format!("{}/{}", self.constant.numer(), self.constant.denom())
            });
        }
        let p = self.field.p();
        for (irr, e) in &self.factors {
            let base = match irr {
                Irreducible::Prime(q) => q.to_string(),
                Irreducible::Poly(q) => format!("({q})"),
            };
            if e.is_integer() && e.num.is_one() {
                parts.push(base);
            } else if e.is_integer() {
                parts.push(format!("{base}^{}", e.num));
            } else {
                let den = BigInt::from(p).pow(e.p_pow);
                parts.push(format!("{base}^({}/{})", e.num, den));
            }
        }
        write!(f, "{}", parts.join("*"))
    }
}

// ---------------------------------------------------------------------------
// JSON: {"constant": "<rational>", "factors": [{"poly": "...", "exp": {...}}]}
// ---------------------------------------------------------------------------

impl MultElement {
    pub fn to_json(&self) -> serde_json::Value {
        let factors: Vec<serde_json::Value> = self
            .factors
            .iter()
            .map(|(irr, e)| {
                serde_json::json!({
                    "poly": irr.to_text(),
                    "exp": {"num": e.num.to_string(), "p_pow": e.p_pow},
                })
            })
            .collect();
        serde_json::json!({
            "constant": jsonio::rational_to_string(&self.constant),
            "factors": factors,
        })
    }

    pub fn from_json(value: &serde_json::Value, field: BaseField) -> Result<Self, MfError> {
        let obj = value.as_object().ok_or_else(|| {
            MfError::Parse("expected a JSON object for a factored element".to_string())
        })?;
        let constant = match obj.get("constant") {
            None => BigRational::one(),
            Some(serde_json::Value::String(s)) => {
                jsonio::parse_rational(s).map_err(MfError::Parse)?
            }
            Some(serde_json::Value::Number(n)) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| MfError::Parse("constant out of range".to_string()))?;
                BigRational::from(BigInt::from(i))
            }
            Some(other) => {
                return Err(MfError::Parse(format!("bad constant: {other}")));
            }
        };
        let mut factors: Vec<(Poly, i64)> = Vec::new();
        let mut fractional: Vec<(Poly, EpScalar)> = Vec::new();
        if let Some(list) = obj.get("factors") {
            let arr = list
                .as_array()
                .ok_or_else(|| MfError::Parse("factors must be an array".to_string()))?;
            for item in arr {
                let poly_text = item
                    .get("poly")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| MfError::Parse("factor needs a poly string".to_string()))?;
                let poly = poly::parse_poly(poly_text, field).map_err(MfError::Parse)?;
                let exp = match item.get("exp") {
                    None => EpScalar::one(),
                    Some(v) => parse_epscalar_json(v, field.chr())?,
                };
                if exp.is_integer() {
                    let n: i64 = exp.num.to_string().parse().map_err(|_| {
                        MfError::Parse("exponent too large".to_string())
                    })?;
                    factors.push((poly, n));
                } else {
                    fractional.push((poly, exp));
                }
            }
        }
        let mut elem = factor_product(field, constant, &factors)?;
        // Fractional exponents attach through pow_scalar on each base.
        for (poly, exp) in fractional {
            let base = factor_product(field, BigRational::one(), &[(poly, 1)])?;
            let powed = pow_scalar(&base, &exp)?;
            elem = combine(&elem, &powed, CombineOp::Multiply)?;
        }
        Ok(elem)
    }
}

fn parse_epscalar_json(
    v: &serde_json::Value,
    chr: Characteristic,
) -> Result<EpScalar, MfError> {
    if let Some(n) = v.as_i64() {
        return Ok(EpScalar::from_int(n));
    }
    if let Some(s) = v.as_str() {
        let q = jsonio::parse_rational(s).map_err(MfError::Parse)?;
        return EpScalar::from_rational(&q, chr)
            .map_err(|_| MfError::NotInEp(s.to_string()));
    }
    let obj = v
        .as_object()
        .ok_or_else(|| MfError::Parse("bad exponent".to_string()))?;
    let num = obj
        .get("num")
        .ok_or_else(|| MfError::Parse("exponent needs num".to_string()))?;
    let num = match num {
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| MfError::Parse(format!("bad exponent numerator: {e}")))?,
        serde_json::Value::Number(n) => BigInt::from(
            n.as_i64()
                .ok_or_else(|| MfError::Parse("exponent out of range".to_string()))?,
        ),
        other => return Err(MfError::Parse(format!("bad exponent numerator: {other}"))),
    };
    let p_pow = obj
        .get("p_pow")
        .and_then(|v| v.as_u64())
        .unwrap_or(0) as u32;
    if p_pow > 0 && chr.is_zero() {
        return Err(MfError::NotInEp(format!("{num}/p^{p_pow}")));
    }
    Ok(EpScalar::new(num, p_pow, chr))
}

// Re-exported helpers for sibling modules.
pub use crate::epmod::ExponentVector;

/// Coordinates of further elements in an existing hull context; None when a
/// row leaves the hull's rational span or needs a denominator.
pub fn coords_in_hull(
    hull: &HullModConstants,
    elems: &[MultElement],
) -> Result<Option<Vec<Vec<BigInt>>>, MfError> {
    let chr = hull.field.chr();
    // Extend rows over the hull's index; any factor outside the index makes
    // the element fall outside the hull.
    let mut rows = Vec::with_capacity(elems.len());
    for e in elems {
        if e.field != hull.field {
            return Err(MfError::FieldMismatch);
        }
        for irr in e.factors.keys() {
            if !hull.index.contains(irr) {
                return Ok(None);
            }
        }
        let scalars: Vec<EpScalar> = hull
            .index
            .iter()
            .map(|irr| e.factors.get(irr).cloned().unwrap_or_else(EpScalar::zero))
            .collect();
        let v = crate::epmod::ExponentVector(scalars);
        rows.push(v.clear_denominators(chr).0);
    }
    let pivots: Vec<usize> = (0..hull.hull.rank())
        .map(|i| {
            (0..hull.index.len())
                .find(|&j| !hull.hull.basis().at(i, j).is_zero())
                .expect("nonzero row")
        })
        .collect();
    let mut out = Vec::with_capacity(rows.len());
    for row in &rows {
        match crate::epmod::matrix::hnf_solve(hull.hull.basis(), &pivots, row) {
            Some(c) => out.push(c),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Verifies that the hull data indeed certifies m·hull ⊆ span and that no
/// proper divisor of m does, at the lattice level.
pub fn verify_m_minimal(hull: &HullModConstants) -> bool {
    let chr = hull.field.chr();
    let k = hull.index.len();
    let scale_contains = |m: &BigInt| -> bool {
        for i in 0..hull.hull.rank() {
            let row: Vec<BigInt> = hull.hull.basis().row(i).iter().map(|x| x * m).collect();
            let v = ExponentVector::from_bigints(row);
            if crate::epmod::member(&v, &hull.span).map_or(true, |r| r.is_none()) {
                return false;
            }
        }
        true
    };
    if !scale_contains(&hull.m) {
        return false;
    }
    let m = &hull.m;
    if m.is_one() {
        return true;
    }
    // Proper divisors via trial division.
    let mu = m.to_biguint().expect("positive");
    for (p, _) in trial_division(&mu) {
        let d = m / BigInt::from(p);
        if scale_contains(&d) {
            return false;
        }
    }
    let _ = (chr, k);
    true
}

pub fn snf_of_inclusion(hull: &HullModConstants) -> Vec<BigInt> {
    if hull.inclusion.is_empty() {
        return Vec::new();
    }
    let mat = IntMat::from_rows(hull.hull.rank(), hull.inclusion.clone());
    snf(&mat).invariants
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fact(field: BaseField, s: &str) -> MultElement {
        factor(field, s).unwrap()
    }

    #[test]
    fn factor_integer_prime_splitting() {
        let e = fact(BaseField::Q, "12");
        assert!(e.constant.is_one());
        let keys: Vec<String> = e.factors.keys().map(|k| k.to_text()).collect();
        assert_eq!(keys, vec!["2", "3"]);
        let exps: Vec<BigInt> = e.factors.values().map(|v| v.num.clone()).collect();
        assert_eq!(exps, vec![BigInt::from(2), BigInt::from(1)]);
    }

    #[test]
    fn factor_univariate_complete() {
        let e = fact(BaseField::Q, "t^2+2*t+1");
        assert_eq!(e.factors.len(), 1);
        let (irr, exp) = e.factors.iter().next().unwrap();
        assert_eq!(irr.to_text(), "t+1");
        assert_eq!(exp, &EpScalar::from_int(2));
        assert!(e.constant.is_one());
    }

    #[test]
    fn factor_char_two_quartic() {
        let f2 = BaseField::fp(2).unwrap();
        let e = fact(f2, "t^4+1");
        assert_eq!(e.factors.len(), 1);
        let (irr, exp) = e.factors.iter().next().unwrap();
        assert_eq!(irr.to_text(), "t+1");
        assert_eq!(exp, &EpScalar::from_int(4));
    }

    #[test]
    fn factor_rejects_zero_and_reducible_claims() {
        assert_eq!(factor(BaseField::Q, "0"), Err(MfError::ZeroInput));
        // x²−y² = (x+y)(x−y) must be caught by the conic check.
        assert!(matches!(
            factor(BaseField::Q, "x^2-y^2"),
            Err(MfError::ReducibleClaim(_))
        ));
        // x² + y² is irreducible over ℚ (degenerate conic, no rational lines).
        assert!(factor(BaseField::Q, "x^2+y^2").is_ok());
        // …but splits over F₅ as (x+2y)(x−2y).
        let f5 = BaseField::fp(5).unwrap();
        assert!(matches!(
            factor(f5, "x^2+y^2"),
            Err(MfError::ReducibleClaim(_))
        ));
        // xy + 1 passes the conic check in both characteristics.
        assert!(factor(BaseField::Q, "x*y+1").is_ok());
        assert!(factor(f5, "x*y+1").is_ok());
    }

    #[test]
    fn factor_detects_shared_factors() {
        // x·y + x = x(y+1) is a reducible bivariate quadratic.
        assert!(matches!(
            factor(BaseField::Q, "x*y+x"),
            Err(MfError::ReducibleClaim(_))
        ));
        // (x+1)(y+1) = xy+x+y+1: also caught by the exact quadratic check.
        assert!(matches!(
            factor(BaseField::Q, "x*y+x+y+1"),
            Err(MfError::ReducibleClaim(_))
        ));
        // Two trusted cubic claims sharing the factor x+y — written expanded
        // so each enters as a single base: (x+y)(xy+1) and (x+y)(xy+2). The
        // pairwise substitution certificate must report the common factor.
        assert!(matches!(
            factor(
                BaseField::Q,
                "(x^2*y+x*y^2+x+y) * (x^2*y+x*y^2+2*x+2*y)"
            ),
            Err(MfError::CommonFactor(_, _))
        ));
    }

    #[test]
    fn combine_examples() {
        let f = BaseField::Q;
        let t = fact(f, "t");
        let t2 = combine(&t, &t, CombineOp::Multiply).unwrap();
        assert_eq!(t2.factors.get(&Irreducible::Poly(poly::parse_poly("t", f).unwrap())),
            Some(&EpScalar::from_int(2)));

        let tt1 = fact(f, "t*(t+1)");
        let quot = combine(&tt1, &t, CombineOp::Divide).unwrap();
        assert_eq!(quot, fact(f, "t+1"));

        // (2t)·(3/t) with inert constants → constant 6, empty factors.
        let t_poly = Irreducible::Poly(poly::parse_poly("t", f).unwrap());
        let a = MultElement::from_parts(
            f,
            q(2, 1),
            vec![(t_poly.clone(), EpScalar::from_int(1))],
        )
        .unwrap();
        let b = MultElement::from_parts(
            f,
            q(3, 1),
            vec![(t_poly, EpScalar::from_int(-1))],
        )
        .unwrap();
        let prod = combine(&a, &b, CombineOp::Multiply).unwrap();
        assert_eq!(prod.constant, q(6, 1));
        assert!(prod.factors.is_empty());
    }

    #[test]
    fn pow_scalar_examples() {
        let f2 = BaseField::fp(2).unwrap();
        let chr2 = f2.chr();
        let t = fact(f2, "t");
        let half = EpScalar::new(BigInt::one(), 1, chr2);
        let root = pow_scalar(&t, &half).unwrap();
        let (_, e) = root.factors.iter().next().unwrap();
        assert_eq!(e, &half);
        // Round trip: (t^(1/2))^2 = t.
        let back = pow_scalar(&root, &EpScalar::from_int(2)).unwrap();
        assert_eq!(back, t);

        let f = BaseField::Q;
        let t0 = fact(f, "t");
        let cubed = pow_scalar(&t0, &EpScalar::from_int(3)).unwrap();
        assert_eq!(
            cubed.factors.values().next().unwrap(),
            &EpScalar::from_int(3)
        );
        // p = 0: 1/2 is not in E₀ at the scalar-construction boundary.
        assert!(EpScalar::from_rational(&q(1, 2), f.chr()).is_err());
    }

    #[test]
    fn exponent_matrix_examples() {
        let f = BaseField::Q;
        let ctx = exponent_matrix(&[fact(f, "t"), fact(f, "t+1")]).unwrap();
        assert_eq!(
            ctx.index.iter().map(|i| i.to_text()).collect::<Vec<_>>(),
            vec!["t", "t+1"]
        );
        let rows: Vec<Vec<BigInt>> = ctx
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.num.clone()).collect())
            .collect();
        assert_eq!(rows, vec![vec![BigInt::from(1), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]]);

        let ctx2 = exponent_matrix(&[fact(f, "t^2*(t+1)"), fact(f, "t*(t+1)")]).unwrap();
        let rows2: Vec<Vec<BigInt>> = ctx2
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.num.clone()).collect())
            .collect();
        assert_eq!(rows2, vec![vec![BigInt::from(2), BigInt::from(1)], vec![BigInt::from(1), BigInt::from(1)]]);

        let ctx3 = exponent_matrix(&[fact(f, "4/9"), fact(f, "8/27")]).unwrap();
        assert_eq!(
            ctx3.index.iter().map(|i| i.to_text()).collect::<Vec<_>>(),
            vec!["2", "3"]
        );
        let rows3: Vec<Vec<BigInt>> = ctx3
            .rows
            .iter()
            .map(|r| r.iter().map(|e| e.num.clone()).collect())
            .collect();
        assert_eq!(
            rows3,
            vec![
                vec![BigInt::from(2), BigInt::from(-2)],
                vec![BigInt::from(3), BigInt::from(-3)]
            ]
        );
    }

    #[test]
    fn independence_examples() {
        let f = BaseField::Q;
        assert!(independent_mod_constants(&[fact(f, "t"), fact(f, "t+1")]).unwrap());
        assert!(!independent_mod_constants(&[fact(f, "t^2"), fact(f, "t^3")]).unwrap());
        assert!(!independent_mod_constants(&[fact(f, "4/9"), fact(f, "8/27")]).unwrap());
        // Constants do not affect independence.
        assert!(independent_mod_constants(&[fact(f, "2t"), fact(f, "t+1")]).unwrap());
    }

    #[test]
    fn hull_examples() {
        let f = BaseField::Q;
        // (t²) → basis (t), E = [2], m = 2.
        let h = pure_hull_basis_mod_constants(&[fact(f, "t^2")]).unwrap();
        assert_eq!(h.basis_elements.len(), 1);
        assert_eq!(h.basis_elements[0], fact(f, "t"));
        assert_eq!(h.inclusion, vec![vec![BigInt::from(2)]]);
        assert_eq!(h.m, BigInt::from(2));
        assert!(verify_m_minimal(&h));

        // (t²(t+1), t(t+1)) → already saturated, m = 1.
        let h2 =
            pure_hull_basis_mod_constants(&[fact(f, "t^2*(t+1)"), fact(f, "t*(t+1)")])
                .unwrap();
        assert_eq!(h2.m, BigInt::one());
        assert_eq!(h2.hull.rank(), 2);
        assert_eq!(h2.index_product, BigInt::one());

        // p = 2: the invariant factor 2 is stripped as a unit.
        let f2 = BaseField::fp(2).unwrap();
        let h3 = pure_hull_basis_mod_constants(&[fact(f2, "t^2")]).unwrap();
        assert_eq!(h3.basis_elements[0], fact(f2, "t"));
        assert_eq!(h3.inclusion, vec![vec![BigInt::from(2)]]);
        assert_eq!(h3.m, BigInt::one());

        // Dependent input rejected by the strict entry point…
        assert_eq!(
            pure_hull_basis_mod_constants(&[fact(f, "4/9"), fact(f, "8/27")]).unwrap_err(),
            MfError::DependentInput
        );
        // …but handled by the lenient one: hull basis = class of 2/3.
        let h4 = hull_of_span_mod_constants(&[fact(f, "4/9"), fact(f, "8/27")]).unwrap();
        assert_eq!(h4.hull.rank(), 1);
        assert_eq!(h4.basis_elements[0], fact(f, "2/3"));
        assert_eq!(h4.invariant_factors, vec![BigInt::one()]);
        assert_eq!(h4.index_product, BigInt::one());
    }

    #[test]
    fn rationals_mod_torsion_examples() {
        let twelve = rationals_mod_torsion(&q(12, 1)).unwrap();
        assert_eq!(
            twelve,
            vec![
                (BigUint::from(2u32), BigInt::from(2)),
                (BigUint::from(3u32), BigInt::from(1))
            ]
        );
        let neg = rationals_mod_torsion(&q(-4, 9)).unwrap();
        assert_eq!(
            neg,
            vec![
                (BigUint::from(2u32), BigInt::from(2)),
                (BigUint::from(3u32), BigInt::from(-2))
            ]
        );
        assert!(rationals_mod_torsion(&q(1, 1)).unwrap().is_empty());
        assert!(rationals_mod_torsion(&q(-1, 1)).unwrap().is_empty());
        assert_eq!(rationals_mod_torsion(&q(0, 1)), Err(MfError::ZeroInput));
    }

    #[test]
    fn expansion_is_faithful() {
        let f = BaseField::Q;
        for src in ["t^2+2*t+1", "t^3-t", "2*t^2-2", "t^6-1"] {
            let input = poly::parse_poly(src, f).unwrap();
            let e = fact(f, src);
            let (num, den) = expand_numden(&e).unwrap();
            assert_eq!(den, Poly::one(f));
            assert_eq!(num, input, "{src}");
        }
        let f5 = BaseField::fp(5).unwrap();
        for src in ["t^2+4", "t^5-t", "3*t^2+3"] {
            let input = poly::parse_poly(src, f5).unwrap();
            let e = fact(f5, src);
            let (num, den) = expand_numden(&e).unwrap();
            assert_eq!(den, Poly::one(f5));
            assert_eq!(num, input, "{src}");
        }
    }

    #[test]
    fn substitution_refactors() {
        let f = BaseField::Q;
        let e = fact(f, "(x+y)^2*x");
        let mut asg = BTreeMap::new();
        asg.insert("y".to_string(), q(1, 1));
        let sub = substitute_element(&e, &asg).unwrap();
        assert_eq!(sub, fact(f, "(x+1)^2*x"));

        // Substituting y ↦ 0 into (x+y)²·x gives x³.
        let mut zero = BTreeMap::new();
        zero.insert("y".to_string(), q(0, 1));
        let sub0 = substitute_element(&e, &zero).unwrap();
        assert_eq!(sub0, fact(f, "x^3"));

        // y ↦ 0 into y is undefined.
        let y = fact(f, "y");
        assert_eq!(substitute_element(&y, &zero), Err(MfError::PlaceUndefined));
    }

    #[test]
    fn json_round_trip() {
        let f = BaseField::Q;
        let e = fact(f, "12*t^2*(t+1)^-3");
        let j = e.to_json();
        let back = MultElement::from_json(&j, f).unwrap();
        assert_eq!(back, e);

        let f2 = BaseField::fp(2).unwrap();
        let chr2 = f2.chr();
        let r = pow_scalar(&fact(f2, "t"), &EpScalar::new(BigInt::from(3), 1, chr2)).unwrap();
        let back2 = MultElement::from_json(&r.to_json(), f2).unwrap();
        assert_eq!(back2, r);
    }

    #[test]
    fn independence_constant_invariance() {
        let f = BaseField::Q;
        let elems = [fact(f, "t"), fact(f, "t+1"), fact(f, "t^2+1")];
        assert!(independent_mod_constants(&elems).unwrap());
        let scaled: Vec<MultElement> = elems
            .iter()
            .map(|e| {
                combine(
                    e,
                    &fact(f, "6"),
                    CombineOp::Multiply,
                )
                .unwrap()
            })
            .collect();
        assert!(independent_mod_constants(&scaled).unwrap());
    }
}
