//! Division systems below a tuple of multiplicative elements, the formal
//! rational-power calculus c^M, Kummer group computation, finite
//! determination constants, and twist realizability over ℤ/n.
//!
//! Roots of unity are never materialized: every root choice is carried as a
//! phase in ℚ/ℤ, and all Galois data is ℤ/n linear algebra.

use crate::epmod::matrix::{hnf, hnf_solve, row_kernel, snf, HnfResult, IntMat};
use crate::epmod::Characteristic;
use crate::multfield::{
    combine, hull_of_span_mod_constants, pow_scalar, CombineOp, HullModConstants, MfError,
    MultElement,
};
use crate::epmod::EpScalar;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum KumError {
    #[error("tuple is dependent modulo constants")]
    DependentInput,
    #[error("matrix shape does not match the tuple: {0}")]
    ShapeMismatch(String),
    #[error("level must be positive")]
    ZeroLevel,
    #[error("element error: {0}")]
    Element(#[from] MfError),
    #[error("exponent denominator {0} is not invertible in characteristic {1}")]
    BadDenominator(BigInt, u64),
}

/// A division system below a base tuple c = (c₁, …, c_k): one compatible
/// root chain per element. The chain is encoded by a fixed integer zᵢ per
/// element; the chosen n-th root of cᵢ is the reference root times the
/// phase (zᵢ mod n)/n ∈ ℚ/ℤ. Compatibility across levels — the n-th power
/// of the chosen nm-th root is the chosen m-th root — is automatic for this
/// encoding, and twist(1) = 0.
#[derive(Clone, Debug)]
pub struct DivisionSystemSpec {
    base: Vec<MultElement>,
    z: Vec<BigInt>,
}

impl DivisionSystemSpec {
    /// Deterministic system with twist integers drawn from a seeded stream.
    pub fn new(base: Vec<MultElement>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = (0..base.len()).map(|_| BigInt::from(rng.gen::<u64>() >> 1)).collect();
        DivisionSystemSpec { base, z }
    }

    /// System with explicitly chosen twist integers (tests, reference roots).
    pub fn with_twists(base: Vec<MultElement>, z: Vec<BigInt>) -> Result<Self, KumError> {
        if base.len() != z.len() {
            return Err(KumError::ShapeMismatch(format!(
                "{} base elements but {} twist integers",
                base.len(),
                z.len()
            )));
        }
        Ok(DivisionSystemSpec { base, z })
    }

    /// The reference system: all twists zero (every chosen root is the
    /// reference root itself).
    pub fn reference(base: Vec<MultElement>) -> Self {
        let z = vec![BigInt::zero(); base.len()];
        DivisionSystemSpec { base, z }
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn base(&self) -> &[MultElement] {
        &self.base
    }

    /// The level-n twist vector in (ℤ/n)^k.
    pub fn twist(&self, n: u64) -> Result<Vec<BigInt>, KumError> {
        if n == 0 {
            return Err(KumError::ZeroLevel);
        }
        let nn = BigInt::from(n);
        Ok(self.z.iter().map(|z| z.mod_floor(&nn)).collect())
    }
}

/// A formal power product Π cⱼ^{qⱼ} of the base tuple of a division system,
/// times the root-of-unity phase e^{2πi·unity} induced by the system's root
/// choices. Exponents are rational; the phase lives in ℚ/ℤ (kept in [0,1)).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FormalRadical {
    pub exponents: Vec<BigRational>,
    pub unity: BigRational,
}

fn frac_part(q: &BigRational) -> BigRational {
    let f = q - q.floor();
    debug_assert!(!f.is_negative() && f < BigRational::one());
    f
}

impl FormalRadical {
    /// The identity tuple: radical i is cᵢ itself.
    pub fn identity_tuple(k: usize) -> Vec<FormalRadical> {
        (0..k)
            .map(|i| {
                let mut exponents = vec![BigRational::zero(); k];
                exponents[i] = BigRational::one();
                FormalRadical { exponents, unity: BigRational::zero() }
            })
            .collect()
    }

    /// When every exponent is an integer and the phase vanishes, the radical
    /// is an honest element: realize it by combine/pow over the base tuple.
    pub fn realize_integer(&self, ds: &DivisionSystemSpec) -> Option<MultElement> {
        if !self.unity.is_zero() {
            return None;
        }
        let field = ds.base.first()?.field();
        let mut acc = MultElement::one(field);
        for (c, q) in ds.base.iter().zip(&self.exponents) {
            if !q.denom().is_one() {
                return None;
            }
            let e = EpScalar::from_int(q.numer().clone());
            let p = pow_scalar(c, &e).ok()?;
            acc = combine(&acc, &p, CombineOp::Multiply).ok()?;
        }
        Some(acc)
    }
}

fn check_denominator(q: &BigRational, chr: Characteristic) -> Result<(), KumError> {
    if !chr.is_zero() {
        let p = BigInt::from(chr.p());
        if (q.denom() % &p).is_zero() {
            return Err(KumError::BadDenominator(q.denom().clone(), chr.p()));
        }
    }
    Ok(())
}

/// Applies a rational l×k matrix M to a k-tuple of formal radicals over the
/// same division system: result_i = Π_t tuple_t^{M_it}, resolved through the
/// system's root choices. Exponent rows compose as M·Q; the phase of each
/// result is recomputed from its total exponents, which agrees with the
/// stepwise calculus because the root chains are compatible.
pub fn apply_matrix(
    ds: &DivisionSystemSpec,
    tuple: &[Vec<BigRational>],
    m: &[Vec<BigRational>],
) -> Result<Vec<FormalRadical>, KumError> {
    let k = ds.len();
    for row in tuple {
        if row.len() != k {
            return Err(KumError::ShapeMismatch(format!(
                "tuple row has {} exponents for a {}-element base",
                row.len(),
                k
            )));
        }
    }
    let chr = ds
        .base
        .first()
        .map(|e| e.field().chr())
        .unwrap_or(Characteristic::ZERO);
    let mut out = Vec::with_capacity(m.len());
    for mrow in m {
        if mrow.len() != tuple.len() {
            return Err(KumError::ShapeMismatch(format!(
                "matrix row has {} entries for a {}-tuple",
                mrow.len(),
                tuple.len()
            )));
        }
        let mut exponents = vec![BigRational::zero(); k];
        for (coef, trow) in mrow.iter().zip(tuple) {
            for (dst, q) in exponents.iter_mut().zip(trow) {
                *dst += coef * q;
            }
        }
        let mut unity = BigRational::zero();
        for (q, z) in exponents.iter().zip(&ds.z) {
            check_denominator(q, chr)?;
            unity += frac_part(&(q * BigRational::from(z.clone())));
        }
        out.push(FormalRadical { exponents, unity: frac_part(&unity) });
    }
    Ok(out)
}

/// c^M for a rational l×k matrix M over the base tuple of the system.
pub fn power_by_matrix(
    ds: &DivisionSystemSpec,
    m: &[Vec<BigRational>],
) -> Result<Vec<FormalRadical>, KumError> {
    let identity: Vec<Vec<BigRational>> = FormalRadical::identity_tuple(ds.len())
        .into_iter()
        .map(|r| r.exponents)
        .collect();
    apply_matrix(ds, &identity, m)
}

/// Invariants (elementary divisors, ascending divisibility chain) of the
/// Galois group of adjoining the n-th roots of the tuple.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KummerGroup {
    pub invariants: Vec<u64>,
}

impl KummerGroup {
    pub fn order(&self) -> u64 {
        self.invariants.iter().product()
    }
}

/// Strips the characteristic from a level: in characteristic p the p-part
/// of n is resolved inside the perfect closure, so level n reduces to its
/// p-free part.
pub fn effective_level(n: u64, chr: Characteristic) -> u64 {
    let mut n = n;
    if !chr.is_zero() {
        let p = chr.p();
        while n % p == 0 {
            n /= p;
        }
    }
    n
}

/// The group span(a)/(span(a) ∩ n·Γ) for a pure hull context Γ of the
/// tuple: the Galois group of the level-n Kummer extension below a.
///
/// In the Γ-basis the span is the row lattice of the inclusion matrix E and
/// Γ is ℤ^r, so the group is the subgroup generated by E's rows inside
/// (ℤ/ñ)^r, with ñ the p-free part of n.
pub fn kummer_group(
    a: &[MultElement],
    n: u64,
    gamma: &HullModConstants,
) -> Result<KummerGroup, KumError> {
    if n == 0 {
        return Err(KumError::ZeroLevel);
    }
    let chr = gamma.field.chr();
    let nn = effective_level(n, chr);
    let coords = crate::multfield::coords_in_hull(gamma, a)?
        .ok_or(KumError::ShapeMismatch("tuple does not lie in the hull context".to_string()))?;
    let r = gamma.hull.rank();
    // Independence of a mod constants ⟺ full row rank of the coordinates.
    let coord_mat = IntMat::from_rows(r, coords.clone());
    if hnf(&coord_mat).h.nrows() != a.len() {
        return Err(KumError::DependentInput);
    }
    Ok(subgroup_invariants(&coords, r, nn))
}

/// Invariants of the subgroup of (ℤ/n)^r generated by the given rows.
fn subgroup_invariants(rows: &[Vec<BigInt>], r: usize, n: u64) -> KummerGroup {
    if n == 1 || r == 0 {
        return KummerGroup { invariants: Vec::new() };
    }
    let nn = BigInt::from(n);
    // M = span(rows) + nℤ^r; the subgroup is M/nℤ^r.
    let mut stacked: Vec<Vec<BigInt>> = rows.to_vec();
    for i in 0..r {
        let mut e = vec![BigInt::zero(); r];
        e[i] = nn.clone();
        stacked.push(e);
    }
    let HnfResult { h, pivots } = hnf(&IntMat::from_rows(r, stacked));
    debug_assert_eq!(h.nrows(), r, "nℤ^r has full rank");
    // Express nℤ^r in the basis of M: C·B = n·I. Then M/nℤ^r ≅ ℤ^r/rowspan(C).
    let mut c_rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut target = vec![BigInt::zero(); r];
        target[i] = nn.clone();
        let coeffs = hnf_solve(&h, &pivots, &target).expect("n·e_i lies in M");
        c_rows.push(coeffs);
    }
    let inv = snf(&IntMat::from_rows(r, c_rows)).invariants;
    let invariants = inv
        .into_iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("divides the level"))
        .collect();
    KummerGroup { invariants }
}

/// The finite-determination constant of the pair of tuples: the least m ≥ 1
/// with m·Γ ⊆ span(a, b) for Γ the joint pure hull (p-free in positive
/// characteristic).
pub fn determination_constant(
    a: &[MultElement],
    b: &[MultElement],
) -> Result<(BigInt, HullModConstants), KumError> {
    let mut joint = a.to_vec();
    joint.extend(b.iter().cloned());
    if !crate::multfield::independent_mod_constants(&joint)? {
        return Err(KumError::DependentInput);
    }
    let hull = hull_of_span_mod_constants(&joint)?;
    Ok((hull.m.clone(), hull))
}

/// The subgroup of (ℤ/n)^{|b|} of realizable b-twists: images E_b·χ over
/// characters χ ∈ (ℤ/n)^r that fix the a-roots, i.e. E_a·χ ≡ 0 mod n.
#[derive(Clone, Debug)]
pub struct TwistSubgroup {
    pub n: u64,
    /// Full-rank lattice basis of the preimage of the subgroup in ℤ^{|b|}
    /// (contains n·ℤ^{|b|}); empty dimensions give a 0×0 basis.
    basis: IntMat,
    pivots: Vec<usize>,
}

impl TwistSubgroup {
    pub fn contains(&self, v: &[BigInt]) -> bool {
        if v.len() != self.basis.ncols() {
            return false;
        }
        hnf_solve(&self.basis, &self.pivots, v).is_some()
    }

    /// Generator rows reduced into [0, n), zero rows dropped.
    pub fn generators(&self) -> Vec<Vec<BigInt>> {
        let nn = BigInt::from(self.n);
        let mut out = Vec::new();
        for i in 0..self.basis.nrows() {
            let row: Vec<BigInt> =
                self.basis.row(i).iter().map(|x| x.mod_floor(&nn)).collect();
            if row.iter().any(|x| !x.is_zero()) {
                out.push(row);
            }
        }
        out
    }

    /// Order of the subgroup inside (ℤ/n)^{|b|}.
    pub fn order(&self) -> BigInt {
        let dim = self.basis.ncols() as u32;
        let mut det = BigInt::one();
        for i in 0..self.basis.nrows() {
            det *= self.basis.at(i, self.pivots[i]);
        }
        BigInt::from(self.n).pow(dim) / det
    }
}

/// Realizable twists of b given that the a-roots are fixed, at level n.
/// E_a (|a|×r) and E_b (|b|×r) express the tuples in a common Γ-basis.
pub fn realizable_twists(
    e_a: &[Vec<BigInt>],
    e_b: &[Vec<BigInt>],
    n: u64,
) -> Result<TwistSubgroup, KumError> {
    if n == 0 {
        return Err(KumError::ZeroLevel);
    }
    let r = e_a
        .first()
        .or_else(|| e_b.first())
        .map(|row| row.len())
        .unwrap_or(0);
    if e_a.iter().chain(e_b.iter()).any(|row| row.len() != r) {
        return Err(KumError::ShapeMismatch(
            "inclusion rows have inconsistent lengths".to_string(),
        ));
    }
    let nn = BigInt::from(n);
    // Solutions χ of E_a·χ ≡ 0 mod n: χ-parts of the row kernel of the
    // (r+|a|) × |a| matrix [E_aᵀ ; n·I].
    let mut rows: Vec<Vec<BigInt>> = (0..r)
        .map(|j| e_a.iter().map(|row| row[j].clone()).collect())
        .collect();
    for i in 0..e_a.len() {
        let mut e = vec![BigInt::zero(); e_a.len()];
        e[i] = nn.clone();
        rows.push(e);
    }
    let kernel = row_kernel(&IntMat::from_rows(e_a.len(), rows));
    // Twist images E_b·χ, plus n·ℤ^{|b|}.
    let bl = e_b.len();
    let mut gen_rows: Vec<Vec<BigInt>> = Vec::new();
    for t in 0..kernel.nrows() {
        let chi = &kernel.row(t)[..r];
        let img: Vec<BigInt> = e_b
            .iter()
            .map(|row| row.iter().zip(chi).map(|(a, b)| a * b).sum())
            .collect();
        gen_rows.push(img);
    }
    for i in 0..bl {
        let mut e = vec![BigInt::zero(); bl];
        e[i] = nn.clone();
        gen_rows.push(e);
    }
    let HnfResult { h, pivots } = hnf(&IntMat::from_rows(bl, gen_rows));
    debug_assert_eq!(h.nrows(), bl, "contains n·identity");
    Ok(TwistSubgroup { n, basis: h, pivots })
}

/// One level of a finite-determination report.
#[derive(Clone, Debug)]
pub struct LevelReport {
    pub n: u64,
    /// The p-free level actually computed.
    pub effective: u64,
    pub ok: bool,
    pub subgroup_gens: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug)]
pub struct DeterminationReport {
    pub m: BigInt,
    pub levels: Vec<LevelReport>,
}

impl DeterminationReport {
    pub fn all_ok(&self) -> bool {
        self.levels.iter().all(|l| l.ok)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "m": crate::jsonio::bigint_to_value(&self.m),
            "levels": self.levels.iter().map(|l| serde_json::json!({
                "n": l.n,
                "ok": l.ok,
                "subgroup_gens": l.subgroup_gens.iter().map(|row| {
                    row.iter().map(crate::jsonio::bigint_to_value).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Verifies finite determination level by level: m = determination constant
/// of (a, b); at every p-free level ñ ≤ n_max the coset block m·(ℤ/ñ)^{|b|}
/// must consist of realizable twists. The underlying theorem predicts every
/// level passes.
pub fn check_finite_determination(
    a: &[MultElement],
    b: &[MultElement],
    n_max: u64,
) -> Result<DeterminationReport, KumError> {
    let (m, hull) = determination_constant(a, b)?;
    let e_a: Vec<Vec<BigInt>> = hull.inclusion[..a.len()].to_vec();
    let e_b: Vec<Vec<BigInt>> = hull.inclusion[a.len()..].to_vec();
    let chr = hull.field.chr();
    let mut levels = Vec::new();
    for n in 1..=n_max {
        let nn = effective_level(n, chr);
        let sub = realizable_twists(&e_a, &e_b, nn)?;
        let mut ok = true;
        for i in 0..b.len() {
            let mut target = vec![BigInt::zero(); b.len()];
            target[i] = m.clone();
            if !sub.contains(&target) {
                ok = false;
                break;
            }
        }
        levels.push(LevelReport { n, effective: nn, ok, subgroup_gens: sub.generators() });
    }
    Ok(DeterminationReport { m, levels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfield::{factor, pure_hull_basis_mod_constants, BaseField};

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fact(field: BaseField, s: &str) -> MultElement {
        factor(field, s).unwrap()
    }

    fn bi(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn qm(rows: &[&[(i64, i64)]]) -> Vec<Vec<BigRational>> {
        rows.iter().map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect()
    }

    #[test]
    fn twists_are_compatible_across_levels() {
        let f = BaseField::Q;
        let ds = DivisionSystemSpec::new(vec![fact(f, "t"), fact(f, "t+1")], 7);
        assert_eq!(ds.twist(1).unwrap(), vec![BigInt::zero(), BigInt::zero()]);
        for n in 1..=24u64 {
            let tn = ds.twist(n).unwrap();
            for d in 1..=n {
                if n % d != 0 {
                    continue;
                }
                let td = ds.twist(d).unwrap();
                let dd = BigInt::from(d);
                for (a, b) in tn.iter().zip(&td) {
                    assert_eq!(a.mod_floor(&dd), *b);
                }
            }
        }
    }

    #[test]
    fn power_by_matrix_examples() {
        let f = BaseField::Q;
        let base = vec![fact(f, "t"), fact(f, "t+1")];
        let ds = DivisionSystemSpec::new(base.clone(), 3);

        // Identity matrix: the base tuple unchanged.
        let id = qm(&[&[(1, 1), (0, 1)], &[(0, 1), (1, 1)]]);
        let out = power_by_matrix(&ds, &id).unwrap();
        for (i, r) in out.iter().enumerate() {
            assert!(r.unity.is_zero());
            assert_eq!(r.realize_integer(&ds).unwrap(), base[i]);
        }

        // c = (t), M = [2] → t².
        let ds1 = DivisionSystemSpec::new(vec![fact(f, "t")], 5);
        let sq = power_by_matrix(&ds1, &qm(&[&[(2, 1)]])).unwrap();
        assert_eq!(sq[0].realize_integer(&ds1).unwrap(), fact(f, "t^2"));

        // c = (t, t+1), M = [[1/2, 0]] with twist 0 → the reference t^{1/2}.
        let ref_ds = DivisionSystemSpec::reference(base);
        let half = power_by_matrix(&ref_ds, &qm(&[&[(1, 2), (0, 1)]])).unwrap();
        assert_eq!(half[0].exponents, vec![q(1, 2), q(0, 1)]);
        assert!(half[0].unity.is_zero());
        // A nonzero twist shows up as a phase.
        let tw_ds = DivisionSystemSpec::with_twists(
            vec![fact(f, "t"), fact(f, "t+1")],
            vec![BigInt::from(1), BigInt::zero()],
        )
        .unwrap();
        let tw = power_by_matrix(&tw_ds, &qm(&[&[(1, 2), (0, 1)]])).unwrap();
        assert_eq!(tw[0].unity, q(1, 2));
    }

    #[test]
    fn matrix_then_inverse_is_identity_on_exponents() {
        let f = BaseField::Q;
        let ds = DivisionSystemSpec::new(vec![fact(f, "t"), fact(f, "t+1")], 11);
        // Unimodular M and its inverse.
        let m = qm(&[&[(2, 1), (1, 1)], &[(1, 1), (1, 1)]]);
        let m_inv = qm(&[&[(1, 1), (-1, 1)], &[(-1, 1), (2, 1)]]);
        let first = power_by_matrix(&ds, &m).unwrap();
        let rows: Vec<Vec<BigRational>> = first.iter().map(|r| r.exponents.clone()).collect();
        let back = apply_matrix(&ds, &rows, &m_inv).unwrap();
        let id = FormalRadical::identity_tuple(2);
        for (got, want) in back.iter().zip(&id) {
            assert_eq!(got.exponents, want.exponents);
            assert!(got.unity.is_zero());
        }
    }

    #[test]
    fn kummer_group_examples() {
        let f = BaseField::Q;
        // a = (t): (ℤ/5) at level 5.
        let a = vec![fact(f, "t")];
        let gamma = pure_hull_basis_mod_constants(&a).unwrap();
        let g = kummer_group(&a, 5, &gamma).unwrap();
        assert_eq!(g.invariants, vec![5]);

        // a = (t²): level 2 gives the trivial group — t is already present.
        let a2 = vec![fact(f, "t^2")];
        let gamma2 = pure_hull_basis_mod_constants(&a2).unwrap();
        let g2 = kummer_group(&a2, 2, &gamma2).unwrap();
        assert!(g2.invariants.is_empty());

        // a = (t, t+1): level 6 gives (ℤ/6)².
        let a3 = vec![fact(f, "t"), fact(f, "t+1")];
        let gamma3 = pure_hull_basis_mod_constants(&a3).unwrap();
        let g3 = kummer_group(&a3, 6, &gamma3).unwrap();
        assert_eq!(g3.invariants, vec![6, 6]);
    }

    #[test]
    fn kummer_group_invariants_divide_the_level() {
        let f = BaseField::Q;
        let tuples: Vec<Vec<MultElement>> = vec![
            vec![fact(f, "t")],
            vec![fact(f, "t^2")],
            vec![fact(f, "t^2*(t+1)^3")],
            vec![fact(f, "t^2"), fact(f, "t*(t+1)")],
            vec![fact(f, "t"), fact(f, "t+1"), fact(f, "t^2+1")],
        ];
        for a in &tuples {
            let gamma = pure_hull_basis_mod_constants(a).unwrap();
            let mut full_at_every_level = true;
            for n in 1..=12u64 {
                let g = kummer_group(a, n, &gamma).unwrap();
                let mut prod = 1u64;
                for (i, d) in g.invariants.iter().enumerate() {
                    assert_eq!(n % d, 0, "invariant {d} divides {n}");
                    if i > 0 {
                        assert_eq!(d % g.invariants[i - 1], 0, "divisibility chain");
                    }
                    prod *= d;
                }
                let full = n.pow(a.len() as u32);
                assert_eq!(full % prod, 0, "order divides n^|a|");
                if prod != full {
                    full_at_every_level = false;
                }
            }
            // Full order at every level ⟺ the span is pure in its hull.
            assert_eq!(full_at_every_level, gamma.m.is_one());
        }
    }

    #[test]
    fn kummer_group_strips_the_characteristic() {
        let f2 = BaseField::fp(2).unwrap();
        let a = vec![fact(f2, "t")];
        let gamma = pure_hull_basis_mod_constants(&a).unwrap();
        // Level 8 = 2³ is entirely absorbed by the perfect closure.
        assert!(kummer_group(&a, 8, &gamma).unwrap().invariants.is_empty());
        // Level 12 reduces to level 3.
        assert_eq!(kummer_group(&a, 12, &gamma).unwrap().invariants, vec![3]);
    }

    #[test]
    fn kummer_group_rejects_dependent_tuples() {
        let f = BaseField::Q;
        let a = vec![fact(f, "t"), fact(f, "t^2")];
        let joint = hull_of_span_mod_constants(&a).unwrap();
        assert_eq!(kummer_group(&a, 5, &joint), Err(KumError::DependentInput));
    }

    #[test]
    fn determination_constant_examples() {
        let f = BaseField::Q;
        let (m, _) =
            determination_constant(&[fact(f, "t")], &[fact(f, "t+1")]).unwrap();
        assert_eq!(m, BigInt::one());

        let (m2, _) =
            determination_constant(&[fact(f, "t")], &[fact(f, "(t+1)^2")]).unwrap();
        assert_eq!(m2, BigInt::from(2));

        let f2 = BaseField::fp(2).unwrap();
        let (m3, _) =
            determination_constant(&[fact(f2, "t")], &[fact(f2, "(t+1)^2")]).unwrap();
        assert_eq!(m3, BigInt::one());

        assert!(matches!(
            determination_constant(&[fact(f, "t")], &[fact(f, "t^2")]),
            Err(KumError::DependentInput)
        ));
    }

    #[test]
    fn realizable_twists_examples() {
        // No a constraints, E_b = identity → the full group.
        let full = realizable_twists(&bi(&[]), &bi(&[&[1, 0], &[0, 1]]), 6).unwrap();
        assert!(full.contains(&[BigInt::from(1), BigInt::from(0)]));
        assert!(full.contains(&[BigInt::from(0), BigInt::from(1)]));
        assert_eq!(full.order(), BigInt::from(36));

        // All of Γ pinned → trivial subgroup.
        let pinned =
            realizable_twists(&bi(&[&[1, 0], &[0, 1]]), &bi(&[&[1, 1]]), 6).unwrap();
        assert!(pinned.contains(&[BigInt::from(0)]));
        assert!(!pinned.contains(&[BigInt::from(1)]));
        assert!(pinned.generators().is_empty());

        // E_a = [1,0], E_b = [0,2], n = 4 → exactly {0, 2}.
        let sub = realizable_twists(&bi(&[&[1, 0]]), &bi(&[&[0, 2]]), 4).unwrap();
        assert!(sub.contains(&[BigInt::from(0)]));
        assert!(sub.contains(&[BigInt::from(2)]));
        assert!(!sub.contains(&[BigInt::from(1)]));
        assert!(!sub.contains(&[BigInt::from(3)]));
        assert_eq!(sub.generators(), bi(&[&[2]]));
    }

    #[test]
    fn realizable_twists_reduce_compatibly() {
        // For d | n the image of the level-n subgroup lies in the level-d one.
        let e_a = bi(&[&[2, 0, 1], &[0, 3, -1]]);
        let e_b = bi(&[&[1, 1, 0], &[0, 1, 2]]);
        for n in [4u64, 6, 12, 18, 24] {
            let sn = realizable_twists(&e_a, &e_b, n).unwrap();
            for d in [2u64, 3, 6] {
                if n % d != 0 {
                    continue;
                }
                let sd = realizable_twists(&e_a, &e_b, d).unwrap();
                for g in sn.generators() {
                    assert!(sd.contains(&g), "level {n} generator maps into level {d}");
                }
            }
        }
    }

    #[test]
    fn twist_subgroup_is_a_subgroup() {
        let e_a = bi(&[&[1, 2]]);
        let e_b = bi(&[&[3, 1], &[0, 2]]);
        let s = realizable_twists(&e_a, &e_b, 12).unwrap();
        let gens = s.generators();
        // Closure under addition and negation of generators.
        for g in &gens {
            let neg: Vec<BigInt> = g.iter().map(|x| -x).collect();
            assert!(s.contains(&neg));
            for h in &gens {
                let sum: Vec<BigInt> = g.iter().zip(h).map(|(a, b)| a + b).collect();
                assert!(s.contains(&sum));
            }
        }
        assert!(s.contains(&[BigInt::zero(), BigInt::zero()]));
    }

    #[test]
    fn finite_determination_examples() {
        let f = BaseField::Q;
        let report =
            check_finite_determination(&[fact(f, "t")], &[fact(f, "t+1")], 12).unwrap();
        assert_eq!(report.m, BigInt::one());
        assert!(report.all_ok());

        let report2 =
            check_finite_determination(&[fact(f, "t")], &[fact(f, "(t+1)^2")], 12)
                .unwrap();
        assert_eq!(report2.m, BigInt::from(2));
        assert!(report2.all_ok());
        // At level 4 the realizable twists contain {0, 2}.
        let l4 = &report2.levels[3];
        assert_eq!(l4.n, 4);
        let sub = realizable_twists(
            &bi(&[&[1, 0]]),
            &bi(&[&[0, 2]]),
            4,
        )
        .unwrap();
        assert!(sub.contains(&[BigInt::from(2)]));

        // Empty b passes vacuously.
        let report3 = check_finite_determination(&[fact(f, "t")], &[], 6).unwrap();
        assert!(report3.all_ok());

        // JSON shape.
        let j = report2.to_json();
        assert_eq!(j["m"], serde_json::json!(2));
        assert_eq!(j["levels"].as_array().unwrap().len(), 12);
        assert_eq!(j["levels"][3]["n"], serde_json::json!(4));
        assert_eq!(j["levels"][3]["ok"], serde_json::json!(true));
    }

    #[test]
    fn finite_determination_in_characteristic_p() {
        let f3 = BaseField::fp(3).unwrap();
        let report = check_finite_determination(
            &[fact(f3, "t")],
            &[fact(f3, "(t+1)^3*(t+2)")],
            15,
        )
        .unwrap();
        // The exponent 3 on t+1 is a unit in E₃, so the hull inflation it
        // would cause in characteristic 0 disappears here.
        assert!(report.all_ok());
        for l in &report.levels {
            assert!(l.effective % 3 != 0, "levels are taken coprime to p");
        }
    }
}
