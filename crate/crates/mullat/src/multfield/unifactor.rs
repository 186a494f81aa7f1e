//! Complete univariate polynomial factorization over ℚ and over prime
//! fields F_p.
//!
//! F_p: squarefree decomposition (with p-th-root descent for vanishing
//! derivatives), distinct-degree splitting, and Cantor–Zassenhaus
//! equal-degree splitting (trace map for p = 2).
//!
//! ℚ: denominators and content split off, Yun squarefree decomposition,
//! then per squarefree part: reduction at a good prime, modular
//! factorization, quadratic Hensel lifting past the Mignotte bound, and
//! subset recombination. Non-monic inputs are monicized by the classical
//! x ↦ x/lc substitution and mapped back.
//!
//! Polynomials are dense little-endian coefficient vectors without trailing
//! zeros.

use super::poly::BaseField;
use num::bigint::{BigInt, BigUint};
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// F_p dense polynomials: Vec<u64>, coefficients in [0, p).
// ---------------------------------------------------------------------------

fn fp_norm(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_deg(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: a^(p-2) mod p.
    let mut result = 1u64;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = mulmod(result, base, p);
        }
        base = mulmod(base, base, p);
        e >>= 1;
    }
    result
}

fn fp_add(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + y) % p;
    }
    fp_norm(out)
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = (x + p - y) % p;
    }
    fp_norm(out)
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(x, y, p)) % p;
        }
    }
    fp_norm(out)
}

fn fp_scale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    fp_norm(a.iter().map(|&x| mulmod(x, c, p)).collect())
}

fn fp_make_monic(a: &[u64], p: u64) -> Vec<u64> {
    match a.last() {
        None => Vec::new(),
        Some(&lc) => fp_scale(a, inv_mod(lc, p), p),
    }
}

/// Quotient and remainder by an arbitrary nonzero divisor.
fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let db = fp_deg(b).expect("division by zero polynomial");
    let lcinv = inv_mod(b[db], p);
    let mut rem = a.to_vec();
    let mut quo = vec![0u64; a.len().saturating_sub(db)];
    while let Some(dr) = fp_deg(&rem) {
        if dr < db {
            break;
        }
        let c = mulmod(rem[dr], lcinv, p);
        let shift = dr - db;
        quo[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            let sub = mulmod(c, bc, p);
            rem[shift + i] = (rem[shift + i] + p - sub) % p;
        }
        rem = fp_norm(rem);
    }
    (fp_norm(quo), rem)
}

fn fp_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    fp_divrem(a, b, p).1
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut x, mut y) = (a.to_vec(), b.to_vec());
    while !y.is_empty() {
        let r = fp_rem(&x, &y, p);
        x = std::mem::replace(&mut y, r);
    }
    fp_make_monic(&x, p)
}

/// Extended Euclid: returns (s, t) with s·a + t·b = 1; requires gcd = 1.
fn fp_xgcd_bezout(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
    let (mut s0, mut s1) = (vec![1u64], Vec::new());
    let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = fp_divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s2 = fp_sub(&s0, &fp_mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = fp_sub(&t0, &fp_mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t2);
    }
    assert_eq!(fp_deg(&r0), Some(0), "inputs not coprime");
    let inv = inv_mod(r0[0], p);
    (fp_scale(&s0, inv, p), fp_scale(&t0, inv, p))
}

fn fp_powmod(base: &[u64], exp: &BigUint, modulus: &[u64], p: u64) -> Vec<u64> {
    let mut result = vec![1u64];
    let mut b = fp_rem(base, modulus, p);
    for i in 0..exp.bits() {
        if exp.bit(i) {
            result = fp_rem(&fp_mul(&result, &b, p), modulus, p);
        }
        b = fp_rem(&fp_mul(&b, &b, p), modulus, p);
    }
    result
}

fn fp_derivative(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() - 1];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = mulmod(a[i + 1], ((i + 1) as u64) % p, p);
    }
    fp_norm(out)
}

/// p-th root of f(x) = g(x^p): over the prime field coefficients are
/// Frobenius-fixed, so the root just contracts exponents.
fn fp_pth_root(a: &[u64], p: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for (i, &c) in a.iter().enumerate() {
        if c != 0 {
            debug_assert_eq!(i % p as usize, 0, "not a p-th power");
        }
        if i % p as usize == 0 {
            out.push(c);
        }
    }
    fp_norm(out)
}

/// Squarefree decomposition of a monic polynomial: list of
/// (monic squarefree part, multiplicity), parts pairwise coprime.
fn fp_squarefree(f: &[u64], p: u64) -> Vec<(Vec<u64>, u32)> {
    if fp_deg(f).map_or(true, |d| d == 0) {
        return Vec::new();
    }
    let df = fp_derivative(f, p);
    if df.is_empty() {
        let root = fp_pth_root(f, p);
        return fp_squarefree(&root, p)
            .into_iter()
            .map(|(h, m)| (h, m * p as u32))
            .collect();
    }
    let mut parts = Vec::new();
    let mut c = fp_gcd(f, &df, p);
    let mut w = fp_divrem(f, &c, p).0;
    let mut i = 1u32;
    while fp_deg(&w) != Some(0) {
        let y = fp_gcd(&w, &c, p);
        let z = fp_divrem(&w, &y, p).0;
        if fp_deg(&z) != Some(0) {
            parts.push((fp_make_monic(&z, p), i));
        }
        w = y;
        c = fp_divrem(&c, &w, p).0;
        i += 1;
    }
    if fp_deg(&c) != Some(0) {
        let root = fp_pth_root(&c, p);
        for (h, m) in fp_squarefree(&root, p) {
            parts.push((h, m * p as u32));
        }
    }
    parts
}

/// Distinct-degree decomposition of a monic squarefree polynomial:
/// (product of all irreducible factors of degree d, d) pairs.
fn fp_distinct_degree(f: &[u64], p: u64) -> Vec<(Vec<u64>, usize)> {
    let mut out = Vec::new();
    let mut g = f.to_vec();
    let x = vec![0u64, 1];
    let mut h = fp_rem(&x, &g, p);
    let mut d = 0usize;
    while fp_deg(&g).map_or(false, |dg| dg >= 2 * (d + 1)) {
        d += 1;
        h = fp_powmod(&h, &BigUint::from(p), &g, p);
        let hx = fp_sub(&h, &x, p);
        let common = fp_gcd(&hx, &g, p);
        if fp_deg(&common).map_or(false, |dc| dc > 0) {
            out.push((common.clone(), d));
            g = fp_divrem(&g, &common, p).0;
            h = fp_rem(&h, &g, p);
        }
    }
    if let Some(dg) = fp_deg(&g) {
        if dg > 0 {
            out.push((g, dg));
        }
    }
    out
}

/// Cantor–Zassenhaus equal-degree splitting: f monic squarefree, all
/// irreducible factors of degree d.
fn fp_equal_degree(f: &[u64], d: usize, p: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<u64>> {
    let df = fp_deg(f).expect("nonzero");
    if df == d {
        return vec![f.to_vec()];
    }
    loop {
        let a: Vec<u64> = fp_norm((0..df).map(|_| rng.gen_range(0..p)).collect());
        if fp_deg(&a).map_or(true, |da| da == 0) {
            continue;
        }
        let b = if p == 2 {
            // Trace map over F_{2^d}: a + a² + a⁴ + … + a^{2^{d−1}}.
            let mut acc = Vec::new();
            let mut cur = fp_rem(&a, f, p);
            for _ in 0..d {
                acc = fp_add(&acc, &cur, p);
                cur = fp_rem(&fp_mul(&cur, &cur, p), f, p);
            }
            acc
        } else {
            let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
            let powed = fp_powmod(&a, &e, f, p);
            fp_sub(&powed, &[1], p)
        };
        let g = fp_gcd(&b, f, p);
        if let Some(dg) = fp_deg(&g) {
            if dg > 0 && dg < df {
                let rest = fp_divrem(f, &g, p).0;
                let mut out = fp_equal_degree(&g, d, p, rng);
                out.extend(fp_equal_degree(&rest, d, p, rng));
                return out;
            }
        }
    }
}

fn fp_factor(f: &[u64], p: u64, rng: &mut ChaCha8Rng) -> (u64, Vec<(Vec<u64>, u32)>) {
    let lc = *f.last().expect("nonzero input");
    let monic = fp_make_monic(f, p);
    let mut out: Vec<(Vec<u64>, u32)> = Vec::new();
    for (part, mult) in fp_squarefree(&monic, p) {
        for (prod, d) in fp_distinct_degree(&part, p) {
            for irr in fp_equal_degree(&prod, d, p, rng) {
                out.push((irr, mult));
            }
        }
    }
    out.sort();
    (lc, out)
}

// ---------------------------------------------------------------------------
// ℤ / ℚ dense polynomials.
// ---------------------------------------------------------------------------

fn z_norm(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().map_or(false, Zero::is_zero) {
        v.pop();
    }
    v
}

fn z_deg(a: &[BigInt]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn z_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    z_norm(out)
}

fn z_content(a: &[BigInt]) -> BigInt {
    a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
}

/// Exact division in ℤ[x]; None when the division has a remainder or a
/// non-integer quotient coefficient.
fn z_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let db = z_deg(b)?;
    let lc = &b[db];
    let mut rem = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = z_deg(&rem) {
        if dr < db {
            return None;
        }
        let (q, r) = rem[dr].div_rem(lc);
        if !r.is_zero() {
            return None;
        }
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            let sub = &q * bc;
            rem[shift + i] -= sub;
        }
        quo[shift] = q;
        rem = z_norm(rem);
    }
    Some(z_norm(quo))
}

fn q_to_z_clearing(a: &[BigRational]) -> (BigRational, Vec<BigInt>) {
    // a = scale · primitive with primitive ∈ ℤ[x], content 1, positive lc.
    let mut den = BigInt::one();
    for c in a {
        den = den.lcm(c.denom());
    }
    let ints: Vec<BigInt> = a.iter().map(|c| c.numer() * &den / c.denom()).collect();
    let ints = z_norm(ints);
    if ints.is_empty() {
        return (BigRational::zero(), ints);
    }
    let mut cont = z_content(&ints);
    if ints.last().expect("nonzero").is_negative() {
        cont = -cont;
    }
    let prim: Vec<BigInt> = ints.iter().map(|c| c / &cont).collect();
    (BigRational::new(cont, den), prim)
}

/// Monic gcd over ℚ by the Euclidean algorithm on rational coefficients.
fn q_gcd(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    fn q_norm(mut v: Vec<BigRational>) -> Vec<BigRational> {
        while v.last().map_or(false, Zero::is_zero) {
            v.pop();
        }
        v
    }
    fn q_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let db = b.len() - 1;
        let lc = b.last().expect("nonzero");
        let mut rem = a.to_vec();
        while rem.len() > db {
            let dr = rem.len() - 1;
            let c = &rem[dr] / lc;
            if !c.is_zero() {
                let shift = dr - db;
                for (i, bc) in b.iter().enumerate() {
                    let sub = &c * bc;
                    rem[shift + i] -= sub;
                }
            }
            rem.pop();
            while rem.last().map_or(false, Zero::is_zero) {
                rem.pop();
            }
            if rem.len() <= db {
                break;
            }
        }
        q_norm(rem)
    }
    let (mut x, mut y) = (q_norm(a.to_vec()), q_norm(b.to_vec()));
    while !y.is_empty() {
        let r = q_rem(&x, &y);
        x = std::mem::replace(&mut y, r);
    }
    if x.is_empty() {
        return x;
    }
    let lc = x.last().expect("nonzero").clone();
    x.iter().map(|c| c / &lc).collect()
}

fn z_to_q(a: &[BigInt]) -> Vec<BigRational> {
    a.iter().map(|c| BigRational::from(c.clone())).collect()
}

/// Primitive integer gcd of primitive integer polynomials.
fn z_gcd_primitive(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let g = q_gcd(&z_to_q(a), &z_to_q(b));
    if g.is_empty() {
        return Vec::new();
    }
    let (_, prim) = q_to_z_clearing(&g);
    prim
}

fn z_derivative(a: &[BigInt]) -> Vec<BigInt> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() - 1];
    for (i, slot) in out.iter_mut().enumerate() {
        *slot = &a[i + 1] * BigInt::from(i + 1);
    }
    z_norm(out)
}

fn z_sub_vec(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        *slot = x - y;
    }
    z_norm(out)
}

/// Yun's squarefree decomposition (characteristic 0) of a primitive
/// polynomial with positive leading coefficient: f = Π partᵢ^multᵢ with the
/// parts squarefree and pairwise coprime.
fn z_squarefree(f: &[BigInt]) -> Vec<(Vec<BigInt>, u32)> {
    if z_deg(f).map_or(true, |d| d == 0) {
        return Vec::new();
    }
    let df = z_derivative(f);
    let d = z_gcd_primitive(f, &df);
    let mut b = z_div_exact(f, &d).expect("gcd divides");
    let c = z_div_exact(&df, &d).expect("gcd divides");
    let mut w = z_sub_vec(&c, &z_derivative(&b));
    let mut parts = Vec::new();
    let mut i = 1u32;
    while z_deg(&b).map_or(false, |db| db > 0) {
        let g = z_gcd_primitive(&b, &w);
        if z_deg(&g).map_or(false, |dg| dg > 0) {
            parts.push((g.clone(), i));
        }
        b = z_div_exact(&b, &g).expect("factor divides");
        let c_next = z_div_exact(&w, &g).expect("factor divides");
        w = z_sub_vec(&c_next, &z_derivative(&b));
        i += 1;
    }
    parts
}

// ---- modular arithmetic mod m (BigInt), coefficients in [0, m) ----

fn m_red(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    z_norm(a.iter().map(|c| c.mod_floor(m)).collect())
}

fn m_mul(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    m_red(&z_mul(a, b), m)
}

fn m_add(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        *slot = (x + y).mod_floor(m);
    }
    z_norm(out)
}

fn m_sub(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let n = a.len().max(b.len());
    let mut out = vec![BigInt::zero(); n];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).cloned().unwrap_or_else(BigInt::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigInt::zero);
        *slot = (x - y).mod_floor(m);
    }
    z_norm(out)
}

fn bigint_inv_mod(a: &BigInt, m: &BigInt) -> BigInt {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut s0, mut s1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
    }
    assert!(r0.is_one(), "not invertible");
    s0.mod_floor(m)
}

/// Division with remainder by a monic divisor, coefficients mod m.
fn m_divrem_monic(a: &[BigInt], b: &[BigInt], m: &BigInt) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = z_deg(b).expect("monic divisor");
    debug_assert!(b[db].is_one());
    let mut rem = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len().saturating_sub(db)];
    while let Some(dr) = z_deg(&rem) {
        if dr < db {
            break;
        }
        let c = rem[dr].clone();
        let shift = dr - db;
        for (i, bc) in b.iter().enumerate() {
            let v = (&rem[shift + i] - &c * bc).mod_floor(m);
            rem[shift + i] = v;
        }
        quo[shift] = c;
        rem = z_norm(rem);
    }
    (m_red(&quo, m), rem)
}

fn symmetric_lift(a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let half = m / 2;
    z_norm(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(m);
                if r > half {
                    r - m
                } else {
                    r
                }
            })
            .collect(),
    )
}

/// Quadratic Hensel lift of the coprime monic pair (g₀, h₀) with
/// f ≡ g₀·h₀ (mod p) up to modulus ≥ target; returns monic (g, h) with
/// f ≡ g·h (mod target).
fn hensel_pair(
    f: &[BigInt],
    g0: &[u64],
    h0: &[u64],
    p: u64,
    target: &BigInt,
) -> (Vec<BigInt>, Vec<BigInt>) {
    let (s0, t0) = fp_xgcd_bezout(g0, h0, p);
    let to_z = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&c| BigInt::from(c)).collect() };
    let mut m = BigInt::from(p);
    let mut g = to_z(g0);
    let mut h = to_z(h0);
    let mut s = to_z(&s0);
    let mut t = to_z(&t0);
    while &m < target {
        let m2 = &m * &m;
        let e = m_sub(&m_red(f, &m2), &m_mul(&g, &h, &m2), &m2);
        let (q, r) = m_divrem_monic(&m_mul(&s, &e, &m2), &h, &m2);
        g = m_add(&g, &m_add(&m_mul(&t, &e, &m2), &m_mul(&q, &g, &m2), &m2), &m2);
        h = m_add(&h, &r, &m2);
        let b = m_sub(
            &m_add(&m_mul(&s, &g, &m2), &m_mul(&t, &h, &m2), &m2),
            &[BigInt::one()],
            &m2,
        );
        let (c, d) = m_divrem_monic(&m_mul(&s, &b, &m2), &h, &m2);
        s = m_sub(&s, &d, &m2);
        t = m_sub(&t, &m_add(&m_mul(&t, &b, &m2), &m_mul(&c, &g, &m2), &m2), &m2);
        m = m2;
    }
    // Re-normalize to the unique monic lifts mod target.
    let g = m_red(&g, target);
    let lc = g.last().expect("nonzero").clone();
    let g_monic = m_red(&m_mul(&g, &[bigint_inv_mod(&lc, target)], target), target);
    let (h_monic, rem) = m_divrem_monic(&m_red(f, target), &g_monic, target);
    debug_assert!(rem.is_empty(), "Hensel lift lost the factorization");
    (g_monic, h_monic)
}

/// Lifts a complete monic factorization of monic f from mod p to mod target
/// by peeling one factor at a time.
fn hensel_lift_list(
    f: &[BigInt],
    factors: &[Vec<u64>],
    p: u64,
    target: &BigInt,
) -> Vec<Vec<BigInt>> {
    let mut out = Vec::with_capacity(factors.len());
    let mut cur = m_red(f, target);
    for i in 0..factors.len() - 1 {
        let mut rest = vec![1u64];
        for fj in &factors[i + 1..] {
            rest = fp_mul(&rest, fj, p);
        }
        let (g, h) = hensel_pair(&cur, &factors[i], &rest, p, target);
        out.push(g);
        cur = h;
    }
    out.push(cur);
    out
}

fn is_small_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn z_to_fp(a: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    fp_norm(
        a.iter()
            .map(|c| {
                let r = c.mod_floor(&pb);
                r.to_string().parse::<u64>().expect("residue fits u64")
            })
            .collect(),
    )
}

/// Factors a monic squarefree polynomial over ℤ into monic irreducible
/// integer factors (Zassenhaus: good prime, CZ, Hensel, recombination).
fn factor_monic_squarefree_z(f: &[BigInt], rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let d = z_deg(f).expect("nonzero");
    if d <= 1 {
        return vec![f.to_vec()];
    }
    // Good prime: f stays squarefree mod p (monic, so the degree is stable).
    let mut p = 2u64;
    loop {
        if is_small_prime(p) {
            let fp = z_to_fp(f, p);
            if fp.len() == f.len() {
                let dfp = fp_derivative(&fp, p);
                if !dfp.is_empty() && fp_deg(&fp_gcd(&fp, &dfp, p)) == Some(0) {
                    break;
                }
            }
        }
        p += 1;
    }
    let fp = z_to_fp(f, p);
    let (_, modular) = fp_factor(&fp, p, rng);
    let modular: Vec<Vec<u64>> = modular.into_iter().map(|(g, _)| g).collect();
    if modular.len() == 1 {
        return vec![f.to_vec()];
    }
    // Mignotte-style bound: any monic factor has |coeff| ≤ 2^d · ‖f‖₂.
    let norm2_sq: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (BigInt::from(2).pow(d as u32)) * (norm2_sq.sqrt() + 1);
    let need = BigInt::from(2) * &bound + 1;
    let mut target = BigInt::from(p);
    while target < need {
        target = &target * p;
    }
    let lifted = hensel_lift_list(f, &modular, p, &target);

    // Subset recombination over the lifted modular factors.
    let mut remaining: Vec<Vec<BigInt>> = lifted;
    let mut current = f.to_vec();
    let mut out = Vec::new();
    let mut size = 1usize;
    'outer: while 2 * size <= remaining.len() {
        let idxs: Vec<usize> = (0..remaining.len()).collect();
        for combo in combinations(&idxs, size) {
            let mut cand = vec![BigInt::one()];
            for &i in &combo {
                cand = m_mul(&cand, &remaining[i], &target);
            }
            let cand = symmetric_lift(&cand, &target);
            if let Some(quo) = z_div_exact(&current, &cand) {
                out.push(cand);
                current = quo;
                let keep: Vec<Vec<BigInt>> = remaining
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !combo.contains(i))
                    .map(|(_, v)| v.clone())
                    .collect();
                remaining = keep;
                continue 'outer;
            }
        }
        size += 1;
    }
    if z_deg(&current).map_or(false, |dd| dd > 0) {
        out.push(current);
    }
    out
}

fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut combo: Vec<usize> = (0..k).collect();
    if k == 0 || k > items.len() {
        return out;
    }
    loop {
        out.push(combo.iter().map(|&i| items[i]).collect());
        // Next combination in lexicographic order.
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if combo[i] != i + items.len() - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

/// Factors a primitive squarefree polynomial with positive leading
/// coefficient into primitive irreducible factors with positive leading
/// coefficients, via monicization x ↦ x/lc.
fn factor_squarefree_primitive_z(f: &[BigInt], rng: &mut ChaCha8Rng) -> Vec<Vec<BigInt>> {
    let d = z_deg(f).expect("nonzero");
    if d <= 1 {
        return vec![f.to_vec()];
    }
    let lc = f.last().expect("nonzero").clone();
    if lc.is_one() {
        return factor_monic_squarefree_z(f, rng);
    }
    // F(x) = lc^(d−1) · f(x/lc) is monic with integer coefficients:
    // the x^i coefficient is f_i · lc^(d−1−i), and the top one is 1.
    let mut monic = vec![BigInt::zero(); d + 1];
    for (i, c) in f.iter().enumerate().take(d) {
        monic[i] = c * lc.pow((d - 1 - i) as u32);
    }
    monic[d] = BigInt::one();
    let factors = factor_monic_squarefree_z(&monic, rng);
    factors
        .into_iter()
        .map(|g| {
            // Map back: x ↦ lc·x, then take the primitive part.
            let mapped: Vec<BigInt> = g
                .iter()
                .enumerate()
                .map(|(i, c)| c * lc.pow(i as u32))
                .collect();
            let mapped = z_norm(mapped);
            let mut cont = z_content(&mapped);
            if mapped.last().expect("nonzero").is_negative() {
                cont = -cont;
            }
            mapped.iter().map(|c| c / &cont).collect()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Public interface.
// ---------------------------------------------------------------------------

/// Complete factorization of a nonzero univariate polynomial given as a
/// dense rational coefficient vector (degree 0 upward).
///
/// Returns (constant, factors) with input = constant · Π factorᵢ^multᵢ and
/// each factor canonical: over ℚ integer-primitive with positive leading
/// coefficient, over F_p monic.
pub fn factor_dense(
    field: BaseField,
    coeffs: &[BigRational],
    rng: &mut ChaCha8Rng,
) -> Result<(BigRational, Vec<(Vec<BigRational>, u32)>), String> {
    match field {
        BaseField::Q => {
            let (scale, prim) = q_to_z_clearing(coeffs);
            if prim.is_empty() {
                return Err("cannot factor the zero polynomial".to_string());
            }
            if z_deg(&prim) == Some(0) {
                return Ok((scale, Vec::new()));
            }
            let mut out = Vec::new();
            for (part, mult) in z_squarefree(&prim) {
                for irr in factor_squarefree_primitive_z(&part, rng) {
                    out.push((z_to_q(&irr), mult));
                }
            }
            out.sort_by(|a, b| (a.0.len(), &a.0, a.1).cmp(&(b.0.len(), &b.0, b.1)));
            Ok((scale, out))
        }
        BaseField::Fp(p) => {
            let reduced: Vec<u64> = coeffs
                .iter()
                .map(|c| {
                    let r = field.reduce(c);
                    r.numer().to_string().parse::<u64>().expect("residue fits u64")
                })
                .collect();
            let f = fp_norm(reduced);
            if f.is_empty() {
                return Err("cannot factor the zero polynomial".to_string());
            }
            if fp_deg(&f) == Some(0) {
                return Ok((BigRational::from(BigInt::from(f[0])), Vec::new()));
            }
            let (lc, factors) = fp_factor(&f, p, rng);
            let out = factors
                .into_iter()
                .map(|(g, m)| {
                    (
                        g.iter()
                            .map(|&c| BigRational::from(BigInt::from(c)))
                            .collect::<Vec<_>>(),
                        m,
                    )
                })
                .collect();
            Ok((BigRational::from(BigInt::from(lc)), out))
        }
    }
}

/// Monic gcd of two univariate dense polynomials over the field.
pub fn gcd_dense(
    field: BaseField,
    a: &[BigRational],
    b: &[BigRational],
) -> Vec<BigRational> {
    match field {
        BaseField::Q => q_gcd(a, b),
        BaseField::Fp(p) => {
            let fa = fp_norm(
                a.iter()
                    .map(|c| field.reduce(c).numer().to_string().parse::<u64>().unwrap())
                    .collect(),
            );
            let fb = fp_norm(
                b.iter()
                    .map(|c| field.reduce(c).numer().to_string().parse::<u64>().unwrap())
                    .collect(),
            );
            fp_gcd(&fa, &fb, p)
                .iter()
                .map(|&c| BigRational::from(BigInt::from(c)))
                .collect()
        }
    }
}

/// True when the polynomial is irreducible over the field (degree ≥ 1).
pub fn is_irreducible_dense(
    field: BaseField,
    coeffs: &[BigRational],
    rng: &mut ChaCha8Rng,
) -> bool {
    match factor_dense(field, coeffs, rng) {
        Ok((_, factors)) => {
            factors.len() == 1
                && factors[0].1 == 1
                && factors[0].0.len() == {
                    let mut n = coeffs.len();
                    while n > 0 && coeffs[n - 1].is_zero() {
                        n -= 1;
                    }
                    n
                }
        }
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed)
    }

    fn qv(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&c| BigRational::from(BigInt::from(c))).collect()
    }

    fn expand(field: BaseField, constant: &BigRational, factors: &[(Vec<BigRational>, u32)]) -> Vec<BigRational> {
        let mut acc = vec![constant.clone()];
        for (f, m) in factors {
            for _ in 0..*m {
                let mut next = vec![BigRational::zero(); acc.len() + f.len() - 1];
                for (i, a) in acc.iter().enumerate() {
                    for (j, b) in f.iter().enumerate() {
                        let prod = a * b;
                        next[i + j] = field.add(&next[i + j], &prod);
                    }
                }
                acc = next;
            }
        }
        while acc.last().map_or(false, Zero::is_zero) {
            acc.pop();
        }
        acc.iter().map(|c| field.reduce(c)).collect()
    }

    #[test]
    fn perfect_square_over_q() {
        let (c, f) = factor_dense(BaseField::Q, &qv(&[1, 2, 1]), &mut rng()).unwrap();
        assert!(c.is_one());
        assert_eq!(f, vec![(qv(&[1, 1]), 2)]);
    }

    #[test]
    fn char_two_quartic() {
        let f2 = BaseField::fp(2).unwrap();
        let (c, f) = factor_dense(f2, &qv(&[1, 0, 0, 0, 1]), &mut rng()).unwrap();
        assert!(c.is_one());
        assert_eq!(f, vec![(qv(&[1, 1]), 4)]);
    }

    #[test]
    fn integer_content_and_sign() {
        // −6t² + 6 = −6 (t−1)(t+1).
        let (c, f) = factor_dense(BaseField::Q, &qv(&[6, 0, -6]), &mut rng()).unwrap();
        assert_eq!(c, BigRational::from(BigInt::from(-6)));
        assert_eq!(f.len(), 2);
        assert_eq!(expand(BaseField::Q, &c, &f), qv(&[6, 0, -6]));
    }

    #[test]
    fn known_irreducibles() {
        // x⁴ + 1 over ℚ.
        assert!(is_irreducible_dense(BaseField::Q, &qv(&[1, 0, 0, 0, 1]), &mut rng()));
        // x² + 1 over F₅ splits (2² = −1).
        assert!(!is_irreducible_dense(BaseField::fp(5).unwrap(), &qv(&[1, 0, 1]), &mut rng()));
        // x² + 1 over F₇ stays irreducible.
        assert!(is_irreducible_dense(BaseField::fp(7).unwrap(), &qv(&[1, 0, 1]), &mut rng()));
        // x² − 2 over ℚ.
        assert!(is_irreducible_dense(BaseField::Q, &qv(&[-2, 0, 1]), &mut rng()));
    }

    #[test]
    fn non_monic_swinnerton_dyer_style() {
        // (2x+1)(3x−1)(x²+x+1): non-monic with an irreducible quadratic.
        let f = qv(&[-1, 0, 4, 11, 6]);
        // (2x+1)(3x−1) = 6x²+x−1; times (x²+x+1) = 6x⁴+7x³+6x²+0x−1… compute
        // directly instead of hand-expanding:
        let a = qv(&[1, 2]);
        let b = qv(&[-1, 3]);
        let c = qv(&[1, 1, 1]);
        let prod = expand(
            BaseField::Q,
            &BigRational::one(),
            &[(a.clone(), 1), (b.clone(), 1), (c.clone(), 1)],
        );
        let _ = f;
        let (cst, factors) = factor_dense(BaseField::Q, &prod, &mut rng()).unwrap();
        assert!(cst.is_one());
        let mut got: Vec<Vec<BigRational>> = factors.iter().map(|(g, _)| g.clone()).collect();
        got.sort_by_key(|g| (g.len(), format!("{g:?}")));
        let mut want = vec![a, b, c];
        want.sort_by_key(|g| (g.len(), format!("{g:?}")));
        assert_eq!(got, want);
    }

    #[test]
    fn random_products_round_trip_q() {
        let mut r = rng();
        let pool: Vec<Vec<BigRational>> = vec![
            qv(&[1, 1]),
            qv(&[-1, 1]),
            qv(&[2, 1]),
            qv(&[1, 2]),
            qv(&[1, 1, 1]),
            qv(&[-2, 0, 1]),
            qv(&[1, 0, 1]),
            qv(&[1, 3]),
        ];
        for _ in 0..30 {
            let k = r.gen_range(1..=3);
            let mut chosen: Vec<(Vec<BigRational>, u32)> = Vec::new();
            for _ in 0..k {
                let f = pool[r.gen_range(0..pool.len())].clone();
                let m = r.gen_range(1..=2);
                match chosen.iter_mut().find(|(g, _)| *g == f) {
                    Some((_, mm)) => *mm += m,
                    None => chosen.push((f, m)),
                }
            }
            let input = expand(BaseField::Q, &BigRational::one(), &chosen);
            let (c, factors) = factor_dense(BaseField::Q, &input, &mut r).unwrap();
            assert_eq!(expand(BaseField::Q, &c, &factors), input);
            let degsum: usize = factors.iter().map(|(g, m)| (g.len() - 1) * *m as usize).sum();
            assert_eq!(degsum, input.len() - 1);
            // All reported factors must be irreducible.
            for (g, _) in &factors {
                assert!(is_irreducible_dense(BaseField::Q, g, &mut r), "{g:?}");
            }
        }
    }

    #[test]
    fn random_products_round_trip_fp() {
        let mut r = rng();
        for p in [2u64, 3, 5, 13] {
            let field = BaseField::fp(p).unwrap();
            for _ in 0..20 {
                let deg = r.gen_range(1..=8);
                let mut coeffs: Vec<BigRational> = (0..=deg)
                    .map(|_| BigRational::from(BigInt::from(r.gen_range(0..p))))
                    .collect();
                if coeffs.last().map_or(true, Zero::is_zero) {
                    let d = coeffs.len() - 1;
                    coeffs[d] = BigRational::one();
                }
                if coeffs.iter().all(Zero::is_zero) {
                    continue;
                }
                let (c, factors) = factor_dense(field, &coeffs, &mut r).unwrap();
                let back = expand(field, &c, &factors);
                let reduced: Vec<BigRational> = coeffs.iter().map(|x| field.reduce(x)).collect();
                assert_eq!(back, reduced, "p={p} coeffs={coeffs:?}");
            }
        }
    }

    #[test]
    fn gcd_examples() {
        let g = gcd_dense(BaseField::Q, &qv(&[1, 2, 1]), &qv(&[1, 1]));
        assert_eq!(g, vec![BigRational::one(), BigRational::one()]);
        let g2 = gcd_dense(BaseField::Q, &qv(&[1, 0, 1]), &qv(&[1, 1]));
        assert_eq!(g2, vec![BigRational::one()]);
        let f3 = BaseField::fp(3).unwrap();
        let g3 = gcd_dense(f3, &qv(&[2, 2]), &qv(&[1, 1]));
        assert_eq!(g3, qv(&[1, 1]));
    }

    #[test]
    fn high_multiplicity_and_pth_powers() {
        // (t+1)^6 over F₃ exercises the p-th-root descent (6 = 2·3).
        let f3 = BaseField::fp(3).unwrap();
        let base = qv(&[1, 1]);
        let input = expand(f3, &BigRational::one(), &[(base.clone(), 6)]);
        let (c, factors) = factor_dense(f3, &input, &mut rng()).unwrap();
        assert!(c.is_one());
        assert_eq!(factors, vec![(base, 6)]);
    }
}
