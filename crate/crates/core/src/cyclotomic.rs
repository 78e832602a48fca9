//! Exact arithmetic in cyclotomic fields `Q(zeta_m)`.
//!
//! A [`CycNum`] is an element of `Q(zeta_m)` stored as a vector of rational
//! coordinates over the power basis `1, zeta, ..., zeta^{phi(m)-1}`, where
//! `zeta = zeta_m = exp(2*pi*i/m)` and `phi` is Euler's totient. Reduction
//! data for each order (the cyclotomic polynomial `Phi_m` and the rows
//! expressing `X^{phi}, ..., X^{2*phi-2}` in the power basis) is computed
//! once per order and cached process-wide.
//!
//! Orders are kept canonical: since `Q(zeta_{2k}) = Q(zeta_k)` for odd `k`,
//! an element never carries an order `m ≡ 2 (mod 4)`; the sign is folded
//! into the coordinates instead (`zeta_{2k} = -zeta_k^{(k+1)/2}`). Roots of
//! unity are likewise stored at their exact order. Elements of different
//! orders can be combined freely; they are promoted to the compositum
//! `Q(zeta_lcm)` on demand.
//!
//! Equality comes in two flavours. The derived `PartialEq`/`Ord`/`Hash` are
//! *representation* equality (same order, same coordinates) so that
//! `CycNum` can serve as an ordered map key; [`CycNum::same_value`] is
//! mathematical equality across orders.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::{rat, Rat};

/// Euler's totient of `m`.
pub fn euler_phi(m: u64) -> u64 {
    let mut n = m;
    let mut result = m;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Prime factorisation of `m` by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut m: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            let mut e = 0;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if m > 1 {
        out.push((m, 1));
    }
    out
}

/// All positive divisors of `m`, unsorted.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(m) {
        let prev = out.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            out.extend(prev.iter().map(|d| d * pk));
        }
    }
    out
}

/// Möbius function.
pub fn moebius(m: u64) -> i64 {
    let fac = factorize(m);
    if fac.iter().any(|&(_, e)| e > 1) {
        0
    } else if fac.len() % 2 == 0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Integer polynomial helpers (dense, constant term first).
// ---------------------------------------------------------------------------

fn zpoly_trim(a: &mut Vec<BigInt>) {
    while a.len() > 1 && a.last().map_or(false, |c| c.is_zero()) {
        a.pop();
    }
}

fn zpoly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

/// Exact division of integer polynomials; panics if the division is inexact
/// (it never is for cyclotomic-polynomial construction).
fn zpoly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem: Vec<BigInt> = num.to_vec();
    zpoly_trim(&mut rem);
    let mut den = den.to_vec();
    zpoly_trim(&mut den);
    let dl = den.len();
    assert!(dl >= 1 && !den[dl - 1].is_zero());
    if rem.len() < dl {
        assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
        return vec![BigInt::zero()];
    }
    let mut quot = vec![BigInt::zero(); rem.len() - dl + 1];
    for k in (0..quot.len()).rev() {
        let lead = rem[k + dl - 1].clone();
        let (q, r) = lead.div_rem(&den[dl - 1]);
        assert!(r.is_zero(), "inexact polynomial division");
        if !q.is_zero() {
            for j in 0..dl {
                let t = &q * &den[j];
                rem[k + j] -= t;
            }
        }
        quot[k] = q;
    }
    assert!(rem.iter().all(|c| c.is_zero()), "inexact polynomial division");
    quot
}

/// The `m`-th cyclotomic polynomial as integer coefficients, constant first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<BigInt> {
    if m == 1 {
        // X - 1
        return vec![-BigInt::one(), BigInt::one()];
    }
    // Phi_m(X) = prod_{d | m} (X^{m/d} - 1)^{mu(d)}
    let mut num: Vec<BigInt> = vec![BigInt::one()];
    let mut den: Vec<BigInt> = vec![BigInt::one()];
    for d in divisors(m) {
        let mu = moebius(d);
        if mu == 0 {
            continue;
        }
        let deg = (m / d) as usize;
        let mut f = vec![BigInt::zero(); deg + 1];
        f[0] = -BigInt::one();
        f[deg] = BigInt::one();
        if mu == 1 {
            num = zpoly_mul(&num, &f);
        } else {
            den = zpoly_mul(&den, &f);
        }
    }
    zpoly_div_exact(&num, &den)
}

// ---------------------------------------------------------------------------
// Cached per-order reduction data.
// ---------------------------------------------------------------------------

/// Reduction data for one cyclotomic order `m`: the minimal polynomial of
/// `zeta_m` and the rows rewriting `X^{phi+j}` over the power basis.
pub struct CycField {
    m: u64,
    phi: usize,
    /// `Phi_m`, monic, constant term first, length `phi + 1`.
    minimal_poly: Vec<BigInt>,
    /// `reduction_rows[j]` expresses `X^{phi+j} mod Phi_m` over the power
    /// basis, for `j = 0 .. phi-2`.
    reduction_rows: Vec<Vec<BigInt>>,
}

impl CycField {
    fn new(m: u64) -> Self {
        assert!(is_canonical_order(m), "non-canonical cyclotomic order {m}");
        let minimal_poly = cyclotomic_polynomial(m);
        let phi = minimal_poly.len() - 1;
        // X^phi = -(c_0 + c_1 X + ... + c_{phi-1} X^{phi-1})
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        if phi >= 1 {
            let base: Vec<BigInt> = (0..phi).map(|i| -&minimal_poly[i]).collect();
            rows.push(base);
            for j in 1..phi.saturating_sub(1) {
                // X^{phi+j} = X * X^{phi+j-1}
                let prev = rows[j - 1].clone();
                let mut next = vec![BigInt::zero(); phi];
                // shift up by one
                for i in 0..phi - 1 {
                    next[i + 1] = prev[i].clone();
                }
                // the overflowing X^phi term folds through rows[0]
                let top = prev[phi - 1].clone();
                if !top.is_zero() {
                    for i in 0..phi {
                        let t = &top * &rows[0][i];
                        next[i] += t;
                    }
                }
                rows.push(next);
            }
        }
        CycField { m, phi, minimal_poly: minimal_poly.clone(), reduction_rows: rows }
    }

    /// The order `m` of this field's root of unity.
    pub fn order(&self) -> u64 {
        self.m
    }

    /// Degree `phi(m)` of the field over the rationals.
    pub fn degree(&self) -> usize {
        self.phi
    }

    /// The minimal polynomial `Phi_m` (constant term first, monic).
    pub fn minimal_polynomial(&self) -> &[BigInt] {
        &self.minimal_poly
    }
}

fn registry() -> &'static Mutex<HashMap<u64, Arc<CycField>>> {
    static REG: OnceLock<Mutex<HashMap<u64, Arc<CycField>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Fetch (or build and cache) the reduction data for order `m`.
pub fn cyc_field(m: u64) -> Arc<CycField> {
    let mut reg = registry().lock().expect("cyclotomic registry poisoned");
    reg.entry(m).or_insert_with(|| Arc::new(CycField::new(m))).clone()
}

/// Canonical orders are `1` and every `m >= 3` with `m ≢ 2 (mod 4)`.
pub fn is_canonical_order(m: u64) -> bool {
    m == 1 || (m >= 3 && m % 4 != 2)
}

// ---------------------------------------------------------------------------
// CycNum
// ---------------------------------------------------------------------------

/// An element of `Q(zeta_m)` over the power basis of a canonical order `m`.
///
/// The derived comparison traits are *representation*-based; use
/// [`CycNum::same_value`] for mathematical equality across orders.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CycNum {
    m: u64,
    coeffs: Vec<Rat>,
}

impl CycNum {
    /// The zero element (of `Q`).
    pub fn zero() -> Self {
        CycNum { m: 1, coeffs: vec![Rat::zero()] }
    }

    /// The unit element (of `Q`).
    pub fn one() -> Self {
        CycNum { m: 1, coeffs: vec![Rat::one()] }
    }

    /// A rational number as a cyclotomic element.
    pub fn from_rat(r: Rat) -> Self {
        CycNum { m: 1, coeffs: vec![r] }
    }

    /// An integer as a cyclotomic element.
    pub fn from_int(n: i64) -> Self {
        Self::from_rat(rat(n))
    }

    /// The root of unity `zeta_m^e`, stored at its exact (canonical) order.
    pub fn root_of_unity(m: u64, e: i64) -> Self {
        assert!(m >= 1, "root of unity needs positive order");
        let e = e.rem_euclid(m as i64) as u64;
        if e == 0 {
            return Self::one();
        }
        // exact order
        let g = gcd_u64(m, e);
        let mut m2 = m / g;
        let mut e2 = e / g;
        let mut sign = false;
        if m2 % 4 == 2 {
            // zeta_{2k} = -zeta_k^{(k+1)/2} for odd k
            let k = m2 / 2;
            if e2 % 2 == 1 {
                sign = !sign;
            }
            e2 = mulmod_u64(e2 % k, (k + 1) / 2, k);
            m2 = k;
            if e2 == 0 {
                let v = if sign { -Rat::one() } else { Rat::one() };
                return CycNum { m: 1, coeffs: vec![v] };
            }
            let g2 = gcd_u64(m2, e2);
            m2 /= g2;
            e2 /= g2;
        }
        if m2 == 1 {
            let v = if sign { -Rat::one() } else { Rat::one() };
            return CycNum { m: 1, coeffs: vec![v] };
        }
        let out = Self::basis_pow(m2, e2);
        if sign {
            out.neg()
        } else {
            out
        }
    }

    /// `zeta_m^e` at the *stored* order `m` (canonical, `0 <= e < m`)
    /// without exact-order reduction. Same-order building block for
    /// `promote` and `galois`; keeps those free of cross-order recursion.
    fn basis_pow(m: u64, e: u64) -> CycNum {
        let e = e % m;
        let fld = cyc_field(m);
        let phi = fld.degree();
        if (e as usize) < phi {
            let mut c = vec![Rat::zero(); phi];
            c[e as usize] = Rat::one();
            CycNum { m, coeffs: c }
        } else {
            let mut c = vec![Rat::zero(); phi];
            c[1] = Rat::one();
            let zeta = CycNum { m, coeffs: c };
            zeta.pow_u64(e)
        }
    }

    /// The order `m` of the ambient field `Q(zeta_m)`.
    pub fn order(&self) -> u64 {
        self.m
    }

    /// Coordinates over the power basis.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Is this element a rational number (all non-constant coordinates zero)?
    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Return the value as a rational if it is one.
    pub fn to_rat(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    /// Promote into `Q(zeta_target)`; `self.order()` must divide `target`
    /// and `target` must be canonical.
    pub fn promote(&self, target: u64) -> CycNum {
        if target == self.m {
            return self.clone();
        }
        assert!(
            is_canonical_order(target) && target % self.m == 0,
            "cannot promote order {} into order {}",
            self.m,
            target
        );
        if self.is_rational() {
            return self.promote_raw(target);
        }
        let step = CycNum::basis_pow(target, target / self.m);
        // sum c_i * step^i with the power updated incrementally.
        let fld = cyc_field(target);
        let mut acc = CycNum { m: target, coeffs: vec![Rat::zero(); fld.degree()] };
        let mut power = CycNum::one().promote_raw(target);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&step);
            }
            if !c.is_zero() {
                let term = power.scalar_mul(c);
                acc = acc.add(&term);
            }
        }
        acc
    }

    /// Promote a rational value (or same-order value) without the
    /// iterated-power machinery; internal helper.
    fn promote_raw(&self, target: u64) -> CycNum {
        if self.m == target {
            return self.clone();
        }
        assert!(self.is_rational());
        let fld = cyc_field(target);
        let mut c = vec![Rat::zero(); fld.degree()];
        c[0] = self.coeffs[0].clone();
        CycNum { m: target, coeffs: c }
    }

    /// The unit element at a given stored order; internal helper.
    fn one_at(m: u64) -> CycNum {
        CycNum::one().promote_raw(m)
    }

    /// Least common order containing both operands.
    pub fn common_order(&self, other: &CycNum) -> u64 {
        lcm_u64(self.m, other.m)
    }

    pub fn add(&self, other: &CycNum) -> CycNum {
        let m = self.common_order(other);
        let a = self.promote(m);
        let b = other.promote(m);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(x, y)| x + y)
            .collect();
        CycNum { m, coeffs }
    }

    pub fn sub(&self, other: &CycNum) -> CycNum {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> CycNum {
        CycNum { m: self.m, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn scalar_mul(&self, r: &Rat) -> CycNum {
        CycNum { m: self.m, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn mul(&self, other: &CycNum) -> CycNum {
        let m = self.common_order(other);
        let a = self.promote(m);
        let b = other.promote(m);
        let fld = cyc_field(m);
        let phi = fld.degree();
        if phi == 1 {
            return CycNum { m, coeffs: vec![&a.coeffs[0] * &b.coeffs[0]] };
        }
        let mut prod = vec![Rat::zero(); 2 * phi - 1];
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if !bj.is_zero() {
                    prod[i + j] += ai * bj;
                }
            }
        }
        let mut out = prod[..phi].to_vec();
        for k in phi..2 * phi - 1 {
            if prod[k].is_zero() {
                continue;
            }
            let row = &fld.reduction_rows[k - phi];
            for i in 0..phi {
                if !row[i].is_zero() {
                    out[i] += &prod[k] * Rat::from_integer(row[i].clone());
                }
            }
        }
        CycNum { m, coeffs: out }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<CycNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of zero cyclotomic".into()));
        }
        if self.is_rational() {
            return Ok(CycNum::from_rat(Rat::one() / self.coeffs[0].clone()));
        }
        let fld = cyc_field(self.m);
        let phi = fld.degree();
        // Extended Euclid in Q[X] between self (as poly) and Phi_m.
        let a: Vec<Rat> = self.coeffs.clone();
        let b: Vec<Rat> = fld
            .minimal_poly
            .iter()
            .map(|c| Rat::from_integer(c.clone()))
            .collect();
        let (g, u) = qpoly_half_ext_gcd(&a, &b);
        // g is a nonzero constant (Phi_m is irreducible), u * self ≡ g mod Phi_m.
        debug_assert!(qpoly_deg(&g) == Some(0));
        let ginv = Rat::one() / g[0].clone();
        let mut coeffs = vec![Rat::zero(); phi];
        for (i, c) in u.iter().enumerate() {
            if !c.is_zero() {
                assert!(i < phi, "ext-gcd cofactor exceeds field degree");
                coeffs[i] = c * &ginv;
            }
        }
        Ok(CycNum { m: self.m, coeffs })
    }

    pub fn div(&self, other: &CycNum) -> Result<CycNum> {
        Ok(self.mul(&other.inv()?))
    }

    fn pow_u64(&self, mut e: u64) -> CycNum {
        let mut base = self.clone();
        let mut acc = CycNum::one_at(self.m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Integer power (negative exponents invert; errors only on `0^{-k}`).
    pub fn pow(&self, e: i64) -> Result<CycNum> {
        if e >= 0 {
            Ok(self.pow_u64(e as u64))
        } else {
            Ok(self.inv()?.pow_u64((-e) as u64))
        }
    }

    /// Galois action `zeta_m -> zeta_m^t` for `t` coprime to the order.
    pub fn galois(&self, t: i64) -> CycNum {
        let m = self.m;
        if m == 1 {
            return self.clone();
        }
        let tm = t.rem_euclid(m as i64) as u64;
        assert!(gcd_u64(tm, m) == 1, "galois exponent {t} not coprime to order {m}");
        if tm == 1 {
            return self.clone();
        }
        let step = CycNum::basis_pow(m, tm);
        let fld = cyc_field(m);
        let mut acc = CycNum { m, coeffs: vec![Rat::zero(); fld.degree()] };
        let mut power = CycNum::one().promote_raw(m);
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&step);
            }
            if !c.is_zero() {
                acc = acc.add(&power.scalar_mul(c));
            }
        }
        acc
    }

    /// Complex conjugation (`zeta -> zeta^{-1}`).
    pub fn conj(&self) -> CycNum {
        if self.m == 1 {
            self.clone()
        } else {
            self.galois(self.m as i64 - 1)
        }
    }

    /// Mathematical equality, independent of the stored order.
    pub fn same_value(&self, other: &CycNum) -> bool {
        if self.m == other.m {
            return self.coeffs == other.coeffs;
        }
        let m = self.common_order(other);
        self.promote(m).coeffs == other.promote(m).coeffs
    }

    /// Is this element a root of unity? Torsion units of `Q(zeta_m)` all
    /// satisfy `x^{lcm(2, m)} = 1`, so one exact power decides.
    pub fn is_root_of_unity(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if let Some(r) = self.to_rat() {
            return r == Rat::one() || r == -Rat::one();
        }
        let l = lcm_u64(2, self.m);
        self.pow_u64(l).is_one()
    }

    /// Rational norm-like size guard used in displays only.
    pub fn coeff_len(&self) -> usize {
        self.coeffs.len()
    }
}

impl fmt::Debug for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for CycNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            if i > 0 {
                if show_coeff {
                    write!(f, "*")?;
                }
                write!(f, "z{}", self.m)?;
                if i > 1 {
                    write!(f, "^{i}")?;
                }
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Rational polynomial helpers for the extended Euclid used by `inv`.
// ---------------------------------------------------------------------------

fn qpoly_deg(a: &[Rat]) -> Option<usize> {
    a.iter().rposition(|c| !c.is_zero())
}

fn qpoly_divrem(num: &[Rat], den: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let dd = qpoly_deg(den).expect("division by zero polynomial");
    let mut rem = num.to_vec();
    let nd = match qpoly_deg(&rem) {
        Some(d) if d >= dd => d,
        _ => return (vec![Rat::zero()], rem),
    };
    let mut quot = vec![Rat::zero(); nd - dd + 1];
    for k in (0..quot.len()).rev() {
        let lead = rem[k + dd].clone();
        if lead.is_zero() {
            continue;
        }
        let q = lead / den[dd].clone();
        for j in 0..=dd {
            if !den[j].is_zero() {
                let t = &q * &den[j];
                rem[k + j] -= t;
            }
        }
        quot[k] = q;
    }
    (quot, rem)
}

fn qpoly_mul(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

fn qpoly_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let n = a.len().max(b.len());
    let mut out = vec![Rat::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] -= c;
    }
    out
}

/// Half extended gcd: returns `(g, u)` with `u*a ≡ g (mod b)` and
/// `g = gcd(a, b)` up to a rational unit.
fn qpoly_half_ext_gcd(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    let mut u0: Vec<Rat> = vec![Rat::one()];
    let mut u1: Vec<Rat> = vec![Rat::zero()];
    while qpoly_deg(&r1).is_some() {
        let (q, r) = qpoly_divrem(&r0, &r1);
        let nu = qpoly_sub(&u0, &qpoly_mul(&q, &u1));
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = nu;
    }
    (r0, u0)
}

// ---------------------------------------------------------------------------
// Small integer helpers.
// ---------------------------------------------------------------------------

pub(crate) fn gcd_u64(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

pub(crate) fn mulmod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn powmod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod_u64(acc, a, m);
        }
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

/// Multiplicative order of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn mult_order_mod(a: u64, m: u64) -> u64 {
    assert!(m >= 1 && gcd_u64(a % m, m) == 1, "order of non-unit {a} mod {m}");
    if m == 1 {
        return 1;
    }
    // order divides phi(m); peel prime factors
    let mut ord = euler_phi(m);
    for (p, _) in factorize(ord) {
        while ord % p == 0 && powmod_u64(a, ord / p, m) == 1 {
            ord /= p;
        }
    }
    ord
}

/// Modular inverse of `a` mod `m` (requires coprimality).
pub fn invmod_u64(a: u64, m: u64) -> u64 {
    let (mut t, mut newt) = (0i128, 1i128);
    let (mut r, mut newr) = (m as i128, (a % m) as i128);
    while newr != 0 {
        let q = r / newr;
        let tt = t - q * newt;
        t = newt;
        newt = tt;
        let rr = r - q * newr;
        r = newr;
        newr = rr;
    }
    assert!(r == 1, "inverse of non-unit {a} mod {m}");
    t.rem_euclid(m as i128) as u64
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
