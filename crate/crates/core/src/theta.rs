//! The multiplicative group of *theta classes*: nonzero cyclotomic values
//! taken modulo roots of unity, enlarged by formal rational powers of `q`.
//!
//! Epsilon constants are naturally well defined only up to roots of unity
//! once differential forms and base points are allowed to vary, and their
//! natural normalisations involve half-integral powers of `q`. A
//! [`ThetaClass`] represents
//!
//! ```text
//!     q^{e_0} * v_1^{e_1} * ... * v_k^{e_k}   (mod roots of unity)
//! ```
//!
//! with rational exponents `e_i` and nonzero cyclotomic `v_i`. The group is
//! uniquely divisible modulo torsion, so rational powers are well defined.
//!
//! Equality ([`ThetaClass::eq_class`]) is decided exactly: clear all
//! exponent denominators, multiply out to a single cyclotomic number, and
//! test whether it is a root of unity (one exact power per candidate).
//! Nothing is compared numerically.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::Fq;
use crate::padic::cyclotomic_p_valuation;
use crate::{rat, ratio, Rat};

/// An element of the theta group over a fixed base field `F_q`.
#[derive(Clone)]
pub struct ThetaClass {
    p: u64,
    q: u64,
    f: u32,
    /// Formal exponent of `q`.
    qexp: Rat,
    /// Other multiplicative generators with their rational exponents.
    factors: BTreeMap<CycNum, Rat>,
}

impl fmt::Debug for ThetaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ThetaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use num_traits::Zero;
        let mut wrote = false;
        if !self.qexp.is_zero() {
            write!(f, "q^({})", self.qexp)?;
            wrote = true;
        }
        for (v, e) in &self.factors {
            if wrote {
                write!(f, " * ")?;
            }
            write!(f, "({v})^({e})")?;
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

fn rat_pow(base: &Rat, e: i64) -> Rat {
    let mut acc = rat(1);
    for _ in 0..e.unsigned_abs() {
        acc *= base;
    }
    if e < 0 {
        rat(1) / acc
    } else {
        acc
    }
}

impl ThetaClass {
    /// The identity class over `F_q`.
    pub fn identity(field: &Arc<Fq>) -> ThetaClass {
        ThetaClass {
            p: field.p(),
            q: field.q(),
            f: field.f(),
            qexp: rat(0),
            factors: BTreeMap::new(),
        }
    }

    /// `q^e` as a class.
    pub fn q_power(field: &Arc<Fq>, e: Rat) -> ThetaClass {
        let mut t = ThetaClass::identity(field);
        t.qexp = e;
        t
    }

    /// The geometric Frobenius eigenvalue of the cyclotomic character
    /// `Q_l(1)`, i.e. the class of `q^{-1}`.
    pub fn cyclotomic_character(field: &Arc<Fq>) -> ThetaClass {
        ThetaClass::q_power(field, rat(-1))
    }

    /// The class of a nonzero cyclotomic value over `F_q`.
    ///
    /// Canonicalisation here is conservative: roots of unity vanish, and
    /// rational values have their sign dropped and their `p`-part folded
    /// into the formal `q`-exponent (`v_p(r)/f`, since `q = p^f`). Other
    /// values are kept as opaque generators; all real decisions are made by
    /// the exact equality test, not by the representation.
    pub fn class_of(field: &Arc<Fq>, value: &CycNum) -> Result<ThetaClass> {
        if value.is_zero() {
            return Err(Error::ZeroClass("class of zero".into()));
        }
        let mut t = ThetaClass::identity(field);
        if let Some(r) = value.to_rat() {
            let mut mag = r.abs();
            let p = num_bigint::BigInt::from(field.p());
            let mut v = 0i64;
            let mut n = mag.numer().clone();
            while (&n % &p).is_zero() {
                n /= &p;
                v += 1;
            }
            let mut d = mag.denom().clone();
            while (&d % &p).is_zero() {
                d /= &p;
                v -= 1;
            }
            mag = Rat::new(n, d);
            t.qexp = ratio(v, field.f() as i64);
            if mag != rat(1) {
                t.factors.insert(CycNum::from_rat(mag), rat(1));
            }
            return Ok(t);
        }
        if value.is_root_of_unity() {
            return Ok(t);
        }
        t.factors.insert(value.clone(), rat(1));
        Ok(t)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Formal exponent of `q`.
    pub fn q_exponent(&self) -> &Rat {
        &self.qexp
    }

    fn assert_same_base(&self, other: &ThetaClass) {
        assert_eq!(
            (self.p, self.q),
            (other.p, other.q),
            "theta classes over different base fields"
        );
    }

    pub fn mul(&self, other: &ThetaClass) -> ThetaClass {
        use num_traits::Zero;
        self.assert_same_base(other);
        let mut out = self.clone();
        out.qexp += &other.qexp;
        for (v, e) in &other.factors {
            let entry = out.factors.entry(v.clone()).or_insert_with(|| rat(0));
            *entry += e;
            if entry.is_zero() {
                out.factors.remove(v);
            }
        }
        out
    }

    pub fn inv(&self) -> ThetaClass {
        let mut out = self.clone();
        out.qexp = -out.qexp.clone();
        for e in out.factors.values_mut() {
            *e = -e.clone();
        }
        out
    }

    pub fn div(&self, other: &ThetaClass) -> ThetaClass {
        self.mul(&other.inv())
    }

    /// Raise to a rational power (well defined: the group is uniquely
    /// divisible modulo the torsion we quotient by).
    pub fn pow(&self, e: &Rat) -> ThetaClass {
        use num_traits::Zero;
        let mut out = self.clone();
        out.qexp *= e;
        let mut fresh = BTreeMap::new();
        for (v, old) in &out.factors {
            let ne = old * e;
            if !ne.is_zero() {
                fresh.insert(v.clone(), ne);
            }
        }
        out.factors = fresh;
        out
    }

    pub fn pow_int(&self, e: i64) -> ThetaClass {
        self.pow(&rat(e))
    }

    /// Exact equality in the theta group.
    pub fn eq_class(&self, other: &ThetaClass) -> Result<bool> {
        self.assert_same_base(other);
        self.div(other).is_identity()
    }

    /// Is this the identity class? Clears denominators and multiplies out
    /// to one exact root-of-unity test.
    pub fn is_identity(&self) -> Result<bool> {
        // N = lcm of all exponent denominators
        let mut n = num_bigint::BigInt::from(1);
        let collect = |n: &mut num_bigint::BigInt, e: &Rat| {
            *n = num_integer::Integer::lcm(n, e.denom());
        };
        collect(&mut n, &self.qexp);
        for e in self.factors.values() {
            collect(&mut n, e);
        }
        let n_i64 = i64::try_from(&n)
            .map_err(|_| Error::invalid("exponent denominators overflow".to_string()))?;
        // value = q^{qexp*N} * prod v^{e*N}
        let qe = (&self.qexp * Rat::from_integer(n.clone())).to_integer();
        let qe_i = i64::try_from(&qe)
            .map_err(|_| Error::invalid("q-exponent too large to expand".to_string()))?;
        let mut total = CycNum::from_rat(rat_pow(&rat(self.q as i64), qe_i));
        for (v, e) in &self.factors {
            let ei = (e * Rat::from_integer(n.clone())).to_integer();
            let ei = i64::try_from(&ei)
                .map_err(|_| Error::invalid("factor exponent too large".to_string()))?;
            total = total.mul(&v.pow(ei)?);
        }
        let _ = n_i64;
        Ok(total.is_root_of_unity())
    }

    /// `p`-adic valuation of the class, normalised by `v(p) = 1` (well
    /// defined: roots of unity have valuation zero).
    pub fn p_valuation(&self) -> Result<Rat> {
        let mut v = &self.qexp * rat(self.f as i64);
        for (base, e) in &self.factors {
            v += cyclotomic_p_valuation(base, self.p)? * e;
        }
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
