//! Univariate polynomials and rational functions over a finite field, their
//! factorisation, and the places of the projective line.
//!
//! Coefficients are element codes of an explicit [`Fq`]; vectors store the
//! constant term first and are kept trimmed. Factorisation is the classical
//! squarefree / distinct-degree / equal-degree pipeline; the equal-degree
//! splitting draws from a ChaCha stream seeded from the polynomial itself,
//! so results are deterministic run to run.
//!
//! A [`Place`] of the projective line over `F_q` is either a monic
//! irreducible polynomial (a closed point of the affine line) or the point
//! at infinity. Orders of vanishing of rational functions at places,
//! divisors, and evaluation in extension fields are all exact.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::finite_field::{Embedding, Fq};

/// Dense univariate polynomial over an explicit finite field.
#[derive(Clone)]
pub struct Poly {
    field: Arc<Fq>,
    /// Coefficient codes, constant term first; `[0]` is the zero polynomial.
    c: Vec<u64>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field.q() == other.field.q() && self.c == other.c
    }
}
impl Eq for Poly {}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.field.q(), self.c.len(), &self.c).cmp(&(
            other.field.q(),
            other.c.len(),
            &other.c,
        ))
    }
}

impl std::hash::Hash for Poly {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.q().hash(state);
        self.c.hash(state);
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, &c) in self.c.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if i == 0 || c != 1 {
                write!(f, "{c}")?;
                if i > 0 {
                    write!(f, "*")?;
                }
            }
            if i == 1 {
                write!(f, "x")?;
            } else if i > 1 {
                write!(f, "x^{i}")?;
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: &Arc<Fq>, mut coeffs: Vec<u64>) -> Poly {
        if coeffs.is_empty() {
            coeffs.push(0);
        }
        let mut p = Poly { field: field.clone(), c: coeffs };
        p.trim();
        p
    }

    fn trim(&mut self) {
        while self.c.len() > 1 && *self.c.last().unwrap() == 0 {
            self.c.pop();
        }
    }

    pub fn zero(field: &Arc<Fq>) -> Poly {
        Poly::new(field, vec![0])
    }

    pub fn one(field: &Arc<Fq>) -> Poly {
        Poly::new(field, vec![1])
    }

    pub fn x(field: &Arc<Fq>) -> Poly {
        Poly::new(field, vec![0, 1])
    }

    pub fn constant(field: &Arc<Fq>, a: u64) -> Poly {
        Poly::new(field, vec![a])
    }

    /// Build from integer coefficients reduced into the prime subfield.
    pub fn from_ints(field: &Arc<Fq>, ints: &[i64]) -> Poly {
        Poly::new(field, ints.iter().map(|&n| field.from_int(n)).collect())
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 0
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == 1
    }

    pub fn is_constant(&self) -> bool {
        self.c.len() == 1
    }

    /// Degree; `None` for the zero polynomial.
    pub fn deg(&self) -> Option<usize> {
        if self.is_zero() {
            None
        } else {
            Some(self.c.len() - 1)
        }
    }

    pub fn leading(&self) -> u64 {
        *self.c.last().unwrap()
    }

    pub fn is_monic(&self) -> bool {
        !self.is_zero() && self.leading() == 1
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.c.len().max(other.c.len());
        let mut out = vec![0u64; n];
        for (i, &c) in self.c.iter().enumerate() {
            out[i] = c;
        }
        for (i, &c) in other.c.iter().enumerate() {
            out[i] = self.field.add(out[i], c);
        }
        Poly::new(&self.field, out)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|&c| self.field.neg(c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scalar_mul(&self, a: u64) -> Poly {
        Poly::new(&self.field, self.c.iter().map(|&c| self.field.mul(c, a)).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(&self.field);
        }
        let mut out = vec![0u64; self.c.len() + other.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.c.iter().enumerate() {
                if b != 0 {
                    out[i + j] = self.field.add(out[i + j], self.field.mul(a, b));
                }
            }
        }
        Poly::new(&self.field, out)
    }

    pub fn pow(&self, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(&self.field);
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

    pub fn divrem(&self, den: &Poly) -> Result<(Poly, Poly)> {
        let dd = den
            .deg()
            .ok_or_else(|| Error::DivisionByZero("polynomial division by zero".into()))?;
        let mut rem = self.c.clone();
        let nd = match self.deg() {
            Some(d) if d >= dd => d,
            _ => return Ok((Poly::zero(&self.field), self.clone())),
        };
        let lead_inv = self.field.inv(den.leading())?;
        let mut quot = vec![0u64; nd - dd + 1];
        for k in (0..quot.len()).rev() {
            let lead = rem[k + dd];
            if lead == 0 {
                continue;
            }
            let qc = self.field.mul(lead, lead_inv);
            for j in 0..=dd {
                let t = self.field.mul(qc, den.c[j]);
                rem[k + j] = self.field.sub(rem[k + j], t);
            }
            quot[k] = qc;
        }
        Ok((Poly::new(&self.field, quot), Poly::new(&self.field, rem)))
    }

    pub fn rem(&self, den: &Poly) -> Result<Poly> {
        Ok(self.divrem(den)?.1)
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut r0 = self.clone();
        let mut r1 = other.clone();
        while !r1.is_zero() {
            let r = r0.rem(&r1).expect("nonzero divisor");
            r0 = r1;
            r1 = r;
        }
        if r0.is_zero() {
            r0
        } else {
            r0.monic().0
        }
    }

    /// Returns `(self / leading, leading)`.
    pub fn monic(&self) -> (Poly, u64) {
        let l = self.leading();
        if l == 1 || self.is_zero() {
            return (self.clone(), l);
        }
        let linv = self.field.inv(l).expect("leading coefficient nonzero");
        (self.scalar_mul(linv), l)
    }

    pub fn derivative(&self) -> Poly {
        if self.c.len() == 1 {
            return Poly::zero(&self.field);
        }
        let mut out = Vec::with_capacity(self.c.len() - 1);
        for (i, &c) in self.c.iter().enumerate().skip(1) {
            let mut s = 0u64;
            // multiply by i in the prime field
            let im = (i as u64) % self.field.p();
            if im != 0 && c != 0 {
                s = self.field.mul(c, im);
            }
            out.push(s);
        }
        Poly::new(&self.field, out)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let mut acc = 0u64;
        for &c in self.c.iter().rev() {
            acc = self.field.add(self.field.mul(acc, x), c);
        }
        acc
    }

    /// Evaluate at a point of an extension field, embedding the
    /// coefficients through `emb` (whose base must be this field).
    pub fn eval_embedded(&self, emb: &Embedding, y: u64) -> u64 {
        debug_assert_eq!(emb.base().q(), self.field.q());
        let ext = emb.ext();
        let mut acc = 0u64;
        for &c in self.c.iter().rev() {
            acc = ext.add(ext.mul(acc, y), emb.embed(c));
        }
        acc
    }

    /// Substitute another polynomial: `self(g)`.
    pub fn compose(&self, g: &Poly) -> Poly {
        let mut acc = Poly::zero(&self.field);
        for &c in self.c.iter().rev() {
            acc = acc.mul(g).add(&Poly::constant(&self.field, c));
        }
        acc
    }

    /// The `p`-th root of a polynomial with zero derivative (all exponents
    /// divisible by `p`): inverse Frobenius on coefficients.
    fn pth_root(&self) -> Poly {
        let p = self.field.p() as usize;
        let q = self.field.q();
        let mut out = Vec::with_capacity(self.c.len() / p + 1);
        for (i, &c) in self.c.iter().enumerate() {
            if i % p == 0 {
                // c^(q/p) is the inverse of x -> x^p on F_q
                out.push(self.field.pow(c, q / self.field.p()));
            } else {
                debug_assert_eq!(c, 0, "pth_root requires a p-th power polynomial");
            }
        }
        Poly::new(&self.field, out)
    }

    /// Multiplicity of a monic irreducible divisor.
    pub fn multiplicity_of(&self, pi: &Poly) -> u32 {
        assert!(!self.is_zero(), "multiplicity in the zero polynomial");
        let mut m = 0;
        let mut cur = self.clone();
        loop {
            let (q, r) = cur.divrem(pi).expect("nonzero divisor");
            if r.is_zero() {
                m += 1;
                cur = q;
            } else {
                return m;
            }
        }
    }

    /// `x^e mod self` by square-and-multiply (used by the factorisation
    /// pipeline and irreducibility tests).
    fn x_powmod(&self, e: u64) -> Poly {
        let x = Poly::x(&self.field);
        let mut base = x.rem(self).expect("nonzero modulus");
        let mut acc = Poly::one(&self.field);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(self).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(self).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Irreducibility via the distinct-degree criterion.
    pub fn is_irreducible(&self) -> bool {
        match self.deg() {
            None | Some(0) => false,
            Some(1) => true,
            Some(d) => {
                let q = self.field.q();
                // x^{q^d} ≡ x mod self
                let mut xq = self.x_powmod(q);
                let mut powers = vec![Poly::x(&self.field).rem(self).unwrap(), xq.clone()];
                for _ in 2..=d {
                    xq = Self::compose_mod(&powers[1], &xq, self);
                    powers.push(xq.clone());
                }
                let x = &powers[0];
                if powers[d] != *x {
                    return false;
                }
                for (r, _) in crate::cyclotomic::factorize(d as u64) {
                    let sub = &powers[d / r as usize];
                    let g = self.gcd(&sub.sub(x));
                    if g.deg() != Some(0) {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// `f(g) mod m` where `f` is given by its Frobenius-power structure:
    /// here specifically used as modular composition `prev(xq)` computed
    /// naively (Horner in `g` mod `m`): adequate at desk scale.
    fn compose_mod(g: &Poly, prev_xq: &Poly, m: &Poly) -> Poly {
        // compute g-th Frobenius iterate: substitute prev_xq into g? No:
        // we need (x^{q^k}) = (x^{q^{k-1}})^{q} mod m; implement directly.
        let _ = g;
        let q = m.field.q();
        let mut acc = Poly::one(&m.field);
        let mut base = prev_xq.clone();
        let mut e = q;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(m).expect("nonzero modulus");
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base).rem(m).expect("nonzero modulus");
            }
        }
        acc
    }

    /// Squarefree decomposition in characteristic `p`: returns pairs
    /// `(g, m)` with the `g` squarefree, pairwise coprime, and
    /// `self = unit * prod g^m`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, u32)> {
        assert!(!self.is_zero());
        let (f, _) = self.monic();
        if f.deg() == Some(0) {
            return Vec::new();
        }
        let d = f.derivative();
        if d.is_zero() {
            // f = h(x^p): recurse on the p-th root, multiplying exponents.
            let h = f.pth_root();
            return h
                .squarefree_decomposition()
                .into_iter()
                .map(|(g, m)| (g, m * self.field.p() as u32))
                .collect();
        }
        // Classical characteristic-p refinement. With f = prod g_j^{m_j}:
        // c = gcd(f, f') carries g_j^{m_j - 1} for p-prime m_j and
        // g_j^{m_j} for p-divisible m_j; w = f/c is the radical of the
        // p-prime part. Peeling gcds off w extracts each multiplicity
        // layer; whatever survives in c afterwards is an exact p-th power.
        let mut out: Vec<(Poly, u32)> = Vec::new();
        let mut c = f.gcd(&d);
        let mut w = f.divrem(&c).expect("gcd divides").0;
        let mut i = 1u32;
        while w.deg() != Some(0) {
            let y = w.gcd(&c);
            let fac = w.divrem(&y).expect("gcd divides").0;
            if fac.deg().map_or(false, |dg| dg > 0) {
                out.push((fac, i));
            }
            c = c.divrem(&y).expect("gcd divides").0;
            w = y;
            i += 1;
        }
        if c.deg().map_or(false, |dg| dg > 0) {
            // p-prime multiplicities peel out fully above, so the two
            // branches never share a factor.
            for (g, m) in c.pth_root().squarefree_decomposition() {
                out.push((g, m * self.field.p() as u32));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    /// Full factorisation into monic irreducibles with multiplicities, plus
    /// the unit (leading coefficient). Deterministic: the equal-degree
    /// randomness is seeded from the polynomial.
    pub fn factor(&self) -> Result<Factorization> {
        if self.is_zero() {
            return Err(Error::BadPolynomial("factor of the zero polynomial".into()));
        }
        let unit = self.leading();
        let mut out: Vec<(Poly, u32)> = Vec::new();
        for (g, m) in self.squarefree_decomposition() {
            for irr in g.factor_squarefree()? {
                out.push((irr, m));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(Factorization { unit, factors: out })
    }

    /// Factor a squarefree monic polynomial: distinct-degree then
    /// equal-degree splitting.
    fn factor_squarefree(&self) -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        let mut f = self.monic().0;
        let q = self.field.q();
        let mut d = 1usize;
        // x^{q^d} mod f, updated as f shrinks by recomputation (desk scale).
        while let Some(df) = f.deg() {
            if df == 0 {
                break;
            }
            if d > df / 2 {
                out.push(f.clone());
                break;
            }
            let mut xq = f.x_powmod(q);
            for _ in 1..d {
                xq = Poly::compose_mod(&f, &xq, &f);
            }
            let g = f.gcd(&xq.sub(&Poly::x(&self.field)));
            if g.deg().map_or(false, |dg| dg > 0) {
                for irr in g.equal_degree_split(d)? {
                    out.push(irr);
                }
                f = f.divrem(&g)?.0;
            }
            d += 1;
        }
        Ok(out)
    }

    /// Cantor–Zassenhaus equal-degree splitting of a product of distinct
    /// irreducibles of the same degree `d`.
    fn equal_degree_split(&self, d: usize) -> Result<Vec<Poly>> {
        let deg = self.deg().expect("nonzero");
        if deg == d {
            return Ok(vec![self.monic().0]);
        }
        let field = &self.field;
        let q = field.q();
        // Deterministic stream seeded from the polynomial.
        let mut seed = 0xE95C_0FFE_u64 ^ (q.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        for &c in &self.c {
            seed = seed.wrapping_mul(0x100_0000_01B3).wrapping_add(c);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        loop {
            let rdeg = deg - 1;
            let mut rc = vec![0u64; rdeg + 1];
            for slot in rc.iter_mut() {
                *slot = rng.gen_range(0..q);
            }
            let r = Poly::new(field, rc);
            if r.deg().is_none() {
                continue;
            }
            let g0 = self.gcd(&r);
            let cand = if g0.deg().map_or(false, |dg| dg > 0 && dg < deg) {
                g0
            } else if field.p() == 2 {
                // Trace splitting: T(r) = sum r^{2^i} over the relative
                // degree; gcd(T(r), f) is a nontrivial factor with
                // probability about 1/2.
                let iters = (d as u32) * field.f();
                let mut t = r.rem(self)?;
                let mut acc = t.clone();
                for _ in 1..iters {
                    t = t.mul(&t).rem(self)?;
                    acc = acc.add(&t);
                }
                self.gcd(&acc)
            } else {
                // r^{(q^d - 1)/2} ± 1 splits.
                let mut e = (pow_u128(q as u128, d as u32) - 1) / 2;
                let mut base = r.rem(self)?;
                let mut acc = Poly::one(field);
                while e > 0 {
                    if e & 1 == 1 {
                        acc = acc.mul(&base).rem(self)?;
                    }
                    e >>= 1;
                    if e > 0 {
                        base = base.mul(&base).rem(self)?;
                    }
                }
                self.gcd(&acc.sub(&Poly::one(field)))
            };
            if let Some(dg) = cand.deg() {
                if dg > 0 && dg < deg {
                    let rest = self.divrem(&cand)?.0;
                    let mut out = cand.equal_degree_split(d)?;
                    out.extend(rest.equal_degree_split(d)?);
                    return Ok(out);
                }
            }
        }
    }

    /// Roots in the base field (by evaluation; fields at desk scale).
    pub fn roots(&self) -> Vec<u64> {
        self.field.elements().filter(|&x| self.eval(x) == 0).collect()
    }
}

fn pow_u128(b: u128, e: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..e {
        acc *= b;
    }
    acc
}

/// Result of [`Poly::factor`]: `unit * prod factors[i].0 ^ factors[i].1`.
#[derive(Clone, Debug)]
pub struct Factorization {
    pub unit: u64,
    pub factors: Vec<(Poly, u32)>,
}

// ---------------------------------------------------------------------------
// Places of the projective line.
// ---------------------------------------------------------------------------

/// A closed point of `P^1` over the coefficient field: a monic irreducible
/// polynomial (finite place) or the point at infinity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(Poly),
    Infinity,
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "({p})"),
            Place::Infinity => write!(f, "(infinity)"),
        }
    }
}

impl Place {
    /// Finite place from a monic irreducible polynomial.
    pub fn finite(p: Poly) -> Result<Place> {
        if !p.is_monic() || !p.is_irreducible() {
            return Err(Error::BadPolynomial(format!(
                "place must be monic irreducible, got {p}"
            )));
        }
        Ok(Place::Finite(p))
    }

    /// The rational point `x = a`.
    pub fn rational(field: &Arc<Fq>, a: u64) -> Place {
        Place::Finite(Poly::new(field, vec![field.neg(a), 1]))
    }

    /// Residue degree over the coefficient field.
    pub fn deg(&self) -> u32 {
        match self {
            Place::Finite(p) => p.deg().expect("irreducible is nonzero") as u32,
            Place::Infinity => 1,
        }
    }

    /// A uniformizer at the place, as a rational function.
    pub fn uniformizer(&self, field: &Arc<Fq>) -> RatFunc {
        match self {
            Place::Finite(p) => RatFunc::from_poly(p.clone()),
            Place::Infinity => RatFunc::new(Poly::one(field), Poly::x(field))
                .expect("x is nonzero"),
        }
    }
}

// ---------------------------------------------------------------------------
// Rational functions.
// ---------------------------------------------------------------------------

/// A rational function `num/den` in lowest terms with monic denominator.
#[derive(Clone, PartialEq, Eq)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::DivisionByZero("rational function with zero denominator".into()));
        }
        let g = num.gcd(&den);
        let (num, den) = if g.deg().map_or(false, |d| d > 0) {
            (num.divrem(&g)?.0, den.divrem(&g)?.0)
        } else {
            (num, den)
        };
        let (den_monic, lead) = den.monic();
        let num = if lead != 1 {
            num.scalar_mul(num.field().inv(lead)?)
        } else {
            num
        };
        Ok(RatFunc { num, den: den_monic })
    }

    pub fn from_poly(p: Poly) -> RatFunc {
        let field = p.field().clone();
        RatFunc { num: p, den: Poly::one(&field) }
    }

    pub fn constant(field: &Arc<Fq>, a: u64) -> RatFunc {
        RatFunc::from_poly(Poly::constant(field, a))
    }

    pub fn x(field: &Arc<Fq>) -> RatFunc {
        RatFunc::from_poly(Poly::x(field))
    }

    pub fn field(&self) -> &Arc<Fq> {
        self.num.field()
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
        .expect("denominators nonzero")
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
            .expect("denominators nonzero")
    }

    pub fn scalar_mul(&self, a: u64) -> RatFunc {
        RatFunc::new(self.num.scalar_mul(a), self.den.clone()).expect("den nonzero")
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        if other.is_zero() {
            return Err(Error::DivisionByZero("division by the zero function".into()));
        }
        RatFunc::new(self.num.mul(&other.den), self.den.mul(&other.num))
    }

    pub fn inv(&self) -> Result<RatFunc> {
        RatFunc::constant(self.field(), 1).div(self)
    }

    pub fn pow(&self, e: i64) -> Result<RatFunc> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = RatFunc::constant(self.field(), 1);
        for _ in 0..e.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    /// Formal derivative (quotient rule).
    pub fn derivative(&self) -> RatFunc {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RatFunc::new(n, self.den.mul(&self.den)).expect("den nonzero")
    }

    /// Order of vanishing at a place (`> 0` zero, `< 0` pole). The function
    /// must be nonzero.
    pub fn ord_at(&self, place: &Place) -> i64 {
        assert!(!self.is_zero(), "ord of the zero function");
        match place {
            Place::Finite(pi) => {
                self.num.multiplicity_of(pi) as i64 - self.den.multiplicity_of(pi) as i64
            }
            Place::Infinity => {
                self.den.deg().unwrap() as i64 - self.num.deg().unwrap() as i64
            }
        }
    }

    /// The divisor of a nonzero rational function: all places with nonzero
    /// order, including infinity. Degrees sum to zero.
    pub fn divisor(&self) -> Result<Vec<(Place, i64)>> {
        assert!(!self.is_zero(), "divisor of the zero function");
        let mut out: Vec<(Place, i64)> = Vec::new();
        for (pi, m) in self.num.factor()?.factors {
            out.push((Place::Finite(pi), m as i64));
        }
        for (pi, m) in self.den.factor()?.factors {
            out.push((Place::Finite(pi), -(m as i64)));
        }
        let at_inf = self.ord_at(&Place::Infinity);
        if at_inf != 0 {
            out.push((Place::Infinity, at_inf));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }

    /// Evaluate at a base-field point; `None` at a pole.
    pub fn eval(&self, x: u64) -> Option<u64> {
        let d = self.den.eval(x);
        if d == 0 {
            return None;
        }
        let n = self.num.eval(x);
        Some(self.field().mul(n, self.field().inv(d).expect("nonzero")))
    }

    /// Evaluate at an extension point through an embedding; `None` at a pole.
    pub fn eval_embedded(&self, emb: &Embedding, y: u64) -> Option<u64> {
        let ext = emb.ext();
        let d = self.den.eval_embedded(emb, y);
        if d == 0 {
            return None;
        }
        let n = self.num.eval_embedded(emb, y);
        Some(ext.mul(n, ext.inv(d).expect("nonzero")))
    }

    /// Value at infinity: `None` if there is a pole, otherwise the limit
    /// (`0` if `deg num < deg den`, ratio of leading coefficients if equal).
    pub fn eval_at_infinity(&self) -> Option<u64> {
        if self.is_zero() {
            return Some(0);
        }
        let dn = self.num.deg().unwrap();
        let dd = self.den.deg().unwrap();
        match dn.cmp(&dd) {
            Ordering::Greater => None,
            Ordering::Less => Some(0),
            Ordering::Equal => {
                let f = self.field();
                Some(f.mul(self.num.leading(), f.inv(self.den.leading()).expect("monic")))
            }
        }
    }

    /// Leading coefficient of the expansion at infinity in the uniformizer
    /// `1/x`: for `f = c x^{-ord} (1 + O(1/x))` this returns `c`
    /// (the unit-part value at infinity).
    pub fn unit_value_at_infinity(&self) -> u64 {
        assert!(!self.is_zero());
        let f = self.field();
        f.mul(self.num.leading(), f.inv(self.den.leading()).expect("monic"))
    }
}

// ---------------------------------------------------------------------------
// Parsing: a small recursive-descent parser for polynomials and rational
// functions in the variable `x` with integer (prime subfield) constants.
// ---------------------------------------------------------------------------

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
    field: Arc<Fq>,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str, field: &Arc<Fq>) -> Parser<'a> {
        Parser { bytes: s.as_bytes(), pos: 0, field: field.clone() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => Err(Error::parse(format!(
                "expected '{}' at byte {}, got {:?}",
                c as char,
                self.pos,
                got.map(|b| b as char)
            ))),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        let mut neg = false;
        if self.bytes.get(self.pos) == Some(&b'-') {
            neg = true;
            self.pos += 1;
        }
        let dstart = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == dstart {
            self.pos = start;
            return Err(Error::parse(format!("expected integer at byte {start}")));
        }
        let s = std::str::from_utf8(&self.bytes[dstart..self.pos]).unwrap();
        let v: i64 = s
            .parse()
            .map_err(|_| Error::parse(format!("integer out of range: {s}")))?;
        Ok(if neg { -v } else { v })
    }

    // expr := term (('+' | '-') term)*
    fn expr(&mut self) -> Result<RatFunc> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    // term := factor (('*' | '/') factor)*
    fn term(&mut self) -> Result<RatFunc> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.bump();
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    self.bump();
                    acc = acc.div(&self.factor()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    // factor := atom ['^' ['-'] int]
    fn factor(&mut self) -> Result<RatFunc> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let e = self.integer()?;
            return base.pow(e);
        }
        Ok(base)
    }

    // atom := '(' expr ')' | 'x' | int | '-' atom
    fn atom(&mut self) -> Result<RatFunc> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(b'x') => {
                self.bump();
                Ok(RatFunc::x(&self.field))
            }
            Some(b'-') => {
                self.bump();
                Ok(self.atom()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(RatFunc::constant(&self.field, self.field.from_int(v)))
            }
            other => Err(Error::parse(format!(
                "unexpected token {:?} at byte {}",
                other.map(|b| b as char),
                self.pos
            ))),
        }
    }

    fn finish(&mut self) -> Result<()> {
        if self.peek().is_some() {
            return Err(Error::parse(format!(
                "trailing input at byte {}: {:?}",
                self.pos,
                std::str::from_utf8(&self.bytes[self.pos..]).unwrap_or("?")
            )));
        }
        Ok(())
    }
}

impl RatFunc {
    /// Parse a rational function in `x` with integer constants, e.g.
    /// `"(x^3 - 2)/(x - 1)"` or `"1 - x"`.
    pub fn parse(field: &Arc<Fq>, s: &str) -> Result<RatFunc> {
        let mut p = Parser::new(s, field);
        let e = p.expr()?;
        p.finish()?;
        Ok(e)
    }
}

impl Poly {
    /// Parse a polynomial (a rational function with trivial denominator).
    pub fn parse(field: &Arc<Fq>, s: &str) -> Result<Poly> {
        let r = RatFunc::parse(field, s)?;
        if !r.den().is_one() {
            return Err(Error::parse(format!("expected a polynomial, got {r}")));
        }
        Ok(r.num().clone())
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finite_field::Fq;

    fn f(q: (u64, u32)) -> Arc<Fq> {
        Fq::new(q.0, q.1).unwrap()
    }

    #[test]
    fn arithmetic_and_division() {
        let f7 = f((7, 1));
        let a = Poly::from_ints(&f7, &[1, 0, 1]); // x^2 + 1
        let b = Poly::from_ints(&f7, &[3, 1]); // x + 3
        let prod = a.mul(&b);
        let (q, r) = prod.divrem(&b).unwrap();
        assert_eq!(q, a);
        assert!(r.is_zero());
        let (q2, r2) = a.divrem(&b).unwrap();
        // x^2 + 1 = (x + 3)(x + 4) + 6 over F_7? (x+3)(x+4) = x^2 + 7x + 12 = x^2 + 5
        // so x^2 + 1 = (x+3)(x+4) - 4 = (x+3)(x+4) + 3
        assert_eq!(q2, Poly::from_ints(&f7, &[4, 1]));
        assert_eq!(r2, Poly::from_ints(&f7, &[3]));
    }

    #[test]
    fn derivative_rules() {
        let f5 = f((5, 1));
        // d/dx (x^5 + x^2) = 2x in char 5
        let a = Poly::from_ints(&f5, &[0, 0, 1, 0, 0, 1]);
        assert_eq!(a.derivative(), Poly::from_ints(&f5, &[0, 2]));
    }

    #[test]
    fn factor_small_polynomials() {
        let f5 = f((5, 1));
        // x^2 - 1 = (x-1)(x+1)
        let a = Poly::from_ints(&f5, &[-1, 0, 1]);
        let fac = a.factor().unwrap();
        assert_eq!(fac.unit, 1);
        assert_eq!(fac.factors.len(), 2);
        assert!(fac.factors.iter().all(|(_, m)| *m == 1));
        // x^2 + 2 is irreducible over F_5
        let b = Poly::from_ints(&f5, &[2, 0, 1]);
        assert!(b.is_irreducible());
        let facb = b.factor().unwrap();
        assert_eq!(facb.factors.len(), 1);
        assert_eq!(facb.factors[0].0, b);
    }

    #[test]
    fn factor_with_multiplicities_and_unit() {
        let f3 = f((3, 1));
        // 2 * (x+1)^3 * (x^2+1)
        let a = Poly::from_ints(&f3, &[1, 1])
            .pow(3)
            .mul(&Poly::from_ints(&f3, &[1, 0, 1]))
            .scalar_mul(2);
        let fac = a.factor().unwrap();
        assert_eq!(fac.unit, 2);
        let mut got: Vec<(String, u32)> =
            fac.factors.iter().map(|(p, m)| (format!("{p}"), *m)).collect();
        got.sort();
        assert_eq!(got, vec![("x + 1".to_string(), 3), ("x^2 + 1".to_string(), 1)]);
        // reassemble
        let mut re = Poly::constant(&f3, fac.unit);
        for (p, m) in &fac.factors {
            re = re.mul(&p.pow(*m as u64));
        }
        assert_eq!(re, a);
    }

    #[test]
    fn factor_pth_powers() {
        let f5 = f((5, 1));
        // (x+2)^5 = x^5 + 2^5 = x^5 + 32 = x^5 + 2 (freshman's dream)
        let a = Poly::from_ints(&f5, &[2, 0, 0, 0, 0, 1]);
        let fac = a.factor().unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 5);
        assert_eq!(fac.factors[0].0, Poly::from_ints(&f5, &[2, 1]));
    }

    #[test]
    fn factor_over_extension_field() {
        let f9 = f((3, 2));
        // x^2 + 1 splits over F_9 (i = code 3 is a root)
        let a = Poly::from_ints(&f9, &[1, 0, 1]);
        let fac = a.factor().unwrap();
        assert_eq!(fac.factors.len(), 2);
        for (p, _) in &fac.factors {
            assert_eq!(p.deg(), Some(1));
        }
    }

    #[test]
    fn factor_char_two() {
        let f2 = f((2, 1));
        // x^4 + x + 1 is irreducible over F_2; (x^2+x+1)(x^2+x+1) = x^4+x^2+1
        let irr = Poly::from_ints(&f2, &[1, 1, 0, 0, 1]);
        assert!(irr.is_irreducible());
        let sq = Poly::from_ints(&f2, &[1, 0, 1, 0, 1]);
        let fac = sq.factor().unwrap();
        assert_eq!(fac.factors.len(), 1);
        assert_eq!(fac.factors[0].1, 2);
        assert_eq!(fac.factors[0].0, Poly::from_ints(&f2, &[1, 1, 1]));
    }

    #[test]
    fn big_product_factorisation_round_trip() {
        // deterministic stress: product of all monic irreducibles of degree
        // <= 2 over F_7 factors back to itself
        let f7 = f((7, 1));
        let mut polys = Vec::new();
        for a0 in 0..7 {
            polys.push(Poly::new(&f7, vec![a0, 1]));
        }
        for a0 in 0..7 {
            for a1 in 0..7 {
                let p = Poly::new(&f7, vec![a0, a1, 1]);
                if p.is_irreducible() {
                    polys.push(p);
                }
            }
        }
        let mut prod = Poly::one(&f7);
        for p in &polys {
            prod = prod.mul(p);
        }
        let fac = prod.factor().unwrap();
        assert_eq!(fac.factors.len(), polys.len());
        assert!(fac.factors.iter().all(|(_, m)| *m == 1));
    }

    #[test]
    fn ratfunc_normalisation_and_orders() {
        let f5 = f((5, 1));
        // f = (x^2 - 1)/(x - 1) = x + 1
        let r = RatFunc::new(
            Poly::from_ints(&f5, &[-1, 0, 1]),
            Poly::from_ints(&f5, &[-1, 1]),
        )
        .unwrap();
        assert_eq!(r.num(), &Poly::from_ints(&f5, &[1, 1]));
        assert!(r.den().is_one());
        // orders: zero at x = -1, pole of order 1 at infinity
        let at_minus1 = Place::rational(&f5, f5.from_int(-1));
        assert_eq!(r.ord_at(&at_minus1), 1);
        assert_eq!(r.ord_at(&Place::Infinity), -1);
        // divisor sums to zero against degrees
        let div = r.divisor().unwrap();
        let total: i64 = div.iter().map(|(pl, m)| m * pl.deg() as i64).sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn divisor_degree_always_zero() {
        let f7 = f((7, 1));
        let r = RatFunc::parse(&f7, "(x^3 - 2) / (x^2 + x + 3)").unwrap();
        let total: i64 = r
            .divisor()
            .unwrap()
            .iter()
            .map(|(pl, m)| m * pl.deg() as i64)
            .sum();
        assert_eq!(total, 0);
    }

    #[test]
    fn evaluation_including_infinity() {
        let f7 = f((7, 1));
        let r = RatFunc::parse(&f7, "(2*x^2 + 1)/(x^2 - 2)").unwrap();
        assert_eq!(r.eval(0), Some(f7.mul(1, f7.inv(5).unwrap())));
        // poles where x^2 = 2: 3^2 = 2, 4^2 = 2 over F_7
        assert_eq!(r.eval(3), None);
        assert_eq!(r.eval(4), None);
        assert_eq!(r.eval_at_infinity(), Some(2));
        let s = RatFunc::parse(&f7, "x^3 + 1").unwrap();
        assert_eq!(s.eval_at_infinity(), None);
        assert_eq!(s.ord_at(&Place::Infinity), -3);
    }

    #[test]
    fn embedded_evaluation_matches_base() {
        let f5 = f((5, 1));
        let f25 = f5.extension(2).unwrap();
        let emb = Embedding::new(&f5, &f25).unwrap();
        let r = RatFunc::parse(&f5, "(x^2 + 3)/(x + 1)").unwrap();
        for a in 0..5 {
            let lhs = r.eval(a).map(|v| emb.embed(v));
            let rhs = r.eval_embedded(&emb, emb.embed(a));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn parser_round_trips() {
        let f7 = f((7, 1));
        let r = RatFunc::parse(&f7, "(x^3-2)/(x-1)").unwrap();
        assert_eq!(r.num().deg(), Some(3));
        assert_eq!(r.den().deg(), Some(1));
        let s = RatFunc::parse(&f7, "1 - x").unwrap();
        assert_eq!(s.num(), &Poly::from_ints(&f7, &[1, -1]));
        // powers with negative exponent
        let t = RatFunc::parse(&f7, "x^-2 * (1 + x)").unwrap();
        assert_eq!(t.ord_at(&Place::Finite(Poly::x(&f7))), -2);
        assert!(RatFunc::parse(&f7, "x +").is_err());
        assert!(RatFunc::parse(&f7, "y").is_err());
        assert!(RatFunc::parse(&f7, "1/0").is_err());
    }

    #[test]
    fn place_ordering_and_uniformizers() {
        let f5 = f((5, 1));
        let p1 = Place::rational(&f5, 2);
        let p2 = Place::Finite(Poly::from_ints(&f5, &[2, 0, 1]));
        assert!(p1 < p2, "lower degree places sort first");
        assert!(p2 < Place::Infinity, "infinity sorts last");
        let u = Place::Infinity.uniformizer(&f5);
        assert_eq!(u.ord_at(&Place::Infinity), 1);
        let u2 = p1.uniformizer(&f5);
        assert_eq!(u2.ord_at(&p1), 1);
    }

    #[test]
    fn squarefree_decomposition_examples() {
        let f3 = f((3, 1));
        // f = (x+1)^2 (x+2)^3 x
        let a = Poly::from_ints(&f3, &[1, 1])
            .pow(2)
            .mul(&Poly::from_ints(&f3, &[2, 1]).pow(3))
            .mul(&Poly::x(&f3));
        let parts = a.squarefree_decomposition();
        let mut degsum = 0;
        for (g, m) in &parts {
            degsum += g.deg().unwrap() as u32 * m;
            // parts are squarefree
            assert!(g.gcd(&g.derivative()).deg() == Some(0) || g.derivative().is_zero());
        }
        assert_eq!(degsum as usize, a.deg().unwrap());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn factorisation_reassembles(
            pf in proptest::sample::select(vec![(2u64, 1u32), (3, 1), (5, 1), (3, 2), (7, 1)]),
            coeffs in proptest::collection::vec(0u64..64, 1..9),
        ) {
            let fq = f(pf);
            let poly = Poly::new(&fq, coeffs.iter().map(|&c| c % fq.q()).collect());
            proptest::prop_assume!(!poly.is_zero());
            let fact = poly.factor().unwrap();
            let mut product = Poly::constant(&fq, fact.unit);
            for (g, m) in &fact.factors {
                proptest::prop_assert!(g.is_monic() && g.is_irreducible());
                product = product.mul(&g.pow(*m as u64));
            }
            proptest::prop_assert_eq!(product, poly);
        }
    }
}
