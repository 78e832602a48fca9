//! Character sums: Gauss sums, the Hasse–Davenport lifting relation,
//! Jacobi data and their associated classes, and the digit-sum formula for
//! Gauss-sum valuations.
//!
//! The Gauss sum used throughout the crate is
//!
//! ```text
//!     tau(chi, psi) = - sum_{a in F_q^*} chi(a) psi(a),
//! ```
//!
//! i.e. the negative of the naive character sum. With this normalisation
//! `tau(trivial, psi) = 1` for nontrivial `psi`, `tau` is multiplicative in
//! the Hasse–Davenport sense without stray signs, and the valuation of
//! `tau(chi)` is the base-`p` digit sum of the *conjugate* exponent divided
//! by `p - 1`.
//!
//! A *Jacobi datum* is a tuple of multiplicative characters on finite
//! extensions of a common base field whose restrictions to the base
//! multiply to the trivial character. Its Jacobi sum — the product of the
//! Gauss sums of the conjugated entries against the canonical additive
//! character pushed through the trace — is independent of the choice of
//! nontrivial additive character, which is what makes the derived classes
//! canonical.

use std::sync::Arc;

use crate::cyclotomic::{lcm_u64, CycNum};
use crate::error::{Error, Result};
use crate::finite_field::{AddChar, Embedding, Fq, MultChar};
use crate::theta::ThetaClass;
use crate::{ratio, Rat};

/// The Gauss sum `tau(chi, psi) = -sum_{a != 0} chi(a) psi(a)`, exact in
/// `Q(zeta_{lcm(p, ord chi)})`. Accumulates integer counts per pair of root
/// exponents, so the cyclotomic arithmetic is proportional to the value
/// order, not the field size.
pub fn gauss_sum(chi: &MultChar, psi: &AddChar) -> Result<CycNum> {
    let field = chi.field();
    assert_eq!(field.q(), psi.field().q(), "characters on different fields");
    let q = field.q();
    let p = field.p();
    let d = chi.order();
    let g = field.generator();
    // counts[e * p + t] over zeta_d^e zeta_p^t
    let mut counts = vec![0i64; (d * p) as usize];
    let step = (q - 1) / d; // chi(g^j) depends on j mod d through k*j
    let k = chi.exponent();
    let mut a = 1u64;
    for j in 0..q - 1 {
        let e = if d == 1 { 0 } else { (k as u128 * j as u128 % (q - 1) as u128) as u64 / step };
        let t = field.trace_to_prime(field.mul(psi.parameter(), a));
        counts[(e * p + t) as usize] += 1;
        a = field.mul(a, g);
    }
    let m = lcm_u64(d, p);
    let mut total = CycNum::zero();
    for e in 0..d {
        for t in 0..p {
            let c = counts[(e * p + t) as usize];
            if c == 0 {
                continue;
            }
            let expo = (e as i64) * ((m / d) as i64) + (t as i64) * ((m / p) as i64);
            let term = CycNum::root_of_unity(m, expo).scalar_mul(&Rat::from_integer(c.into()));
            total = total.add(&term);
        }
    }
    Ok(total.neg())
}

/// `tau(chi, psi) * tau(conj chi, psi)` — equals `chi(-1) q` for
/// nontrivial `chi` and nontrivial `psi` (the norm relation; an acceptance
/// check).
pub fn gauss_sum_norm(chi: &MultChar, psi: &AddChar) -> Result<CycNum> {
    let tau = gauss_sum(chi, psi)?;
    let tau_bar = gauss_sum(&chi.conj(), psi)?;
    Ok(tau.mul(&tau_bar))
}

/// The two sides of the Hasse–Davenport lifting relation over the degree-`n`
/// extension: `(tau(chi ∘ N, psi ∘ Tr), tau(chi, psi)^n)`. With the
/// sign-normalised `tau` the relation is exactly their equality — no stray
/// `(-1)^n` factors.
pub fn hasse_davenport_sides(
    chi: &MultChar,
    psi: &AddChar,
    n: u32,
) -> Result<(CycNum, CycNum)> {
    let base = chi.field();
    let ext = base.extension(n)?;
    let emb = Embedding::new(base, &ext)?;
    let lhs = gauss_sum(&chi.inflate(&emb), &psi.inflate(&emb))?;
    let tau = gauss_sum(chi, psi)?;
    let rhs = tau.pow(n as i64)?;
    Ok((lhs, rhs))
}

/// Valuation of `tau(chi)` by the digit-sum formula: with
/// `a = (q - 1 - k) mod (q - 1)` the exponent of the conjugate character,
/// `v(tau(chi_k)) = s_p(a) / (p - 1)` where `s_p` is the base-`p` digit sum.
/// Normalised by `v(p) = 1`; independent of the additive character.
pub fn stickelberger_valuation(chi: &MultChar) -> Rat {
    let q1 = chi.field().q() - 1;
    let p = chi.field().p();
    let a = (q1 - chi.exponent() % q1) % q1;
    let mut s = 0i64;
    let mut x = a;
    while x > 0 {
        s += (x % p) as i64;
        x /= p;
    }
    ratio(s, (p - 1) as i64)
}

/// Restriction of a character on an extension field to the base field
/// (precomposition with the inclusion `F_q^* ⊂ k^*`).
pub fn restrict_to_base(chi: &MultChar, base: &Arc<Fq>) -> Result<MultChar> {
    let ext = chi.field();
    let emb = Embedding::new(base, ext)?;
    let j0 = ext
        .dlog(emb.embed(base.generator()))?
        .expect("embedded generator is nonzero");
    let big = ext.q() - 1;
    let small = base.q() - 1;
    let t = (chi.exponent() as u128 * j0 as u128 % big as u128) as u64;
    debug_assert_eq!(t % (big / small), 0, "restricted exponent lies in the subgroup");
    Ok(MultChar::new(base, t / (big / small)))
}

/// A tuple of multiplicative characters on extensions `k_i` of a common
/// base whose restrictions to the base multiply to the trivial character.
pub struct JacobiDatum {
    base: Arc<Fq>,
    entries: Vec<MultChar>,
}

impl JacobiDatum {
    /// Validates the datum condition: `prod_i (theta_i | F_q^*) = 1`.
    pub fn new(base: &Arc<Fq>, entries: Vec<MultChar>) -> Result<JacobiDatum> {
        if entries.is_empty() {
            return Err(Error::invalid("empty Jacobi datum"));
        }
        let mut prod = MultChar::new(base, 0);
        for chi in &entries {
            if chi.field().p() != base.p() || chi.field().f() % base.f() != 0 {
                return Err(Error::invalid(format!(
                    "entry field F_{} is not an extension of F_{}",
                    chi.field().q(),
                    base.q()
                )));
            }
            prod = prod.mul(&restrict_to_base(chi, base)?);
        }
        if !prod.is_trivial() {
            return Err(Error::invalid(
                "Jacobi datum requires the restricted product of the entries to be trivial"
                    .to_string(),
            ));
        }
        Ok(JacobiDatum { base: base.clone(), entries })
    }

    pub fn base(&self) -> &Arc<Fq> {
        &self.base
    }

    pub fn entries(&self) -> &[MultChar] {
        &self.entries
    }

    /// The Jacobi sum of the datum against the additive character `psi_a`
    /// of the base (`a != 0`): the product over entries of
    /// `tau(conj(theta_i), psi_a ∘ Tr_{k_i/F_q})`.
    pub fn jacobi_sum_with(&self, a: u64) -> Result<CycNum> {
        if a == 0 {
            return Err(Error::invalid("additive character must be nontrivial"));
        }
        let psi = AddChar::new(&self.base, a);
        let mut prod = CycNum::one();
        for chi in &self.entries {
            let emb = Embedding::new(&self.base, chi.field())?;
            let tau = gauss_sum(&chi.conj(), &psi.inflate(&emb))?;
            prod = prod.mul(&tau);
        }
        Ok(prod)
    }

    /// The Jacobi sum against the canonical additive character. By the
    /// datum condition the value is independent of that choice.
    pub fn jacobi_sum(&self) -> Result<CycNum> {
        self.jacobi_sum_with(1)
    }
}

/// The class attached to an arbitrary tuple of characters on extensions of
/// the base (no datum condition): let `n` be the order of the product of
/// the restrictions; the conjugated tuple repeated `n` times is a Jacobi
/// datum, and the class is the `n`-th root of the class of its Jacobi sum.
pub fn jacobi_character_class(base: &Arc<Fq>, entries: &[MultChar]) -> Result<ThetaClass> {
    if entries.is_empty() {
        return Ok(ThetaClass::identity(base));
    }
    let mut prod = MultChar::new(base, 0);
    for chi in entries {
        prod = prod.mul(&restrict_to_base(chi, base)?);
    }
    let n = prod.order();
    let mut datum_entries = Vec::with_capacity(entries.len() * n as usize);
    for _ in 0..n {
        for chi in entries {
            datum_entries.push(chi.conj());
        }
    }
    let datum = JacobiDatum::new(base, datum_entries)?;
    let j = datum.jacobi_sum()?;
    Ok(ThetaClass::class_of(base, &j)?.pow(&ratio(1, n as i64)))
}

/// The direct Gauss-sum product route to the same class:
/// `cls(prod_i tau(theta_i, psi ∘ Tr_i))`. Kept separate from
/// [`jacobi_character_class`] so the two constructions can be compared as
/// an internal cross-check rather than collapsed.
pub fn gauss_sum_product_class(base: &Arc<Fq>, entries: &[MultChar]) -> Result<ThetaClass> {
    let psi = AddChar::canonical(base);
    let mut prod = CycNum::one();
    for chi in entries {
        let emb = Embedding::new(base, chi.field())?;
        let tau = gauss_sum(chi, &psi.inflate(&emb))?;
        prod = prod.mul(&tau);
    }
    ThetaClass::class_of(base, &prod)
}

/// Enumerate all valid Jacobi data over `base` with entries drawn from the
/// base field itself, of tuple length `len` (used by the exhaustive
/// psi-independence check at small `q`).
pub fn base_field_data(base: &Arc<Fq>, len: u32) -> Vec<Vec<u64>> {
    let q1 = base.q() - 1;
    let mut out = Vec::new();
    let mut tuple = vec![0u64; len as usize];
    loop {
        let sum: u128 = tuple.iter().map(|&k| k as u128).sum();
        if sum % q1 as u128 == 0 && tuple.iter().any(|&k| k != 0) {
            out.push(tuple.clone());
        }
        // odometer
        let mut i = 0;
        loop {
            if i == tuple.len() {
                return out;
            }
            tuple[i] += 1;
            if tuple[i] < q1 {
                break;
            }
            tuple[i] = 0;
            i += 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
