//! Rank-one sheaves on the projective line: the expression grammar, the
//! canonical normal form, ramification data, and the Euler characteristic.
//!
//! A sheaf is described by a product of elementary pieces over a fixed
//! finite base field `F_q`:
//!
//! ```text
//!     expr := term ("*" term)*
//!     term := "kummer(chi[" int "]," ratfunc ")"
//!           | "as(" scalar "," ratfunc ")"
//!           | "twist(" cycnum ")"
//!           | "const"
//! ```
//!
//! `kummer(chi[k], f)` is the Kummer sheaf of the multiplicative character
//! `chi_k` (defined by `chi_k(g^j) = zeta_{q-1}^{kj}` on the distinguished
//! generator `g`) along the rational function `f`; its Frobenius trace at a
//! point `y` over `F_{q^n}` is `chi_k(N_{F_{q^n}/F_q} f(y))`. `as(c, g)` is
//! the Artin–Schreier sheaf with trace `zeta_p^{Tr_{F_{q^n}}/F_p}(c g(y))`.
//! `twist(alpha)` scales the geometric Frobenius by the nonzero cyclotomic
//! number `alpha`, so its trace at a degree-`n` point is `alpha^n`.
//!
//! Normal form. Kummer data is factored: units fold into the twist, monic
//! irreducible factors carry a combined character exponent modulo `q - 1`,
//! and exponent-zero factors disappear (the sheaf is lisse there, and the
//! dropped factor contributes trivially to every trace). Artin–Schreier
//! data is combined into a single function `g` with `c = 1`, then reduced
//! modulo `h^p - h` at rational poles until every rational pole order is
//! prime to `p`. A `p`-divisible pole order surviving at a non-rational
//! place is rejected as unsupported; a constant residue folds into the
//! twist. The normal form determines the trace function exactly.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::{AddChar, Embedding, Fq, MultChar};
use crate::polynomial::{Place, Poly, RatFunc};

/// A rank-one sheaf on the projective line in normal form. Equality is
/// semantic: twists compare as cyclotomic values, not representations.
#[derive(Clone)]
pub struct Sheaf {
    field: Arc<Fq>,
    /// Monic irreducible -> combined character exponent in `1..q-1`.
    kummer: BTreeMap<Poly, u64>,
    /// Reduced Artin–Schreier function (nonconstant), taken against the
    /// canonical additive character.
    wild: Option<RatFunc>,
    /// Nonzero constant twist.
    twist: CycNum,
}

/// Ramification data of a sheaf at a single place.
#[derive(Clone, Debug)]
pub struct LocalData {
    pub place: Place,
    /// Generic rank (always 1 for sheaves in this crate).
    pub rank: u32,
    /// Dimension of the stalk at the place: 1 where the sheaf is lisse,
    /// 0 at a ramified point.
    pub stalk_dim: u32,
    /// Swan conductor: the pole order of the reduced wild part.
    pub swan: u32,
    /// Residue character on the residue field `k(x)`: the combined tame
    /// character inflated through the norm.
    pub residue_char: MultChar,
    /// `alpha^{deg x}` — the twist contribution at this place.
    pub twist_factor: CycNum,
}

impl LocalData {
    /// The Artin conductor `a_x = rank + swan - stalk_dim`.
    pub fn artin_conductor(&self) -> i64 {
        self.rank as i64 + self.swan as i64 - self.stalk_dim as i64
    }

    /// True when the sheaf fails to be lisse at the place.
    pub fn is_bad(&self) -> bool {
        self.stalk_dim < self.rank
    }

    /// True when the ramification is wild.
    pub fn is_wild(&self) -> bool {
        self.swan > 0
    }
}

impl Sheaf {
    /// The constant sheaf.
    pub fn constant(field: &Arc<Fq>) -> Sheaf {
        Sheaf {
            field: field.clone(),
            kummer: BTreeMap::new(),
            wild: None,
            twist: CycNum::one(),
        }
    }

    /// Builds and normalises a sheaf from raw components: Kummer pairs
    /// `(k, f)`, Artin–Schreier pairs `(c, g)` with `c` given as a field
    /// element, and constant twists.
    pub fn from_parts(
        field: &Arc<Fq>,
        kummer_parts: &[(u64, RatFunc)],
        as_parts: &[(u64, RatFunc)],
        twists: &[CycNum],
    ) -> Result<Sheaf> {
        let q1 = field.q() - 1;
        let mut twist = CycNum::one();
        let mut exps: BTreeMap<Poly, i128> = BTreeMap::new();

        for (k, f) in kummer_parts {
            let k = k % q1;
            if f.is_zero() {
                return Err(Error::invalid("kummer function must be nonzero"));
            }
            if k == 0 {
                continue;
            }
            let chi = MultChar::new(field, k);
            // factor numerator and denominator; fold units into the twist
            let mut unit = field.inv(f.den().leading())?;
            unit = field.mul(unit, f.num().leading());
            twist = twist.mul(&chi.eval(unit)?);
            let num_fact = f.num().factor()?;
            for (pi, e) in num_fact.factors {
                *exps.entry(pi).or_insert(0) += k as i128 * e as i128;
            }
            let den_fact = f.den().factor()?;
            for (pi, e) in den_fact.factors {
                *exps.entry(pi).or_insert(0) -= k as i128 * e as i128;
            }
        }
        let mut kummer = BTreeMap::new();
        for (pi, e) in exps {
            let k = e.rem_euclid(q1 as i128) as u64;
            if k != 0 {
                kummer.insert(pi, k);
            }
        }

        // combine Artin–Schreier parts into one function against psi_1
        let mut g = RatFunc::from_poly(Poly::zero(field));
        for (c, gi) in as_parts {
            g = g.add(&gi.scalar_mul(*c));
        }
        let wild = if g.is_zero() {
            None
        } else {
            let reduced = reduce_artin_schreier(field, g)?;
            if reduced.is_constant() {
                let c0 = reduced.eval(0).expect("constant function evaluates");
                twist = twist.mul(&AddChar::canonical(field).eval(c0));
                None
            } else {
                Some(reduced)
            }
        };

        for alpha in twists {
            if alpha.is_zero() {
                return Err(Error::invalid("twist must be nonzero"));
            }
            twist = twist.mul(alpha);
        }

        Ok(Sheaf { field: field.clone(), kummer, wild, twist })
    }

    /// Parses the sheaf expression grammar.
    pub fn parse(field: &Arc<Fq>, src: &str) -> Result<Sheaf> {
        let mut kummer_parts = Vec::new();
        let mut as_parts = Vec::new();
        let mut twists = Vec::new();
        let mut p = Cursor { s: src.as_bytes(), i: 0 };
        loop {
            p.skip_ws();
            if p.try_word("const") {
                // contributes nothing
            } else if p.try_word("kummer") {
                p.expect(b'(')?;
                p.skip_ws();
                if !p.try_word("chi") {
                    return Err(Error::parse("expected chi[..] in kummer(..)"));
                }
                p.expect(b'[')?;
                let k = p.int()?;
                if k < 0 {
                    return Err(Error::parse("character index must be nonnegative"));
                }
                p.expect(b']')?;
                p.expect(b',')?;
                let inner = p.balanced_until_close()?;
                let f = RatFunc::parse(field, &inner)?;
                kummer_parts.push((k as u64, f));
            } else if p.try_word("as") {
                p.expect(b'(')?;
                let c = p.int()?;
                p.expect(b',')?;
                let inner = p.balanced_until_close()?;
                let g = RatFunc::parse(field, &inner)?;
                as_parts.push((field.from_int(c), g));
            } else if p.try_word("twist") {
                p.expect(b'(')?;
                let inner = p.balanced_until_close()?;
                twists.push(parse_cycnum(&inner)?);
            } else {
                return Err(Error::parse(format!(
                    "expected kummer/as/twist/const at byte {} of sheaf expression",
                    p.i
                )));
            }
            p.skip_ws();
            if p.i >= p.s.len() {
                break;
            }
            p.expect(b'*')?;
        }
        Sheaf::from_parts(field, &kummer_parts, &as_parts, &twists)
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    /// The factored Kummer data: monic irreducible -> exponent in `1..q-1`.
    pub fn kummer_factors(&self) -> &BTreeMap<Poly, u64> {
        &self.kummer
    }

    /// The reduced Artin–Schreier function, if any.
    pub fn wild_part(&self) -> Option<&RatFunc> {
        self.wild.as_ref()
    }

    pub fn twist(&self) -> &CycNum {
        &self.twist
    }

    /// Generic rank (always 1).
    pub fn rank(&self) -> u32 {
        1
    }

    /// True when the sheaf is geometrically constant (a pure twist).
    pub fn is_geometrically_constant(&self) -> bool {
        self.kummer.is_empty() && self.wild.is_none()
    }

    /// Exponent of the combined tame character at a place, in `0..q-1`.
    /// At a finite place this is the stored exponent; at infinity it is
    /// `-sum_pi k_pi deg(pi) mod (q-1)`.
    pub fn tame_exponent(&self, place: &Place) -> u64 {
        let q1 = self.field.q() - 1;
        match place {
            Place::Finite(pi) => self.kummer.get(pi).copied().unwrap_or(0),
            Place::Infinity => {
                let mut total: i128 = 0;
                for (pi, k) in &self.kummer {
                    total -= *k as i128 * pi.deg().unwrap_or(0) as i128;
                }
                total.rem_euclid(q1 as i128) as u64
            }
        }
    }

    /// Ramification data at a place.
    pub fn local_data(&self, place: &Place) -> Result<LocalData> {
        let deg = place.deg();
        let k = self.tame_exponent(place);
        let swan = match &self.wild {
            Some(g) => {
                let ord = g.ord_at(place);
                if ord < 0 {
                    (-ord) as u32
                } else {
                    0
                }
            }
            None => 0,
        };
        let residue_char = if deg == 1 {
            MultChar::new(&self.field, k)
        } else {
            let ext = self.field.extension(deg)?;
            let emb = Embedding::new(&self.field, &ext)?;
            MultChar::new(&self.field, k).inflate(&emb)
        };
        let stalk_dim = if k == 0 && swan == 0 { 1 } else { 0 };
        let twist_factor = self.twist.pow(deg as i64)?;
        Ok(LocalData {
            place: place.clone(),
            rank: 1,
            stalk_dim,
            swan,
            residue_char,
            twist_factor,
        })
    }

    /// The places where the sheaf is not lisse, sorted.
    pub fn bad_places(&self) -> Vec<Place> {
        let mut out: Vec<Place> = Vec::new();
        for pi in self.kummer.keys() {
            out.push(Place::Finite(pi.clone()));
        }
        if let Some(g) = &self.wild {
            for (pi, _) in g.den().factor().expect("denominator factors").factors {
                let place = Place::Finite(pi);
                if !out.contains(&place) {
                    out.push(place);
                }
            }
        }
        let infinity_bad = self.tame_exponent(&Place::Infinity) != 0
            || self.wild.as_ref().map_or(false, |g| g.ord_at(&Place::Infinity) < 0);
        if infinity_bad {
            out.push(Place::Infinity);
        }
        out.sort();
        out
    }

    /// The Euler characteristic of the middle extension to the projective
    /// line: `rank * (2 - sum deg x) - sum deg(x) swan_x` over bad `x`
    /// (genus zero).
    pub fn euler_characteristic(&self) -> Result<i64> {
        let bad = self.bad_places();
        let mut chi: i64 = 2;
        for x in &bad {
            let data = self.local_data(x)?;
            chi -= x.deg() as i64 * (1 + data.swan as i64);
        }
        Ok(chi)
    }

    /// Base change to the degree-`n` extension: Kummer factors split and
    /// their characters inflate through the norm, the wild function keeps
    /// its coefficients, and the twist becomes `alpha^n`.
    pub fn base_change(&self, n: u32) -> Result<Sheaf> {
        let ext = self.field.extension(n)?;
        let emb = Embedding::new(&self.field, &ext)?;
        let mut kummer_parts = Vec::new();
        for (pi, k) in &self.kummer {
            let lifted = embed_poly(&emb, pi);
            let chi_ext = MultChar::new(&self.field, *k).inflate(&emb);
            for (factor, e) in lifted.factor()?.factors {
                debug_assert_eq!(e, 1, "irreducible polynomials stay squarefree");
                kummer_parts.push((chi_ext.exponent(), RatFunc::from_poly(factor)));
            }
        }
        let as_parts = match &self.wild {
            Some(g) => {
                let num = embed_poly(&emb, g.num());
                let den = embed_poly(&emb, g.den());
                vec![(1, RatFunc::new(num, den)?)]
            }
            None => Vec::new(),
        };
        let twists = vec![self.twist.pow(n as i64)?];
        Sheaf::from_parts(&ext, &kummer_parts, &as_parts, &twists)
    }
}

/// Embeds a polynomial coefficientwise along a field embedding.
pub fn embed_poly(emb: &Embedding, p: &Poly) -> Poly {
    Poly::new(emb.ext(), p.coeffs().iter().map(|&c| emb.embed(c)).collect())
}

/// Reduces an Artin–Schreier function modulo `h^p - h` until every
/// rational pole (finite rational points and infinity) has order prime to
/// `p`. Rejects `p`-divisible pole orders at non-rational places.
fn reduce_artin_schreier(field: &Arc<Fq>, mut g: RatFunc) -> Result<RatFunc> {
    let p = field.p();
    let root_exp = field.q() / p; // z -> z^{q/p} inverts Frobenius

    // non-rational poles cannot be reduced by a rational substitution
    for (pi, e) in g.den().factor()?.factors {
        if pi.deg() == Some(1) {
            continue;
        }
        if e as u64 % p == 0 {
            return Err(Error::UnsupportedWildPoint(format!(
                "pole of order {e} at non-rational place ({pi}) is divisible by p = {p}"
            )));
        }
    }

    // rational finite poles
    let mut rational_poles: Vec<u64> = Vec::new();
    for (pi, _) in g.den().factor()?.factors {
        if pi.deg() == Some(1) {
            // pi = x - a with a = -constant coefficient
            rational_poles.push(field.neg(pi.coeffs()[0]));
        }
    }
    for a in rational_poles {
        let pi = Poly::from_ints(field, &[0, 1]).sub(&Poly::constant(field, a));
        loop {
            let place = Place::finite(pi.clone())?;
            let ord = g.ord_at(&place);
            if ord >= 0 || (-ord) as u64 % p != 0 {
                break;
            }
            let m = (-ord) as u64;
            // leading coefficient of the principal part: ((x-a)^m g)(a)
            let shifted = g.mul(&RatFunc::from_poly(pi.pow(m)));
            let c = shifted.eval(a).expect("pole cleared by multiplication");
            let b = field.pow(c, root_exp);
            let h = RatFunc::new(Poly::constant(field, b), pi.pow(m / p))?;
            g = g.sub(&h.pow(p as i64)?.sub(&h));
        }
    }

    // infinity
    loop {
        let ord = g.ord_at(&Place::Infinity);
        if ord >= 0 || (-ord) as u64 % p != 0 {
            break;
        }
        let m = (-ord) as u64;
        let c = g.unit_value_at_infinity();
        let b = field.pow(c, root_exp);
        let mut coeffs = vec![0u64; (m / p) as usize + 1];
        coeffs[(m / p) as usize] = b;
        let h = RatFunc::from_poly(Poly::new(field, coeffs));
        g = g.sub(&h.pow(p as i64)?.sub(&h));
    }

    Ok(g)
}

// ---------------------------------------------------------------------------
// Cyclotomic number literals
// ---------------------------------------------------------------------------

/// Parses a cyclotomic number literal: sums and products of rationals and
/// `zeta[m]^e` atoms, e.g. `2/3 - 1*zeta[12]^5` or `zeta[8]`.
pub fn parse_cycnum(src: &str) -> Result<CycNum> {
    let mut p = Cursor { s: src.as_bytes(), i: 0 };
    let v = cyc_expr(&mut p)?;
    p.skip_ws();
    if p.i < p.s.len() {
        return Err(Error::parse(format!(
            "trailing input in cyclotomic literal at byte {}",
            p.i
        )));
    }
    Ok(v)
}

/// Renders a cyclotomic number in the literal grammar accepted by
/// [`parse_cycnum`].
pub fn render_cycnum(v: &CycNum) -> String {
    if let Some(r) = v.to_rat() {
        return format!("{r}");
    }
    let m = v.order();
    let mut out = String::new();
    for (e, c) in v.coeffs().iter().enumerate() {
        if c == &crate::rat(0) {
            continue;
        }
        let mag = if c < &crate::rat(0) { -c.clone() } else { c.clone() };
        if out.is_empty() {
            if c < &crate::rat(0) {
                out.push_str("-");
            }
        } else if c < &crate::rat(0) {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        if e == 0 {
            out.push_str(&format!("{mag}"));
        } else if mag == crate::rat(1) {
            out.push_str(&format!("zeta[{m}]^{e}"));
        } else {
            out.push_str(&format!("{mag}*zeta[{m}]^{e}"));
        }
    }
    out
}

fn cyc_expr(p: &mut Cursor) -> Result<CycNum> {
    p.skip_ws();
    let negate = p.try_byte(b'-');
    let mut acc = cyc_term(p)?;
    if negate {
        acc = acc.neg();
    }
    loop {
        p.skip_ws();
        if p.try_byte(b'+') {
            acc = acc.add(&cyc_term(p)?);
        } else if p.try_byte(b'-') {
            acc = acc.sub(&cyc_term(p)?);
        } else {
            return Ok(acc);
        }
    }
}

fn cyc_term(p: &mut Cursor) -> Result<CycNum> {
    let mut acc = cyc_atom(p)?;
    loop {
        p.skip_ws();
        if p.try_byte(b'*') {
            acc = acc.mul(&cyc_atom(p)?);
        } else if p.try_byte(b'/') {
            acc = acc.div(&cyc_atom(p)?)?;
        } else {
            return Ok(acc);
        }
    }
}

fn cyc_atom(p: &mut Cursor) -> Result<CycNum> {
    p.skip_ws();
    if p.try_word("zeta") {
        p.expect(b'[')?;
        let m = p.int()?;
        if m <= 0 {
            return Err(Error::parse("zeta order must be positive"));
        }
        p.expect(b']')?;
        let e = if p.try_byte(b'^') { p.int()? } else { 1 };
        return Ok(CycNum::root_of_unity(m as u64, e));
    }
    if p.try_byte(b'(') {
        let v = cyc_expr(p)?;
        p.expect(b')')?;
        return Ok(v);
    }
    let n = p.int()?;
    Ok(CycNum::from_int(n))
}

// ---------------------------------------------------------------------------
// Cursor
// ---------------------------------------------------------------------------

struct Cursor<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && (self.s[self.i] as char).is_whitespace() {
            self.i += 1;
        }
    }

    fn try_byte(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.i < self.s.len() && self.s[self.i] == b {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.try_byte(b) {
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected '{}' at byte {}",
                b as char, self.i
            )))
        }
    }

    /// Consumes a keyword if present (must not be followed by an
    /// identifier character).
    fn try_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let end = self.i + w.len();
        if end > self.s.len() || &self.s[self.i..end] != w.as_bytes() {
            return false;
        }
        if end < self.s.len() && (self.s[end].is_ascii_alphanumeric() || self.s[end] == b'_') {
            return false;
        }
        self.i = end;
        true
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.i;
        if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i] == b'+') {
            self.i += 1;
        }
        let digits = self.i;
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        if self.i == digits {
            return Err(Error::parse(format!("expected integer at byte {start}")));
        }
        std::str::from_utf8(&self.s[start..self.i])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::parse("integer literal out of range"))
    }

    /// Consumes up to (and including) the `)` matching an already-consumed
    /// `(`; returns the inner text.
    fn balanced_until_close(&mut self) -> Result<String> {
        let start = self.i;
        let mut depth = 1usize;
        while self.i < self.s.len() {
            match self.s[self.i] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        let inner = std::str::from_utf8(&self.s[start..self.i])
                            .map_err(|_| Error::parse("non-utf8 input"))?
                            .to_string();
                        self.i += 1;
                        return Ok(inner);
                    }
                }
                _ => {}
            }
            self.i += 1;
        }
        Err(Error::parse("unbalanced parentheses"))
    }
}

impl PartialEq for Sheaf {
    fn eq(&self, other: &Sheaf) -> bool {
        self.field.q() == other.field.q()
            && self.kummer == other.kummer
            && self.wild == other.wild
            && self.twist.same_value(&other.twist)
    }
}

impl fmt::Display for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        for (pi, k) in &self.kummer {
            parts.push(format!("kummer(chi[{k}], {pi})"));
        }
        if let Some(g) = &self.wild {
            parts.push(format!("as(1, {g})"));
        }
        if !self.twist.is_one() {
            parts.push(format!("twist({})", render_cycnum(&self.twist)));
        }
        if parts.is_empty() {
            parts.push("const".to_string());
        }
        write!(f, "{}", parts.join(" * "))
    }
}

impl fmt::Debug for Sheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn f(p: u64, f_: u32) -> Arc<Fq> {
        Fq::new(p, f_).unwrap()
    }

    #[test]
    fn parse_and_normalise_kummer() {
        let f5 = f(5, 1);
        let sheaf = Sheaf::parse(&f5, "kummer(chi[1], x^2) * const").unwrap();
        let x = Poly::from_ints(&f5, &[0, 1]);
        assert_eq!(sheaf.kummer_factors().get(&x), Some(&2));
        assert!(sheaf.wild_part().is_none());
        assert!(sheaf.twist().is_one());
    }

    #[test]
    fn units_fold_into_the_twist() {
        let f7 = f(7, 1);
        let sheaf = Sheaf::parse(&f7, "kummer(chi[1], 3*x)").unwrap();
        let chi = MultChar::new(&f7, 1);
        assert!(sheaf.twist().same_value(&chi.eval(3).unwrap()));
        let x = Poly::from_ints(&f7, &[0, 1]);
        assert_eq!(sheaf.kummer_factors().get(&x), Some(&1));
    }

    #[test]
    fn exponents_combine_and_trivial_factors_drop() {
        let f5 = f(5, 1);
        // chi[2] twice on x and chi[1] four times: exponent 2*1 + ... use
        // product of two kummer terms: combined exponent 2+2 = 4 = 0 mod 4
        let sheaf = Sheaf::parse(&f5, "kummer(chi[2], x) * kummer(chi[2], x)").unwrap();
        assert!(sheaf.kummer_factors().is_empty());
        assert!(sheaf.is_geometrically_constant());
    }

    #[test]
    fn artin_schreier_pole_reduction_at_zero() {
        let f3 = f(3, 1);
        let sheaf = Sheaf::parse(&f3, "as(1, 1/x^3)").unwrap();
        let expected = RatFunc::parse(&f3, "1/x").unwrap();
        assert_eq!(sheaf.wild_part(), Some(&expected));
        let zero = Place::rational(&f3, 0);
        assert_eq!(sheaf.local_data(&zero).unwrap().swan, 1);
    }

    #[test]
    fn artin_schreier_pole_reduction_at_infinity() {
        let f3 = f(3, 1);
        let sheaf = Sheaf::parse(&f3, "as(1, x^3)").unwrap();
        let expected = RatFunc::parse(&f3, "x").unwrap();
        assert_eq!(sheaf.wild_part(), Some(&expected));
        assert_eq!(sheaf.local_data(&Place::Infinity).unwrap().swan, 1);
        // x^9 reduces all the way to x as well
        let sheaf9 = Sheaf::parse(&f3, "as(1, x^9)").unwrap();
        assert_eq!(sheaf9.wild_part(), Some(&expected));
    }

    #[test]
    fn unsupported_wild_point_is_rejected() {
        let f3 = f(3, 1);
        let err = Sheaf::parse(&f3, "as(1, 1/(x^2+1)^3)").unwrap_err();
        assert!(matches!(err, Error::UnsupportedWildPoint(_)), "got {err:?}");
    }

    #[test]
    fn constant_artin_schreier_residue_folds_into_twist() {
        let f3 = f(3, 1);
        // x^3 - x + 1 = (h^3 - h) + 1 with h = x: reduces to constant 1
        let sheaf = Sheaf::parse(&f3, "as(1, x^3 + 2*x + 1)").unwrap();
        assert!(sheaf.wild_part().is_none());
        let psi = AddChar::canonical(&f3);
        assert!(sheaf.twist().same_value(&psi.eval(1)));
    }

    #[test]
    fn bad_places_and_euler_characteristic() {
        let f5 = f(5, 1);
        let sheaf = Sheaf::parse(&f5, "kummer(chi[1], x^2 + 4*x)").unwrap();
        // x^2+4x = x(x+4): bad at 0, 1 (root of x+4 = x-1), and infinity
        // (combined degree 2, exponent -2 = 2 mod 4)
        let bad = sheaf.bad_places();
        assert_eq!(bad.len(), 3);
        assert!(bad.contains(&Place::Infinity));
        assert_eq!(sheaf.euler_characteristic().unwrap(), -1);
        assert_eq!(sheaf.tame_exponent(&Place::Infinity), 2);

        // chi[2] on the same function: infinity becomes good
        let sheaf2 = Sheaf::parse(&f5, "kummer(chi[2], x^2 + 4*x)").unwrap();
        let bad2 = sheaf2.bad_places();
        assert_eq!(bad2.len(), 2);
        assert!(!bad2.contains(&Place::Infinity));
        assert_eq!(sheaf2.euler_characteristic().unwrap(), 0);
    }

    #[test]
    fn wild_euler_characteristic() {
        // as(1, x) on the affine line: bad only at infinity with swan 1:
        // chi = 2 - 1*(1 + 1) = 0
        let f3 = f(3, 1);
        let sheaf = Sheaf::parse(&f3, "as(1, x)").unwrap();
        assert_eq!(sheaf.bad_places(), vec![Place::Infinity]);
        assert_eq!(sheaf.euler_characteristic().unwrap(), 0);
    }

    #[test]
    fn residue_character_is_the_norm_inflation() {
        let f3 = f(3, 1);
        let sheaf = Sheaf::parse(&f3, "kummer(chi[1], x^2 + 1)").unwrap();
        let pi = Poly::from_ints(&f3, &[1, 0, 1]);
        let place = Place::finite(pi).unwrap();
        let data = sheaf.local_data(&place).unwrap();
        assert_eq!(data.residue_char.field().q(), 9);
        let f9 = f3.extension(2).unwrap();
        let emb = Embedding::new(&f3, &f9).unwrap();
        let chi = MultChar::new(&f3, 1);
        for z in 1..9 {
            let lhs = data.residue_char.eval(z).unwrap();
            let rhs = chi.eval(emb.norm(z)).unwrap();
            assert!(lhs.same_value(&rhs), "residue character is chi ∘ N at z = {z}");
        }
        assert_eq!(data.stalk_dim, 0);
        assert_eq!(data.artin_conductor(), 1);
    }

    #[test]
    fn base_change_splits_places_and_inflates() {
        let f3 = f(3, 1);
        let sheaf = Sheaf::parse(&f3, "kummer(chi[1], x^2 + 1) * twist(2)").unwrap();
        let bc = sheaf.base_change(2).unwrap();
        assert_eq!(bc.field().q(), 9);
        assert_eq!(bc.kummer_factors().len(), 2, "x^2+1 splits over F_9");
        for k in bc.kummer_factors().values() {
            assert_eq!(*k, 4, "inflated quadratic character has exponent 4");
        }
        assert!(bc.twist().same_value(&CycNum::from_int(4)));
    }

    #[test]
    fn display_round_trips_through_parse() {
        let f5 = f(5, 1);
        for src in [
            "kummer(chi[1], x^2 + 4*x) * as(1, 1/x) * twist(zeta[8])",
            "kummer(chi[3], (x^2 + 2)/(x + 1))",
            "const",
            "twist(2/3 - 1*zeta[12]^2)",
        ] {
            let sheaf = Sheaf::parse(&f5, src).unwrap();
            let rendered = sheaf.to_string();
            let reparsed = Sheaf::parse(&f5, &rendered).unwrap();
            assert_eq!(sheaf, reparsed, "round trip failed for {src:?} -> {rendered:?}");
        }
    }

    #[test]
    fn cycnum_literals() {
        let v = parse_cycnum("2/3 - 1*zeta[12]^2").unwrap();
        let expected =
            CycNum::from_rat(crate::ratio(2, 3)).sub(&CycNum::root_of_unity(12, 2));
        assert!(v.same_value(&expected));
        assert!(parse_cycnum("zeta[8]^-1")
            .unwrap()
            .same_value(&CycNum::root_of_unity(8, -1)));
        assert!(parse_cycnum("(1 + zeta[3]) * 2").unwrap().same_value(
            &CycNum::one().add(&CycNum::root_of_unity(3, 1)).scalar_mul(&rat(2))
        ));
        assert!(parse_cycnum("zeta[5] + nonsense").is_err());
    }
}
