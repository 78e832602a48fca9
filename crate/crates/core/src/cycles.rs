//! Characteristic cycles and epsilon cycles of rank-one sheaves, their
//! intersection theory, twist laws, external products, and the closed
//! formula for tame normal-crossings data.
//!
//! The characteristic cycle of a sheaf on the line lives on the cotangent
//! space and is supported on the zero section and the fibers over the bad
//! points:
//!
//! ```text
//!     CC = -rank [Zero] - sum_x a_x [Fiber x],      a_x = rank + sw_x - stalk_x.
//! ```
//!
//! The epsilon cycle refines the integer coefficients to classes: the zero
//! section carries `cls(det twist)^{-1} cls(q)^{-1/2}` and the fiber over
//! `x` carries `eps0_corrected(x)^{-1/deg x}`, the det-corrected local
//! factor taken with respect to a form with neither zero nor pole at `x`.
//! Each coefficient remembers its underlying multiplicity, because the
//! twist laws scale a coefficient by the twist class raised to that
//! multiplicity.
//!
//! Intersecting with the zero section recovers global invariants: on the
//! line `(CC, Z) = chi` (so `deg L = -(CC, Z)`) and the multiplicative
//! intersection of the epsilon cycle is the class of the determinant of
//! cohomology. Intersecting with the graph of `df` localises instead:
//! `(Zero, df)_u = ord_u(f')` and `(Fiber x, df)_u = [x = u]`, which turns
//! the cycles into Milnor-number and local-epsilon predictions for the
//! vanishing cycles of `f`.
//!
//! Products of up to three curve factors are supported through componentwise
//! products; the normal-crossings constructor below writes down the
//! epsilon cycle of a tame rank-one sheaf on an `n`-dimensional coordinate
//! torus directly:
//!
//! ```text
//!     coeff(B) = det^{(-1)^n} chi_cyc^{(|B|-n)/2 (-1)^n} prod_{a in B} cls(tau(chi_a))^{(-1)^n},
//! ```
//!
//! with multiplicity `(-1)^n` on every stratum `B` of the crossing divisor.
//! For `n = 1` this is exactly the curve cycle on the affine line, and for
//! `n = 2` it agrees with the external product of two curve cycles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::charsums::gauss_sum;
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::{AddChar, Fq, MultChar};
use crate::local_epsilon::{
    change_of_form_factor, local_epsilon_corrected, wild_local_epsilon_via_global, Form,
};
use crate::polynomial::{Place, RatFunc};
use crate::sheaf::Sheaf;
use crate::theta::ThetaClass;
use crate::{rat, ratio, Rat};

/// A component of the singular support on one curve factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveComponent {
    /// The zero section of the cotangent space.
    Zero,
    /// The cotangent fiber over a closed point.
    Fiber(Place),
}

impl CurveComponent {
    /// Intersection number with the zero section on the line:
    /// `(Zero, Z) = 2g - 2 = -2` and `(Fiber x, Z) = deg x`.
    fn zero_section_pairing(&self) -> i64 {
        match self {
            CurveComponent::Zero => -2,
            CurveComponent::Fiber(x) => x.deg() as i64,
        }
    }
}

impl fmt::Display for CurveComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurveComponent::Zero => write!(f, "Zero"),
            CurveComponent::Fiber(x) => write!(f, "Fiber {x}"),
        }
    }
}

/// A component on a product of curve factors: one curve component per
/// factor.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Component(pub Vec<CurveComponent>);

impl Component {
    pub fn factors(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " x ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// The characteristic cycle: integer multiplicities on components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharCycle {
    factors: usize,
    coeffs: BTreeMap<Component, i64>,
}

/// An epsilon-cycle coefficient: the class together with the underlying
/// characteristic-cycle multiplicity it refines.
#[derive(Clone, Debug)]
pub struct EpsCoeff {
    pub class: ThetaClass,
    pub multiplicity: i64,
}

/// The epsilon cycle: class-valued coefficients on components.
#[derive(Clone, Debug)]
pub struct EpsilonCycle {
    base: Arc<Fq>,
    factors: usize,
    coeffs: BTreeMap<Component, EpsCoeff>,
}

impl CharCycle {
    pub fn new(factors: usize, coeffs: BTreeMap<Component, i64>) -> Result<CharCycle> {
        for c in coeffs.keys() {
            if c.factors() != factors {
                return Err(Error::invalid("component arity mismatch"));
            }
        }
        Ok(CharCycle { factors, coeffs: coeffs.into_iter().filter(|(_, m)| *m != 0).collect() })
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn coefficients(&self) -> &BTreeMap<Component, i64> {
        &self.coeffs
    }

    pub fn coefficient(&self, c: &Component) -> i64 {
        self.coeffs.get(c).copied().unwrap_or(0)
    }

    /// `(CC, Z)`: curve factors only. Equals the Euler characteristic.
    pub fn intersect_zero_section(&self) -> Result<i64> {
        if self.factors != 1 {
            return Err(Error::invalid("zero-section intersection is for curve cycles"));
        }
        Ok(self
            .coeffs
            .iter()
            .map(|(c, m)| m * c.0[0].zero_section_pairing())
            .sum())
    }

    /// `(CC, df)_u`: the local intersection with the graph of `df` at the
    /// finite place `u`. `(Zero, df)_u = ord_u(f')`,
    /// `(Fiber x, df)_u = [x = u]`.
    pub fn intersect_df_at(&self, f: &RatFunc, u: &Place) -> Result<i64> {
        if self.factors != 1 {
            return Err(Error::invalid("df intersection is for curve cycles"));
        }
        let fp = f.derivative();
        if fp.is_zero() {
            return Err(Error::invalid("df vanishes identically"));
        }
        let mut acc = 0;
        for (c, m) in &self.coeffs {
            acc += m * match &c.0[0] {
                CurveComponent::Zero => fp.ord_at(u),
                CurveComponent::Fiber(x) => i64::from(x == u),
            };
        }
        Ok(acc)
    }

    /// Componentwise product cycle: multiplicity `m_a n_b` at `(a, b)`.
    pub fn external_product(&self, other: &CharCycle) -> Result<CharCycle> {
        if self.factors + other.factors > 3 {
            return Err(Error::invalid("products of more than three curve factors"));
        }
        let mut coeffs = BTreeMap::new();
        for (a, m) in &self.coeffs {
            for (b, n) in &other.coeffs {
                let mut v = a.0.clone();
                v.extend(b.0.iter().cloned());
                coeffs.insert(Component(v), m * n);
            }
        }
        CharCycle::new(self.factors + other.factors, coeffs)
    }
}

impl EpsilonCycle {
    pub fn new(
        base: &Arc<Fq>,
        factors: usize,
        coeffs: BTreeMap<Component, EpsCoeff>,
    ) -> Result<EpsilonCycle> {
        for c in coeffs.keys() {
            if c.factors() != factors {
                return Err(Error::invalid("component arity mismatch"));
            }
        }
        Ok(EpsilonCycle { base: base.clone(), factors, coeffs })
    }

    pub fn base(&self) -> &Arc<Fq> {
        &self.base
    }

    pub fn factors(&self) -> usize {
        self.factors
    }

    pub fn coefficients(&self) -> &BTreeMap<Component, EpsCoeff> {
        &self.coeffs
    }

    pub fn coefficient(&self, c: &Component) -> Option<&EpsCoeff> {
        self.coeffs.get(c)
    }

    /// The underlying characteristic cycle.
    pub fn char_cycle(&self) -> Result<CharCycle> {
        CharCycle::new(
            self.factors,
            self.coeffs.iter().map(|(c, e)| (c.clone(), e.multiplicity)).collect(),
        )
    }

    /// `(E, Z)` multiplicatively: `coeff_Z^{2g-2} prod coeff_{F_x}^{deg x}`.
    /// Equals the class of the determinant of cohomology.
    pub fn intersect_zero_section(&self) -> Result<ThetaClass> {
        if self.factors != 1 {
            return Err(Error::invalid("zero-section intersection is for curve cycles"));
        }
        let mut acc = ThetaClass::identity(&self.base);
        for (c, e) in &self.coeffs {
            acc = acc.mul(&e.class.pow_int(c.0[0].zero_section_pairing()));
        }
        Ok(acc)
    }

    /// `(E, df)_u` multiplicatively: the zero coefficient to the power
    /// `ord_u(f')` times the fiber coefficient at `u`.
    pub fn intersect_df_at(&self, f: &RatFunc, u: &Place) -> Result<ThetaClass> {
        if self.factors != 1 {
            return Err(Error::invalid("df intersection is for curve cycles"));
        }
        let fp = f.derivative();
        if fp.is_zero() {
            return Err(Error::invalid("df vanishes identically"));
        }
        let mut acc = ThetaClass::identity(&self.base);
        for (c, e) in &self.coeffs {
            match &c.0[0] {
                CurveComponent::Zero => acc = acc.mul(&e.class.pow_int(fp.ord_at(u))),
                CurveComponent::Fiber(x) => {
                    if x == u {
                        acc = acc.mul(&e.class);
                    }
                }
            }
        }
        Ok(acc)
    }

    /// External product: class `xi_a^{n_b} zeta_b^{m_a}` and multiplicity
    /// `m_a n_b` at the component `(a, b)`.
    pub fn external_product(&self, other: &EpsilonCycle) -> Result<EpsilonCycle> {
        if self.factors + other.factors > 3 {
            return Err(Error::invalid("products of more than three curve factors"));
        }
        let mut coeffs = BTreeMap::new();
        for (a, ea) in &self.coeffs {
            for (b, eb) in &other.coeffs {
                let mut v = a.0.clone();
                v.extend(b.0.iter().cloned());
                let class = ea
                    .class
                    .pow_int(eb.multiplicity)
                    .mul(&eb.class.pow_int(ea.multiplicity));
                coeffs.insert(
                    Component(v),
                    EpsCoeff { class, multiplicity: ea.multiplicity * eb.multiplicity },
                );
            }
        }
        EpsilonCycle::new(&self.base, self.factors + other.factors, coeffs)
    }

    /// Twist law for a Tate twist by the rational amount `r`: each
    /// coefficient scales by `cls(q)^{-r m_a}`. Half-integral twists are
    /// allowed.
    pub fn tate_twist(&self, r: &Rat) -> EpsilonCycle {
        let coeffs = self
            .coeffs
            .iter()
            .map(|(c, e)| {
                let scale =
                    ThetaClass::q_power(&self.base, -r * Rat::from_integer(e.multiplicity.into()));
                (
                    c.clone(),
                    EpsCoeff { class: e.class.mul(&scale), multiplicity: e.multiplicity },
                )
            })
            .collect();
        EpsilonCycle { base: self.base.clone(), factors: self.factors, coeffs }
    }

    /// Twist law for a constant twist by `alpha`: each coefficient scales
    /// by `cls(alpha)^{m_a}`.
    pub fn constant_twist(&self, alpha: &CycNum) -> Result<EpsilonCycle> {
        let alpha_cls = ThetaClass::class_of(&self.base, alpha)?;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(c, e)| {
                (
                    c.clone(),
                    EpsCoeff {
                        class: e.class.mul(&alpha_cls.pow_int(e.multiplicity)),
                        multiplicity: e.multiplicity,
                    },
                )
            })
            .collect();
        Ok(EpsilonCycle { base: self.base.clone(), factors: self.factors, coeffs })
    }
}

impl fmt::Display for CharCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (c, m) in &self.coeffs {
            if first {
                write!(f, "{m} {c}")?;
                first = false;
            } else if *m < 0 {
                write!(f, " - {} {c}", -m)?;
            } else {
                write!(f, " + {m} {c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for EpsilonCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "(empty)");
        }
        let mut first = true;
        for (c, e) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({}) {c}", e.class)?;
        }
        Ok(())
    }
}

/// The characteristic cycle of a sheaf on the line.
pub fn char_cycle(sheaf: &Sheaf) -> Result<CharCycle> {
    let mut coeffs = BTreeMap::new();
    coeffs.insert(
        Component(vec![CurveComponent::Zero]),
        -(sheaf.rank() as i64),
    );
    for x in sheaf.bad_places() {
        let data = sheaf.local_data(&x)?;
        coeffs.insert(
            Component(vec![CurveComponent::Fiber(x)]),
            -data.artin_conductor(),
        );
    }
    CharCycle::new(1, coeffs)
}

/// The det-corrected local factor at `x` with respect to a form with
/// `ord_x = 0`: the canonical value entering the epsilon-cycle fiber
/// coefficient. Wild places are derived through the global constant.
fn fiber_epsilon_normalised(sheaf: &Sheaf, x: &Place) -> Result<ThetaClass> {
    let field = sheaf.field();
    let omega = match x {
        Place::Finite(_) => Form::dx(field),
        // dx has a double pole at infinity; x^{-2} dx does not
        Place::Infinity => Form::new(RatFunc::parse(field, "1/x^2")?)?,
    };
    debug_assert_eq!(omega.ord_at(x), 0);
    let data = sheaf.local_data(x)?;
    if data.swan == 0 {
        local_epsilon_corrected(sheaf, x, &omega)
    } else {
        let derived = wild_local_epsilon_via_global(sheaf, &omega)?;
        if &derived.place != x {
            return Err(Error::invalid("wild place mismatch"));
        }
        Ok(derived.factor)
    }
}

/// The epsilon cycle of a sheaf on the line.
pub fn epsilon_cycle(sheaf: &Sheaf) -> Result<EpsilonCycle> {
    let base = sheaf.field();
    let mut coeffs = BTreeMap::new();
    let det_twist = ThetaClass::class_of(base, sheaf.twist())?;
    let zero_class = det_twist.inv().mul(&ThetaClass::q_power(base, ratio(-1, 2)));
    coeffs.insert(
        Component(vec![CurveComponent::Zero]),
        EpsCoeff { class: zero_class, multiplicity: -(sheaf.rank() as i64) },
    );
    for x in sheaf.bad_places() {
        let data = sheaf.local_data(&x)?;
        let eps = fiber_epsilon_normalised(sheaf, &x)?;
        let class = eps.pow(&ratio(-1, x.deg() as i64));
        coeffs.insert(
            Component(vec![CurveComponent::Fiber(x.clone())]),
            EpsCoeff { class, multiplicity: -data.artin_conductor() },
        );
    }
    EpsilonCycle::new(base, 1, coeffs)
}

/// The epsilon cycle of a tame rank-one normal-crossings datum on the
/// `n`-dimensional coordinate torus (`n <= 3`): characters `chi_a` on the
/// coordinate branches and a constant twist. Components are indexed by
/// the strata `B` of the crossing divisor; see the module documentation
/// for the closed formula.
pub fn tame_snc_epsilon(
    field: &Arc<Fq>,
    chars: &[MultChar],
    twist: &CycNum,
) -> Result<EpsilonCycle> {
    let n = chars.len();
    if n == 0 || n > 3 {
        return Err(Error::invalid("normal-crossings data with 1 to 3 coordinates"));
    }
    let sign = if n % 2 == 0 { 1 } else { -1 };
    let det = ThetaClass::class_of(field, twist)?;
    let chi_cyc = ThetaClass::q_power(field, rat(-1));
    let mut gauss = Vec::with_capacity(n);
    for chi in chars {
        if chi.field().q() != field.q() {
            return Err(Error::invalid("branch characters must live on the base field"));
        }
        let tau = gauss_sum(chi, &AddChar::canonical(field))?;
        gauss.push(ThetaClass::class_of(field, &tau)?);
    }
    let mut coeffs = BTreeMap::new();
    for b in 0..(1u32 << n) {
        let size = b.count_ones() as i64;
        let mut class = det.pow_int(sign);
        class = class.mul(&chi_cyc.pow(&(ratio(size - n as i64, 2) * rat(sign))));
        let mut component = Vec::with_capacity(n);
        for (a, j) in gauss.iter().enumerate() {
            if b & (1 << a) != 0 {
                class = class.mul(&j.pow_int(sign));
                component.push(CurveComponent::Fiber(Place::rational(field, 0)));
            } else {
                component.push(CurveComponent::Zero);
            }
        }
        coeffs.insert(Component(component), EpsCoeff { class, multiplicity: sign });
    }
    EpsilonCycle::new(field, n, coeffs)
}

/// The change-of-form covariance of local factors, re-exported at cycle
/// level for callers comparing fiber coefficients computed with different
/// forms.
pub fn fiber_change_of_form(
    sheaf: &Sheaf,
    x: &Place,
    omega: &Form,
    omega_prime: &Form,
) -> Result<ThetaClass> {
    change_of_form_factor(sheaf, x, omega, omega_prime)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
