//! Named verification checks over the library's identities, with
//! machine-friendly outcome records and a builtin catalog.
//!
//! Each check verifies one family of exact identities — Gauss-sum norms,
//! lifting relations, valuations against the p-adic oracle, Jacobi-datum
//! independence, the index formula, the product formula, local-global
//! cross-identities, cycle-level intersection formulas, and the group laws
//! of the value classes. A check runs over a field (and, where relevant, a
//! sheaf, a form, or small numeric parameters) and reports one outcome with
//! a left- and right-hand rendering, a verdict, and a timing.
//!
//! The checks compute both sides of every identity through independent
//! routes wherever the library provides them; nothing here weakens an
//! equality to an approximation, and every comparison is exact.

use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::charsums::{
    base_field_data, gauss_sum, hasse_davenport_sides, stickelberger_valuation, JacobiDatum,
};
use crate::cycles::{
    char_cycle, epsilon_cycle, tame_snc_epsilon, Component, CurveComponent,
};
use crate::cyclotomic::CycNum;
use crate::error::{Error, Result};
use crate::finite_field::{AddChar, Fq, MultChar};
use crate::lfunction::{det_cohomology, global_epsilon, l_function};
use crate::local_epsilon::{
    convolution_identity_sides, epsilon_product, kummer_cover_vanishing_cycles, Form,
};
use crate::padic::gauss_sum_padic_valuation;
use crate::polynomial::{Place, RatFunc};
use crate::sheaf::Sheaf;
use crate::theta::ThetaClass;
use crate::{rat, ratio, Rat};

/// The names of the verification checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckName {
    GaussNorm,
    HasseDavenport,
    Stickelberger,
    JacobiIndependence,
    Gos,
    Milnor,
    Convolution,
    ExternalProduct,
    Snc,
    ProductFormula,
    ThetaLaws,
}

impl CheckName {
    pub const ALL: [CheckName; 11] = [
        CheckName::GaussNorm,
        CheckName::HasseDavenport,
        CheckName::Stickelberger,
        CheckName::JacobiIndependence,
        CheckName::Gos,
        CheckName::Milnor,
        CheckName::Convolution,
        CheckName::ExternalProduct,
        CheckName::Snc,
        CheckName::ProductFormula,
        CheckName::ThetaLaws,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckName::GaussNorm => "gauss-norm",
            CheckName::HasseDavenport => "hasse-davenport",
            CheckName::Stickelberger => "stickelberger",
            CheckName::JacobiIndependence => "jacobi-independence",
            CheckName::Gos => "gos",
            CheckName::Milnor => "milnor",
            CheckName::Convolution => "convolution",
            CheckName::ExternalProduct => "external-product",
            CheckName::Snc => "snc",
            CheckName::ProductFormula => "product-formula",
            CheckName::ThetaLaws => "theta-laws",
        }
    }

    pub fn parse(s: &str) -> Result<CheckName> {
        CheckName::ALL
            .iter()
            .copied()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown check {s:?}")))
    }
}

/// A check instance: the check name plus its inputs. Unused fields are
/// ignored by checks that do not consume them.
#[derive(Clone, Debug, Default)]
pub struct CheckSpec {
    pub check: String,
    /// Base field as (p, f).
    pub field: Option<(u64, u32)>,
    /// Sheaf expression, where the check consumes one.
    pub sheaf: Option<String>,
    /// Form coefficient g (omega = g dx), where the check consumes one.
    pub form: Option<String>,
    /// Generic small parameter (covering degree, lift degree).
    pub n: Option<u64>,
    /// Convolution covering degrees.
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    /// Character exponents for normal-crossings strata.
    pub exponents: Option<Vec<u64>>,
    /// Constant twist expression.
    pub twist: Option<String>,
    /// Seed for randomized suites.
    pub seed: Option<u64>,
    /// Case count for randomized suites.
    pub cases: Option<u64>,
}

impl CheckSpec {
    pub fn named(check: CheckName) -> CheckSpec {
        CheckSpec { check: check.as_str().to_string(), ..CheckSpec::default() }
    }

    pub fn with_field(mut self, p: u64, f: u32) -> CheckSpec {
        self.field = Some((p, f));
        self
    }

    pub fn with_sheaf(mut self, expr: &str) -> CheckSpec {
        self.sheaf = Some(expr.to_string());
        self
    }

    pub fn with_form(mut self, g: &str) -> CheckSpec {
        self.form = Some(g.to_string());
        self
    }
}

/// Outcome verdict. A skipped check documents why it did not run; it does
/// not count as a failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Skip(String),
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Fail)
    }
}

/// The outcome of one check instance.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub check: &'static str,
    /// Echo of the inputs the check consumed.
    pub inputs: String,
    /// Rendering of the left-hand side (or pass tally).
    pub left: String,
    /// Rendering of the right-hand side (or case total).
    pub right: String,
    pub verdict: Verdict,
    pub millis: u64,
}

fn required_field(spec: &CheckSpec) -> Result<Arc<Fq>> {
    let (p, f) = spec
        .field
        .ok_or_else(|| Error::invalid(format!("check {:?} requires a [field] block", spec.check)))?;
    Fq::new(p, f)
}

fn parse_form(spec: &CheckSpec, field: &Arc<Fq>) -> Result<Form> {
    match &spec.form {
        Some(g) => Form::new(RatFunc::parse(field, g)?),
        None => Ok(Form::dx(field)),
    }
}

struct Sides {
    inputs: String,
    left: String,
    right: String,
    verdict: Verdict,
}

fn tally(inputs: String, pass: u64, total: u64, first_failure: Option<String>) -> Sides {
    let verdict = if pass == total { Verdict::Pass } else { Verdict::Fail };
    let inputs = match first_failure {
        Some(f) if pass != total => format!("{inputs}; first failure: {f}"),
        _ => inputs,
    };
    Sides { inputs, left: format!("{pass} identities hold"), right: format!("{total} expected"), verdict }
}

/// Runs one check instance. Configuration problems (missing field, unknown
/// check, unparsable sheaf) surface as errors; mathematical failures show
/// up in the verdict.
pub fn run_check(spec: &CheckSpec) -> Result<CheckOutcome> {
    let name = CheckName::parse(&spec.check)?;
    let start = Instant::now();
    let sides = match name {
        CheckName::GaussNorm => check_gauss_norm(spec)?,
        CheckName::HasseDavenport => check_hasse_davenport(spec)?,
        CheckName::Stickelberger => check_stickelberger(spec)?,
        CheckName::JacobiIndependence => check_jacobi_independence(spec)?,
        CheckName::Gos => check_gos(spec)?,
        CheckName::Milnor => check_milnor(spec)?,
        CheckName::Convolution => check_convolution(spec)?,
        CheckName::ExternalProduct => check_external_product(spec)?,
        CheckName::Snc => check_snc(spec)?,
        CheckName::ProductFormula => check_product_formula(spec)?,
        CheckName::ThetaLaws => check_theta_laws(spec)?,
    };
    Ok(CheckOutcome {
        check: name.as_str(),
        inputs: sides.inputs,
        left: sides.left,
        right: sides.right,
        verdict: sides.verdict,
        millis: start.elapsed().as_millis() as u64,
    })
}

/// For every nontrivial character: `tau(chi) tau(conj chi) = chi(-1) q` and
/// `tau(chi) conj(tau(chi)) = q`.
fn check_gauss_norm(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let q = field.q();
    let psi = AddChar::canonical(&field);
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for k in 1..q - 1 {
        total += 1;
        let chi = MultChar::new(&field, k);
        let tau = gauss_sum(&chi, &psi)?;
        let paired = tau.mul(&gauss_sum(&chi.conj(), &psi)?);
        let expected = chi.value_at_minus_one()?.mul(&CycNum::from_int(q as i64));
        let hermitian = tau.mul(&tau.conj());
        if paired.same_value(&expected) && hermitian.same_value(&CycNum::from_int(q as i64)) {
            pass += 1;
        } else if first.is_none() {
            first = Some(format!("character exponent {k}"));
        }
    }
    Ok(tally(
        format!("q = {q}, all nontrivial multiplicative characters"),
        pass,
        total,
        first,
    ))
}

/// Gauss sums are multiplicative in constant-field extensions:
/// `tau(chi ∘ N, psi ∘ Tr) = tau(chi, psi)^n`.
fn check_hasse_davenport(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let q = field.q();
    let degrees: Vec<u32> = match spec.n {
        Some(n) => vec![n as u32],
        None => vec![2, 3],
    };
    let psi = AddChar::canonical(&field);
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for &n in &degrees {
        for k in 1..q - 1 {
            total += 1;
            let chi = MultChar::new(&field, k);
            let (lifted, power) = hasse_davenport_sides(&chi, &psi, n)?;
            if lifted.same_value(&power) {
                pass += 1;
            } else if first.is_none() {
                first = Some(format!("exponent {k}, lift degree {n}"));
            }
        }
    }
    Ok(tally(
        format!("q = {q}, lift degrees {degrees:?}, all nontrivial characters"),
        pass,
        total,
        first,
    ))
}

/// The digit-sum valuation formula agrees with the p-adic oracle for every
/// character of the field.
fn check_stickelberger(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let q = field.q();
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for k in 1..q - 1 {
        total += 1;
        let chi = MultChar::new(&field, k);
        let combinatorial = stickelberger_valuation(&chi);
        let oracle = gauss_sum_padic_valuation(&field, k, 1)?;
        if combinatorial == oracle {
            pass += 1;
        } else if first.is_none() {
            first = Some(format!(
                "exponent {k}: digit formula {combinatorial}, oracle {oracle}"
            ));
        }
    }
    Ok(tally(
        format!("q = {q}, valuations of all nontrivial Gauss sums against the p-adic oracle"),
        pass,
        total,
        first,
    ))
}

/// Jacobi sums of data do not depend on the auxiliary additive character.
fn check_jacobi_independence(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let q = field.q();
    let lengths: Vec<u32> = match spec.n {
        Some(n) => vec![n as u32],
        None => vec![2, 3],
    };
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for &len in &lengths {
        for datum in base_field_data(&field, len) {
            total += 1;
            let entries: Vec<MultChar> =
                datum.iter().map(|&k| MultChar::new(&field, k)).collect();
            let datum_obj = JacobiDatum::new(&field, entries)?;
            let reference = datum_obj.jacobi_sum_with(1)?;
            let all_equal = (2..q)
                .map(|a| datum_obj.jacobi_sum_with(a))
                .collect::<Result<Vec<_>>>()?
                .iter()
                .all(|j| j.same_value(&reference));
            if all_equal {
                pass += 1;
            } else if first.is_none() {
                first = Some(format!("datum {datum:?}"));
            }
        }
    }
    Ok(tally(
        format!("q = {q}, all data of lengths {lengths:?}, all auxiliary characters"),
        pass,
        total,
        first,
    ))
}

/// The index formula: `deg L = -chi = -(CC, zero section)`.
fn check_gos(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let expr = spec
        .sheaf
        .as_deref()
        .ok_or_else(|| Error::invalid("gos requires a [sheaf] block"))?;
    let sheaf = Sheaf::parse(&field, expr)?;
    let l = l_function(&sheaf)?;
    let chi = sheaf.euler_characteristic()?;
    let cc = char_cycle(&sheaf)?;
    let paired = cc.intersect_zero_section()?;
    let verdict = if l.degree() == -chi && paired == chi {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Sides {
        inputs: format!("q = {}, sheaf {sheaf}", field.q()),
        left: format!("deg L = {}", l.degree()),
        right: format!("-chi = {}, -(CC, zero section) = {}", -chi, -paired),
        verdict,
    })
}

/// The Milnor-type formula for `f = x^n` at the origin, on the constant
/// sheaf: the cycle intersections with `df` compute minus the total
/// dimension and the inverse epsilon class of the vanishing cycles.
fn check_milnor(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let n = spec.n.unwrap_or(2);
    if n < 2 {
        return Err(Error::invalid("milnor requires n >= 2"));
    }
    if n % field.p() == 0 {
        return Ok(Sides {
            inputs: format!("q = {}, f = x^{n}", field.q()),
            left: String::new(),
            right: String::new(),
            verdict: Verdict::Skip(format!(
                "wild covering: the residue characteristic {} divides {n}",
                field.p()
            )),
        });
    }
    let sheaf = Sheaf::constant(&field);
    let cc = char_cycle(&sheaf)?;
    let e = epsilon_cycle(&sheaf)?;
    let f = RatFunc::x(&field).pow(n as i64)?;
    let origin = Place::rational(&field, 0);
    let cc_route = cc.intersect_df_at(&f, &origin)?;
    let e_route = e.intersect_df_at(&f, &origin)?;
    let trivial = MultChar::new(&field, 0);
    let vc = kummer_cover_vanishing_cycles(&trivial, n)?;
    let dimtot = vc.dimension_total() as i64;
    let eps_inv = vc.epsilon()?.inv();
    // independent closed form: the class of the product of the Gauss sums
    // over the nontrivial n-th roots of the trivial character is
    // cls(q)^{(n-1)/2}
    let closed_form = ThetaClass::q_power(&field, ratio(-(n as i64 - 1), 2));
    let ok = cc_route == -dimtot
        && e_route.eq_class(&eps_inv)?
        && e_route.eq_class(&closed_form)?;
    Ok(Sides {
        inputs: format!("q = {}, f = x^{n}, at the origin", field.q()),
        left: format!("(CC, df) = {cc_route}; (E, df) = {e_route}"),
        right: format!("-dimtot = {}; eps(vanishing cycles)^-1 = {eps_inv}", -dimtot),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// The convolution identity for the coverings `x^{n1}`, `x^{n2}`.
fn check_convolution(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let n1 = spec.n1.unwrap_or(2);
    let n2 = spec.n2.unwrap_or(2);
    if n1 % field.p() == 0 || n2 % field.p() == 0 {
        return Ok(Sides {
            inputs: format!("q = {}, degrees ({n1}, {n2})", field.q()),
            left: String::new(),
            right: String::new(),
            verdict: Verdict::Skip(format!(
                "wild covering: the residue characteristic {} divides a degree",
                field.p()
            )),
        });
    }
    let (lhs, rhs) = convolution_identity_sides(&field, n1, n2)?;
    let closed_form =
        ThetaClass::q_power(&field, rat((n1 as i64 - 1) * (n2 as i64 - 1)));
    let ok = lhs.eq_class(&rhs)? && lhs.eq_class(&closed_form)?;
    Ok(Sides {
        inputs: format!("q = {}, coverings x^{n1} and x^{n2}", field.q()),
        left: format!("{lhs}"),
        right: format!("{rhs}"),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Normal-crossings coefficients in two variables agree with the external
/// product of the two curve cycles, for every pair of nontrivial
/// characters (or the pair given in `exponents`).
fn check_external_product(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let q = field.q();
    let pairs: Vec<(u64, u64)> = match &spec.exponents {
        Some(ks) if ks.len() == 2 => vec![(ks[0], ks[1])],
        Some(_) => return Err(Error::invalid("external-product takes two exponents")),
        None => (1..q - 1)
            .flat_map(|a| (1..q - 1).map(move |b| (a, b)))
            .collect(),
    };
    let strata = two_variable_strata(&field);
    let mut pass = 0;
    let mut total = 0;
    let mut first = None;
    for &(k1, k2) in &pairs {
        total += 1;
        let chi1 = MultChar::new(&field, k1);
        let chi2 = MultChar::new(&field, k2);
        let snc = tame_snc_epsilon(&field, &[chi1, chi2], &CycNum::one())?;
        let c1 = epsilon_cycle(&Sheaf::parse(&field, &format!("kummer(chi[{k1}], x)"))?)?;
        let c2 = epsilon_cycle(&Sheaf::parse(&field, &format!("kummer(chi[{k2}], x)"))?)?;
        let prod = c1.external_product(&c2)?;
        let mut ok = true;
        for comp in &strata {
            let a = snc.coefficient(comp).ok_or_else(|| Error::invalid("missing stratum"))?;
            let b = prod
                .coefficient(comp)
                .ok_or_else(|| Error::invalid("missing product component"))?;
            ok &= a.multiplicity == b.multiplicity && a.class.eq_class(&b.class)?;
        }
        if ok {
            pass += 1;
        } else if first.is_none() {
            first = Some(format!("exponents ({k1}, {k2})"));
        }
    }
    Ok(tally(
        format!("q = {q}, {} character pairs, four strata each", pairs.len()),
        pass,
        total,
        first,
    ))
}

fn two_variable_strata(field: &Arc<Fq>) -> Vec<Component> {
    let z = CurveComponent::Zero;
    let f0 = CurveComponent::Fiber(Place::rational(field, 0));
    vec![
        Component(vec![z.clone(), z.clone()]),
        Component(vec![z.clone(), f0.clone()]),
        Component(vec![f0.clone(), z]),
        Component(vec![f0.clone(), f0]),
    ]
}

/// Normal-crossings epsilon coefficients: one variable against the curve
/// cycle, two variables against the external product, three variables
/// against the product of the two smaller cases.
fn check_snc(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let ks = spec.exponents.clone().unwrap_or_else(|| vec![1]);
    if ks.is_empty() || ks.len() > 3 {
        return Err(Error::invalid("snc takes one to three exponents"));
    }
    let twist = match &spec.twist {
        Some(t) => crate::sheaf::parse_cycnum(t)?,
        None => CycNum::one(),
    };
    let chars: Vec<MultChar> = ks.iter().map(|&k| MultChar::new(&field, k)).collect();
    let snc = tame_snc_epsilon(&field, &chars, &twist)?;
    let reference = match ks.len() {
        1 => {
            let expr = format!(
                "kummer(chi[{}], x) * twist({})",
                ks[0],
                crate::sheaf::render_cycnum(&twist)
            );
            let curve = epsilon_cycle(&Sheaf::parse(&field, &expr)?)?;
            // restrict the curve cycle to the affine strata
            let mut restricted = std::collections::BTreeMap::new();
            for comp in [
                Component(vec![CurveComponent::Zero]),
                Component(vec![CurveComponent::Fiber(Place::rational(&field, 0))]),
            ] {
                if let Some(c) = curve.coefficient(&comp) {
                    restricted.insert(comp, c.clone());
                }
            }
            crate::cycles::EpsilonCycle::new(&field, 1, restricted)?
        }
        2 => {
            let a = tame_snc_epsilon(&field, &chars[..1], &twist)?;
            let b = tame_snc_epsilon(&field, &chars[1..], &CycNum::one())?;
            a.external_product(&b)?
        }
        _ => {
            let a = tame_snc_epsilon(&field, &chars[..2], &twist)?;
            let b = tame_snc_epsilon(&field, &chars[2..], &CycNum::one())?;
            a.external_product(&b)?
        }
    };
    let mut ok = true;
    let mut first = None;
    for (comp, expected) in reference.coefficients() {
        let got = snc
            .coefficient(comp)
            .ok_or_else(|| Error::invalid("missing stratum"))?;
        let here =
            got.multiplicity == expected.multiplicity && got.class.eq_class(&expected.class)?;
        if !here && first.is_none() {
            first = Some(format!("stratum {comp}"));
        }
        ok &= here;
    }
    let inputs = match first {
        Some(f) => format!("q = {}, exponents {ks:?}; first failure: {f}", field.q()),
        None => format!("q = {}, exponents {ks:?}", field.q()),
    };
    Ok(Sides {
        inputs,
        left: format!("{} strata", snc.coefficients().len()),
        right: format!("{} reference coefficients", reference.coefficients().len()),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// The product formula: the global constant equals `cls(q)^{rank}` times
/// the product of the det-corrected local factors, and the determinant of
/// cohomology equals the zero-section intersection of the epsilon cycle.
fn check_product_formula(spec: &CheckSpec) -> Result<Sides> {
    let field = required_field(spec)?;
    let expr = spec
        .sheaf
        .as_deref()
        .ok_or_else(|| Error::invalid("product-formula requires a [sheaf] block"))?;
    let sheaf = Sheaf::parse(&field, expr)?;
    if sheaf.wild_part().is_some() {
        return Ok(Sides {
            inputs: format!("q = {}, sheaf {sheaf}", field.q()),
            left: String::new(),
            right: String::new(),
            verdict: Verdict::Skip(
                "wild-point policy: local factors at wild points are derived from the \
                 global constant, so the product formula is not an independent check here"
                    .to_string(),
            ),
        });
    }
    let omega = parse_form(spec, &field)?;
    let global = global_epsilon(&sheaf)?;
    let local = epsilon_product(&sheaf, &omega)?;
    let det = det_cohomology(&sheaf)?;
    let cycle = epsilon_cycle(&sheaf)?.intersect_zero_section()?;
    let ok = global.eq_class(&local)? && det.eq_class(&cycle)?;
    Ok(Sides {
        inputs: format!(
            "q = {}, sheaf {sheaf}, omega = ({}) dx",
            field.q(),
            omega.coefficient()
        ),
        left: format!("global {global}; det cohomology {det}"),
        right: format!("local product {local}; cycle intersection {cycle}"),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    })
}

/// Group laws of the value classes: equivalence, unique divisibility, and
/// the valuation homomorphism, on a seeded randomized suite.
fn check_theta_laws(spec: &CheckSpec) -> Result<Sides> {
    let field = match spec.field {
        Some((p, f)) => Fq::new(p, f)?,
        None => Fq::new(5, 1)?,
    };
    let seed = spec.seed.unwrap_or(0xc1a55e5);
    let cases = spec.cases.unwrap_or(1000);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pass = 0;
    let mut first = None;
    for case in 0..cases {
        if theta_law_case(&field, &mut rng)? {
            pass += 1;
        } else if first.is_none() {
            first = Some(format!("case {case}"));
        }
    }
    Ok(tally(
        format!("q = {}, seed {seed}, {cases} randomized cases", field.q()),
        pass,
        cases,
        first,
    ))
}

fn random_class(field: &Arc<Fq>, rng: &mut ChaCha8Rng) -> Result<ThetaClass> {
    let mut acc = ThetaClass::identity(field);
    for _ in 0..rng.gen_range(1..=3) {
        match rng.gen_range(0..4) {
            0 => {
                let num = rng.gen_range(-6..=6i64);
                let den = rng.gen_range(1..=4i64);
                acc = acc.mul(&ThetaClass::q_power(field, ratio(num, den)));
            }
            1 => {
                let m = rng.gen_range(1..=12u64);
                let e = rng.gen_range(0..m as i64);
                acc = acc.mul(&ThetaClass::class_of(field, &CycNum::root_of_unity(m, e))?);
            }
            2 => {
                let k = rng.gen_range(1..field.q() - 1);
                let tau = gauss_sum(&MultChar::new(field, k), &AddChar::canonical(field))?;
                acc = acc.mul(&ThetaClass::class_of(field, &tau)?);
            }
            _ => {
                let n = rng.gen_range(1..=9i64);
                let d = rng.gen_range(1..=9i64);
                acc = acc.mul(&ThetaClass::class_of(field, &CycNum::from_rat(ratio(n, d)))?);
            }
        }
    }
    Ok(acc)
}

fn theta_law_case(field: &Arc<Fq>, rng: &mut ChaCha8Rng) -> Result<bool> {
    let a = random_class(field, rng)?;
    let b = random_class(field, rng)?;
    // equivalence: reflexivity, symmetry and transitivity along a chain of
    // root-of-unity rescalings
    let m1 = rng.gen_range(1..=12u64);
    let m2 = rng.gen_range(1..=12u64);
    let a2 = a.mul(&ThetaClass::class_of(field, &CycNum::root_of_unity(m1, rng.gen_range(0..m1 as i64)))?);
    let a3 =
        a2.mul(&ThetaClass::class_of(field, &CycNum::root_of_unity(m2, rng.gen_range(0..m2 as i64)))?);
    let mut ok = a.eq_class(&a)?;
    ok &= a.eq_class(&a2)? && a2.eq_class(&a)?;
    ok &= a2.eq_class(&a3)? && a.eq_class(&a3)?;
    // strictness: a nonzero q-power moves the class
    let mut r = ratio(rng.gen_range(1..=5i64), rng.gen_range(1..=3i64));
    if rng.gen_bool(0.5) {
        r = -r;
    }
    ok &= !a.eq_class(&a.mul(&ThetaClass::q_power(field, r)))?;
    // unique divisibility round-trip
    let n = rng.gen_range(2..=5i64);
    let root = a.pow(&ratio(1, n));
    ok &= root.pow_int(n).eq_class(&a)?;
    ok &= a.pow_int(n).pow(&ratio(1, n)).eq_class(&a)?;
    // a genuinely different root has a different n-th power
    let other = root.mul(&ThetaClass::q_power(field, ratio(1, 2 * n)));
    ok &= !other.pow_int(n).eq_class(&a)?;
    // valuation homomorphism
    let va = a.p_valuation()?;
    let vb = b.p_valuation()?;
    ok &= a.mul(&b).p_valuation()? == va.clone() + vb;
    ok &= a.inv().p_valuation()? == -va.clone();
    ok &= a.pow_int(3).p_valuation()? == va * rat(3);
    // the cyclotomic character has valuation -f
    ok &= ThetaClass::q_power(field, rat(-1)).p_valuation()?
        == -Rat::from_integer((field.f() as i64).into());
    Ok(ok)
}

/// The builtin all-tame catalog over the prime field with five elements
/// (plus its quadratic extension where the check benefits from one).
pub fn builtin_catalog(name: &str) -> Option<Vec<CheckSpec>> {
    if name != "tame-p5" {
        return None;
    }
    let mut entries = Vec::new();
    entries.push(CheckSpec::named(CheckName::GaussNorm).with_field(5, 1));
    entries.push(CheckSpec::named(CheckName::GaussNorm).with_field(5, 2));
    entries.push(CheckSpec::named(CheckName::HasseDavenport).with_field(5, 1));
    entries.push(CheckSpec::named(CheckName::Stickelberger).with_field(5, 1));
    entries.push(CheckSpec::named(CheckName::Stickelberger).with_field(5, 2));
    entries.push(CheckSpec::named(CheckName::JacobiIndependence).with_field(5, 1));
    for expr in [
        "kummer(chi[1], x)",
        "kummer(chi[1], x^2 + 4*x)",
        "kummer(chi[2], x^3 + 4*x)",
        "kummer(chi[1], x^2 + 2)",
        "kummer(chi[2], x^2 + 4*x) * twist(zeta[3])",
    ] {
        entries.push(CheckSpec::named(CheckName::Gos).with_field(5, 1).with_sheaf(expr));
    }
    for n in [2u64, 3, 4, 6] {
        let mut s = CheckSpec::named(CheckName::Milnor).with_field(5, 1);
        s.n = Some(n);
        entries.push(s);
    }
    for (n1, n2) in [(2u64, 2u64), (2, 4), (4, 4)] {
        let mut s = CheckSpec::named(CheckName::Convolution).with_field(5, 1);
        s.n1 = Some(n1);
        s.n2 = Some(n2);
        entries.push(s);
    }
    entries.push(CheckSpec::named(CheckName::ExternalProduct).with_field(5, 1));
    for ks in [vec![1u64], vec![1, 2], vec![1, 2, 3]] {
        let mut s = CheckSpec::named(CheckName::Snc).with_field(5, 1);
        s.exponents = Some(ks);
        entries.push(s);
    }
    for (expr, form) in [
        ("kummer(chi[1], x)", "1"),
        ("kummer(chi[1], x^2 + 4*x)", "1"),
        ("kummer(chi[2], x^2 + 4*x) * twist(zeta[3])", "x"),
        ("kummer(chi[1], x^2 + 2)", "1"),
    ] {
        entries.push(
            CheckSpec::named(CheckName::ProductFormula)
                .with_field(5, 1)
                .with_sheaf(expr)
                .with_form(form),
        );
    }
    entries.push(CheckSpec::named(CheckName::ThetaLaws).with_field(5, 1));
    Some(entries)
}

/// A human-readable derivation trace for a check instance: every factor
/// entering the identity is printed with its role.
pub fn explain(spec: &CheckSpec) -> Result<String> {
    let name = CheckName::parse(&spec.check)?;
    let mut out = String::new();
    let push = |out: &mut String, line: String| {
        out.push_str(&line);
        out.push('\n');
    };
    match name {
        CheckName::ProductFormula => {
            let field = required_field(spec)?;
            let expr = spec
                .sheaf
                .as_deref()
                .ok_or_else(|| Error::invalid("product-formula requires a [sheaf] block"))?;
            let sheaf = Sheaf::parse(&field, expr)?;
            if sheaf.wild_part().is_some() {
                return Err(Error::invalid(
                    "wild-point policy: the product formula trace covers tame sheaves",
                ));
            }
            let omega = parse_form(spec, &field)?;
            push(&mut out, format!("sheaf: {sheaf} over F_{}", field.q()));
            push(&mut out, format!("form: omega = ({}) dx", omega.coefficient()));
            push(
                &mut out,
                format!(
                    "[normalisation] cls(q)^rank = {}",
                    ThetaClass::q_power(&field, rat(sheaf.rank() as i64))
                ),
            );
            let mut acc = ThetaClass::q_power(&field, rat(sheaf.rank() as i64));
            for place in crate::local_epsilon::relevant_places(&sheaf, &omega)? {
                let factor = crate::local_epsilon::local_epsilon_corrected(&sheaf, &place, &omega)?;
                push(
                    &mut out,
                    format!("[local factor at {place}] det-corrected class = {factor}"),
                );
                acc = acc.mul(&factor);
            }
            push(&mut out, format!("[local side] product = {acc}"));
            let global = global_epsilon(&sheaf)?;
            push(
                &mut out,
                format!("[global side] leading L-coefficient class = {global}"),
            );
            push(
                &mut out,
                format!("verdict: {}", if global.eq_class(&acc)? { "equal" } else { "DIFFERENT" }),
            );
        }
        CheckName::Milnor => {
            let field = required_field(spec)?;
            let n = spec.n.unwrap_or(2);
            if n < 2 || n % field.p() == 0 {
                return Err(Error::invalid("milnor trace requires n >= 2 prime to p"));
            }
            push(&mut out, format!("f = x^{n} on the affine line over F_{}", field.q()));
            let trivial = MultChar::new(&field, 0);
            let vc = kummer_cover_vanishing_cycles(&trivial, n)?;
            push(
                &mut out,
                format!(
                    "vanishing cycles at the origin: {} characters, total dimension {}",
                    vc.entries().len(),
                    vc.dimension_total()
                ),
            );
            for theta in vc.entries() {
                let tau = gauss_sum(theta, &AddChar::canonical(theta.field()))?;
                push(
                    &mut out,
                    format!(
                        "[gauss sum] exponent {} over F_{}: class {}",
                        theta.exponent(),
                        theta.field().q(),
                        ThetaClass::class_of(&field, &tau)?
                    ),
                );
            }
            push(&mut out, format!("[epsilon of the package] {}", vc.epsilon()?));
            let e = epsilon_cycle(&Sheaf::constant(&field))?;
            let f = RatFunc::x(&field).pow(n as i64)?;
            let route = e.intersect_df_at(&f, &Place::rational(&field, 0))?;
            push(&mut out, format!("[cycle route] (E, df)_0 = {route}"));
            push(
                &mut out,
                format!(
                    "verdict: {}",
                    if route.eq_class(&vc.epsilon()?.inv())? { "equal" } else { "DIFFERENT" }
                ),
            );
        }
        CheckName::ThetaLaws => {
            let field = match spec.field {
                Some((p, f)) => Fq::new(p, f)?,
                None => Fq::new(5, 1)?,
            };
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(1));
            let a = random_class(&field, &mut rng)?;
            let b = random_class(&field, &mut rng)?;
            push(&mut out, format!("sample classes over F_{}:", field.q()));
            push(&mut out, format!("  a = {a}"));
            push(&mut out, format!("  b = {b}"));
            push(&mut out, format!("[product] a*b = {}", a.mul(&b)));
            push(&mut out, format!("[inverse] a^-1 = {}", a.inv()));
            push(&mut out, format!("[root] a^(1/2) = {}", a.pow(&ratio(1, 2))));
            push(
                &mut out,
                format!(
                    "[valuations] v(a) = {}, v(b) = {}, v(ab) = {}",
                    a.p_valuation()?,
                    b.p_valuation()?,
                    a.mul(&b).p_valuation()?
                ),
            );
        }
        _ => {
            let outcome = run_check(spec)?;
            push(&mut out, format!("check: {}", outcome.check));
            push(&mut out, format!("inputs: {}", outcome.inputs));
            push(&mut out, format!("left:  {}", outcome.left));
            push(&mut out, format!("right: {}", outcome.right));
            push(
                &mut out,
                format!(
                    "verdict: {}",
                    match outcome.verdict {
                        Verdict::Pass => "pass".to_string(),
                        Verdict::Fail => "FAIL".to_string(),
                        Verdict::Skip(reason) => format!("skipped ({reason})"),
                    }
                ),
            );
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn run(name: CheckName, p: u64, f: u32) -> CheckOutcome {
        run_check(&CheckSpec::named(name).with_field(p, f)).unwrap()
    }

    #[test]
    fn unknown_check_is_a_configuration_error() {
        assert!(CheckName::parse("gauss-norm").is_ok());
        assert!(CheckName::parse("nonsense").is_err());
        let spec = CheckSpec { check: "nonsense".to_string(), ..CheckSpec::default() };
        assert!(run_check(&spec).is_err());
    }

    #[test]
    fn field_sweep_checks_pass_on_a_small_field() {
        for name in [
            CheckName::GaussNorm,
            CheckName::HasseDavenport,
            CheckName::Stickelberger,
            CheckName::JacobiIndependence,
            CheckName::ExternalProduct,
        ] {
            let out = run(name, 5, 1);
            assert_eq!(out.verdict, Verdict::Pass, "{} failed: {}", out.check, out.inputs);
        }
    }

    #[test]
    fn sheaf_checks_pass() {
        let gos = run_check(
            &CheckSpec::named(CheckName::Gos)
                .with_field(7, 1)
                .with_sheaf("kummer(chi[1], x^2 + 6*x) * as(1, x^2 + 3)"),
        )
        .unwrap();
        assert_eq!(gos.verdict, Verdict::Pass, "{}", gos.inputs);
        let pf = run_check(
            &CheckSpec::named(CheckName::ProductFormula)
                .with_field(7, 1)
                .with_sheaf("kummer(chi[2], x^2 + 6*x) * twist(zeta[3])")
                .with_form("x"),
        )
        .unwrap();
        assert_eq!(pf.verdict, Verdict::Pass, "{}", pf.inputs);
    }

    #[test]
    fn wild_sheaf_under_product_formula_is_skipped_with_reason() {
        let out = run_check(
            &CheckSpec::named(CheckName::ProductFormula)
                .with_field(3, 1)
                .with_sheaf("as(1, x)"),
        )
        .unwrap();
        match out.verdict {
            Verdict::Skip(reason) => assert!(reason.contains("wild-point policy")),
            other => panic!("expected skip, got {other:?}"),
        }
    }

    #[test]
    fn milnor_and_convolution_checks() {
        let mut spec = CheckSpec::named(CheckName::Milnor).with_field(7, 1);
        spec.n = Some(3);
        assert_eq!(run_check(&spec).unwrap().verdict, Verdict::Pass);
        // p | n is skipped
        spec.n = Some(7);
        assert!(matches!(run_check(&spec).unwrap().verdict, Verdict::Skip(_)));
        let mut conv = CheckSpec::named(CheckName::Convolution).with_field(13, 1);
        conv.n1 = Some(3);
        conv.n2 = Some(4);
        assert_eq!(run_check(&conv).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn snc_checks_for_all_arities() {
        for ks in [vec![2u64], vec![1, 3], vec![1, 2, 3]] {
            let mut spec = CheckSpec::named(CheckName::Snc).with_field(5, 1);
            spec.exponents = Some(ks.clone());
            spec.twist = Some("zeta[8]".to_string());
            let out = run_check(&spec).unwrap();
            assert_eq!(out.verdict, Verdict::Pass, "snc {ks:?}: {}", out.inputs);
        }
    }

    #[test]
    fn theta_laws_suite_is_seeded_and_passes() {
        let mut spec = CheckSpec::named(CheckName::ThetaLaws).with_field(5, 1);
        spec.cases = Some(120);
        spec.seed = Some(42);
        let a = run_check(&spec).unwrap();
        assert_eq!(a.verdict, Verdict::Pass, "{}", a.inputs);
        let b = run_check(&spec).unwrap();
        // byte-deterministic report
        assert_eq!(a.inputs, b.inputs);
        assert_eq!(a.left, b.left);
    }

    #[test]
    fn builtin_catalog_is_named_and_all_tame_entries_pass_smoke() {
        assert!(builtin_catalog("no-such-catalog").is_none());
        let entries = builtin_catalog("tame-p5").unwrap();
        assert!(entries.len() >= 15);
        // smoke-run a few cheap entries here; the full run is an
        // integration test of the command-line crate
        for spec in entries.iter().take(4) {
            let out = run_check(spec).unwrap();
            assert_eq!(out.verdict, Verdict::Pass, "{}: {}", out.check, out.inputs);
        }
    }

    #[test]
    fn explain_produces_a_trace() {
        let spec = CheckSpec::named(CheckName::ProductFormula)
            .with_field(5, 1)
            .with_sheaf("kummer(chi[1], x)");
        let trace = explain(&spec).unwrap();
        assert!(trace.contains("[local factor at"));
        assert!(trace.contains("verdict: equal"));
        let mut m = CheckSpec::named(CheckName::Milnor).with_field(5, 1);
        m.n = Some(2);
        let trace = explain(&m).unwrap();
        assert!(trace.contains("gauss sum"));
        assert!(explain(&CheckSpec { check: "bogus".into(), ..Default::default() }).is_err());
    }
}
