//! Exact arithmetic for epsilon factors, L-functions, and characteristic
//! epsilon cycles of rank-1 sheaves on curves over finite fields.
//!
//! Everything in this crate is exact: cyclotomic numbers are vectors of
//! rationals over a power basis, finite fields are explicit tables, p-adic
//! numbers are truncated Witt-style expansions with tracked precision, and
//! every advertised identity is checked by equality in the relevant ring —
//! never by floating-point proximity.
//!
//! The crate is organised bottom-up:
//!
//! * [`cyclotomic`] — the fields `Q(zeta_m)` and exact arithmetic in them.
//! * [`finite_field`] — explicit finite fields `F_q`, their multiplicative
//!   and additive characters, extensions, norms and traces.
//! * [`polynomial`] — univariate polynomials and rational functions over a
//!   finite field, factorisation, and places of the projective line.
//! * [`charsums`] — Gauss sums, Jacobi-style products of Gauss sums over
//!   several fields, the Hasse–Davenport lifting relation, and the exact
//!   valuation of a Gauss sum.
//! * [`padic`] — an independent p-adic oracle: unramified lifts,
//!   Teichmüller representatives, and Gauss sums computed inside
//!   `Z_p[zeta_{q-1}][zeta_p]` with explicit precision management.
//! * [`theta`] — the group of "theta classes": values modulo roots of unity
//!   with formal rational powers of `q`, the home of all epsilon classes.
//! * [`sheaf`] — rank-1 sheaf expressions (Kummer, Artin–Schreier, twist)
//!   on open subsets of the projective line, their local invariants, and
//!   point-counting traces.
//! * [`lfunction`] — exact L-polynomials from power sums, global epsilon
//!   constants, and Euler-characteristic bookkeeping.
//! * [`local_epsilon`] — local epsilon classes of tame points, their
//!   behaviour under change of the meromorphic differential form, wild
//!   points by global division, and vanishing-cycle epsilon classes of
//!   Kummer coverings.
//! * [`cycles`] — characteristic cycles and epsilon cycles on curves and
//!   on small products of curves: intersection with the zero section and
//!   with differentials, external products, Tate twists, and the tame
//!   normal-crossings epsilon class.
//! * [`checks`] — the named self-check suite and the built-in catalogue,
//!   producing machine-readable reports.

pub mod checks;
pub mod charsums;
pub mod cycles;
pub mod cyclotomic;
pub mod error;
pub mod finite_field;
pub mod lfunction;
pub mod local_epsilon;
pub mod padic;
pub mod polynomial;
pub mod sheaf;
pub mod theta;

pub use error::{Error, Result};

/// Exact rational numbers used throughout the crate.
pub type Rat = num_rational::BigRational;

/// Convenience constructor for a rational from an integer.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Convenience constructor for a rational `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    assert!(d != 0, "zero denominator");
    Rat::new(n.into(), d.into())
}
