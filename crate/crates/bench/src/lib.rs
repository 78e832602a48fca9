//! Shared fixtures for the criterion benchmarks in `benches/`.
//!
//! The hot paths in this workspace are (a) point counting over
//! extension fields, (b) arithmetic in cyclotomic fields of composite
//! conductor, and (c) the local-factor pipeline behind the product
//! formula.  The helpers here build representative inputs once so the
//! benchmark bodies measure only the kernel under test.

use std::sync::Arc;

use epsilon_cycles_core::cyclotomic::CycNum;
use epsilon_cycles_core::finite_field::Fq;
use epsilon_cycles_core::sheaf::Sheaf;

/// Prime field with `q = p` elements.
pub fn prime_field(p: u64) -> Arc<Fq> {
    Fq::new(p, 1).expect("prime field")
}

/// The rank-one sheaf whose trace sums drive the slowest acceptance
/// check: a Kummer sheaf on a degree-`n` monomial over `F_13`.
pub fn monomial_sheaf(field: &Arc<Fq>, n: u32) -> Sheaf {
    Sheaf::parse(field, &format!("kummer(chi[1], x^{n})")).expect("sheaf parses")
}

/// A tame sheaf with several bad points, one of them quadratic, used
/// to exercise the full local-factor pipeline.
pub fn spread_out_sheaf(field: &Arc<Fq>) -> Sheaf {
    Sheaf::parse(field, "kummer(chi[1], (x^2 + 1) * (x + 3)) * twist(zeta[5])")
        .expect("sheaf parses")
}

/// A dense element of `Q(zeta_60)` for multiplication benchmarks: a
/// sum of sixteen distinct roots of unity, filling every coordinate of
/// the degree-`phi(60) = 16` power basis.
pub fn dense_cyclotomic(offset: i64) -> CycNum {
    let mut acc = CycNum::zero();
    for e in 0..16 {
        let sign = if e % 2 == 0 { 1 } else { -1 };
        let term = CycNum::root_of_unity(60, (7 * e + offset) % 60);
        acc = acc.add(&term.scalar_mul(&epsilon_cycles_core::rat(sign)));
    }
    acc
}
