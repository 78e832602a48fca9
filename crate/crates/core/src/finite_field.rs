//! Explicit finite fields `F_q` with `q = p^f`, their extensions, and their
//! multiplicative and additive characters.
//!
//! A field is represented by a deterministic modulus: the monic irreducible
//! polynomial of degree `f` over `F_p` whose coefficient code
//! `c_0 + c_1 p + ... + c_{f-1} p^{f-1}` is smallest. Elements are stored as
//! `u64` codes with the same base-`p` digit encoding, so `F_q` elements are
//! exactly the codes `0 .. q`. The multiplicative generator is the element
//! of smallest code whose order is `q - 1` (for `F_7` this is `3`).
//!
//! Characters are pinned to that generator: the multiplicative character of
//! exponent `k` sends `g^j` to `zeta_{q-1}^{k j}`, and the additive
//! character of parameter `c` sends `x` to `zeta_p^{Tr(c x)}` with `Tr` the
//! absolute trace. The canonical additive character has `c = 1`.
//!
//! Discrete-log tables are built lazily (one multiplication per element) and
//! capped, so the table-based kernels stay within desk-scale memory.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::cyclotomic::{factorize, gcd_u64, invmod_u64, CycNum};
use crate::error::{Error, Result};

/// Elements with codes up to this bound get a discrete-log table.
const DLOG_CAP: u64 = 1 << 21;

/// Largest supported field size (element codes must fit comfortably in u64
/// and table kernels must stay at desk scale).
const Q_CAP: u64 = 1 << 40;

const MAX_F: usize = 16;

type Digits = [u64; MAX_F];

/// An explicit finite field `F_{p^f}` with deterministic modulus and
/// generator. Obtain instances through [`Fq::new`]; they are cached and
/// shared process-wide.
pub struct Fq {
    p: u64,
    f: u32,
    q: u64,
    /// Monic modulus, constant term first, length `f + 1` (for `f = 1` the
    /// modulus is `X`, i.e. elements are plain residues).
    modulus: Vec<u64>,
    /// `X^{f+j} mod modulus` for `j = 0 .. f-2`, each row of length `f`.
    reduction_rows: Vec<Vec<u64>>,
    /// Absolute trace of the basis monomials: `Tr(X^i) in F_p` for `i < f`.
    trace_basis: Vec<u64>,
    generator: u64,
    dlog: OnceLock<Vec<u32>>,
}

impl fmt::Debug for Fq {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "F_{}", self.q)
    }
}

fn fq_registry() -> &'static Mutex<HashMap<(u64, u32), Arc<Fq>>> {
    static REG: OnceLock<Mutex<HashMap<(u64, u32), Arc<Fq>>>> = OnceLock::new();
    REG.get_or_init(|| Mutex::new(HashMap::new()))
}

fn is_prime_u64(n: u64) -> bool {
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

// ---------------------------------------------------------------------------
// Bootstrap polynomial arithmetic over F_p (dense u64 coefficient vectors,
// constant term first). Only used to build field tables; the general-purpose
// polynomial type over any F_q lives in `crate::polynomial`.
// ---------------------------------------------------------------------------

fn fp_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                out[i + j] = (out[i + j] + ai * bj) % p;
            }
        }
    }
    fp_trim(&mut out);
    out
}

fn fp_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut rem = a.to_vec();
    fp_trim(&mut rem);
    let dm = m.len() - 1;
    let lead_inv = invmod_u64(m[dm], p);
    while rem.len() > dm {
        let k = rem.len() - 1 - dm;
        let c = (rem[rem.len() - 1] * lead_inv) % p;
        if c != 0 {
            for j in 0..=dm {
                let t = (c * m[j]) % p;
                rem[k + j] = (rem[k + j] + p - t) % p;
            }
        }
        rem.pop();
        fp_trim(&mut rem);
        if rem.iter().all(|&x| x == 0) {
            return vec![0];
        }
    }
    rem
}

fn fp_powmod(base: &[u64], mut e: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut b = fp_rem(base, m, p);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_rem(&fp_mul(&acc, &b, p), m, p);
        }
        e >>= 1;
        if e > 0 {
            b = fp_rem(&fp_mul(&b, &b, p), m, p);
        }
    }
    acc
}

fn fp_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    fp_trim(&mut r0);
    fp_trim(&mut r1);
    while !(r1.len() == 1 && r1[0] == 0) {
        let r = fp_rem(&r0, &r1, p);
        r0 = r1;
        r1 = r;
    }
    r0
}

fn fp_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for (i, &c) in a.iter().enumerate() {
        out[i] = c % p;
    }
    for (i, &c) in b.iter().enumerate() {
        out[i] = (out[i] + p - c % p) % p;
    }
    fp_trim(&mut out);
    out
}

/// Irreducibility over `F_p` by the distinct-degree criterion:
/// `m | X^{p^f} - X` and `gcd(X^{p^{f/r}} - X, m) = 1` for prime `r | f`.
fn fp_is_irreducible(m: &[u64], p: u64) -> bool {
    let f = (m.len() - 1) as u64;
    if f == 0 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // X^{p^f} mod m via repeated p-power
    let mut xp = x.clone();
    for _ in 0..f {
        xp = fp_powmod(&xp, p, m, p);
    }
    if fp_sub(&xp, &x, p) != vec![0] {
        return false;
    }
    for (r, _) in factorize(f) {
        let mut xr = x.clone();
        for _ in 0..f / r {
            xr = fp_powmod(&xr, p, m, p);
        }
        let g = fp_gcd(m, &fp_sub(&xr, &x, p), p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// The monic irreducible of degree `f` over `F_p` with the smallest
/// coefficient code.
fn minimal_modulus(p: u64, f: u32) -> Vec<u64> {
    if f == 1 {
        return vec![0, 1]; // X
    }
    let fu = f as usize;
    let bound = p.pow(f);
    for code in 0..bound {
        let mut m = vec![0u64; fu + 1];
        let mut c = code;
        for digit in m.iter_mut().take(fu) {
            *digit = c % p;
            c /= p;
        }
        m[fu] = 1;
        if fp_is_irreducible(&m, p) {
            return m;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p");
}

impl Fq {
    /// Fetch (or construct and cache) the field with `q = p^f` elements.
    pub fn new(p: u64, f: u32) -> Result<Arc<Fq>> {
        if !is_prime_u64(p) {
            return Err(Error::invalid(format!("{p} is not prime")));
        }
        if f == 0 || f as usize > MAX_F {
            return Err(Error::invalid(format!("extension degree {f} out of range")));
        }
        let q = p.checked_pow(f).filter(|&q| q <= Q_CAP).ok_or_else(|| {
            Error::FieldTooLarge(format!("p^f = {p}^{f} exceeds the supported size"))
        })?;
        {
            let reg = fq_registry().lock().expect("field registry poisoned");
            if let Some(fq) = reg.get(&(p, f)) {
                return Ok(fq.clone());
            }
        }
        let fq = Arc::new(Fq::build(p, f, q));
        let mut reg = fq_registry().lock().expect("field registry poisoned");
        Ok(reg.entry((p, f)).or_insert(fq).clone())
    }

    fn build(p: u64, f: u32, q: u64) -> Fq {
        let modulus = minimal_modulus(p, f);
        let fu = f as usize;
        // Rows for X^{f+j} mod modulus.
        let mut rows: Vec<Vec<u64>> = Vec::new();
        if fu >= 1 {
            let base: Vec<u64> = (0..fu).map(|i| (p - modulus[i] % p) % p).collect();
            rows.push(base);
            for j in 1..fu.saturating_sub(1) {
                let prev = rows[j - 1].clone();
                let mut next = vec![0u64; fu];
                for i in 0..fu - 1 {
                    next[i + 1] = prev[i];
                }
                let top = prev[fu - 1];
                if top != 0 {
                    for i in 0..fu {
                        next[i] = (next[i] + top * rows[0][i]) % p;
                    }
                }
                rows.push(next);
            }
        }
        let mut field = Fq {
            p,
            f,
            q,
            modulus,
            reduction_rows: rows,
            trace_basis: Vec::new(),
            generator: 0,
            dlog: OnceLock::new(),
        };
        // Absolute trace of basis monomials: Tr(a) = sum_{j<f} a^{p^j}.
        let mut tb = Vec::with_capacity(fu);
        for i in 0..fu {
            let a = field.monomial(i);
            let mut acc = a;
            let mut t = a;
            for _ in 1..f {
                t = field.pow(t, p);
                acc = field.add(acc, t);
            }
            debug_assert!(acc < p, "trace of a basis monomial must be a prime-field constant");
            tb.push(acc);
        }
        field.trace_basis = tb;
        field.generator = field.find_generator();
        field
    }

    fn monomial(&self, i: usize) -> u64 {
        self.p.pow(i as u32)
    }

    fn find_generator(&self) -> u64 {
        if self.q == 2 {
            return 1;
        }
        let n = self.q - 1;
        let primes: Vec<u64> = factorize(n).into_iter().map(|(pr, _)| pr).collect();
        for c in 2..self.q {
            if primes.iter().all(|&r| self.pow(c, n / r) != 1) {
                return c;
            }
        }
        unreachable!("F_q* is cyclic, so a generator exists");
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// The deterministic multiplicative generator.
    pub fn generator(&self) -> u64 {
        self.generator
    }

    /// The modulus polynomial (constant first, monic, length `f + 1`).
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    fn decode(&self, a: u64) -> Digits {
        debug_assert!(a < self.q, "element code {a} out of range for F_{}", self.q);
        let mut d = [0u64; MAX_F];
        let mut c = a;
        for slot in d.iter_mut().take(self.f as usize) {
            *slot = c % self.p;
            c /= self.p;
        }
        d
    }

    fn encode(&self, d: &Digits) -> u64 {
        let mut c = 0u64;
        for i in (0..self.f as usize).rev() {
            c = c * self.p + d[i];
        }
        c
    }

    /// Reduce an integer into the prime subfield.
    pub fn from_int(&self, n: i64) -> u64 {
        n.rem_euclid(self.p as i64) as u64
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.f == 1 {
            return (a + b) % self.p;
        }
        let da = self.decode(a);
        let db = self.decode(b);
        let mut out = [0u64; MAX_F];
        for i in 0..self.f as usize {
            out[i] = (da[i] + db[i]) % self.p;
        }
        self.encode(&out)
    }

    pub fn neg(&self, a: u64) -> u64 {
        if self.f == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let da = self.decode(a);
        let mut out = [0u64; MAX_F];
        for i in 0..self.f as usize {
            out[i] = (self.p - da[i]) % self.p;
        }
        self.encode(&out)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        if self.f == 1 {
            return (a * b) % self.p;
        }
        if a == 0 || b == 0 {
            return 0;
        }
        let da = self.decode(a);
        let db = self.decode(b);
        let fu = self.f as usize;
        let mut prod = [0u64; 2 * MAX_F];
        for i in 0..fu {
            if da[i] == 0 {
                continue;
            }
            for j in 0..fu {
                if db[j] != 0 {
                    prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
                }
            }
        }
        let mut out = [0u64; MAX_F];
        out[..fu].copy_from_slice(&prod[..fu]);
        for k in fu..2 * fu - 1 {
            let c = prod[k];
            if c != 0 {
                let row = &self.reduction_rows[k - fu];
                for i in 0..fu {
                    if row[i] != 0 {
                        out[i] = (out[i] + c * row[i]) % self.p;
                    }
                }
            }
        }
        self.encode(&out)
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero(format!("inverse of 0 in F_{}", self.q)));
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Absolute trace `Tr_{F_q/F_p}(a)`, returned as a residue `0 <= t < p`.
    pub fn trace_to_prime(&self, a: u64) -> u64 {
        if self.f == 1 {
            return a % self.p;
        }
        let d = self.decode(a);
        let mut t = 0u64;
        for i in 0..self.f as usize {
            t = (t + d[i] * self.trace_basis[i]) % self.p;
        }
        t
    }

    fn dlog_table(&self) -> Result<&Vec<u32>> {
        if self.q > DLOG_CAP {
            return Err(Error::FieldTooLarge(format!(
                "discrete-log table for q = {} exceeds the cap {DLOG_CAP}",
                self.q
            )));
        }
        Ok(self.dlog.get_or_init(|| {
            let mut table = vec![u32::MAX; self.q as usize];
            let mut x = 1u64;
            for j in 0..self.q - 1 {
                debug_assert!(table[x as usize] == u32::MAX, "generator has full order");
                table[x as usize] = j as u32;
                x = self.mul(x, self.generator);
            }
            table
        }))
    }

    /// Discrete log base the deterministic generator; `None` for 0.
    pub fn dlog(&self, a: u64) -> Result<Option<u64>> {
        if a == 0 {
            return Ok(None);
        }
        let t = self.dlog_table()?;
        Ok(Some(t[a as usize] as u64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: u64) -> Result<u64> {
        let j = self
            .dlog(a)?
            .ok_or_else(|| Error::invalid("order of 0 is undefined"))?;
        Ok((self.q - 1) / gcd_u64(self.q - 1, j))
    }

    /// The degree-`n` extension field `F_{q^n}`.
    pub fn extension(&self, n: u32) -> Result<Arc<Fq>> {
        Fq::new(self.p, self.f * n)
    }

    /// All element codes, `0 .. q`.
    pub fn elements(&self) -> std::ops::Range<u64> {
        0..self.q
    }
}

// ---------------------------------------------------------------------------
// Embeddings of one field into another.
// ---------------------------------------------------------------------------

/// The deterministic embedding `F_q -> F_{q^n}` sending the base modulus
/// root `X` to its smallest-code root in the extension, together with the
/// inverse map on the image and norm/trace helpers.
pub struct Embedding {
    base: Arc<Fq>,
    ext: Arc<Fq>,
    /// Images of the base basis monomials `X^i` in the extension.
    basis_images: Vec<u64>,
    /// Codes in the image mapped back to base codes.
    retraction: HashMap<u64, u64>,
    /// `dlog_base(Norm(G))` where `G` generates the extension: the norm of
    /// the extension generator expressed through the base generator.
    norm_generator_dlog: u64,
}

impl Embedding {
    /// Construct the embedding; the extension degree must be integral and
    /// the extension small enough to search for a modulus root.
    pub fn new(base: &Arc<Fq>, ext: &Arc<Fq>) -> Result<Embedding> {
        if base.p() != ext.p() || ext.f() % base.f() != 0 {
            return Err(Error::invalid(format!(
                "F_{} is not an extension of F_{}",
                ext.q(),
                base.q()
            )));
        }
        if Arc::ptr_eq(base, ext) || ext.f() == base.f() {
            // Identity embedding.
            let mut retraction = HashMap::with_capacity(base.q() as usize);
            for a in base.elements() {
                retraction.insert(a, a);
            }
            let basis_images = (0..base.f() as usize).map(|i| base.monomial(i)).collect();
            return Ok(Embedding {
                base: base.clone(),
                ext: ext.clone(),
                basis_images,
                retraction,
                norm_generator_dlog: 1,
            });
        }
        // Smallest-code root of the base modulus in the extension. Over a
        // prime base the images are the plain residues and no search is
        // needed, so large extensions stay available for counting walks.
        let root = if base.f() == 1 {
            0
        } else {
            if ext.q() > DLOG_CAP {
                return Err(Error::FieldTooLarge(format!(
                    "embedding search in F_{} exceeds the table cap",
                    ext.q()
                )));
            }
            let m = base.modulus();
            let mut found = None;
            'outer: for y in ext.elements() {
                // Horner evaluation of the base modulus (prime-field coeffs).
                let mut acc = 0u64;
                for &c in m.iter().rev() {
                    acc = ext.add(ext.mul(acc, y), c);
                }
                if acc == 0 {
                    found = Some(y);
                    break 'outer;
                }
            }
            found.ok_or_else(|| {
                Error::Inconsistency("base modulus has no root in the extension".into())
            })?
        };
        let mut basis_images = Vec::with_capacity(base.f() as usize);
        let mut pw = 1u64;
        for _ in 0..base.f() {
            basis_images.push(pw);
            pw = ext.mul(pw, root);
        }
        let embed_one = |a: u64, base: &Fq, ext: &Fq, imgs: &[u64]| -> u64 {
            let d = base.decode(a);
            let mut acc = 0u64;
            for i in 0..base.f() as usize {
                if d[i] != 0 {
                    // scalar multiple of an image: prime-field scalar acts
                    // digitwise, but mul handles it uniformly.
                    acc = ext.add(acc, ext.mul(d[i], imgs[i]));
                }
            }
            acc
        };
        let mut retraction = HashMap::with_capacity(base.q() as usize);
        for a in base.elements() {
            retraction.insert(embed_one(a, base, ext, &basis_images), a);
        }
        // Norm of the extension generator: N(y) = y^{(Q-1)/(q-1)}.
        let ng = ext.pow(ext.generator(), (ext.q() - 1) / (base.q() - 1));
        let ng_base = *retraction
            .get(&ng)
            .ok_or_else(|| Error::Inconsistency("norm left the base field image".into()))?;
        let norm_generator_dlog = base
            .dlog(ng_base)?
            .ok_or_else(|| Error::Inconsistency("norm of a generator is nonzero".into()))?;
        Ok(Embedding {
            base: base.clone(),
            ext: ext.clone(),
            basis_images,
            retraction,
            norm_generator_dlog,
        })
    }

    pub fn base(&self) -> &Arc<Fq> {
        &self.base
    }

    pub fn ext(&self) -> &Arc<Fq> {
        &self.ext
    }

    /// Relative degree `[ext : base]`.
    pub fn degree(&self) -> u32 {
        self.ext.f() / self.base.f()
    }

    pub fn embed(&self, a: u64) -> u64 {
        let d = self.base.decode(a);
        let mut acc = 0u64;
        for i in 0..self.base.f() as usize {
            if d[i] != 0 {
                acc = self.ext.add(acc, self.ext.mul(d[i], self.basis_images[i]));
            }
        }
        acc
    }

    /// Map an extension element back to the base field if it lies in the
    /// image.
    pub fn retract(&self, y: u64) -> Option<u64> {
        self.retraction.get(&y).copied()
    }

    /// Relative norm `N_{ext/base}(y)` as a base-field code.
    pub fn norm(&self, y: u64) -> u64 {
        if y == 0 {
            return 0;
        }
        let n = self.ext.pow(y, (self.ext.q() - 1) / (self.base.q() - 1));
        *self
            .retraction
            .get(&n)
            .expect("norms always land in the base field")
    }

    /// Relative trace `Tr_{ext/base}(y)` as a base-field code.
    pub fn trace(&self, y: u64) -> u64 {
        let mut acc = y;
        let mut t = y;
        for _ in 1..self.degree() {
            t = self.ext.pow(t, self.base.q());
            acc = self.ext.add(acc, t);
        }
        *self
            .retraction
            .get(&acc)
            .expect("relative traces always land in the base field")
    }

    /// `dlog_base(N(G))` for the extension generator `G`; the key constant
    /// for composing characters with the norm.
    pub fn norm_generator_dlog(&self) -> u64 {
        self.norm_generator_dlog
    }
}

// ---------------------------------------------------------------------------
// Characters.
// ---------------------------------------------------------------------------

/// A multiplicative character of `F_q^*`, pinned to the deterministic
/// generator: `chi_k(g^j) = zeta_{q-1}^{k j}`.
#[derive(Clone)]
pub struct MultChar {
    field: Arc<Fq>,
    k: u64,
}

impl fmt::Debug for MultChar {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "chi[{}] on F_{}", self.k, self.field.q())
    }
}

impl MultChar {
    pub fn new(field: &Arc<Fq>, k: u64) -> MultChar {
        MultChar { field: field.clone(), k: k % (field.q() - 1).max(1) }
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    /// Exponent `k` with respect to the generator, normalised mod `q - 1`.
    pub fn exponent(&self) -> u64 {
        self.k
    }

    pub fn is_trivial(&self) -> bool {
        self.k == 0
    }

    /// Exact order of the character.
    pub fn order(&self) -> u64 {
        let n = self.field.q() - 1;
        if n == 0 {
            return 1;
        }
        n / gcd_u64(n, self.k)
    }

    /// Evaluate at a nonzero element.
    pub fn eval(&self, a: u64) -> Result<CycNum> {
        let j = self
            .field
            .dlog(a)?
            .ok_or_else(|| Error::invalid("multiplicative character at 0"))?;
        let n = self.field.q() - 1;
        Ok(CycNum::root_of_unity(n, ((self.k as u128 * j as u128) % n as u128) as i64))
    }

    /// Pointwise product of characters on the same field.
    pub fn mul(&self, other: &MultChar) -> MultChar {
        assert_eq!(self.field.q(), other.field.q(), "characters on different fields");
        MultChar::new(&self.field, (self.k + other.k) % (self.field.q() - 1))
    }

    /// Inverse character (= complex conjugate).
    pub fn inv(&self) -> MultChar {
        let n = self.field.q() - 1;
        MultChar::new(&self.field, (n - self.k % n) % n)
    }

    pub fn conj(&self) -> MultChar {
        self.inv()
    }

    pub fn pow(&self, e: u64) -> MultChar {
        let n = (self.field.q() - 1) as u128;
        MultChar::new(&self.field, ((self.k as u128 * e as u128) % n) as u64)
    }

    /// Value at `-1` (a sign; trivial in characteristic 2).
    pub fn value_at_minus_one(&self) -> Result<CycNum> {
        self.eval(self.field.neg(1))
    }

    /// Compose with the relative norm: the character `chi ∘ N_{ext/base}`
    /// of the extension field. With `e0 = dlog_base(N(G))`, the composed
    /// exponent is `k * e0 * (Q-1)/(q-1) mod (Q-1)`.
    pub fn inflate(&self, emb: &Embedding) -> MultChar {
        assert_eq!(emb.base().q(), self.field.q(), "embedding base mismatch");
        let q1 = (self.field.q() - 1) as u128;
        let bigq1 = (emb.ext().q() - 1) as u128;
        let k = (self.k as u128 * emb.norm_generator_dlog() as u128 % bigq1) * (bigq1 / q1) % bigq1;
        MultChar::new(emb.ext(), k as u64)
    }
}

/// An additive character `psi_c(x) = zeta_p^{Tr(c x)}` of `F_q`.
#[derive(Clone)]
pub struct AddChar {
    field: Arc<Fq>,
    c: u64,
}

impl fmt::Debug for AddChar {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "psi[{}] on F_{}", self.c, self.field.q())
    }
}

impl AddChar {
    pub fn new(field: &Arc<Fq>, c: u64) -> AddChar {
        AddChar { field: field.clone(), c: c % field.q() }
    }

    /// The canonical additive character `psi_1`.
    pub fn canonical(field: &Arc<Fq>) -> AddChar {
        AddChar::new(field, 1)
    }

    pub fn field(&self) -> &Arc<Fq> {
        &self.field
    }

    pub fn parameter(&self) -> u64 {
        self.c
    }

    pub fn is_trivial(&self) -> bool {
        self.c == 0
    }

    pub fn eval(&self, x: u64) -> CycNum {
        let t = self.field.trace_to_prime(self.field.mul(self.c, x));
        CycNum::root_of_unity(self.field.p(), t as i64)
    }

    /// Translate `psi_c` to `psi_{c a}` (precomposition with `x -> a x`).
    pub fn scale(&self, a: u64) -> AddChar {
        AddChar::new(&self.field, self.field.mul(self.c, a))
    }

    /// Compose with the relative trace: `psi ∘ Tr_{ext/base}` is the
    /// additive character of the extension with parameter `embed(c)`
    /// (trace transitivity).
    pub fn inflate(&self, emb: &Embedding) -> AddChar {
        assert_eq!(emb.base().q(), self.field.q(), "embedding base mismatch");
        AddChar::new(emb.ext(), emb.embed(self.c))
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
