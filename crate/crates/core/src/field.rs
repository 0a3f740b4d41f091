//! Exact arithmetic in the tower F_p ⊂ F_q ⊂ F_{q^m} with q = p^s.
//!
//! The big field F_{q^m} is realized as F_p[z]/(modulus) for the
//! lexicographically smallest monic irreducible modulus of degree s·m, so a
//! given (p, s, m) always produces the same field across runs. Elements are
//! stored as packed base-p digit indexes ([`FieldElem`]); multiplication,
//! inversion and automorphism application go through discrete log/antilog
//! tables built once at construction, addition works digit-wise.
//!
//! On top of the field sits the Ore context ([`OreCtx`]): an automorphism
//! θ = φ^l of the extension (φ the q-power Frobenius) together with the inner
//! derivation δ_γ = γ(id − θ). The context provides (θ, δ)-conjugation, the
//! fast norm-based conjugacy test and class-representative sampling used by
//! the code constructions.

use std::sync::Arc;

use rand::Rng;

use crate::error::Error;
use crate::Result;

/// Default cap on the number of field elements a context may enumerate.
pub const DEFAULT_FIELD_GUARD: u64 = 1 << 20;

/// Default cap on brute-force codeword enumerations.
pub const DEFAULT_ENUM_GUARD: u64 = 1 << 16;

/// Effective guard value: the `SUMRANK_SIZE_GUARD` environment variable, when
/// set to an integer, overrides every enumeration guard in the crate.
pub fn size_guard(default: u64) -> u64 {
    std::env::var("SUMRANK_SIZE_GUARD")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

/// An element of F_{q^m}, stored as its packed base-p digit index
/// Σ c_i p^i for coefficients c_0 + c_1 z + … of the residue polynomial.
///
/// All arithmetic goes through the owning [`FieldCtx`]; the index alone is
/// meaningless without it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(pub(crate) u32);

impl FieldElem {
    /// The additive identity (all digits zero in every field).
    pub const ZERO: FieldElem = FieldElem(0);
    /// The multiplicative identity (constant digit 1 in every field).
    pub const ONE: FieldElem = FieldElem(1);

    /// Packed index of the element.
    pub fn index(self) -> u64 {
        self.0 as u64
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// A field automorphism x ↦ x^(p^t) of F_{p^(s·m)}, 0 ≤ t < s·m.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AutMap {
    t: usize,
}

impl AutMap {
    /// Automorphism x ↦ x^(p^t); `t` is reduced modulo the tower degree.
    pub fn new(t: usize, tower_degree: usize) -> AutMap {
        AutMap {
            t: t % tower_degree,
        }
    }

    pub fn identity() -> AutMap {
        AutMap { t: 0 }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_identity(&self) -> bool {
        self.t == 0
    }

    /// The inverse automorphism x ↦ x^(p^(d−t)).
    pub fn inverse(&self, tower_degree: usize) -> AutMap {
        AutMap {
            t: (tower_degree - self.t) % tower_degree,
        }
    }
}

/// An inner derivation δ_γ = γ(id − θ) attached to an Ore context.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Derivation {
    pub gamma: FieldElem,
}

impl Derivation {
    pub fn zero() -> Derivation {
        Derivation {
            gamma: FieldElem::ZERO,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.gamma.is_zero()
    }
}

/// Context for the tower F_p ⊂ F_q ⊂ F_{q^m}.
pub struct FieldCtx {
    p: u64,
    s: usize,
    m: usize,
    /// Tower degree s·m over F_p.
    d: usize,
    /// p^(s·m), the number of elements.
    order: u64,
    /// p^s, the size of the middle subfield.
    q: u64,
    /// Monic irreducible modulus, ascending coefficients, length d+1.
    modulus: Vec<u64>,
    /// exp[i] = index of g^i for the chosen primitive g; length order−1.
    exp: Vec<u32>,
    /// log[idx] = discrete log of idx to base g; log[0] is a sentinel.
    log: Vec<u32>,
    /// Canonical primitive element g.
    primitive: FieldElem,
    /// All q elements of F_q, ascending by index.
    fq_elems: Vec<FieldElem>,
    /// F_p-basis of F_q (s elements, echelonized from `fq_elems`).
    fq_fp_basis: Vec<FieldElem>,
    /// Power basis {w^0, …, w^(m−1)} of F_{q^m} over F_q.
    fq_basis: Vec<FieldElem>,
    /// Inverse of the F_p change-of-basis matrix for `expand_elem`,
    /// row-major d×d over F_p.
    expand_inv: Vec<u64>,
}

// ---------------------------------------------------------------------------
// small number-theory helpers
// ---------------------------------------------------------------------------

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            return false;
        }
        f += 1;
    }
    true
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut f = 2;
    while f * f <= n {
        if n % f == 0 {
            out.push(f);
            while n % f == 0 {
                n /= f;
            }
        }
        f += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// ---------------------------------------------------------------------------
// dense F_p[z] helpers used only during construction
// ---------------------------------------------------------------------------

fn poly_trim(coeffs: &mut Vec<u64>) {
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    poly_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `b`.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let db = b.len() - 1;
    while r.len() > db {
        let lead = r[r.len() - 1];
        let shift = r.len() - 1 - db;
        if lead != 0 {
            for (j, &bj) in b.iter().enumerate() {
                let idx = shift + j;
                let sub = (lead * bj) % p;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.len() <= db && r.last() != Some(&0) {
            break;
        }
    }
    poly_trim(&mut r);
    r
}

/// Decode an integer into ascending base-p digits of fixed width.
fn index_to_digits(mut v: u64, p: u64, width: usize) -> Vec<u64> {
    let mut out = vec![0u64; width];
    for slot in out.iter_mut() {
        *slot = v % p;
        v /= p;
    }
    out
}

/// Monic polynomial of degree `deg` whose lower coefficients encode `v`.
fn candidate_poly(v: u64, p: u64, deg: usize) -> Vec<u64> {
    let mut c = index_to_digits(v, p, deg);
    c.push(1);
    c
}

/// Trial-division irreducibility test for a monic polynomial over F_p.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    if deg == 0 {
        return false;
    }
    if deg == 1 {
        return true;
    }
    for dd in 1..=deg / 2 {
        let count = p.pow(dd as u32);
        for v in 0..count {
            let g = candidate_poly(v, p, dd);
            if poly_rem(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `deg`
/// over F_p (candidates ordered by their packed lower-coefficient index).
fn smallest_irreducible(p: u64, deg: usize) -> Vec<u64> {
    let count = p.checked_pow(deg as u32).expect("guarded earlier");
    for v in 0..count {
        let f = candidate_poly(v, p, deg);
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over F_p")
}

// ---------------------------------------------------------------------------
// field context
// ---------------------------------------------------------------------------

impl FieldCtx {
    /// Build F_{q^m} = F_p[z]/(modulus) with q = p^s, using the
    /// lexicographically smallest monic irreducible modulus of degree s·m.
    pub fn new(p: u64, s: usize, m: usize) -> Result<FieldCtx> {
        Self::validate_shape(p, s, m)?;
        let modulus = smallest_irreducible(p, s * m);
        Self::from_parts(p, s, m, modulus)
    }

    /// Build the tower from an explicit modulus (e.g. when deserializing).
    /// The modulus must be monic irreducible of degree s·m over F_p.
    pub fn with_modulus(p: u64, s: usize, m: usize, modulus: Vec<u64>) -> Result<FieldCtx> {
        Self::validate_shape(p, s, m)?;
        if modulus.len() != s * m + 1 || modulus.last() != Some(&1) {
            return Err(Error::MalformedInput(format!(
                "modulus must be monic of degree {}",
                s * m
            )));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::MalformedInput(
                "modulus coefficients must be reduced mod p".into(),
            ));
        }
        if !poly_is_irreducible(&modulus, p) {
            return Err(Error::MalformedInput("modulus is reducible".into()));
        }
        Self::from_parts(p, s, m, modulus)
    }

    fn validate_shape(p: u64, s: usize, m: usize) -> Result<()> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if s == 0 || m == 0 {
            return Err(Error::BadAutomorphism(
                "tower exponents s and m must be at least 1".into(),
            ));
        }
        let guard = size_guard(DEFAULT_FIELD_GUARD);
        let order = (p as u128).checked_pow((s * m) as u32);
        match order {
            Some(o) if o <= guard as u128 => Ok(()),
            _ => Err(Error::SizeGuardExceeded {
                what: "field order p^(s*m)",
                needed: order.map(|o| o.min(u64::MAX as u128) as u64).unwrap_or(u64::MAX),
                guard,
            }),
        }
    }

    fn from_parts(p: u64, s: usize, m: usize, modulus: Vec<u64>) -> Result<FieldCtx> {
        let d = s * m;
        let order = p.pow(d as u32);
        let q = p.pow(s as u32);

        // Locate a primitive element with plain coefficient arithmetic, then
        // freeze the log/antilog tables.
        let mul_idx = |a: u64, b: u64| -> u64 {
            let da = index_to_digits(a, p, d);
            let db = index_to_digits(b, p, d);
            let prod = poly_mul(&da, &db, p);
            let red = poly_rem(&prod, &modulus, p);
            red.iter()
                .rev()
                .fold(0u64, |acc, &c| acc * p + c)
        };
        let pow_idx = |mut base: u64, mut e: u64| -> u64 {
            let mut acc = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    acc = mul_idx(acc, base);
                }
                base = mul_idx(base, base);
                e >>= 1;
            }
            acc
        };

        let factors = prime_factors(order - 1);
        let mut primitive = 0u64;
        for cand in 1..order {
            if factors
                .iter()
                .all(|&r| pow_idx(cand, (order - 1) / r) != 1)
            {
                primitive = cand;
                break;
            }
        }
        assert!(primitive != 0, "a primitive element always exists");

        let mut exp = vec![0u32; (order - 1) as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = cur as u32;
            assert!(
                log[cur as usize] == u32::MAX,
                "generator cycle collision: modulus not irreducible?"
            );
            log[cur as usize] = i as u32;
            cur = mul_idx(cur, primitive);
        }
        assert!(cur == 1, "primitive element order mismatch");

        let mut ctx = FieldCtx {
            p,
            s,
            m,
            d,
            order,
            q,
            modulus,
            exp,
            log,
            primitive: FieldElem(primitive as u32),
            fq_elems: Vec::new(),
            fq_fp_basis: Vec::new(),
            fq_basis: Vec::new(),
            expand_inv: Vec::new(),
        };

        ctx.fq_elems = ctx.enumerate_fq();
        ctx.fq_fp_basis = ctx.echelon_fp_basis_of_fq();
        ctx.fq_basis = ctx.find_power_basis()?;
        ctx.expand_inv = ctx.build_expand_inverse();
        ctx.spot_check_frobenius_closure();
        Ok(ctx)
    }

    fn enumerate_fq(&self) -> Vec<FieldElem> {
        let mut out = vec![FieldElem::ZERO];
        if self.q == self.order {
            out.extend((1..self.order).map(|i| FieldElem(i as u32)));
            out.sort();
            return out;
        }
        let stride = (self.order - 1) / (self.q - 1);
        for i in 0..(self.q - 1) {
            out.push(FieldElem(self.exp[(i * stride) as usize]));
        }
        out.sort();
        debug_assert!(out.iter().all(|&a| self.pow(a, self.q) == a));
        out
    }

    /// Deterministic F_p-basis of F_q: scan F_q ascending and keep elements
    /// that enlarge the F_p-span of the digit vectors.
    fn echelon_fp_basis_of_fq(&self) -> Vec<FieldElem> {
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut basis = Vec::new();
        'outer: for &e in &self.fq_elems {
            if basis.len() == self.s {
                break;
            }
            let mut v = index_to_digits(e.index(), self.p, self.d);
            // reduce against current echelon rows
            for row in &rows {
                let pivot = row.iter().position(|&c| c != 0).unwrap();
                if v[pivot] != 0 {
                    let factor = (v[pivot] * self.fp_inv(row[pivot])) % self.p;
                    for (vi, ri) in v.iter_mut().zip(row.iter()) {
                        *vi = (*vi + self.p - (factor * ri) % self.p) % self.p;
                    }
                }
            }
            if v.iter().all(|&c| c == 0) {
                continue 'outer;
            }
            rows.push(v);
            basis.push(e);
        }
        assert_eq!(basis.len(), self.s, "F_q must have F_p-dimension s");
        basis
    }

    /// First element (in index order) whose powers w^0..w^(m−1) are
    /// F_q-linearly independent; independence is certified by a nonzero
    /// Moore determinant det((w^j)^(q^i)).
    fn find_power_basis(&self) -> Result<Vec<FieldElem>> {
        for idx in 0..self.order {
            let w = FieldElem(idx as u32);
            let powers: Vec<FieldElem> = (0..self.m).map(|j| self.pow(w, j as u64)).collect();
            if self.moore_det_nonzero(&powers) {
                return Ok(powers);
            }
        }
        unreachable!("F_{{q^m}} always contains an element of degree m over F_q")
    }

    fn moore_det_nonzero(&self, elems: &[FieldElem]) -> bool {
        let m = elems.len();
        let mut mat = vec![FieldElem::ZERO; m * m];
        let mut qe = 1u64;
        for i in 0..m {
            for (j, &b) in elems.iter().enumerate() {
                mat[i * m + j] = self.pow(b, qe);
            }
            qe = qe.saturating_mul(self.q);
        }
        // Gaussian elimination; determinant is nonzero iff full rank.
        let mut rank = 0;
        for col in 0..m {
            let Some(pivot) = (rank..m).find(|&r| !mat[r * m + col].is_zero()) else {
                return false;
            };
            for k in 0..m {
                mat.swap(rank * m + k, pivot * m + k);
            }
            let inv = self.inv(mat[rank * m + col]).unwrap();
            for r in 0..m {
                if r != rank && !mat[r * m + col].is_zero() {
                    let f = self.mul(mat[r * m + col], inv);
                    for k in 0..m {
                        let sub = self.mul(f, mat[rank * m + k]);
                        mat[r * m + k] = self.sub(mat[r * m + k], sub);
                    }
                }
            }
            rank += 1;
        }
        true
    }

    /// Inverse of the d×d F_p matrix whose column s·j+a holds the digits of
    /// u_a·w^j (u the F_p-basis of F_q, w the power basis).
    fn build_expand_inverse(&self) -> Vec<u64> {
        let d = self.d;
        let mut aug = vec![0u64; d * 2 * d];
        for (j, &bj) in self.fq_basis.iter().enumerate() {
            for (a, &ua) in self.fq_fp_basis.iter().enumerate() {
                let col = j * self.s + a;
                let digits = index_to_digits(self.mul(ua, bj).index(), self.p, d);
                for (row, &c) in digits.iter().enumerate() {
                    aug[row * 2 * d + col] = c;
                }
            }
        }
        for row in 0..d {
            aug[row * 2 * d + d + row] = 1;
        }
        // Gauss-Jordan over F_p.
        let mut r = 0;
        for col in 0..d {
            let pivot = (r..d)
                .find(|&rr| aug[rr * 2 * d + col] != 0)
                .expect("change-of-basis matrix is invertible");
            if pivot != r {
                for k in 0..2 * d {
                    aug.swap(r * 2 * d + k, pivot * 2 * d + k);
                }
            }
            let inv = self.fp_inv(aug[r * 2 * d + col]);
            for k in 0..2 * d {
                aug[r * 2 * d + k] = (aug[r * 2 * d + k] * inv) % self.p;
            }
            for rr in 0..d {
                if rr != r && aug[rr * 2 * d + col] != 0 {
                    let f = aug[rr * 2 * d + col];
                    for k in 0..2 * d {
                        let sub = (f * aug[r * 2 * d + k]) % self.p;
                        aug[rr * 2 * d + k] = (aug[rr * 2 * d + k] + self.p - sub) % self.p;
                    }
                }
            }
            r += 1;
        }
        let mut inv = vec![0u64; d * d];
        for row in 0..d {
            for col in 0..d {
                inv[row * d + col] = aug[row * 2 * d + d + col];
            }
        }
        inv
    }

    /// Cheap sanity check of the construction: x^(p^(s·m)) = x.
    fn spot_check_frobenius_closure(&self) {
        let full = self.order <= (1 << 12);
        let step = if full { 1 } else { self.order / 257 + 1 };
        let mut idx = 0;
        while idx < self.order {
            let e = FieldElem(idx as u32);
            assert_eq!(self.pow(e, self.order), e, "Frobenius closure violated");
            idx += step;
        }
    }

    fn fp_inv(&self, a: u64) -> u64 {
        // Fermat inversion in F_p.
        let mut acc = 1u64;
        let mut base = a % self.p;
        let mut e = self.p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }

    // -- basic accessors ----------------------------------------------------

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Tower degree s·m of F_{q^m} over F_p.
    pub fn tower_degree(&self) -> usize {
        self.d
    }

    /// Number of elements p^(s·m).
    pub fn order(&self) -> u64 {
        self.order
    }

    /// Size q = p^s of the middle subfield.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn primitive(&self) -> FieldElem {
        self.primitive
    }

    /// All q elements of F_q in ascending index order.
    pub fn fq_elements(&self) -> &[FieldElem] {
        &self.fq_elems
    }

    /// The power basis of F_{q^m} over F_q.
    pub fn fq_basis(&self) -> &[FieldElem] {
        &self.fq_basis
    }

    pub fn element(&self, idx: u64) -> Result<FieldElem> {
        if idx < self.order {
            Ok(FieldElem(idx as u32))
        } else {
            Err(Error::MalformedInput(format!(
                "element index {idx} out of range for field of order {}",
                self.order
            )))
        }
    }

    /// Element from ascending F_p coefficients (length ≤ s·m, entries < p).
    pub fn elem_from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElem> {
        if coeffs.len() > self.d {
            return Err(Error::MalformedInput(format!(
                "too many coefficients: {} > {}",
                coeffs.len(),
                self.d
            )));
        }
        if coeffs.iter().any(|&c| c >= self.p) {
            return Err(Error::MalformedInput(
                "coefficient not reduced mod p".into(),
            ));
        }
        let idx = coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c);
        Ok(FieldElem(idx as u32))
    }

    /// Ascending F_p coefficients of the element, always of length s·m.
    pub fn coeffs(&self, e: FieldElem) -> Vec<u64> {
        index_to_digits(e.index(), self.p, self.d)
    }

    // -- arithmetic ---------------------------------------------------------

    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(a.0 ^ b.0);
        }
        let da = index_to_digits(a.index(), self.p, self.d);
        let db = index_to_digits(b.index(), self.p, self.d);
        let sum: Vec<u64> = da
            .iter()
            .zip(db.iter())
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        FieldElem(sum.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32)
    }

    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.p == 2 {
            return a;
        }
        let da = index_to_digits(a.index(), self.p, self.d);
        let neg: Vec<u64> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        FieldElem(neg.iter().rev().fold(0u64, |acc, &c| acc * self.p + c) as u32)
    }

    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        let la = self.log[a.0 as usize] as u64;
        let lb = self.log[b.0 as usize] as u64;
        FieldElem(self.exp[((la + lb) % (self.order - 1)) as usize])
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let la = self.log[a.0 as usize] as u64;
        let e = (self.order - 1 - la) % (self.order - 1);
        Ok(FieldElem(self.exp[e as usize]))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^e with the convention 0^0 = 1.
    pub fn pow(&self, a: FieldElem, e: u64) -> FieldElem {
        if a.is_zero() {
            return if e == 0 { FieldElem::ONE } else { FieldElem::ZERO };
        }
        let la = self.log[a.0 as usize] as u64;
        let ord = self.order - 1;
        FieldElem(self.exp[((la * (e % ord)) % ord) as usize])
    }

    /// Apply the automorphism x ↦ x^(p^t).
    pub fn aut_apply(&self, aut: AutMap, a: FieldElem) -> FieldElem {
        self.pow(a, self.p.pow(aut.t as u32))
    }

    /// True iff a lies in the middle subfield F_q.
    pub fn is_in_fq(&self, a: FieldElem) -> bool {
        self.pow(a, self.q) == a
    }

    /// F_q-coordinates of `e` in the power basis, as a vector of m subfield
    /// elements.
    pub fn expand_elem(&self, e: FieldElem) -> Vec<FieldElem> {
        let digits = index_to_digits(e.index(), self.p, self.d);
        let mut coords = vec![FieldElem::ZERO; self.m];
        for (j, coord) in coords.iter_mut().enumerate() {
            let mut acc = FieldElem::ZERO;
            for (a, &ua) in self.fq_fp_basis.iter().enumerate() {
                let row_sum: u64 = (0..self.d)
                    .map(|col| self.expand_inv[(j * self.s + a) * self.d + col] * digits[col] % self.p)
                    .sum::<u64>()
                    % self.p;
                if row_sum != 0 {
                    acc = self.add(acc, self.mul(FieldElem(row_sum as u32), ua));
                }
            }
            *coord = acc;
        }
        coords
    }

    // -- sampling -----------------------------------------------------------

    pub fn random_elem<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(0..self.order) as u32)
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        FieldElem(rng.gen_range(1..self.order) as u32)
    }

    pub fn random_fq<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.fq_elems[rng.gen_range(0..self.fq_elems.len())]
    }
}

impl std::fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "FieldCtx(p={}, s={}, m={}, modulus={:?})",
            self.p, self.s, self.m, self.modulus
        )
    }
}

// ---------------------------------------------------------------------------
// Ore context: automorphism + inner derivation + conjugacy machinery
// ---------------------------------------------------------------------------

/// The operator context (F_{q^m}, θ = φ^l, δ_γ) that all skew-polynomial and
/// code constructions run against.
///
/// Admissible automorphisms are θ = φ^l with gcd(l, m) = 1 (the fixed field
/// of θ is then exactly F_q) and the identity l = 0, for which the only inner
/// derivation is zero and every nonzero element forms its own conjugacy
/// class.
#[derive(Clone)]
pub struct OreCtx {
    pub field: Arc<FieldCtx>,
    theta_l: usize,
    theta: AutMap,
    der: Derivation,
    /// Exponent (q^m−1)/(p^gcd(t, s·m)−1) of the fast conjugacy criterion.
    class_exp: u64,
    /// Number of nontrivial conjugacy classes, p^gcd(t, s·m) − 1.
    class_count: u64,
}

impl OreCtx {
    /// Create a context with θ = φ^l (φ: x ↦ x^q) and δ = γ(id − θ).
    pub fn new(field: Arc<FieldCtx>, l: usize, gamma: FieldElem) -> Result<OreCtx> {
        let m = field.m();
        let l = l % m;
        if l != 0 && gcd(l as u64, m as u64) != 1 {
            return Err(Error::BadAutomorphism(format!(
                "theta = phi^{l} has fixed field larger than F_q (gcd({l}, {m}) != 1)"
            )));
        }
        if l == 0 && !gamma.is_zero() {
            return Err(Error::BadAutomorphism(
                "the identity automorphism only admits the zero derivation".into(),
            ));
        }
        if gamma.index() >= field.order() {
            return Err(Error::MalformedInput("gamma outside the field".into()));
        }
        let theta = AutMap::new(field.s() * l, field.tower_degree());
        let g = gcd(theta.t() as u64, field.tower_degree() as u64) as u32;
        let fixed = field.p().pow(if g == 0 {
            field.tower_degree() as u32
        } else {
            g
        });
        let class_count = fixed - 1;
        let class_exp = (field.order() - 1) / class_count;
        Ok(OreCtx {
            field,
            theta_l: l,
            theta,
            der: Derivation { gamma },
            class_exp,
            class_count,
        })
    }

    pub fn theta_l(&self) -> usize {
        self.theta_l
    }

    pub fn theta(&self) -> AutMap {
        self.theta
    }

    pub fn derivation(&self) -> Derivation {
        self.der
    }

    pub fn gamma(&self) -> FieldElem {
        self.der.gamma
    }

    pub fn is_identity_theta(&self) -> bool {
        self.theta.is_identity()
    }

    pub fn is_zero_derivation(&self) -> bool {
        self.der.is_zero()
    }

    /// θ(a).
    pub fn theta_apply(&self, a: FieldElem) -> FieldElem {
        self.field.aut_apply(self.theta, a)
    }

    /// θ^i(a) for any (possibly negative) i.
    pub fn theta_pow_apply(&self, i: i64, a: FieldElem) -> FieldElem {
        let d = self.field.tower_degree() as i64;
        let t = ((self.theta.t() as i64 * i) % d + d) % d;
        self.field.aut_apply(AutMap::new(t as usize, d as usize), a)
    }

    /// δ(a) = γ(a − θ(a)).
    pub fn der_apply(&self, a: FieldElem) -> FieldElem {
        if self.der.is_zero() {
            return FieldElem::ZERO;
        }
        let f = &self.field;
        f.mul(self.der.gamma, f.sub(a, self.theta_apply(a)))
    }

    /// Generalized power norm N_i(a) = θ^(i−1)(a)···θ(a)·a, with N_0 = 1.
    pub fn gen_norm(&self, a: FieldElem, i: usize) -> FieldElem {
        let mut n = FieldElem::ONE;
        for _ in 0..i {
            n = self.field.mul(self.theta_apply(n), a);
        }
        n
    }

    /// (θ, δ)-conjugate a^c = θ(c)·a·c^{−1} + δ(c)·c^{−1}.
    pub fn conjugate(&self, a: FieldElem, c: FieldElem) -> Result<FieldElem> {
        if c.is_zero() {
            return Err(Error::ZeroConjugator);
        }
        let f = &self.field;
        let cinv = f.inv(c)?;
        let lin = f.mul(f.mul(self.theta_apply(c), a), cinv);
        Ok(f.add(lin, f.mul(self.der_apply(c), cinv)))
    }

    /// Exponent used by the fast conjugacy criterion.
    pub fn class_exponent(&self) -> u64 {
        self.class_exp
    }

    /// Number of nontrivial conjugacy classes.
    pub fn class_count(&self) -> u64 {
        self.class_count
    }

    /// Fast conjugacy test: a ~ b iff both equal γ, or neither does and
    /// ((b−γ)/(a−γ))^((q^m−1)/(q_θ−1)) = 1 for q_θ the fixed-field size of θ.
    pub fn same_class(&self, a: FieldElem, b: FieldElem) -> bool {
        let gamma = self.der.gamma;
        if a == gamma || b == gamma {
            return a == b;
        }
        let f = &self.field;
        let ratio = f
            .div(f.sub(b, gamma), f.sub(a, gamma))
            .expect("a != gamma checked above");
        f.pow(ratio, self.class_exp) == FieldElem::ONE
    }

    /// True iff a lies in the trivial class K(γ) = {γ}.
    pub fn is_trivial_class(&self, a: FieldElem) -> bool {
        self.same_class(a, self.der.gamma)
    }

    /// Sample `count` pairwise non-conjugate nontrivial class representatives.
    pub fn sample_class_reps<R: Rng + ?Sized>(
        &self,
        count: usize,
        rng: &mut R,
    ) -> Result<Vec<FieldElem>> {
        if count as u64 > self.class_count {
            return Err(Error::NotEnoughClasses {
                requested: count as u64,
                available: self.class_count,
            });
        }
        let mut reps: Vec<FieldElem> = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while reps.len() < count && attempts < 4096 {
            attempts += 1;
            let cand = self.field.random_elem(rng);
            if self.is_trivial_class(cand) {
                continue;
            }
            if reps.iter().any(|&r| self.same_class(r, cand)) {
                continue;
            }
            reps.push(cand);
        }
        if reps.len() < count {
            // Deterministic completion; only reachable for tiny fields where
            // rejection sampling is unlucky.
            for idx in 0..self.field.order() {
                if reps.len() == count {
                    break;
                }
                let cand = FieldElem(idx as u32);
                if !self.is_trivial_class(cand) && !reps.iter().any(|&r| self.same_class(r, cand))
                {
                    reps.push(cand);
                }
            }
        }
        assert_eq!(reps.len(), count);
        Ok(reps)
    }

    /// First `count` nontrivial class representatives in element-index order.
    pub fn first_class_reps(&self, count: usize) -> Result<Vec<FieldElem>> {
        if count as u64 > self.class_count {
            return Err(Error::NotEnoughClasses {
                requested: count as u64,
                available: self.class_count,
            });
        }
        let mut reps = Vec::with_capacity(count);
        for idx in 0..self.field.order() {
            if reps.len() == count {
                break;
            }
            let cand = FieldElem(idx as u32);
            if !self.is_trivial_class(cand) && !reps.iter().any(|&r| self.same_class(r, cand)) {
                reps.push(cand);
            }
        }
        assert_eq!(reps.len(), count);
        Ok(reps)
    }

    /// The context (θ^{−1}, δ = 0) that duals of zero-derivation codes live
    /// in.
    pub fn dual(&self) -> Result<OreCtx> {
        if !self.der.is_zero() {
            return Err(Error::NonzeroDerivation);
        }
        let m = self.field.m();
        OreCtx::new(
            Arc::clone(&self.field),
            (m - self.theta_l) % m,
            FieldElem::ZERO,
        )
    }
}

impl std::fmt::Debug for OreCtx {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "OreCtx(theta=phi^{}, gamma=e{}, field={:?})",
            self.theta_l,
            self.der.gamma.index(),
            self.field
        )
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
