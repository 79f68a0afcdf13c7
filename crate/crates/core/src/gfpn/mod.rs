//! Exact arithmetic in GF(p) and GF(p^n).
//!
//! A field is a prime p together with a monic irreducible modulus of degree n
//! over GF(p); elements are coefficient vectors reduced against the modulus.
//! Values are immutable and cheap to clone; all operations are pure, so the
//! types are safe to share across threads.

mod matrix;
mod tensor;

pub use matrix::{KernelBasis, Matrix};
pub use tensor::{TensorAlgebra, TensorElement};

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulusShape { expected: usize, got: Vec<u64> },
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u64 },
    #[error("element needs {expected} coefficients, got {got}")]
    WrongCoefficientCount { expected: usize, got: usize },
    #[error("subfield degree {f} does not divide extension degree {n}")]
    BadSubfieldDegree { f: usize, n: usize },
}

#[derive(PartialEq, Eq, Hash)]
struct FieldData {
    p: u64,
    n: usize,
    /// Monic modulus, `modulus[i]` the coefficient of x^i, length n + 1.
    modulus: Vec<u64>,
}

/// A concrete finite field GF(p^n). Cloning is O(1); two independently built
/// fields compare equal iff they have the same p, n, and modulus.
#[derive(Clone)]
pub struct FiniteField(Arc<FieldData>);

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}
impl Eq for FiniteField {}

impl Hash for FiniteField {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.0.p, self.0.n)
    }
}

impl FiniteField {
    /// Builds GF(p^n) with the lexicographically smallest monic irreducible
    /// modulus of degree n (coefficient tuples compared from the highest
    /// degree down), so the choice is deterministic across runs.
    pub fn new(p: u64, n: usize) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let modulus = smallest_irreducible(p, n);
        Ok(FiniteField(Arc::new(FieldData { p, n, modulus })))
    }

    /// Builds GF(p^n) with a caller-supplied monic modulus of degree n.
    pub fn with_modulus(p: u64, n: usize, modulus: Vec<u64>) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let modulus: Vec<u64> = modulus.iter().map(|&c| c % p).collect();
        if modulus.len() != n + 1 || modulus[n] != 1 {
            return Err(FieldError::BadModulusShape {
                expected: n,
                got: modulus,
            });
        }
        if !is_irreducible(p, &modulus) {
            return Err(FieldError::ReducibleModulus { p });
        }
        Ok(FiniteField(Arc::new(FieldData { p, n, modulus })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    /// p^n as a u128 (n ≤ 12 and small p keep this far from overflow).
    pub fn order(&self) -> u128 {
        (self.0.p as u128).pow(self.0.n as u32)
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: vec![0; self.0.n],
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_int(1)
    }

    /// The residue of an integer in the prime subfield.
    pub fn from_int(&self, v: i64) -> FieldElement {
        let p = self.0.p as i64;
        let mut coeffs = vec![0; self.0.n];
        coeffs[0] = v.rem_euclid(p) as u64;
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// Element with the given coefficient vector (constant term first);
    /// coefficients are reduced mod p.
    pub fn element(&self, coeffs: Vec<u64>) -> Result<FieldElement, FieldError> {
        if coeffs.len() != self.0.n {
            return Err(FieldError::WrongCoefficientCount {
                expected: self.0.n,
                got: coeffs.len(),
            });
        }
        let coeffs = coeffs.iter().map(|&c| c % self.0.p).collect();
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// The class of x modulo the modulus. For n = 1 this is the root of the
    /// degree-one modulus, i.e. a constant.
    pub fn generator(&self) -> FieldElement {
        if self.0.n == 1 {
            // x ≡ −c₀ mod (x + c₀)
            let c0 = self.0.modulus[0];
            return self.from_int(-(c0 as i64));
        }
        let mut coeffs = vec![0; self.0.n];
        coeffs[1] = 1;
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// The element whose coefficient vector is `idx` written base p, the
    /// constant coefficient being the lowest digit. Enumerating 0..order()
    /// visits every element exactly once, in ascending `Ord` order.
    pub fn element_from_index(&self, mut idx: u128) -> FieldElement {
        let p = self.0.p as u128;
        debug_assert!(idx < self.order());
        let mut coeffs = vec![0; self.0.n];
        for c in coeffs.iter_mut() {
            *c = (idx % p) as u64;
            idx /= p;
        }
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// All p^n elements, in ascending `Ord` order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element_from_index(i))
    }
}

/// An element of a [`FiniteField`]. Immutable; arithmetic goes through the
/// `Add`/`Sub`/`Mul`/`Neg` impls on references.
#[derive(Clone)]
pub struct FieldElement {
    field: FiniteField,
    /// Length n, entries in [0, p); coeffs[i] multiplies x^i.
    coeffs: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        debug_assert_eq!(self.field, other.field, "elements of different fields");
        self.coeffs == other.coeffs
    }
}
impl Eq for FieldElement {}

impl Hash for FieldElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Coefficient-lexicographic order, comparing the highest-degree coefficient
/// first. This matches the enumeration order of [`FiniteField::elements`] and
/// the order in which modulus candidates are searched, and it is the order
/// used to pick distinguished roots and to sort report rows.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.field, other.field, "elements of different fields");
        self.coeffs.iter().rev().cmp(other.coeffs.iter().rev())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FieldElement {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn pow(&self, mut e: u128) -> FieldElement {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Panics on zero; callers guard pivots etc.
    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero");
        self.pow(self.field.order() - 2)
    }

    /// x ↦ x^(p^t), with negative t meaning the inverse automorphism.
    /// frobenius(n) is the identity.
    pub fn frobenius(&self, t: i64) -> FieldElement {
        let n = self.field.n() as i64;
        let steps = t.rem_euclid(n) as usize;
        let p = self.field.p() as u128;
        let mut out = self.clone();
        for _ in 0..steps {
            out = out.pow(p);
        }
        out
    }

    /// The norm down to the subfield GF(p^f) ⊆ GF(p^n): the product of the
    /// conjugates x^(p^(f·i)), equal to x^((p^n−1)/(p^f−1)) for x ≠ 0.
    /// The result always satisfies y^(p^f) = y.
    pub fn norm_to_subfield(&self, f: usize) -> Result<FieldElement, FieldError> {
        let n = self.field.n();
        if f == 0 || !n.is_multiple_of(f) {
            return Err(FieldError::BadSubfieldDegree { f, n });
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let p = self.field.p() as u128;
        let e = (self.field.order() - 1) / (p.pow(f as u32) - 1);
        Ok(self.pow(e))
    }
}

macro_rules! field_binop {
    ($trait:ident, $method:ident, $imp:ident) => {
        impl<'a, 'b> std::ops::$trait<&'b FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                debug_assert_eq!(self.field, rhs.field, "elements of different fields");
                $imp(self, rhs)
            }
        }
        impl std::ops::$trait<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl<'b> std::ops::$trait<&'b FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'b FieldElement) -> FieldElement {
                std::ops::$trait::$method(&self, rhs)
            }
        }
    };
}

fn add_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let p = a.field.p();
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(&x, &y)| (x + y) % p)
        .collect();
    FieldElement {
        field: a.field.clone(),
        coeffs,
    }
}

fn sub_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let p = a.field.p();
    let coeffs = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(&x, &y)| (x + p - y) % p)
        .collect();
    FieldElement {
        field: a.field.clone(),
        coeffs,
    }
}

fn mul_impl(a: &FieldElement, b: &FieldElement) -> FieldElement {
    let field = &a.field;
    let p = field.p();
    let n = field.n();
    // Schoolbook product, reducing every accumulation mod p so nothing can
    // overflow, then remainder against the monic modulus.
    let mut prod = vec![0u64; 2 * n - 1];
    for (i, &x) in a.coeffs.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.coeffs.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    reduce_mod_modulus(p, &mut prod, field.modulus());
    FieldElement {
        field: field.clone(),
        coeffs: prod,
    }
}

field_binop!(Add, add, add_impl);
field_binop!(Sub, sub, sub_impl);
field_binop!(Mul, mul, mul_impl);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        let p = self.field.p();
        let coeffs = self.coeffs.iter().map(|&c| (p - c) % p).collect();
        FieldElement {
            field: self.field.clone(),
            coeffs,
        }
    }
}
impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

/// In-place remainder of `poly` by the monic `modulus`; the result is resized
/// to exactly deg(modulus) coefficients.
fn reduce_mod_modulus(p: u64, poly: &mut Vec<u64>, modulus: &[u64]) {
    let n = modulus.len() - 1;
    while poly.len() > n {
        let k = poly.len() - 1;
        let c = poly[k];
        if c != 0 {
            for (i, &m) in modulus.iter().enumerate().take(n) {
                let idx = k - n + i;
                poly[idx] = (poly[idx] + (p - (c * m) % p) % p) % p;
            }
        }
        poly.pop();
    }
    poly.resize(n, 0);
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Degree of a nonzero coefficient vector; None for the zero polynomial.
fn poly_degree(poly: &[u64]) -> Option<usize> {
    poly.iter().rposition(|&c| c != 0)
}

/// Remainder of `a` by monic `b` over GF(p); deg(b) ≥ 1.
fn poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let db = poly_degree(b).expect("divisor must be nonzero");
    debug_assert!(db >= 1 && b[db] == 1);
    let mut r: Vec<u64> = a.to_vec();
    while let Some(dr) = poly_degree(&r) {
        if dr < db {
            break;
        }
        let c = r[dr];
        for (i, &bi) in b.iter().enumerate().take(db + 1) {
            let idx = dr - db + i;
            r[idx] = (r[idx] + (p - (c * bi) % p) % p) % p;
        }
    }
    r
}

/// c^e mod m with 128-bit intermediates; used for coefficient inverses.
fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut out = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            out = ((out as u128 * base as u128) % m as u128) as u64;
        }
        base = ((base as u128 * base as u128) % m as u128) as u64;
        exp >>= 1;
    }
    out
}

/// Product of two reduced polynomials modulo the monic `f`.
fn poly_mulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &ca) in a.iter().enumerate() {
        if ca == 0 {
            continue;
        }
        for (j, &cb) in b.iter().enumerate() {
            if cb == 0 {
                continue;
            }
            prod[i + j] = (prod[i + j] + (ca as u128 * cb as u128 % p as u128) as u64) % p;
        }
    }
    reduce_mod_modulus(p, &mut prod, f);
    prod
}

/// base^e modulo the monic `f` by binary powering.
fn poly_powmod(p: u64, base: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
    let n = f.len() - 1;
    let mut out = vec![0u64; n];
    out[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            out = poly_mulmod(p, &out, &b, f);
        }
        b = poly_mulmod(p, &b, &b, f);
        e >>= 1;
    }
    out
}

/// a^(p^k) mod f by k-fold p-th powering.
fn poly_frobenius_power(p: u64, a: &[u64], k: usize, f: &[u64]) -> Vec<u64> {
    let mut out = a.to_vec();
    for _ in 0..k {
        out = poly_powmod(p, &out, p, f);
    }
    out
}

/// Monic gcd over GF(p). Returns the zero polynomial as an empty vec.
fn poly_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    loop {
        let dy = match poly_degree(&y) {
            Some(dy) => dy,
            None => {
                if let Some(dx) = poly_degree(&x) {
                    let inv = mod_pow(x[dx], p - 2, p);
                    x.truncate(dx + 1);
                    for c in x.iter_mut() {
                        *c = (*c as u128 * inv as u128 % p as u128) as u64;
                    }
                } else {
                    x.clear();
                }
                return x;
            }
        };
        if dy == 0 {
            return vec![1];
        }
        let inv = mod_pow(y[dy], p - 2, p);
        let monic: Vec<u64> = y
            .iter()
            .take(dy + 1)
            .map(|&c| (c as u128 * inv as u128 % p as u128) as u64)
            .collect();
        let r = poly_rem(p, &x, &monic);
        x = y;
        y = r;
    }
}

/// Rabin's criterion on a monic polynomial of degree n: irreducible over
/// GF(p) iff x^(p^n) ≡ x (mod f) and x^(p^(n/q)) − x is coprime to f for
/// every prime q dividing n. Polynomial in n and log p, unlike trial
/// division, so large-characteristic moduli stay cheap to find.
fn is_irreducible(p: u64, poly: &[u64]) -> bool {
    let n = match poly_degree(poly) {
        Some(n) => n,
        None => return false,
    };
    if n == 0 {
        return false;
    }
    if n == 1 {
        return true;
    }
    debug_assert_eq!(poly[n], 1, "both call sites pass a monic modulus");
    let mut x = vec![0u64; n];
    x[1] = 1;

    let mut rest = n;
    let mut q = 2;
    while q * q <= rest {
        if rest % q == 0 {
            while rest % q == 0 {
                rest /= q;
            }
            if !coprime_after_frobenius(p, &x, n / q, poly) {
                return false;
            }
        }
        q += 1;
    }
    if rest > 1 && !coprime_after_frobenius(p, &x, n / rest, poly) {
        return false;
    }
    poly_frobenius_power(p, &x, n, poly) == x
}

/// Whether x^(p^k) − x is coprime to the monic `f`.
fn coprime_after_frobenius(p: u64, x: &[u64], k: usize, f: &[u64]) -> bool {
    let h = poly_frobenius_power(p, x, k, f);
    let diff: Vec<u64> = h.iter().zip(x).map(|(&a, &b)| (a + p - b) % p).collect();
    if poly_degree(&diff).is_none() {
        // x^(p^k) ≡ x: every root already lies in the degree-k subfield
        return false;
    }
    poly_degree(&poly_gcd(p, f, &diff)) == Some(0)
}

/// The lexicographically smallest monic irreducible of degree n over GF(p).
/// Tuples (c_{n−1}, …, c_0) are compared highest degree first, which is the
/// same as counting idx upward with c_i the i-th base-p digit of idx.
fn smallest_irreducible(p: u64, n: usize) -> Vec<u64> {
    let count = (p as u128).pow(n as u32);
    for idx in 0..count {
        let mut poly = vec![0u64; n + 1];
        let mut v = idx;
        for c in poly.iter_mut().take(n) {
            *c = (v % p as u128) as u64;
            v /= p as u128;
        }
        poly[n] = 1;
        if is_irreducible(p, &poly) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}
