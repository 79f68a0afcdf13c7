//! The algebra GF(p^f) ⊗ K for K = GF(p^n) with f | n, and its primitive
//! idempotents.
//!
//! Elements are written in the K-basis g^0⊗1, …, g^(f−1)⊗1 where g generates
//! GF(p^f); an element is therefore a length-f vector of K-coefficients, and
//! multiplication is polynomial multiplication modulo the minimal polynomial
//! of g. The f embeddings σ_i : GF(p^f) → K correspond to the f roots of that
//! polynomial in K, and the idempotent e_i is the Lagrange interpolation
//! kernel at the i-th root.

use super::{FieldElement, FieldError, FiniteField, Matrix};

/// An element of GF(p^f) ⊗ K: coefficients of g^j ⊗ 1 for j = 0..f, each a
/// K-scalar acting through the right tensor factor.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TensorElement {
    pub coeffs: Vec<FieldElement>,
}

/// GF(p^f) ⊗ K together with the root data fixing the embedding order.
///
/// Embeddings are numbered in Frobenius-cyclic order: σ_0 sends g to the
/// lexicographically smallest root of its minimal polynomial in K, and
/// σ_{i+1}(g) = σ_i(g)^p. This pins down which idempotent is e_0.
#[derive(Debug)]
pub struct TensorAlgebra {
    left: FiniteField,
    right: FiniteField,
    /// roots[i] = σ_i(g) ∈ K.
    roots: Vec<FieldElement>,
}

impl TensorAlgebra {
    pub fn new(f: usize, kappa: &FiniteField) -> Result<TensorAlgebra, FieldError> {
        let n = kappa.n();
        if f == 0 || !n.is_multiple_of(f) {
            return Err(FieldError::BadSubfieldDegree { f, n });
        }
        let left = FiniteField::new(kappa.p(), f)?;
        let roots = embedding_roots(&left, kappa);
        Ok(TensorAlgebra {
            left,
            right: kappa.clone(),
            roots,
        })
    }

    /// The abstract subfield GF(p^f) (with its canonical modulus).
    pub fn left_field(&self) -> &FiniteField {
        &self.left
    }

    pub fn right_field(&self) -> &FiniteField {
        &self.right
    }

    pub fn f(&self) -> usize {
        self.left.n()
    }

    /// σ_i(g), the image of the left generator under the i-th embedding.
    pub fn embedding_image(&self, i: usize) -> &FieldElement {
        &self.roots[i]
    }

    /// σ_i(a) for an arbitrary a ∈ GF(p^f), by evaluating a's coefficient
    /// vector at the i-th root.
    pub fn embed_via(&self, i: usize, a: &FieldElement) -> FieldElement {
        assert_eq!(a.field(), &self.left, "argument must live in GF(p^f)");
        let rho = &self.roots[i];
        let mut acc = self.right.zero();
        for &c in a.coeffs().iter().rev() {
            acc = &(&acc * rho) + &self.right.from_int(c as i64);
        }
        acc
    }

    pub fn zero(&self) -> TensorElement {
        TensorElement {
            coeffs: vec![self.right.zero(); self.f()],
        }
    }

    pub fn one(&self) -> TensorElement {
        let mut e = self.zero();
        e.coeffs[0] = self.right.one();
        e
    }

    /// a ⊗ 1.
    pub fn embed_left(&self, a: &FieldElement) -> TensorElement {
        assert_eq!(a.field(), &self.left, "argument must live in GF(p^f)");
        TensorElement {
            coeffs: a
                .coeffs()
                .iter()
                .map(|&c| self.right.from_int(c as i64))
                .collect(),
        }
    }

    /// 1 ⊗ c.
    pub fn embed_right(&self, c: &FieldElement) -> TensorElement {
        assert_eq!(c.field(), &self.right, "argument must live in K");
        let mut e = self.zero();
        e.coeffs[0] = c.clone();
        e
    }

    pub fn add(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        TensorElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        TensorElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn mul(&self, a: &TensorElement, b: &TensorElement) -> TensorElement {
        let f = self.f();
        let mut prod = vec![self.right.zero(); 2 * f - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                prod[i + j] = &prod[i + j] + &(x * y);
            }
        }
        // Reduce modulo the (monic) minimal polynomial of g, coefficients
        // lifted into K.
        let modulus: Vec<FieldElement> = self
            .left
            .modulus()
            .iter()
            .map(|&c| self.right.from_int(c as i64))
            .collect();
        for k in (f..prod.len()).rev() {
            let c = prod[k].clone();
            if !c.is_zero() {
                for i in 0..f {
                    prod[k - f + i] = &prod[k - f + i] - &(&c * &modulus[i]);
                }
            }
        }
        prod.truncate(f);
        TensorElement { coeffs: prod }
    }

    /// The coefficientwise p-power a ⊗ r ↦ a ⊗ r^p. This is the map that
    /// permutes the idempotents cyclically.
    pub fn coeff_frobenius(&self, x: &TensorElement) -> TensorElement {
        TensorElement {
            coeffs: x.coeffs.iter().map(|c| c.frobenius(1)).collect(),
        }
    }

    pub fn is_zero(&self, x: &TensorElement) -> bool {
        x.coeffs.iter().all(|c| c.is_zero())
    }

    /// The primitive idempotents e_0, …, e_{f−1}, with e_i supported on the
    /// i-th embedding: (a⊗1)·e_i = (1⊗σ_i(a))·e_i. They sum to 1 and are
    /// pairwise orthogonal by construction (Lagrange interpolation at the f
    /// distinct roots).
    pub fn idempotents(&self) -> Vec<TensorElement> {
        let f = self.f();
        (0..f)
            .map(|i| {
                // numerator Π_{j≠i} (t − ρ_j) as a polynomial in t over K
                let mut num = vec![self.right.one()];
                for (j, rho) in self.roots.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    // multiply by (t − ρ_j)
                    let mut next = vec![self.right.zero(); num.len() + 1];
                    for (k, c) in num.iter().enumerate() {
                        next[k + 1] = &next[k + 1] + c;
                        next[k] = &next[k] - &(c * rho);
                    }
                    num = next;
                }
                // scale by Π_{j≠i} (ρ_i − ρ_j)^{-1}
                let mut denom = self.right.one();
                for (j, rho) in self.roots.iter().enumerate() {
                    if j != i {
                        denom = &denom * &(&self.roots[i] - rho);
                    }
                }
                let scale = denom.inv();
                let mut coeffs: Vec<FieldElement> = num.iter().map(|c| c * &scale).collect();
                coeffs.resize(f, self.right.zero());
                TensorElement { coeffs }
            })
            .collect()
    }
}

/// The f roots in K of the canonical degree-f modulus, in Frobenius-cyclic
/// order starting from the lexicographically smallest one.
fn embedding_roots(left: &FiniteField, kappa: &FiniteField) -> Vec<FieldElement> {
    let f = left.n();
    let first = smallest_root(left, kappa);
    let mut roots = vec![first];
    for i in 1..f {
        let next = roots[i - 1].frobenius(1);
        roots.push(next);
    }
    // The roots of an irreducible polynomial form one Frobenius orbit, so the
    // chain closes up after exactly f steps.
    debug_assert_eq!(roots[f - 1].frobenius(1), roots[0]);
    let mut sorted = roots.clone();
    sorted.sort();
    debug_assert!(sorted.windows(2).all(|w| w[0] != w[1]), "roots not distinct");
    roots
}

/// Finds the lexicographically smallest root in K of the modulus of
/// GF(p^f). Roots lie in the subfield fixed by φ^f, which we enumerate as
/// the kernel of the GF(p)-linear map x ↦ x^(p^f) − x.
fn smallest_root(left: &FiniteField, kappa: &FiniteField) -> FieldElement {
    let f = left.n();
    let n = kappa.n();
    let prime = FiniteField::new(kappa.p(), 1).expect("p already validated");

    // Matrix of φ^f − id on K as a GF(p)-vector space, columns indexed by
    // the power basis x^i.
    let mut basis_images = Vec::with_capacity(n);
    for i in 0..n {
        let mut coeffs = vec![0u64; n];
        coeffs[i] = 1;
        let b = kappa.element(coeffs).expect("length checked");
        basis_images.push(b.frobenius(f as i64));
    }
    let m = Matrix::from_fn(&prime, n, n, |r, c| {
        let diag = if r == c { 1 } else { 0 };
        prime.from_int(basis_images[c].coeffs()[r] as i64 - diag)
    });
    let kernel = m.kernel_basis();
    debug_assert_eq!(kernel.basis.len(), f, "fixed field of φ^f has degree f");

    // Scan the p^f subfield elements until a root of the modulus turns up;
    // the remaining roots are its Frobenius orbit, so the smallest root is
    // the minimum over that orbit. The subfield has at most 5^6 elements at
    // the sizes this crate targets.
    let p = kappa.p() as u128;
    let count = p.pow(f as u32);
    let modulus: Vec<FieldElement> = left
        .modulus()
        .iter()
        .map(|&c| kappa.from_int(c as i64))
        .collect();
    for idx in 0..count {
        // Combine kernel basis vectors with base-p digit weights; entries of
        // the kernel vectors are GF(p) scalars.
        let mut coeffs = vec![0u64; n];
        let mut v = idx;
        for b in &kernel.basis {
            let digit = (v % p) as u64;
            v /= p;
            if digit != 0 {
                for (i, e) in b.iter().enumerate() {
                    coeffs[i] = (coeffs[i] + digit * e.coeffs()[0]) % kappa.p();
                }
            }
        }
        let x = kappa.element(coeffs).expect("length checked");
        // Horner evaluation of the modulus at x.
        let mut acc = kappa.zero();
        for c in modulus.iter().rev() {
            acc = &(&acc * &x) + c;
        }
        if acc.is_zero() {
            let mut best = x.clone();
            let mut y = x.frobenius(1);
            for _ in 1..f {
                if y < best {
                    best = y.clone();
                }
                y = y.frobenius(1);
            }
            return best;
        }
    }
    panic!("an irreducible of degree f | n splits in GF(p^n)")
}
