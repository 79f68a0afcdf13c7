//! Weight and foliation combinatorics for Hilbert modular varieties mod p:
//! Frobenius orbits of embeddings, the partial Hasse weight ledger, the three
//! weight cones, the nonnegative-witness feasibility search, Goren-Oort
//! stratum bookkeeping, and a small exact calculus of truncated q-expansions
//! with its two derivations.

use std::collections::BTreeMap;
use std::ops::Range;

use num_rational::Ratio;
use thiserror::Error;

use crate::gfpn::{is_prime, FieldError, FieldElement, FiniteField, TensorAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HilbertError {
    #[error("{p} is not prime")]
    NotPrime { p: u64 },
    #[error("prime {p} exceeds the supported bound 2^20")]
    PrimeTooLarge { p: u64 },
    #[error("at least one orbit is required")]
    EmptyOrbits,
    #[error("orbit {orbit} has size 0")]
    ZeroOrbitSize { orbit: usize },
    #[error("embedding index {sigma} out of range for degree {g}")]
    EmbeddingOutOfRange { sigma: usize, g: usize },
    #[error("pairing column {gamma} out of range, expansions carry {count}")]
    PairingOutOfRange { gamma: usize, count: usize },
    #[error("weight has {got} entries, datum has degree {expected}")]
    WeightLength { expected: usize, got: usize },
    #[error("witness has {got} entries, datum has degree {expected}")]
    WitnessLength { expected: usize, got: usize },
    #[error("sigma contains {sigma}, degree is {g}")]
    SigmaOutOfRange { sigma: usize, g: usize },
    #[error("sigma is not Frobenius invariant: contains {sigma} but not its image")]
    NotPhiInvariant { sigma: usize },
    #[error("exponent label shape mismatch: expected {expected_emb} embeddings and {expected_pairings} pairings, got {got_emb} and {got_pairings}")]
    ShapeMismatch {
        expected_emb: usize,
        expected_pairings: usize,
        got_emb: usize,
        got_pairings: usize,
    },
    #[error("coefficient lies in a different field than the expansion")]
    CoefficientFieldMismatch,
    #[error("{got} orbit seeds supplied, datum has {expected} orbits")]
    SeedCount { expected: usize, got: usize },
    #[error("seed for orbit {orbit} is not fixed by the {size}-fold Frobenius")]
    SeedNotInSubfield { orbit: usize, size: usize },
    #[error("intermediate value exceeds 128-bit range")]
    Overflow,
    #[error("feasibility search exceeded the node budget {cap}")]
    SearchCapExceeded { cap: u64 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Degree-g setup: a prime p and the partition of the g embedding indices
/// into Frobenius cycles. Orbit j occupies the consecutive index block
/// starts[j]..starts[j]+sizes[j], and Frobenius steps cyclically inside it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplittingDatum {
    p: u64,
    orbit_sizes: Vec<usize>,
    starts: Vec<usize>,
    g: usize,
}

impl SplittingDatum {
    pub fn new(p: u64, orbit_sizes: Vec<usize>) -> Result<SplittingDatum, HilbertError> {
        if p > 1 << 20 {
            return Err(HilbertError::PrimeTooLarge { p });
        }
        if !is_prime(p) {
            return Err(HilbertError::NotPrime { p });
        }
        if orbit_sizes.is_empty() {
            return Err(HilbertError::EmptyOrbits);
        }
        if let Some(orbit) = orbit_sizes.iter().position(|&f| f == 0) {
            return Err(HilbertError::ZeroOrbitSize { orbit });
        }
        let mut starts = Vec::with_capacity(orbit_sizes.len());
        let mut g = 0;
        for &f in &orbit_sizes {
            starts.push(g);
            g += f;
        }
        Ok(SplittingDatum {
            p,
            orbit_sizes,
            starts,
            g,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Total degree Σ f_j.
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn orbit_sizes(&self) -> &[usize] {
        &self.orbit_sizes
    }

    pub fn orbit_count(&self) -> usize {
        self.orbit_sizes.len()
    }

    pub fn orbit_range(&self, j: usize) -> Range<usize> {
        self.starts[j]..self.starts[j] + self.orbit_sizes[j]
    }

    /// Orbit containing the embedding index sigma.
    pub fn orbit_of(&self, sigma: usize) -> usize {
        assert!(sigma < self.g, "embedding index out of range");
        (0..self.orbit_sizes.len())
            .rfind(|&j| self.starts[j] <= sigma)
            .expect("starts begin at 0")
    }

    /// Frobenius successor of sigma within its cycle.
    pub fn phi(&self, sigma: usize) -> usize {
        let j = self.orbit_of(sigma);
        let start = self.starts[j];
        start + (sigma - start + 1) % self.orbit_sizes[j]
    }

    /// Frobenius predecessor of sigma within its cycle.
    pub fn phi_inv(&self, sigma: usize) -> usize {
        let j = self.orbit_of(sigma);
        let start = self.starts[j];
        let f = self.orbit_sizes[j];
        start + (sigma - start + f - 1) % f
    }

    /// Checks range and returns sigma as a sorted deduplicated set.
    pub fn validate_sigma(&self, sigma: &[usize]) -> Result<Vec<usize>, HilbertError> {
        for &s in sigma {
            if s >= self.g {
                return Err(HilbertError::SigmaOutOfRange { sigma: s, g: self.g });
            }
        }
        let mut set = sigma.to_vec();
        set.sort_unstable();
        set.dedup();
        Ok(set)
    }
}

/// An integer weight vector indexed by the embedding set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Weight {
    pub k: Vec<i64>,
}

impl Weight {
    pub fn zero(g: usize) -> Weight {
        Weight { k: vec![0; g] }
    }

    pub fn is_zero(&self) -> bool {
        self.k.iter().all(|&v| v == 0)
    }

    fn check_len(&self, datum: &SplittingDatum) -> Result<(), HilbertError> {
        if self.k.len() != datum.g() {
            return Err(HilbertError::WeightLength {
                expected: datum.g(),
                got: self.k.len(),
            });
        }
        Ok(())
    }
}

/// Weight of the partial Hasse invariant at sigma: p[φ^{-1}σ] − [σ].
pub fn hasse_weight(datum: &SplittingDatum, sigma: usize) -> Weight {
    let mut w = Weight::zero(datum.g());
    w.k[datum.phi_inv(sigma)] += datum.p() as i64;
    w.k[sigma] -= 1;
    w
}

/// Weight of the obstruction bundle for the (σ, τ) tangent direction:
/// 2p[σ] − 2[τ].
pub fn obstruction_weight(datum: &SplittingDatum, sigma: usize, tau: usize) -> Weight {
    let mut w = Weight::zero(datum.g());
    w.k[sigma] += 2 * datum.p() as i64;
    w.k[tau] -= 2;
    w
}

/// The per-sigma Hasse weight ledger. The obstruction weight in the
/// Frobenius direction is twice the Hasse weight at the image, which is
/// asserted here for every sigma.
pub fn hasse_weights(datum: &SplittingDatum) -> Vec<Weight> {
    let ledger: Vec<Weight> = (0..datum.g()).map(|s| hasse_weight(datum, s)).collect();
    for sigma in 0..datum.g() {
        let phi_sigma = datum.phi(sigma);
        let doubled: Vec<i64> = ledger[phi_sigma].k.iter().map(|v| 2 * v).collect();
        debug_assert_eq!(obstruction_weight(datum, sigma, phi_sigma).k, doubled);
    }
    ledger
}

/// The tautological subbundle spanned by Σ directions is closed under p-th
/// powers exactly when Σ is Frobenius invariant.
pub fn is_p_closed(datum: &SplittingDatum, sigma: &[usize]) -> bool {
    let set = datum
        .validate_sigma(sigma)
        .expect("sigma validated by caller");
    set.iter().all(|&s| set.binary_search(&datum.phi(s)).is_ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cone {
    /// p·k_σ ≥ k_{φ^{-1}σ} for every σ.
    Minimal,
    /// k_σ ≥ 0 for every σ.
    Standard,
    /// The exact rational coordinates of k in the Hasse weight basis are
    /// all ≥ 0.
    Hasse,
}

/// Coordinates of a weight in the basis of partial Hasse weights, solved
/// exactly: a_σ = Σ_{i<f} p^i·k_{φ^iσ} / (p^f − 1) per orbit.
pub fn hasse_cone_coefficients(
    datum: &SplittingDatum,
    k: &Weight,
) -> Result<Vec<Ratio<i128>>, HilbertError> {
    k.check_len(datum)?;
    let p = datum.p() as i128;
    let mut out = Vec::with_capacity(datum.g());
    for sigma in 0..datum.g() {
        let f = datum.orbit_sizes()[datum.orbit_of(sigma)];
        let mut numerator: i128 = 0;
        let mut power: i128 = 1;
        let mut walk = sigma;
        for step in 0..f {
            let term = power
                .checked_mul(k.k[walk] as i128)
                .ok_or(HilbertError::Overflow)?;
            numerator = numerator.checked_add(term).ok_or(HilbertError::Overflow)?;
            walk = datum.phi(walk);
            if step + 1 < f {
                power = power.checked_mul(p).ok_or(HilbertError::Overflow)?;
            }
        }
        let denominator = power.checked_mul(p).ok_or(HilbertError::Overflow)? - 1;
        out.push(Ratio::new(numerator, denominator));
    }
    Ok(out)
}

pub fn cone_membership(
    datum: &SplittingDatum,
    k: &Weight,
    cone: Cone,
) -> Result<bool, HilbertError> {
    k.check_len(datum)?;
    match cone {
        Cone::Standard => Ok(k.k.iter().all(|&v| v >= 0)),
        Cone::Minimal => Ok((0..datum.g())
            .all(|s| datum.p() as i128 * k.k[s] as i128 >= k.k[datum.phi_inv(s)] as i128)),
        Cone::Hasse => {
            let coeffs = hasse_cone_coefficients(datum, k)?;
            Ok(coeffs.iter().all(|a| *a >= Ratio::from_integer(0)))
        }
    }
}

/// Depth-first search for the lexicographically first nonnegative integer
/// vector a on one orbit with every residue k_t − p·a_t + a_{t−1} ≥ 0.
/// Branches are cut by the orbit-sum bound (p−1)Σa ≤ Σk and by the local
/// residue bound once the predecessor is fixed.
fn orbit_witness(
    p: i128,
    k: &[i128],
    a: &mut Vec<i128>,
    t: usize,
    budget: i128,
    nodes: &mut u64,
    cap: u64,
) -> Result<bool, HilbertError> {
    if *nodes >= cap {
        return Err(HilbertError::SearchCapExceeded { cap });
    }
    *nodes += 1;
    let f = k.len();
    if t == f {
        // wraparound residue at index 0
        return Ok(k[0] - p * a[0] + a[f - 1] >= 0);
    }
    let spent: i128 = a[..t].iter().sum();
    let mut hi = budget - spent;
    if t > 0 {
        let local = k[t] + a[t - 1];
        if local < 0 {
            return Ok(false);
        }
        hi = hi.min(local / p);
    }
    for v in 0..=hi {
        a[t] = v;
        if orbit_witness(p, k, a, t + 1, budget, nodes, cap)? {
            return Ok(true);
        }
    }
    a[t] = 0;
    Ok(false)
}

/// Searches nonnegative integers a with k − Σ_β a_β(p[β] − [φβ]) ∈ C^std,
/// independently per orbit, returning the lexicographically first witness.
/// `node_cap` bounds the total number of search nodes.
pub fn weight_feasibility_capped(
    datum: &SplittingDatum,
    k: &Weight,
    node_cap: u64,
) -> Result<Option<Vec<u64>>, HilbertError> {
    k.check_len(datum)?;
    let p = datum.p() as i128;
    let mut witness = Vec::with_capacity(datum.g());
    let mut nodes = 0u64;
    for j in 0..datum.orbit_count() {
        let range = datum.orbit_range(j);
        let slice: Vec<i128> = k.k[range].iter().map(|&v| v as i128).collect();
        let total: i128 = slice.iter().sum();
        if total < 0 {
            return Ok(None);
        }
        let budget = total / (p - 1);
        let mut a = vec![0i128; slice.len()];
        if !orbit_witness(p, &slice, &mut a, 0, budget, &mut nodes, node_cap)? {
            return Ok(None);
        }
        for v in a {
            witness.push(u64::try_from(v).map_err(|_| HilbertError::Overflow)?);
        }
    }
    Ok(Some(witness))
}

pub fn weight_feasibility(
    datum: &SplittingDatum,
    k: &Weight,
) -> Result<Option<Vec<u64>>, HilbertError> {
    weight_feasibility_capped(datum, k, u64::MAX)
}

/// The leftover weight k − Σ_β a_β(p[β] − [φβ]) of a witness candidate.
pub fn feasibility_residue(
    datum: &SplittingDatum,
    k: &Weight,
    witness: &[u64],
) -> Result<Weight, HilbertError> {
    k.check_len(datum)?;
    if witness.len() != datum.g() {
        return Err(HilbertError::WitnessLength {
            expected: datum.g(),
            got: witness.len(),
        });
    }
    let p = datum.p() as i128;
    let mut out = Weight::zero(datum.g());
    for sigma in 0..datum.g() {
        let r = k.k[sigma] as i128 - p * witness[sigma] as i128
            + witness[datum.phi_inv(sigma)] as i128;
        out.k[sigma] = i64::try_from(r).map_err(|_| HilbertError::Overflow)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GOReport {
    /// dim of the stratum cut out by the Σ vanishing conditions: g − |Σ|.
    pub dim: usize,
    /// Rank of the complementary foliation, counted independently as the
    /// number of directions outside Σ.
    pub rank: usize,
    /// Whether the two counts agree.
    pub equal: bool,
    /// The inseparable quotient along the foliation has degree p^rank.
    pub quotient_degree_exp: usize,
    /// Per prime 𝔭, the degree exponent g − f_𝔭 of the partial Frobenius.
    pub theta_degree_exps: Vec<usize>,
}

/// Dimension and degree ledger of the stratum attached to a Frobenius
/// invariant Σ.
pub fn go_stratum_report(
    datum: &SplittingDatum,
    sigma: &[usize],
) -> Result<GOReport, HilbertError> {
    let set = datum.validate_sigma(sigma)?;
    for &s in &set {
        if set.binary_search(&datum.phi(s)).is_err() {
            return Err(HilbertError::NotPhiInvariant { sigma: s });
        }
    }
    let g = datum.g();
    let dim = g - set.len();
    let rank = (0..g).filter(|s| set.binary_search(s).is_err()).count();
    Ok(GOReport {
        dim,
        rank,
        equal: dim == rank,
        quotient_degree_exp: rank,
        theta_degree_exps: datum.orbit_sizes().iter().map(|&f| g - f).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdempotentReport {
    pub orbit_pass: Vec<bool>,
    pub pass: bool,
}

/// For each orbit, computes the splitting idempotents of GF(p^f) ⊗ κ and
/// verifies that the coefficientwise p-power map permutes them one step
/// along the cycle. Requires every orbit size to divide the degree of κ.
pub fn idempotent_frobenius_check(
    datum: &SplittingDatum,
    kappa: &FiniteField,
) -> Result<IdempotentReport, HilbertError> {
    let mut orbit_pass = Vec::with_capacity(datum.orbit_count());
    for &f in datum.orbit_sizes() {
        let algebra = TensorAlgebra::new(f, kappa)?;
        let es = algebra.idempotents();
        let ok = (0..f).all(|i| algebra.coeff_frobenius(&es[i]) == es[(i + 1) % f]);
        orbit_pass.push(ok);
    }
    let pass = orbit_pass.iter().all(|&b| b);
    Ok(IdempotentReport { orbit_pass, pass })
}

/// Exponent label of a q-expansion term: the images of the exponent under
/// every embedding, and its integer pairings against a fixed list of dual
/// elements. Labels add componentwise when terms multiply.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExponentKey {
    pub emb: Vec<FieldElement>,
    pub pairings: Vec<i64>,
}

impl ExponentKey {
    fn combine(&self, other: &ExponentKey) -> ExponentKey {
        ExponentKey {
            emb: self
                .emb
                .iter()
                .zip(&other.emb)
                .map(|(a, b)| a + b)
                .collect(),
            pairings: self
                .pairings
                .iter()
                .zip(&other.pairings)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Builds an exponent label from one subfield seed per orbit: the embedding
/// value at cycle position x of orbit j is seed_j^(p^x), which makes the
/// Frobenius permutation of embeddings literally the p-power map on values.
/// Each seed must be fixed by the f_j-fold Frobenius.
pub fn orbit_seed_key(
    datum: &SplittingDatum,
    seeds: &[FieldElement],
    pairings: Vec<i64>,
) -> Result<ExponentKey, HilbertError> {
    if seeds.len() != datum.orbit_count() {
        return Err(HilbertError::SeedCount {
            expected: datum.orbit_count(),
            got: seeds.len(),
        });
    }
    for window in seeds.windows(2) {
        if window[0].field() != window[1].field() {
            return Err(HilbertError::CoefficientFieldMismatch);
        }
    }
    let mut emb = Vec::with_capacity(datum.g());
    for (j, seed) in seeds.iter().enumerate() {
        let f = datum.orbit_sizes()[j];
        if &seed.frobenius(f as i64) != seed {
            return Err(HilbertError::SeedNotInSubfield { orbit: j, size: f });
        }
        for x in 0..f {
            emb.push(seed.frobenius(x as i64));
        }
    }
    Ok(ExponentKey { emb, pairings })
}

/// A finite formal sum Σ c_α·q^α with coefficients in a fixed finite field.
/// Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QExp {
    field: FiniteField,
    g: usize,
    pairing_count: usize,
    terms: BTreeMap<ExponentKey, FieldElement>,
}

impl QExp {
    pub fn zero(field: &FiniteField, g: usize, pairing_count: usize) -> QExp {
        QExp {
            field: field.clone(),
            g,
            pairing_count,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        field: &FiniteField,
        g: usize,
        pairing_count: usize,
        terms: impl IntoIterator<Item = (ExponentKey, FieldElement)>,
    ) -> Result<QExp, HilbertError> {
        let mut out = QExp::zero(field, g, pairing_count);
        for (key, coeff) in terms {
            out.accumulate(key, coeff)?;
        }
        Ok(out)
    }

    fn accumulate(&mut self, key: ExponentKey, coeff: FieldElement) -> Result<(), HilbertError> {
        if key.emb.len() != self.g || key.pairings.len() != self.pairing_count {
            return Err(HilbertError::ShapeMismatch {
                expected_emb: self.g,
                expected_pairings: self.pairing_count,
                got_emb: key.emb.len(),
                got_pairings: key.pairings.len(),
            });
        }
        if coeff.field() != &self.field || key.emb.iter().any(|e| e.field() != &self.field) {
            return Err(HilbertError::CoefficientFieldMismatch);
        }
        let merged = match self.terms.get(&key) {
            Some(old) => old + &coeff,
            None => coeff,
        };
        if merged.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, merged);
        }
        Ok(())
    }

    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn pairing_count(&self) -> usize {
        self.pairing_count
    }

    pub fn terms(&self) -> &BTreeMap<ExponentKey, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check_shape(&self, other: &QExp) -> Result<(), HilbertError> {
        if self.field != other.field {
            return Err(HilbertError::CoefficientFieldMismatch);
        }
        if self.g != other.g || self.pairing_count != other.pairing_count {
            return Err(HilbertError::ShapeMismatch {
                expected_emb: self.g,
                expected_pairings: self.pairing_count,
                got_emb: other.g,
                got_pairings: other.pairing_count,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &QExp) -> Result<QExp, HilbertError> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (key, coeff) in &other.terms {
            out.accumulate(key.clone(), coeff.clone())?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &QExp) -> Result<QExp, HilbertError> {
        self.check_shape(other)?;
        let mut out = QExp::zero(&self.field, self.g, self.pairing_count);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.accumulate(ka.combine(kb), ca * cb)?;
            }
        }
        Ok(out)
    }
}

/// The σ-th tautological derivation: multiplies the coefficient of q^α by
/// the embedding value σ(α).
pub fn xi_derivation(expansion: &QExp, sigma: usize) -> Result<QExp, HilbertError> {
    if sigma >= expansion.g() {
        return Err(HilbertError::EmbeddingOutOfRange {
            sigma,
            g: expansion.g(),
        });
    }
    let terms: Vec<_> = expansion
        .terms
        .iter()
        .map(|(key, coeff)| (key.clone(), coeff * &key.emb[sigma]))
        .collect();
    QExp::from_terms(&expansion.field, expansion.g, expansion.pairing_count, terms)
}

/// The derivation attached to a dual element: multiplies the coefficient of
/// q^α by the integer pairing of α against it, reduced into the field.
pub fn katz_derivation(expansion: &QExp, gamma: usize) -> Result<QExp, HilbertError> {
    if gamma >= expansion.pairing_count() {
        return Err(HilbertError::PairingOutOfRange {
            gamma,
            count: expansion.pairing_count(),
        });
    }
    let terms: Vec<_> = expansion
        .terms
        .iter()
        .map(|(key, coeff)| {
            let factor = expansion.field.from_int(key.pairings[gamma]);
            (key.clone(), coeff * &factor)
        })
        .collect();
    QExp::from_terms(&expansion.field, expansion.g, expansion.pairing_count, terms)
}

#[cfg(test)]
mod tests;
