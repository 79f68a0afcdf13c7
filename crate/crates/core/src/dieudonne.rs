//! Graded mod-p modules with semilinear F and V operators.
//!
//! A module lives over one Frobenius orbit of indices: each index carries a
//! copy of K^d, F maps component i to i+1 twisted by the p-power map, V maps
//! component i+1 to i twisted by the inverse. The two constructions here (the
//! standard module of a signature, and the shuffle modules refining it) have
//! 0/1 structure constants, so every dimension they determine is independent
//! of the coefficient field; the field parameter exists for twist bookkeeping
//! and cross-checks.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::eo::Shuffle;
use crate::gfpn::{FiniteField, Matrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DieudonneError {
    #[error("orbit size must be at least 1")]
    ZeroOrbitSize,
    #[error("inert orbits need even size, got {size}")]
    OddInertSize { size: usize },
    #[error("signature has {got} entries, orbit has {expected}")]
    SignatureLength { expected: usize, got: usize },
    #[error("signature value {value} at index {index} is outside 0..={d}")]
    SignatureRange { index: usize, value: usize, d: usize },
    #[error("slot {slot} has rank {got}, datum has rank {expected}")]
    RankMismatch { slot: usize, expected: usize, got: usize },
    #[error("inert signature violates f(i)+f(i+m)=d at slot {slot}, index {index}: sum {sum} != {d}")]
    InertSignatureSum {
        slot: usize,
        index: usize,
        sum: usize,
        d: usize,
    },
    #[error("operation requires an inert orbit")]
    NotInert,
    #[error("{got} shuffles supplied for an orbit of size {expected}")]
    ShuffleCount { expected: usize, got: usize },
    #[error("shuffle at index {index} has blocks ({e}, {rest}), expected ({expected_e}, {expected_rest})")]
    ShuffleBlocks {
        index: usize,
        e: usize,
        rest: usize,
        expected_e: usize,
        expected_rest: usize,
    },
    #[error("pair index {got} out of range, datum has {count} pairs")]
    SigmaOutOfRange { got: usize, count: usize },
    #[error("sigma must be strictly increasing")]
    SigmaNotStrictlyIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbitKind {
    /// Self-dual orbit; the mirror of index i is i + size/2.
    Inert,
    /// Orbit paired with a distinct mirror orbit carrying signature d−f; the
    /// mirror is derived on demand and never stored.
    Split,
}

/// One Frobenius orbit of indices 0..size−1, with i ↦ i+1 (mod size) the
/// Frobenius successor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrbitDatum {
    size: usize,
    kind: OrbitKind,
}

impl OrbitDatum {
    pub fn new(size: usize, kind: OrbitKind) -> Result<OrbitDatum, DieudonneError> {
        if size == 0 {
            return Err(DieudonneError::ZeroOrbitSize);
        }
        if kind == OrbitKind::Inert && !size.is_multiple_of(2) {
            return Err(DieudonneError::OddInertSize { size });
        }
        Ok(OrbitDatum { size, kind })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn kind(&self) -> OrbitKind {
        self.kind
    }

    /// Half the size for inert orbits: the shift taking an index to its
    /// mirror.
    pub fn half_shift(&self) -> Option<usize> {
        match self.kind {
            OrbitKind::Inert => Some(self.size / 2),
            OrbitKind::Split => None,
        }
    }

    /// Index arithmetic mod size; accepts negative offsets.
    pub fn wrap(&self, i: isize) -> usize {
        i.rem_euclid(self.size as isize) as usize
    }
}

/// A signature: rank d and a value f(i) in 0..=d per orbit index. Range is
/// validated here; compatibility with a particular orbit (length, inert
/// duality) is checked where the orbit is known.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignatureFn {
    d: usize,
    f: Vec<usize>,
}

impl SignatureFn {
    pub fn new(d: usize, f: Vec<usize>) -> Result<SignatureFn, DieudonneError> {
        if f.is_empty() {
            return Err(DieudonneError::SignatureLength { expected: 1, got: 0 });
        }
        for (index, &value) in f.iter().enumerate() {
            if value > d {
                return Err(DieudonneError::SignatureRange { index, value, d });
            }
        }
        Ok(SignatureFn { d, f })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[usize] {
        &self.f
    }

    /// f(i) with index arithmetic mod the signature length.
    pub fn at(&self, i: isize) -> usize {
        self.f[i.rem_euclid(self.f.len() as isize) as usize]
    }

    /// The mirror signature i ↦ d − f(i).
    pub fn mirror(&self) -> SignatureFn {
        SignatureFn {
            d: self.d,
            f: self.f.iter().map(|&v| self.d - v).collect(),
        }
    }

    fn check_orbit(&self, orbit: &OrbitDatum) -> Result<(), DieudonneError> {
        if self.f.len() != orbit.size() {
            return Err(DieudonneError::SignatureLength {
                expected: orbit.size(),
                got: self.f.len(),
            });
        }
        Ok(())
    }
}

/// One orbit together with its signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitSlot {
    pub orbit: OrbitDatum,
    pub sig: SignatureFn,
}

/// An orbit pair, reduced to its normalized representative: the member whose
/// predecessor signature r_prev does not exceed its own signature r, ties
/// resolved toward the stored side and the smaller index. All stratum
/// formulas are evaluated at the representative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair {
    pub slot: usize,
    /// Pair index within the slot: 0..size/2 for inert, 0..size for split.
    pub index: usize,
    /// Whether the representative lies on the stored orbit (always true for
    /// inert slots; for split slots false means the derived mirror orbit).
    pub stored_side: bool,
    /// Index of the representative within its orbit.
    pub rep_index: usize,
    /// Signature at the representative.
    pub r: usize,
    /// Signature at the Frobenius predecessor of the representative; ≤ r.
    pub r_prev: usize,
}

/// Rank d plus a list of orbit slots, with the pairing structure reduced to
/// normalized pair representatives. Inert slots must satisfy the duality
/// constraint f(i) + f(i+m) = d; split mirrors are implicit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMTypeDatum {
    d: usize,
    slots: Vec<OrbitSlot>,
    pairs: Vec<Pair>,
}

impl CMTypeDatum {
    pub fn new(d: usize, slots: Vec<OrbitSlot>) -> Result<CMTypeDatum, DieudonneError> {
        for (slot_idx, slot) in slots.iter().enumerate() {
            slot.sig.check_orbit(&slot.orbit)?;
            if slot.sig.d() != d {
                return Err(DieudonneError::RankMismatch {
                    slot: slot_idx,
                    expected: d,
                    got: slot.sig.d(),
                });
            }
            if let Some(m) = slot.orbit.half_shift() {
                for i in 0..m {
                    let sum = slot.sig.at(i as isize) + slot.sig.at((i + m) as isize);
                    if sum != d {
                        return Err(DieudonneError::InertSignatureSum {
                            slot: slot_idx,
                            index: i,
                            sum,
                            d,
                        });
                    }
                }
            }
        }
        let mut pairs = Vec::new();
        for (slot_idx, slot) in slots.iter().enumerate() {
            let sig = &slot.sig;
            match slot.orbit.kind() {
                OrbitKind::Inert => {
                    let m = slot.orbit.half_shift().unwrap();
                    for i in 0..m {
                        let (f, fp) = (sig.at(i as isize), sig.at(i as isize - 1));
                        let rep_index = if fp <= f { i } else { i + m };
                        let (r, r_prev) = if fp <= f { (f, fp) } else { (d - f, d - fp) };
                        pairs.push(Pair {
                            slot: slot_idx,
                            index: i,
                            stored_side: true,
                            rep_index,
                            r,
                            r_prev,
                        });
                    }
                }
                OrbitKind::Split => {
                    for i in 0..slot.orbit.size() {
                        let (f, fp) = (sig.at(i as isize), sig.at(i as isize - 1));
                        let stored_side = fp <= f;
                        let (r, r_prev) = if stored_side { (f, fp) } else { (d - f, d - fp) };
                        pairs.push(Pair {
                            slot: slot_idx,
                            index: i,
                            stored_side,
                            rep_index: i,
                            r,
                            r_prev,
                        });
                    }
                }
            }
        }
        debug_assert!(pairs.iter().all(|p| p.r_prev <= p.r));
        Ok(CMTypeDatum { d, slots, pairs })
    }

    /// Single-orbit convenience constructor.
    pub fn single(orbit: OrbitDatum, sig: SignatureFn) -> Result<CMTypeDatum, DieudonneError> {
        let d = sig.d();
        CMTypeDatum::new(d, vec![OrbitSlot { orbit, sig }])
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn slots(&self) -> &[OrbitSlot] {
        &self.slots
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    /// Validates a set of pair indices (strictly increasing, in range).
    pub fn validate_sigma(&self, sigma: &[usize]) -> Result<(), DieudonneError> {
        for w in sigma.windows(2) {
            if w[0] >= w[1] {
                return Err(DieudonneError::SigmaNotStrictlyIncreasing);
            }
        }
        for &k in sigma {
            if k >= self.pairs.len() {
                return Err(DieudonneError::SigmaOutOfRange {
                    got: k,
                    count: self.pairs.len(),
                });
            }
        }
        Ok(())
    }

    /// Every pair index: the full set 𝓘⁺.
    pub fn all_pairs(&self) -> Vec<usize> {
        (0..self.pairs.len()).collect()
    }
}

/// A graded module: component i is K^d with the standard basis e_{i,1..d};
/// F_mats[i] sends component i to i+1 (p-power twisted), V_mats[s] sends
/// component s to s−1 (inverse twisted).
pub struct ModPDieudonneModule {
    field: FiniteField,
    orbit: OrbitDatum,
    sig: SignatureFn,
    f_mats: Vec<Matrix>,
    v_mats: Vec<Matrix>,
}

impl fmt::Debug for ModPDieudonneModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "ModPDieudonneModule(d={}, size={}, {:?})",
            self.sig.d(),
            self.orbit.size(),
            self.orbit.kind()
        )
    }
}

/// The standard module of a signature: F(e_{i,j}) = e_{i+1,j} for
/// j ≤ d−f(i) and 0 otherwise; V(e_{i+1,j}) = e_{i,j} for j > d−f(i) and 0
/// otherwise. Its F-kernel at index i has dimension f(i).
pub fn build_standard(
    field: &FiniteField,
    orbit: &OrbitDatum,
    sig: &SignatureFn,
) -> Result<ModPDieudonneModule, DieudonneError> {
    sig.check_orbit(orbit)?;
    let d = sig.d();
    let size = orbit.size();
    let mut f_mats = Vec::with_capacity(size);
    let mut v_mats = Vec::with_capacity(size);
    for s in 0..size {
        let fi = sig.at(s as isize);
        f_mats.push(Matrix::from_fn(field, d, d, |r, c| {
            field.from_int(i64::from(r == c && c < d - fi))
        }));
        // V on component s uses the signature at s−1
        let fprev = sig.at(s as isize - 1);
        v_mats.push(Matrix::from_fn(field, d, d, |r, c| {
            field.from_int(i64::from(r == c && c >= d - fprev))
        }));
    }
    let module = ModPDieudonneModule {
        field: field.clone(),
        orbit: *orbit,
        sig: sig.clone(),
        f_mats,
        v_mats,
    };
    debug_assert!(module.composites_vanish());
    Ok(module)
}

/// The module attached to per-index shuffles w_i ∈ Π_{f(i), d−f(i)}:
/// F(e_{i,j}) = e_{i+1, w_i(j)−f(i)} when w_i(j) > f(i) and 0 otherwise;
/// V(e_{i+1, d−f(i)+s}) = e_{i, w_i^{-1}(s)} for s ≤ f(i), other components 0.
pub fn build_from_shuffle(
    field: &FiniteField,
    orbit: &OrbitDatum,
    sig: &SignatureFn,
    ws: &[Shuffle],
) -> Result<ModPDieudonneModule, DieudonneError> {
    sig.check_orbit(orbit)?;
    let d = sig.d();
    let size = orbit.size();
    if ws.len() != size {
        return Err(DieudonneError::ShuffleCount {
            expected: size,
            got: ws.len(),
        });
    }
    for (index, w) in ws.iter().enumerate() {
        let fi = sig.at(index as isize);
        if w.d() != d || w.e() != fi {
            return Err(DieudonneError::ShuffleBlocks {
                index,
                e: w.e(),
                rest: w.d().saturating_sub(w.e()),
                expected_e: fi,
                expected_rest: d - fi,
            });
        }
    }
    let mut f_mats = Vec::with_capacity(size);
    let mut v_mats = Vec::with_capacity(size);
    for s in 0..size {
        let fi = sig.at(s as isize);
        let w = &ws[s];
        let mut fm = Matrix::zeros(field, d, d);
        for j in 1..=d {
            let v = w.apply(j);
            if v > fi {
                fm[(v - fi - 1, j - 1)] = field.one();
            }
        }
        f_mats.push(fm);

        let fprev = sig.at(s as isize - 1);
        let wprev = &ws[orbit.wrap(s as isize - 1)];
        let mut vm = Matrix::zeros(field, d, d);
        for t in 1..=fprev {
            vm[(wprev.apply_inverse(t) - 1, d - fprev + t - 1)] = field.one();
        }
        v_mats.push(vm);
    }
    let module = ModPDieudonneModule {
        field: field.clone(),
        orbit: *orbit,
        sig: sig.clone(),
        f_mats,
        v_mats,
    };
    debug_assert!(module.composites_vanish());
    Ok(module)
}

impl ModPDieudonneModule {
    pub fn field(&self) -> &FiniteField {
        &self.field
    }

    pub fn orbit(&self) -> &OrbitDatum {
        &self.orbit
    }

    pub fn sig(&self) -> &SignatureFn {
        &self.sig
    }

    /// Matrix of F from component i to i+1.
    pub fn f_matrix(&self, i: usize) -> &Matrix {
        &self.f_mats[i]
    }

    /// Matrix of V from component s to s−1.
    pub fn v_matrix(&self, s: usize) -> &Matrix {
        &self.v_mats[s]
    }

    /// Both composites F∘V and V∘F vanish on every component; this is the
    /// matrix identity with the Frobenius twists spelled out.
    pub fn composites_vanish(&self) -> bool {
        let size = self.orbit.size();
        (0..size).all(|s| {
            let prev = self.orbit.wrap(s as isize - 1);
            let next = self.orbit.wrap(s as isize + 1);
            // F(V(x)) on component s: F_{s-1}·φ(V_s)
            let fv = self.f_mats[prev].mul(&self.v_mats[s].frobenius_entrywise(1));
            // V(F(x)) on component s: V_{s+1}·φ^{-1}(F_s)
            let vf = self.v_mats[next].mul(&self.f_mats[s].frobenius_entrywise(-1));
            fv.is_zero() && vf.is_zero()
        })
    }

    /// Basis of ker(F) in component i, as matrix columns. The kernel of the
    /// twisted map x ↦ F·φ(x) is the entrywise φ^{-1} of the kernel of the
    /// plain matrix; its dimension is f(i) on both constructions.
    pub fn cotangent_component(&self, i: usize) -> Matrix {
        let d = self.sig.d();
        let kernel = self.f_mats[i].kernel_basis();
        let cols: Vec<Vec<_>> = kernel
            .basis
            .iter()
            .map(|v| v.iter().map(|e| e.frobenius(-1)).collect())
            .collect();
        Matrix::from_columns(&self.field, d, &cols)
    }

    /// dim(ker V ∩ cotangent) at component i: restrict V to the cotangent
    /// basis B via R = V_i·φ^{-1}(B) and count its kernel columns.
    pub fn dim_ker_v_on_cotangent(&self, i: usize) -> usize {
        let basis = self.cotangent_component(i);
        if basis.cols() == 0 {
            return 0;
        }
        let restriction = self.v_mats[i].mul(&basis.frobenius_entrywise(-1));
        restriction.semilinear_kernel_dim(-1)
    }
}

/// One isoclinic constituent: an exact slope, its multiplicity, and the
/// binary profile g(i) marking the indices where V acts invertibly on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeClass {
    pub slope: Ratio<i64>,
    pub multiplicity: usize,
    pub g: Vec<bool>,
}

/// Slope decomposition of the standard module: slopes strictly increasing,
/// multiplicities summing to d, and f(i) = Σ_ν d_ν·g_ν(i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlopeProfile {
    pub classes: Vec<SlopeClass>,
}

impl SlopeProfile {
    /// Total rank Σ d_ν.
    pub fn rank(&self) -> usize {
        self.classes.iter().map(|c| c.multiplicity).sum()
    }
}

/// Groups the basis slots j = 1..=d of the standard module by slope
/// |{i : j > d−f(i)}| / size. Equal-slope slots are consecutive, and the
/// membership pattern j > d−f(i) is constant on each group, which yields the
/// g profiles.
pub fn slope_decomposition(orbit: &OrbitDatum, sig: &SignatureFn) -> SlopeProfile {
    debug_assert_eq!(sig.len(), orbit.size());
    let d = sig.d();
    let size = orbit.size() as i64;
    let mut classes: Vec<SlopeClass> = Vec::new();
    let mut cum = 0usize; // slots consumed by previous classes
    for j in 1..=d {
        let count = (0..orbit.size())
            .filter(|&i| j > d - sig.at(i as isize))
            .count();
        let slope = Ratio::new(count as i64, size);
        match classes.last_mut() {
            Some(last) if last.slope == slope => last.multiplicity += 1,
            _ => {
                if let Some(last) = classes.last() {
                    cum += last.multiplicity;
                }
                let g = (0..orbit.size())
                    .map(|i| cum >= d - sig.at(i as isize))
                    .collect();
                classes.push(SlopeClass {
                    slope,
                    multiplicity: 1,
                    g,
                });
            }
        }
    }
    SlopeProfile { classes }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityFailure {
    /// f(i) + f(i+m) differs from d; reported with the offending index.
    SignatureSum { index: usize, sum: usize },
    /// The adjunction pairing(Fx, y) = pairing(x, Vy)^φ fails at basis
    /// vectors x = e_{i,j}, y = e_{i+m+1,j'}.
    Adjunction { index: usize, j: usize, j_mirror: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualityReport {
    pub pass: bool,
    pub failure: Option<DualityFailure>,
}

/// Checks the self-duality of the standard module of an inert orbit under
/// the pairing P(e_{i,j}, e_{i+m,j'}) = δ_{j', d+1−j} with all constants 1:
/// first the signature constraint f(i)+f(i+m) = d, then the adjunction
/// P(Fx, y) = P(x, Vy)^φ on all basis pairs. The structure constants are
/// 0/1, so the verdict is independent of the coefficient field.
pub fn duality_check(orbit: &OrbitDatum, sig: &SignatureFn) -> Result<DualityReport, DieudonneError> {
    let m = orbit.half_shift().ok_or(DieudonneError::NotInert)?;
    sig.check_orbit(orbit)?;
    let d = sig.d();
    for index in 0..orbit.size() {
        let sum = sig.at(index as isize) + sig.at((index + m) as isize);
        if sum != d {
            return Ok(DualityReport {
                pass: false,
                failure: Some(DualityFailure::SignatureSum { index, sum }),
            });
        }
    }
    let field = FiniteField::new(2, 1).expect("GF(2) always exists");
    let module = build_standard(&field, orbit, sig)?;
    for i in 0..orbit.size() {
        let fm = module.f_matrix(i);
        // V on the component paired with i+1, namely i+m+1
        let vm = module.v_matrix(orbit.wrap((i + m + 1) as isize));
        for j in 1..=d {
            for jp in 1..=d {
                // P(F e_{i,j}, e_{i+m+1,j'}) picks row d+1−j' of F's column j;
                // P(e_{i,j}, V e_{i+m+1,j'}) picks row d+1−j of V's column j'.
                let lhs = &fm[(d - jp, j - 1)];
                let rhs = &vm[(d - j, jp - 1)];
                if lhs != rhs {
                    return Ok(DualityReport {
                        pass: false,
                        failure: Some(DualityFailure::Adjunction {
                            index: i,
                            j,
                            j_mirror: jp,
                        }),
                    });
                }
            }
        }
    }
    Ok(DualityReport {
        pass: true,
        failure: None,
    })
}

#[cfg(test)]
mod tests;
