//! Rank and dimension bookkeeping for the V-kernel foliations attached to a
//! set Σ of orbit pairs: the generic kernel rank per pair, the global
//! rank/corank split, blow-up fiber dimensions over individual strata, and
//! the cascade ledger that reconciles slope data with the same ranks.

use thiserror::Error;

pub use crate::dieudonne::CMTypeDatum;
use crate::dieudonne::{slope_decomposition, OrbitKind, SlopeProfile};
use crate::eo::{ab_counts, EOLabel};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FoliationError {
    #[error("index {index} is not normalized: the predecessor signature exceeds the signature")]
    NotNormalized { index: usize },
    #[error("slope class indices must satisfy a < b, got a={a}, b={b}")]
    SlopeIndexOrder { a: usize, b: usize },
    #[error("slope class index {index} out of range, profile has {count} classes")]
    SlopeIndexRange { index: usize, count: usize },
}

/// Generic V-kernel rank contributed by one pair on the open stratum:
/// max{0, r−r'}·(d−r) + r·max{0, r'−r} with r' the predecessor signature.
/// The value is symmetric between the two pair members and vanishes exactly
/// when r ∈ {0, d} or r = r'.
pub fn r_v_ord_pair(datum: &CMTypeDatum, pair: usize) -> usize {
    let p = &datum.pairs()[pair];
    let d = datum.d();
    p.r.saturating_sub(p.r_prev) * (d - p.r) + p.r * p.r_prev.saturating_sub(p.r)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoliationReport {
    /// dim M = Σ r(d−r) over all pairs.
    pub dim_m: usize,
    /// Rank of the Σ-foliation: full contribution r(d−r) outside Σ, the
    /// clipped product min{r, r'}·(d−max{r, r'}) inside.
    pub rank: usize,
    /// Σ of the generic kernel ranks over the pairs of Σ.
    pub corank: usize,
    /// Dimension of the minimal stratum meeting the Σ-locus.
    pub dim_m_fol: usize,
    /// r_v_ord_pair at every pair, in pair order.
    pub r_v_ord: Vec<usize>,
}

pub fn foliation_report(datum: &CMTypeDatum, sigma: &[usize]) -> FoliationReport {
    datum.validate_sigma(sigma).expect("sigma validated by caller");
    let d = datum.d();
    let r_v_ord: Vec<usize> = (0..datum.pairs().len())
        .map(|k| r_v_ord_pair(datum, k))
        .collect();
    let mut dim_m = 0;
    let mut rank = 0;
    let mut corank = 0;
    let mut dim_m_fol = 0;
    for (k, p) in datum.pairs().iter().enumerate() {
        dim_m += p.r * (d - p.r);
        if sigma.contains(&k) {
            corank += r_v_ord[k];
            let clipped = p.r.min(p.r_prev) * (d - p.r.max(p.r_prev));
            rank += clipped;
            dim_m_fol += clipped;
        } else {
            rank += p.r * (d - p.r);
        }
    }
    debug_assert_eq!(rank + corank, dim_m);
    FoliationReport {
        dim_m,
        rank,
        corank,
        dim_m_fol,
        r_v_ord,
    }
}

/// Fiber dimension of the blow-up over the stratum of `label`:
/// Σ over the pairs of Σ of (r−r')·(a_τ(w) − (r−r')). Zero exactly on the
/// strata meeting the Σ-locus, where the kernel count a_τ(w) hits its floor.
pub fn blowup_fiber_dim(datum: &CMTypeDatum, label: &EOLabel, sigma: &[usize]) -> usize {
    datum.validate_sigma(sigma).expect("sigma validated by caller");
    let d = datum.d();
    sigma
        .iter()
        .map(|&k| {
            let p = &datum.pairs()[k];
            let (a, _) = ab_counts(label.shuffle_at(k), d, p.r, p.r_prev);
            let drop = p.r - p.r_prev;
            // a ≥ r−r' by pigeonhole on the d−r' leading positions
            debug_assert!(a >= drop);
            drop * (a - drop)
        })
        .sum()
}

/// Rank of a signature recovered from a slope profile: Σ d_ν g_ν(i).
fn signature_from_profile(profile: &SlopeProfile, i: isize) -> usize {
    profile
        .classes
        .iter()
        .map(|c| {
            let size = c.g.len() as isize;
            c.multiplicity * usize::from(c.g[i.rem_euclid(size) as usize])
        })
        .sum()
}

/// The cascade interval bounds at orbit index i: p = number of slope classes
/// with g(i) = 0, q = the same count at i−1. Requires the normalized
/// orientation f(i−1) ≤ f(i), which is equivalent to p ≤ q; the unnormalized
/// orientation is an error, not an implicit swap.
pub fn cascade_pq(profile: &SlopeProfile, i: usize) -> Result<(usize, usize), FoliationError> {
    if profile.classes.is_empty() {
        return Ok((0, 0));
    }
    let f_here = signature_from_profile(profile, i as isize);
    let f_prev = signature_from_profile(profile, i as isize - 1);
    if f_prev > f_here {
        return Err(FoliationError::NotNormalized { index: i });
    }
    let size = profile.classes[0].g.len() as isize;
    let here = (i as isize).rem_euclid(size) as usize;
    let prev = (i as isize - 1).rem_euclid(size) as usize;
    let p = profile.classes.iter().filter(|c| !c.g[here]).count();
    let q = profile.classes.iter().filter(|c| !c.g[prev]).count();
    debug_assert!(p <= q);
    Ok((p, q))
}

/// dim Ext between the slope-a and slope-b constituents (1-based, a < b):
/// d_a·d_b·Σ_i (g_b(i) − g_a(i)).
pub fn dim_ext_group(
    profile: &SlopeProfile,
    a: usize,
    b: usize,
) -> Result<usize, FoliationError> {
    if a >= b {
        return Err(FoliationError::SlopeIndexOrder { a, b });
    }
    let count = profile.classes.len();
    for index in [a, b] {
        if index < 1 || index > count {
            return Err(FoliationError::SlopeIndexRange { index, count });
        }
    }
    let ca = &profile.classes[a - 1];
    let cb = &profile.classes[b - 1];
    let spread: usize = ca
        .g
        .iter()
        .zip(&cb.g)
        .map(|(&ga, &gb)| usize::from(gb) - usize::from(ga))
        .sum();
    Ok(ca.multiplicity * cb.multiplicity * spread)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CascadeReport {
    pub p: usize,
    pub q: usize,
    /// Σ_{a ≤ p, b ≥ q+1} d_a·d_b, the multiplicity mass of the cascade
    /// interval.
    pub interval_mass: usize,
    /// r'·(d−r), the generic kernel rank of the pair at this index.
    pub kernel_rank: usize,
    pub pass: bool,
}

/// Verifies at one normalized orbit index that the cascade interval mass
/// equals the kernel rank r'·(d−r). Both sides are computed independently:
/// the left from the slope profile, the right from the signature.
pub fn cascade_identity_check(
    profile: &SlopeProfile,
    i: usize,
) -> Result<CascadeReport, FoliationError> {
    let (p, q) = cascade_pq(profile, i)?;
    let classes = &profile.classes;
    let low: usize = classes.iter().take(p).map(|c| c.multiplicity).sum();
    let high: usize = classes.iter().skip(q).map(|c| c.multiplicity).sum();
    let interval_mass = low * high;
    let d = profile.rank();
    let kernel_rank =
        signature_from_profile(profile, i as isize - 1) * (d - signature_from_profile(profile, i as isize));
    Ok(CascadeReport {
        p,
        q,
        interval_mass,
        kernel_rank,
        pass: interval_mass == kernel_rank,
    })
}

/// Cascade check evaluated at a pair's normalized representative. The
/// representative always satisfies the orientation precondition, so this
/// cannot fail.
pub fn cascade_for_pair(datum: &CMTypeDatum, pair: usize) -> CascadeReport {
    let p = &datum.pairs()[pair];
    let slot = &datum.slots()[p.slot];
    let (profile, index) = match slot.orbit.kind() {
        OrbitKind::Inert => (slope_decomposition(&slot.orbit, &slot.sig), p.rep_index),
        OrbitKind::Split => {
            let sig = if p.stored_side {
                slot.sig.clone()
            } else {
                slot.sig.mirror()
            };
            (slope_decomposition(&slot.orbit, &sig), p.index)
        }
    };
    cascade_identity_check(&profile, index).expect("pair representatives are normalized")
}
