//! Shuffle combinatorics and stratum labels.
//!
//! A stratum label assigns to every orbit pair a shuffle permutation; the
//! functions here enumerate labels, compute dimensions and V-kernel ranks,
//! decide membership in the locus cut out by a set Σ of pairs, and locate the
//! minimal member of that locus. Permutations use 1-based one-line notation
//! throughout.

use std::fmt;

use thiserror::Error;

use crate::dieudonne::{CMTypeDatum, OrbitKind, Pair};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ShuffleError {
    #[error("one-line array of length {len} is not a permutation of 1..={len}")]
    NotAPermutation { len: usize },
    #[error("first block size {e} exceeds degree {d}")]
    BadBlockSize { e: usize, d: usize },
    #[error("preimages of block {block} are not increasing")]
    BlockNotIncreasing { block: usize },
}

/// An (e, d−e)-shuffle: a permutation of 1..=d whose preimages of 1..=e and
/// of e+1..=d are both increasing. These are the minimal-length coset
/// representatives for the block parabolic.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Shuffle {
    d: usize,
    e: usize,
    /// image[j−1] = w(j), 1-based values.
    image: Vec<usize>,
}

impl fmt::Debug for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Dash-joined one-line notation, e.g. "3-1-2". Contains no commas, so it is
/// safe to embed in unquoted CSV fields.
impl fmt::Display for Shuffle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in self.image.iter().enumerate() {
            if k > 0 {
                write!(f, "-")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl Shuffle {
    pub fn from_one_line(e: usize, image: Vec<usize>) -> Result<Shuffle, ShuffleError> {
        let d = image.len();
        if e > d {
            return Err(ShuffleError::BadBlockSize { e, d });
        }
        let mut seen = vec![false; d];
        for &v in &image {
            if v < 1 || v > d || seen[v - 1] {
                return Err(ShuffleError::NotAPermutation { len: d });
            }
            seen[v - 1] = true;
        }
        // block-increasing <=> preimages of each block appear in increasing
        // value order as j runs left to right
        let mut last = [0usize; 2];
        for &v in &image {
            let block = if v <= e { 0 } else { 1 };
            if v < last[block] {
                return Err(ShuffleError::BlockNotIncreasing { block: block + 1 });
            }
            last[block] = v;
        }
        Ok(Shuffle { d, e, image })
    }

    pub fn identity(d: usize, e: usize) -> Shuffle {
        assert!(e <= d);
        Shuffle {
            d,
            e,
            image: (1..=d).collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn one_line(&self) -> &[usize] {
        &self.image
    }

    /// w(j), 1-based.
    pub fn apply(&self, j: usize) -> usize {
        self.image[j - 1]
    }

    /// w^{-1}(v), 1-based.
    pub fn apply_inverse(&self, v: usize) -> usize {
        self.image.iter().position(|&x| x == v).expect("value in range") + 1
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(k, &v)| v == k + 1)
    }
}

/// All (e, d−e)-shuffles in lexicographic order of one-line notation. A
/// shuffle is determined by the set of positions carrying the values 1..=e,
/// and subset-lex order coincides with one-line-lex order.
pub fn enumerate_shuffles(e: usize, d: usize) -> Vec<Shuffle> {
    assert!(e <= d, "block size exceeds degree");
    let mut out = Vec::new();
    // positions (0-based) receiving the small block, lexicographically
    let mut subset: Vec<usize> = (0..e).collect();
    loop {
        let mut image = vec![0usize; d];
        for (small, &pos) in (1..).zip(&subset) {
            image[pos] = small;
        }
        let mut big = e + 1;
        for slot in image.iter_mut() {
            if *slot == 0 {
                *slot = big;
                big += 1;
            }
        }
        out.push(Shuffle { d, e, image });
        // next e-subset of 0..d in lex order
        if e == 0 {
            break;
        }
        let mut k = e;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if subset[k] + 1 < d - (e - 1 - k) {
                subset[k] += 1;
                for t in k + 1..e {
                    subset[t] = subset[t - 1] + 1;
                }
                break;
            }
        }
    }
    out
}

/// ℓ(w) = Σ_{v ≤ e} (w^{-1}(v) − v); for a shuffle this equals the inversion
/// count.
pub fn shuffle_length(w: &Shuffle) -> usize {
    (1..=w.e).map(|v| w.apply_inverse(v) - v).sum()
}

/// Conjugation by the longest element: w̌(j) = d+1 − w(d+1−j). Swaps the
/// block sizes (e, d−e) → (d−e, e), preserves length, and is an involution.
pub fn check_involution(w: &Shuffle) -> Shuffle {
    let d = w.d;
    let image = (1..=d).map(|j| d + 1 - w.apply(d + 1 - j)).collect();
    Shuffle {
        d,
        e: d - w.e,
        image,
    }
}

/// Bruhat order on permutations in one-line notation (1-based), by the
/// rank-matrix criterion: u ≤ v iff |{a ≤ i : u(a) ≥ j}| ≤ |{a ≤ i : v(a) ≥ j}|
/// for all i, j.
pub fn bruhat_leq(u: &[usize], v: &[usize]) -> bool {
    assert_eq!(u.len(), v.len(), "permutations of different degrees");
    let d = u.len();
    // cu[i][j] = |{a ≤ i : u(a) ≥ j}|, built by prefix accumulation
    let counts = |w: &[usize]| -> Vec<Vec<usize>> {
        let mut rows = vec![vec![0usize; d + 2]];
        for &wi in w {
            let prev = rows.last().unwrap();
            let next = prev
                .iter()
                .enumerate()
                .map(|(j, &above)| above + usize::from(j >= 1 && wi >= j))
                .collect();
            rows.push(next);
        }
        rows
    };
    let cu = counts(u);
    let cv = counts(v);
    for i in 1..=d {
        for j in 1..=d {
            if cu[i][j] > cv[i][j] {
                return false;
            }
        }
    }
    true
}

/// The shuffle 1..=m ↦ n+1..=n+m, m+1..=n+m ↦ 1..=n, of length n·m; block
/// sizes (n, m). This labels the open stratum.
pub fn w_ord_shuffle(n: usize, m: usize) -> Shuffle {
    let d = n + m;
    let image = (1..=d)
        .map(|j| if j <= m { n + j } else { j - m })
        .collect();
    Shuffle { d, e: n, image }
}

/// The minimal-length shuffle compatible with V-kernel count |f_i − f_prev|:
/// for f_prev ≤ f_i it fixes 1..=f_i−f_prev, shifts the middle up by f_prev
/// and wraps the top; the other branch is its mirror. Length is
/// (d−f_i)·f_prev, resp. f_i·(d−f_prev).
pub fn w_fol_shuffle(d: usize, f_i: usize, f_prev: usize) -> Shuffle {
    assert!(f_i <= d && f_prev <= d);
    let image: Vec<usize> = if f_prev <= f_i {
        (1..=d)
            .map(|j| {
                if j <= f_i - f_prev {
                    j
                } else if j <= d - f_prev {
                    j + f_prev
                } else {
                    j + f_i - d
                }
            })
            .collect()
    } else {
        let g = d - f_prev;
        (1..=d)
            .map(|j| {
                if j <= g {
                    j + f_i
                } else if j <= g + f_i {
                    j - g
                } else {
                    j
                }
            })
            .collect()
    };
    let w = Shuffle {
        d,
        e: f_i,
        image,
    };
    debug_assert!(Shuffle::from_one_line(f_i, w.image.clone()).is_ok());
    w
}

pub(crate) fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("label carries {got} shuffles but the datum has {expected} pairs")]
    WrongPairCount { expected: usize, got: usize },
    #[error("shuffle for pair {pair} has blocks ({e}, {rest}), expected ({expected_e}, {expected_rest})")]
    WrongBlocks {
        pair: usize,
        e: usize,
        rest: usize,
        expected_e: usize,
        expected_rest: usize,
    },
}

/// A stratum label: one shuffle per orbit pair, recorded at the pair's
/// normalized representative, in Π_{r, d−r} for the representative signature
/// r. The mirror member's shuffle is the check involution, derived on demand.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EOLabel {
    shuffles: Vec<Shuffle>,
}

impl fmt::Debug for EOLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Pipe-joined per-pair shuffles, e.g. "3-1-2|2-1"; comma-free.
impl fmt::Display for EOLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, w) in self.shuffles.iter().enumerate() {
            if k > 0 {
                write!(f, "|")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl EOLabel {
    pub fn new(datum: &CMTypeDatum, shuffles: Vec<Shuffle>) -> Result<EOLabel, LabelError> {
        let pairs = datum.pairs();
        if shuffles.len() != pairs.len() {
            return Err(LabelError::WrongPairCount {
                expected: pairs.len(),
                got: shuffles.len(),
            });
        }
        for (k, (w, pair)) in shuffles.iter().zip(pairs).enumerate() {
            if w.d() != datum.d() || w.e() != pair.r {
                return Err(LabelError::WrongBlocks {
                    pair: k,
                    e: w.e(),
                    rest: w.d() - w.e(),
                    expected_e: pair.r,
                    expected_rest: datum.d() - pair.r,
                });
            }
        }
        Ok(EOLabel { shuffles })
    }

    pub fn shuffles(&self) -> &[Shuffle] {
        &self.shuffles
    }

    pub fn shuffle_at(&self, pair: usize) -> &Shuffle {
        &self.shuffles[pair]
    }

    /// Resolves the per-index shuffles of one orbit of the datum, suitable
    /// for building the associated module. `mirror` selects the derived
    /// mirror orbit of a split slot (carrying signature d−f and the check
    /// shuffles); inert slots are self-mirror and reject `mirror = true`.
    pub fn shuffles_for_slot(
        &self,
        datum: &CMTypeDatum,
        slot: usize,
        mirror: bool,
    ) -> Vec<Shuffle> {
        let size = datum.slots()[slot].orbit.size();
        let kind = datum.slots()[slot].orbit.kind();
        assert!(
            !(mirror && kind == OrbitKind::Inert),
            "inert orbits are self-mirror"
        );
        let base: usize = datum
            .pairs()
            .iter()
            .position(|p| p.slot == slot)
            .expect("every slot contributes pairs");
        (0..size)
            .map(|i| match kind {
                OrbitKind::Inert => {
                    let m = size / 2;
                    let pair = &datum.pairs()[base + i % m];
                    let w = &self.shuffles[base + i % m];
                    if pair.rep_index == i {
                        w.clone()
                    } else {
                        check_involution(w)
                    }
                }
                OrbitKind::Split => {
                    let pair = &datum.pairs()[base + i];
                    let w = &self.shuffles[base + i];
                    if pair.stored_side != mirror {
                        w.clone()
                    } else {
                        check_involution(w)
                    }
                }
            })
            .collect()
    }
}

/// Label of the open stratum: w^ord at every pair.
pub fn label_ord(datum: &CMTypeDatum) -> EOLabel {
    let d = datum.d();
    let shuffles = datum
        .pairs()
        .iter()
        .map(|p| w_ord_shuffle(p.r, d - p.r))
        .collect();
    EOLabel { shuffles }
}

/// Label of the minimal stratum meeting the Σ-locus: w^fol at pairs in Σ,
/// identity elsewhere. `sigma` must be valid for the datum.
pub fn label_fol(datum: &CMTypeDatum, sigma: &[usize]) -> EOLabel {
    datum.validate_sigma(sigma).expect("sigma validated by caller");
    let d = datum.d();
    let shuffles = datum
        .pairs()
        .iter()
        .enumerate()
        .map(|(k, p)| {
            if sigma.contains(&k) {
                w_fol_shuffle(d, p.r, p.r_prev)
            } else {
                Shuffle::identity(d, p.r)
            }
        })
        .collect();
    EOLabel { shuffles }
}

/// dim M_w = Σ ℓ(w_τ) over pair representatives.
pub fn dim_stratum(label: &EOLabel) -> usize {
    label.shuffles.iter().map(shuffle_length).sum()
}

/// The two kernel counts attached to a shuffle at a pair with signatures
/// (r, r_prev): a = |{j ≤ d−r_prev : w(j) ≤ r}| counts the V-kernel inside
/// the cotangent space at the representative, b = |{j > d−r_prev : w(j) > r}|
/// the same count at the mirror.
pub fn ab_counts(w: &Shuffle, d: usize, r: usize, r_prev: usize) -> (usize, usize) {
    let a = (1..=d - r_prev).filter(|&j| w.apply(j) <= r).count();
    let b = (d - r_prev + 1..=d).filter(|&j| w.apply(j) > r).count();
    (a, b)
}

/// r_V on the stratum, at one pair: a·r_τ̄ + r_τ·b − a·b with r_τ = r,
/// r_τ̄ = d−r and (a, b) the kernel counts of the pair's shuffle.
pub fn r_v_at(datum: &CMTypeDatum, label: &EOLabel, pair: usize) -> usize {
    let d = datum.d();
    let p: &Pair = &datum.pairs()[pair];
    let (a, b) = ab_counts(label.shuffle_at(pair), d, p.r, p.r_prev);
    a * (d - p.r) + p.r * b - a * b
}

/// Membership of the stratum in the Σ-locus: at every pair of Σ the
/// applicable kernel count must equal |r − r_prev| (the a-count when
/// r_prev ≤ r, the b-count otherwise; representatives are normalized so the
/// first case always applies).
pub fn in_m_sigma(datum: &CMTypeDatum, label: &EOLabel, sigma: &[usize]) -> bool {
    let d = datum.d();
    sigma.iter().all(|&k| {
        let p = &datum.pairs()[k];
        let (a, b) = ab_counts(label.shuffle_at(k), d, p.r, p.r_prev);
        if p.r_prev <= p.r {
            a == p.r - p.r_prev
        } else {
            b == p.r_prev - p.r
        }
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScanError {
    #[error("label count {total} exceeds the enumeration cap {cap}")]
    CapExceeded { total: u128, cap: u128 },
}

#[derive(Debug, Clone)]
pub struct StratumRow {
    pub label: EOLabel,
    pub dim: usize,
    /// r_V at each pair of Σ, in Σ order.
    pub r_v: Vec<usize>,
    pub in_sigma: bool,
    /// Componentwise Bruhat domination of w^fol. Domination is a necessary
    /// condition for meeting the Σ-locus, not a closure statement.
    pub bruhat_over_fol: bool,
}

#[derive(Debug, Clone)]
pub struct ScanReport {
    /// All labels, in lexicographic order (first pair most significant).
    pub rows: Vec<StratumRow>,
    pub fol: EOLabel,
    /// Row index of the unique minimal-dimension member of the Σ-locus.
    pub minimal: usize,
}

/// Enumerates every stratum label of the datum and evaluates dimension, r_V
/// and Σ-membership. Asserts the structure theorem on the result: the
/// Σ-locus has a unique minimal-dimension member, it is label_fol, and every
/// member Bruhat-dominates label_fol componentwise.
pub fn scan_strata(
    datum: &CMTypeDatum,
    sigma: &[usize],
    cap: u128,
) -> Result<ScanReport, ScanError> {
    datum.validate_sigma(sigma).expect("sigma validated by caller");
    let d = datum.d();
    let pairs = datum.pairs();
    let total: u128 = pairs.iter().map(|p| binomial(d, p.r)).product();
    if total > cap {
        return Err(ScanError::CapExceeded { total, cap });
    }
    let fol = label_fol(datum, sigma);
    let choices: Vec<Vec<Shuffle>> = pairs.iter().map(|p| enumerate_shuffles(p.r, d)).collect();

    let mut rows = Vec::with_capacity(total as usize);
    // odometer over per-pair shuffle lists; last pair fastest, so rows come
    // out in lexicographic label order
    let mut idx = vec![0usize; pairs.len()];
    loop {
        let shuffles: Vec<Shuffle> = idx
            .iter()
            .zip(&choices)
            .map(|(&k, list)| list[k].clone())
            .collect();
        let label = EOLabel { shuffles };
        let dim = dim_stratum(&label);
        let r_v = sigma.iter().map(|&k| r_v_at(datum, &label, k)).collect();
        let in_sigma = in_m_sigma(datum, &label, sigma);
        let bruhat_over_fol = (0..pairs.len()).all(|k| {
            bruhat_leq(fol.shuffle_at(k).one_line(), label.shuffle_at(k).one_line())
        });
        rows.push(StratumRow {
            label,
            dim,
            r_v,
            in_sigma,
            bruhat_over_fol,
        });

        let mut pos = idx.len();
        loop {
            if pos == 0 {
                // full wrap: enumeration finished
                let minimal = verify_minimal_member(&rows, &fol);
                return Ok(ScanReport { rows, fol, minimal });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < choices[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// The structure theorem the scan is required to uphold; a violation means
/// the formulas and the enumeration disagree, which is a bug, not an input
/// error.
fn verify_minimal_member(rows: &[StratumRow], fol: &EOLabel) -> usize {
    let members: Vec<&StratumRow> = rows.iter().filter(|r| r.in_sigma).collect();
    assert!(!members.is_empty(), "the Σ-locus is never empty");
    let min_dim = members.iter().map(|r| r.dim).min().unwrap();
    let minima: Vec<&&StratumRow> = members.iter().filter(|r| r.dim == min_dim).collect();
    assert_eq!(minima.len(), 1, "minimal member must be unique");
    assert_eq!(&minima[0].label, fol, "minimal member must be label_fol");
    assert!(
        members.iter().all(|r| r.bruhat_over_fol),
        "every member must Bruhat-dominate label_fol"
    );
    rows.iter()
        .position(|r| &r.label == fol)
        .expect("label_fol enumerated")
}
