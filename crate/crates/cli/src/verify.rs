//! The cross-module oracle suites behind the verify subcommand. Each suite
//! checks one family of invariants two independent ways (closed formula
//! against brute-force linear algebra, combinatorial claim against
//! exhaustive search) and reports the first counterexample on mismatch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use modp_foliations::case::OutputFormat;
use modp_foliations::dieudonne::{
    build_from_shuffle, duality_check, slope_decomposition, CMTypeDatum, OrbitDatum, OrbitKind,
    SignatureFn,
};
use modp_foliations::eo::{ab_counts, scan_strata, ScanReport};
use modp_foliations::foliation::{
    blowup_fiber_dim, cascade_identity_check, foliation_report, FoliationError,
};
use modp_foliations::gfpn::{FieldElement, FiniteField, TensorAlgebra};
use modp_foliations::hilbert::{
    cone_membership, feasibility_residue, hasse_weight, is_p_closed, obstruction_weight,
    orbit_seed_key, weight_feasibility, xi_derivation, Cone, QExp, SplittingDatum, Weight,
};

use crate::render;
use crate::Failure;

pub struct Config {
    pub max_d: usize,
    pub orbit_max: usize,
    pub seed: u64,
    pub corrupt_formula: bool,
}

type Suite = Result<usize, String>;

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Header {
    seed: u64,
    max_d: usize,
    orbit_max: usize,
}

#[derive(Serialize)]
struct SuiteLine {
    suite: &'static str,
    pass: bool,
    checks: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    counterexample: Option<String>,
}

pub fn run(config: &Config, format: OutputFormat) -> Result<(), Failure> {
    let header = Header {
        seed: config.seed,
        max_d: config.max_d,
        orbit_max: config.orbit_max,
    };
    match format {
        OutputFormat::Json => println!("{}", render::json(&header)),
        OutputFormat::Csv => println!("suite,pass,checks,seed"),
        OutputFormat::Table => println!(
            "seed {}  max-d {}  orbit-max {}",
            header.seed, header.max_d, header.orbit_max
        ),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    step(format, config.seed, "u21-snapshot", u21_snapshot())?;
    step(format, config.seed, "formula-vs-kernel", formula_vs_kernel(config))?;
    step(format, config.seed, "minimal-stratum", minimal_stratum(config))?;
    step(format, config.seed, "slope-duality", slope_duality(config))?;
    step(format, config.seed, "cascade-identity", cascade_identity(config))?;
    step(format, config.seed, "hilbert-dichotomy", hilbert_dichotomy())?;
    step(format, config.seed, "cone-chain", cone_chain(&mut rng))?;
    step(format, config.seed, "operator-identities", operator_identities(&mut rng))?;
    Ok(())
}

/// Prints one suite line and stops the run on the first failure.
fn step(
    format: OutputFormat,
    seed: u64,
    suite: &'static str,
    outcome: Suite,
) -> Result<(), Failure> {
    let line = match &outcome {
        Ok(checks) => SuiteLine { suite, pass: true, checks: *checks, counterexample: None },
        Err(cx) => SuiteLine { suite, pass: false, checks: 0, counterexample: Some(cx.clone()) },
    };
    match format {
        OutputFormat::Json => println!("{}", render::json(&line)),
        OutputFormat::Csv => println!("{},{},{},{}", line.suite, line.pass, line.checks, seed),
        OutputFormat::Table => {
            if line.pass {
                println!("{}: pass ({} checks)", line.suite, line.checks);
            } else {
                println!("{}: FAIL", line.suite);
                println!("counterexample: {}", line.counterexample.as_deref().unwrap());
            }
        }
    }
    match outcome {
        Ok(_) => Ok(()),
        Err(cx) => Err(Failure { code: 1, message: format!("suite {suite} failed: {cx}") }),
    }
}

fn inert_datum(d: usize, f: Vec<usize>) -> CMTypeDatum {
    let orbit = OrbitDatum::new(f.len(), OrbitKind::Inert).unwrap();
    let sig = SignatureFn::new(d, f).unwrap();
    CMTypeDatum::single(orbit, sig).unwrap()
}

fn split_datum(d: usize, f: Vec<usize>) -> CMTypeDatum {
    let orbit = OrbitDatum::new(f.len(), OrbitKind::Split).unwrap();
    let sig = SignatureFn::new(d, f).unwrap();
    CMTypeDatum::single(orbit, sig).unwrap()
}

fn all_signatures(d: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=d).map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v);
                    next
                })
            })
            .collect();
    }
    out
}

fn scan(datum: &CMTypeDatum, sigma: &[usize]) -> ScanReport {
    scan_strata(datum, sigma, u128::MAX).expect("uncapped scan")
}

fn u21_snapshot() -> Suite {
    let datum = inert_datum(3, vec![1, 2]);
    let sigma = [0usize];
    let report = scan(&datum, &sigma);
    if report.rows.len() != 3 {
        return Err(format!("expected 3 labels, got {}", report.rows.len()));
    }
    let mut dims: Vec<usize> = report.rows.iter().map(|r| r.dim).collect();
    dims.sort_unstable();
    if dims != [0, 1, 2] {
        return Err(format!("dims {dims:?}, expected [0, 1, 2]"));
    }
    let mut r_v: Vec<usize> = report.rows.iter().map(|r| r.r_v[0]).collect();
    r_v.sort_unstable();
    if r_v != [1, 1, 2] {
        return Err(format!("r_V values {r_v:?}, expected [1, 1, 2]"));
    }
    for row in &report.rows {
        if row.in_sigma != (row.dim >= 1) {
            return Err(format!(
                "label {} dim {} member {}",
                row.label, row.dim, row.in_sigma
            ));
        }
    }
    let fol = foliation_report(&datum, &sigma);
    if fol.rank != 1 || fol.dim_m_fol != 1 {
        return Err(format!(
            "rank {} dim_fol {}, expected 1 and 1",
            fol.rank, fol.dim_m_fol
        ));
    }
    let bottom = report
        .rows
        .iter()
        .find(|r| r.dim == 0)
        .expect("dim-0 label exists");
    let fiber = blowup_fiber_dim(&datum, &bottom.label, &sigma);
    if fiber != 1 {
        return Err(format!("blow-up fiber dim {fiber} over {}, expected 1", bottom.label));
    }
    Ok(7)
}

/// Single-orbit data at suite scale: inert orbits of size 2 and split orbits
/// of size up to min(orbit_max, 3), every signature, d up to max_d.
fn oracle_datums(config: &Config) -> Vec<CMTypeDatum> {
    let mut out = Vec::new();
    for d in 1..=config.max_d {
        for f0 in 0..=d {
            out.push(inert_datum(d, vec![f0, d - f0]));
        }
        for size in 1..=config.orbit_max.min(3) {
            for sig in all_signatures(d, size) {
                out.push(split_datum(d, sig));
            }
        }
    }
    out
}

fn describe(datum: &CMTypeDatum) -> String {
    let slot = &datum.slots()[0];
    format!(
        "d={} {:?} orbit size {} sig {:?}",
        datum.d(),
        slot.orbit.kind(),
        slot.orbit.size(),
        slot.sig.values()
    )
}

/// Kernel counts of one pair computed by linear algebra on the shuffle
/// module, the brute-force side of the formula oracle.
fn kernel_counts(datum: &CMTypeDatum, label: &modp_foliations::eo::EOLabel, pair_idx: usize) -> (usize, usize) {
    let field = FiniteField::new(2, 1).unwrap();
    let pair = &datum.pairs()[pair_idx];
    let slot = &datum.slots()[pair.slot];
    match slot.orbit.kind() {
        OrbitKind::Inert => {
            let ws = label.shuffles_for_slot(datum, pair.slot, false);
            let module = build_from_shuffle(&field, &slot.orbit, &slot.sig, &ws).unwrap();
            let m = slot.orbit.half_shift().unwrap();
            let rep = pair.rep_index;
            let mirror = slot.orbit.wrap((rep + m) as isize);
            (
                module.dim_ker_v_on_cotangent(rep),
                module.dim_ker_v_on_cotangent(mirror),
            )
        }
        OrbitKind::Split => {
            let stored_ws = label.shuffles_for_slot(datum, pair.slot, false);
            let mirror_ws = label.shuffles_for_slot(datum, pair.slot, true);
            let stored = build_from_shuffle(&field, &slot.orbit, &slot.sig, &stored_ws).unwrap();
            let mirrored =
                build_from_shuffle(&field, &slot.orbit, &slot.sig.mirror(), &mirror_ws).unwrap();
            let i = pair.index;
            if pair.stored_side {
                (
                    stored.dim_ker_v_on_cotangent(i),
                    mirrored.dim_ker_v_on_cotangent(i),
                )
            } else {
                (
                    mirrored.dim_ker_v_on_cotangent(i),
                    stored.dim_ker_v_on_cotangent(i),
                )
            }
        }
    }
}

fn formula_vs_kernel(config: &Config) -> Suite {
    let mut checks = 0;
    for datum in oracle_datums(config) {
        let all = datum.all_pairs();
        let report = scan(&datum, &all);
        for row in &report.rows {
            for (k, pair) in datum.pairs().iter().enumerate() {
                let (mut fa, fb) = ab_counts(row.label.shuffle_at(k), datum.d(), pair.r, pair.r_prev);
                if config.corrupt_formula {
                    fa += 1;
                }
                let (ka, kb) = kernel_counts(&datum, &row.label, k);
                if (fa, fb) != (ka, kb) {
                    return Err(format!(
                        "{} label {} pair {k}: formula (a,b)=({fa},{fb}), kernel ({ka},{kb})",
                        describe(&datum),
                        row.label
                    ));
                }
                let formula_rank = row.r_v[k];
                let kernel_rank = ka * (datum.d() - pair.r) + pair.r * kb - ka * kb;
                if formula_rank != kernel_rank {
                    return Err(format!(
                        "{} label {} pair {k}: r_V formula {formula_rank}, kernel {kernel_rank}",
                        describe(&datum),
                        row.label
                    ));
                }
                checks += 2;
            }
        }
    }
    Ok(checks)
}

fn minimal_stratum(config: &Config) -> Suite {
    let mut checks = 0;
    for datum in oracle_datums(config) {
        let pair_count = datum.pairs().len();
        for mask in 0u32..(1 << pair_count) {
            let sigma: Vec<usize> = (0..pair_count).filter(|k| mask & (1 << k) != 0).collect();
            let report = scan(&datum, &sigma);
            let members: Vec<_> = report.rows.iter().filter(|r| r.in_sigma).collect();
            if members.is_empty() {
                return Err(format!("{} sigma {sigma:?}: empty locus", describe(&datum)));
            }
            let min_dim = members.iter().map(|r| r.dim).min().unwrap();
            let minima: Vec<_> = members.iter().filter(|r| r.dim == min_dim).collect();
            if minima.len() != 1 || minima[0].label != report.fol {
                return Err(format!(
                    "{} sigma {sigma:?}: {} minima of dim {min_dim}, fol {}",
                    describe(&datum),
                    minima.len(),
                    report.fol
                ));
            }
            if let Some(bad) = members.iter().find(|r| !r.bruhat_over_fol) {
                return Err(format!(
                    "{} sigma {sigma:?}: member {} does not dominate {}",
                    describe(&datum),
                    bad.label,
                    report.fol
                ));
            }
            checks += members.len() + 1;
        }
    }
    Ok(checks)
}

fn slope_duality(config: &Config) -> Suite {
    let mut checks = 0;
    // slope profile invariants on every orbit signature
    for size in 1..=config.orbit_max {
        let orbit = OrbitDatum::new(size, OrbitKind::Split).unwrap();
        for d in 1..=config.max_d {
            for f in all_signatures(d, size) {
                let sig = SignatureFn::new(d, f).unwrap();
                let profile = slope_decomposition(&orbit, &sig);
                let classes = &profile.classes;
                let context = || {
                    format!("size {size} d={d} sig {:?}", sig.values())
                };
                if profile.rank() != d {
                    return Err(format!("{}: multiplicities sum to {}", context(), profile.rank()));
                }
                if !classes.windows(2).all(|w| w[0].slope < w[1].slope) {
                    return Err(format!("{}: slopes not strictly increasing", context()));
                }
                for i in 0..size {
                    let rebuilt: usize = classes
                        .iter()
                        .filter(|c| c.g[i])
                        .map(|c| c.multiplicity)
                        .sum();
                    if rebuilt != sig.at(i as isize) {
                        return Err(format!("{}: f({i}) rebuilt as {rebuilt}", context()));
                    }
                }
                for pair in classes.windows(2) {
                    for i in 0..size {
                        if pair[0].g[i] && !pair[1].g[i] {
                            return Err(format!("{}: g not monotone at index {i}", context()));
                        }
                    }
                }
                checks += 3 + size;
            }
        }
    }
    // inert duality across the half shift
    for m in 1..=(config.orbit_max / 2).max(1) {
        let orbit = OrbitDatum::new(2 * m, OrbitKind::Inert).unwrap();
        for d in 1..=config.max_d {
            for f in all_signatures(d, 2 * m) {
                let sig = SignatureFn::new(d, f.clone()).unwrap();
                let balanced = (0..2 * m).all(|i| f[i] + f[(i + m) % (2 * m)] == d);
                let report = duality_check(&orbit, &sig).unwrap();
                if report.pass != balanced {
                    return Err(format!(
                        "inert size {} d={d} sig {f:?}: duality pass={}, balanced={balanced}",
                        2 * m,
                        report.pass
                    ));
                }
                checks += 1;
            }
        }
    }
    Ok(checks)
}

fn cascade_identity(config: &Config) -> Suite {
    let mut checks = 0;
    for size in 1..=config.orbit_max {
        let orbit = OrbitDatum::new(size, OrbitKind::Split).unwrap();
        for d in 1..=config.max_d {
            for f in all_signatures(d, size) {
                let sig = SignatureFn::new(d, f.clone()).unwrap();
                let profile = slope_decomposition(&orbit, &sig);
                for i in 0..size {
                    let normalized = f[(i + size - 1) % size] <= f[i];
                    match cascade_identity_check(&profile, i) {
                        Ok(report) => {
                            if !normalized || !report.pass {
                                return Err(format!(
                                    "size {size} d={d} sig {f:?} index {i}: mass {} vs kernel {} (normalized {normalized})",
                                    report.interval_mass, report.kernel_rank
                                ));
                            }
                        }
                        Err(FoliationError::NotNormalized { .. }) if !normalized => {}
                        Err(e) => {
                            return Err(format!("size {size} d={d} sig {f:?} index {i}: {e}"));
                        }
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(checks)
}

fn hilbert_dichotomy() -> Suite {
    let mut checks = 0;
    for p in [2u64, 3, 5] {
        for f in 1..=4usize {
            let datum = SplittingDatum::new(p, vec![f]).unwrap();
            for sigma in 0..f {
                for tau in 0..f {
                    if sigma == tau {
                        continue;
                    }
                    let k = obstruction_weight(&datum, sigma, tau);
                    let witness = weight_feasibility(&datum, &k).unwrap();
                    let expected = tau == datum.phi(sigma);
                    if witness.is_some() != expected {
                        return Err(format!(
                            "p={p} f={f} sigma={sigma} tau={tau}: feasible={}, expected {expected}",
                            witness.is_some()
                        ));
                    }
                    if let Some(w) = witness {
                        let residue = feasibility_residue(&datum, &k, &w).unwrap();
                        if !residue.is_zero() {
                            return Err(format!(
                                "p={p} f={f} sigma={sigma} tau={tau}: witness {w:?} residue {:?}",
                                residue.k
                            ));
                        }
                    }
                    checks += 1;
                }
            }
        }
        // singleton p-closedness and the obstruction/Hasse identity
        for sizes in [vec![1], vec![2], vec![1, 2], vec![2, 2], vec![3, 1]] {
            let datum = SplittingDatum::new(p, sizes.clone()).unwrap();
            for sigma in 0..datum.g() {
                let singleton = is_p_closed(&datum, &[sigma]);
                let orbit_size = datum.orbit_sizes()[datum.orbit_of(sigma)];
                if singleton != (orbit_size == 1) {
                    return Err(format!(
                        "p={p} sizes {sizes:?} sigma={sigma}: p-closed {singleton}, orbit size {orbit_size}"
                    ));
                }
                let phi_sigma = datum.phi(sigma);
                let doubled: Vec<i64> = hasse_weight(&datum, phi_sigma)
                    .k
                    .iter()
                    .map(|v| 2 * v)
                    .collect();
                if obstruction_weight(&datum, sigma, phi_sigma).k != doubled {
                    return Err(format!(
                        "p={p} sizes {sizes:?} sigma={sigma}: obstruction is not twice the Hasse weight"
                    ));
                }
                checks += 2;
            }
        }
    }
    Ok(checks)
}

fn compositions(total: usize) -> Vec<Vec<usize>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=total {
        for rest in compositions(total - first) {
            let mut c = vec![first];
            c.extend(rest);
            out.push(c);
        }
    }
    out
}

fn cone_chain(rng: &mut ChaCha8Rng) -> Suite {
    let mut checks = 0;
    for p in [2u64, 3, 5] {
        for g in 1..=4usize {
            for sizes in compositions(g) {
                let datum = SplittingDatum::new(p, sizes.clone()).unwrap();
                for _ in 0..1000 {
                    let k: Vec<i64> = (0..g).map(|_| rng.gen_range(-30..=30)).collect();
                    let w = Weight { k };
                    let in_min = cone_membership(&datum, &w, Cone::Minimal).unwrap();
                    let in_std = cone_membership(&datum, &w, Cone::Standard).unwrap();
                    let in_hasse = cone_membership(&datum, &w, Cone::Hasse).unwrap();
                    if (in_min && !in_std) || (in_std && !in_hasse) {
                        return Err(format!(
                            "p={p} sizes {sizes:?} k={:?}: min={in_min} std={in_std} hasse={in_hasse}",
                            w.k
                        ));
                    }
                    checks += 1;
                }
            }
        }
    }
    Ok(checks)
}

fn lcm(a: usize, b: usize) -> usize {
    let gcd = |mut x: usize, mut y: usize| {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    a / gcd(a, b) * b
}

/// Orbit size lists (up to two orbits) whose sizes have lcm at most 6, the
/// coefficient fields the operator suite must cover.
fn small_orbit_configs() -> Vec<(Vec<usize>, usize)> {
    let mut out = Vec::new();
    for a in 1..=6usize {
        out.push((vec![a], a));
        for b in a..=6 {
            let l = lcm(a, b);
            if l <= 6 {
                out.push((vec![a, b], l));
            }
        }
    }
    out
}

fn random_element(kappa: &FiniteField, p: u64, n: usize, rng: &mut ChaCha8Rng) -> FieldElement {
    let coeffs: Vec<u64> = (0..n).map(|_| rng.gen_range(0..p)).collect();
    kappa.element(coeffs).unwrap()
}

/// A random element of the degree-f subfield: the trace of a random element
/// down from the full field.
fn subfield_element(
    kappa: &FiniteField,
    p: u64,
    n: usize,
    f: usize,
    rng: &mut ChaCha8Rng,
) -> FieldElement {
    let y = random_element(kappa, p, n, rng);
    let mut total = kappa.zero();
    for i in 0..n / f {
        total = &total + &y.frobenius((f * i) as i64);
    }
    total
}

fn operator_identities(rng: &mut ChaCha8Rng) -> Suite {
    let mut checks = 0;
    // idempotent completeness, orthogonality and Frobenius permutation
    for p in [2u64, 5] {
        for (sizes, l) in small_orbit_configs() {
            let kappa = FiniteField::new(p, l).unwrap();
            for &f in &sizes {
                let algebra = TensorAlgebra::new(f, &kappa).unwrap();
                let es = algebra.idempotents();
                let context = || format!("p={p} sizes {sizes:?} f={f}");
                let mut total = algebra.zero();
                for e in &es {
                    total = algebra.add(&total, e);
                }
                if total != algebra.one() {
                    return Err(format!("{}: idempotents do not sum to 1", context()));
                }
                for (i, ei) in es.iter().enumerate() {
                    for (j, ej) in es.iter().enumerate() {
                        let product = algebra.mul(ei, ej);
                        let expected = if i == j { ei.clone() } else { algebra.zero() };
                        if product != expected {
                            return Err(format!("{}: e{i}e{j} wrong", context()));
                        }
                    }
                    if algebra.coeff_frobenius(ei) != es[(i + 1) % f] {
                        return Err(format!("{}: Frobenius does not step e{i}", context()));
                    }
                }
                checks += 1 + es.len() * (es.len() + 1);
            }
        }
    }
    // p-fold iteration of the sigma derivation steps one Frobenius
    let configs = small_orbit_configs();
    let p = 5u64;
    for round in 0..100usize {
        let (sizes, l) = configs[round % configs.len()].clone();
        let kappa = FiniteField::new(p, l).unwrap();
        let datum = SplittingDatum::new(p, sizes.clone()).unwrap();
        let term_count = rng.gen_range(1..=50usize);
        let mut terms = Vec::with_capacity(term_count);
        for _ in 0..term_count {
            let seeds: Vec<FieldElement> = sizes
                .iter()
                .map(|&f| subfield_element(&kappa, p, l, f, rng))
                .collect();
            let pairings = vec![rng.gen_range(-10..=10i64)];
            let key = orbit_seed_key(&datum, &seeds, pairings).unwrap();
            terms.push((key, random_element(&kappa, p, l, rng)));
        }
        let h = QExp::from_terms(&kappa, datum.g(), 1, terms).unwrap();
        for sigma in 0..datum.g() {
            let mut iterated = h.clone();
            for _ in 0..p {
                iterated = xi_derivation(&iterated, sigma).unwrap();
            }
            let stepped = xi_derivation(&h, datum.phi(sigma)).unwrap();
            if iterated != stepped {
                return Err(format!(
                    "round {round} sizes {sizes:?} sigma={sigma}: p-fold iteration differs"
                ));
            }
            checks += 1;
        }
    }
    Ok(checks)
}
