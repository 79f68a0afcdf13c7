//! Command line driver. Case files are JSON (see docs/case-format.md at the
//! repository root); output is a table, newline-delimited JSON, or CSV.
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 resource
//! cap exceeded.

mod render;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use modp_foliations::case::{
    parse_case, CaseDescription, HilbertCase, OutputFormat, UnitaryCase,
};
use modp_foliations::dieudonne::slope_decomposition;
use modp_foliations::eo::scan_strata;
use modp_foliations::foliation::{cascade_for_pair, foliation_report};
use modp_foliations::gfpn::FiniteField;
use modp_foliations::hilbert::{
    cone_membership, feasibility_residue, go_stratum_report, idempotent_frobenius_check,
    is_p_closed, obstruction_weight, weight_feasibility_capped, Cone, HilbertError,
};

#[derive(Parser)]
#[command(name = "folcalc", version, about = "Exact mod-p stratum and foliation reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format; overrides any format named in the case file.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the stratum labels of a unitary case.
    Strata {
        case: PathBuf,
        /// Cap on the number of enumerated labels.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u128,
    },
    /// Rank, corank and cascade report for a unitary case.
    Foliation { case: PathBuf },
    /// p-closedness, cones and weight feasibility for a Hilbert case.
    Hilbert {
        case: PathBuf,
        /// Cap on feasibility search nodes.
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
    },
    /// Run the cross-module oracle suites.
    Verify {
        /// Largest metric dimension d for the exhaustive unitary suites.
        #[arg(long, default_value_t = 4)]
        max_d: usize,
        /// Largest orbit size for the exhaustive unitary suites.
        #[arg(long, default_value_t = 3)]
        orbit_max: usize,
        /// Seed for the randomized suites.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Plant an off-by-one in the rank formula to exercise
        /// counterexample reporting.
        #[arg(long, hide = true)]
        corrupt_formula: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }

    fn cap(message: impl Into<String>) -> Failure {
        Failure { code: 3, message: message.into() }
    }
}

fn main() -> ExitCode {
    // die silently on a closed pipe instead of panicking in println!
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Strata { case, cap } => {
            let case = load_unitary(&case)?;
            cmd_strata(&case, pick_format(cli.format, case.format), cap)
        }
        Command::Foliation { case } => {
            let case = load_unitary(&case)?;
            cmd_foliation(&case, pick_format(cli.format, case.format));
            Ok(())
        }
        Command::Hilbert { case, cap } => {
            let case = load_hilbert(&case)?;
            cmd_hilbert(&case, pick_format(cli.format, case.format), cap)
        }
        Command::Verify { max_d, orbit_max, seed, corrupt_formula } => {
            let config = verify::Config { max_d, orbit_max, seed, corrupt_formula };
            verify::run(&config, cli.format.unwrap_or(OutputFormat::Table))
        }
    }
}

fn pick_format(flag: Option<OutputFormat>, case: Option<OutputFormat>) -> OutputFormat {
    flag.or(case).unwrap_or(OutputFormat::Table)
}

fn load_case(path: &PathBuf) -> Result<CaseDescription, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    parse_case(&text).map_err(|e| Failure::input(e.to_string()))
}

fn load_unitary(path: &PathBuf) -> Result<UnitaryCase, Failure> {
    match load_case(path)? {
        CaseDescription::Unitary(case) => Ok(case),
        CaseDescription::Hilbert(_) => {
            Err(Failure::input("this subcommand needs a unitary case file"))
        }
    }
}

fn load_hilbert(path: &PathBuf) -> Result<HilbertCase, Failure> {
    match load_case(path)? {
        CaseDescription::Hilbert(case) => Ok(case),
        CaseDescription::Unitary(_) => {
            Err(Failure::input("this subcommand needs a hilbert case file"))
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct StrataRowOut {
    label: String,
    dim: usize,
    r_v: Vec<usize>,
    in_sigma: bool,
    bruhat_over_fol: bool,
}

fn cmd_strata(case: &UnitaryCase, format: OutputFormat, cap: u128) -> Result<(), Failure> {
    let report = scan_strata(&case.datum, &case.sigma, cap)
        .map_err(|e| Failure::cap(e.to_string()))?;
    let rows: Vec<StrataRowOut> = report
        .rows
        .iter()
        .map(|row| StrataRowOut {
            label: row.label.to_string(),
            dim: row.dim,
            r_v: row.r_v.clone(),
            in_sigma: row.in_sigma,
            bruhat_over_fol: row.bruhat_over_fol,
        })
        .collect();
    match format {
        OutputFormat::Json => {
            for row in &rows {
                println!("{}", render::json(row));
            }
        }
        OutputFormat::Csv | OutputFormat::Table => {
            let headers = ["label", "dim", "rV", "inSigma", "bruhatOverFol"];
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|row| {
                    vec![
                        row.label.clone(),
                        row.dim.to_string(),
                        render::join(&row.r_v, "|"),
                        row.in_sigma.to_string(),
                        row.bruhat_over_fol.to_string(),
                    ]
                })
                .collect();
            if format == OutputFormat::Csv {
                print!("{}", render::csv(&headers, &cells));
            } else {
                print!("{}", render::table(&headers, &cells));
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SlopeOut {
    slope: String,
    multiplicity: usize,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct CascadeOut {
    p: usize,
    q: usize,
    interval_mass: usize,
    kernel_rank: usize,
    pass: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct FoliationOut {
    dim_m: usize,
    rank: usize,
    corank: usize,
    dim_m_fol: usize,
    r_v_ord: Vec<usize>,
    /// Slope classes per orbit slot.
    slopes: Vec<Vec<SlopeOut>>,
    /// Cascade identity per pair, at the pair's normalized representative.
    cascade: Vec<CascadeOut>,
}

fn cmd_foliation(case: &UnitaryCase, format: OutputFormat) {
    let datum = &case.datum;
    let report = foliation_report(datum, &case.sigma);
    let slopes: Vec<Vec<SlopeOut>> = datum
        .slots()
        .iter()
        .map(|slot| {
            slope_decomposition(&slot.orbit, &slot.sig)
                .classes
                .iter()
                .map(|c| SlopeOut {
                    slope: c.slope.to_string(),
                    multiplicity: c.multiplicity,
                })
                .collect()
        })
        .collect();
    let cascade: Vec<CascadeOut> = (0..datum.pairs().len())
        .map(|k| {
            let c = cascade_for_pair(datum, k);
            CascadeOut {
                p: c.p,
                q: c.q,
                interval_mass: c.interval_mass,
                kernel_rank: c.kernel_rank,
                pass: c.pass,
            }
        })
        .collect();
    let out = FoliationOut {
        dim_m: report.dim_m,
        rank: report.rank,
        corank: report.corank,
        dim_m_fol: report.dim_m_fol,
        r_v_ord: report.r_v_ord.clone(),
        slopes,
        cascade,
    };
    match format {
        OutputFormat::Json => println!("{}", render::json(&out)),
        OutputFormat::Csv | OutputFormat::Table => {
            let mut rows = vec![
                ("dimM".to_string(), out.dim_m.to_string()),
                ("rank".to_string(), out.rank.to_string()),
                ("corank".to_string(), out.corank.to_string()),
                ("dimMFol".to_string(), out.dim_m_fol.to_string()),
                ("rVOrd".to_string(), render::join(&out.r_v_ord, "|")),
            ];
            for (i, slot) in out.slopes.iter().enumerate() {
                let cells: Vec<String> = slot
                    .iter()
                    .map(|c| format!("{}:{}", c.slope, c.multiplicity))
                    .collect();
                rows.push((format!("slopes.{i}"), cells.join("|")));
            }
            for (i, c) in out.cascade.iter().enumerate() {
                rows.push((
                    format!("cascade.{i}"),
                    format!(
                        "p={};q={};mass={};kernel={};pass={}",
                        c.p, c.q, c.interval_mass, c.kernel_rank, c.pass
                    ),
                ));
            }
            render::print_pairs(&rows, format);
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ObstructionOut {
    sigma: usize,
    tau: usize,
    weight: Vec<i64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct GoOut {
    dim: usize,
    rank: usize,
    equal: bool,
    quotient_degree_exp: usize,
    theta_degree_exps: Vec<usize>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct WeightOut {
    k: Vec<i64>,
    in_min: bool,
    in_std: bool,
    in_hasse: bool,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residue: Option<Vec<i64>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct IdemOut {
    kappa_degree: usize,
    orbit_pass: Vec<bool>,
    pass: bool,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct HilbertOut {
    p: u64,
    g: usize,
    orbit_sizes: Vec<usize>,
    sigma: Vec<usize>,
    p_closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    obstruction: Option<ObstructionOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    go: Option<GoOut>,
    weights: Vec<WeightOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    idempotents: Option<IdemOut>,
}

fn map_hilbert_error(e: HilbertError) -> Failure {
    match e {
        HilbertError::SearchCapExceeded { .. } => Failure::cap(e.to_string()),
        other => Failure::input(other.to_string()),
    }
}

fn cmd_hilbert(case: &HilbertCase, format: OutputFormat, cap: u64) -> Result<(), Failure> {
    let datum = &case.datum;
    let closed = is_p_closed(datum, &case.sigma);

    // when sigma is not Frobenius invariant, name the first witnessing
    // tangent direction and its obstruction weight
    let obstruction = if closed {
        None
    } else {
        case.sigma
            .iter()
            .find(|&&s| !case.sigma.contains(&datum.phi(s)))
            .map(|&s| {
                let tau = datum.phi(s);
                ObstructionOut {
                    sigma: s,
                    tau,
                    weight: obstruction_weight(datum, s, tau).k,
                }
            })
    };

    let go = if closed {
        let report = go_stratum_report(datum, &case.sigma).map_err(map_hilbert_error)?;
        Some(GoOut {
            dim: report.dim,
            rank: report.rank,
            equal: report.equal,
            quotient_degree_exp: report.quotient_degree_exp,
            theta_degree_exps: report.theta_degree_exps,
        })
    } else {
        None
    };

    let mut weights = Vec::with_capacity(case.weights.len());
    for k in &case.weights {
        let witness = weight_feasibility_capped(datum, k, cap).map_err(map_hilbert_error)?;
        let residue = match &witness {
            Some(w) => Some(feasibility_residue(datum, k, w).map_err(map_hilbert_error)?.k),
            None => None,
        };
        weights.push(WeightOut {
            k: k.k.clone(),
            in_min: cone_membership(datum, k, Cone::Minimal).map_err(map_hilbert_error)?,
            in_std: cone_membership(datum, k, Cone::Standard).map_err(map_hilbert_error)?,
            in_hasse: cone_membership(datum, k, Cone::Hasse).map_err(map_hilbert_error)?,
            feasible: witness.is_some(),
            witness,
            residue,
        });
    }

    let idempotents = match case.kappa_degree {
        Some(degree) => {
            let kappa = FiniteField::new(datum.p(), degree)
                .map_err(|e| Failure::input(e.to_string()))?;
            let report = idempotent_frobenius_check(datum, &kappa).map_err(map_hilbert_error)?;
            Some(IdemOut {
                kappa_degree: degree,
                orbit_pass: report.orbit_pass,
                pass: report.pass,
            })
        }
        None => None,
    };

    let out = HilbertOut {
        p: datum.p(),
        g: datum.g(),
        orbit_sizes: datum.orbit_sizes().to_vec(),
        sigma: case.sigma.clone(),
        p_closed: closed,
        obstruction,
        go,
        weights,
        idempotents,
    };

    match format {
        OutputFormat::Json => println!("{}", render::json(&out)),
        OutputFormat::Csv | OutputFormat::Table => {
            let mut rows = vec![
                ("p".to_string(), out.p.to_string()),
                ("g".to_string(), out.g.to_string()),
                ("orbitSizes".to_string(), render::join(&out.orbit_sizes, "|")),
                ("sigma".to_string(), render::join(&out.sigma, "|")),
                ("pClosed".to_string(), out.p_closed.to_string()),
            ];
            if let Some(ob) = &out.obstruction {
                rows.push((
                    "obstruction".to_string(),
                    format!(
                        "sigma={};tau={};weight={}",
                        ob.sigma,
                        ob.tau,
                        render::join(&ob.weight, "|")
                    ),
                ));
            }
            if let Some(go) = &out.go {
                rows.push(("goDim".to_string(), go.dim.to_string()));
                rows.push(("goRank".to_string(), go.rank.to_string()));
                rows.push(("goEqual".to_string(), go.equal.to_string()));
                rows.push((
                    "quotientDegreeExp".to_string(),
                    go.quotient_degree_exp.to_string(),
                ));
                rows.push((
                    "thetaDegreeExps".to_string(),
                    render::join(&go.theta_degree_exps, "|"),
                ));
            }
            for (i, w) in out.weights.iter().enumerate() {
                rows.push((format!("weight.{i}"), render::join(&w.k, "|")));
                rows.push((
                    format!("weight.{i}.cones"),
                    format!("min={};std={};hasse={}", w.in_min, w.in_std, w.in_hasse),
                ));
                let verdict = match &w.witness {
                    Some(a) => format!(
                        "witness={};residue={}",
                        render::join(a, "|"),
                        render::join(w.residue.as_ref().expect("residue with witness"), "|")
                    ),
                    None => "infeasible".to_string(),
                };
                rows.push((format!("weight.{i}.feasibility"), verdict));
            }
            if let Some(idem) = &out.idempotents {
                rows.push((
                    "idempotents".to_string(),
                    format!(
                        "kappaDegree={};orbits={};pass={}",
                        idem.kappa_degree,
                        render::join(&idem.orbit_pass, "|"),
                        idem.pass
                    ),
                ));
            }
            render::print_pairs(&rows, format);
        }
    }
    Ok(())
}
