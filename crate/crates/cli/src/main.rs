use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use genpoisson::dynamics::{build_system, convergence_study, evolve};
use genpoisson::gps::{compatibility_residual, lambda_normalization, snb_normalization, GeneralizedPoissonStructure};
use genpoisson::liealg::{build_cocycle, build_cocycle_permsum, catalog_load, invariant_symmetric_tensor, CocycleTensor};
use genpoisson::oracle;
use genpoisson::{exact, parse_polynomial, ExactScalar, PolyMultivector};

#[derive(Debug, Error)]
enum CliError {
    /// Bad input; exit status 2.
    #[error("{0}")]
    Usage(String),
    /// A computation reported a mathematical failure; exit status 1.
    #[error("{0}")]
    Failure(String),
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "genpoisson", version, about = "Build and certify generalized Poisson structures on simple Lie algebras")]
struct Cli {
    /// Omit the timing field from JSON output.
    #[arg(long, global = true)]
    no_timing: bool,
    /// Square-free radicand d of the scalar field Q(sqrt d).
    #[arg(long, global = true, default_value_t = 3)]
    radicand: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Structure {
    /// Catalog algebra: su2, su3, so3, so4, so5.
    #[arg(long)]
    algebra: String,
    /// Order of the invariant symmetric tensor.
    #[arg(long)]
    m: Option<usize>,
    /// Half the bracket arity (p = m - 1).
    #[arg(long)]
    p: Option<usize>,
}

impl Structure {
    fn order_m(&self) -> Result<usize, CliError> {
        match (self.m, self.p) {
            (Some(m), Some(p)) if m != p + 1 => Err(usage(format!("--m {m} and --p {p} disagree (need m = p + 1)"))),
            (Some(m), _) => Ok(m),
            (None, Some(p)) => Ok(p + 1),
            (None, None) => Ok(2),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the cocycle and structure, run both Jacobi certificates.
    Verify {
        #[command(flatten)]
        structure: Structure,
        /// Perturb ω at 1-based indices, e.g. `1,2,3,4,5=+1` (antisymmetric images follow).
        #[arg(long)]
        perturb: Vec<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the cocycle tensor as JSON.
    Cocycle {
        #[command(flatten)]
        structure: Structure,
        /// Use the permutation-sum construction.
        #[arg(long)]
        permsum: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the generalized bracket on 2p polynomials.
    Bracket {
        #[command(flatten)]
        structure: Structure,
        #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true)]
        args: Vec<String>,
    },
    /// Schouten-Nijenhuis bracket of two structures on one algebra.
    Compat {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        m1: usize,
        #[arg(long)]
        m2: usize,
        /// Perturbation applied to the second structure.
        #[arg(long)]
        perturb: Vec<String>,
    },
    /// Integrate the flow of 2p-1 Hamiltonians with RK4.
    Evolve {
        #[command(flatten)]
        structure: Structure,
        /// Comma-separated Hamiltonian polynomials.
        #[arg(long, allow_hyphen_values = true)]
        hamiltonians: String,
        /// Comma-separated initial coordinates (decimals or p/q).
        #[arg(long, allow_hyphen_values = true)]
        x0: String,
        #[arg(long)]
        dt: f64,
        #[arg(long)]
        steps: usize,
        /// Comma-separated extra monitor polynomials.
        #[arg(long, allow_hyphen_values = true)]
        monitors: Option<String>,
        /// Write the trajectory CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also run at dt/2 and dt/4 and report convergence ratios.
        #[arg(long)]
        refine: bool,
    },
    /// Matrix-representation oracles.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Decompose the signed sum of 24 products of four generators.
    FourCommutator {
        #[arg(long)]
        algebra: String,
        /// Four 1-based indices, e.g. `1,2,3,4`.
        #[arg(long)]
        indices: String,
    },
    /// Structure constants from commutators, as a tensor dump.
    StructureConstants {
        #[arg(long)]
        algebra: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("failure: {msg}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("GPS_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| usage(format!("GPS_THREADS must be a positive integer, got {v:?}")))?;
        if n == 0 {
            return Err(usage("GPS_THREADS must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)?;
    }
    Ok(())
}

fn check_radicand(radicand: u64, algebra: &str) -> Result<(), CliError> {
    if algebra == "su3" && radicand != 3 {
        return Err(usage("su3 data lives in Q(sqrt 3); --radicand must be 3"));
    }
    exact::set_radicand(radicand).map_err(usage)
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    configure_threads()?;
    let algebra = match &cli.command {
        Command::Verify { structure, .. }
        | Command::Cocycle { structure, .. }
        | Command::Bracket { structure, .. }
        | Command::Evolve { structure, .. } => structure.algebra.clone(),
        Command::Compat { algebra, .. } => algebra.clone(),
        Command::Oracle { which: OracleCommand::FourCommutator { algebra, .. } | OracleCommand::StructureConstants { algebra } } => {
            algebra.clone()
        }
    };
    check_radicand(cli.radicand, &algebra)?;
    let start = Instant::now();
    let timing = |mut v: Value| {
        if !cli.no_timing {
            v["timing"] = json!({ "elapsed_s": start.elapsed().as_secs_f64() });
        }
        v
    };
    match &cli.command {
        Command::Verify { structure, perturb, out } => {
            let (cert, ok) = verify(structure, perturb)?;
            emit(&timing(cert), out.as_ref())?;
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Cocycle { structure, permsum, out } => {
            let m = structure.order_m()?;
            let g = catalog_load(&structure.algebra).map_err(usage)?;
            let k = invariant_symmetric_tensor(&g, m).map_err(usage)?;
            let w = if *permsum { build_cocycle_permsum(&g, &k) } else { build_cocycle(&g, &k) }
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let body = serde_json::to_value(w.omega.to_dump()).expect("dump serializes");
            emit(&body, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bracket { structure, args } => {
            let s = build_structure(structure, &[])?;
            let dim = s.dim();
            let fs = args.iter().map(|a| parse_polynomial(dim, a).map_err(usage)).collect::<Result<Vec<_>, _>>()?;
            let v = s.gpb_eval(&fs).map_err(usage)?;
            println!("{v}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Compat { algebra, m1, m2, perturb } => {
            let a = Structure { algebra: algebra.clone(), m: Some(*m1), p: None };
            let b = Structure { algebra: algebra.clone(), m: Some(*m2), p: None };
            let s1 = build_structure(&a, &[])?;
            let s2 = build_structure(&b, perturb)?;
            let r = compatibility_residual(&s1, &s2).map_err(usage)?;
            let body = json!({
                "algebra": algebra,
                "m1": m1,
                "m2": m2,
                "bracket_order": r.order(),
                "residual_terms": r.len(),
                "compatible": r.is_zero(),
            });
            emit(&timing(body), None)?;
            Ok(if r.is_zero() { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Evolve { structure, hamiltonians, x0, dt, steps, monitors, csv, refine } => {
            let body = run_evolve(structure, hamiltonians, x0, *dt, *steps, monitors.as_deref(), csv.as_ref(), *refine)?;
            emit(&timing(body), None)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { which } => {
            let body = match which {
                OracleCommand::FourCommutator { algebra, indices } => {
                    let rep = oracle::load_rep(algebra).map_err(usage)?;
                    let idx = parse_indices(indices, rep.dim())?;
                    let idx: [usize; 4] =
                        idx.try_into().map_err(|v: Vec<usize>| usage(format!("need exactly 4 indices, got {}", v.len())))?;
                    let fc = oracle::four_commutator(&rep, idx).map_err(usage)?;
                    json!({
                        "algebra": algebra,
                        "indices": idx.iter().map(|i| i + 1).collect::<Vec<_>>(),
                        "components": fc.components,
                        "offspan_nonzero": fc.offspan_nonzero,
                        "in_algebra": fc.in_algebra(),
                    })
                }
                OracleCommand::StructureConstants { algebra } => {
                    let rep = oracle::load_rep(algebra).map_err(usage)?;
                    let c = oracle::structure_constants_from_rep(&rep).map_err(|e| CliError::Failure(e.to_string()))?;
                    serde_json::to_value(c.to_dump()).expect("dump serializes")
                }
            };
            emit(&body, None)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn emit(v: &Value, out: Option<&PathBuf>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("json value serializes");
    match out {
        Some(path) => std::fs::write(path, text + "\n").map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn parse_indices(src: &str, dim: usize) -> Result<Vec<usize>, CliError> {
    src.split(',')
        .map(|t| {
            let i: usize = t.trim().parse().map_err(|_| usage(format!("bad index {t:?}")))?;
            if i == 0 || i > dim {
                return Err(usage(format!("index {i} outside 1..{dim}")));
            }
            Ok(i - 1)
        })
        .collect()
}

/// `i1,…,in=delta` with 1-based indices and a rational delta.
fn parse_perturbation(src: &str, dim: usize) -> Result<(Vec<usize>, ExactScalar), CliError> {
    let (idx, delta) = src.split_once('=').ok_or_else(|| usage(format!("perturbation {src:?} needs the form i1,..,in=delta")))?;
    let idx = parse_indices(idx, dim)?;
    let delta = delta.trim();
    let delta: ExactScalar = delta.strip_prefix('+').unwrap_or(delta).parse().map_err(usage)?;
    Ok((idx, delta))
}

fn perturb_cocycle(mut w: CocycleTensor, perturb: &[String]) -> Result<CocycleTensor, CliError> {
    let dim = w.omega.dim();
    for p in perturb {
        let (idx, delta) = parse_perturbation(p, dim)?;
        if idx.len() != w.order {
            return Err(usage(format!("perturbation needs {} indices, got {}", w.order, idx.len())));
        }
        w = w.perturbed(&idx, &delta).map_err(usage)?;
    }
    Ok(w)
}

fn build_cocycle_for(structure: &Structure) -> Result<(CocycleTensor, Value), CliError> {
    let m = structure.order_m()?;
    let g = catalog_load(&structure.algebra).map_err(usage)?;
    let k = invariant_symmetric_tensor(&g, m).map_err(usage)?;
    let w = build_cocycle(&g, &k).map_err(|e| CliError::Failure(e.to_string()))?;
    let p = m - 1;
    let mut norm = json!({
        "invariant_reference": k.reference,
        "invariant_over_reference": k.normalization,
        "cocycle_alternation": w.normalization,
        "lambda": lambda_normalization(p),
        "snb_over_residual": snb_normalization(p),
    });
    if structure.algebra == "su3" && m == 3 {
        // ½ ε d C C = ½ · 3! / (k over d) × ω
        let edcc = ExactScalar::from_int(3) * k.normalization.inv().expect("nonzero");
        norm["half_epsilon_dcc_over_cocycle"] = serde_json::to_value(edcc).expect("scalar serializes");
    }
    Ok((w, norm))
}

fn build_structure(structure: &Structure, perturb: &[String]) -> Result<GeneralizedPoissonStructure, CliError> {
    let (w, _) = build_cocycle_for(structure)?;
    let w = perturb_cocycle(w, perturb)?;
    GeneralizedPoissonStructure::from_cocycle_unverified(w).map_err(usage)
}

#[derive(Serialize)]
struct Certificate<'a> {
    algebra: &'a str,
    m: usize,
    p: usize,
    order: usize,
    dim: usize,
    perturbations: &'a [String],
    antisymmetric: bool,
    residual_nonzero_count: usize,
    snb_nonzero_count: usize,
    term_groups: usize,
    certificates_agree: bool,
    verified: bool,
    normalization: Value,
}

fn verify(structure: &Structure, perturb: &[String]) -> Result<(Value, bool), CliError> {
    let m = structure.order_m()?;
    let (w, normalization) = build_cocycle_for(structure)?;
    let w = perturb_cocycle(w, perturb)?;
    let antisymmetric = w.omega.is_fully_antisymmetric();
    let s = GeneralizedPoissonStructure::from_cocycle_unverified(w).map_err(usage)?;
    let (cert, _, _) = s.certify().map_err(usage)?;
    let body = Certificate {
        algebra: &structure.algebra,
        m,
        p: s.p,
        order: 2 * s.p + 1,
        dim: s.dim(),
        perturbations: perturb,
        antisymmetric,
        residual_nonzero_count: cert.residual_nonzero_count,
        snb_nonzero_count: cert.snb_nonzero_count,
        term_groups: cert.term_groups,
        certificates_agree: cert.certificates_agree,
        verified: cert.verified,
        normalization,
    };
    let ok = cert.verified && antisymmetric;
    Ok((serde_json::to_value(body).expect("certificate serializes"), ok))
}

fn parse_number(src: &str) -> Result<f64, CliError> {
    let t = src.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: f64 = n.trim().parse().map_err(|_| usage(format!("bad number {t:?}")))?;
        let d: f64 = d.trim().parse().map_err(|_| usage(format!("bad number {t:?}")))?;
        if d == 0.0 {
            return Err(usage(format!("zero denominator in {t:?}")));
        }
        return Ok(n / d);
    }
    t.parse().map_err(|_| usage(format!("bad number {t:?}")))
}

fn parse_poly_list(dim: usize, src: &str) -> Result<Vec<PolyMultivector>, CliError> {
    src.split(',').filter(|s| !s.trim().is_empty()).map(|s| parse_polynomial(dim, s).map_err(usage)).collect()
}

#[allow(clippy::too_many_arguments)]
fn run_evolve(
    structure: &Structure,
    hamiltonians: &str,
    x0: &str,
    dt: f64,
    steps: usize,
    monitors: Option<&str>,
    csv: Option<&PathBuf>,
    refine: bool,
) -> Result<Value, CliError> {
    let s = build_structure(structure, &[])?;
    let dim = s.dim();
    let hs = parse_poly_list(dim, hamiltonians)?;
    let x0: Vec<f64> = x0.split(',').map(parse_number).collect::<Result<_, _>>()?;
    let mons: Vec<(String, PolyMultivector)> = match monitors {
        Some(src) => src
            .split(',')
            .filter(|m| !m.trim().is_empty())
            .enumerate()
            .map(|(i, m)| Ok((format!("M{}", i + 1), parse_polynomial(dim, m).map_err(usage)?)))
            .collect::<Result<_, CliError>>()?,
        None => Vec::new(),
    };
    let sys = build_system(&s, &hs).map_err(usage)?;
    let traj = evolve(&sys, &x0, dt, steps, &mons).map_err(|e| match e {
        genpoisson::DynamicsError::NonFinite { .. } => CliError::Failure(e.to_string()),
        other => usage(other),
    })?;
    if let Some(path) = csv {
        std::fs::write(path, traj.to_csv()).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
    }
    let drifts: serde_json::Map<String, Value> = traj
        .monitors
        .iter()
        .map(|m| (m.label.clone(), json!({ "max_abs_drift": m.max_abs_drift(), "max_rel_drift": m.max_rel_drift() })))
        .collect();
    let mut body = json!({
        "algebra": structure.algebra,
        "p": s.p,
        "dt": dt,
        "steps": steps,
        "trivial_field": sys.is_trivial(),
        "vector_field": sys.vector_field.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        "monitors": mons.iter().map(|(l, m)| json!({ "label": l, "polynomial": m.to_string() })).collect::<Vec<_>>(),
        "max_drift": drifts,
        "final_state": traj.final_state(),
    });
    if refine {
        let rep = convergence_study(&sys, &x0, dt, steps, &mons).map_err(|e| CliError::Failure(e.to_string()))?;
        body["convergence"] = serde_json::to_value(rep).expect("report serializes");
    }
    Ok(body)
}
