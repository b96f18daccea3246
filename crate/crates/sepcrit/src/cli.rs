//! Command-line frontend.
//!
//! Subcommands: `gen-meas` (construct and serialize a measurement
//! family), `validate-meas` (residual report for a family file),
//! `certify` (run one criterion on a state, with optional
//! coarse-graining to a fixed partition), `scan` (noise-robustness
//! curve with CSV output and a bisected detection threshold), and
//! `gen-state` (benchmark state files).
//!
//! Exit codes are a stable contract: 0 = not detected / validation
//! pass, 1 = validation failure, 2 = usage or parse error,
//! 3 = ENTANGLED (distinct so shell pipelines can branch).

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use crate::criteria::{
    evaluate_thm1, evaluate_thm2, evaluate_thm3, BoundMode, Criterion, CriterionReport,
    SearchPolicy, Verdict,
};
use crate::measurements::{
    build_gsic, build_mub_prime, build_mum_with_root, gell_mann_basis, gsic_max_t,
    mum_max_t_with_root, validate_family, GsicSet, MeasurementFamily, MubSet, MumSet, SimplexRoot,
};
use crate::partitions::{coarse_grain, KPartition};
use crate::schema::Document;
use crate::states;
use crate::tensor::{CMatrix, DensityMatrix, Shape};
use crate::tol;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_ENTANGLED: i32 = 3;

#[derive(Parser)]
#[command(
    name = "sepcrit",
    version,
    about = "Detect multipartite entanglement via MUB/MUM/GSIC separability criteria"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a measurement family and write it to a JSON file
    GenMeas(GenMeasArgs),
    /// Validate a measurement family file against its defining equalities
    ValidateMeas {
        /// Family file to check
        file: PathBuf,
    },
    /// Evaluate one separability criterion on a state
    Certify(CertifyArgs),
    /// Sweep the noise weight p and locate the detection threshold
    Scan(ScanArgs),
    /// Generate a benchmark state file
    GenState(GenStateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasKind {
    Mub,
    Mum,
    Gsic,
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Thm1,
    Thm2,
    Thm3,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Criterion {
        match c {
            CriterionArg::Thm1 => Criterion::Thm1,
            CriterionArg::Thm2 => Criterion::Thm2,
            CriterionArg::Thm3 => Criterion::Thm3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Proof,
    Statement,
}

impl From<ModeArg> for BoundMode {
    fn from(m: ModeArg) -> BoundMode {
        match m {
            ModeArg::Proof => BoundMode::Proof,
            ModeArg::Statement => BoundMode::Statement,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Exhaustive,
    Greedy,
    Identity,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateFamily {
    Ghz,
    W,
    Bell,
    Isotropic,
    RandomSeparable,
}

#[derive(Args)]
struct GenMeasArgs {
    /// Family kind
    #[arg(long = "type", value_enum)]
    kind: MeasKind,
    /// Local dimension d
    #[arg(long)]
    dim: usize,
    /// Number of bases/groups (MUB/MUM; default d+1)
    #[arg(long)]
    count: Option<usize>,
    /// Simplex scale t (MUM/GSIC)
    #[arg(long, allow_hyphen_values = true)]
    t: Option<f64>,
    /// Use t = f · max_t instead of an explicit t (default 0.9)
    #[arg(long = "t-frac", conflicts_with = "t")]
    t_frac: Option<f64>,
    /// Emit the complex-conjugate (transposed) family
    #[arg(long)]
    conjugate: bool,
    /// Use the alternative simplex sign root (MUM only)
    #[arg(long = "alt-root")]
    alt_root: bool,
    /// Output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StateSource {
    /// Read the state from a JSON file
    #[arg(long, conflicts_with = "family")]
    state: Option<PathBuf>,
    /// Generate a named benchmark state instead
    #[arg(long, value_enum)]
    family: Option<StateFamily>,
    /// Subsystem dimensions, comma-separated (e.g. 2,2)
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Mixing weight for isotropic / white-noise families
    #[arg(long)]
    p: Option<f64>,
    /// Ensemble terms for random-separable
    #[arg(long)]
    terms: Option<usize>,
    /// RNG seed for random-separable
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    source: StateSource,
    /// Which criterion to run
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    /// One measurement file per (coarse-grained) subsystem
    #[arg(long, num_args = 1.., required = true)]
    meas: Vec<PathBuf>,
    /// RHS bound mode
    #[arg(long, value_enum, default_value = "proof")]
    mode: ModeArg,
    /// Selection search policy
    #[arg(long, value_enum, default_value = "exhaustive")]
    search: SearchArg,
    /// Candidate cap for the exhaustive search
    #[arg(long)]
    cap: Option<u64>,
    /// Coarse-grain to this partition first, e.g. "1,2|3,4"
    #[arg(long)]
    partition: Option<String>,
    /// Use the |·| variant of the Theorem 3 sum
    #[arg(long)]
    abs: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// Benchmark family to sweep
    #[arg(long, value_enum)]
    family: StateFamily,
    /// Subsystem dimensions, comma-separated
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    /// Which criterion to run
    #[arg(long, value_enum)]
    criterion: CriterionArg,
    /// One measurement file per (coarse-grained) subsystem
    #[arg(long, num_args = 1.., required = true)]
    meas: Vec<PathBuf>,
    #[arg(long = "p-from")]
    p_from: f64,
    #[arg(long = "p-to")]
    p_to: f64,
    /// Number of grid points
    #[arg(long)]
    steps: usize,
    /// CSV output file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "proof")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "exhaustive")]
    search: SearchArg,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    partition: Option<String>,
    #[arg(long)]
    abs: bool,
}

#[derive(Args)]
struct GenStateArgs {
    #[arg(long, value_enum)]
    family: StateFamily,
    #[arg(long, value_delimiter = ',', required = true)]
    dims: Vec<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
}

/// Parse and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::GenMeas(args) => gen_meas(args),
        Command::ValidateMeas { file } => validate_meas(&file),
        Command::Certify(args) => certify(args),
        Command::Scan(args) => scan(args),
        Command::GenState(args) => gen_state(args),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn read_file(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn family_min_eigenvalue(fam: &MeasurementFamily) -> f64 {
    let ops: Vec<&CMatrix> = match fam {
        MeasurementFamily::Mub(_) => return 0.0, // projectors by construction
        MeasurementFamily::Mum(m) => m.groups().iter().flatten().collect(),
        MeasurementFamily::Gsic(g) => g.ops().iter().collect(),
    };
    ops.iter()
        .map(|p| {
            p.hermitian_eigenvalues()
                .map(|e| e[0])
                .unwrap_or(f64::NEG_INFINITY)
        })
        .fold(f64::INFINITY, f64::min)
}

fn gen_meas(args: GenMeasArgs) -> Result<i32, String> {
    let d = args.dim;
    let root = if args.alt_root {
        SimplexRoot::Minus
    } else {
        SimplexRoot::Plus
    };
    if args.alt_root && !matches!(args.kind, MeasKind::Mum) {
        return Err("--alt-root applies to the MUM construction only".into());
    }
    let (family, t_used) = match args.kind {
        MeasKind::Mub => {
            if args.t.is_some() || args.t_frac.is_some() {
                return Err("--t/--t-frac do not apply to MUBs".into());
            }
            let mub = build_mub_prime(d).map_err(|e| e.to_string())?;
            if let Some(count) = args.count {
                if count > mub.count() {
                    return Err(format!(
                        "--count {count} exceeds the complete set ({})",
                        mub.count()
                    ));
                }
                let bases = mub.bases()[..count].to_vec();
                (MeasurementFamily::Mub(MubSet::new(d, bases)), None)
            } else {
                (MeasurementFamily::Mub(mub), None)
            }
        }
        MeasKind::Mum => {
            let basis = gell_mann_basis(d).map_err(|e| e.to_string())?;
            let count = args.count.unwrap_or(d + 1);
            let tmax = mum_max_t_with_root(d, &basis, root).map_err(|e| e.to_string())?;
            let t = match args.t {
                Some(t) => t,
                None => args.t_frac.unwrap_or(0.9) * tmax,
            };
            let mum = build_mum_with_root(d, count, t, &basis, root).map_err(|e| e.to_string())?;
            (MeasurementFamily::Mum(mum), Some(t))
        }
        MeasKind::Gsic => {
            if args.count.is_some() {
                return Err("--count does not apply to GSIC-POVMs (always d²)".into());
            }
            let basis = gell_mann_basis(d).map_err(|e| e.to_string())?;
            let tmax = gsic_max_t(d, &basis).map_err(|e| e.to_string())?;
            let t = match args.t {
                Some(t) => t,
                None => args.t_frac.unwrap_or(0.9) * tmax,
            };
            let gsic = build_gsic(d, t, &basis).map_err(|e| e.to_string())?;
            (MeasurementFamily::Gsic(gsic), Some(t))
        }
    };
    let family = if args.conjugate {
        family.conjugated()
    } else {
        family
    };
    match &family {
        MeasurementFamily::Mub(m) => println!("bases = {}", m.count()),
        MeasurementFamily::Mum(m) => {
            println!("kappa = {:.12}", m.kappa());
            println!("positivity margin = {:.3e}", family_min_eigenvalue(&family));
        }
        MeasurementFamily::Gsic(g) => {
            println!("a = {:.12}", g.a());
            println!("positivity margin = {:.3e}", family_min_eigenvalue(&family));
        }
    }
    write_file(&args.out, &Document::from_family(&family, t_used).to_json())?;
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}

fn validate_meas(file: &Path) -> Result<i32, String> {
    let text = read_file(file)?;
    let doc = Document::from_json(&text).map_err(|e| e.to_string())?;
    let family = doc.to_family().map_err(|e| e.to_string())?;
    let report = validate_family(&family);
    print!("{report}");
    if report.passes(tol::FAMILY_RESIDUAL) {
        println!("PASS (max residual {:.3e})", report.max_residual());
        Ok(EXIT_OK)
    } else {
        println!("FAIL (max residual {:.3e})", report.max_residual());
        Ok(EXIT_VALIDATION_FAILED)
    }
}

fn build_named_state(
    family: StateFamily,
    dims: &[usize],
    p: Option<f64>,
    terms: Option<usize>,
    seed: Option<u64>,
) -> Result<DensityMatrix, String> {
    let check_dims = |want: &dyn Fn(&[usize]) -> bool, msg: &str| -> Result<(), String> {
        if want(dims) {
            Ok(())
        } else {
            Err(format!("--dims {dims:?} invalid: {msg}"))
        }
    };
    match family {
        StateFamily::Bell => {
            check_dims(&|d| d == [2, 2], "bell needs dims 2,2")?;
            Ok(states::bell())
        }
        StateFamily::Ghz => {
            check_dims(
                &|d| d.len() >= 2 && d.iter().all(|&x| x == d[0] && x >= 2),
                "ghz needs n ≥ 2 equal dimensions",
            )?;
            Ok(states::ghz(dims.len(), dims[0]))
        }
        StateFamily::W => {
            check_dims(
                &|d| d.len() >= 2 && d.iter().all(|&x| x == 2),
                "w needs n ≥ 2 qubits",
            )?;
            Ok(states::w_state(dims.len()))
        }
        StateFamily::Isotropic => {
            check_dims(
                &|d| d.len() == 2 && d[0] == d[1] && d[0] >= 2,
                "isotropic needs dims d,d",
            )?;
            states::isotropic(dims[0], p.unwrap_or(1.0)).map_err(|e| e.to_string())
        }
        StateFamily::RandomSeparable => {
            let shape = Shape::new(dims.to_vec()).map_err(|e| e.to_string())?;
            let (rho, _) = states::random_separable(&shape, terms.unwrap_or(4), seed.unwrap_or(0))
                .map_err(|e| e.to_string())?;
            Ok(rho)
        }
    }
}

fn load_state(source: &StateSource) -> Result<DensityMatrix, String> {
    match (&source.state, source.family) {
        (Some(path), None) => {
            let text = read_file(path)?;
            let doc = Document::from_json(&text).map_err(|e| e.to_string())?;
            doc.to_state().map_err(|e| e.to_string())
        }
        (None, Some(family)) => {
            let dims = source
                .dims
                .clone()
                .ok_or_else(|| "--family needs --dims".to_string())?;
            build_named_state(family, &dims, source.p, source.terms, source.seed)
        }
        (None, None) => Err("provide --state FILE or --family NAME".into()),
        (Some(_), Some(_)) => Err("--state and --family are mutually exclusive".into()),
    }
}

enum FamilySet {
    Mubs(Vec<MubSet>),
    Mums(Vec<MumSet>),
    Gsics(Vec<GsicSet>),
}

fn load_families(paths: &[PathBuf], criterion: Criterion) -> Result<FamilySet, String> {
    let mut fams = Vec::new();
    for path in paths {
        let text = read_file(path)?;
        let doc = Document::from_json(&text).map_err(|e| e.to_string())?;
        let fam = doc.to_family().map_err(|e| e.to_string())?;
        let report = validate_family(&fam);
        if !report.passes(tol::FAMILY_RESIDUAL) {
            return Err(format!(
                "{}: family fails validation (max residual {:.3e}); run validate-meas",
                path.display(),
                report.max_residual()
            ));
        }
        fams.push(fam);
    }
    let kinds_ok = |expected: &str| fams.iter().all(|f| f.kind() == expected);
    match criterion {
        Criterion::Thm1 => {
            if !kinds_ok("mub") {
                return Err("thm1 needs MUB files for every subsystem".into());
            }
            Ok(FamilySet::Mubs(
                fams.into_iter()
                    .map(|f| match f {
                        MeasurementFamily::Mub(m) => m,
                        _ => unreachable!(),
                    })
                    .collect(),
            ))
        }
        Criterion::Thm2 => {
            if !kinds_ok("mum") {
                return Err("thm2 needs MUM files for every subsystem".into());
            }
            Ok(FamilySet::Mums(
                fams.into_iter()
                    .map(|f| match f {
                        MeasurementFamily::Mum(m) => m,
                        _ => unreachable!(),
                    })
                    .collect(),
            ))
        }
        Criterion::Thm3 => {
            if !kinds_ok("gsic") {
                return Err("thm3 needs GSIC files for every subsystem".into());
            }
            Ok(FamilySet::Gsics(
                fams.into_iter()
                    .map(|f| match f {
                        MeasurementFamily::Gsic(g) => g,
                        _ => unreachable!(),
                    })
                    .collect(),
            ))
        }
    }
}

fn search_policy(search: SearchArg, cap: Option<u64>) -> SearchPolicy {
    match search {
        SearchArg::Exhaustive => SearchPolicy::Exhaustive {
            cap: cap.unwrap_or(tol::SELECTION_CAP),
        },
        SearchArg::Greedy => SearchPolicy::Greedy,
        SearchArg::Identity => SearchPolicy::Identity,
    }
}

fn apply_partition(
    rho: DensityMatrix,
    partition: &Option<String>,
) -> Result<DensityMatrix, String> {
    match partition {
        None => Ok(rho),
        Some(spec) => {
            let part = KPartition::parse(spec, rho.shape().len()).map_err(|e| e.to_string())?;
            coarse_grain(&rho, &part).map_err(|e| e.to_string())
        }
    }
}

fn evaluate(
    rho: &DensityMatrix,
    families: &FamilySet,
    policy: SearchPolicy,
    mode: BoundMode,
    abs_variant: bool,
) -> Result<CriterionReport, String> {
    match families {
        FamilySet::Mubs(mubs) => evaluate_thm1(rho, mubs, policy, mode).map_err(|e| e.to_string()),
        FamilySet::Mums(mums) => evaluate_thm2(rho, mums, policy, mode).map_err(|e| e.to_string()),
        FamilySet::Gsics(gsics) => {
            evaluate_thm3(rho, gsics, policy, mode, abs_variant).map_err(|e| e.to_string())
        }
    }
}

fn certify(args: CertifyArgs) -> Result<i32, String> {
    let rho = load_state(&args.source)?;
    let rho = apply_partition(rho, &args.partition)?;
    let families = load_families(&args.meas, args.criterion.into())?;
    let policy = search_policy(args.search, args.cap);
    let report = evaluate(&rho, &families, policy, args.mode.into(), args.abs)?;
    println!("{report}");
    Ok(match report.verdict {
        Verdict::Entangled => EXIT_ENTANGLED,
        Verdict::NotDetected => EXIT_OK,
    })
}

/// Bisect the verdict boundary between a non-detected `lo` and a
/// detected `hi` until the bracket is narrower than `tol_p`.
pub fn locate_threshold(
    mut margin_at: impl FnMut(f64) -> Result<f64, String>,
    mut lo: f64,
    mut hi: f64,
    tol_p: f64,
) -> Result<f64, String> {
    while hi - lo > tol_p {
        let mid = 0.5 * (lo + hi);
        if margin_at(mid)? > tol::MARGIN_THRESHOLD {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A margin column fails monotonicity when any step decreases by more
/// than the verdict threshold.
pub fn is_non_monotone(margins: &[f64]) -> bool {
    margins
        .windows(2)
        .any(|w| w[1] < w[0] - tol::MARGIN_THRESHOLD)
}

fn scan(args: ScanArgs) -> Result<i32, String> {
    if !(0.0..=1.0).contains(&args.p_from)
        || !(0.0..=1.0).contains(&args.p_to)
        || args.p_from > args.p_to
    {
        return Err("need 0 ≤ p-from ≤ p-to ≤ 1".into());
    }
    if args.steps == 0 {
        return Err("--steps must be at least 1".into());
    }
    if matches!(args.family, StateFamily::RandomSeparable) {
        return Err("scan needs a p-parameterized family (ghz, w, bell, isotropic)".into());
    }
    let families = load_families(&args.meas, args.criterion.into())?;
    let policy = search_policy(args.search, args.cap);
    let mode: BoundMode = args.mode.into();

    let state_at = |p: f64| -> Result<DensityMatrix, String> {
        let rho = match args.family {
            StateFamily::Isotropic => {
                build_named_state(args.family, &args.dims, Some(p), None, None)?
            }
            _ => {
                let pure = build_named_state(args.family, &args.dims, None, None, None)?;
                states::add_white_noise(&pure, p).map_err(|e| e.to_string())?
            }
        };
        apply_partition(rho, &args.partition)
    };
    let report_at = |p: f64| -> Result<CriterionReport, String> {
        evaluate(&state_at(p)?, &families, policy, mode, args.abs)
    };

    let points: Vec<f64> = if args.steps == 1 || args.p_from == args.p_to {
        vec![args.p_from]
    } else {
        (0..args.steps)
            .map(|i| args.p_from + (args.p_to - args.p_from) * i as f64 / (args.steps - 1) as f64)
            .collect()
    };

    let mut csv = String::from("p,lhs,rhs,margin,verdict\n");
    let mut margins = Vec::with_capacity(points.len());
    let mut verdicts = Vec::with_capacity(points.len());
    for &p in &points {
        let report = report_at(p)?;
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p, report.lhs, report.rhs, report.margin, report.verdict
        ));
        margins.push(report.margin);
        verdicts.push(report.verdict);
    }
    write_file(&args.out, &csv)?;
    println!("wrote {}", args.out.display());

    if is_non_monotone(&margins) {
        println!(
            "warning: margin column is not monotone in p; threshold bisection may be unreliable"
        );
    }
    let first_detected = verdicts.iter().position(|&v| v == Verdict::Entangled);
    match first_detected {
        None => println!("no detection threshold in range"),
        Some(0) => println!(
            "threshold p* <= {} (detected at the first grid point)",
            points[0]
        ),
        Some(i) => {
            let p_star = locate_threshold(
                |p| report_at(p).map(|r| r.margin),
                points[i - 1],
                points[i],
                1e-4,
            )?;
            println!("threshold p* = {p_star:.4}");
        }
    }
    Ok(EXIT_OK)
}

fn gen_state(args: GenStateArgs) -> Result<i32, String> {
    let rho = build_named_state(args.family, &args.dims, args.p, args.terms, args.seed)?;
    write_file(&args.out, &Document::from_state(&rho).to_json())?;
    println!(
        "wrote {} ({} x {})",
        args.out.display(),
        rho.dim(),
        rho.dim()
    );
    Ok(EXIT_OK)
}
