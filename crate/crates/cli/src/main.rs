mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hslab::domains::{
    build_graph_domain, sample, Curve, FunctionSpec, GraphKind, GraphParams, Grid2D, Interval, Region, SampledFunction,
};
use hslab::experiments::{
    anisotropic_multiplier_check, compare_golden, emit_report, load_config, load_report, musina_nazarov_check,
    operator_norm_sweep, run_study, sharpness, sharpness_study, sign_changing_family, StudyConfig, StudyReport,
    SweepConfig, Tolerances,
};
use hslab::extension::{extend_e, hestenes_reflect, zero_extend, ExtensionModel, ExtensionSummary};
use hslab::hardy::{
    counterexample_scaling, f_kernel_k_grid, f_kernel_profile, hardy_halfline_check, interval_hardy_check,
    InequalityReport, IntervalMode,
};
use hslab::nemytskii::{apply, sign_decompose, NemytskiiOp, SignDecomposition};
use hslab::norms::{fourier_gagliardo_sq, gagliardo_sq, sobolev_norm, whole_space_gagliardo_sq, SeminormResult, SmoothnessIndex};

use inputs::{alpha_value, gamma_value, parse_list, parse_schedules, resolve_function, smoothness_value, DomainArg};
use output::{sig, sig_opt, Format, Sink};

#[derive(Parser, Debug)]
#[command(name = "hslab", version, about = "Fractional Sobolev norms, Nemytskii operators, Hardy inequalities and extensions")]
struct Cli {
    /// Directory for JSON/CSV outputs.
    #[arg(long, global = true, env = "HSLAB_OUT_DIR", default_value = "hslab-out")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Worker threads for the compute kernels.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    /// Seed for seeded function families.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FunctionArgs {
    /// Named test function.
    #[arg(long = "fn", default_value = "random-trig")]
    function: String,
    /// Full function spec as JSON, e.g. '{"family":"sine","params":{...}}'.
    #[arg(long)]
    spec: Option<String>,
    /// 'a,b', 'square:a,b' or 'disk'.
    #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
    domain: DomainArg,
    /// Cells per axis.
    #[arg(long, default_value_t = 1024)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Gagliardo seminorm or H^s norm of a sampled function.
    Seminorm {
        #[command(flatten)]
        f: FunctionArgs,
        /// Seminorm order, in (0, 1).
        #[arg(long, value_parser = gamma_value, conflicts_with = "s")]
        gamma: Option<f64>,
        /// Full H^s norm instead, s in [0, 1.5).
        #[arg(long, value_parser = smoothness_value)]
        s: Option<f64>,
        /// Add the exterior contribution of the zero extension.
        #[arg(long, requires = "gamma")]
        whole_space: bool,
        /// Fourier-side estimate of the whole-space seminorm.
        #[arg(long, requires = "gamma", conflicts_with = "whole_space")]
        fourier: bool,
    },
    /// Norm ratio ||T u|| / ||u|| and the sign decomposition of u.
    Nemytskii {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long, default_value = "t1")]
        op: NemytskiiOp,
        #[arg(long, default_value_t = 0.5, value_parser = smoothness_value)]
        s: f64,
    },
    /// Hardy-type inequalities.
    Hardy {
        #[command(subcommand)]
        check: HardyCheck,
    },
    /// Extension operators.
    Extend {
        #[arg(long, value_enum, default_value = "disk")]
        model: ModelArg,
        #[arg(long = "fn", default_value = "random-trig")]
        function: String,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 0.25)]
        s: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
    },
    /// Operator-norm sweep over a seeded family.
    Sweep {
        /// Sweep config JSON; overrides the other sweep flags.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "t2")]
        op: NemytskiiOp,
        #[arg(long, default_value = "1.25")]
        s: String,
        #[arg(long, default_value = "256,512,1024")]
        n: String,
        #[arg(long, default_value_t = 5)]
        seeds: u64,
        #[arg(long, default_value = "0,1", allow_hyphen_values = true)]
        domain: DomainArg,
        #[arg(long, default_value_t = hslab::experiments::sweep::DEFAULT_DRIFT_TOL)]
        drift_tol: f64,
    },
    /// Refinement study of ||phi||_{H^s} and |||phi|||_{H^s} towards s = 3/2.
    Sharpness {
        #[arg(long, default_value = "1.25,1.4,1.45,1.5")]
        s: String,
        /// Refinement schedules 'NxL': L levels starting at N cells.
        #[arg(long, default_value = "256x5,192x5")]
        schedule: String,
    },
    /// Strict gap of the fractional quadratic form under u -> |u|, and the
    /// frequency multiplier bound.
    MnCheck {
        #[arg(long, default_value = "1.1,1.25,1.4")]
        s: String,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = hslab::experiments::spectral::MN_GRID)]
        n: usize,
        /// Side of the frequency box for the multiplier check; 0 skips it.
        #[arg(long = "box", default_value_t = 512)]
        frequency_box: usize,
    },
    /// Run a study config and emit report.json, report.csv and summary.txt.
    Report {
        /// Study config JSON; without one the report is empty.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Compare against a previously emitted report.json.
        #[arg(long)]
        golden: Option<PathBuf>,
        /// Default relative tolerance of the golden comparison.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

#[derive(Subcommand, Debug)]
enum HardyCheck {
    /// Kernel F(k) over the standard k grid.
    Kernel {
        #[arg(long, default_value_t = 0.5, value_parser = alpha_value)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
    },
    /// Plateau family scaling of the Gagliardo and Hardy columns.
    Scaling {
        #[arg(long, default_value_t = 0.5, value_parser = alpha_value)]
        alpha: f64,
        #[arg(long = "plateaus", default_value = "8,16,32,64,128,256")]
        plateaus: String,
    },
    /// Half-line inequality for a function sampled on (0, L).
    Halfline {
        #[arg(long, default_value_t = 0.5, value_parser = alpha_value)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        delta: f64,
        #[arg(long = "fn", default_value = "bump")]
        function: String,
        #[arg(long)]
        spec: Option<String>,
        #[arg(long, default_value_t = 4.0)]
        length: f64,
        #[arg(long, default_value_t = 1024)]
        n: usize,
    },
    /// Interval inequality; mean-zero mode unless --beta1 is given.
    Interval {
        #[command(flatten)]
        f: FunctionArgs,
        #[arg(long, default_value_t = 0.5, value_parser = alpha_value)]
        alpha: f64,
        #[arg(long)]
        beta1: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        beta2: f64,
        #[arg(long, default_value_t = 0.0)]
        beta3: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Zero extension of a 1D sample on (0, 1).
    Zero,
    /// Reflection across the flat boundary of the upper half square.
    Reflect,
    /// Partition-of-unity extension from the unit disk.
    Disk,
}

/// A usage or input error; exits with status 2.
struct Failure(String);

impl From<hslab::Error> for Failure {
    fn from(e: hslab::Error) -> Self {
        Failure(e.to_string())
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure(e)
    }
}

type Run = Result<bool, Failure>;

fn verdict_csv(r: &InequalityReport) -> String {
    format!(
        "family_id,lhs,rhs,empirical_constant,configured_constant,resolution,verdict\n{},{:e},{:e},{},{:e},{},{:?}\n",
        r.family_id,
        r.lhs,
        r.rhs,
        r.empirical_constant.map(|c| format!("{c:e}")).unwrap_or_default(),
        r.configured_constant,
        r.resolution,
        r.verdict
    )
}

fn print_report(label: &str, r: &InequalityReport) {
    println!(
        "{label}: lhs {} rhs {} constant {} verdict {:?}",
        sig(r.lhs),
        sig(r.rhs),
        sig_opt(r.empirical_constant),
        r.verdict
    );
}

/// Families without an analytic gradient get finite differences.
fn with_gradient(u: SampledFunction) -> SampledFunction {
    if u.gradient().is_some() {
        u
    } else {
        u.with_fd_gradient()
    }
}

fn seminorm(sink: &Sink, seed: u64, f: &FunctionArgs, gamma: Option<f64>, s: Option<f64>, whole: bool, fourier: bool) -> Run {
    let spec = resolve_function(&f.function, f.spec.as_deref(), &f.domain, seed)?;
    let u = with_gradient(sample(&spec, f.domain.grid(f.n)?)?);
    let (label, r): (&str, SeminormResult) = match (gamma, s) {
        (Some(g), _) if fourier => ("fourier_gagliardo_sq", fourier_gagliardo_sq(&u, g)?),
        (Some(g), _) if whole => ("whole_space_gagliardo_sq", whole_space_gagliardo_sq(&u, g)?),
        (Some(g), _) => ("gagliardo_sq", gagliardo_sq(&u, g)?),
        (None, Some(s)) => ("sobolev_norm_sq", sobolev_norm(&u, SmoothnessIndex::new(s)?)?),
        (None, None) => return Err(Failure("one of --gamma or --s is required".into())),
    };
    println!("{label} {}", sig(r.value_sq));
    sink.emit("seminorm", &r, &format!("{}\n{}\n", SeminormResult::CSV_HEADER, r.csv_row()))?;
    Ok(true)
}

#[derive(Serialize)]
struct NemytskiiOutput {
    op: NemytskiiOp,
    s: f64,
    n: usize,
    norm_u: f64,
    norm_tu: f64,
    ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    decomposition: Option<SignDecomposition>,
}

fn nemytskii(sink: &Sink, seed: u64, f: &FunctionArgs, op: NemytskiiOp, s: f64) -> Run {
    let spec = resolve_function(&f.function, f.spec.as_deref(), &f.domain, seed)?;
    let u = with_gradient(sample(&spec, f.domain.grid(f.n)?)?);
    let index = SmoothnessIndex::new(s)?;
    let norm_u = sobolev_norm(&u, index)?.value;
    let norm_tu = sobolev_norm(&apply(op, &u), index)?.value;
    let ratio = if norm_u > 0.0 { norm_tu / norm_u } else { f64::NAN };
    let decomposition = if f.domain.dim() == 1 { Some(sign_decompose(&u)?) } else { None };
    println!("norm_u {}", sig(norm_u));
    println!("norm_{op}u {}", sig(norm_tu));
    println!("ratio {}", sig(ratio));
    if let Some(d) = &decomposition {
        println!("positive_intervals {}", d.intervals.len());
    }
    let out = NemytskiiOutput { op, s, n: f.n, norm_u, norm_tu, ratio, decomposition };
    let csv = format!("op,s,n,norm_u,norm_tu,ratio\n{op},{s},{},{norm_u:e},{norm_tu:e},{ratio:e}\n", f.n);
    sink.emit("nemytskii", &out, &csv)?;
    let contraction = op != NemytskiiOp::T1 || s > 1.0 || ratio <= 1.0 + hslab::experiments::sweep::CONTRACTION_SLACK;
    Ok(ratio.is_finite() && contraction)
}

fn hardy(sink: &Sink, seed: u64, check: &HardyCheck) -> Run {
    match check {
        HardyCheck::Kernel { alpha, delta } => {
            let (rows, sup) = f_kernel_profile(*alpha, *delta, &f_kernel_k_grid())?;
            for (k, f) in &rows {
                println!("F({k:e}) {}", sig(*f));
            }
            println!("sup {}", sig(sup));
            #[derive(Serialize)]
            struct Profile<'a> {
                alpha: f64,
                delta: f64,
                rows: &'a [(f64, f64)],
                sup: f64,
            }
            let csv: String =
                std::iter::once("k,F\n".to_string()).chain(rows.iter().map(|(k, f)| format!("{k:e},{f:e}\n"))).collect();
            sink.emit("hardy-kernel", &Profile { alpha: *alpha, delta: *delta, rows: &rows, sup }, &csv)?;
            Ok(rows[0].1 > 0.0 && sup.is_finite())
        }
        HardyCheck::Scaling { alpha, plateaus } => {
            let t = counterexample_scaling(*alpha, &parse_list::<u32>(plateaus)?, None)?;
            for r in &t.rows {
                println!("n {} hardy {} gagliardo_sq {}", r.n, sig(r.hardy_integral), sig(r.gagliardo_sq));
            }
            println!("slope {} expected {}", sig(t.fitted_slope), sig(t.expected_slope));
            sink.emit("hardy-scaling", &t, &t.to_csv())?;
            let band = t.rows.iter().all(|r| (0.5..=2.0).contains(&r.hardy_normalized));
            Ok(band && (t.fitted_slope - t.expected_slope).abs() <= 0.15)
        }
        HardyCheck::Halfline { alpha, delta, function, spec, length, n } => {
            let domain = DomainArg::Interval(0.0, *length);
            let f = resolve_function(function, spec.as_deref(), &domain, seed)?;
            let r = hardy_halfline_check(&sample(&f, domain.grid(*n)?)?, *alpha, *delta, function)?;
            print_report("halfline", &r);
            sink.emit("hardy-halfline", &r, &verdict_csv(&r))?;
            Ok(r.verdict.passed())
        }
        HardyCheck::Interval { f, alpha, beta1, beta2, beta3 } => {
            let spec = resolve_function(&f.function, f.spec.as_deref(), &f.domain, seed)?;
            let mut u = sample(&spec, f.domain.grid(f.n)?)?;
            let mode = match beta1 {
                Some(b1) => IntervalMode::General { beta1: *b1, beta2: *beta2 },
                None => {
                    u = hslab::hardy::center(&u);
                    IntervalMode::MeanZero { beta3: *beta3 }
                }
            };
            let r = interval_hardy_check(&u, *alpha, mode, &f.function)?;
            print_report("interval", &r);
            sink.emit("hardy-interval", &r, &verdict_csv(&r))?;
            Ok(r.verdict.passed())
        }
    }
}

#[derive(Serialize)]
struct ExtendOutput {
    model: String,
    s: f64,
    restriction_error: f64,
    #[serde(flatten)]
    summary: ExtensionSummary,
}

fn extend(sink: &Sink, seed: u64, model: ModelArg, function: &str, spec: Option<&str>, s: f64, n: usize) -> Run {
    let r = match model {
        ModelArg::Zero => {
            let d = DomainArg::Interval(0.0, 1.0);
            zero_extend(&sample(&resolve_function(function, spec, &d, seed)?, d.grid(n)?)?, s)?
        }
        ModelArg::Reflect => {
            let d = build_graph_domain(Curve::Constant { value: 1.0 }, GraphKind::QPlus, &GraphParams::default())?;
            let grid = Grid2D::new(Interval::new(-1.0, 1.0)?, Interval::new(0.0, 1.0)?, n, n / 2, Region::Graph(d))?;
            let f = match spec {
                Some(_) => resolve_function(function, spec, &DomainArg::Square(-1.0, 1.0), seed)?,
                None => FunctionSpec::seeded(
                    hslab::domains::Family::WindowedTrig { degree: 4, period: 2.0, center: vec![0.0, 0.0], radius: 0.4, decay: 1.0 },
                    seed,
                ),
            };
            hestenes_reflect(&sample(&f, grid)?, s)?
        }
        ModelArg::Disk => {
            let f = resolve_function(function, spec, &DomainArg::UnitDisk, seed)?.compile(2)?;
            extend_e(&f, &ExtensionModel::unit_disk(), s, n)?
        }
    };
    let out = ExtendOutput { model: format!("{model:?}").to_lowercase(), s, restriction_error: r.restriction_error, summary: r.summary() };
    println!("norm_ratio_h1 {}", sig_opt(out.summary.norm_ratio_h1));
    println!("norm_ratio_hs_grad {}", sig_opt(out.summary.norm_ratio_hs_grad));
    if let Some(v) = out.summary.norm_ratio {
        println!("norm_ratio {}", sig(v));
    }
    println!("restriction_error {}", sig(r.restriction_error));
    sink.emit("extend", &out, &r.to_csv())?;
    let finite = |x: Option<f64>| x.is_none_or(f64::is_finite);
    Ok(finite(out.summary.norm_ratio_h1) && finite(out.summary.norm_ratio_hs_grad) && finite(out.summary.norm_ratio))
}

fn sweep(sink: &Sink, cfg: SweepConfig) -> Run {
    let r = operator_norm_sweep(&cfg)?;
    for c in &r.cells {
        println!("s {} n {} max_ratio {} drift {}", c.s, c.n, sig(c.max_ratio), sig_opt(c.drift));
    }
    for (s, n) in r.failing_cells() {
        println!("failing cell s {s} n {n}");
    }
    sink.emit("sweep", &r, &r.to_csv())?;
    Ok(r.passed)
}

fn sharpness_cmd(sink: &Sink, s: &str, schedule: &str) -> Run {
    let rows = sharpness_study(&parse_list::<f64>(s)?, &parse_schedules(schedule)?)?;
    let mut ok = true;
    for r in &rows {
        let expected = sharpness::expected(r.s, r.input);
        ok &= r.verdict == expected;
        println!(
            "s {} {} base {} verdict {:?} limit {} ratio {}",
            r.s,
            r.input,
            r.base_n,
            r.verdict,
            sig_opt(r.limit),
            sig_opt(r.rate)
        );
    }
    let csv: String = std::iter::once(format!("{}\n", hslab::experiments::SharpnessRow::CSV_HEADER))
        .chain(rows.iter().map(|r| r.csv_rows()))
        .collect();
    sink.emit("sharpness", &rows, &csv)?;
    Ok(ok)
}

fn mn_check(sink: &Sink, s: &str, count: usize, n: usize, frequency_box: usize) -> Run {
    let s_list = parse_list::<f64>(s)?;
    let mut report =
        StudyReport { musina_nazarov: musina_nazarov_check(&sign_changing_family(count, n)?, &s_list)?, ..Default::default() };
    if frequency_box > 0 {
        report.multiplier = s_list
            .iter()
            .map(|&s| anisotropic_multiplier_check(s, frequency_box))
            .collect::<hslab::Result<_>>()?;
    }
    report.derive_claims();
    let min_gap = report.musina_nazarov.iter().map(|r| r.lhs - r.rhs).fold(f64::INFINITY, f64::min);
    println!("cases {} min_gap {}", report.musina_nazarov.len(), sig(min_gap));
    for m in &report.multiplier {
        println!("multiplier gamma {:.6} max_ratio {} violations {}", m.gamma, sig(m.max_ratio), m.violations);
    }
    sink.emit("mn-check", &report, &report.to_csv())?;
    Ok(report.passed())
}

fn report(sink: &Sink, config: Option<&PathBuf>, golden: Option<&PathBuf>, tol: f64) -> Run {
    let cfg = match config {
        Some(p) => load_config(p)?,
        None => StudyConfig::default(),
    };
    let report = run_study(&cfg)?;
    for path in emit_report(&report, &sink.dir)? {
        println!("wrote {}", path.display());
    }
    print!("{}", report.summary());
    let mut ok = report.passed();
    if let Some(g) = golden {
        let diffs = compare_golden(&report, &load_report(g)?, &Tolerances { default: tol, ..Default::default() })?;
        for d in &diffs {
            println!("diff {d}");
        }
        println!("golden diffs {}", diffs.len());
        ok &= diffs.is_empty();
    }
    Ok(ok)
}

fn run(cli: Cli) -> Run {
    let sink = Sink { dir: cli.out_dir.clone(), format: cli.format };
    match &cli.command {
        Command::Seminorm { f, gamma, s, whole_space, fourier } => seminorm(&sink, cli.seed, f, *gamma, *s, *whole_space, *fourier),
        Command::Nemytskii { f, op, s } => nemytskii(&sink, cli.seed, f, *op, *s),
        Command::Hardy { check } => hardy(&sink, cli.seed, check),
        Command::Extend { model, function, spec, s, n } => extend(&sink, cli.seed, *model, function, spec.as_deref(), *s, *n),
        Command::Sweep { config, op, s, n, seeds, domain, drift_tol } => {
            let cfg = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
                    serde_json::from_str(&text).map_err(|e| format!("invalid sweep config {}: {e}", path.display()))?
                }
                None => {
                    let mut cfg = SweepConfig::new(*op, parse_list(s)?, parse_list(n)?, *seeds, domain.sweep_domain()?);
                    cfg.drift_tol = *drift_tol;
                    cfg
                }
            };
            sweep(&sink, cfg)
        }
        Command::Sharpness { s, schedule } => sharpness_cmd(&sink, s, schedule),
        Command::MnCheck { s, count, n, frequency_box } => mn_check(&sink, s, *count, *n, *frequency_box),
        Command::Report { config, golden, tol } => report(&sink, config.as_ref(), golden.as_ref(), *tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    if let Some(k) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("verdict: FAIL");
            ExitCode::from(1)
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
