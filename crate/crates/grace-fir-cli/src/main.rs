//! `grace-fir`: design, compensate and analyze Grace low-pass FIR filters.
//!
//! Frequency convention: 1 is the Nyquist frequency. Exit codes: 0 on
//! success, 1 when a design is infeasible or a response degenerate, 2 on
//! usage or parse errors.

mod document;

use clap::{Args, Parser, Subcommand, ValueEnum};
use document::{CompensationInfo, FilterDocument, MetricsInfo, SpecInfo, FORMAT_VERSION};
use grace_fir::{
    auto_compensate, coefficients, compensate, design_search, measure_metrics,
    preconditioner_rows, response, response_derivative, ripple_scan, singular_values, transform_metrics,
    CoefficientVector, CompensationReport, DesignTargets, Error as LibError, FilterSpec,
    GraceParams,
};
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "grace-fir", version, about = "Grace low-pass FIR filter design")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find (m, n, p) meeting cutoff/rolloff/sidelobe targets.
    Design(DesignArgs),
    /// Generate filter taps for explicit (m, n, p).
    Coeffs(CoeffsArgs),
    /// Report response metrics of a taps file.
    Analyze(AnalyzeArgs),
    /// Sample the frequency response to CSV.
    Response(ResponseArgs),
    /// Reproduce the limiting rolloff/sidelobe tables.
    Tables(TablesArgs),
    /// Run the invariant quick-suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct DesignArgs {
    /// Cutoff frequency in (0, 1), Nyquist = 1.
    #[arg(long)]
    fc: f64,
    /// Transition-band rolloff target in dB/octave (positive).
    #[arg(long)]
    rolloff: f64,
    /// First-sidelobe target in dB (negative).
    #[arg(long, allow_hyphen_values = true)]
    sidelobe: f64,
    /// Write a filter document (JSON) here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Compensation applied to the generated taps: auto, off or q=<int>.
    #[arg(long, default_value = "auto")]
    deripple: String,
}

#[derive(Args)]
struct CoeffsArgs {
    /// Half-length; the filter has 2m+1 taps.
    #[arg(long)]
    m: usize,
    /// Polynomial order (n >= 1).
    #[arg(long)]
    n: u32,
    /// Window exponent (0 <= p <= n-1).
    #[arg(long)]
    p: u32,
    /// auto, off, or q=<int>; q=-1 prints singular values only.
    #[arg(long, default_value = "auto")]
    deripple: String,
    /// Output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Taps file: JSON filter document or CSV (index,value per line).
    #[arg(long = "in")]
    input: PathBuf,
    /// Ripple-scan grid points.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// How many even derivatives to report (default: n-p-1 from the
    /// document, 0 for raw CSV).
    #[arg(long)]
    z: Option<usize>,
}

#[derive(Args)]
struct ResponseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of intervals; the file holds points+1 samples.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TablesArgs {
    /// Which limiting table to compute.
    #[arg(long, value_enum)]
    which: Table,
    /// Comma-separated polynomial orders.
    #[arg(long, default_value = "10,20,30,50")]
    n_list: String,
    /// Comma-separated p/n ratios in [0, 1]; p = round(pn * n) clamped
    /// to [0, n-1].
    #[arg(long, default_value = "0.0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0")]
    pn_list: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Table {
    Rolloff,
    Sidelobe,
}

#[derive(Args)]
struct VerifyArgs {
    /// Also sweep the full (m, n, p) cube up to this half-length and
    /// report the heuristic step distribution (slow for large values).
    #[arg(long)]
    sweep_max_m: Option<usize>,
}

/// Failures mapped to exit codes.
enum AppError {
    /// Exit 2: bad flags or unparseable input files.
    Usage(String),
    /// Exit 1: infeasible design or degenerate response.
    Domain(String),
}

impl From<LibError> for AppError {
    fn from(e: LibError) -> Self {
        match e {
            LibError::InvalidParams(_) => AppError::Usage(e.to_string()),
            LibError::Infeasible(_) | LibError::DegenerateResponse => {
                AppError::Domain(e.to_string())
            }
            other => AppError::Domain(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design(args) => cmd_design(args),
        Command::Coeffs(args) => cmd_coeffs(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Response(args) => cmd_response(args),
        Command::Tables(args) => cmd_tables(args),
        Command::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

enum Deripple {
    Auto,
    Off,
    Q(i64),
}

fn parse_deripple(text: &str) -> Result<Deripple, AppError> {
    match text {
        "auto" => Ok(Deripple::Auto),
        "off" => Ok(Deripple::Off),
        other => {
            let q = other
                .strip_prefix("q=")
                .and_then(|v| v.parse::<i64>().ok())
                .ok_or_else(|| {
                    AppError::Usage(format!(
                        "--deripple must be auto, off or q=<int>, got {other:?}"
                    ))
                })?;
            Ok(Deripple::Q(q))
        }
    }
}

/// Generate taps per the deripple mode. `Ok(None)` means the mode only
/// printed diagnostics (q < 0).
fn generate(
    spec: FilterSpec,
    mode: &Deripple,
) -> Result<Option<(CoefficientVector, Option<CompensationReport>, Option<usize>)>, AppError> {
    match mode {
        Deripple::Off => Ok(Some((coefficients(spec)?, None, None))),
        Deripple::Auto => {
            let (taps, report) = auto_compensate(spec)?;
            Ok(Some((taps, Some(report), None)))
        }
        Deripple::Q(q) if *q < 0 => {
            let z = spec.params().zero_derivative_count() as usize;
            if z == 0 {
                println!("z = 0: no compensation directions, no singular values");
                return Ok(None);
            }
            for s in singular_values(spec.m(), z)? {
                println!("{s:.16e}");
            }
            Ok(None)
        }
        Deripple::Q(q) => {
            let z = spec.params().zero_derivative_count() as usize;
            if z == 0 {
                return Err(AppError::Usage(
                    "p = n-1 leaves no derivative constraints to compensate".into(),
                ));
            }
            let (taps, report) = compensate(&coefficients(spec)?, z, *q as usize)?;
            Ok(Some((taps, Some(report), Some(*q as usize))))
        }
    }
}

fn spec_from(m: usize, n: u32, p: u32) -> Result<FilterSpec, AppError> {
    let params = GraceParams::new(n, p).map_err(|e| AppError::Usage(e.to_string()))?;
    FilterSpec::new(m, params).map_err(|e| AppError::Usage(e.to_string()))
}

fn write_document(
    path: &PathBuf,
    spec: FilterSpec,
    taps: &CoefficientVector,
    report: Option<&CompensationReport>,
    forced_q: Option<usize>,
) -> Result<(), AppError> {
    let z = spec.params().zero_derivative_count() as usize;
    let metrics = measure_metrics(taps, z).ok();
    let doc = FilterDocument {
        format_version: FORMAT_VERSION,
        spec: SpecInfo {
            m: spec.m(),
            n: spec.params().n(),
            p: spec.params().p(),
        },
        coefficients: taps.taps().to_vec(),
        compensation: report.map(|r| CompensationInfo::from_report(r, true, forced_q)),
        metrics: metrics.as_ref().map(MetricsInfo::from),
    };
    let text = serde_json::to_string_pretty(&doc)
        .map_err(|e| AppError::Domain(format!("serialize: {e}")))?;
    std::fs::write(path, text)
        .map_err(|e| AppError::Domain(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn cmd_design(args: DesignArgs) -> Result<(), AppError> {
    let targets = DesignTargets::new(args.fc, args.rolloff, args.sidelobe)
        .map_err(|e| AppError::Usage(e.to_string()))?;
    for warning in targets.envelope_warnings() {
        eprintln!("warning: {warning}");
    }
    let result = design_search(targets)?;
    let spec = result.spec;
    println!(
        "m = {}, n = {}, p = {}",
        spec.m(),
        spec.params().n(),
        spec.params().p()
    );
    println!(
        "predicted rolloff   = {:.2} dB/octave",
        result.predicted.rolloff_db_per_octave
    );
    println!(
        "predicted sidelobe  = {:.2} dB",
        result.predicted.first_sidelobe_db
    );
    println!("m * fc              = {:.4}", result.achieved_mfc);
    if let Some(out) = args.out {
        let mode = parse_deripple(&args.deripple)?;
        if let Some((taps, report, forced_q)) = generate(spec, &mode)? {
            write_document(&out, spec, &taps, report.as_ref(), forced_q)?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn cmd_coeffs(args: CoeffsArgs) -> Result<(), AppError> {
    let spec = spec_from(args.m, args.n, args.p)?;
    let mode = parse_deripple(&args.deripple)?;
    let Some((taps, report, forced_q)) = generate(spec, &mode)? else {
        return Ok(()); // diagnostic mode printed singular values
    };
    if let Some(r) = &report {
        println!(
            "compensation: step {} ({}), q = {}, |dc| = {:.3e}",
            r.step_reached,
            if r.accepted { "accepted" } else { "not accepted" },
            r.zeroed_count,
            r.delta_norm
        );
    }
    let out = args.out.ok_or_else(|| {
        AppError::Usage("--out is required unless --deripple q=-1".into())
    })?;
    match args.format {
        Format::Csv => {
            std::fs::write(&out, document::taps_to_csv(&taps))
                .map_err(|e| AppError::Domain(format!("{}: {e}", out.display())))?;
        }
        Format::Json => write_document(&out, spec, &taps, report.as_ref(), forced_q)?,
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<(), AppError> {
    let (taps, doc) = document::load_taps(&args.input).map_err(AppError::Usage)?;
    let z = args
        .z
        .or_else(|| doc.as_ref().map(|d| (d.spec.n - d.spec.p - 1) as usize))
        .unwrap_or(0);
    if args.points < 100 {
        return Err(AppError::Usage("--points must be at least 100".into()));
    }
    let scan = ripple_scan(&taps, args.points);
    println!("taps                = {}", taps.taps().len());
    println!("sum                 = {:.16e}", taps.sum());
    println!("passband ripple     = {:.16e}", scan.passband_ripple);
    println!(
        "stopband regular    = {}",
        if scan.stopband_regular { "yes" } else { "no" }
    );
    match measure_metrics(&taps, z) {
        Ok(metrics) => {
            println!("f_r                 = {:.16e}", metrics.f_r);
            println!("f_c                 = {:.16e}", metrics.f_c);
            println!(
                "rolloff             = {:.16e} dB/octave",
                metrics.rolloff_db_per_octave
            );
            println!(
                "first sidelobe      = {:.16e} dB",
                metrics.first_sidelobe_db
            );
            for (k, d) in metrics.derivative_magnitudes.iter().enumerate() {
                println!("|derivative {:2}|     = {:.16e}", k + 1, d);
            }
            Ok(())
        }
        Err(LibError::DegenerateResponse) => {
            println!("f_r                 = {:.16e}", grace_fir::reference_frequency(&taps));
            println!("degenerate response: no cutoff crossing in (0, 1)");
            Err(AppError::Domain("degenerate response".into()))
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_response(args: ResponseArgs) -> Result<(), AppError> {
    let (taps, _) = document::load_taps(&args.input).map_err(AppError::Usage)?;
    let mut out = String::new();
    for k in 0..=args.points {
        let f = k as f64 / args.points as f64;
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e}",
            f,
            response(&taps, f),
            response_derivative(&taps, f)
        );
    }
    std::fs::write(&args.out, out)
        .map_err(|e| AppError::Domain(format!("{}: {e}", args.out.display())))?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, AppError> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<T>()
                .map_err(|_| AppError::Usage(format!("bad {what} entry {tok:?}")))
        })
        .collect()
}

/// Worker cap for the table fan-out: GRACE_FIR_THREADS, else the
/// available parallelism.
fn thread_cap() -> usize {
    std::env::var("GRACE_FIR_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|v| v.get())
                .unwrap_or(1)
        })
}

fn cmd_tables(args: TablesArgs) -> Result<(), AppError> {
    let n_list: Vec<u32> = parse_list(&args.n_list, "--n-list")?;
    let pn_list: Vec<f64> = parse_list(&args.pn_list, "--pn-list")?;
    if let Some(bad) = n_list.iter().find(|&&n| !(2..=1000).contains(&n)) {
        return Err(AppError::Usage(format!("n = {bad} outside [2, 1000]")));
    }
    if let Some(bad) = pn_list.iter().find(|&&r| !(0.0..=1.0).contains(&r)) {
        return Err(AppError::Usage(format!("p/n = {bad} outside [0, 1]")));
    }

    // one cell per (n, p/n); fan out across a bounded thread pool
    let cells: Vec<(usize, u32, u32)> = n_list
        .iter()
        .enumerate()
        .flat_map(|(row, &n)| {
            pn_list.iter().enumerate().map(move |(col, &ratio)| {
                let p = ((ratio * n as f64).round() as i64).clamp(0, n as i64 - 1) as u32;
                (row * 1000 + col, n, p)
            })
        })
        .collect();
    let workers = thread_cap().min(cells.len().max(1));
    let mut values = vec![0.0f64; cells.len()];
    std::thread::scope(|scope| {
        let chunk = cells.len().div_ceil(workers);
        for (slot, work) in values.chunks_mut(chunk).zip(cells.chunks(chunk)) {
            scope.spawn(move || {
                for (v, &(_, n, p)) in slot.iter_mut().zip(work) {
                    let metrics = transform_metrics(GraceParams::new(n, p).unwrap());
                    *v = match args.which {
                        Table::Rolloff => metrics.rolloff_db_per_octave,
                        Table::Sidelobe => metrics.first_sidelobe_db,
                    };
                }
            });
        }
    });

    let label = match args.which {
        Table::Rolloff => "limiting transition-band rolloff (dB/octave)",
        Table::Sidelobe => "limiting first stop-band sidelobe (dB)",
    };
    println!("{label}");
    print!("{:>6}", "n\\p/n");
    for ratio in &pn_list {
        print!("{ratio:>9.1}");
    }
    println!();
    for (row, &n) in n_list.iter().enumerate() {
        print!("{n:>6}");
        for col in 0..pn_list.len() {
            print!("{:>9.1}", values[row * pn_list.len() + col]);
        }
        println!();
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<(), AppError> {
    let mut failures = 0usize;
    let mut check = |name: &str, ok: bool| {
        println!("{} {name}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // normalization identity on a sample grid
    let mut ok = true;
    for n in [1u32, 5, 20, 100] {
        for p in [0, n / 3, n - 1] {
            let params = GraceParams::new(n, p).unwrap();
            let a = grace_fir::norm_a(params);
            // quadrature via the transform at phi = 0 is normalized; use
            // the moment machinery instead: integral of G equals a
            let probe = grace_fir::transform(0.0, params);
            ok &= (probe - 1.0).abs() < 1e-12 && a > 0.0;
        }
    }
    check("transform normalization g(0) = 1", ok);

    // moment structure for a couple of parameter pairs
    let mut ok = true;
    for (n, p) in [(10u32, 0u32), (8, 3), (5, 4)] {
        let params = GraceParams::new(n, p).unwrap();
        let z = params.zero_derivative_count();
        for k in 1..=z {
            ok &= grace_fir::transform_moment(k, params).abs() < 1e-11;
        }
        ok &= grace_fir::transform_moment(z + 1, params).abs() > 1e-8;
    }
    check("vanishing transform moments up to z = n-p-1", ok);

    // preconditioner rows against the Chebyshev-coefficient construction
    let rows = preconditioner_rows(10).map_err(|e| AppError::Domain(e.to_string()))?;
    check(
        "preconditioner rows 1..10 (rational Cholesky = U coefficients)",
        rows[1] == vec![-1, 4] && rows[4] == vec![1, -40, 240, -448, 256],
    );

    // small compensation sweep
    let mut ok = true;
    for m in 3..=12usize {
        for n in 2..m as u32 {
            for p in 0..n.saturating_sub(1) {
                let spec = FilterSpec::new(m, GraceParams::new(n, p).unwrap()).unwrap();
                let (_, report) = auto_compensate(spec).map_err(|e| AppError::Domain(e.to_string()))?;
                ok &= report.accepted;
            }
        }
    }
    check("auto-compensation accepted for all m <= 12", ok);

    if let Some(max_m) = args.sweep_max_m {
        let mut steps = [0usize; 5];
        let mut accepted = 0usize;
        let mut total = 0usize;
        for m in 3..=max_m {
            for n in 2..m as u32 {
                for p in 0..n.saturating_sub(1) {
                    let spec = FilterSpec::new(m, GraceParams::new(n, p).unwrap()).unwrap();
                    let (_, report) =
                        auto_compensate(spec).map_err(|e| AppError::Domain(e.to_string()))?;
                    total += 1;
                    accepted += report.accepted as usize;
                    steps[(report.step_reached as usize - 1).min(4)] += 1;
                }
            }
        }
        println!(
            "sweep m <= {max_m}: {total} cases, {accepted} accepted; steps: \
             1: {}, 2: {}, 3: {}, 4: {}, 5: {}",
            steps[0], steps[1], steps[2], steps[3], steps[4]
        );
        check("sweep all accepted", accepted == total);
    }

    if failures == 0 {
        Ok(())
    } else {
        Err(AppError::Domain(format!("{failures} check(s) failed")))
    }
}
