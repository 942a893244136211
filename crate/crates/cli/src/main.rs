mod args;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use args::*;
use clap::Parser;
use log::info;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};
use toeplitz_kreiss::analysis::{
    hille_yosida_of, power_bound, power_bound_of, resolvent_condition_of, BoundReport, Quantity, ResolventSource,
    SpectrumModel, Verdict,
};
use toeplitz_kreiss::export::csv_float;
use toeplitz_kreiss::operators::{build_operator, StructuredOperator};
use toeplitz_kreiss::stability::{run_scheme, seeded_start, Forcing, SchemeRun};
use toeplitz_kreiss::symbols::{Family, FamilyParams, LaurentSymbol, TruncatedOperator};
use toeplitz_kreiss::theorems::{
    overall_verdict, sweep_growth, CaseInput, Check, SweepConfig, TheoremCase, TheoremId, VerifyConfig,
};
use toeplitz_kreiss::Error;

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(s) => f.write_str(s),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// What a subcommand produced.
struct Outcome {
    lines: Vec<String>,
    json: Value,
    csv: Option<String>,
    exit: u8,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TK_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tk: {e}");
            let code = match &e {
                CliError::Core(err) if err.is_numerical() => EXIT_NUMERIC,
                _ => EXIT_USAGE,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: &Cli) -> CliResult<u8> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    let default_format = match cli.command {
        Command::Sweep(_) | Command::Stability(_) => Format::Csv,
        _ => Format::Json,
    };
    let format = cli.format.unwrap_or(default_format);

    let outcome = match &cli.command {
        Command::Op(OpCommand::Build { op, dim }) => {
            if format == Format::Csv {
                return Err(usage("op build writes operator JSON only"));
            }
            cmd_op_build(op, *dim)?
        }
        Command::Verify(a) => cmd_verify(a)?,
        Command::Sweep(a) => cmd_sweep(a)?,
        Command::PowerBound(a) => cmd_power_bound(a)?,
        Command::Resolvent(a) => cmd_resolvent(a)?,
        Command::Kreiss(a) => cmd_kreiss(a)?,
        Command::Stability(a) => cmd_stability(a, cli.seed)?,
    };

    let mut stdout = std::io::stdout().lock();
    for line in &outcome.lines {
        emit(&mut stdout, &format!("{line}\n"))?;
    }
    let artifact = match format {
        Format::Csv => outcome.csv.clone().ok_or_else(|| usage("this command has no CSV output"))?,
        Format::Json => {
            let mut meta = json!({
                "tool": "tk",
                "version": env!("CARGO_PKG_VERSION"),
                "config": cli,
            });
            if !cli.no_timestamp {
                meta["run"] = json!({
                    "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
                    "threads": rayon::current_num_threads(),
                    "out": cli.out,
                });
            }
            let mut s = if matches!(cli.command, Command::Op(_)) {
                // stays loadable as an operator file; readers ignore `meta`
                let mut doc = outcome.json;
                doc["meta"] = meta;
                serde_json::to_string(&doc)
            } else {
                meta["result"] = outcome.json;
                serde_json::to_string_pretty(&meta)
            }
            .map_err(Error::from)?;
            s.push('\n');
            s
        }
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, artifact).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
            info!("wrote {}", path.display());
        }
        None => emit(&mut stdout, &artifact)?,
    }
    Ok(outcome.exit)
}

/// Writes to stdout; a closed pipe ends the run quietly.
fn emit(out: &mut impl Write, s: &str) -> CliResult<()> {
    match out.write_all(s.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        Err(e) => Err(usage(format!("stdout: {e}"))),
    }
}

/// Operator source after validation.
enum Source {
    Matrix(TruncatedOperator),
    Family(FamilyParams),
}

fn read_matrix(path: &std::path::Path) -> CliResult<TruncatedOperator> {
    let s = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    Ok(TruncatedOperator::from_json(&s)?)
}

fn resolve(op: &OperatorArgs, default_family: Option<FamilyArg>) -> CliResult<Source> {
    if let Some(path) = &op.matrix {
        return Ok(Source::Matrix(read_matrix(path)?));
    }
    let family = op
        .family
        .or(default_family)
        .ok_or_else(|| usage("give --matrix FILE or --family {conj-shift|real-part|custom}"))?;
    let params = match family {
        FamilyArg::Custom => {
            let g = op.g.as_deref().ok_or_else(|| usage("--family custom requires --g"))?;
            let g: LaurentSymbol = parse_symbol(g)?;
            let f = match &op.f {
                Some(f) => parse_symbol(f)?,
                None => LaurentSymbol::conj_z(),
            };
            FamilyParams::custom(f, g)?
        }
        named => {
            if op.f.is_some() || op.g.is_some() {
                return Err(usage("--f/--g apply to --family custom only"));
            }
            let beta = op.beta.ok_or_else(|| usage("--beta RE,IM is required"))?;
            let family = if named == FamilyArg::ConjShift { Family::ConjugateShift } else { Family::RealPart };
            FamilyParams::new(family, beta)?
        }
    };
    Ok(Source::Family(params))
}

fn exit_for(verdict: Verdict, converged: bool) -> u8 {
    match verdict {
        Verdict::Fail => EXIT_FAIL,
        Verdict::Advisory if !converged => EXIT_NUMERIC,
        _ => 0,
    }
}

fn exit_for_checks(checks: &[Check]) -> u8 {
    checks.iter().map(|c| exit_for(c.verdict(), c.report.converged)).max_by_key(|c| match *c {
        EXIT_FAIL => 2,
        EXIT_NUMERIC => 1,
        _ => 0,
    })
    .unwrap_or(0)
}

fn cmd_op_build(op: &OperatorArgs, dim: usize) -> CliResult<Outcome> {
    let a = match resolve(op, None)? {
        Source::Matrix(_) => return Err(usage("op build takes a family, not --matrix")),
        Source::Family(p) => build_operator(&p, dim, op.mode.build())?,
    };
    let json = serde_json::to_value(&a).map_err(Error::from)?;
    Ok(Outcome { lines: Vec::new(), json, csv: None, exit: 0 })
}

fn verify_config(a: &VerifyArgs) -> VerifyConfig {
    VerifyConfig {
        dim: a.dim,
        n_max: a.n_max,
        grid: a.grid.spec((60, 256)),
        norm_tol: a.norm_tol,
        mode: a.op.mode.resolvent(),
        m_tol: a.m_tol,
        p_tol: a.p_tol,
    }
}

fn checks_csv(checks: &[Check]) -> String {
    let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
    let mut s = String::from("theorem,label,beta_re,beta_im,value,lower,upper,tolerance,converged,verdict\n");
    for c in checks {
        let (re, im) = c.beta.map_or((String::new(), String::new()), |b| (csv_float(b[0]), csv_float(b[1])));
        s.push_str(&format!(
            "{},{},{re},{im},{},{},{},{},{},{}\n",
            c.theorem.tag(),
            c.label,
            csv_float(c.report.value),
            opt(c.report.lower),
            opt(c.report.upper),
            csv_float(c.report.tolerance),
            c.report.converged,
            c.verdict()
        ));
    }
    s
}

fn cmd_verify(a: &VerifyArgs) -> CliResult<Outcome> {
    let id: TheoremId = a.theorem.parse()?;
    if matches!(id, TheoremId::Cor3_1 | TheoremId::Cor3_2) {
        return Err(usage("growth corollaries are checked with `tk sweep`"));
    }
    let cfg = verify_config(a);
    let default_family = match id.required_family() {
        Some(Family::ConjugateShift) => Some(FamilyArg::ConjShift),
        Some(_) => Some(FamilyArg::RealPart),
        None if id == TheoremId::ErThm1_1 => Some(FamilyArg::RealPart),
        None => None,
    };
    let input = if id == TheoremId::Lem6_1Norm {
        CaseInput::Matrix(TruncatedOperator::identity(1)?)
    } else {
        match resolve(&a.op, default_family)? {
            Source::Matrix(m) => CaseInput::Matrix(m),
            Source::Family(p) => CaseInput::Family(p),
        }
    };
    let mut case = TheoremCase::new(id, input, cfg.clone())?;
    if let Some(pts) = &a.points {
        case = case.with_points(parse_points(pts).map_err(usage)?);
    }
    let checks = case.run()?;
    let verdict = overall_verdict(&checks);
    Ok(Outcome {
        lines: checks.iter().map(|c| c.to_string()).collect(),
        json: json!({ "resolved": cfg, "checks": checks, "verdict": verdict }),
        csv: Some(checks_csv(&checks)),
        exit: exit_for_checks(&checks),
    })
}

fn cmd_sweep(a: &SweepArgs) -> CliResult<Outcome> {
    let family = match a.cor.as_str() {
        "3.1" => Family::ConjugateShift,
        "3.2" => Family::RealPart,
        other => return Err(usage(format!("--cor must be 3.1 or 3.2, got `{other}`"))),
    };
    let mut cfg = SweepConfig::new(family, a.phase, a.k_range.0, a.k_range.1)?;
    cfg.n_max = a.n_max;
    cfg.grid = a.grid.spec((30, 64));
    cfg.mode = a.mode.resolvent();
    cfg.tail_target = a.tail_target;
    cfg.min_dim = a.min_dim;
    cfg.max_dim = a.max_dim;
    let report = sweep_growth(&cfg)?;
    let any_unconverged = report.rows.iter().any(|r| r.checks.iter().any(|c| !c.report.converged));
    let exit = if report.m_verdict == Verdict::Fail
        || report.p_verdict == Verdict::Fail
        || report.rows.iter().any(|r| r.verdict == Verdict::Fail)
    {
        EXIT_FAIL
    } else {
        0
    };
    if any_unconverged {
        info!("some rows did not converge; their bracket verdicts are advisory");
    }
    let mut lines: Vec<String> = report.rows.iter().flat_map(|r| r.checks.iter().map(|c| c.to_string())).collect();
    lines.extend(report.slope_lines());
    Ok(Outcome {
        lines,
        json: json!({ "resolved": cfg, "report": report }),
        csv: Some(report.to_csv()),
        exit,
    })
}

fn report_csv(reports: &[&BoundReport]) -> String {
    let opt = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
    let mut s = String::from("quantity,value,lower,upper,converged,verdict,argmax_re,argmax_im\n");
    for r in reports {
        let (re, im) = r.argmax_lambda.map_or((String::new(), String::new()), |z| (csv_float(z[0]), csv_float(z[1])));
        s.push_str(&format!(
            "{},{},{},{},{},{},{re},{im}\n",
            r.quantity,
            csv_float(r.value),
            opt(r.lower),
            opt(r.upper),
            r.converged,
            r.verdict
        ));
    }
    s
}

fn report_line(r: &BoundReport) -> String {
    let at = match (r.argmax_lambda, r.argmax_n) {
        (Some(z), _) => format!(" at lambda={}", toeplitz_kreiss::theorems::format_complex(Complex64::new(z[0], z[1]))),
        (None, Some(n)) => format!(" at n={n}"),
        _ => String::new(),
    };
    format!("{} value={}{at} converged={} {}", r.quantity, toeplitz_kreiss::theorems::format_number(r.value), r.converged, r.verdict)
}

fn single_report(r: BoundReport) -> Outcome {
    Outcome {
        lines: vec![report_line(&r)],
        csv: Some(report_csv(&[&r])),
        exit: exit_for(r.verdict, r.converged),
        json: json!({ "report": r }),
    }
}

fn cmd_power_bound(a: &PowerBoundArgs) -> CliResult<Outcome> {
    let r = match resolve(&a.op, None)? {
        Source::Matrix(m) => power_bound(&m, a.n_max, a.norm_tol)?,
        Source::Family(p) => {
            power_bound_of(&StructuredOperator::family(&p, a.dim, a.op.mode.build())?, a.n_max, a.norm_tol)?
        }
    };
    let mut out = single_report(r);
    if let Some(r) = out.json.get("report").and_then(|r| r.get("series")).and_then(Value::as_array) {
        let mut s = String::from("n,norm\n");
        for (n, v) in r.iter().enumerate() {
            s.push_str(&format!("{n},{}\n", csv_float(v.as_f64().unwrap_or(f64::NAN))));
        }
        out.csv = Some(s);
    }
    Ok(out)
}

fn source_for(op: &OperatorArgs, dim: usize) -> CliResult<ResolventSource> {
    Ok(match resolve(op, None)? {
        Source::Matrix(m) => ResolventSource::for_operator(&m, op.mode.resolvent())?,
        Source::Family(p) => ResolventSource::family(&p, dim, op.mode.resolvent())?,
    })
}

fn cmd_resolvent(a: &ResolventArgs) -> CliResult<Outcome> {
    let src = source_for(&a.op, a.dim)?;
    Ok(single_report(resolvent_condition_of(&src, &a.spectrum.0, &a.grid.spec((60, 256)))?))
}

fn cmd_kreiss(a: &KreissArgs) -> CliResult<Outcome> {
    let src = source_for(&a.op, a.dim)?;
    let grid = a.grid.spec((60, 256));
    let mut k = resolvent_condition_of(&src, &SpectrumModel::UnitDisk, &grid)?;
    k.quantity = Quantity::K;
    let hy = match a.hy_n_max {
        Some(n) => Some(hille_yosida_of(&src, n, &grid)?),
        None => None,
    };
    let mut lines = vec![report_line(&k)];
    let mut reports = vec![&k];
    let mut exit = exit_for(k.verdict, k.converged);
    if let Some(h) = &hy {
        lines.push(report_line(h));
        reports.push(h);
        exit = exit.max(exit_for(h.verdict, h.converged));
    }
    Ok(Outcome { csv: Some(report_csv(&reports)), json: json!({ "kreiss": k, "hille_yosida": hy }), lines, exit })
}

fn read_vector(path: &std::path::Path) -> CliResult<Vec<Complex64>> {
    let s = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let raw: Vec<[f64; 2]> = serde_json::from_str(&s).map_err(Error::from)?;
    Ok(raw.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

#[derive(Serialize)]
struct StabilitySummary<'a> {
    forcing: &'a Forcing,
    dim: usize,
    steps: usize,
    v0_norm: f64,
}

fn cmd_stability(a: &StabilityArgs, seed: u64) -> CliResult<Outcome> {
    let b = match resolve(&a.op, None)? {
        Source::Matrix(m) => m,
        Source::Family(p) => build_operator(&p, a.dim, a.op.mode.build())?,
    };
    let n = b.dim();
    let (u0, v0) = match (&a.v0, a.perturb) {
        (Some(path), None) => (seeded_start(n, seed, 1.0).0, read_vector(path)?),
        (None, Some(eps)) if eps > 0.0 && eps.is_finite() => seeded_start(n, seed, eps),
        (None, Some(eps)) => return Err(usage(format!("--perturb must be positive, got {eps}"))),
        _ => return Err(usage("give --v0 FILE or --perturb EPS")),
    };
    let forcing = match a.forcing {
        ForcingArg::Zero => Forcing::Zero,
        ForcingArg::Seeded => Forcing::Generator { seed, scale: a.forcing_scale },
    };
    let v0_norm = v0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let run = SchemeRun::new(b, forcing.clone(), u0, v0, a.steps)?;
    let out = run_scheme(&run)?;
    let t = &out.trajectory;
    let line = format!(
        "stability steps={} M_hat={} max|v_n|/|v0|={} consistency={:.3e} unstable={} {}",
        a.steps,
        toeplitz_kreiss::theorems::format_number(t.m_hat),
        toeplitz_kreiss::theorems::format_number(t.max_amplification),
        t.consistency,
        t.unstable,
        t.verdict
    );
    let exit = match t.verdict {
        Verdict::Fail => EXIT_FAIL,
        Verdict::Advisory => EXIT_NUMERIC,
        Verdict::Pass => 0,
    };
    let summary = StabilitySummary { forcing: &forcing, dim: n, steps: a.steps, v0_norm };
    Ok(Outcome { lines: vec![line], csv: Some(out.to_csv()), json: json!({ "resolved": summary, "output": out }), exit })
}
