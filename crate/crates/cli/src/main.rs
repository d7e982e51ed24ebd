//! `quermass`: command-line harness over the core library.
//!
//! Exit codes: 0 success, 1 a checked hypothesis or assertion failed,
//! 2 bad arguments or unreadable input.

mod domains;

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use quermass::axisym::{compare_conventions, derivative_identity_residual, highest_term_integral};
use quermass::counterexample::assemble_counterexample;
use quermass::exactcomb::identity_suite;
use quermass::harmonics::{analyze_field, analyze_profile, default_lambda, eigenvalue, split, split_probe, HarmonicSpectrum};
use quermass::spheregeom::{curvature_table, Domain, Part};
use quermass::stability::{deficit, deficit_axisymmetric, deficit_compensated, DeficitReport, Theorem};
use quermass::symfun::{newton_tensor, sigma_all_from_eigenvalues, sigma_matrix, SymMatrix};
use quermass::Error;

#[derive(Debug, Parser, Serialize)]
#[command(name = "quermass", version, about = "Curvature integrals and stability deficits of nearly spherical domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum Command {
    /// Run the exact-rational identity suite.
    Identities(IdentitiesArgs),
    /// σ_k and Newton tensors of a symmetric matrix.
    Sigma(SigmaArgs),
    /// Curvature integrals of a field on S² or a named domain.
    Curvature(CurvatureArgs),
    /// Axially symmetric pipeline for a profile.
    Axisym(AxisymArgs),
    /// Spherical-harmonic tools.
    #[command(subcommand)]
    Harmonics(HarmonicsCommand),
    /// Bump counterexample over a sweep of κ.
    Counterexample(CounterexampleArgs),
    /// Deficit report for one of the stability theorems.
    Stability(StabilityArgs),
}

#[derive(Debug, Args, Serialize)]
struct Output {
    /// Write the JSON report here as well as to stdout.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct IdentitiesArgs {
    #[arg(long, default_value_t = 12)]
    n_max: i64,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct SigmaArgs {
    /// Rows separated by ';', entries by ',' (symmetrized).
    #[arg(long)]
    matrix: String,
    /// Also report the Newton tensor T_k.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum PartArg {
    Pos,
    Neg,
    Signed,
}

#[derive(Debug, Args, Serialize)]
struct CurvatureArgs {
    /// Field file (grid or spectral rows) or a named domain.
    #[arg(long)]
    field: String,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, value_enum, default_value_t = PartArg::Signed)]
    part: PartArg,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct AxisymArgs {
    /// `theta V` file, expression in theta, or a named domain.
    #[arg(long)]
    profile: String,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
enum HarmonicsCommand {
    /// Low/high frequency split of a field's coefficients.
    Split(SplitArgs),
}

#[derive(Debug, Args, Serialize)]
struct SplitArgs {
    #[arg(long)]
    field: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Eigenvalue threshold; defaults to 2(n+1)+1.
    #[arg(long)]
    lambda: Option<f64>,
    /// Write the CSV table here as well as to stdout.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct CounterexampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long, value_delimiter = ',', default_value = "16,32,64,128")]
    kappa_sweep: Vec<f64>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Args, Serialize)]
struct StabilityArgs {
    #[arg(long)]
    theorem: String,
    /// Named domain, field file (n = 2) or profile expression.
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long)]
    jprime: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Append one CSV row per run to this file.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) | Error::Parse { .. } | Error::Io(_) | Error::Domain(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Run = std::result::Result<(), Failure>;

fn emit(report: &Value, out: &Output) -> Run {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = writeln!(stdout, "{text}") {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            return Err(e.into());
        }
    }
    if let Some(p) = &out.json {
        std::fs::write(p, text + "\n")?;
    }
    Ok(())
}

fn config<T: Serialize>(name: &str, args: &T) -> Value {
    json!({ "command": name, "args": args })
}

fn check_k(n: usize, k: usize) -> Run {
    if n < 2 || k > n {
        return Err(Failure::Usage(format!("need n >= 2 and k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

fn identities(a: &IdentitiesArgs) -> Run {
    if !(1..=40).contains(&a.n_max) {
        return Err(Failure::Usage(format!("--n-max must lie in 1..=40, got {}", a.n_max)));
    }
    let suite = identity_suite(a.n_max);
    let failed: Vec<_> = suite.iter().filter(|r| r.kind == "verified" && !r.pass).collect();
    let mut by_name: Vec<(&str, &str, usize, usize)> = Vec::new();
    for r in &suite {
        match by_name.iter_mut().find(|e| e.0 == r.identity) {
            Some(e) => {
                e.2 += 1;
                e.3 += r.pass as usize;
            }
            None => by_name.push((&r.identity, r.kind, 1, r.pass as usize)),
        }
    }
    for (name, kind, total, pass) in &by_name {
        let status = match (pass == total, *kind) {
            (true, _) => "pass",
            (false, "verified") => "FAIL",
            (false, _) => "mismatch (reported, not asserted)",
        };
        eprintln!("{name:<40} {pass:>6}/{total:<6} {status}");
    }
    let records: Vec<Value> = suite
        .iter()
        .map(|r| json!({ "identity": r.identity, "params": r.params, "lhs": r.lhs, "rhs": r.rhs, "pass": r.pass }))
        .collect();
    emit(&json!({ "config": config("identities", a), "records": records }), &a.out)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(format!("{} identity checks failed", failed.len())))
    }
}

fn parse_matrix(src: &str) -> std::result::Result<SymMatrix, Failure> {
    let rows: Vec<Vec<f64>> = src
        .split(';')
        .map(|r| r.split(',').map(|v| v.trim().parse::<f64>()).collect::<std::result::Result<_, _>>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Failure::Usage(format!("--matrix: {e}")))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Failure::Usage("--matrix must be square".into()));
    }
    let dense: Vec<f64> = rows.concat();
    Ok(SymMatrix::from_dense_symmetrized(n, &dense))
}

fn sigma(a: &SigmaArgs) -> Run {
    let m = parse_matrix(&a.matrix)?;
    let n = m.n();
    let recursion: Vec<f64> = (0..=n).map(|k| sigma_matrix(&m, k)).collect::<quermass::Result<_>>()?;
    let eigen = sigma_all_from_eigenvalues(&m.eigenvalues());
    let tensor = match a.k {
        Some(k) => {
            let t = newton_tensor(&m, k)?.matrix;
            Some((0..n).map(|i| (0..n).map(|j| t.get(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>())
        }
        None => None,
    };
    emit(
        &json!({
            "config": config("sigma", a),
            "sigma": recursion,
            "sigma_from_eigenvalues": eigen,
            "eigenvalues": m.eigenvalues(),
            "newton_tensor": tensor,
        }),
        &a.out,
    )
}

fn curvature(a: &CurvatureArgs) -> Run {
    check_k(a.n, a.k)?;
    let d = domains::field_domain(&a.field, a.n)?;
    let t = curvature_table(&d, a.k)?;
    let part = match a.part {
        PartArg::Pos => Part::Positive,
        PartArg::Neg => Part::Negative,
        PartArg::Signed => Part::Signed,
    };
    emit(
        &json!({
            "config": config("curvature", a),
            "I_k": t.signed[a.k],
            "I_k_pos": t.positive[a.k],
            "I_k_neg": t.negative[a.k],
            "selected": t.get(a.k, part),
            "volume": t.volume,
            "barycenter": t.barycenter,
            "refinement_level": t.level,
        }),
        &a.out,
    )
}

fn axisym(a: &AxisymArgs) -> Run {
    check_k(a.n, a.k)?;
    if a.k == 0 {
        return Err(Failure::Usage("axisym needs k >= 1".into()));
    }
    let d = domains::profile_domain(&a.profile, a.n)?;
    let Domain::Axial(p) = &d else {
        return Err(Failure::Usage("axisym needs an axially symmetric profile".into()));
    };
    let table = curvature_table(&d, a.k)?;
    let thetas: Vec<f64> = (1..200).map(|i| std::f64::consts::PI * i as f64 / 200.0).collect();
    let highest = if a.k < a.n { Some(highest_term_integral(p, a.k)?) } else { None };
    let deriv = if a.k < a.n { Some(derivative_identity_residual(p, a.k, &thetas)?) } else { None };
    emit(
        &json!({
            "config": config("axisym", a),
            "I_k": table.signed[a.k],
            "I_k_pos": table.positive[a.k],
            "I_k_neg": table.negative[a.k],
            "table": table,
            "deficits": {
                "compensated": deficit_compensated(&d, a.k)?,
                "axisymmetric": deficit_axisymmetric(&d, a.k)?,
            },
            "identity_residuals": {
                "highest_term": highest.map(|h| json!({ "direct": h.direct, "by_parts": h.by_parts, "gap": (h.direct - h.by_parts).abs() })),
                "derivative_identity": deriv,
                "convention_difference": compare_conventions(p, a.k)?,
            },
        }),
        &a.out,
    )
}

fn harmonics_split(a: &SplitArgs) -> Run {
    let d = domains::field_domain(&a.field, a.n)?;
    let lambda = a.lambda.unwrap_or_else(|| default_lambda(a.n));
    let spec = match &d {
        Domain::Sphere(f) => analyze_field(f)?,
        Domain::Axial(p) => analyze_profile(p, 32),
        Domain::Bumps(_) => return Err(Failure::Usage("bump domains have no stored spectrum".into())),
    };
    let (low, high) = split(&spec, lambda)?;
    let mut csv = String::from("l,m,re,im,eigenvalue,band\n");
    let n = spec.n();
    match &spec {
        HarmonicSpectrum::Sphere { lmax, coeffs } => {
            let mut idx = 0;
            for l in 0..=*lmax {
                for m in 0..=l {
                    let c = coeffs[idx];
                    idx += 1;
                    if c.norm() > 0.0 {
                        let band = if eigenvalue(l, n) <= lambda { "low" } else { "high" };
                        writeln!(csv, "{l},{m},{:e},{:e},{},{band}", c.re, c.im, eigenvalue(l, n)).unwrap();
                    }
                }
            }
        }
        HarmonicSpectrum::Zonal { coeffs, .. } => {
            for (l, c) in coeffs.iter().enumerate() {
                if *c != 0.0 {
                    let band = if eigenvalue(l, n) <= lambda { "low" } else { "high" };
                    writeln!(csv, "{l},0,{c:e},0,{},{band}", eigenvalue(l, n)).unwrap();
                }
            }
        }
    }
    print!("{csv}");
    if let Some(p) = &a.csv {
        std::fs::write(p, &csv)?;
    }
    let total = spec.l2_squared();
    let frac = |s: &HarmonicSpectrum| if total > 0.0 { s.l2_squared() / total } else { 0.0 };
    let probe = match &d {
        Domain::Sphere(f) => Some(split_probe(f, lambda)?),
        _ => None,
    };
    let summary = json!({
        "config": config("harmonics_split", a),
        "lambda": lambda,
        "low_energy_fraction": frac(&low),
        "high_energy_fraction": frac(&high),
        "low_dirichlet": low.dirichlet(),
        "high_dirichlet": high.dirichlet(),
        "probe": probe,
    });
    if let Some(p) = &a.out.json {
        std::fs::write(p, serde_json::to_string_pretty(&summary).unwrap() + "\n")?;
    } else {
        eprintln!("{}", serde_json::to_string_pretty(&summary).unwrap());
    }
    Ok(())
}

fn counterexample(a: &CounterexampleArgs) -> Run {
    check_k(a.n, a.k)?;
    if a.kappa_sweep.is_empty() {
        return Err(Failure::Usage("--kappa-sweep is empty".into()));
    }
    let rows: Vec<_> = a
        .kappa_sweep
        .iter()
        .map(|&kappa| assemble_counterexample(a.n, a.k, a.eps, kappa))
        .collect::<quermass::Result<_>>()?;
    let mut csv = String::from("kappa,q,I_k,baseline,margin\n");
    for r in &rows {
        writeln!(csv, "{},{},{:.15e},{:.15e},{:.15e}", r.kappa, r.q, r.i_k, r.baseline, r.margin).unwrap();
    }
    if let Some(p) = &a.csv {
        std::fs::write(p, &csv)?;
    }
    eprint!("{csv}");
    let first_below = rows.iter().find(|r| r.margin < 0.0).map(|r| r.kappa);
    let decreasing = rows.windows(2).all(|w| w[1].kappa <= w[0].kappa || w[1].i_k < w[0].i_k);
    emit(
        &json!({
            "config": config("counterexample", a),
            "rows": rows,
            "first_kappa_below_baseline": first_below,
            "decreasing_in_kappa": decreasing,
        }),
        &a.out,
    )
}

fn append_csv(path: &Path, r: &DeficitReport, domain: &str) -> Run {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "theorem,domain,n,k,jprime,integral,baseline,deficit,dirichlet,ratio,in_theorem,hypotheses_hold")?;
    }
    let theorem = serde_json::to_value(r.theorem).unwrap();
    writeln!(
        f,
        "{},{domain},{},{},{},{:.15e},{:.15e},{:.15e},{:.15e},{},{},{}",
        theorem.as_str().unwrap(),
        r.n,
        r.k,
        r.jprime.map_or(String::new(), |j| j.to_string()),
        r.integral,
        r.baseline,
        r.deficit,
        r.dirichlet,
        r.ratio.map_or(String::new(), |v| format!("{v:.15e}")),
        r.in_theorem,
        r.hypotheses.iter().all(|h| h.holds),
    )?;
    Ok(())
}

fn stability(a: &StabilityArgs) -> Run {
    check_k(a.n, a.k)?;
    let theorem = Theorem::parse(&a.theorem)?;
    let d = match domains::named(&a.domain, a.n)? {
        Some(d) => d,
        None if a.n == 2 && Path::new(&a.domain).is_file() => domains::field_domain(&a.domain, 2)?,
        None => domains::profile_domain(&a.domain, a.n)?,
    };
    let r = deficit(theorem, &d, a.k, a.jprime, a.delta)?;
    if let Some(p) = &a.csv {
        append_csv(p, &r, &a.domain)?;
    }
    let hypotheses_hold = r.hypotheses.iter().all(|h| h.holds);
    emit(&json!({ "config": config("stability", a), "report": r }), &a.out)?;
    // Inside the theorem's range with its hypotheses met, the conclusion
    // is an assertion: a negative margin (or deficit) is a failure.
    let conclusion = r.margin.unwrap_or(r.deficit);
    if r.in_theorem && hypotheses_hold && conclusion < -1e-9 {
        return Err(Failure::Check(format!("deficit {conclusion:.3e} is negative under the theorem's hypotheses")));
    }
    if !hypotheses_hold {
        let failed: Vec<_> = r.hypotheses.iter().filter(|h| !h.holds).map(|h| h.name.as_str()).collect();
        return Err(Failure::Check(format!("hypotheses violated: {}", failed.join(", "))));
    }
    Ok(())
}

fn configure_threads() -> Run {
    let Ok(v) = std::env::var("QUERMASS_THREADS") else {
        return Ok(());
    };
    let threads: usize = v
        .parse()
        .ok()
        .filter(|t| *t > 0)
        .ok_or_else(|| Failure::Usage(format!("QUERMASS_THREADS must be a positive integer, got {v:?}")))?;
    if threads == 1 {
        quermass::par::set_mode(quermass::par::Mode::Sequential);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn dispatch(cli: &Cli) -> Run {
    configure_threads()?;
    match &cli.command {
        Command::Identities(a) => identities(a),
        Command::Sigma(a) => sigma(a),
        Command::Curvature(a) => curvature(a),
        Command::Axisym(a) => axisym(a),
        Command::Harmonics(HarmonicsCommand::Split(a)) => harmonics_split(a),
        Command::Counterexample(a) => counterexample(a),
        Command::Stability(a) => stability(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_parsing() {
        let m = parse_matrix("1, 2; 2, 3").ok().unwrap();
        assert_eq!(m.get(0, 1), 2.0);
        assert!(parse_matrix("1,2;3").is_err());
        assert!(parse_matrix("a").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
