//! Command-line surface: config parsing, subcommand orchestration, and
//! artifact emission (CSV fields, JSON reports).
//!
//! Exit codes: 0 success, 2 config/IO/usage errors, 3 domain or numerical
//! failures, 10 existence criterion not met (zero degree / no multiplier
//! zero).  All floats are written with 17 significant digits and identical
//! inputs produce byte-identical outputs.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::curvature::{self, CurvatureError, PhiField};
use crate::diskgrid::{BoundaryField, DiskField, Grid};
use crate::expr::{EvalPoint, Expression};
use crate::meanfield::ProblemData;
use crate::oracle;
use crate::solver::{self, Diagnostics, SolverError, SolverParams, Tolerances};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_DEGREE_ZERO: u8 = 10;

/// Residual thresholds for `oracle` (differential identities / integral
/// identities) and the diagnostic pass bar for `verify`.
const ORACLE_TOL_DIFFERENTIAL: f64 = 1e-7;
const ORACLE_TOL_INTEGRAL: f64 = 1e-6;
const KW_PASS: f64 = 1e-6;
const GB_PASS: f64 = 1e-7;

#[derive(Debug)]
enum Failure {
    /// Bad config file, unusable arguments, or filesystem trouble (exit 2).
    Config(String),
    /// Well-formed request the mathematics rejects (exit 3).
    Domain(String),
}

type CmdResult = Result<u8, Failure>;

// ---------------------------------------------------------------------------
// Config file.

#[derive(Clone, Debug)]
pub struct Config {
    pub k_expr: Expression,
    pub h_expr: Expression,
    pub n_r: usize,
    pub n_theta: usize,
    pub s: f64,
    pub r_scan: f64,
    pub n_homotopy_steps: usize,
    pub tol_solution: f64,
    pub tol_kkt: f64,
    pub tol_constraint: f64,
    pub output_dir: PathBuf,
}

impl Config {
    pub fn solver_params(&self) -> SolverParams {
        SolverParams {
            s: self.s,
            r_scan: self.r_scan,
            n_homotopy_steps: self.n_homotopy_steps,
            tols: Tolerances {
                solution: self.tol_solution,
                kkt: self.tol_kkt,
                constraint: self.tol_constraint,
            },
        }
    }
}

/// Parse the flat `key=value` config format.  `#` starts a comment, blank
/// lines are ignored, unknown or repeated keys are errors, `K_expr` and
/// `h_expr` are required; everything else has a default.
pub fn parse_config(text: &str) -> Result<Config, String> {
    let mut k_expr = None;
    let mut h_expr = None;
    let mut n_r = 32usize;
    let mut n_theta = 64usize;
    let mut s = 0.05;
    let mut r_scan = 0.9;
    let mut n_homotopy_steps = 20usize;
    let mut tol_solution = 1e-8;
    let mut tol_kkt = 1e-7;
    let mut tol_constraint = 1e-8;
    let mut output_dir = PathBuf::from(".");
    let mut seen: Vec<String> = Vec::new();

    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let no = no + 1;
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {no}: expected key=value, got {line:?}"))?;
        let (key, value) = (key.trim(), value.trim());
        if seen.iter().any(|k| k == key) {
            return Err(format!("line {no}: key {key:?} given twice"));
        }
        seen.push(key.to_string());

        let int = |v: &str| -> Result<usize, String> {
            v.parse().map_err(|_| format!("line {no}: {key} wants an integer, got {v:?}"))
        };
        let real = |v: &str| -> Result<f64, String> {
            v.parse().map_err(|_| format!("line {no}: {key} wants a number, got {v:?}"))
        };
        match key {
            "K_expr" => {
                k_expr = Some(Expression::parse(value).map_err(|e| format!("line {no}: K_expr: {e}"))?)
            }
            "h_expr" => {
                h_expr = Some(Expression::parse(value).map_err(|e| format!("line {no}: h_expr: {e}"))?)
            }
            "n_r" => n_r = int(value)?,
            "n_theta" => n_theta = int(value)?,
            "s" => s = real(value)?,
            "r_scan" => r_scan = real(value)?,
            "n_homotopy_steps" => n_homotopy_steps = int(value)?,
            "tol_solution" => tol_solution = real(value)?,
            "tol_kkt" => tol_kkt = real(value)?,
            "tol_constraint" => tol_constraint = real(value)?,
            "output_dir" => output_dir = PathBuf::from(value),
            other => return Err(format!("line {no}: unknown key {other:?}")),
        }
    }

    let k_expr = k_expr.ok_or("missing required key K_expr")?;
    let h_expr = h_expr.ok_or("missing required key h_expr")?;
    for (name, v) in [
        ("tol_solution", tol_solution),
        ("tol_kkt", tol_kkt),
        ("tol_constraint", tol_constraint),
    ] {
        if !(v > 0.0) {
            return Err(format!("{name} must be positive, got {v}"));
        }
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(format!("s must lie in [0, 1], got {s}"));
    }
    if !(r_scan > 0.0 && r_scan <= 0.95) {
        return Err(format!("r_scan must lie in (0, 0.95], got {r_scan}"));
    }
    if n_homotopy_steps == 0 {
        return Err("n_homotopy_steps must be at least 1".to_string());
    }

    Ok(Config {
        k_expr,
        h_expr,
        n_r,
        n_theta,
        s,
        r_scan,
        n_homotopy_steps,
        tol_solution,
        tol_kkt,
        tol_constraint,
        output_dir,
    })
}

fn load_config(args: &CommonArgs) -> Result<Config, Failure> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&text)
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    if let Some(out) = &args.out {
        cfg.output_dir = out.clone();
    }
    Ok(cfg)
}

fn build_grid(cfg: &Config) -> Result<Grid, Failure> {
    Grid::new(cfg.n_r, cfg.n_theta).map_err(|e| Failure::Config(e.to_string()))
}

/// Sample `K_expr` on the grid nodes; evaluation failures are domain errors.
fn eval_k(grid: &Grid, cfg: &Config) -> Result<DiskField, Failure> {
    let mut out = DiskField::zeros(grid);
    for i in 0..grid.n_r {
        for j in 0..grid.n_theta {
            let p = EvalPoint::polar(grid.r[i], grid.theta[j]);
            out.0[(i, j)] = cfg
                .k_expr
                .eval(p)
                .map_err(|e| Failure::Domain(format!("K_expr at r={:.3}, theta={:.3}: {e}", p.r, p.theta)))?;
        }
    }
    Ok(out)
}

fn eval_h(grid: &Grid, cfg: &Config) -> Result<BoundaryField, Failure> {
    let mut out = BoundaryField::zeros(grid);
    for j in 0..grid.n_theta {
        let p = EvalPoint::boundary(grid.theta[j]);
        out.0[j] = cfg
            .h_expr
            .eval(p)
            .map_err(|e| Failure::Domain(format!("h_expr at theta={:.3}: {e}", p.theta)))?;
    }
    Ok(out)
}

fn assemble_phi(grid: &Grid, cfg: &Config) -> Result<PhiField, Failure> {
    let k = eval_k(grid, cfg)?;
    let h = eval_h(grid, cfg)?;
    let h_ext = curvature::harmonic_extend(grid, &h);
    curvature::build_phi(grid, k, h_ext).map_err(|e| match e {
        CurvatureError::NegativeDiscriminant { .. } => Failure::Domain(e.to_string()),
        other => Failure::Domain(other.to_string()),
    })
}

// ---------------------------------------------------------------------------
// Output plumbing.

/// 17-significant-digit float, or `null` for non-finite values (JSON has no
/// NaN; reports must stay schema-valid on partial failures).
fn jf(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn jpair(p: Option<(f64, f64)>) -> String {
    match p {
        Some((x, y)) => format!("[{},{}]", jf(x), jf(y)),
        None => "null".to_string(),
    }
}

fn jstr(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn diagnostics_json(d: &Diagnostics) -> String {
    format!(
        "{{\"kw_tau\":{},\"kw_F\":{},\"gauss_bonnet\":{},\"mass\":{},\"mass_bounds_ok\":{}}}",
        jf(d.kw_tau),
        jf(d.kw_f),
        jf(d.gauss_bonnet),
        jf(d.mass),
        d.mass_bounds_ok
    )
}

fn degree_json(rep: &curvature::DegreeReport, radius: f64) -> String {
    format!(
        "{{\"degree\":{},\"min_boundary_grad_norm\":{},\"n_samples_final\":{},\"refinement_depth\":{},\"circle_radius\":{}}}",
        rep.degree,
        jf(rep.min_boundary_grad_norm),
        rep.n_samples_final,
        rep.refinement_depth,
        jf(radius)
    )
}

/// Everything a solve report can carry; absent pieces render as JSON null.
struct ReportParts<'a> {
    stage: &'a str,
    degree: Option<i64>,
    converged: bool,
    residual_pde: Option<f64>,
    residual_bc: Option<f64>,
    a_star: Option<(f64, f64)>,
    mu_at_a_star: Option<(f64, f64)>,
    homotopy_trace: &'a [(f64, f64)],
    diagnostics: Option<&'a Diagnostics>,
}

fn report_json(p: &ReportParts) -> String {
    let trace: Vec<String> = p
        .homotopy_trace
        .iter()
        .map(|(s, r)| format!("[{},{}]", jf(*s), jf(*r)))
        .collect();
    format!(
        "{{\"converged\":{},\"residual_pde\":{},\"residual_bc\":{},\"a_star\":{},\"mu_at_a_star\":{},\"homotopy_trace\":[{}],\"diagnostics\":{},\"stage\":{},\"degree\":{}}}",
        p.converged,
        p.residual_pde.map_or("null".to_string(), jf),
        p.residual_bc.map_or("null".to_string(), jf),
        jpair(p.a_star),
        jpair(p.mu_at_a_star),
        trace.join(","),
        p.diagnostics.map_or("null".to_string(), diagnostics_json),
        jstr(p.stage),
        p.degree.map_or("null".to_string(), |d| d.to_string()),
    )
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Config(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_field(path: &Path, grid: &Grid, f: &DiskField) -> Result<(), Failure> {
    let mut buf = Vec::new();
    f.write_csv(grid, &mut buf)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    fs::write(path, buf).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_gradient(path: &Path, grid: &Grid, gx: &DiskField, gy: &DiskField) -> Result<(), Failure> {
    let mut buf = Vec::new();
    let mut emit = || -> std::io::Result<()> {
        writeln!(buf, "r,theta,gx,gy")?;
        for i in 0..grid.n_r {
            for j in 0..grid.n_theta {
                writeln!(
                    buf,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    grid.r[i],
                    grid.theta[j],
                    gx.0[(i, j)],
                    gy.0[(i, j)]
                )?;
            }
        }
        Ok(())
    };
    emit().map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    fs::write(path, buf).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn write_phi_artifacts(dir: &Path, grid: &Grid, phi: &PhiField) -> Result<(), Failure> {
    write_field(&dir.join("H.csv"), grid, &phi.h_ext)?;
    write_field(&dir.join("phi.csv"), grid, &phi.phi)?;
    write_gradient(&dir.join("grad_phi.csv"), grid, &phi.grad_phi.0, &phi.grad_phi.1)
}

// ---------------------------------------------------------------------------
// Subcommands.

fn cmd_phi(args: &CommonArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let phi = assemble_phi(&grid, &cfg)?;
    for w in &phi.warnings {
        eprintln!("warning: {w}");
    }
    ensure_dir(&cfg.output_dir)?;
    write_phi_artifacts(&cfg.output_dir, &grid, &phi)?;
    Ok(EXIT_OK)
}

fn cmd_degree(args: &CommonArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let phi = assemble_phi(&grid, &cfg)?;
    for w in &phi.warnings {
        eprintln!("warning: {w}");
    }
    let (rep, radius) = curvature::degree_with_fallback(&grid, &phi.grad_phi.0, &phi.grad_phi.1)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    println!("{}", degree_json(&rep, radius));
    if rep.degree == 0 {
        eprintln!("existence criterion not met: the criterion field has degree 0");
        Ok(EXIT_DEGREE_ZERO)
    } else {
        Ok(EXIT_OK)
    }
}

fn cmd_solve(args: &CommonArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let k = eval_k(&grid, &cfg)?;
    let h = eval_h(&grid, &cfg)?;
    ensure_dir(&cfg.output_dir)?;
    let report_path = cfg.output_dir.join("report.json");

    // Stage 1: criterion field.  Failure leaves a stage-marked report.
    let h_ext = curvature::harmonic_extend(&grid, &h);
    let phi = match curvature::build_phi(&grid, k.clone(), h_ext) {
        Ok(p) => p,
        Err(e) => {
            let rep = report_json(&ReportParts {
                stage: "phi",
                degree: None,
                converged: false,
                residual_pde: None,
                residual_bc: None,
                a_star: None,
                mu_at_a_star: None,
                homotopy_trace: &[],
                diagnostics: None,
            });
            write_text(&report_path, &format!("{rep}\n"))?;
            return Err(Failure::Domain(e.to_string()));
        }
    };
    for w in &phi.warnings {
        eprintln!("warning: {w}");
    }
    write_phi_artifacts(&cfg.output_dir, &grid, &phi)?;

    // Stage 2: existence criterion.  Advisory for the solve: a zero or
    // undecidable degree is warned about, never refused.
    let degree = match curvature::degree_with_fallback(&grid, &phi.grad_phi.0, &phi.grad_phi.1) {
        Ok((rep, _)) => {
            if rep.degree == 0 {
                eprintln!("warning: existence criterion not met (degree 0); attempting the solve anyway");
            }
            Some(rep.degree)
        }
        Err(e) => {
            eprintln!("warning: degree undecidable ({e}); attempting the solve anyway");
            None
        }
    };

    // Stage 3: interior-curvature problem for the reduced curvature Φ².
    let phi_sq = DiskField(phi.phi.0.map(|p| p * p));
    let params = cfg.solver_params();
    let reduced = match solver::solve_reduced(&grid, &phi_sq, &params) {
        Ok(r) => r,
        Err(e) => {
            let rep = report_json(&ReportParts {
                stage: "reduced",
                degree,
                converged: false,
                residual_pde: None,
                residual_bc: None,
                a_star: None,
                mu_at_a_star: None,
                homotopy_trace: &[],
                diagnostics: None,
            });
            write_text(&report_path, &format!("{rep}\n"))?;
            return match e {
                SolverError::NoZeroFound { .. } => {
                    eprintln!("no solution found: {e}");
                    Ok(EXIT_DEGREE_ZERO)
                }
                other => Err(Failure::Domain(other.to_string())),
            };
        }
    };

    // Stage 4: boundary-curvature continuation to the requested data.
    let fin = match solver::homotopy_h(&grid, &k, &h, &phi_sq, &reduced, &params) {
        Ok(r) => r,
        Err(e) => {
            let rep = report_json(&ReportParts {
                stage: "homotopy",
                degree,
                converged: false,
                residual_pde: None,
                residual_bc: None,
                a_star: reduced.a_star,
                mu_at_a_star: reduced.mu_at_a_star,
                homotopy_trace: &[],
                diagnostics: None,
            });
            write_text(&report_path, &format!("{rep}\n"))?;
            return Err(Failure::Domain(e.to_string()));
        }
    };

    let mut buf = Vec::new();
    fin.w
        .write_csv(&grid, &mut buf)
        .map_err(|e| Failure::Config(e.to_string()))?;
    fs::write(cfg.output_dir.join("w.csv"), buf)
        .map_err(|e| Failure::Config(format!("w.csv: {e}")))?;

    let rep = report_json(&ReportParts {
        stage: "done",
        degree,
        converged: fin.converged,
        residual_pde: Some(fin.residual_pde),
        residual_bc: Some(fin.residual_bc),
        a_star: fin.a_star,
        mu_at_a_star: fin.mu_at_a_star,
        homotopy_trace: &fin.homotopy_trace,
        diagnostics: Some(&fin.diagnostics),
    });
    write_text(&report_path, &format!("{rep}\n"))?;
    println!("{rep}");
    Ok(EXIT_OK)
}

fn cmd_scan(args: &CommonArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let phi = assemble_phi(&grid, &cfg)?;
    for w in &phi.warnings {
        eprintln!("warning: {w}");
    }
    let phi_sq = DiskField(phi.phi.0.map(|p| p * p));
    let data = ProblemData::reduced(&grid, solver::mix_toward_flat(&phi_sq, cfg.s), cfg.s);
    let params = cfg.solver_params();
    let anchors = solver::scan_anchors(cfg.r_scan);
    let field = solver::multiplier_at_points(&data, &anchors, &params.tols);

    let mut text = String::from("a1,a2,mu1,mu2,status\n");
    for fp in &field {
        let (m1, m2) = fp.mu.unwrap_or((f64::NAN, f64::NAN));
        let status = fp.status.replace(',', ";");
        text.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            fp.a.0, fp.a.1, m1, m2, status
        ));
    }
    ensure_dir(&cfg.output_dir)?;
    write_text(&cfg.output_dir.join("mu_field.csv"), &text)?;
    Ok(EXIT_OK)
}

fn parse_anchor(text: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::Config(format!("--a wants \"x,y\", got {text:?}"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    let x: f64 = x.trim().parse().map_err(|_| bad())?;
    let y: f64 = y.trim().parse().map_err(|_| bad())?;
    if !(x.hypot(y) < 1.0) {
        return Err(Failure::Config(format!(
            "anchor must lie strictly inside the unit disk, got |a| = {}",
            x.hypot(y)
        )));
    }
    Ok((x, y))
}

fn cmd_oracle(args: &CommonArgs, a: &str) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let a = parse_anchor(a)?;
    let rep = oracle::verify_bubble(&grid, a);
    println!(
        "{{\"a\":{},\"pde_residual\":{},\"boundary_residual\":{},\"mass_error\":{},\"moment_error\":{}}}",
        jpair(Some(rep.a)),
        jf(rep.pde_residual),
        jf(rep.boundary_residual),
        jf(rep.mass_error),
        jf(rep.moment_error)
    );
    let pass = rep.pde_residual <= ORACLE_TOL_DIFFERENTIAL
        && rep.boundary_residual <= ORACLE_TOL_DIFFERENTIAL
        && rep.mass_error <= ORACLE_TOL_INTEGRAL
        && rep.moment_error <= ORACLE_TOL_INTEGRAL;
    if pass {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Domain(format!(
            "bubble identities exceed tolerances at a = ({}, {})",
            a.0, a.1
        )))
    }
}

fn cmd_verify(args: &CommonArgs) -> CmdResult {
    let cfg = load_config(args)?;
    let grid = build_grid(&cfg)?;
    let k = eval_k(&grid, &cfg)?;
    let h = eval_h(&grid, &cfg)?;
    let path = cfg.output_dir.join("w.csv");
    let file = fs::File::open(&path)
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    let w = DiskField::read_csv(&grid, std::io::BufReader::new(file))
        .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;

    let (residual_pde, residual_bc) = solver::solution_residuals(&grid, &w, &k, &h)
        .map_err(|e| Failure::Domain(e.to_string()))?;
    let d = solver::diagnostics(&grid, &w, &k, &h);
    println!(
        "{{\"residual_pde\":{},\"residual_bc\":{},\"kw_tau\":{},\"kw_F\":{},\"gauss_bonnet\":{},\"mass\":{},\"mass_bounds_ok\":{}}}",
        jf(residual_pde),
        jf(residual_bc),
        jf(d.kw_tau),
        jf(d.kw_f),
        jf(d.gauss_bonnet),
        jf(d.mass),
        d.mass_bounds_ok
    );
    let pass = residual_pde <= cfg.tol_solution
        && residual_bc <= cfg.tol_solution
        && d.kw_tau.abs() <= KW_PASS
        && d.kw_f <= KW_PASS
        && d.gauss_bonnet.abs() <= GB_PASS
        && d.mass_bounds_ok;
    if pass {
        Ok(EXIT_OK)
    } else {
        Err(Failure::Domain("diagnostics outside tolerances".to_string()))
    }
}

// ---------------------------------------------------------------------------
// Argument surface.

#[derive(Args, Debug)]
struct CommonArgs {
    /// Config file: flat key=value lines, `#` comments.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's output_dir.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Evaluate the criterion field and write H.csv, phi.csv, grad_phi.csv.
    Phi(CommonArgs),
    /// Brouwer degree of the criterion gradient on the boundary circle.
    Degree(CommonArgs),
    /// Run the full pipeline; write w.csv and report.json.
    Solve(CommonArgs),
    /// Sample the constrained-minimization multiplier field; write mu_field.csv.
    Scan(CommonArgs),
    /// Check the translated-bubble identities at one anchor.
    Oracle {
        #[command(flatten)]
        common: CommonArgs,
        /// Anchor point "x,y" with |a| < 1.
        #[arg(long)]
        a: String,
    },
    /// Re-run the diagnostic suite on an existing w.csv.
    Verify(CommonArgs),
}

#[derive(Parser, Debug)]
#[command(
    name = "curvdisk",
    about = "Prescribed Gaussian and geodesic curvature on the unit disk: existence criterion and solver"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

pub fn run() -> u8 {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Phi(args) => cmd_phi(args),
        Cmd::Degree(args) => cmd_degree(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Scan(args) => cmd_scan(args),
        Cmd::Oracle { common, a } => cmd_oracle(common, a),
        Cmd::Verify(args) => cmd_verify(args),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            EXIT_CONFIG
        }
        Err(Failure::Domain(m)) => {
            eprintln!("error: {m}");
            EXIT_DOMAIN
        }
    }
}
