//! Command-line front end.
//!
//! [`run`] parses the arguments, dispatches to the library and renders a
//! flat `key = value` document (or CSV). Exit codes: 0 on success, 2 on
//! input errors, 3 when an iterative method did not converge; in the last
//! case the result is still printed.

use std::ffi::OsString;
use std::fmt::{Display, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::dirichlet::{
    default_eps, harmonic_measure, harmonic_measure_halfplane, poisson_solve, wos_solve,
    BoundaryFunction, McEstimate, DEFAULT_MAX_STEPS,
};
use crate::equilibrium::{
    minimize_energy, EquilibriumResult, NodeSystem, DEFAULT_MAX_ITERS, DEFAULT_TOL,
};
use crate::error::Error;
use crate::geom::io::{parse_domain, parse_point, parse_point_list};
use crate::geom::{BoundaryArc, DomainSpec, ExtPoint};
use crate::green::{
    bernstein_walsh_check_on, green_axioms_check, green_eval, green_normal_derivative_measure,
    GreenSpec, PolynomialC, DEFAULT_FD_STEP,
};
use crate::hausdorff::{
    box_dimension, capacity_hausdorff_report, default_deltas, hausdorff_profile, PointCloud,
};
use crate::means::{
    mollify, space_mean, submean_check, surface_mean, MollifierSpec, ScalarField, SURFACE_NODES,
};
use crate::potential::io::{parse_measure, write_measure};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "potkit",
    version,
    about = "Numerical logarithmic potential theory in the complex plane"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for Monte Carlo walks and random probes.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for Monte Carlo sampling; never changes the output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Kv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Kv,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the Dirichlet problem at one or more points.
    SolveDirichlet(SolveArgs),
    /// Harmonic measure of a boundary arc or interval.
    HarmonicMeasure(MeasureArgs),
    /// Equilibrium measure of a node system.
    Equilibrium(EquilibriumArgs),
    /// Logarithmic capacity of a node system.
    Capacity(CapacityArgs),
    /// Green's function values, axiom checks and normal-derivative measure.
    Green(GreenArgs),
    /// Bernstein–Walsh growth check for a polynomial.
    BwCheck(BwArgs),
    /// Box-cover Hausdorff content profile of a point cloud.
    Hausdorff(HausdorffArgs),
    /// Circle and disc means, submean margins and mollification.
    Means(MeansArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DomainKind {
    Disc,
    #[value(name = "half_plane", alias = "half-plane")]
    HalfPlane,
    #[value(name = "disc_complement", alias = "disc-complement")]
    DiscComplement,
    Polygon,
}

#[derive(Clone, Debug)]
struct PointList(Vec<Complex64>);

#[derive(Clone, Debug)]
struct Pair(f64, f64);

#[derive(Clone, Debug)]
struct FloatList(Vec<f64>);

fn point_list(s: &str) -> Result<PointList, String> {
    let pts = parse_point_list(s)?;
    if pts.is_empty() {
        return Err("expected at least one `x,y` point".into());
    }
    Ok(PointList(pts))
}

/// `a,b`; infinities are allowed.
fn pair(s: &str) -> Result<Pair, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected `a,b`, got `{s}`"))?;
    let num = |v: &str| {
        v.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| !x.is_nan())
            .ok_or_else(|| format!("`{v}` is not a number"))
    };
    Ok(Pair(num(a)?, num(b)?))
}

fn float_list(s: &str) -> Result<FloatList, String> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("`{v}` is not a finite number"))
        })
        .collect::<Result<_, _>>()
        .map(FloatList)
}

fn ext_point(s: &str) -> Result<ExtPoint, String> {
    if matches!(s.trim(), "inf" | "infinity" | "∞") {
        Ok(ExtPoint::Infinity)
    } else {
        parse_point(s).map(ExtPoint::Finite)
    }
}

#[derive(Debug, Args)]
struct DomainArgs {
    /// Domain kind.
    #[arg(long, value_enum, conflicts_with = "domain_file")]
    domain: Option<DomainKind>,
    /// Domain specification file (`key = value` lines).
    #[arg(long)]
    domain_file: Option<PathBuf>,
    /// Disc center as `re,im`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    center: Complex64,
    /// Disc radius.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
    /// Polygon vertices as `x,y; x,y; ...`, counter-clockwise.
    #[arg(long, value_parser = point_list, allow_hyphen_values = true)]
    vertices: Option<PointList>,
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Boundary data: re, im, re2, const:C or indicator:T0:T1.
    #[arg(long, default_value = "re", conflicts_with = "f_table")]
    f: String,
    /// Boundary data table file with `t,value` lines.
    #[arg(long)]
    f_table: Option<PathBuf>,
    /// Evaluation point `re,im`; repeat for several points.
    #[arg(long = "z", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    /// Use walk-on-spheres instead of the Poisson integral.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 10_000)]
    n_samples: usize,
    /// Absorption shell; defaults to 1e-6 of the domain diameter.
    #[arg(long, allow_hyphen_values = true)]
    eps: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    max_steps: usize,
    /// Quadrature nodes for the Poisson integral.
    #[arg(long, default_value_t = 4096)]
    n_nodes: usize,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[command(flatten)]
    domain: DomainArgs,
    #[arg(long = "z", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    /// Real interval `a,b` of the half-plane boundary (infinite ends allowed).
    #[arg(long, value_parser = pair, allow_hyphen_values = true, conflicts_with = "arc")]
    interval: Option<Pair>,
    /// Boundary arc `t0,t1` in the canonical parameter; the full boundary by default.
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    arc: Option<Pair>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum GeneratorKind {
    Circle,
    Segment,
    Polygon,
    Polyline,
}

#[derive(Debug, Args)]
struct NodeArgs {
    /// Node generator.
    #[arg(long, value_enum, conflicts_with = "measure_file")]
    generator: Option<GeneratorKind>,
    /// Explicit nodes and element lengths from a measure file.
    #[arg(long)]
    measure_file: Option<PathBuf>,
    /// Number of nodes.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    center: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
    /// Segment start.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "-1,0")]
    a: Complex64,
    /// Segment end.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "1,0")]
    b: Complex64,
    #[arg(long, value_parser = point_list, allow_hyphen_values = true)]
    vertices: Option<PointList>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    max_iters: usize,
    #[arg(long, default_value_t = DEFAULT_TOL, allow_hyphen_values = true)]
    tol: f64,
}

#[derive(Debug, Args)]
struct EquilibriumArgs {
    #[command(flatten)]
    nodes: NodeArgs,
    /// Write the equilibrium measure to this file.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CapacityArgs {
    #[command(flatten)]
    nodes: NodeArgs,
}

#[derive(Debug, Args)]
struct GreenArgs {
    #[command(flatten)]
    domain: DomainArgs,
    /// Pole `re,im`, or `inf` for disc complements.
    #[arg(long, value_parser = ext_point, allow_hyphen_values = true)]
    pole: ExtPoint,
    #[arg(long = "z", value_parser = parse_point, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    /// Run the axiom checks at seeded random probes.
    #[arg(long)]
    axioms: bool,
    #[arg(long, default_value_t = 50)]
    n_probes: usize,
    /// Arc `t0,t1` for the normal-derivative measure (disc domains).
    #[arg(long, value_parser = pair, allow_hyphen_values = true)]
    arc: Option<Pair>,
    /// Relative finite-difference step for the normal derivative.
    #[arg(long, default_value_t = DEFAULT_FD_STEP, allow_hyphen_values = true)]
    h: f64,
    #[arg(long, default_value_t = 4096)]
    n_nodes: usize,
}

#[derive(Debug, Args)]
struct BwArgs {
    /// Coefficients `re,im; re,im; ...`, lowest degree first.
    #[arg(long, value_parser = point_list, allow_hyphen_values = true, conflicts_with = "poly_file")]
    coeffs: Option<PointList>,
    /// File with one `re,im` coefficient per line, lowest degree first.
    #[arg(long)]
    poly_file: Option<PathBuf>,
    /// Probe outside the disc; repeat for several probes.
    #[arg(long = "z", required = true, value_parser = parse_point, allow_hyphen_values = true)]
    z: Vec<Complex64>,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    center: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CloudKind {
    Segment,
    Circle,
    Polyline,
    Points,
}

#[derive(Debug, Args)]
struct HausdorffArgs {
    #[arg(long, value_enum, default_value_t = CloudKind::Segment)]
    cloud: CloudKind,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    a: Complex64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "1,0")]
    b: Complex64,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    center: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
    #[arg(long, value_parser = point_list, allow_hyphen_values = true)]
    vertices: Option<PointList>,
    /// File with one `x,y` point per line.
    #[arg(long)]
    points_file: Option<PathBuf>,
    /// Exponent of the Hausdorff content.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    p: f64,
    /// Descending grid sizes `d1,d2,...`.
    #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
    deltas: Option<FloatList>,
    /// Also compare with the equilibrium capacity.
    #[arg(long)]
    capacity: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MeanKind {
    Point,
    Surface,
    Space,
    Submean,
    Mollify,
}

#[derive(Debug, Args)]
struct MeansArgs {
    /// Field: re, im, re2, im2, re3, abs2, pos_re, const:C or log:RE,IM.
    #[arg(long, default_value = "re")]
    field: String,
    #[arg(long, value_enum, default_value_t = MeanKind::Surface)]
    kind: MeanKind,
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true, default_value = "0,0")]
    center: Complex64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    radius: f64,
    #[arg(long, default_value_t = SURFACE_NODES)]
    n_nodes: usize,
    #[arg(long, default_value_t = 32)]
    n_radial: usize,
    #[arg(long, default_value_t = 256)]
    n_angular: usize,
    /// Radii for the submean check, `r1,r2,...`.
    #[arg(long, value_parser = float_list, allow_hyphen_values = true)]
    radii: Option<FloatList>,
    /// Mollifier scale.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    scale: f64,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

enum CliError {
    Input(String),
    NotConverged(Box<Doc>, String),
}

type CliResult<T> = Result<T, CliError>;

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

/// Prefixes library errors with the flag that supplied the bad value.
fn at(flag: &'static str) -> impl Fn(Error) -> CliError {
    move |e| CliError::Input(format!("{flag}: {e}"))
}

#[derive(Clone, Debug, Default)]
struct Doc {
    header: Vec<(String, String)>,
    results: Vec<(String, String)>,
    table: String,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Doc {
    fn new(command: &str) -> Self {
        let mut doc = Doc::default();
        doc.param("command", command);
        doc
    }

    fn param(&mut self, key: &str, value: impl Display) {
        self.header.push((key.to_string(), value.to_string()));
    }

    fn result(&mut self, key: &str, value: impl Display) {
        self.results.push((key.to_string(), value.to_string()));
    }

    fn table(&mut self, name: &str, columns: &[&str]) {
        self.table = name.to_string();
        self.columns = columns.iter().map(|c| c.to_string()).collect();
    }

    fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }

    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Kv => {
                for (k, v) in self.header.iter().chain(&self.results) {
                    let _ = writeln!(out, "{k} = {v}");
                }
                for (i, row) in self.rows.iter().enumerate() {
                    for (c, v) in self.columns.iter().zip(row) {
                        let _ = writeln!(out, "{}.{i}.{c} = {v}", self.table);
                    }
                }
            }
            Format::Csv => {
                for (k, v) in &self.header {
                    let _ = writeln!(out, "# {k} = {v}");
                }
                if self.rows.is_empty() {
                    let keys: Vec<&str> = self.results.iter().map(|(k, _)| k.as_str()).collect();
                    let vals: Vec<&str> = self.results.iter().map(|(_, v)| v.as_str()).collect();
                    let _ = writeln!(out, "{}", keys.join(","));
                    let _ = writeln!(out, "{}", vals.join(","));
                } else {
                    for (k, v) in &self.results {
                        let _ = writeln!(out, "# {k} = {v}");
                    }
                    let _ = writeln!(out, "{}", self.columns.join(","));
                    for row in &self.rows {
                        let _ = writeln!(out, "{}", row.join(","));
                    }
                }
            }
        }
        out
    }
}

fn cpx(z: Complex64) -> String {
    format!("{},{}", z.re, z.im)
}

fn read_file(flag: &'static str, path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| input(format!("{flag}: cannot read {}: {e}", path.display())))
}

fn check_positive(flag: &str, value: f64) -> CliResult<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(input(format!(
            "{flag} must be positive and finite, got {value}"
        )))
    }
}

fn check_at_least(flag: &str, value: usize, min: usize) -> CliResult<()> {
    if value >= min {
        Ok(())
    } else {
        Err(input(format!("{flag} must be at least {min}, got {value}")))
    }
}

fn build_domain(args: &DomainArgs) -> CliResult<DomainSpec> {
    if let Some(path) = &args.domain_file {
        return parse_domain(&read_file("--domain-file", path)?).map_err(at("--domain-file"));
    }
    let kind = args
        .domain
        .ok_or_else(|| input("--domain or --domain-file is required"))?;
    match kind {
        DomainKind::Disc => DomainSpec::disc(args.center, args.radius).map_err(at("--radius")),
        DomainKind::DiscComplement => {
            DomainSpec::disc_complement(args.center, args.radius).map_err(at("--radius"))
        }
        DomainKind::HalfPlane => Ok(DomainSpec::UpperHalfPlane),
        DomainKind::Polygon => {
            let verts = args
                .vertices
                .as_ref()
                .ok_or_else(|| input("--vertices is required for --domain polygon"))?;
            DomainSpec::polygon(verts.0.clone()).map_err(at("--vertices"))
        }
    }
}

fn describe_domain(doc: &mut Doc, d: &DomainSpec) {
    match d {
        DomainSpec::Disc { center, radius } | DomainSpec::DiscComplement { center, radius } => {
            let kind = if matches!(d, DomainSpec::Disc { .. }) {
                "disc"
            } else {
                "disc_complement"
            };
            doc.param("domain", kind);
            doc.param("center", cpx(*center));
            doc.param("radius", radius);
        }
        DomainSpec::UpperHalfPlane => doc.param("domain", "half_plane"),
        DomainSpec::Polygon(p) => {
            doc.param("domain", "polygon");
            let verts: Vec<String> = p.vertices().iter().map(|v| cpx(*v)).collect();
            doc.param("vertices", verts.join("; "));
        }
    }
}

fn parse_boundary_function(spec: &str) -> CliResult<BoundaryFunction> {
    let bad = || input(format!("--f: unknown boundary function `{spec}`"));
    match spec {
        "re" => Ok(BoundaryFunction::Re),
        "im" => Ok(BoundaryFunction::Im),
        "re2" => Ok(BoundaryFunction::Re2),
        _ => {
            if let Some(c) = spec.strip_prefix("const:") {
                let c: f64 = c
                    .parse()
                    .ok()
                    .filter(|c: &f64| c.is_finite())
                    .ok_or_else(bad)?;
                Ok(BoundaryFunction::Constant(c))
            } else if let Some(rest) = spec.strip_prefix("indicator:") {
                let (t0, t1) = rest.split_once(':').ok_or_else(bad)?;
                let t0: f64 = t0.parse().map_err(|_| bad())?;
                let t1: f64 = t1.parse().map_err(|_| bad())?;
                BoundaryFunction::indicator(t0, t1).map_err(at("--f"))
            } else {
                Err(bad())
            }
        }
    }
}

fn parse_table(text: &str) -> CliResult<BoundaryFunction> {
    let mut params = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Pair(t, v) =
            pair(line).map_err(|e| input(format!("--f-table: line {}: {e}", i + 1)))?;
        params.push(t);
        values.push(v);
    }
    BoundaryFunction::sampled(params, values).map_err(at("--f-table"))
}

fn mc_results(doc: &mut Doc, est: &McEstimate) {
    doc.result("mean", est.mean);
    doc.result("std_error", est.std_error);
    doc.result("n_samples", est.n_samples);
    doc.result("n_absorbed", est.n_absorbed);
    doc.result("n_escaped", est.n_escaped);
    doc.result("mean_steps", est.mean_steps);
}

fn solve_dirichlet(args: &SolveArgs, seed: u64) -> CliResult<Doc> {
    let domain = build_domain(&args.domain)?;
    let (f, f_label) = match &args.f_table {
        Some(path) => (
            parse_table(&read_file("--f-table", path)?)?,
            format!("table:{}", path.display()),
        ),
        None => (parse_boundary_function(&args.f)?, args.f.clone()),
    };
    let mut doc = Doc::new("solve-dirichlet");
    describe_domain(&mut doc, &domain);
    doc.param("f", &f_label);
    doc.param("seed", seed);

    if !args.mc {
        let DomainSpec::Disc { center, radius } = domain else {
            return Err(input(
                "--mc is required: the Poisson integral is only available on discs",
            ));
        };
        check_at_least("--n-nodes", args.n_nodes, 64)?;
        doc.param("method", "poisson");
        doc.param("n_nodes", args.n_nodes);
        let values: Vec<f64> = args
            .z
            .iter()
            .map(|&z| poisson_solve(center, radius, &f, z, args.n_nodes).map_err(at("--z")))
            .collect::<CliResult<_>>()?;
        if let [v] = values[..] {
            doc.param("z", cpx(args.z[0]));
            doc.result("value", v);
        } else {
            doc.table("probe", &["z_re", "z_im", "value"]);
            for (z, v) in args.z.iter().zip(values) {
                doc.row(vec![z.re.to_string(), z.im.to_string(), v.to_string()]);
            }
        }
        return Ok(doc);
    }

    check_at_least("--n-samples", args.n_samples, 100)?;
    check_at_least("--max-steps", args.max_steps, 1)?;
    if let Some(eps) = args.eps {
        check_positive("--eps", eps)?;
    }
    doc.param("method", "wos");
    doc.param("n_samples", args.n_samples);
    doc.param("max_steps", args.max_steps);
    let mut failed = None;
    let mut estimates = Vec::with_capacity(args.z.len());
    for &z in &args.z {
        if !domain.contains(z) {
            return Err(input(format!(
                "--z: point {} is not inside the domain",
                cpx(z)
            )));
        }
        let eps = args.eps.unwrap_or_else(|| default_eps(&domain, z));
        let est = match wos_solve(&domain, &f, z, args.n_samples, eps, args.max_steps, seed) {
            Ok(est) => est,
            Err(Error::TooFewAbsorbed(est)) => {
                failed = Some(format!(
                    "only {} of {} walks were absorbed at z = {}; increase --max-steps or --eps",
                    est.n_absorbed,
                    est.n_samples,
                    cpx(z)
                ));
                est
            }
            Err(e) => return Err(at("--z")(e)),
        };
        estimates.push((z, eps, est));
    }
    if let [(z, eps, est)] = &estimates[..] {
        doc.param("eps", eps);
        doc.param("z", cpx(*z));
        mc_results(&mut doc, est);
    } else {
        doc.table(
            "probe",
            &[
                "z_re",
                "z_im",
                "eps",
                "mean",
                "std_error",
                "n_absorbed",
                "n_escaped",
                "mean_steps",
            ],
        );
        for (z, eps, e) in &estimates {
            doc.row(vec![
                z.re.to_string(),
                z.im.to_string(),
                eps.to_string(),
                e.mean.to_string(),
                e.std_error.to_string(),
                e.n_absorbed.to_string(),
                e.n_escaped.to_string(),
                e.mean_steps.to_string(),
            ]);
        }
    }
    match failed {
        Some(msg) => Err(CliError::NotConverged(Box::new(doc), msg)),
        None => Ok(doc),
    }
}

fn harmonic_measure_cmd(args: &MeasureArgs) -> CliResult<Doc> {
    let domain = build_domain(&args.domain)?;
    let mut doc = Doc::new("harmonic-measure");
    describe_domain(&mut doc, &domain);
    let eval: Box<dyn Fn(Complex64) -> CliResult<f64>> = if let Some(Pair(a, b)) = args.interval {
        if domain != DomainSpec::UpperHalfPlane {
            return Err(input(
                "--interval applies to --domain half_plane; use --arc otherwise",
            ));
        }
        if a >= b {
            return Err(input(format!("--interval needs a < b, got {a},{b}")));
        }
        doc.param("interval", format!("{a},{b}"));
        Box::new(move |z| harmonic_measure_halfplane(z, a, b).map_err(at("--z")))
    } else {
        let arc = match args.arc {
            Some(Pair(t0, t1)) => BoundaryArc::new(domain.clone(), t0, t1).map_err(at("--arc"))?,
            None => BoundaryArc::full(domain.clone()),
        };
        doc.param("arc", format!("{},{}", arc.t0, arc.t1));
        let domain = domain.clone();
        Box::new(move |z| match harmonic_measure(&domain, z, &arc) {
            Err(Error::Unsupported(msg)) => Err(input(format!("--domain: {msg}"))),
            other => other.map_err(at("--z")),
        })
    };
    let values: Vec<f64> = args.z.iter().map(|&z| eval(z)).collect::<CliResult<_>>()?;
    if let [v] = values[..] {
        doc.param("z", cpx(args.z[0]));
        doc.result("value", v);
    } else {
        doc.table("probe", &["z_re", "z_im", "value"]);
        for (z, v) in args.z.iter().zip(values) {
            doc.row(vec![z.re.to_string(), z.im.to_string(), v.to_string()]);
        }
    }
    Ok(doc)
}

fn build_nodes(args: &NodeArgs, doc: &mut Doc) -> CliResult<NodeSystem> {
    if let Some(path) = &args.measure_file {
        let mu =
            parse_measure(&read_file("--measure-file", path)?).map_err(at("--measure-file"))?;
        doc.param("generator", "explicit");
        doc.param("measure_file", path.display());
        return Ok(NodeSystem::from_measure(&mu));
    }
    let kind = args
        .generator
        .ok_or_else(|| input("--generator or --measure-file is required"))?;
    let vertices = || {
        args.vertices
            .as_ref()
            .map(|v| v.0.clone())
            .ok_or_else(|| input("--vertices is required for this generator"))
    };
    let ns = match kind {
        GeneratorKind::Circle => {
            check_positive("--radius", args.radius)?;
            doc.param("generator", "circle");
            doc.param("center", cpx(args.center));
            doc.param("radius", args.radius);
            NodeSystem::circle(args.center, args.radius, args.n).map_err(at("--n"))
        }
        GeneratorKind::Segment => {
            doc.param("generator", "segment");
            doc.param("a", cpx(args.a));
            doc.param("b", cpx(args.b));
            NodeSystem::segment(args.a, args.b, args.n).map_err(at("--a/--b"))
        }
        GeneratorKind::Polygon => {
            let v = vertices()?;
            doc.param("generator", "polygon");
            doc.param(
                "vertices",
                v.iter().map(|z| cpx(*z)).collect::<Vec<_>>().join("; "),
            );
            NodeSystem::polygon_boundary(v, args.n).map_err(at("--vertices"))
        }
        GeneratorKind::Polyline => {
            let v = vertices()?;
            doc.param("generator", "polyline");
            doc.param(
                "vertices",
                v.iter().map(|z| cpx(*z)).collect::<Vec<_>>().join("; "),
            );
            NodeSystem::polyline(v, args.n).map_err(at("--vertices"))
        }
    }?;
    doc.param("n", ns.len());
    Ok(ns)
}

fn check_optimizer(args: &NodeArgs, doc: &mut Doc) -> CliResult<()> {
    check_positive("--tol", args.tol)?;
    check_at_least("--max-iters", args.max_iters, 1)?;
    doc.param("max_iters", args.max_iters);
    doc.param("tol", args.tol);
    Ok(())
}

fn optimize(ns: &NodeSystem, args: &NodeArgs) -> CliResult<(EquilibriumResult, bool)> {
    match minimize_energy(ns, args.max_iters, args.tol) {
        Ok(r) => Ok((r, true)),
        Err(Error::NotConverged(best)) => Ok((*best, false)),
        Err(Error::DuplicateNodes(i, j)) => Err(input(format!("nodes {i} and {j} coincide"))),
        Err(e) => Err(at("--n")(e)),
    }
}

fn equilibrium_results(doc: &mut Doc, r: &EquilibriumResult) {
    doc.result("energy", r.energy);
    doc.result("capacity", r.capacity);
    doc.result("frostman_residual", r.frostman_residual);
    doc.result("projected_gradient_norm", r.projected_gradient_norm);
    doc.result("iterations", r.iterations);
    doc.result("converged", r.converged);
}

fn not_converged(doc: Doc, r: &EquilibriumResult) -> CliError {
    let msg = format!(
        "optimizer stopped after {} iterations with projected-gradient norm {}; raise --max-iters or --tol",
        r.iterations, r.projected_gradient_norm
    );
    CliError::NotConverged(Box::new(doc), msg)
}

fn equilibrium_cmd(args: &EquilibriumArgs) -> CliResult<Doc> {
    let mut doc = Doc::new("equilibrium");
    let ns = build_nodes(&args.nodes, &mut doc)?;
    check_optimizer(&args.nodes, &mut doc)?;
    check_at_least("--n", ns.len(), 2)?;
    let (r, converged) = optimize(&ns, &args.nodes)?;
    equilibrium_results(&mut doc, &r);
    if let Some(path) = &args.output {
        std::fs::write(path, write_measure(&r.measure))
            .map_err(|e| input(format!("--output: cannot write {}: {e}", path.display())))?;
        doc.result("measure_file", path.display());
    }
    doc.table("node", &["x", "y", "weight", "element_length"]);
    for ((z, w), l) in r
        .measure
        .nodes()
        .iter()
        .zip(r.measure.weights())
        .zip(r.measure.element_lengths())
    {
        doc.row(vec![
            z.re.to_string(),
            z.im.to_string(),
            w.to_string(),
            l.to_string(),
        ]);
    }
    if converged {
        Ok(doc)
    } else {
        Err(not_converged(doc, &r))
    }
}

fn capacity_cmd(args: &CapacityArgs) -> CliResult<Doc> {
    let mut doc = Doc::new("capacity");
    let ns = build_nodes(&args.nodes, &mut doc)?;
    check_optimizer(&args.nodes, &mut doc)?;
    if ns.len() < 2 {
        doc.result("capacity", 0.0);
        doc.result("polar", true);
        return Ok(doc);
    }
    let (r, converged) = optimize(&ns, &args.nodes)?;
    doc.result("capacity", r.capacity);
    doc.result("energy", r.energy);
    doc.result("iterations", r.iterations);
    doc.result("converged", r.converged);
    if converged {
        Ok(doc)
    } else {
        Err(not_converged(doc, &r))
    }
}

fn green_cmd(args: &GreenArgs, seed: u64) -> CliResult<Doc> {
    let domain = build_domain(&args.domain)?;
    let mut doc = Doc::new("green");
    describe_domain(&mut doc, &domain);
    doc.param("pole", args.pole);
    let g = GreenSpec::new(domain.clone(), args.pole).map_err(at("--pole"))?;
    if args.z.is_empty() && !args.axioms && args.arc.is_none() {
        return Err(input("nothing to do: pass --z, --axioms or --arc"));
    }
    let values: Vec<f64> = args
        .z
        .iter()
        .map(|&z| green_eval(&g, z).map_err(at("--z")))
        .collect::<CliResult<_>>()?;
    if let [v] = values[..] {
        doc.param("z", cpx(args.z[0]));
        doc.result("value", v);
    } else if !values.is_empty() {
        doc.table("probe", &["z_re", "z_im", "value"]);
        for (z, v) in args.z.iter().zip(values) {
            doc.row(vec![z.re.to_string(), z.im.to_string(), v.to_string()]);
        }
    }
    if args.axioms {
        check_at_least("--n-probes", args.n_probes, 10)?;
        doc.param("seed", seed);
        doc.param("n_probes", args.n_probes);
        let report = green_axioms_check(&g, args.n_probes, seed).map_err(at("--pole"))?;
        doc.result("axioms_passed", report.passed());
        doc.result("min_value", report.min_value);
        doc.result("harmonic_residual", report.harmonic_residual);
        doc.result("pole_residual", report.pole_residual);
        doc.result("max_boundary_value", report.max_boundary_value);
    }
    if let Some(Pair(t0, t1)) = args.arc {
        let arc = BoundaryArc::new(domain, t0, t1).map_err(at("--arc"))?;
        if !(1e-6..=1e-3).contains(&args.h) {
            return Err(input(format!(
                "--h must lie in [1e-6, 1e-3], got {}",
                args.h
            )));
        }
        check_at_least("--n-nodes", args.n_nodes, 16)?;
        doc.param("arc", format!("{},{}", arc.t0, arc.t1));
        doc.param("h", args.h);
        doc.param("n_nodes", args.n_nodes);
        let v = green_normal_derivative_measure(&g, &arc, args.h, args.n_nodes)
            .map_err(at("--domain"))?;
        doc.result("normal_derivative_measure", v);
    }
    Ok(doc)
}

fn bw_cmd(args: &BwArgs) -> CliResult<Doc> {
    let coeffs = match (&args.coeffs, &args.poly_file) {
        (Some(c), _) => c.0.clone(),
        (None, Some(path)) => {
            let text = read_file("--poly-file", path)?;
            let lines: Vec<&str> = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .collect();
            lines
                .iter()
                .map(|l| parse_point(l).map_err(|e| input(format!("--poly-file: {e}"))))
                .collect::<CliResult<_>>()?
        }
        (None, None) => return Err(input("--coeffs or --poly-file is required")),
    };
    check_positive("--radius", args.radius)?;
    let p = PolynomialC::new(coeffs).map_err(at("--coeffs"))?;
    let mut doc = Doc::new("bw-check");
    doc.param(
        "coeffs",
        p.coefficients()
            .iter()
            .map(|c| cpx(*c))
            .collect::<Vec<_>>()
            .join("; "),
    );
    doc.param("center", cpx(args.center));
    doc.param("radius", args.radius);
    let report =
        bernstein_walsh_check_on(&p, args.center, args.radius, &args.z).map_err(at("--z"))?;
    doc.result("degree", report.degree);
    doc.result("sup_norm", report.sup_norm);
    doc.result("holds", report.holds());
    doc.table("probe", &["z_re", "z_im", "bound", "margin"]);
    for ((z, b), m) in args.z.iter().zip(&report.bounds).zip(&report.margins) {
        doc.row(vec![
            z.re.to_string(),
            z.im.to_string(),
            b.to_string(),
            m.to_string(),
        ]);
    }
    Ok(doc)
}

fn hausdorff_cmd(args: &HausdorffArgs) -> CliResult<Doc> {
    let mut doc = Doc::new("hausdorff");
    let cloud = match args.cloud {
        CloudKind::Segment => {
            doc.param("cloud", "segment");
            doc.param("a", cpx(args.a));
            doc.param("b", cpx(args.b));
            doc.param("n", args.n);
            PointCloud::segment_sample(args.a, args.b, args.n).map_err(at("--n"))?
        }
        CloudKind::Circle => {
            check_positive("--radius", args.radius)?;
            check_at_least("--n", args.n, 1)?;
            doc.param("cloud", "circle");
            doc.param("center", cpx(args.center));
            doc.param("radius", args.radius);
            doc.param("n", args.n);
            PointCloud::circle_sample(args.center, args.radius, args.n).map_err(at("--radius"))?
        }
        CloudKind::Polyline => {
            let v = args
                .vertices
                .as_ref()
                .ok_or_else(|| input("--vertices is required for --cloud polyline"))?;
            doc.param("cloud", "polyline");
            doc.param(
                "vertices",
                v.0.iter().map(|z| cpx(*z)).collect::<Vec<_>>().join("; "),
            );
            doc.param("n", args.n);
            PointCloud::polyline_sample(v.0.clone(), args.n).map_err(at("--vertices"))?
        }
        CloudKind::Points => {
            let path = args
                .points_file
                .as_ref()
                .ok_or_else(|| input("--points-file is required for --cloud points"))?;
            let text = read_file("--points-file", path)?;
            let pts: Vec<Complex64> = text
                .lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(|l| parse_point(l).map_err(|e| input(format!("--points-file: {e}"))))
                .collect::<CliResult<_>>()?;
            doc.param("cloud", "points");
            doc.param("points_file", path.display());
            doc.param("n", pts.len());
            PointCloud::explicit(pts).map_err(at("--points-file"))?
        }
    };
    if !(args.p > 0.0 && args.p <= 4.0) {
        return Err(input(format!("--p must lie in (0, 4], got {}", args.p)));
    }
    doc.param("p", args.p);
    let deltas = match &args.deltas {
        Some(d) => d.0.clone(),
        None => default_deltas(&cloud),
    };
    doc.param(
        "deltas",
        deltas
            .iter()
            .map(|d| d.to_string())
            .collect::<Vec<_>>()
            .join(","),
    );
    let profile = hausdorff_profile(&cloud, args.p, &deltas).map_err(at("--deltas"))?;
    doc.result("extrapolated", profile.extrapolated);
    doc.result("raw_monotone", profile.raw_monotone);
    doc.result(
        "box_dimension",
        box_dimension(&cloud, &deltas).map_err(at("--deltas"))?,
    );
    if args.capacity {
        match capacity_hausdorff_report(&cloud, args.p) {
            Ok(r) => {
                doc.result("h_estimate", r.h_estimate);
                doc.result("capacity_estimate", r.capacity_estimate);
                doc.result("consistent", r.consistent);
            }
            Err(Error::NotConverged(best)) => {
                let msg = format!(
                    "capacity optimizer did not converge (capacity {})",
                    best.capacity
                );
                return Err(CliError::NotConverged(Box::new(doc), msg));
            }
            Err(e) => return Err(at("--cloud")(e)),
        }
    }
    doc.table("delta", &["delta", "count", "raw", "estimate"]);
    for (k, delta) in deltas.iter().enumerate() {
        doc.row(vec![
            delta.to_string(),
            profile.counts[k].to_string(),
            profile.raw[k].to_string(),
            profile.values[k].to_string(),
        ]);
    }
    Ok(doc)
}

fn parse_field(spec: &str) -> CliResult<ScalarField> {
    let bad = || input(format!("--field: unknown field `{spec}`"));
    Ok(match spec {
        "re" => ScalarField::re(),
        "im" => ScalarField::im(),
        "re2" => ScalarField::re_sq(),
        "im2" => ScalarField::im_sq(),
        "re3" => ScalarField::re_cube(),
        "abs2" => ScalarField::abs_sq(),
        "pos_re" => ScalarField::positive_part_re(),
        _ => {
            if let Some(c) = spec.strip_prefix("const:") {
                ScalarField::constant(
                    c.parse()
                        .ok()
                        .filter(|c: &f64| c.is_finite())
                        .ok_or_else(bad)?,
                )
            } else if let Some(w) = spec.strip_prefix("log:") {
                ScalarField::log_abs(parse_point(w).map_err(|e| input(format!("--field: {e}")))?)
            } else {
                return Err(bad());
            }
        }
    })
}

fn means_cmd(args: &MeansArgs) -> CliResult<Doc> {
    let f = parse_field(&args.field)?;
    let mut doc = Doc::new("means");
    doc.param("field", &args.field);
    doc.param("center", cpx(args.center));
    match args.kind {
        MeanKind::Point => {
            doc.param("kind", "point");
            doc.result(
                "value",
                f.eval_checked(args.center).map_err(at("--center"))?,
            );
        }
        MeanKind::Surface => {
            check_positive("--radius", args.radius)?;
            check_at_least("--n-nodes", args.n_nodes, 16)?;
            doc.param("kind", "surface");
            doc.param("radius", args.radius);
            doc.param("n_nodes", args.n_nodes);
            let v =
                surface_mean(&f, args.center, args.radius, args.n_nodes).map_err(at("--field"))?;
            doc.result("value", v);
        }
        MeanKind::Space => {
            check_positive("--radius", args.radius)?;
            check_at_least("--n-radial", args.n_radial, 8)?;
            check_at_least("--n-angular", args.n_angular, 16)?;
            doc.param("kind", "space");
            doc.param("radius", args.radius);
            doc.param("n_radial", args.n_radial);
            doc.param("n_angular", args.n_angular);
            let v = space_mean(&f, args.center, args.radius, args.n_radial, args.n_angular)
                .map_err(at("--field"))?;
            doc.result("value", v);
        }
        MeanKind::Submean => {
            let radii = args
                .radii
                .as_ref()
                .map(|r| r.0.clone())
                .unwrap_or_else(|| vec![args.radius]);
            for &r in &radii {
                check_positive("--radii", r)?;
            }
            doc.param("kind", "submean");
            doc.param(
                "radii",
                radii
                    .iter()
                    .map(|r| r.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            let report = submean_check(&f, args.center, &radii).map_err(at("--field"))?;
            doc.result("holds", report.all_hold());
            doc.table("radius", &["r", "margin"]);
            for (r, m) in report.radii.iter().zip(&report.margins) {
                doc.row(vec![r.to_string(), m.to_string()]);
            }
        }
        MeanKind::Mollify => {
            doc.param("kind", "mollify");
            doc.param("scale", args.scale);
            let m = MollifierSpec::new(args.scale).map_err(at("--scale"))?;
            doc.result(
                "value",
                mollify(&f, &m, args.center).map_err(at("--center"))?,
            );
        }
    }
    Ok(doc)
}

fn dispatch(cli: &Cli) -> CliResult<Doc> {
    match &cli.command {
        Command::SolveDirichlet(a) => solve_dirichlet(a, cli.seed),
        Command::HarmonicMeasure(a) => harmonic_measure_cmd(a),
        Command::Equilibrium(a) => equilibrium_cmd(a),
        Command::Capacity(a) => capacity_cmd(a),
        Command::Green(a) => green_cmd(a, cli.seed),
        Command::BwCheck(a) => bw_cmd(a),
        Command::Hausdorff(a) => hausdorff_cmd(a),
        Command::Means(a) => means_cmd(a),
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let result = match cli.threads {
        None => dispatch(&cli),
        Some(0) => Err(input("--threads must be at least 1, got 0")),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(input(format!("--threads: {e}"))),
        },
    };
    match result {
        Ok(doc) => Outcome {
            code: EXIT_OK,
            stdout: doc.render(cli.format),
            stderr: String::new(),
        },
        Err(CliError::NotConverged(doc, msg)) => Outcome {
            code: EXIT_NOT_CONVERGED,
            stdout: doc.render(cli.format),
            stderr: format!("warning: {msg}\n"),
        },
        Err(CliError::Input(msg)) => Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}
