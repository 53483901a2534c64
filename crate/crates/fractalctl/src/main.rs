//! `fractalctl`: every fractal-core capability as a subcommand.
//!
//! Exit status: 0 success, 1 domain or I/O error, 2 usage error.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fractal_core::curves::{self, dragon_polyline, koch_polyline, snowflake_polyline};
use fractal_core::dragonlab::{check_non_overlap, four_copy_union, max_filled_square};
use fractal_core::mandel::{self, RenderParams};
use fractal_core::meshforge::{self, write_stl_binary};
use fractal_core::newtonlab::{self, HeronParams};
use fractal_core::raster::{self, knots_to_dot, polyline_to_svg};
use fractal_core::rationals::{geom_sum_finite, geom_sum_infinite};
use fractal_core::{Cpx, Rat};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "fractalctl", version, about = "Fractal-mathematics workbench")]
struct Cli {
    /// Machine-readable JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact geometric sum Σ first·ratioⁱ.
    Series(SeriesArgs),
    /// Exact length, area or measure of an iterated construction.
    Measure(MeasureArgs),
    /// SVG of a curve iteration.
    Curve(CurveArgs),
    /// Non-overlap and four-copy tiling report for dragon curves.
    DragonVerify(DragonVerifyArgs),
    /// Grayscale escape-time image (PGM).
    Mandelbrot(MandelArgs),
    /// Exact orbit polynomials of c = -2 - r.
    BoundaryPolys(BoundaryArgs),
    /// Newton basin image for z^k = a (PPM).
    Newton(NewtonArgs),
    /// Table of Heron iterates for the k-th root of a.
    Heron(HeronArgs),
    /// Knot tree of the Newton iteration (JSON or DOT).
    Knots(KnotArgs),
    /// Binary STL of an extruded or stacked dragon curve.
    Stl(StlArgs),
    /// Start the HTTP explorer service.
    Serve(ServeArgs),
    /// Whether a rational in [0, 1] lies in the Cantor set.
    CantorMember(CantorArgs),
}

/// Iteration count or `inf` for the limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Iter {
    Finite(u32),
    Inf,
}

impl FromStr for Iter {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "inf" | "infinity" => Ok(Iter::Inf),
            _ => s.parse().map(Iter::Finite).map_err(|_| format!("expected a count or 'inf', got {s:?}")),
        }
    }
}

impl fmt::Display for Iter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Iter::Finite(n) => write!(f, "{n}"),
            Iter::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Args)]
struct SeriesArgs {
    /// Common ratio, e.g. 1/2.
    #[arg(long)]
    ratio: Rat,
    /// First term.
    #[arg(long, default_value = "1")]
    first: Rat,
    /// Number of terms, or `inf`.
    #[arg(long, default_value = "inf")]
    terms: Iter,
}

#[derive(Clone, Copy, ValueEnum)]
enum Construction {
    Koch,
    Snowflake,
    Carpet,
    Cantor,
}

#[derive(Args)]
struct MeasureArgs {
    #[arg(value_enum)]
    what: Construction,
    /// Iteration (koch, snowflake: from 1) or depth (carpet, cantor), or `inf`.
    #[arg(long)]
    iter: Iter,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKind {
    Dragon,
    Koch,
    Snowflake,
}

#[derive(Args)]
struct CurveArgs {
    #[arg(value_enum)]
    kind: CurveKind,
    #[arg(long)]
    iter: u32,
    /// Stroke width in curve units.
    #[arg(long)]
    stroke: Option<f64>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DragonVerifyArgs {
    /// Check edge multiplicity for iterations 0..=N.
    #[arg(long, default_value_t = 18)]
    max_iter: u32,
    /// Report four-copy unions for iterations 0..=N.
    #[arg(long, default_value_t = 14)]
    four_copy: u32,
}

#[derive(Args)]
struct View {
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    cx: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    cy: f64,
    /// Complex-plane width of one pixel.
    #[arg(long)]
    scale: f64,
    #[arg(long, default_value_t = 64)]
    width: u32,
    #[arg(long, default_value_t = 64)]
    height: u32,
    #[arg(long)]
    max_iter: Option<u32>,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl View {
    fn params(&self, default_iter: u32) -> RenderParams {
        RenderParams {
            center: Cpx::new(self.cx, self.cy),
            scale: self.scale,
            width: self.width,
            height: self.height,
            max_iter: self.max_iter.unwrap_or(default_iter),
        }
    }
}

#[derive(Args)]
struct MandelArgs {
    #[command(flatten)]
    view: View,
}

#[derive(Args)]
struct BoundaryArgs {
    /// Number of polynomials p1..pm.
    #[arg(long)]
    m: u32,
    /// Print only the linear coefficients a1..a(m-1).
    #[arg(long)]
    linear_coeffs: bool,
    /// Check a(n+1) = 4a(n) - 1 and a(n) >= 3^n.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct Radicand {
    #[arg(long, default_value_t = 3)]
    k: u32,
    #[arg(long, default_value_t = 8.0, allow_hyphen_values = true)]
    a_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    a_im: f64,
}

impl Radicand {
    fn a(&self) -> Cpx {
        Cpx::new(self.a_re, self.a_im)
    }
}

#[derive(Args)]
struct NewtonArgs {
    #[command(flatten)]
    view: View,
    #[command(flatten)]
    radicand: Radicand,
}

#[derive(Args)]
struct HeronArgs {
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Radicand (rational).
    #[arg(long, allow_hyphen_values = true)]
    a: Rat,
    /// Starting value (rational).
    #[arg(long, allow_hyphen_values = true)]
    z0: Rat,
    /// Number of iterates listed.
    #[arg(long, default_value_t = 5)]
    n: usize,
    /// Exact rational arithmetic instead of floating point.
    #[arg(long)]
    exact: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum KnotFormat {
    Json,
    Dot,
}

#[derive(Args)]
struct KnotArgs {
    #[arg(long)]
    depth: u32,
    #[command(flatten)]
    radicand: Radicand,
    #[arg(long, value_enum, default_value = "json")]
    format: KnotFormat,
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "shape")]
struct StlShape {
    /// Extrude this dragon iteration.
    #[arg(long)]
    dragon: Option<u32>,
    /// Stack iterations LO..=HI, one layer each.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    stack: Option<Vec<u32>>,
}

#[derive(Args)]
struct StlArgs {
    #[command(flatten)]
    shape: StlShape,
    /// Band width in quarter-units (1 or 2).
    #[arg(long, default_value_t = 2)]
    wall: u32,
    /// Extrusion height in mm.
    #[arg(long, default_value_t = 10.0)]
    height: f64,
    /// Layer height in mm for --stack.
    #[arg(long, default_value_t = 5.0)]
    layer_height: f64,
    /// Lattice unit in mm.
    #[arg(long, default_value_t = 10.0)]
    unit: f64,
    /// Output STL file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = explorerd::DEFAULT_PORT)]
    port: u16,
}

#[derive(Args)]
struct CantorArgs {
    /// Rational such as 1/4.
    q: Rat,
}

enum CliError {
    Core(fractal_core::Error),
    Io(std::io::Error),
    Failed(String),
}

impl From<fractal_core::Error> for CliError {
    fn from(e: fractal_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Failed(m) => f.write_str(m),
        }
    }
}

type CliResult = Result<(), CliError>;

fn emit(out: &Option<PathBuf>, bytes: &[u8]) -> CliResult {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

/// `println!` that reports a closed pipe as an error instead of panicking.
macro_rules! outln {
    ($($arg:tt)*) => {
        writeln!(std::io::stdout().lock(), $($arg)*).map_err(CliError::Io)?
    };
}

fn print_json(v: &Value) -> CliResult {
    outln!("{}", serde_json::to_string_pretty(v).expect("json values serialize"));
    Ok(())
}

fn series(a: &SeriesArgs, as_json: bool) -> CliResult {
    let sum = match a.terms {
        Iter::Finite(n) => geom_sum_finite(&a.first, &a.ratio, n),
        Iter::Inf => geom_sum_infinite(&a.first, &a.ratio)?,
    };
    if as_json {
        print_json(&json!({
            "first": a.first, "ratio": a.ratio, "terms": a.terms.to_string(), "sum": sum,
        }))?;
    } else {
        outln!("{sum}");
    }
    Ok(())
}

fn measure(a: &MeasureArgs, as_json: bool) -> CliResult {
    let zero = Rat::zero();
    let (headline, facts) = match (a.what, a.iter) {
        (Construction::Koch, Iter::Inf) => {
            return Err(CliError::Core(fractal_core::Error::Domain(
                "Koch curve length diverges as the iteration grows".into(),
            )))
        }
        (Construction::Koch, Iter::Finite(n)) => {
            let len = curves::koch_length(n)?;
            let segments = 4u64.checked_pow(n.saturating_sub(1)).map(Value::from);
            (len.clone(), json!({ "length": len, "segments": segments }))
        }
        (Construction::Snowflake, Iter::Inf) => {
            let area = curves::snowflake_area_limit();
            (area.clone(), json!({ "area": area, "decomposition": curves::snowflake_decomposition() }))
        }
        (Construction::Snowflake, Iter::Finite(n)) => {
            let area = curves::snowflake_area(n)?;
            (area.clone(), json!({ "area": area, "limit": curves::snowflake_area_limit() }))
        }
        (Construction::Carpet, Iter::Inf) => (zero.clone(), json!({ "area": zero, "removed": Rat::one() })),
        (Construction::Carpet, Iter::Finite(d)) => {
            let area = curves::carpet_area(d);
            (area.clone(), json!({ "area": area, "removed": curves::carpet_removed_area(d) }))
        }
        (Construction::Cantor, Iter::Inf) => (zero.clone(), json!({ "measure": zero, "removed": Rat::one() })),
        (Construction::Cantor, Iter::Finite(d)) => {
            let m = curves::cantor_measure(d);
            (m.clone(), json!({ "measure": m, "removed": curves::cantor_removed_length(d) }))
        }
    };
    if as_json {
        let name = match a.what {
            Construction::Koch => "koch",
            Construction::Snowflake => "snowflake",
            Construction::Carpet => "carpet",
            Construction::Cantor => "cantor",
        };
        let mut v = json!({ "construction": name, "iter": a.iter.to_string() });
        v.as_object_mut().unwrap().extend(facts.as_object().unwrap().clone());
        print_json(&v)?;
    } else {
        outln!("{headline}");
    }
    Ok(())
}

fn curve(a: &CurveArgs) -> CliResult {
    let (poly, default_stroke) = match a.kind {
        CurveKind::Dragon => (dragon_polyline(a.iter)?.to_polyline(), 0.25),
        CurveKind::Koch => (koch_polyline(a.iter)?, 0.005),
        CurveKind::Snowflake => (snowflake_polyline(a.iter)?, 0.005),
    };
    let svg = polyline_to_svg(&poly, a.stroke.unwrap_or(default_stroke))?;
    emit(&a.out, svg.as_bytes())
}

fn dragon_verify(a: &DragonVerifyArgs, as_json: bool) -> CliResult {
    let mut overlap = Vec::new();
    for n in 0..=a.max_iter {
        overlap.push(check_non_overlap(n)?);
    }
    let mut squares = Vec::new();
    let mut disjoint = true;
    for n in 0..=a.four_copy {
        let u = four_copy_union(n)?;
        let sq = max_filled_square(&u);
        disjoint &= u.max_multiplicity() <= 1;
        squares.push(json!({
            "iteration": n,
            "edges": u.total(),
            "max_edge_multiplicity": u.max_multiplicity(),
            "side": sq.side,
            "corner": [sq.corner.x, sq.corner.y],
        }));
    }
    let ok = disjoint && overlap.iter().all(|r| r.ok);
    if as_json {
        print_json(&json!({ "ok": ok, "non_overlap": overlap, "four_copy": squares }))?;
    } else {
        for r in &overlap {
            outln!(
                "iteration {:>2}: {} segments, max edge multiplicity {}, max vertex visits {} {}",
                r.iteration,
                r.segments,
                r.max_edge_multiplicity,
                r.max_vertex_visits,
                if r.ok { "ok" } else { "OVERLAP" }
            );
        }
        for s in &squares {
            outln!(
                "four-copy {:>2}: {} edges, max multiplicity {}, filled square side {} at ({}, {})",
                s["iteration"], s["edges"], s["max_edge_multiplicity"], s["side"], s["corner"][0], s["corner"][1]
            );
        }
    }
    if ok {
        Ok(())
    } else {
        Err(CliError::Failed("dragon verification failed".into()))
    }
}

fn boundary_polys(a: &BoundaryArgs, as_json: bool) -> CliResult {
    let polys = mandel::boundary_polys(a.m)?;
    let coeffs = mandel::linear_coeffs(&polys);
    let check = if a.check {
        Some(mandel::linear_coeff_recurrence_check(a.m)?)
    } else {
        None
    };
    if as_json {
        let mut v = json!({ "linear_coeffs": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>() });
        if !a.linear_coeffs {
            v["polys"] = serde_json::to_value(&polys).expect("polynomials serialize");
        }
        if let Some(ok) = check {
            v["recurrence_holds"] = ok.into();
        }
        print_json(&v)?;
    } else if a.linear_coeffs {
        let list: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
        outln!("{}", list.join(", "));
    } else {
        for (i, p) in polys.iter().enumerate() {
            outln!("p{} = {p}", i + 1);
        }
    }
    if let Some(ok) = check {
        if !as_json {
            outln!("recurrence a(n+1) = 4a(n) - 1 and a(n) >= 3^n: {}", if ok { "holds" } else { "FAILS" });
        }
        if !ok {
            return Err(CliError::Failed("linear coefficient recurrence failed".into()));
        }
    }
    Ok(())
}

fn heron_exact_step(x: &Rat, k: u32, a: &Rat) -> Option<Rat> {
    if x.is_zero() {
        return None;
    }
    let km1 = Rat::from_int(k - 1);
    Some((&(&km1 * x) + &(a / &x.pow(k as i32 - 1))) / Rat::from_int(k))
}

fn heron(a: &HeronArgs, as_json: bool) -> CliResult {
    if a.exact {
        if a.k < 2 {
            return Err(fractal_core::Error::Domain(format!("root degree k must be >= 2, got {}", a.k)).into());
        }
        let mut xs = Vec::with_capacity(a.n);
        let mut x = a.z0.clone();
        for i in 1..=a.n {
            xs.push(x.clone());
            if i < a.n {
                x = heron_exact_step(&x, a.k, &a.a)
                    .ok_or(fractal_core::Error::DivisionByZero { step: i })?;
            }
        }
        if as_json {
            print_json(&json!({ "k": a.k, "a": a.a, "exact": true, "iterates": xs }))?;
        } else {
            for (i, x) in xs.iter().enumerate() {
                outln!("{}\t{}\t{:.15}", i + 1, x, x.to_f64());
            }
        }
    } else {
        let p = HeronParams {
            k: a.k,
            a: Cpx::new(a.a.to_f64(), 0.0),
            z0: Cpx::new(a.z0.to_f64(), 0.0),
        };
        let xs = newtonlab::heron_sequence(&p, a.n)?;
        if as_json {
            print_json(&json!({ "k": a.k, "a": p.a, "exact": false, "iterates": xs }))?;
        } else {
            for (i, x) in xs.iter().enumerate() {
                outln!("{}\t{:.15}", i + 1, x.re);
            }
        }
    }
    Ok(())
}

fn knots(a: &KnotArgs) -> CliResult {
    let tree = newtonlab::knot_tree(a.depth, a.radicand.k, a.radicand.a())?;
    let text = match a.format {
        KnotFormat::Json => serde_json::to_string_pretty(&tree).expect("knot tree serializes") + "\n",
        KnotFormat::Dot => knots_to_dot(&tree),
    };
    emit(&a.out, text.as_bytes())
}

fn stl(a: &StlArgs, as_json: bool) -> CliResult {
    let mesh = match (&a.shape.dragon, &a.shape.stack) {
        (Some(n), _) => meshforge::extrude_dragon(*n, a.wall, a.height, a.unit)?,
        (None, Some(r)) => meshforge::stack_iterations(r[0], r[1], a.wall, a.layer_height, a.unit)?,
        (None, None) => unreachable!("clap enforces one shape"),
    };
    let bytes = write_stl_binary(&mesh)?;
    emit(&a.out, &bytes)?;
    if a.out.is_some() {
        let report = meshforge::validate(&mesh)?;
        if as_json {
            print_json(&json!({ "bytes": bytes.len(), "report": report }))?;
        } else {
            outln!(
                "{} triangles, {} vertices, volume {:.6} mm^3, euler {}, genus {}, {} bytes",
                report.triangles,
                report.vertices,
                report.volume,
                report.euler,
                report.genus,
                bytes.len()
            );
        }
    }
    Ok(())
}

fn cantor_member(a: &CantorArgs, as_json: bool) -> CliResult {
    let member = curves::in_cantor(&a.q)?;
    if as_json {
        print_json(&json!({ "q": a.q, "member": member }))?;
    } else {
        outln!("{member}");
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    let j = cli.json;
    match &cli.cmd {
        Cmd::Series(a) => series(a, j),
        Cmd::Measure(a) => measure(a, j),
        Cmd::Curve(a) => curve(a),
        Cmd::DragonVerify(a) => dragon_verify(a, j),
        Cmd::Mandelbrot(a) => {
            let img = mandel::render_mandel(&a.view.params(explorerd::DEFAULT_MANDEL_ITER))?;
            emit(&a.view.out, &raster::write_pgm(&img)?)
        }
        Cmd::BoundaryPolys(a) => boundary_polys(a, j),
        Cmd::Newton(a) => {
            let p = a.view.params(newtonlab::DEFAULT_BUDGET);
            let img = newtonlab::render_newton(&p, a.radicand.k, a.radicand.a())?;
            emit(&a.view.out, &raster::write_ppm(&img)?)
        }
        Cmd::Heron(a) => heron(a, j),
        Cmd::Knots(a) => knots(a),
        Cmd::Stl(a) => stl(a, j),
        Cmd::Serve(a) => Ok(explorerd::run(a.port)?),
        Cmd::CantorMember(a) => cantor_member(a, j),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fractalctl: {e}");
            ExitCode::from(1)
        }
    }
}
