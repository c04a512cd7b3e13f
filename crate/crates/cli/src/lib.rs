//! Command-line front end: reads IFS documents, runs the analyses of
//! `affthermo` and writes reports, CSV curves and point clouds.
//!
//! Exit status is 0 on success, 2 when a precondition fails (bad flags, a
//! malformed document, an analysis refusing its input) and 3 when a node
//! budget runs out. In the last case whatever was computed is still
//! written.

pub mod document;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use affthermo::classify::{classify_with, find_domination_certificate, ClassifyConfig, Domination, DominationSearch};
use affthermo::geometry::{
    attractor_cloud_with_budget, box_dimension_seeded, io, project_cloud, theorem_experiment_with, ExperimentConfig,
    PointCloud, ScaleRange, Scenario,
};
use affthermo::pressure::{
    affinity_dimension, dispatch_kind, pressure_estimate_with_budget, pressure_gap, AffdimConfig, GapConfig,
    GapResult,
};
use affthermo::symbolic::DEFAULT_BUDGET;
use affthermo::{fmt_g, AffineIfs, Direction, Error, SubshiftKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use document::{IfsDocument, ParseError};
use report::Format;

/// Environment variable overriding the default node budget.
pub const BUDGET_ENV: &str = "AFFTHERMO_BUDGET";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cli: {0}")]
    Usage(String),
    #[error("{0}")]
    Core(#[from] Error),
    #[error("cli: {0}")]
    Io(String),
    /// The budget ran out after a partial artifact was written.
    #[error("{0}")]
    Partial(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_budget() => 3,
            CliError::Partial(_) => 3,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "affthermo",
    version,
    about = "Pressure, affinity dimension and attractors of planar affine IFSs with singular maps"
)]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Tree-node budget per analysis; beats the document and AFFTHERMO_BUDGET.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Io {
    /// IFS document, `-` for standard input.
    input: PathBuf,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Full,
    Sigma,
    Invertible,
}

impl From<Kind> for SubshiftKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Full => SubshiftKind::Full,
            Kind::Sigma => SubshiftKind::Sigma,
            Kind::Invertible => SubshiftKind::Invertible,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum CurveKind {
    /// Counting at 0, the nonzero-product shift on (0, 1], invertible letters beyond.
    Auto,
    Full,
    Sigma,
    Invertible,
}

#[derive(Args, Debug)]
struct CloudArgs {
    /// Subshift whose attractor is rendered when the input is a document.
    #[arg(long, value_enum, default_value = "full")]
    kind: Kind,
    /// Resolution when rendering a document.
    #[arg(long, default_value_t = 1.0 / 1024.0)]
    epsilon: f64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the tuple of linear parts.
    Analyze {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Pressure bounds on a grid of exponents, as CSV.
    PressureCurve {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "auto")]
        kind: CurveKind,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        s_from: f64,
        #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
        s_to: f64,
        /// Number of intervals; the curve has steps + 1 rows.
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Certified bracket around the affinity dimension.
    Affdim {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_enum, default_value = "full")]
        kind: Kind,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Certify that dropping the singular letters lowers the pressure.
    Gap {
        #[command(flatten)]
        io: Io,
        #[arg(long, allow_hyphen_values = true)]
        s: f64,
        #[arg(long)]
        max_depth: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Write a point cloud of the attractor.
    Render {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        cloud: CloudArgs,
        /// AFPC1 binary instead of CSV; implied by an `.afpc` output name.
        #[arg(long)]
        binary: bool,
    },
    /// Box-counting dimension of a cloud file or of a rendered document.
    Boxdim {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        cloud: CloudArgs,
        /// Dyadic exponents `a..b`: boxes of side 2^-a down to 2^-b.
        #[arg(long, default_value = "2..8")]
        scales: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Also write the box-count table (scale, count, offsetId) here.
        #[arg(long)]
        table: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Project a cloud onto the line at `--angle` radians.
    Project {
        #[command(flatten)]
        io: Io,
        #[command(flatten)]
        cloud: CloudArgs,
        #[arg(long, allow_hyphen_values = true)]
        angle: f64,
        #[arg(long)]
        binary: bool,
    },
    /// Desk-scale experiments around the dimension of the attractor.
    Experiment {
        #[command(flatten)]
        io: Io,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        part: u8,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        scales: Option<String>,
        /// Projection directions swept in part 1.
        #[arg(long)]
        angles: Option<usize>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

/// Standard output collected while a command runs.
#[derive(Default)]
struct Ctx {
    stdout: Vec<u8>,
    budget: u64,
}

impl Ctx {
    fn emit(&mut self, out: Option<&Path>, bytes: &[u8]) -> Result<()> {
        match out {
            Some(p) => fs::write(p, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
            None => {
                self.stdout.extend_from_slice(bytes);
                Ok(())
            }
        }
    }
}

/// Run with the process's standard streams; returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = if matches!(e.kind(), DisplayHelp | DisplayVersion) { 0 } else { 2 };
            let _ = if code == 0 { write!(stdout, "{e}") } else { write!(stderr, "{e}") };
            return code;
        }
    };
    let (result, ctx) = match cli.threads {
        Some(0) => (Err(CliError::Usage("--threads must be at least 1".into())), Ctx::default()),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| execute(&cli)),
            Err(e) => (Err(CliError::Usage(format!("cannot start {n} threads: {e}"))), Ctx::default()),
        },
        None => execute(&cli),
    };
    let _ = stdout.write_all(&ctx.stdout);
    let _ = stdout.flush();
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: &Cli) -> (Result<()>, Ctx) {
    let mut ctx = Ctx::default();
    let r = dispatch(cli, &mut ctx);
    (r, ctx)
}

fn env_budget() -> Result<Option<u64>> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse::<u64>()
            .ok()
            .filter(|&b| b > 0)
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("{BUDGET_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin()
            .read_to_end(&mut buf)
            .map_err(|e| CliError::Io(format!("cannot read standard input: {e}")))?;
        return Ok(buf);
    }
    fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn parse_document(bytes: &[u8]) -> Result<IfsDocument> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        CliError::Parse(ParseError {
            line: 1,
            column: 1,
            message: format!("document is not UTF-8: {e}"),
        })
    })?;
    Ok(IfsDocument::parse(text)?)
}

/// Either a document, detected by its leading `{`, or a cloud file.
enum Input {
    Document(IfsDocument),
    Cloud(PointCloud),
}

fn read_input(path: &Path) -> Result<Input> {
    let bytes = read_bytes(path)?;
    if bytes.starts_with(io::MAGIC) {
        return Ok(Input::Cloud(io::read_binary(&bytes[..])?));
    }
    if bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{') {
        return Ok(Input::Document(parse_document(&bytes)?));
    }
    Ok(Input::Cloud(io::read_csv(&bytes[..])?))
}

fn parse_scales(s: &str) -> Result<ScaleRange> {
    let bad = || CliError::Usage(format!("--scales expects dyadic exponents `a..b`, got {s:?}"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i32 = a.trim().parse().map_err(|_| bad())?;
    let b: i32 = b.trim().parse().map_err(|_| bad())?;
    Ok(ScaleRange::dyadic(a, b)?)
}

fn write_cloud(cloud: &PointCloud, binary: bool) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    if binary {
        io::write_binary(cloud, &mut buf)?;
    } else {
        io::write_csv(cloud, &mut buf)?;
    }
    Ok(buf)
}

fn wants_binary(flag: bool, out: Option<&Path>) -> bool {
    flag || out.and_then(|p| p.extension()).is_some_and(|e| e == "afpc")
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<()> {
    let io = match &cli.command {
        Command::Analyze { io, .. }
        | Command::PressureCurve { io, .. }
        | Command::Affdim { io, .. }
        | Command::Gap { io, .. }
        | Command::Render { io, .. }
        | Command::Boxdim { io, .. }
        | Command::Project { io, .. }
        | Command::Experiment { io, .. } => io,
    };
    let input = match &cli.command {
        Command::Boxdim { .. } | Command::Project { .. } => read_input(&io.input)?,
        _ => Input::Document(parse_document(&read_bytes(&io.input)?)?),
    };
    let doc_budget = match &input {
        Input::Document(d) => d.budget(),
        Input::Cloud(_) => None,
    };
    ctx.budget = match cli.budget.or(doc_budget) {
        Some(b) => b,
        None => env_budget()?.unwrap_or(DEFAULT_BUDGET),
    };
    let out = io.out.as_deref();

    let (doc, ifs) = match input {
        Input::Document(d) => {
            let ifs = d.to_ifs()?;
            (Some(d), Some(ifs))
        }
        Input::Cloud(c) => {
            return match &cli.command {
                Command::Boxdim {
                    scales, seed, table, format, ..
                } => boxdim(ctx, c, scales, seed.unwrap_or(0), table.as_deref(), *format, out),
                Command::Project { angle, binary, .. } => project(ctx, &c, *angle, wants_binary(*binary, out), out),
                _ => unreachable!("only boxdim and project read clouds"),
            };
        }
    };
    let doc = doc.expect("document input");
    let ifs = ifs.expect("document input");
    let seed = |flag: &Option<u64>| flag.or(doc.options.seed).unwrap_or(0);

    match &cli.command {
        Command::Analyze { format, .. } => analyze(ctx, &ifs, *format, out),
        Command::PressureCurve {
            kind,
            s_from,
            s_to,
            steps,
            depth,
            ..
        } => pressure_curve(ctx, &ifs, *kind, *s_from, *s_to, *steps, *depth, out),
        Command::Affdim { kind, tol, format, .. } => affdim(ctx, &ifs, (*kind).into(), *tol, *format, out),
        Command::Gap {
            s, max_depth, format, ..
        } => gap(ctx, &ifs, *s, *max_depth, *format, out),
        Command::Render { cloud, binary, .. } => {
            let (c, coarsened) = render_cloud(ctx, &ifs, cloud, true)?;
            ctx.emit(out, &write_cloud(&c, wants_binary(*binary, out))?)?;
            match coarsened {
                Some(msg) => Err(CliError::Partial(msg)),
                None => Ok(()),
            }
        }
        Command::Boxdim {
            cloud,
            scales,
            seed: s,
            table,
            format,
            ..
        } => {
            let (c, _) = render_cloud(ctx, &ifs, cloud, false)?;
            boxdim(ctx, c, scales, seed(s), table.as_deref(), *format, out)
        }
        Command::Project {
            cloud, angle, binary, ..
        } => {
            let (c, _) = render_cloud(ctx, &ifs, cloud, false)?;
            project(ctx, &c, *angle, wants_binary(*binary, out), out)
        }
        Command::Experiment {
            part,
            seed: s,
            epsilon,
            scales,
            angles,
            format,
            ..
        } => {
            let scenario = match part {
                1 => Scenario::PartOne,
                2 => Scenario::PartTwo,
                _ => Scenario::PartThree,
            };
            let mut cfg = ExperimentConfig {
                budget: ctx.budget,
                ..Default::default()
            };
            cfg.affdim_budget = cfg.affdim_budget.min(ctx.budget);
            if let Some(e) = epsilon {
                cfg.epsilon = *e;
            }
            if let Some(s) = scales {
                cfg.scales = parse_scales(s)?;
            }
            if let Some(a) = angles {
                cfg.angles = *a;
            }
            let report = theorem_experiment_with(&ifs, scenario, seed(s), &cfg)?;
            ctx.emit(out, report::render(&report::to_value(&report), *format).as_bytes())
        }
    }
}

fn analyze(ctx: &mut Ctx, ifs: &AffineIfs, format: Format, out: Option<&Path>) -> Result<()> {
    let cfg = ClassifyConfig {
        budget: ctx.budget,
        ..Default::default()
    };
    let mut v = json!({
        "name": ifs.name(),
        "letters": ifs.len(),
        "commonFixedPoint": ifs.common_fixed_point(),
    });
    let fields = v.as_object_mut().expect("object");
    match classify_with(ifs, &cfg) {
        Ok(c) => {
            if let Value::Object(o) = report::to_value(&c) {
                fields.extend(o);
            }
            ctx.emit(out, report::render(&v, format).as_bytes())
        }
        Err(e) if e.is_budget() => {
            fields.insert("rankProfile".into(), json!(ifs.ranks()));
            fields.insert("irreducible".into(), report::to_value(&affthermo::classify::is_irreducible(ifs)));
            fields.insert("incomplete".into(), json!(e.to_string()));
            ctx.emit(out, report::render(&v, format).as_bytes())?;
            Err(CliError::Core(e))
        }
        Err(e) => Err(e.into()),
    }
}

/// The largest-κ domination certificate, when there is one.
fn certificate(ifs: &AffineIfs) -> Option<affthermo::classify::DominationCertificate> {
    let search = DominationSearch {
        best_kappa: true,
        ..Default::default()
    };
    match find_domination_certificate(ifs, &search) {
        Ok(Domination::Certified(c)) => Some(c),
        _ => None,
    }
}

#[allow(clippy::too_many_arguments)]
fn pressure_curve(
    ctx: &mut Ctx,
    ifs: &AffineIfs,
    kind: CurveKind,
    from: f64,
    to: f64,
    steps: usize,
    depth: usize,
    out: Option<&Path>,
) -> Result<()> {
    let cert = certificate(ifs);
    let mut csv = String::from("s,kind,depth,lower,upper,certificate\n");
    for i in 0..=steps {
        let s = if i == steps {
            to
        } else {
            from + (to - from) * i as f64 / steps as f64
        };
        let kind = match kind {
            CurveKind::Auto => dispatch_kind(s),
            CurveKind::Full => SubshiftKind::Full,
            CurveKind::Sigma => SubshiftKind::Sigma,
            CurveKind::Invertible => SubshiftKind::Invertible,
        };
        match pressure_estimate_with_budget(ifs, kind, s, depth, cert.as_ref(), ctx.budget) {
            Ok(e) => csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                fmt_g(s),
                kind,
                e.depth,
                fmt_g(e.lower),
                fmt_g(e.upper),
                e.certificate
            )),
            Err(e) if e.is_budget() => {
                ctx.emit(out, csv.as_bytes())?;
                return Err(CliError::Partial(format!("{e}; wrote {i} of {} rows", steps + 1)));
            }
            Err(e) => return Err(e.into()),
        }
    }
    ctx.emit(out, csv.as_bytes())
}

fn affdim(ctx: &mut Ctx, ifs: &AffineIfs, kind: SubshiftKind, tol: f64, format: Format, out: Option<&Path>) -> Result<()> {
    let cfg = AffdimConfig {
        tol,
        budget: ctx.budget,
        ..Default::default()
    };
    match affinity_dimension(ifs, kind, &cfg) {
        Ok(b) => {
            let v = json!({
                "kind": kind,
                "status": "separated",
                "lo": b.lo,
                "hi": b.hi,
                "midpoint": b.midpoint(),
                "width": b.hi - b.lo,
                "depth": b.depth,
                "certificate": b.certificate,
            });
            ctx.emit(out, report::render(&v, format).as_bytes())
        }
        Err(e @ Error::InconclusiveBracket { lo, hi, depth }) => {
            let v = json!({
                "kind": kind,
                "status": "inconclusive",
                "lo": lo,
                "hi": hi,
                "midpoint": 0.5 * (lo + hi),
                "width": hi - lo,
                "depth": depth,
            });
            ctx.emit(out, report::render(&v, format).as_bytes())?;
            Err(CliError::Core(e))
        }
        Err(e) => Err(e.into()),
    }
}

fn gap(
    ctx: &mut Ctx,
    ifs: &AffineIfs,
    s: f64,
    max_depth: Option<usize>,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let cfg = GapConfig {
        budget: ctx.budget,
        max_depth,
    };
    let g = pressure_gap(ifs, s, &cfg)?;
    let mut v = json!({ "s": s });
    if let Value::Object(o) = report::to_value(&g) {
        v.as_object_mut().expect("object").extend(o);
    }
    ctx.emit(out, report::render(&v, format).as_bytes())?;
    match g {
        GapResult::CertifiedGap { .. } => Ok(()),
        GapResult::Inconclusive { depth, .. } => Err(CliError::Partial(format!(
            "pressure: gap not separated by depth {depth}"
        ))),
    }
}

/// The attractor cloud. With `coarsen`, an exhausted budget doubles the
/// resolution up to eight times; the message says what happened.
fn render_cloud(ctx: &Ctx, ifs: &AffineIfs, args: &CloudArgs, coarsen: bool) -> Result<(PointCloud, Option<String>)> {
    let kind = args.kind.into();
    let mut eps = args.epsilon;
    let mut first = None;
    for _ in 0..=8 {
        match attractor_cloud_with_budget(ifs, kind, eps, ctx.budget) {
            Ok(c) => {
                let msg = first.map(|e: Error| format!("{e}; wrote a coarser cloud at epsilon {}", fmt_g(eps)));
                return Ok((c, msg));
            }
            Err(e) if e.is_budget() && coarsen => {
                first.get_or_insert(e);
                eps *= 2.0;
            }
            Err(e) => return Err(e.into()),
        }
    }
    Err(first.expect("loop ran").into())
}

fn boxdim(
    ctx: &mut Ctx,
    cloud: PointCloud,
    scales: &str,
    seed: u64,
    table: Option<&Path>,
    format: Format,
    out: Option<&Path>,
) -> Result<()> {
    let est = box_dimension_seeded(&cloud, parse_scales(scales)?, seed)?;
    if let Some(t) = table {
        let mut buf = Vec::new();
        io::write_box_counts_csv(&est, &mut buf)?;
        ctx.emit(Some(t), &buf)?;
    }
    let v = json!({
        "points": cloud.len(),
        "resolution": cloud.resolution,
        "source": cloud.source.to_string(),
        "seed": seed,
        "scales": est.scales,
        "counts": est.counts,
        "slope": est.slope,
        "stderr": est.stderr,
    });
    ctx.emit(out, report::render(&v, format).as_bytes())
}

fn project(ctx: &mut Ctx, cloud: &PointCloud, angle: f64, binary: bool, out: Option<&Path>) -> Result<()> {
    if !angle.is_finite() {
        return Err(CliError::Usage(format!("--angle must be finite, got {angle}")));
    }
    let p = project_cloud(cloud, Direction::new(angle)).to_cloud();
    ctx.emit(out, &write_cloud(&p, binary)?)
}
