//! Command-line front end: subcommands grouped as `core`, `euclid`, `hyper`
//! and `dyn`, each producing a [`Report`] of checked claims.
//!
//! The report goes to stdout (JSON with sorted keys, or a CSV claims table);
//! `--out` receives the command's artifact when it has one (ball JSON, Green
//! table CSV, operator triplets) and the report otherwise.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{find_bw_coloring, Connection, TriangulatedSurface};
use crate::dynamics::{growth_series, perron_certificate, substitute, DynError, Word};
use crate::euclid::cauchy::{cauchy_reconstruct, pascal_kernel};
use crate::euclid::green::{decay_slope, green_table, rational_analog, QuadratureSpec};
use crate::euclid::polynomials::{pol_dimension_stable, taylor_step, PolElement};
use crate::euclid::{factorization_check, hex_patch, hex_points, qb_apply, square_torus, EuclidError, LatticeFunction};
use crate::export::{self, ExportError};
use crate::hyperbolic::counting::{dof_rank_check, equation_count};
use crate::hyperbolic::special::{default_direction, psi_function, z_default, ExtensionPolicy};
use crate::hyperbolic::zeros::zero_set_components;
use crate::hyperbolic::{build_ball, HyperError};
use crate::ops::{build_q, laplace_identity_check, maximum_principle_trials, Family, IdentityReport, OpsError};
use crate::scalar::{format_q, q, q_to_f64, Q};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Euclid(#[from] EuclidError),
    #[error(transparent)]
    Hyper(#[from] HyperError),
    #[error(transparent)]
    Ops(#[from] OpsError),
    #[error(transparent)]
    Dyn(#[from] DynError),
    #[error(transparent)]
    Complex(#[from] crate::complex::ComplexError),
    #[error(transparent)]
    SurfaceJson(#[from] crate::complex::SurfaceJsonError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dca", version, about = "Discrete complex analysis on black/white triangulated surfaces")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all subcommands. Unset flags fall back to the config
/// file, then to built-in defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// `key=value` file; flags given on the command line take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Largest hyperbolic radius for exact rank and special-function work.
    #[arg(long, global = true)]
    pub max_radius: Option<usize>,
    /// Largest Green-function window radius.
    #[arg(long, global = true)]
    pub max_window: Option<i64>,
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    #[arg(long, global = true)]
    pub refine: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Relative tolerance on fitted decay slopes.
    #[arg(long, global = true)]
    pub slope_tol: Option<f64>,
    /// Include wall-clock timing in the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Resolved configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub max_radius: usize,
    pub max_window: i64,
    pub quadrature: QuadratureSpec,
    pub slope_tol: f64,
    pub timing: bool,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let mut file = GlobalArgs::default();
        if let Some(path) = &args.config {
            let text = std::fs::read_to_string(path)?;
            file = parse_config(&text)?;
        }
        let defaults = QuadratureSpec::default();
        let cfg = Self {
            seed: args.seed.or(file.seed).unwrap_or(0),
            out: args.out.clone().or(file.out),
            format: args.format.or(file.format).unwrap_or(Format::Json),
            max_radius: args.max_radius.or(file.max_radius).unwrap_or(4),
            max_window: args.max_window.or(file.max_window).unwrap_or(200),
            quadrature: QuadratureSpec {
                grid: args.grid.or(file.grid).unwrap_or(defaults.grid),
                refine: args.refine.or(file.refine).unwrap_or(defaults.refine),
                tol: args.tol.or(file.tol).unwrap_or(defaults.tol),
            },
            slope_tol: args.slope_tol.or(file.slope_tol).unwrap_or(0.1),
            timing: args.timing || file.timing,
        };
        if cfg.max_radius == 0 || cfg.max_window <= 0 {
            return Err(CliError::Usage("caps must be positive".into()));
        }
        Ok(cfg)
    }
}

/// Parses `key=value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<GlobalArgs> {
    let mut g = GlobalArgs::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim().replace('_', "-"), value.trim());
        let bad = |e: &dyn std::fmt::Display| CliError::Usage(format!("config line {}: {key}: {e}", i + 1));
        match key.as_str() {
            "seed" => g.seed = Some(value.parse().map_err(|e| bad(&e))?),
            "out" => g.out = Some(PathBuf::from(value)),
            "format" => g.format = Some(Format::from_str(value, true).map_err(|e| bad(&e))?),
            "max-radius" => g.max_radius = Some(value.parse().map_err(|e| bad(&e))?),
            "max-window" => g.max_window = Some(value.parse().map_err(|e| bad(&e))?),
            "grid" => g.grid = Some(value.parse().map_err(|e| bad(&e))?),
            "refine" => g.refine = Some(value.parse().map_err(|e| bad(&e))?),
            "tol" => g.tol = Some(value.parse().map_err(|e| bad(&e))?),
            "slope-tol" => g.slope_tol = Some(value.parse().map_err(|e| bad(&e))?),
            "timing" => g.timing = value.parse().map_err(|e| bad(&e))?,
            _ => return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1))),
        }
    }
    Ok(g)
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Complexes, colorings and triangle operators.
    #[command(subcommand)]
    Core(CoreCmd),
    /// The Euclidean triangle lattice.
    #[command(subcommand)]
    Euclid(EuclidCmd),
    /// Balls in the order-8 triangular tiling.
    #[command(subcommand)]
    Hyper(HyperCmd),
    /// The boundary substitution.
    #[command(subcommand)]
    Dyn(DynCmd),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct SurfaceSource {
    /// Surface JSON file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Hexagonal Euclidean patch of this radius.
    #[arg(long)]
    pub hex: Option<i64>,
    /// Hyperbolic ball of this radius.
    #[arg(long)]
    pub hyper: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CoreCmd {
    /// Find a black/white coloring of a surface.
    Color {
        #[arg(long)]
        input: PathBuf,
    },
    /// Exact operator identities on interior vertices.
    Identities {
        #[command(flatten)]
        source: SurfaceSource,
    },
    /// Kernel dimensions on the 3N × 3N torus.
    Liouville {
        #[arg(long, default_value_t = 1)]
        n: i64,
    },
    /// Black triangle operator as sparse triplets (written to --out).
    Kernel {
        #[command(flatten)]
        source: SurfaceSource,
    },
    /// Convex-hull check of evaluations on random d-holomorphic functions.
    MaxPrinciple {
        /// Euclidean hexagonal domain radius (ambient patch is one larger).
        #[arg(long, conflicts_with = "hyper")]
        hex: Option<i64>,
        /// Hyperbolic domain radius (ambient ball is one larger).
        #[arg(long)]
        hyper: Option<usize>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        bound: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelKind {
    Pascal,
    Fourier,
}

#[derive(Debug, Subcommand)]
pub enum EuclidCmd {
    /// Dimension of the degree-k polynomial space.
    PolDim {
        #[arg(long)]
        k: usize,
    },
    /// d-Taylor projection of a function given as `m,n,value` CSV.
    Taylor {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "0,0", value_parser = parse_point)]
        anchor: (i64, i64),
    },
    /// Fourier Green function table, residual and decay slopes.
    Green {
        #[arg(long, default_value_t = 140)]
        window: i64,
    },
    /// Cauchy reconstruction of a random polynomial on a hexagonal patch.
    Cauchy {
        #[arg(long, value_enum, default_value = "pascal")]
        kernel: KernelKind,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 4)]
        radius: i64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpecialKind {
    #[value(name = "psi-xl", alias = "psi_xl")]
    PsiXl,
    #[value(name = "z-pr", alias = "z_pr")]
    ZPr,
}

#[derive(Debug, Subcommand)]
pub enum HyperCmd {
    /// Build a ball; the JSON goes to --out.
    Ball {
        #[arg(long)]
        radius: usize,
    },
    /// Boundary word of one layer.
    Word {
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        layer: usize,
    },
    /// Equation and unknown counts, optionally with the exact rank.
    Dof {
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        rank: bool,
    },
    /// Special d-holomorphic functions with prescribed zeros.
    Special {
        #[arg(long, value_enum)]
        kind: SpecialKind,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value = "least-norm")]
        policy: ExtensionPolicy,
        /// Layer `r` of `z_{P,r}`.
        #[arg(long, default_value_t = 1)]
        layer: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Lengths,
    Words,
}

#[derive(Debug, Subcommand)]
pub enum DynCmd {
    /// Iterate the substitution on a word.
    Grow {
        #[arg(long)]
        word: String,
        #[arg(long)]
        cyclic: bool,
        #[arg(long, default_value_t = 5)]
        steps: usize,
        #[arg(long, value_enum, default_value = "lengths")]
        emit: Emit,
        /// Refuse to produce words longer than this.
        #[arg(long, default_value_t = 1 << 24)]
        cap: usize,
    },
    /// Certificate for the growth rate of the substitution.
    Perron,
}

fn parse_point(s: &str) -> std::result::Result<(i64, i64), String> {
    let (a, b) = s.split_once(',').ok_or("expected m,n")?;
    Ok((a.trim().parse().map_err(|e| format!("{e}"))?, b.trim().parse().map_err(|e| format!("{e}"))?))
}

/// A checked statement: what was expected, what was computed, and where the
/// expected value comes from.
#[derive(Debug, Clone, Serialize)]
pub struct Claim {
    pub id: String,
    pub expected: Value,
    pub computed: Value,
    pub source: String,
    pub pass: bool,
}

impl Claim {
    fn eq<T: Serialize + PartialEq>(id: impl Into<String>, expected: T, computed: T, source: &str) -> Self {
        let pass = expected == computed;
        Self { id: id.into(), expected: json!(expected), computed: json!(computed), source: source.into(), pass }
    }

    fn below(id: impl Into<String>, bound: f64, computed: f64, source: &str) -> Self {
        Self {
            id: id.into(),
            expected: json!(format!("< {bound:e}")),
            computed: json!(computed),
            source: source.into(),
            pass: computed < bound,
        }
    }

    fn near(id: impl Into<String>, target: f64, tol: f64, computed: f64, source: &str) -> Self {
        Self {
            id: id.into(),
            expected: json!(format!("{target} ± {}", (tol * 1e9).round() / 1e9)),
            computed: json!(computed),
            source: source.into(),
            pass: (computed - target).abs() <= tol,
        }
    }

    fn identity(r: &IdentityReport, source: &str) -> Self {
        Self {
            id: r.identity.clone(),
            expected: json!("0"),
            computed: json!(r.max_discrepancy),
            source: source.into(),
            pass: r.pass,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: Vec<String>,
    pub claims: Vec<Claim>,
    pub pass: bool,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

/// What a command produced: claims, report data, and an optional artifact
/// for `--out`.
struct Outcome {
    claims: Vec<Claim>,
    data: Value,
    artifact: Option<Vec<u8>>,
}

impl Outcome {
    fn new(claims: Vec<Claim>, data: Value) -> Self {
        Self { claims, data, artifact: None }
    }
}

/// Parses arguments, runs the command, prints the report and returns the
/// exit code: 0 when every claim passes, 1 on a failed claim, 2 on a usage
/// error, 3 on any other error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let command: Vec<String> = args.iter().skip(1).map(|s| s.to_string_lossy().into_owned()).collect();
    match execute(&cli, command) {
        Ok((report, text)) => {
            print!("{text}");
            if report.pass {
                0
            } else {
                1
            }
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            3
        }
    }
}

/// Runs a parsed command. Returns the report and its rendering for stdout;
/// writes `--out` if requested.
pub fn execute(cli: &Cli, command: Vec<String>) -> Result<(Report, String)> {
    let cfg = RunConfig::resolve(&cli.global)?;
    let start = Instant::now();
    let outcome = dispatch(&cli.command, &cfg)?;
    let pass = outcome.claims.iter().all(|c| c.pass);
    let report = Report {
        command,
        claims: outcome.claims,
        pass,
        data: outcome.data,
        timing_ms: cfg.timing.then(|| start.elapsed().as_millis()),
    };
    let text = render(&report, cfg.format)?;
    if let Some(path) = &cfg.out {
        match &outcome.artifact {
            Some(bytes) => std::fs::write(path, bytes)?,
            None => export::write_text(path, &text)?,
        }
    }
    Ok((report, text))
}

fn render(report: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(export::to_sorted_json(report)?),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let wrap = |e: csv::Error| CliError::Export(e.into());
            w.write_record(["id", "expected", "computed", "source", "pass"]).map_err(wrap)?;
            for c in &report.claims {
                let cell = |v: &Value| v.as_str().map(str::to_string).unwrap_or_else(|| v.to_string());
                w.write_record([c.id.clone(), cell(&c.expected), cell(&c.computed), c.source.clone(), c.pass.to_string()])
                    .map_err(wrap)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv is utf-8"))
        }
    }
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        Command::Core(c) => core_cmd(c, cfg),
        Command::Euclid(c) => euclid_cmd(c, cfg),
        Command::Hyper(c) => hyper_cmd(c, cfg),
        Command::Dyn(c) => dyn_cmd(c),
    }
}

// core

fn load_surface(path: &Path) -> Result<(TriangulatedSurface, Option<crate::complex::Coloring>)> {
    let v = export::read_json(path)?;
    Ok(TriangulatedSurface::from_json(&v)?)
}

fn colored_surface(src: &SurfaceSource, cfg: &RunConfig) -> Result<(TriangulatedSurface, crate::complex::Coloring, String)> {
    if let Some(path) = &src.input {
        let (s, c) = load_surface(path)?;
        let c = match c {
            Some(c) => c,
            None => find_bw_coloring(&s)?,
        };
        Ok((s, c, path.display().to_string()))
    } else if let Some(r) = src.hex {
        let p = hex_patch(r)?;
        Ok((p.surface, p.coloring, format!("hex patch {r}")))
    } else if let Some(r) = src.hyper {
        check_radius(r, cfg)?;
        let (s, c) = build_ball(r).surface()?;
        Ok((s, c, format!("hyperbolic ball {r}")))
    } else {
        Err(CliError::Usage("one of --input, --hex, --hyper is required".into()))
    }
}

fn check_radius(r: usize, cfg: &RunConfig) -> Result<()> {
    if r > cfg.max_radius {
        return Err(CliError::Usage(format!("radius {r} exceeds --max-radius {}", cfg.max_radius)));
    }
    Ok(())
}

fn core_cmd(cmd: &CoreCmd, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        CoreCmd::Color { input } => {
            let (s, given) = load_surface(input)?;
            let c = find_bw_coloring(&s)?;
            let mut claims = vec![Claim::eq("coloring valid", true, c.is_valid_for(&s), "facet-adjacent triangles differ")];
            if let Some(g) = &given {
                claims.push(Claim::eq("given coloring valid", true, g.is_valid_for(&s), "facet-adjacent triangles differ"));
            }
            let doc = s.to_json(Some(&c));
            let mut out = Outcome::new(claims, doc.clone());
            out.artifact = Some(export::to_sorted_json(&doc)?.into_bytes());
            Ok(out)
        }
        CoreCmd::Identities { source } => {
            let (s, c, name) = colored_surface(source, cfg)?;
            let mut claims: Vec<Claim> =
                laplace_identity_check(&s, &c)?.iter().map(|r| Claim::identity(r, "operator expansion")).collect();
            if let Some(r) = source.hex {
                claims.push(Claim::identity(&factorization_check(r)?, "lattice factorization"));
            }
            Ok(Outcome::new(claims, json!({ "surface": name, "vertices": s.vertices().len() })))
        }
        CoreCmd::Liouville { n } => {
            if *n < 1 {
                return Err(CliError::Usage("--n must be positive".into()));
            }
            let t = square_torus(3 * n)?;
            let reports = crate::ops::liouville_check(&t.surface, &t.coloring)?;
            let mut claims = vec![Claim::eq("dim ker Q^b", 2, reports[0].lhs_dim, "flat canonical connection, rank 2")];
            claims.extend(reports.iter().map(|r| Claim::eq(r.identity.clone(), r.rhs_dim, r.lhs_dim, "covariant constants")));
            Ok(Outcome::new(claims, json!({ "side": 3 * n, "reports": reports })))
        }
        CoreCmd::Kernel { source } => {
            let (s, c, name) = colored_surface(source, cfg)?;
            let qb = build_q(&s, Some(&c), Family::Black, &Connection::<Q>::canonical(&s))?;
            let black = c.of(crate::complex::Color::Black);
            let kernel = crate::ops::dholomorphic_kernel(&s, &c, &black)?;
            let rank = qb.matrix().rank();
            let claims = vec![Claim::eq(
                "rank + nullity = vertices",
                s.vertices().len(),
                rank + kernel.dimension(),
                "rank-nullity",
            )];
            let mut buf = Vec::new();
            export::write_triplets(&mut buf, qb.matrix())?;
            let mut out = Outcome::new(
                claims,
                json!({
                    "surface": name,
                    "rows": qb.rows(),
                    "columns": qb.vertices(),
                    "rank": rank,
                    "kernel_dimension": kernel.dimension(),
                }),
            );
            out.artifact = Some(buf);
            Ok(out)
        }
        CoreCmd::MaxPrinciple { hex, hyper, trials, bound } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let (s, c, domain, name) = match (hex, hyper) {
                (_, Some(r)) => {
                    check_radius(r + 1, cfg)?;
                    let ball = build_ball(r + 1);
                    let inner: BTreeSet<usize> = ball.ball_vertices(*r).into_iter().collect();
                    let dom: Vec<usize> =
                        ball.triangles_within(&inner).into_iter().filter(|&t| ball.colors[t] == crate::complex::Color::Black).collect();
                    let (s, c) = ball.surface()?;
                    (s, c, dom, format!("hyperbolic D_{r} in D_{}", r + 1))
                }
                (h, None) => {
                    let r = h.unwrap_or(6);
                    let patch = hex_patch(r + 1)?;
                    let dom = patch.black_within(&hex_points(r));
                    (patch.surface, patch.coloring, dom, format!("hex patch {r} in {}", r + 1))
                }
            };
            let res = maximum_principle_trials(&s, &c, &domain, *trials, &mut rng, *bound)?;
            let simply = res.reports.iter().all(|r| r.simply_connected);
            let claims = vec![Claim::eq("hull failures", 0, res.failures, "maximum principle")];
            Ok(Outcome::new(
                claims,
                json!({
                    "domain": name,
                    "triangles": domain.len(),
                    "trials": res.trials,
                    "kernel_dimension": res.kernel_dimension,
                    "simply_connected": simply,
                    "interior": res.reports.first().map(|r| r.interior),
                    "boundary": res.reports.first().map(|r| r.boundary),
                }),
            ))
        }
    }
}

// euclid

fn random_polynomial(k: usize, rng: &mut ChaCha8Rng) -> PolElement {
    use rand::Rng;
    let bottom = (0..2 * k + 2).map(|_| q(rng.gen_range(-4..=4))).collect();
    PolElement::new(k, (0, 0), bottom)
}

fn euclid_cmd(cmd: &EuclidCmd, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        EuclidCmd::PolDim { k } => {
            let d = pol_dimension_stable(*k)?;
            let claims = vec![Claim::eq(format!("dim Pol_{k}"), 2 * k + 2, d.dimension, "closed form 2k+2")];
            Ok(Outcome::new(claims, serde_json::to_value(&d).expect("serializable")))
        }
        EuclidCmd::Taylor { input, k, anchor } => {
            let psi = export::read_lattice_csv_exact(BufReader::new(File::open(input)?))?;
            let step = taylor_step(&psi, *k, *anchor)?;
            let phi = step.phi.eval_points(psi.values.keys().copied());
            let again = taylor_step(&phi, *k, *anchor)?;
            let tk: BTreeSet<_> = crate::euclid::canonical_triangle(*k, *anchor).into_iter().collect();
            let agrees = tk.iter().all(|p| phi.get(*p) == psi.get(*p));
            let in_pol = crate::euclid::polynomials::in_pol(&phi, *k)?;
            let claims = vec![
                Claim::eq("interpolation rank", 2 * k + 2, step.interpolation_rank, "dim Pol_k"),
                Claim::eq("agrees on T_k", true, agrees, "definition of the projection"),
                Claim::eq("projection in Pol_k", true, in_pol, "definition of the projection"),
                Claim::eq("projection idempotent", true, again.phi == step.phi, "projection property"),
            ];
            let remainder: LatticeFunction<Q> = psi.values.iter().map(|(p, v)| (*p, v - &phi.values[p])).collect();
            let mut buf = Vec::new();
            export::write_lattice_exact(&mut buf, &phi)?;
            let mut out = Outcome::new(
                claims,
                json!({
                    "k": k,
                    "anchor": anchor,
                    "bottom_row": step.phi.bottom.iter().map(format_q).collect::<Vec<_>>(),
                    "remainder_nonzero": remainder.values.values().filter(|v| **v != q(0)).count(),
                }),
            );
            out.artifact = Some(buf);
            Ok(out)
        }
        EuclidCmd::Green { window } => {
            if *window > cfg.max_window {
                return Err(CliError::Usage(format!("window {window} exceeds --max-window {}", cfg.max_window)));
            }
            if *window < 11 {
                return Err(CliError::Usage("window must be at least 11".into()));
            }
            let table = green_table(*window, &cfg.quadrature)?;
            let near = table.values.restrict(hex_points(*window).into_iter().filter(|&(m, n)| m.abs() <= 11 && n.abs() <= 11));
            let qb = qb_apply(&near)?;
            let residual = qb
                .values
                .iter()
                .filter(|((m, n), _)| m.abs() <= 10 && n.abs() <= 10)
                .map(|(p, v)| (v - if *p == (0, 0) { 1.0 } else { 0.0 }).abs())
                .fold(0.0, f64::max);
            let mut claims = vec![Claim::below("max |Q^b G - delta| on 21x21", 1e-6, residual, "fundamental solution")];
            let mut slopes = Vec::new();
            if *window >= 101 {
                for k in 0..=2usize {
                    let f = rational_analog(&table.values, k)?;
                    let fit = decay_slope(&f, 10.0, 100.0, 18)?;
                    let target = -(k as f64 + 1.0);
                    claims.push(Claim::near(
                        format!("decay slope of (Q^w)^{k} G"),
                        target,
                        cfg.slope_tol * (k as f64 + 1.0),
                        fit.slope,
                        "asymptotic decay |x|^-(k+1)",
                    ));
                    slopes.push(fit.slope);
                }
            }
            let mut buf = Vec::new();
            export::write_lattice_f64(&mut buf, &table.values)?;
            let mut out = Outcome::new(
                claims,
                json!({
                    "window": window,
                    "levels": table.levels,
                    "error_estimate": table.error_estimate,
                    "points": table.values.len(),
                    "slopes": slopes,
                }),
            );
            out.artifact = Some(buf);
            Ok(out)
        }
        EuclidCmd::Cauchy { kernel, k, radius } => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let p = random_polynomial(*k, &mut rng);
            let domain = hex_points(*radius);
            let psi = p.eval_points(domain.iter().copied());
            let reach = 2 * radius + 2;
            let (claim, rep) = match kernel {
                KernelKind::Pascal => {
                    let rep = cauchy_reconstruct(&domain, &psi, &pascal_kernel(reach))?;
                    (Claim::eq("exact reconstruction", true, rep.exact, "Cauchy formula"), rep)
                }
                KernelKind::Fourier => {
                    let g = green_table(reach, &cfg.quadrature)?;
                    let rep = cauchy_reconstruct(&domain, &psi.map(q_to_f64), &g.values)?;
                    (Claim::below("max reconstruction error", 1e-5, rep.max_error, "Cauchy formula"), rep)
                }
            };
            Ok(Outcome::new(vec![claim], json!({ "k": k, "radius": radius, "report": rep })))
        }
    }
}

// hyper

fn hyper_cmd(cmd: &HyperCmd, cfg: &RunConfig) -> Result<Outcome> {
    match cmd {
        HyperCmd::Ball { radius } => {
            // growth is exponential; the boundary of D_8 already has ~ 3·10⁵ vertices
            if *radius > 8 {
                return Err(CliError::Usage("radius above 8 is not supported".into()));
            }
            let ball = build_ball(*radius);
            let mut claims = Vec::new();
            let mut word = Word::parse("bwbwbwbw", true)?;
            for k in 1..=*radius {
                claims.push(Claim::eq(format!("|boundary D_{k}|"), word.len(), ball.boundary_size(k), "substitution lengths"));
                if k < *radius {
                    word = substitute(&word)?;
                }
            }
            let sizes: Vec<usize> = (0..=*radius).map(|k| ball.boundary_size(k)).collect();
            let doc = ball.to_json();
            let mut out = Outcome::new(claims, json!({ "radius": radius, "vertices": ball.num_vertices(), "layer_sizes": sizes }));
            out.artifact = Some(export::to_sorted_json(&doc)?.into_bytes());
            Ok(out)
        }
        HyperCmd::Word { radius, layer } => {
            if *layer == 0 || layer > radius {
                return Err(CliError::Usage("need 1 <= layer <= radius".into()));
            }
            let ball = build_ball(*radius);
            let w = ball.boundary_word(*layer)?;
            let b = w.count(crate::complex::Color::Black);
            let mut claims = vec![
                Claim::eq("word length", ball.boundary_size(*layer), w.len(), "boundary cycle"),
                Claim::eq("#b = #w", b, w.len() - b, "alternating strip"),
            ];
            if layer < radius {
                let next = ball.boundary_word(layer + 1)?;
                claims.push(Claim::eq("substitution gives next layer", true, substitute(&w)?.equivalent(&next), "boundary substitution"));
            }
            Ok(Outcome::new(claims, json!({ "layer": layer, "word": w.to_string() })))
        }
        HyperCmd::Dof { radius, rank } => {
            if *radius == 0 {
                return Err(CliError::Usage("radius must be positive".into()));
            }
            if *rank {
                check_radius(*radius, cfg)?;
            }
            let ball = build_ball(*radius);
            let c = equation_count(&ball)?;
            let mut claims = vec![
                Claim::eq("equations = B_R + N_{R-1} - 1", c.equations_formula, c.equations, "strip count"),
                Claim::eq("dof = N_R - Eq_R", c.dof_formula, c.dof, "|boundary|/2 + 1"),
                Claim::eq("#b = #w on every layer", true, c.letters_balanced, "alternating strip"),
            ];
            let mut data = json!({ "count": c });
            if *rank {
                let r = dof_rank_check(&ball, cfg.max_radius)?;
                claims.push(Claim::eq("exact nullity", r.expected, r.nullity, "|boundary|/2 + 1"));
                claims.push(Claim::eq("equations independent", r.equations, r.rank, "rank of Q^b"));
                data["rank"] = json!(r);
            }
            Ok(Outcome::new(claims, data))
        }
        HyperCmd::Special { kind, radius, policy, layer } => {
            check_radius(*radius, cfg)?;
            let ball = build_ball(*radius);
            let f = match kind {
                SpecialKind::ZPr => z_default(&ball, *layer, *policy)?,
                SpecialKind::PsiXl => {
                    let (x, l) = default_direction(&ball).ok_or(HyperError::BallTooSmall { radius: *radius, needed: 2 })?;
                    psi_function(&ball, x, l, *policy)?
                }
            };
            let residual = ball
                .black_triangles()
                .iter()
                .map(|&t| ball.triangles[t].iter().map(|&v| f.values.at(v)).sum::<Q>())
                .filter(|s| *s != q(0))
                .count();
            let zeros_hold = f.zero_region.iter().all(|&v| f.values.at(v) == q(0));
            let walks = zero_set_components(&ball, &f.values)?;
            let claims = vec![
                Claim::eq("black triangles with nonzero sum", 0, residual, "d-holomorphic"),
                Claim::eq("prescribed zeros", true, zeros_hold, "construction"),
                Claim::eq("zero walks right-convex", true, walks.all_right_convex, "zero-set shape"),
            ];
            let values: Vec<(usize, String)> = f.values.values.iter().map(|(v, x)| (*v, format_q(x))).collect();
            let mut out = Outcome::new(claims, json!({ "function": f, "walks": walks.walks.len() }));
            out.artifact = Some(export::to_sorted_json(&json!({ "function": f, "values": values }))?.into_bytes());
            Ok(out)
        }
    }
}

// dyn

fn dyn_cmd(cmd: &DynCmd) -> Result<Outcome> {
    match cmd {
        DynCmd::Grow { word, cyclic, steps, emit, cap } => {
            let w = Word::parse(word, *cyclic)?;
            let series = growth_series(&w, *steps, *cap)?;
            let mut claims = Vec::new();
            for (i, pair) in series.words.windows(2).enumerate() {
                let (alt, rep) = pair[0].pair_census();
                let law = if pair[0].cyclic { 4 * alt + 3 * rep } else { crate::dynamics::substituted_length(&pair[0]) };
                claims.push(Claim::eq(format!("length at step {}", i + 1), law, pair[1].len(), "length law"));
            }
            let data = match emit {
                Emit::Lengths => json!({ "lengths": series.lengths, "ratios": series.ratios, "deviations": series.deviations }),
                Emit::Words => json!({
                    "lengths": series.lengths,
                    "words": series.words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                }),
            };
            Ok(Outcome::new(claims, data))
        }
        DynCmd::Perron => {
            let c = perron_certificate();
            let claims = vec![
                Claim::eq("quadratic factor", vec![1, -4, 1], c.quadratic_factor.clone(), "lambda^2 - 4 lambda + 1"),
                Claim::eq("exact division", true, c.remainder_is_zero, "characteristic polynomial"),
                Claim::eq("spectral radius", "2+sqrt(3)".to_string(), c.eigenvalue.clone(), "growth rate"),
                Claim::eq("certificate", true, c.pass, "Perron-Frobenius"),
            ];
            Ok(Outcome::new(claims, serde_json::to_value(&c).expect("serializable")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(args: &[&str]) -> Report {
        let cli = Cli::try_parse_from(std::iter::once("dca").chain(args.iter().copied())).unwrap();
        execute(&cli, args.iter().map(|s| s.to_string()).collect()).unwrap().0
    }

    #[test]
    fn config_file_and_flags() {
        let g = parse_config("seed = 7\n# comment\nmax_radius=3\nformat=csv\n").unwrap();
        assert_eq!((g.seed, g.max_radius, g.format), (Some(7), Some(3), Some(Format::Csv)));
        assert!(matches!(parse_config("bogus=1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_config("seed"), Err(CliError::Usage(_))));
        let args = GlobalArgs { seed: Some(1), ..parse_config("seed=7\ngrid=96").unwrap() };
        let cfg = RunConfig::resolve(&args).unwrap();
        assert_eq!((cfg.seed, cfg.quadrature.grid, cfg.max_radius), (1, 96, 4));
    }

    #[test]
    fn small_commands_pass() {
        for args in [
            &["dyn", "perron"][..],
            &["euclid", "pol-dim", "--k", "5"],
            &["hyper", "dof", "--radius", "3", "--rank"],
            &["hyper", "word", "--radius", "3", "--layer", "2"],
            &["dyn", "grow", "--word", "ww", "--cyclic", "--steps", "3"],
            &["core", "liouville", "--n", "1"],
        ] {
            let r = report(args);
            assert!(r.pass, "{args:?}: {:?}", r.claims);
        }
        let r = report(&["hyper", "dof", "--radius", "3", "--rank"]);
        assert_eq!(r.claims.iter().find(|c| c.id == "exact nullity").unwrap().computed, json!(61));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["dca", "dyn", "perron"]), 0);
        assert_eq!(run(["dca", "hyper", "nonsense"]), 2);
        assert_eq!(run(["dca", "hyper", "dof", "--radius", "6", "--rank"]), 2);
    }

    #[test]
    fn output_is_reproducible() {
        let args = ["core", "max-principle", "--hex", "3", "--trials", "5", "--seed", "3"];
        let a = export::to_sorted_json(&report(&args)).unwrap();
        let b = export::to_sorted_json(&report(&args)).unwrap();
        assert_eq!(a, b);
        assert!(!a.contains("timing_ms"));
    }
}
