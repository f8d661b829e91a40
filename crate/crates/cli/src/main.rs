//! `purepoint`: decide pure point spectrum of self-affine substitution tilings.

use clap::{Args, Parser, Subcommand, ValueEnum};
use purepoint_core::export::{render_svg, to_dot};
use purepoint_core::format::{emit_model, FormatError, InputFile};
use purepoint_core::model::{fixed_seed, validate, SubstitutionModel, Validated, DEFAULT_MAX_POINTS, DEFAULT_SEED_POWER_CAP};
use purepoint_core::numeric::{parse_rational, QVec};
use purepoint_core::oracle::{density_series, seed_cross_check, DensityOptions, DEFAULT_SAMPLES};
use purepoint_core::overlap::{OverlapOptions, DEFAULT_MAX_VERTICES};
use purepoint_core::pipeline::{check, CheckOptions, Outcome, PipelineError, Stage};
use purepoint_core::spectral::Verdict;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_PURE: u8 = 0;
const EXIT_NOT_PURE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_FAILURE: u8 = 3;

#[derive(Parser)]
#[command(name = "purepoint", version, about = "Overlap-coincidence check for self-affine substitution tilings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full decision procedure and print a report.
    Check {
        path: PathBuf,
        #[command(flatten)]
        run: RunFlags,
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        report: ReportFormat,
    },
    /// Print the interval model of a symbolic substitution.
    Suspend {
        path: PathBuf,
        #[arg(long)]
        precision_bits: Option<u32>,
    },
    /// Write the potential overlap graph as Graphviz DOT.
    Graph {
        path: PathBuf,
        #[arg(long)]
        dot: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Draw a patch and the tile shapes as SVG.
    Render {
        path: PathBuf,
        #[arg(long)]
        svg: PathBuf,
        #[arg(long, default_value_t = 4)]
        depth: usize,
        /// Digit-address depth of the tile point clouds.
        #[arg(long, default_value_t = 6)]
        tile_res: usize,
        #[arg(long)]
        precision_bits: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
    /// Translation agreement densities and a brute-force seed check.
    Oracle {
        path: PathBuf,
        /// Translation as comma-separated rational coordinates (flattened
        /// over the field basis); defaults to every translation basis vector.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        #[arg(long, default_value_t = 5)]
        n_max: u32,
        #[arg(long, default_value_t = 12)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Also rederive the seed classes by a quadratic scan.
        #[arg(long)]
        seeds: bool,
        #[arg(long)]
        precision_bits: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Margin for ρ_coin > ρ_res; defaults to 1e-6·β.
    #[arg(long)]
    tol_verdict: Option<f64>,
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MAX_VERTICES)]
    max_vertices: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
    max_points: usize,
    #[arg(long)]
    no_recenter: bool,
    #[arg(long, default_value_t = DEFAULT_SEED_POWER_CAP)]
    seed_power_cap: usize,
    /// Require a symbolic rule file and suspend it.
    #[arg(long)]
    suspend: bool,
}

impl RunFlags {
    fn options(&self) -> CheckOptions {
        let mut o = CheckOptions {
            tol_verdict: self.tol_verdict,
            recenter: !self.no_recenter,
            seed_power_cap: self.seed_power_cap,
            ..CheckOptions::default()
        };
        o.overlap.max_vertices = self.max_vertices;
        o.overlap.max_points = self.max_points;
        o
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Json,
    Text,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    stage: Option<Stage>,
    message: String,
}

impl Failure {
    fn input(stage: Stage, e: impl Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            stage: Some(stage),
            message: e.to_string(),
        }
    }

    fn other(e: impl Display) -> Self {
        Failure {
            code: EXIT_FAILURE,
            stage: None,
            message: e.to_string(),
        }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        Failure {
            code: if e.stage.is_input() { EXIT_INPUT } else { EXIT_FAILURE },
            stage: Some(e.stage),
            message: e.message,
        }
    }
}

fn read_input(path: &Path) -> Result<InputFile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::input(Stage::Parse, format!("{}: {e}", path.display())))?;
    InputFile::parse(&text).map_err(|e| Failure::input(Stage::Parse, e))
}

fn to_model(input: &InputFile, bits: Option<u32>) -> Result<SubstitutionModel, Failure> {
    input.to_model(bits).map_err(|e| match e {
        FormatError::Json(_) | FormatError::Schema(_) => Failure::input(Stage::Parse, e),
        _ => Failure::input(Stage::Validate, e),
    })
}

fn load(path: &Path, bits: Option<u32>, require_symbolic: bool) -> Result<SubstitutionModel, Failure> {
    let input = read_input(path)?;
    if require_symbolic && !input.is_symbolic() {
        return Err(Failure::input(Stage::Parse, "expected a symbolic rule file with `alphabet` and `rules`"));
    }
    to_model(&input, bits)
}

fn load_validated(path: &Path, bits: Option<u32>) -> Result<Validated, Failure> {
    validate(&load(path, bits, false)?).map_err(|e| Failure::input(Stage::Validate, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::other(format!("{}: {e}", path.display())))
}

fn run_check(path: &Path, run: &RunFlags) -> Result<Outcome, Failure> {
    let model = load(path, run.precision_bits, run.suspend)?;
    Ok(check(&model, &run.options())?)
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::PurePoint => EXIT_PURE,
        Verdict::NotPurePoint => EXIT_NOT_PURE,
        Verdict::Unreliable => EXIT_FAILURE,
    }
}

fn cmd_check(path: &Path, run: &RunFlags, format: ReportFormat) -> Result<u8, Failure> {
    let out = run_check(path, run)?;
    match format {
        ReportFormat::Json => println!("{}", out.report.to_json()),
        ReportFormat::Text => print!("{}", out.report.to_text()),
    }
    Ok(verdict_code(out.report.verdict))
}

fn cmd_graph(path: &Path, dot: &Path, run: &RunFlags) -> Result<u8, Failure> {
    let out = run_check(path, run)?;
    let (Some(g), Some(split)) = (&out.graph, &out.split) else {
        return Err(Failure::other(format!(
            "no graph was built: {}",
            out.report.caps_hit.join("; ")
        )));
    };
    write_file(dot, &to_dot(&out.validated, g, split))?;
    let c = &out.report.counts;
    println!("wrote {} ({} nodes, {} edges, {} in G_coin)", dot.display(), c.vertices, c.edges, c.g_coin_size);
    Ok(0)
}

fn cmd_render(path: &Path, svg: &Path, depth: usize, tile_res: usize, bits: Option<u32>, max_points: usize) -> Result<u8, Failure> {
    let v = load_validated(path, bits)?;
    let (_, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, max_points).map_err(|e| Failure::from(PipelineError::new(Stage::Seed, e)))?;
    let xi = v.model.to_flat_point(&xi).map_err(Failure::other)?;
    let text = render_svg(&v, &xi, depth, tile_res, max_points).map_err(Failure::other)?;
    write_file(svg, &text)?;
    println!("wrote {} ({} markers)", svg.display(), text.matches("class=\"marker\"").count());
    Ok(0)
}

fn parse_alpha(text: &str, width: usize) -> Result<QVec, Failure> {
    let parts: Vec<_> = text
        .split(',')
        .map(|s| parse_rational(s.trim()))
        .collect::<Option<_>>()
        .ok_or_else(|| Failure::input(Stage::Parse, format!("bad rational in --alpha {text:?}")))?;
    if parts.len() != width {
        return Err(Failure::input(
            Stage::Parse,
            format!("--alpha needs {width} coordinates, got {}", parts.len()),
        ));
    }
    QVec::from_rationals(&parts).ok_or_else(|| Failure::other("--alpha overflows"))
}

struct OracleArgs<'a> {
    alpha: Option<&'a str>,
    n_max: u32,
    depth: usize,
    samples: usize,
    seeds: bool,
    bits: Option<u32>,
    max_points: usize,
}

fn cmd_oracle(path: &Path, a: OracleArgs) -> Result<u8, Failure> {
    let v = load_validated(path, a.bits)?;
    let overlap = OverlapOptions {
        max_points: a.max_points,
        ..OverlapOptions::default()
    };
    let (_, xi) = fixed_seed(&v, DEFAULT_SEED_POWER_CAP, a.max_points).map_err(|e| Failure::from(PipelineError::new(Stage::Seed, e)))?;
    let xi = v.model.to_flat_point(&xi).map_err(Failure::other)?;
    let alphas = match a.alpha {
        Some(t) => vec![parse_alpha(t, xi.pos.dim())?],
        None => {
            let check = seed_cross_check(&v, DEFAULT_SEED_POWER_CAP, &overlap).map_err(Failure::other)?;
            check.basis.vectors
        }
    };
    let opts = DensityOptions {
        depth: a.depth,
        max_points: a.max_points,
        samples: a.samples,
        ..DensityOptions::default()
    };
    for (k, alpha) in alphas.iter().enumerate() {
        let s = density_series(&v, &xi, alpha, k, a.n_max, &opts).map_err(Failure::other)?;
        let shown: Vec<String> = v.realizer.realize_qvec(alpha).iter().map(|x| format!("{x:.6}")).collect();
        println!(
            "alpha {} = ({}) depth {}{}",
            k + 1,
            shown.join(", "),
            s.depth,
            if s.heuristic { " [heuristic: sampled point counts]" } else { "" }
        );
        println!("{:>4}  {:>10}", "n", "density");
        for (n, d) in s.n_values.iter().zip(&s.densities) {
            println!("{n:>4}  {d:>10.6}");
        }
        let rising = s.densities.windows(2).all(|w| w[1] >= w[0] - 0.02);
        let last = s.densities.last().copied().unwrap_or(0.0);
        println!(
            "{} (last {last:.4}; {})",
            if rising { "non-decreasing within 0.02" } else { "not monotone" },
            if last >= 0.9 { "near 1" } else { "bounded away from 1 so far" }
        );
    }
    if a.seeds {
        let c = seed_cross_check(&v, DEFAULT_SEED_POWER_CAP, &overlap).map_err(Failure::other)?;
        println!(
            "seed classes: grid {} brute force {} on {} points: {}",
            c.fast.len(),
            c.brute.len(),
            c.witness_points,
            if c.agrees() { "equal" } else { "DIFFERENT" }
        );
        if !c.agrees() {
            return Ok(EXIT_FAILURE);
        }
    }
    Ok(0)
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { path, run, report } => cmd_check(&path, &run, report),
        Command::Suspend { path, precision_bits } => {
            let model = load(&path, precision_bits, true)?;
            println!("{}", emit_model(&model));
            Ok(0)
        }
        Command::Graph { path, dot, run } => cmd_graph(&path, &dot, &run),
        Command::Render {
            path,
            svg,
            depth,
            tile_res,
            precision_bits,
            max_points,
        } => cmd_render(&path, &svg, depth, tile_res, precision_bits, max_points),
        Command::Oracle {
            path,
            alpha,
            n_max,
            depth,
            samples,
            seeds,
            precision_bits,
            max_points,
        } => cmd_oracle(
            &path,
            OracleArgs {
                alpha: alpha.as_deref(),
                n_max,
                depth,
                samples,
                seeds,
                bits: precision_bits,
                max_points,
            },
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match f.stage {
                Some(stage) => eprintln!("error [{stage}]: {}", f.message),
                None => eprintln!("error: {}", f.message),
            }
            ExitCode::from(f.code)
        }
    }
}
