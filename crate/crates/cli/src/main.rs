use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sftkit::conjugacy::{transport_presentation, verify_transport_equivalence, SlidingBlockCode};
use sftkit::factor::{run_staged_fill, surjectivity_harness, verify_factor_window};
use sftkit::format::{parse_code, parse_codec, parse_layout, parse_pattern_file, parse_spec, print_pattern_file, print_spec};
use sftkit::mixing::{
    all_subsets, check_block_gluing, check_g_extension, check_safe_symbol, check_ssf, enumerate_first_offenders,
    GluingBounds, PropertyReport,
};
use sftkit::sft::{entropy_estimate, fixed_point_symbols};
use sftkit::snapshot::write_snapshots;
use sftkit::{hypercube, Cube, Pattern, SearchBudget, SftSpec, Symbol};

mod run;

use run::RunRecord;

#[derive(Parser)]
#[command(name = "sftkit", version, about = "Shifts of finite type on Z^d: languages, mixing checks, conjugacies and factor maps")]
struct Cli {
    /// Symbol trials allowed per search.
    #[arg(long, global = true, default_value_t = 200_000_000)]
    max_nodes: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mixing and extension properties.
    #[command(subcommand)]
    Props(Props),
    /// Language counts.
    #[command(subcommand)]
    Lang(Lang),
    /// Presentation of the image of an SFT under a conjugacy.
    Transport(TransportArgs),
    /// Staged fill on determined-zone layouts.
    #[command(subcommand)]
    Factor(Factor),
}

#[derive(Args)]
struct SpecArg {
    #[arg(long)]
    spec: PathBuf,
    /// Write the report to this file as well.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Props {
    /// Is a symbol safe on patterns of C_bound?
    Safe {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        symbol: String,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 1)]
        radius: u64,
    },
    /// Single-site fillability of a nearest-neighbor SFT.
    Ssf {
        #[command(flatten)]
        spec: SpecArg,
    },
    /// First offenders of diameter at most `bound`.
    Offenders {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        radius: u64,
    },
    /// g-extension over all subsets of C_bound.
    Gext {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 0)]
        g: u64,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        #[arg(long, default_value_t = 2)]
        radius: u64,
    },
    /// Block gluing at gap g for rectangles of side at most `bound`.
    Gluing {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long, default_value_t = 0)]
        g: u64,
        #[arg(long, default_value_t = 2)]
        bound: usize,
        /// Side of the window the rectangles are placed in.
        #[arg(long, default_value_t = 6)]
        window: usize,
        #[arg(long, default_value_t = 1)]
        radius: u64,
    },
}

#[derive(Subcommand)]
enum Lang {
    /// |L_{C_side}| at a verification radius, and ln(count)/side^d.
    Count {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = 0)]
        radius: u64,
    },
}

#[derive(Args)]
struct TransportArgs {
    /// Spec file of the source SFT.
    #[arg(long)]
    forbidden: PathBuf,
    /// Code table of the inverse code (target to source).
    #[arg(long)]
    inverse_code: PathBuf,
    /// Code table of the forward code; adds consistency patterns and runs
    /// the equivalence check.
    #[arg(long)]
    code: Option<PathBuf>,
    /// Side of the cube used by the equivalence check.
    #[arg(long, default_value_t = 3)]
    window: usize,
    /// Write the transported spec here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Factor {
    /// Fill a layout window and write the output, snapshots and run record.
    Run {
        #[arg(long)]
        target_spec: PathBuf,
        #[arg(long)]
        layout: PathBuf,
        #[arg(long)]
        codec: Option<PathBuf>,
        /// Output pattern file.
        #[arg(long)]
        out: PathBuf,
        /// Directory for stage snapshots and `run.json`.
        #[arg(long)]
        snapshots: PathBuf,
        /// Background symbol; defaults to the least fixed-point symbol.
        #[arg(long)]
        star: Option<String>,
        /// Assert that the target has the g-extension property at this radius.
        #[arg(long)]
        extension_radius: Option<u64>,
    },
    /// Re-check a run directory written by `factor run`.
    Verify {
        #[arg(long)]
        run: PathBuf,
    },
    /// Check that chosen blocks are produced inside a zone of the 3×3 lattice.
    Surject {
        #[arg(long)]
        target_spec: PathBuf,
        #[arg(long)]
        codec: PathBuf,
        /// A single target pattern file; without it every block on C_side is tried.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 3)]
        side: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Lib(sftkit::Error),
}

impl From<sftkit::Error> for Failure {
    fn from(e: sftkit::Error) -> Self {
        Failure::Lib(e)
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "{m}"),
            Failure::Lib(e) => write!(f, "{e}"),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn with_path<T>(path: &Path, r: sftkit::Result<T>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        sftkit::Error::Parse { .. } => Failure::Usage(format!("{}:{e}", path.display())),
        other => Failure::Lib(other),
    })
}

fn load_spec(path: &Path) -> Result<SftSpec, Failure> {
    with_path(path, parse_spec(&read(path)?))
}

fn load_code(path: &Path) -> Result<SlidingBlockCode, Failure> {
    with_path(path, parse_code(&read(path)?))
}

/// Writes to standard output, ignoring a closed pipe.
fn say(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn emit<T: Serialize>(value: &T, report: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    say(&format!("{text}\n"));
    if let Some(path) = report {
        std::fs::write(path, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

fn report(r: PropertyReport, path: Option<&Path>) -> Outcome {
    emit(&r, path)?;
    Ok(!r.is_refuted())
}

fn symbol(spec: &SftSpec, name: &str) -> Result<Symbol, Failure> {
    spec.alphabet().lookup(name).ok_or_else(|| Failure::Usage(format!("symbol `{name}` not in the alphabet")))
}

fn props(cmd: Props, budget: &SearchBudget) -> Outcome {
    match cmd {
        Props::Safe { spec, symbol: name, bound, radius } => {
            let s = load_spec(&spec.spec)?;
            let a = symbol(&s, &name)?;
            report(check_safe_symbol(&s, a, bound, radius, budget)?, spec.report.as_deref())
        }
        Props::Ssf { spec } => report(check_ssf(&load_spec(&spec.spec)?)?, spec.report.as_deref()),
        Props::Offenders { spec, bound, radius } => {
            let s = load_spec(&spec.spec)?;
            let found = enumerate_first_offenders(&s, bound, radius, budget)?;
            let listed = SftSpec::new(s.dim(), s.alphabet().clone(), found)?;
            let text = print_spec(&listed);
            say(&text);
            if let Some(path) = &spec.report {
                std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            }
            Ok(true)
        }
        Props::Gext { spec, g, bound, radius } => {
            let s = load_spec(&spec.spec)?;
            let shapes = all_subsets(bound, s.dim())?;
            report(check_g_extension(&s, g, &shapes, radius, budget)?, spec.report.as_deref())
        }
        Props::Gluing { spec, g, bound, window, radius } => {
            let s = load_spec(&spec.spec)?;
            let bounds = GluingBounds { rectangle_side: bound, window_side: window, radius };
            report(check_block_gluing(&s, g, bounds, budget)?, spec.report.as_deref())
        }
    }
}

#[derive(Serialize)]
struct CountReport {
    side: usize,
    radius: u64,
    count: String,
    entropy_estimate: f64,
}

fn transport(args: TransportArgs, budget: &SearchBudget) -> Outcome {
    let source = load_spec(&args.forbidden)?;
    let inverse = load_code(&args.inverse_code)?;
    let (target, verdict) = match &args.code {
        Some(path) => {
            let code = load_code(path)?;
            let target = transport_presentation(&source, &code, &inverse, budget)?;
            let window = hypercube(Cube::C, args.window as i64, source.dim())?;
            let r = verify_transport_equivalence(&source, &target, &code, &inverse, &window, budget)?;
            eprintln!("{}", serde_json::to_string(&r).expect("reports serialize"));
            (target, !r.is_refuted())
        }
        None => {
            let list = sftkit::conjugacy::transport_forbidden(source.forbidden(), &inverse, budget)?;
            (SftSpec::new(source.dim(), inverse.source().clone(), list)?, true)
        }
    };
    let text = print_spec(&target);
    match &args.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
        None => say(&text),
    }
    Ok(verdict)
}

fn pick_star(spec: &SftSpec, name: Option<&str>) -> Result<Symbol, Failure> {
    match name {
        Some(n) => symbol(spec, n),
        None => fixed_point_symbols(spec)
            .into_iter()
            .next()
            .ok_or_else(|| Failure::Usage("target spec has no fixed-point symbol".into())),
    }
}

#[derive(Serialize)]
struct SurjectReport {
    targets: u64,
    achieved: u64,
    first_failure: Option<Pattern>,
}

fn factor(cmd: Factor, budget: &SearchBudget) -> Outcome {
    match cmd {
        Factor::Run { target_spec, layout, codec, out, snapshots, star, extension_radius } => {
            let spec_text = read(&target_spec)?;
            let mut spec = with_path(&target_spec, parse_spec(&spec_text))?;
            if let Some(g) = extension_radius {
                spec = spec.with_extension_certificate(g);
            }
            let layout_text = read(&layout)?;
            let lay = with_path(&layout, parse_layout(&layout_text))?;
            let codec_text = codec.as_deref().map(read).transpose()?;
            let psi = match (&codec, &codec_text) {
                (Some(p), Some(t)) => Some(with_path(p, parse_codec(t))?),
                _ => None,
            };
            let star = pick_star(&spec, star.as_deref())?;
            let run = run_staged_fill(&lay, &spec, star, psi.as_ref(), budget)?;
            let output = print_pattern_file(spec.alphabet(), &run.output);
            std::fs::write(&out, &output).map_err(|e| Failure::Usage(format!("{}: {e}", out.display())))?;
            write_snapshots(&run.trace, &snapshots)?;
            let record = RunRecord {
                target_spec: print_spec(&spec),
                layout: layout_text,
                codec: codec_text,
                star: spec.alphabet().name(star).to_string(),
                output,
                trace: run.trace,
            };
            record.save(&snapshots)?;
            let r = verify_factor_window(&run.output, &record.trace, &spec, &lay)?;
            report(r, None)
        }
        Factor::Verify { run } => {
            let record = RunRecord::load(&run)?;
            let spec = parse_spec(&record.target_spec)?;
            let lay = parse_layout(&record.layout)?;
            let (_, output) = parse_pattern_file(&record.output)?;
            report(verify_factor_window(&output, &record.trace, &spec, &lay)?, None)
        }
        Factor::Surject { target_spec, codec, target, side } => {
            let spec = load_spec(&target_spec)?;
            let psi = with_path(&codec, parse_codec(&read(&codec)?))?;
            let targets: Vec<Pattern> = match &target {
                Some(path) => vec![with_path(path, parse_pattern_file(&read(path)?))?.1],
                None => {
                    let cube = hypercube(Cube::C, side as i64, 2)?;
                    let total = sftkit::pattern::assignment_count(spec.alphabet().len(), cube.len())
                        .filter(|&t| t <= 1 << 20)
                        .ok_or_else(|| Failure::Usage(format!("too many blocks on C_{side}")))?;
                    (0..total).map(|r| sftkit::pattern::lex_unrank(r, &cube, spec.alphabet())).collect::<sftkit::Result<_>>()?
                }
            };
            let mut summary = SurjectReport { targets: targets.len() as u64, achieved: 0, first_failure: None };
            for t in &targets {
                if surjectivity_harness(&spec, &psi, t, budget)?.achieved {
                    summary.achieved += 1;
                } else if summary.first_failure.is_none() {
                    summary.first_failure = Some(t.clone());
                }
            }
            emit(&summary, None)?;
            Ok(summary.first_failure.is_none())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = SearchBudget { max_nodes: cli.max_nodes, ..SearchBudget::default() };
    let outcome = match cli.command {
        Command::Props(p) => props(p, &budget),
        Command::Lang(Lang::Count { spec, side, radius }) => (|| {
            let s = load_spec(&spec)?;
            let e = entropy_estimate(&s, side, radius, &budget)?;
            emit(&CountReport { side, radius, count: e.count.to_string(), entropy_estimate: e.h }, None)?;
            Ok(true)
        })(),
        Command::Transport(args) => transport(args, &budget),
        Command::Factor(f) => factor(f, &budget),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
