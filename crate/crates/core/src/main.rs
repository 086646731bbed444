//! Command-line front end.
//!
//! Exit codes: 0 ok, 2 input error, 3 degenerate, 4 unbounded,
//! 5 verification failure, 6 generation failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polydiam::analysis::{
    run_bound, run_diameter, run_trace, AnalysisConfig, AnalysisError, LemmaSelection,
};
use polydiam::generators::GeneratorSpec;
use polydiam::polytope::HRepresentation;
use polydiam::report::{render, OutputFormat};
use polydiam::{parse_hrep, run_analyze, write_hrep};

#[derive(Parser)]
#[command(name = "polydiam", version, about = "Polytope diameters and condition-number diameter bounds from H-representations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full pipeline: vertices, graph, diameter, condition numbers, cone
    /// measurements, inequality verification, and the diameter ceiling.
    Analyze {
        /// Input `.hrep` file
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Exact graph diameter only (no sampling).
    Diameter {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Condition numbers and the diameter ceiling only (no sampling).
    Bound {
        file: PathBuf,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Verify the inequality chain; exits 5 on any failure beyond the
    /// Monte-Carlo slack.
    Verify {
        file: PathBuf,
        /// Which inequality family to check
        #[arg(long, default_value = "all")]
        lemma: LemmaArg,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Two-sided frontier expansion between two vertex ids.
    Trace {
        file: PathBuf,
        /// Start vertex id
        #[arg(long)]
        from: usize,
        /// End vertex id
        #[arg(long)]
        to: usize,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Write a generated polytope as a `.hrep` file.
    Generate {
        family: FamilyArg,
        /// Ambient dimension (hypercube, simplex, cross-polytope,
        /// random-tangent)
        #[arg(long)]
        dim: Option<usize>,
        /// Row count (random-tangent)
        #[arg(long)]
        rows: Option<usize>,
        /// Side count (regular-polygon)
        #[arg(long)]
        sides: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// Monte-Carlo sample count
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Override the tight/feasibility tolerance
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Also scan all nonzero square minors for the condition number
    #[arg(long)]
    all_minors: bool,
    /// Add uniform noise in [-SIGMA, SIGMA] to the offsets before analysis
    #[arg(long, value_name = "SIGMA")]
    perturb: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Text,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Text => OutputFormat::Text,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LemmaArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

impl From<LemmaArg> for LemmaSelection {
    fn from(l: LemmaArg) -> Self {
        match l {
            LemmaArg::One => LemmaSelection::only(1),
            LemmaArg::Two => LemmaSelection::only(2),
            LemmaArg::Three => LemmaSelection::only(3),
            LemmaArg::All => LemmaSelection::all(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hypercube,
    Simplex,
    RegularPolygon,
    CrossPolytope,
    RandomTangent,
}

impl CommonOpts {
    fn config(&self, lemmas: LemmaSelection) -> AnalysisConfig {
        AnalysisConfig {
            samples: self.samples,
            seed: self.seed,
            tolerance: self.tol,
            all_minors: self.all_minors,
            perturb: self.perturb,
            lemmas,
            ..AnalysisConfig::default()
        }
    }
}

fn fail(code: u8, message: impl std::fmt::Display) -> ExitCode {
    eprintln!("polydiam: {message}");
    ExitCode::from(code)
}

fn load(file: &PathBuf) -> Result<(HRepresentation, String), ExitCode> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| fail(2, format!("{}: {e}", file.display())))?;
    let h = parse_hrep(&text).map_err(|e| fail(2, e))?;
    Ok((h, file.display().to_string()))
}

fn analysis_exit(err: AnalysisError) -> ExitCode {
    fail(err.exit_code(), err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze { file, opts } => {
            let (h, name) = match load(&file) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let config = opts.config(LemmaSelection::all());
            match run_analyze(h, &config, Some(name), "analyze") {
                Ok(report) => {
                    print!("{}", render(&report, opts.format.into()));
                    if report.all_lemmas_pass() {
                        ExitCode::SUCCESS
                    } else {
                        fail(5, format!("{} inequality check(s) failed", report.lemma_failures))
                    }
                }
                Err(e) => analysis_exit(e),
            }
        }
        Command::Diameter { file, opts } => {
            let (h, name) = match load(&file) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match run_diameter(h, &opts.config(LemmaSelection::all()), Some(name)) {
                Ok(report) => {
                    print!("{}", render(&report, opts.format.into()));
                    ExitCode::SUCCESS
                }
                Err(e) => analysis_exit(e),
            }
        }
        Command::Bound { file, opts } => {
            let (h, name) = match load(&file) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match run_bound(h, &opts.config(LemmaSelection::all()), Some(name)) {
                Ok(report) => {
                    print!("{}", render(&report, opts.format.into()));
                    ExitCode::SUCCESS
                }
                Err(e) => analysis_exit(e),
            }
        }
        Command::Verify { file, lemma, opts } => {
            let (h, name) = match load(&file) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let config = opts.config(lemma.into());
            match run_analyze(h, &config, Some(name), "verify") {
                Ok(report) => {
                    print!("{}", render(&report, opts.format.into()));
                    if report.all_lemmas_pass() {
                        ExitCode::SUCCESS
                    } else {
                        fail(5, format!("{} inequality check(s) failed", report.lemma_failures))
                    }
                }
                Err(e) => analysis_exit(e),
            }
        }
        Command::Trace { file, from, to, opts } => {
            let (h, name) = match load(&file) {
                Ok(v) => v,
                Err(code) => return code,
            };
            match run_trace(h, &opts.config(LemmaSelection::all()), Some(name), from, to) {
                Ok(report) => {
                    print!("{}", render(&report, opts.format.into()));
                    ExitCode::SUCCESS
                }
                Err(e) => analysis_exit(e),
            }
        }
        Command::Generate { family, dim, rows, sides, seed, output } => {
            let need = |value: Option<usize>, flag: &str| {
                value.ok_or_else(|| fail(2, format!("missing required --{flag} for this family")))
            };
            let spec = match family {
                FamilyArg::Hypercube => match need(dim, "dim") {
                    Ok(dim) => GeneratorSpec::Hypercube { dim },
                    Err(code) => return code,
                },
                FamilyArg::Simplex => match need(dim, "dim") {
                    Ok(dim) => GeneratorSpec::Simplex { dim },
                    Err(code) => return code,
                },
                FamilyArg::RegularPolygon => match need(sides, "sides") {
                    Ok(sides) => GeneratorSpec::RegularPolygon { sides },
                    Err(code) => return code,
                },
                FamilyArg::CrossPolytope => match need(dim, "dim") {
                    Ok(dim) => GeneratorSpec::CrossPolytope { dim },
                    Err(code) => return code,
                },
                FamilyArg::RandomTangent => {
                    match (need(rows, "rows"), need(dim, "dim")) {
                        (Ok(rows), Ok(dim)) => GeneratorSpec::RandomTangent { rows, dim, seed },
                        (Err(code), _) | (_, Err(code)) => return code,
                    }
                }
            };
            let h = match spec.build() {
                Ok(h) => h,
                Err(e) => return fail(6, e),
            };
            let text = format!("# {}\n{}", spec.describe(), write_hrep(&h));
            match std::fs::write(&output, text) {
                Ok(()) => {
                    println!("wrote {} ({} rows, dim {})", output.display(), h.m(), h.n());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(6, format!("{}: {e}", output.display())),
            }
        }
    }
}
