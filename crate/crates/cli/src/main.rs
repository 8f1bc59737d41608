use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use momsos::extract::ExtractionConfig;
use momsos::relax::FormulationTag;
use momsos::robust::GameTag;
use momsos::sdpsolve::SolverConfig;
use momsos_cli::{cmd_relax, cmd_reproduce, cmd_solve, cmd_verify, Report, RunManifest};

#[derive(Parser)]
#[command(name = "momsos", version, about = "Moment-SOS relaxations with solver noise models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the chosen relaxation as an SDPA sparse file.
    Relax(RunArgs),
    /// Relax, solve, extract minimizers and certify them.
    Solve(RunArgs),
    /// Compare penalized and max-min values of a robust reading.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "psd", env = "MOMSOS_GAME")]
        game: Game,
    },
    /// Re-run an experiment bundle.
    Reproduce {
        #[arg(value_parser = ["motzkin", "univariate"])]
        name: String,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, env = "MOMSOS_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, env = "MOMSOS_OUT")]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Game {
    Trace,
    Psd,
    Canonical,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, env = "MOMSOS_EPSILON_STAR")]
    epsilon_star: Option<f64>,
    #[arg(long, env = "MOMSOS_LAMBDA_STAR")]
    lambda_star: Option<f64>,
    #[arg(long, env = "MOMSOS_BETA_BAR")]
    beta_bar: Option<f64>,
    #[arg(long, env = "MOMSOS_MAX_ITER")]
    max_iter: Option<usize>,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            epsilon_star: self.epsilon_star.unwrap_or(d.epsilon_star),
            lambda_star: self.lambda_star.unwrap_or(d.lambda_star),
            beta_bar: self.beta_bar.unwrap_or(d.beta_bar),
            max_iter: self.max_iter.unwrap_or(d.max_iter),
            ..d
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Builtin (`motzkin`, `univariate`, `x2`) or JSON problem file.
    problem: String,
    #[arg(long, env = "MOMSOS_FORMULATION", default_value = "nominal-dual", value_parser = [
        "nominal-primal", "nominal-dual", "noise-dual", "noise-penalized", "priority-trace",
        "priority-psd", "priority-psd-primal", "priority-psd-dual", "canonical-robust",
    ])]
    formulation: String,
    #[arg(long, env = "MOMSOS_ORDER")]
    order: Option<u32>,
    #[arg(long, env = "MOMSOS_EPS")]
    eps: Option<String>,
    #[arg(long, env = "MOMSOS_ETA")]
    eta: Option<String>,
    /// Parameter of the `univariate` builtin.
    #[arg(long, env = "MOMSOS_GAMMA")]
    gamma: Option<String>,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, env = "MOMSOS_SEED", default_value_t = 0)]
    seed: u64,
    /// Output path: SDPA file for `relax`, JSON-lines report otherwise.
    #[arg(long, env = "MOMSOS_OUT")]
    out: Option<PathBuf>,
    /// Re-run from a report's echoed manifest instead of the flags.
    #[arg(long, env = "MOMSOS_MANIFEST")]
    manifest: Option<PathBuf>,
}

impl RunArgs {
    fn manifest(&self) -> Result<RunManifest> {
        if let Some(path) = &self.manifest {
            let report = Report::parse(&std::fs::read_to_string(path)?)?;
            let rec = report
                .stage("manifest")
                .ok_or_else(|| anyhow::anyhow!("no manifest record in `{}`", path.display()))?;
            let mut m: RunManifest = serde_json::from_value(rec.clone())?;
            if self.out.is_some() {
                m.out = self.out.clone();
            }
            return Ok(m);
        }
        let tag: FormulationTag = self.formulation.parse()?;
        let mut m = RunManifest::new(self.problem.clone(), tag);
        m.order = self.order;
        m.eps = self.eps.clone();
        m.eta = self.eta.clone();
        m.gamma = self.gamma.clone();
        m.solver = self.solver.config();
        m.extraction = ExtractionConfig::default();
        m.seed = self.seed;
        m.out = self.out.clone();
        Ok(m)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let report = match cli.command {
        Command::Relax(args) => cmd_relax(&args.manifest()?)?.0,
        Command::Solve(args) => cmd_solve(&args.manifest()?)?.0,
        Command::Verify { run, game } => {
            let game = match game {
                Game::Trace => GameTag::PriorityTrace,
                Game::Psd => GameTag::PriorityPsd,
                Game::Canonical => GameTag::Canonical,
            };
            cmd_verify(&run.manifest()?, game)?.0
        }
        Command::Reproduce {
            name,
            solver,
            seed,
            out,
        } => {
            let extraction = ExtractionConfig {
                seed,
                ..ExtractionConfig::default()
            };
            let report = cmd_reproduce(&name, &solver.config(), &extraction)?;
            if let Some(path) = out {
                report.write(&path)?;
            }
            report
        }
    };
    print!("{}", report.to_jsonl());
    Ok(())
}
