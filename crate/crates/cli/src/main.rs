use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use priorlab::belief_mdp::{text::parse_model, Belief};
use priorlab::families::Family;
use priorlab_cli::error::lift;
use priorlab_cli::exec::{self, checks_outcome, family_bounds, Outcome};
use priorlab_cli::scenario::{BeliefMdp, BoundCheck, Kind, Scenario};
use priorlab_cli::{parse_scenarios, reproduce, CliError, Options, Result, EXAMPLES};

#[derive(Parser)]
#[command(name = "priorlab", version, about = "Prior-sensitivity laboratory for stochastic control")]
struct Cli {
    /// Base seed for `seed_count` plans.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Directory for CSV output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the tolerance of asserted comparisons.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Run independent scenarios and experiment cells concurrently.
    #[arg(long, global = true)]
    parallel: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a named example.
    Reproduce {
        example: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
        /// List the example ids.
        #[arg(long)]
        list: bool,
    },
    /// Run every scenario of a file.
    Run { file: PathBuf },
    /// Single-stage bound checks, from a file or a named family.
    Bounds {
        file: Option<PathBuf>,
        #[arg(long)]
        family: Option<String>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "tv,mismatch")]
        checks: Vec<String>,
    },
    /// Run the `[empirical]` scenarios of a file.
    Empirical { file: PathBuf },
    /// Value iteration (and optionally discounted bounds) on a model file.
    Vi {
        model: PathBuf,
        #[arg(long, default_value_t = exec::VI_RESOLUTION)]
        resolution: u32,
        #[arg(long, value_delimiter = ',')]
        prior: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        prior_prime: Option<Vec<f64>>,
        #[arg(long)]
        horizon: Option<usize>,
    },
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))
}

fn emit(outcomes: Vec<(String, Result<Outcome>)>, opts: &Options) -> i32 {
    let mut code = 0;
    for (id, res) in outcomes {
        match res.and_then(|o| o.write(opts).map(|_| o)) {
            Ok(o) => {
                print!("{}", o.render());
                if o.failed {
                    code = code.max(1);
                }
            }
            Err(e) => {
                eprintln!("{id}: {e}");
                code = code.max(e.exit_code());
            }
        }
    }
    code
}

fn scenarios_of(file: &PathBuf, keep: impl Fn(&Scenario) -> bool) -> Result<Vec<Scenario>> {
    Ok(parse_scenarios(&read(file)?)?.into_iter().filter(keep).collect())
}

fn parse_checks(names: &[String]) -> Result<Vec<BoundCheck>> {
    names
        .iter()
        .map(|c| match c.as_str() {
            "tv" => Ok(BoundCheck::Tv),
            "mismatch" => Ok(BoundCheck::Mismatch),
            "wasserstein" => Ok(BoundCheck::Wasserstein),
            other => Err(CliError::Usage(format!("unknown check `{other}`"))),
        })
        .collect()
}

fn belief(w: Option<Vec<f64>>) -> Result<Option<Belief>> {
    w.map(|w| Belief::new(w).map_err(|e| CliError::Usage(e.to_string()))).transpose()
}

fn dispatch(cli: Cli) -> Result<i32> {
    let opts = Options {
        seed: cli.seed,
        out: cli.out,
        tol: cli.tol,
        parallel: cli.parallel,
    };
    match cli.command {
        Command::Reproduce { example, n, list } => {
            if list {
                for (id, about) in EXAMPLES {
                    println!("{id:<22}{about}");
                }
                return Ok(0);
            }
            let id = example.ok_or_else(|| CliError::Usage("reproduce needs an example id or --list".into()))?;
            let rows = reproduce(&id, &n, opts.tol)?;
            Ok(emit(vec![(id.clone(), Ok(checks_outcome(&id, rows)))], &opts))
        }
        Command::Run { file } => {
            let scenarios = scenarios_of(&file, |_| true)?;
            Ok(emit(exec::run_all(&scenarios, &opts), &opts))
        }
        Command::Bounds { file, family, n, checks } => match (file, family) {
            (Some(file), None) => {
                let scenarios = scenarios_of(&file, |s| matches!(s.kind, Kind::SingleStage(_)))?;
                Ok(emit(exec::run_all(&scenarios, &opts), &opts))
            }
            (None, Some(name)) => {
                let family: Family = name.parse().map_err(|e: priorlab::Error| CliError::Usage(e.to_string()))?;
                let ns = if n.is_empty() { vec![10, 100, 1000] } else { n };
                let checks = parse_checks(&checks)?;
                Ok(emit(vec![(name, family_bounds(family, &ns, &checks))], &opts))
            }
            _ => Err(CliError::Usage("bounds takes a scenario file or --family".into())),
        },
        Command::Empirical { file } => {
            let scenarios = scenarios_of(&file, |s| matches!(s.kind, Kind::Empirical(_)))?;
            Ok(emit(exec::run_all(&scenarios, &opts), &opts))
        }
        Command::Vi { model, resolution, prior, prior_prime, horizon } => {
            let model = parse_model(&read(&model)?, 1).map_err(lift)?;
            let b = BeliefMdp {
                model,
                resolution: Some(resolution),
                tol: None,
                prior: belief(prior)?,
                prior_prime: belief(prior_prime)?,
                horizon,
            };
            if b.prior.is_some() != b.prior_prime.is_some() {
                return Err(CliError::Usage("--prior and --prior-prime go together".into()));
            }
            Ok(emit(vec![("vi".into(), exec::belief_mdp("vi", &b, &opts))], &opts))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
