use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use freeprod::config::{parse_config, parse_polys, RunConfig, SCHEMA};
use freeprod::example_gns::{build_default, verify_noncyclic, verify_v_onto};
use freeprod::freerep::{freeness_report, state_restriction_residual};
use freeprod::verify::{default_polys, faithfulness_suite, lemma_suite, moments_suite, vav_suite, LemmaSuiteOptions};
use freeprod::Error;
use serde_json::{json, Value};

/// Verification harness for reduced free products of finite-dimensional
/// C*-algebras on a truncated free Fock space.
#[derive(Parser, Debug)]
#[command(name = "freeprod", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// JSON run configuration (defaults to two copies of C² with states (½, ½))
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Truncation depth N (overrides the config)
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Seed for random instances (overrides the config)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long = "tol-psd", global = true)]
    tol_psd: Option<f64>,
    #[arg(long = "tol-norm", global = true)]
    tol_norm: Option<f64>,
    #[arg(long = "tol-faithful", global = true)]
    tol_faithful: Option<f64>,
    #[arg(long = "tol-free", global = true)]
    tol_free: Option<f64>,
    #[arg(long = "tol-pos", global = true)]
    tol_pos: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate moments of named polynomials
    Moments {
        /// JSON polynomial set (defaults to 1, pq, pqp)
        #[arg(long)]
        polys: Option<PathBuf>,
        #[arg(long)]
        with_oracle: bool,
    },
    /// Alternating centered moments and restriction to the factors
    Freeness {
        /// Largest word length (defaults to min(6, N))
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Closed-form compressions against direct and dense evaluation
    LemmaVerify {
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long)]
        with_oracle: bool,
    },
    /// Compressions of the free product onto one factor
    VavCheck {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Positivity of the free product state on random x*x, with witnesses
    Faithfulness {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: usize,
        #[arg(long)]
        with_oracle: bool,
    },
    /// The Toeplitz ⊗ M₂ example at shift truncation K
    ExampleToeplitz {
        #[arg(long = "K", default_value_t = 4)]
        k: usize,
        /// Weight of the symbol summand in ψ₁; 0 gives the onto, non-cyclic model
        #[arg(long, default_value_t = 0.0)]
        symbol_weight: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moments { .. } => "moments",
            Command::Freeness { .. } => "freeness",
            Command::LemmaVerify { .. } => "lemma-verify",
            Command::VavCheck { .. } => "vav-check",
            Command::Faithfulness { .. } => "faithfulness",
            Command::ExampleToeplitz { .. } => "example-toeplitz",
        }
    }

    fn default_depth(&self) -> usize {
        match self {
            Command::Freeness { .. } => 6,
            Command::LemmaVerify { max_n, .. } => (*max_n).max(1) + (*max_n).max(1) - 1,
            Command::VavCheck { n, .. } => (2 * n).max(2) - 1,
            _ => 4,
        }
    }
}

fn load_config(g: &Global) -> freeprod::Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(d) = g.depth {
        cfg.depth = Some(d);
    }
    if let Some(s) = g.seed {
        cfg.seed = Some(s);
    }
    let t = &mut cfg.tolerances;
    for (slot, flag) in [
        (&mut t.psd, g.tol_psd),
        (&mut t.norm, g.tol_norm),
        (&mut t.faithful, g.tol_faithful),
        (&mut t.free, g.tol_free),
        (&mut t.pos, g.tol_pos),
    ] {
        if let Some(v) = flag {
            *slot = v;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn to_value<T: serde::Serialize>(r: &T) -> Value {
    serde_json::to_value(r).expect("reports serialize")
}

fn run(cli: &Cli) -> freeprod::Result<(bool, Value)> {
    let cfg = load_config(&cli.global)?;
    let tol = cfg.tolerances;
    let seed = cfg.seed.unwrap_or(7);
    let depth = cfg.depth.unwrap_or_else(|| cli.command.default_depth());
    log::info!("{} at depth {depth}, seed {seed}", cli.command.name());
    let (passed, report) = match &cli.command {
        Command::Moments { polys, with_oracle } => {
            let space = cfg.build_space(depth)?;
            let polys = match polys {
                Some(path) => {
                    let text = fs::read_to_string(path)
                        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
                    parse_polys(&text)?.resolve(&space)?
                }
                None => default_polys(&space)?,
            };
            let r = moments_suite(&space, &polys, *with_oracle)?;
            (r.passed, to_value(&r))
        }
        Command::Freeness { max_degree } => {
            let space = cfg.build_space(depth)?;
            let r = freeness_report(&space, max_degree.unwrap_or(depth.min(6)), tol.free)?;
            let restriction = state_restriction_residual(&space)?;
            let ok = r.passed && restriction < 1e-12;
            (
                ok,
                json!({"freeness": to_value(&r), "state_restriction_residual": restriction}),
            )
        }
        Command::LemmaVerify {
            instances,
            max_n,
            with_oracle,
        } => {
            let space = cfg.build_space(depth)?;
            let opts = LemmaSuiteOptions {
                instances: *instances,
                seed,
                max_n: *max_n,
                with_oracle: *with_oracle,
            };
            let r = lemma_suite(&space, &opts, &tol)?;
            (r.passed, to_value(&r))
        }
        Command::VavCheck { n, instances, samples } => {
            let space = cfg.build_space(depth)?;
            let r = vav_suite(&space, *n, *instances, *samples, seed, &tol)?;
            (r.passed, to_value(&r))
        }
        Command::Faithfulness {
            instances,
            max_degree,
            with_oracle,
        } => {
            let space = cfg.build_space(depth)?;
            let r = faithfulness_suite(&space, *instances, *max_degree, seed, *with_oracle, &tol)?;
            (r.passed, to_value(&r))
        }
        Command::ExampleToeplitz { k, symbol_weight } => {
            let model = build_default(*k, *symbol_weight, &tol)?;
            let onto = verify_v_onto(&model, &tol)?;
            let noncyclic = verify_noncyclic(&model)?;
            (
                onto.passed && noncyclic.passed,
                json!({"v_onto": to_value(&onto), "noncyclic": to_value(&noncyclic)}),
            )
        }
    };
    let labels: Vec<&str> = cfg.factors.iter().map(|f| f.label.as_str()).collect();
    let mut out = json!({
        "schema": SCHEMA,
        "command": cli.command.name(),
        "passed": passed,
        "report": report,
    });
    if !matches!(cli.command, Command::ExampleToeplitz { .. }) {
        out["run"] = json!({"factors": labels, "depth": depth, "seed": seed, "tolerances": to_value(&tol)});
    }
    Ok((passed, out))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("FREEPROD_LOG")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok((passed, report)) => {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize") + "\n";
            match &cli.global.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("{}: checks failed", cli.command.name());
                ExitCode::from(1)
            }
        }
        Err(e @ Error::Exactness { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
        Err(e @ Error::Witness(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
