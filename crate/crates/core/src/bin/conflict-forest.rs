//! Command-line front end: generate instances, schedule, verify and compare
//! against exact optima.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error, 3 cap exceeded.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use conflict_forest::caps::Caps;
use conflict_forest::geometry::{gen_grid, gen_random_missing_links, gen_wheel, PowerScheme, RandomLinkParams};
use conflict_forest::instance::{
    to_canonical_json, Algorithm, ConflictModel, ConflictSpec, Instance, InstanceFile, ModelParams, ScheduleReport,
    FORMAT_VERSION,
};
use conflict_forest::oracle::{max_feasible_forest, opt_steiner_load, opt_tree_schedule};
use conflict_forest::scheduler::{cap_kruskal, CapKruskalOptions};
use conflict_forest::steiner::{mmst_weights, steiner_schedule};
use conflict_forest::{conn, Error, LinkId};

#[derive(Parser)]
#[command(name = "conflict-forest", version, about = "Schedule spanning and Steiner trees under conflict graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Schedule one or more instances.
    Schedule(ScheduleArgs),
    /// Check a schedule report against its instance.
    Verify {
        instance: PathBuf,
        report: PathBuf,
    },
    /// Compute an exact optimum and compare it with an algorithm's result.
    Oracle(OracleArgs),
}

#[derive(Subcommand)]
enum GenKind {
    /// The hub, spokes and rim instance.
    Wheel {
        #[arg(long)]
        k: usize,
        /// Attach the hub links to the innermost spoke node instead of the second.
        #[arg(long)]
        attach_at_zero: bool,
        /// Make the hub and the rim nodes terminals.
        #[arg(long)]
        steiner: bool,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random points with all short links and a random share of longer ones.
    Random {
        #[arg(long)]
        n: usize,
        /// Probability of keeping a link longer than 1.
        #[arg(long)]
        p: f64,
        #[arg(long)]
        seed: u64,
        /// Side of the square the nodes are placed in.
        #[arg(long, default_value_t = 3.0)]
        side: f64,
        /// Longest available link.
        #[arg(long, default_value_t = 2.0)]
        reach: f64,
        /// Number of terminals, chosen by the seed; omit for none.
        #[arg(long)]
        terminals: Option<usize>,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// A rectangular grid of nodes with links between neighbors.
    Grid {
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1.0)]
        spacing: f64,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    L2,
    Line,
    Sinr,
    Disk,
    Protocol,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::L2)]
    model: ModelArg,
    #[arg(long, default_value_t = 3.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Power exponent: P = length^(tau·alpha). Omit for uniform power.
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long = "disk-k", default_value_t = 1.0)]
    disk_k: f64,
    #[arg(long, default_value_t = 1.0)]
    k1: f64,
    #[arg(long, default_value_t = 1.0)]
    k2: f64,
}

impl ModelArgs {
    fn spec(&self) -> ConflictSpec {
        let (model, params) = match self.model {
            ModelArg::L2 => (ConflictModel::L2, None),
            ModelArg::Line => (ConflictModel::Line, None),
            ModelArg::Sinr => (
                ConflictModel::Sinr,
                Some(ModelParams {
                    alpha: Some(self.alpha),
                    beta: Some(self.beta),
                    noise: Some(self.noise),
                    power: Some(match self.tau {
                        None => PowerScheme::Uniform,
                        Some(tau) => PowerScheme::LengthExponent { tau },
                    }),
                    ..ModelParams::default()
                }),
            ),
            ModelArg::Disk => (
                ConflictModel::Disk,
                Some(ModelParams {
                    k: Some(self.disk_k),
                    ..ModelParams::default()
                }),
            ),
            ModelArg::Protocol => (
                ConflictModel::Protocol,
                Some(ModelParams {
                    k1: Some(self.k1),
                    k2: Some(self.k2),
                    ..ModelParams::default()
                }),
            ),
        };
        ConflictSpec {
            model,
            weights: None,
            params,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Conn,
    MstGreedy,
    Steiner,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Conn => Algorithm::Conn,
            AlgoArg::MstGreedy => Algorithm::MstGreedy,
            AlgoArg::Steiner => Algorithm::Steiner,
        }
    }
}

#[derive(Args)]
struct ScheduleArgs {
    /// Instance files.
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgoArg::Conn)]
    algo: AlgoArg,
    /// Make every slot dual-feasible and emit it once per direction (conn only).
    #[arg(long)]
    dual: bool,
    /// Report path for a single instance; printed to stdout if omitted.
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Directory for `<stem>.report.json` files, one per instance.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads across instance files.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record wall-clock runtime in the report (makes output nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum OracleMode {
    Forest,
    Schedule,
    Steiner,
}

#[derive(Args)]
struct OracleArgs {
    instance: PathBuf,
    #[arg(long, value_enum)]
    mode: OracleMode,
    /// A schedule report to compare against instead of running the algorithm.
    #[arg(long)]
    prior: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct OracleReport {
    format: u32,
    mode: OracleMode,
    /// Largest feasible forest size, fewest slots, or smallest Steiner load.
    optimum: usize,
    witness: Vec<LinkId>,
    compared: Comparison,
    /// Algorithm value over optimum for minimization, optimum over value for
    /// the forest; absent when the denominator is zero.
    ratio: Option<f64>,
}

#[derive(Serialize)]
struct Comparison {
    source: String,
    value: usize,
}

/// Failure with an exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen { kind } => cmd_gen(kind),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Verify { instance, report } => cmd_verify(&instance, &report),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: 2,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn emit(text: &str, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure {
            code: 2,
            message: format!("cannot write {}: {e}", path.display()),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_instance(path: &Path) -> CliResult<Instance> {
    let text = read(path)?;
    InstanceFile::from_json(&text)
        .and_then(|f| f.build())
        .map_err(|e| prefixed(path, e))
}

fn prefixed(path: &Path, e: Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn cmd_gen(kind: GenKind) -> CliResult<u8> {
    let (file, out) = match kind {
        GenKind::Wheel {
            k,
            attach_at_zero,
            steiner,
            model,
            out,
        } => {
            let w = gen_wheel(k, attach_at_zero)?;
            let mut file = InstanceFile::from_graph(&w.graph, Some(&w.positions), model.spec());
            if steiner {
                let mut terminals = vec![0];
                terminals.extend((0..k).map(|i| w.node(i, w.spoke_len - 1)));
                file.terminals = Some(terminals);
            }
            (file, out)
        }
        GenKind::Random {
            n,
            p,
            seed,
            side,
            reach,
            terminals,
            model,
            out,
        } => {
            let g = gen_random_missing_links(RandomLinkParams::new(n, side, p, reach, seed))?;
            let mut file = InstanceFile::from_graph(&g.graph, Some(&g.positions), model.spec());
            if let Some(t) = terminals {
                file.terminals = Some(pick_terminals(n, t, seed)?);
            }
            (file, out)
        }
        GenKind::Grid {
            rows,
            cols,
            spacing,
            model,
            out,
        } => {
            let g = gen_grid(rows, cols, spacing)?;
            (InstanceFile::from_graph(&g.graph, Some(&g.positions), model.spec()), out)
        }
    };
    // Reject files that would not load back, e.g. SINR parameters the links cannot meet.
    file.build()?;
    emit(&file.to_json()?, out.as_deref())?;
    Ok(0)
}

fn pick_terminals(n: usize, count: usize, seed: u64) -> CliResult<Vec<usize>> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    if count < 2 || count > n {
        return Err(Error::InvalidParameter(format!("terminal count {count} must lie in [2, {n}]")).into());
    }
    // A separate stream so terminals do not disturb the graph draw.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x7465_726d_696e_616c);
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(&mut rng);
    let mut chosen = nodes[..count].to_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

fn cmd_schedule(args: ScheduleArgs) -> CliResult<u8> {
    let caps = Caps::from_env()?;
    let algorithm = Algorithm::from(args.algo);
    if args.instances.len() > 1 && args.out_dir.is_none() {
        return Err(Failure {
            code: 2,
            message: "several instances need --out-dir".into(),
        });
    }
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| Failure {
            code: 2,
            message: format!("cannot create {}: {e}", dir.display()),
        })?;
    }
    let run = |path: &PathBuf| -> CliResult<bool> {
        let instance = load_instance(path)?;
        let start = Instant::now();
        let mut report = instance
            .schedule(algorithm, args.dual, &caps)
            .map_err(|e| prefixed(path, e))?;
        if args.timing {
            report.stats.runtime_ms = Some(start.elapsed().as_millis() as u64);
        }
        let out = match &args.out_dir {
            Some(dir) => Some(dir.join(report_name(path))),
            None => args.out.clone(),
        };
        emit(&report.to_json()?, out.as_deref())?;
        if !report.verification.ok() {
            let violation = instance.verify_report(&report).first_violation().map(ToString::to_string);
            eprintln!(
                "{}: schedule failed verification: {}",
                path.display(),
                violation.unwrap_or_default()
            );
        }
        Ok(report.verification.ok())
    };

    let jobs = args.jobs.max(1).min(args.instances.len());
    let results: Vec<CliResult<bool>> = if jobs <= 1 {
        args.instances.iter().map(run).collect()
    } else {
        let chunk = args.instances.len().div_ceil(jobs);
        std::thread::scope(|scope| {
            let handles: Vec<_> = args
                .instances
                .chunks(chunk)
                .map(|paths| scope.spawn(|| paths.iter().map(run).collect::<Vec<_>>()))
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("worker thread panicked"))
                .collect()
        })
    };

    let mut code = 0;
    for result in results {
        match result {
            Ok(true) => {}
            Ok(false) => code = code.max(1),
            Err(f) => {
                eprintln!("error: {}", f.message);
                code = code.max(f.code);
            }
        }
    }
    Ok(code)
}

fn report_name(path: &Path) -> String {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("instance");
    format!("{stem}.report.json")
}

fn cmd_verify(instance_path: &Path, report_path: &Path) -> CliResult<u8> {
    let instance = load_instance(instance_path)?;
    let report = ScheduleReport::from_json(&read(report_path)?).map_err(|e| prefixed(report_path, e))?;
    let check = instance.verify_report(&report);
    match check.first_violation() {
        None => {
            println!("ok: {} slots verified", report.slots.len());
            Ok(0)
        }
        Some(v) => {
            println!("invalid: {v}");
            Ok(1)
        }
    }
}

fn cmd_oracle(args: OracleArgs) -> CliResult<u8> {
    let caps = Caps::from_env()?;
    let instance = load_instance(&args.instance)?;
    let prior = match &args.prior {
        Some(path) => Some(ScheduleReport::from_json(&read(path)?).map_err(|e| prefixed(path, e))?),
        None => None,
    };
    let (g, c) = (&instance.graph, &instance.conflicts);
    let report = match args.mode {
        OracleMode::Forest => {
            let best = max_feasible_forest(g, c, &caps)?;
            let found = cap_kruskal(g, c, CapKruskalOptions::PRIMAL)?;
            OracleReport {
                format: FORMAT_VERSION,
                mode: args.mode,
                optimum: best.len(),
                ratio: ratio(best.len(), found.len()),
                witness: best,
                compared: Comparison {
                    source: "cap-kruskal".into(),
                    value: found.len(),
                },
            }
        }
        OracleMode::Schedule => {
            let opt = opt_tree_schedule(g, c, &caps)?;
            let compared = match &prior {
                Some(r) => Comparison {
                    source: format!("prior {}", r.algorithm),
                    value: r.slots.len(),
                },
                None => Comparison {
                    source: "conn".into(),
                    value: conn(g, c, false)?.slot_count(),
                },
            };
            OracleReport {
                format: FORMAT_VERSION,
                mode: args.mode,
                optimum: opt.chi,
                ratio: ratio(compared.value, opt.chi),
                witness: opt.tree,
                compared,
            }
        }
        OracleMode::Steiner => {
            let inst = instance.steiner()?;
            let opt = opt_steiner_load(&inst, &caps)?;
            let compared = match &prior {
                Some(r) => Comparison {
                    source: format!("prior {}", r.algorithm),
                    value: mmst_weights(&inst, false).load(&r.tree).linf() as usize,
                },
                None => Comparison {
                    source: "steiner".into(),
                    value: steiner_schedule(&inst)?.z as usize,
                },
            };
            OracleReport {
                format: FORMAT_VERSION,
                mode: args.mode,
                optimum: opt.z as usize,
                ratio: ratio(compared.value, opt.z as usize),
                witness: opt.tree,
                compared,
            }
        }
    };
    emit(&to_canonical_json(&report)?, args.out.as_deref())?;
    Ok(0)
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}
