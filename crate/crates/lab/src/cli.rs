//! `biped-lab` command line.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use biped_core::control::GainName;
use biped_core::learning::{
    action_mse, behavior_clone, collect_expert_data, run_episode, train_loop, Controller, PpoConfig,
};
use biped_core::nets::PolicyKind;
use biped_core::transfer::{eval_episode_seed, evaluate_policy, retune_gain, transfer_experiment, EnvLabel, TransferReport, TransferRow};
use clap::{Args, Parser, Subcommand};

use crate::checkpoint::{is_policy_text, load_policy, load_value, save_policy, save_value};
use crate::config::{load_config, ExperimentConfig, TerrainKind};
use crate::error::{io_err, LabError, LabResult};
use crate::logs::{
    plot_table, write_fall_histograms, write_reward_curve, write_table, write_trajectory, write_transfer_report,
    write_transfer_summary, Table, TrajectoryRow,
};

#[derive(Debug, Args)]
struct Common {
    /// Experiment config file; defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed, overrides `[run] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory, overrides `[run] out_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Policy checkpoint (a directory of checkpoints for `transfer`).
    #[arg(long, global = true)]
    policy: Option<PathBuf>,
    #[arg(long, global = true)]
    iterations: Option<u32>,
    #[arg(long, global = true)]
    episodes: Option<u32>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum TerrainArg {
    Flat,
    Rough,
}

impl From<TerrainArg> for TerrainKind {
    fn from(t: TerrainArg) -> Self {
        match t {
            TerrainArg::Flat => TerrainKind::Flat,
            TerrainArg::Rough => TerrainKind::Rough,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the expert controller for one episode and write trajectory.csv.
    RolloutExpert {
        #[arg(long, value_enum)]
        terrain: Option<TerrainArg>,
    },
    /// Collect expert data and clone it into a policy checkpoint.
    Clone,
    /// Fit a value network to expert rollouts.
    PretrainValue,
    /// PPO training from a checkpoint or a fresh policy.
    Train {
        /// Value network checkpoint to start from.
        #[arg(long)]
        value_net: Option<PathBuf>,
    },
    /// Mean-action evaluation of a policy.
    Eval {
        #[arg(long, value_enum)]
        terrain: Option<TerrainArg>,
        /// Evaluate on the perturbed surrogate instead of the nominal env.
        #[arg(long)]
        surrogate: bool,
    },
    /// Evaluate every policy checkpoint in a directory on nominal and surrogate envs.
    Transfer {
        #[arg(long, value_enum)]
        terrain: Option<TerrainArg>,
    },
    /// Change one embedded gain of a heuristic policy.
    Retune {
        #[arg(long)]
        gain: String,
        #[arg(long)]
        value: f64,
        /// Output checkpoint, default `<out>/retuned.ckpt`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Re-emit a CSV log with numeric cells only.
    PlotData {
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated column names, default all.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Runtime(LabError),
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        Failure::Runtime(e)
    }
}

impl From<biped_core::Error> for Failure {
    fn from(e: biped_core::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

type CmdResult = Result<(), Failure>;

/// Runs the CLI; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let (command, common) = match parse(args) {
        Ok(v) => v,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(command, common) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            1
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "biped-lab", version, about = "Planar biped walking: expert, cloning, PPO training and transfer tests")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

fn parse<I, T>(args: I) -> Result<(Command, Common), clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let full = Cli::try_parse_from(args)?;
    Ok((full.command, full.common))
}

/// Resolved settings shared by all subcommands.
struct Ctx {
    cfg: ExperimentConfig,
    seed: u64,
    out: PathBuf,
    policy: Option<PathBuf>,
}

impl Ctx {
    fn out_file(&self, name: &str) -> LabResult<PathBuf> {
        std::fs::create_dir_all(&self.out).map_err(io_err(&self.out))?;
        Ok(self.out.join(name))
    }

    fn policy_path(&self) -> Result<&Path, Failure> {
        self.policy.as_deref().ok_or_else(|| Failure::Usage("--policy is required".into()))
    }

    fn terrain(&self, arg: Option<TerrainArg>) -> TerrainKind {
        arg.map_or(self.cfg.run.terrain, TerrainKind::from)
    }
}

fn execute(command: Command, common: Common) -> CmdResult {
    let mut cfg = match &common.config {
        Some(p) => load_config(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = common.iterations {
        cfg.run.iterations = n;
    }
    if let Some(n) = common.episodes {
        if n == 0 {
            return Err(Failure::Usage("--episodes must be > 0".into()));
        }
        cfg.run.episodes = n;
    }
    let seed = common.seed.unwrap_or(cfg.run.seed);
    let out = common.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.run.out_dir));
    println!("seed {seed}");
    let ctx = Ctx { cfg, seed, out, policy: common.policy };
    match command {
        Command::RolloutExpert { terrain } => rollout_expert(&ctx, ctx.terrain(terrain)),
        Command::Clone => clone(&ctx),
        Command::PretrainValue => pretrain_value(&ctx),
        Command::Train { value_net } => train(&ctx, value_net.as_deref()),
        Command::Eval { terrain, surrogate } => eval(&ctx, ctx.terrain(terrain), surrogate),
        Command::Transfer { terrain } => transfer(&ctx, ctx.terrain(terrain)),
        Command::Retune { gain, value, output } => retune(&ctx, &gain, value, output),
        Command::PlotData { input, columns } => plot_data(&ctx, &input, &columns),
    }
}

fn create(path: &Path) -> LabResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> LabResult<()> {
    let mut w = create(path)?;
    f(&mut w).and_then(|_| w.flush()).map_err(io_err(path))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn rollout_expert(ctx: &Ctx, terrain: TerrainKind) -> CmdResult {
    let env = ctx.cfg.env(terrain);
    let mut rows = Vec::new();
    let summary = run_episode(&env, Controller::Expert, eval_episode_seed(ctx.seed, 0), &mut |rec| {
        rows.push(TrajectoryRow::from_record(rec, &env.params));
    })?;
    println!(
        "steps {} fell {} distance {} total_reward {}",
        summary.steps, summary.fell, summary.distance, summary.total_reward
    );
    write_with(&ctx.out_file("trajectory.csv")?, |w| write_trajectory(w, &rows))?;
    Ok(())
}

fn clone(ctx: &Ctx) -> CmdResult {
    let env = ctx.cfg.env(ctx.cfg.run.terrain);
    let policy = ctx.cfg.new_policy(ctx.seed)?;
    let policy = match policy.kind {
        PolicyKind::HeuristicNn => {
            println!("heuristic policy: a zero network output already reproduces the expert, nothing to clone");
            policy
        }
        PolicyKind::PureNn => {
            let data = collect_expert_data(&env, ctx.cfg.run.expert_samples, ctx.seed)?;
            let (train, holdout) = data.split_every(10);
            println!("expert transitions {} (holdout {})", train.len(), holdout.len());
            let before = action_mse(&policy, &holdout)?;
            let mut cloned = behavior_clone(&train, &policy, &ctx.cfg.bc_config(ctx.seed))?;
            cloned.log_std = vec![ctx.cfg.policy.log_std_init; cloned.log_std.len()];
            println!("holdout action mse {before} -> {}", action_mse(&cloned, &holdout)?);
            cloned
        }
    };
    let path = ctx.out_file("policy.ckpt")?;
    save_policy(&path, &policy)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn pretrain_value(ctx: &Ctx) -> CmdResult {
    let env = ctx.cfg.env(ctx.cfg.run.terrain);
    let data = collect_expert_data(&env, ctx.cfg.run.expert_samples, ctx.seed)?;
    let value = ctx.cfg.new_value(ctx.seed)?;
    let cfg = ctx.cfg.value_pretrain_config(ctx.seed);
    let before = biped_core::learning::td_loss(&value, &data, cfg.gamma)?;
    let value = biped_core::learning::value_pretrain(&data, &value, &cfg)?;
    println!("td loss {before} -> {}", biped_core::learning::td_loss(&value, &data, cfg.gamma)?);
    let path = ctx.out_file("value.ckpt")?;
    save_value(&path, &value)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn train(ctx: &Ctx, value_net: Option<&Path>) -> CmdResult {
    let policy = match &ctx.policy {
        Some(p) => load_policy(p)?,
        None => ctx.cfg.new_policy(ctx.seed)?,
    };
    let value = match value_net {
        Some(p) => load_value(p)?,
        None => ctx.cfg.new_value(ctx.seed)?,
    };
    let env = ctx.cfg.env(ctx.cfg.run.terrain);
    let cfg: PpoConfig = ctx.cfg.ppo;
    let out = train_loop(&env, &policy, &value, &cfg, ctx.cfg.run.iterations, ctx.seed, &mut |c, s| {
        println!(
            "iteration {} mean_reward {} fall_fraction {} mean_ratio {} clip_fraction {}",
            c.iteration, c.mean_reward, c.fall_fraction, s.mean_ratio, s.clip_fraction
        );
    })?;
    write_with(&ctx.out_file("reward_curve.csv")?, |w| write_reward_curve(w, &out.curve))?;
    let p = ctx.out_file("policy.ckpt")?;
    save_policy(&p, &out.policy)?;
    let v = ctx.out_file("value.ckpt")?;
    save_value(&v, &out.value)?;
    println!("wrote {}\nwrote {}", p.display(), v.display());
    Ok(())
}

fn eval(ctx: &Ctx, terrain: TerrainKind, surrogate: bool) -> CmdResult {
    let policy = load_policy(ctx.policy_path()?)?;
    let (env, label) = if surrogate {
        (ctx.cfg.surrogate(terrain)?, EnvLabel::Surrogate)
    } else {
        (ctx.cfg.env(terrain), EnvLabel::Nominal)
    };
    let stats = evaluate_policy(&env, &policy, ctx.cfg.run.episodes, ctx.seed)?;
    println!(
        "success {}/{} rate {} mean_reward {} mean_steps {}",
        stats.n_success, stats.n_episodes, stats.success_rate, stats.mean_reward, stats.mean_steps
    );
    let report = TransferReport {
        rows: vec![TransferRow { policy_id: 0, kind: policy.kind, env: label, stats }],
        aggregate: Vec::new(),
    };
    write_with(&ctx.out_file("eval.csv")?, |w| write_transfer_report(w, &report))?;
    Ok(())
}

/// Policy checkpoints in `dir`, sorted by file name.
fn policy_files(dir: &Path) -> LabResult<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if !path.is_file() {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap_or_default();
        if is_policy_text(&text) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

fn transfer(ctx: &Ctx, terrain: TerrainKind) -> CmdResult {
    let dir = ctx.policy_path()?;
    let files = if dir.is_dir() { policy_files(dir)? } else { vec![dir.to_path_buf()] };
    if files.is_empty() {
        return Err(Failure::Usage(format!("no policy checkpoints in {}", dir.display())));
    }
    let mut policies = Vec::new();
    for (i, f) in files.iter().enumerate() {
        println!("policy {i}: {}", f.display());
        policies.push(load_policy(f)?);
    }
    let nominal = ctx.cfg.env(terrain);
    let surrogate = ctx.cfg.surrogate(terrain)?;
    let report = transfer_experiment(&policies, &nominal, &surrogate, ctx.cfg.run.episodes, ctx.seed)?;
    for a in &report.aggregate {
        println!(
            "{} {} success {}/{} rate {}",
            a.kind.as_str(),
            a.env.as_str(),
            a.n_success,
            a.n_episodes,
            a.success_rate
        );
    }
    write_with(&ctx.out_file("transfer_report.csv")?, |w| write_transfer_report(w, &report))?;
    write_with(&ctx.out_file("transfer_summary.csv")?, |w| write_transfer_summary(w, &report))?;
    write_with(&ctx.out_file("transfer_falls.csv")?, |w| write_fall_histograms(w, &report, nominal.max_steps))?;
    Ok(())
}

fn retune(ctx: &Ctx, gain: &str, value: f64, output: Option<PathBuf>) -> CmdResult {
    let name: GainName = gain.parse().map_err(|_| Failure::Usage(format!("--gain: unknown gain `{gain}`")))?;
    let policy = load_policy(ctx.policy_path()?)?;
    let tuned = retune_gain(&policy, name, value)?;
    let path = match output {
        Some(p) => p,
        None => ctx.out_file("retuned.ckpt")?,
    };
    save_policy(&path, &tuned)?;
    println!("{gain} = {value}\nwrote {}", path.display());
    Ok(())
}

fn plot_data(ctx: &Ctx, input: &Path, columns: &[String]) -> CmdResult {
    let text = std::fs::read_to_string(input).map_err(io_err(input))?;
    let table = Table::parse(&text)
        .map_err(|(line, message)| LabError::Format { path: input.to_path_buf(), line, message })?;
    let plot = plot_table(&table, columns).map_err(Failure::Usage)?;
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("data");
    write_with(&ctx.out_file(&format!("{stem}_plot.csv"))?, |w| write_table(w, &plot))?;
    Ok(())
}
