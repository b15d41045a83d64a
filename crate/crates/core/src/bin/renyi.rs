use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use renyi_combining::classical::{
    chain_rule_transform, combine_check, combine_variable, EntropyKind, JointDistribution,
};
use renyi_combining::extremal::{curve_family, write_curves_csv, AnyEntropyKind, ChannelFamily};
use renyi_combining::harness::{
    channel_at, run_scatter, run_verify, write_scatter_csv, ExperimentConfig, Suite, VerifyOptions,
};
use renyi_combining::numerics::Alpha;
use renyi_combining::quantum::{
    check_entropy, cq_channel_transform, dual_channel, variable_entropy, CQChannel, QEntropyKind,
};
use renyi_combining::{Error, Result};

#[derive(Parser)]
#[command(
    name = "renyi",
    version,
    about = "Conditional Rényi entropies and information combining"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Op {
    Check,
    Variable,
}

#[derive(Subcommand)]
enum Command {
    /// Conditional entropy H(X|B) of a channel or joint distribution.
    Entropy {
        /// Shorthand (bsc:p, bec:eps, psc:f, random:seed[:dim]), inline JSON or a JSON file.
        #[arg(long)]
        state: String,
        #[arg(long)]
        kind: AnyEntropyKind,
        #[arg(long)]
        alpha: f64,
    },
    /// Entropy after check-node or variable-node combining.
    Combine {
        #[arg(long)]
        w1: String,
        #[arg(long)]
        w2: String,
        #[arg(long, value_enum)]
        op: Op,
        #[arg(long)]
        kind: AnyEntropyKind,
        #[arg(long)]
        alpha: f64,
    },
    /// Chain-rule tilt, printed as JSON: joint distributions (bsc:, bec:,
    /// joint JSON) are tilted classically, cq channels as cq channels.
    Transform {
        #[arg(long)]
        w: String,
        #[arg(long)]
        alpha: f64,
    },
    /// Dual channel, printed as JSON.
    Dual {
        #[arg(long)]
        w: String,
    },
    /// Extremal-family curves `(H(W), H(W⊞W) − H(W))` as CSV.
    Curves {
        #[arg(long, value_delimiter = ',', default_value = "bsc,bec,psc")]
        families: Vec<ChannelFamily>,
        #[arg(long)]
        kind: AnyEntropyKind,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 100)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Random-channel scatter run.
    Scatter {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        kinds: Option<Vec<QEntropyKind>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a verification suite; exits with status 1 if any check fails.
    Verify {
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        instances: Option<usize>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// A parsed `--state`/`--w` argument.
enum Input {
    Channel(CQChannel),
    Joint(JointDistribution),
}

fn parse_num(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("{what} `{s}` is not a number")))
}

fn shorthand(name: &str, rest: &str) -> Result<Option<Input>> {
    Ok(Some(match name {
        "bsc" => Input::Joint(JointDistribution::bsc(parse_num(rest, "bsc")?)?),
        "bec" => Input::Joint(JointDistribution::bec(parse_num(rest, "bec")?)?),
        "psc" => Input::Channel(CQChannel::psc(parse_num(rest, "psc")?)?),
        "random" => {
            let (seed, dim) = rest.split_once(':').unwrap_or((rest, "2"));
            let seed = seed
                .parse()
                .map_err(|_| Error::Parse(format!("random seed `{seed}` is not a u64")))?;
            let dim: usize = dim
                .parse()
                .map_err(|_| Error::Parse(format!("dimension `{dim}` is not an integer")))?;
            if dim == 0 {
                return Err(Error::Domain("dimension must be at least 1".into()));
            }
            Input::Channel(channel_at(seed, 0, dim))
        }
        _ => return Ok(None),
    }))
}

fn parse_input(arg: &str) -> Result<Input> {
    if let Some((name, rest)) = arg.split_once(':') {
        if let Some(input) = shorthand(name, rest)? {
            return Ok(input);
        }
    }
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        let path = Path::new(arg);
        if !path.exists() {
            return Err(Error::Parse(format!(
                "`{arg}` is neither a shorthand, inline JSON nor an existing file"
            )));
        }
        fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.into(),
            source: e,
        })?
    };
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("x_arity").is_some() {
        Ok(Input::Joint(serde_json::from_value(value)?))
    } else {
        Ok(Input::Channel(serde_json::from_value(value)?))
    }
}

impl Input {
    fn channel(self) -> Result<CQChannel> {
        match self {
            Input::Channel(w) => Ok(w),
            Input::Joint(p) => CQChannel::from_joint(&p),
        }
    }

    fn joint(self, kind: EntropyKind) -> Result<JointDistribution> {
        match self {
            Input::Joint(p) => Ok(p),
            Input::Channel(_) => Err(Error::Domain(format!(
                "{} needs a classical input (bsc:, bec: or joint JSON)",
                kind.tag()
            ))),
        }
    }
}

fn alpha(a: f64) -> Result<Alpha> {
    Alpha::new(a)
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

fn entropy(state: &str, kind: AnyEntropyKind, a: f64) -> Result<()> {
    let a = alpha(a)?;
    let input = parse_input(state)?;
    let h = match kind {
        AnyEntropyKind::Classical(k) => k.evaluate(&input.joint(k)?, a),
        AnyEntropyKind::Quantum(k) => input.channel()?.entropy(k, a)?,
    };
    println!("{h}");
    Ok(())
}

fn combine(w1: &str, w2: &str, op: Op, kind: AnyEntropyKind, a: f64) -> Result<()> {
    let a = alpha(a)?;
    let (i1, i2) = (parse_input(w1)?, parse_input(w2)?);
    let h = match kind {
        AnyEntropyKind::Classical(k) => {
            let (p1, p2) = (i1.joint(k)?, i2.joint(k)?);
            let joint = match op {
                Op::Check => combine_check(&p1, &p2)?,
                Op::Variable => combine_variable(&p1, &p2)?,
            };
            k.evaluate(&joint, a)
        }
        AnyEntropyKind::Quantum(k) => {
            let (c1, c2) = (i1.channel()?, i2.channel()?);
            match op {
                Op::Check => check_entropy(&c1, &c2, k, a)?,
                Op::Variable => variable_entropy(&c1, &c2, k, a)?,
            }
        }
    };
    println!("{h}");
    Ok(())
}

fn transform(w: &str, a: f64) -> Result<()> {
    let a = alpha(a)?;
    match parse_input(w)? {
        Input::Joint(p) => print_json(&chain_rule_transform(&p, a)),
        Input::Channel(w) => print_json(&cq_channel_transform(&w, a)?),
    }
}

fn curves(
    families: &[ChannelFamily],
    kind: AnyEntropyKind,
    a: f64,
    grid: usize,
    out: &Path,
) -> Result<()> {
    let a = alpha(a)?;
    let curves = families
        .iter()
        .map(|&f| curve_family(f, kind, a, grid))
        .collect::<Result<Vec<_>>>()?;
    write_curves_csv(out, &curves)?;
    eprintln!("wrote {} curves to {}", curves.len(), out.display());
    Ok(())
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig> {
    match path {
        Some(p) => ExperimentConfig::from_json_file(p),
        None => Ok(ExperimentConfig::default()),
    }
}

struct ScatterFlags {
    config: Option<PathBuf>,
    samples: Option<usize>,
    dim: Option<usize>,
    alphas: Option<Vec<f64>>,
    kinds: Option<Vec<QEntropyKind>>,
    seed: Option<u64>,
    tol: Option<f64>,
    out: Option<PathBuf>,
}

fn scatter(flags: ScatterFlags) -> Result<bool> {
    let mut cfg = load_config(flags.config.as_deref())?;
    if let Some(v) = flags.samples {
        cfg.samples = v;
    }
    if let Some(v) = flags.dim {
        cfg.dim = v;
    }
    if let Some(v) = flags.alphas {
        cfg.alphas = v;
    }
    if let Some(v) = flags.kinds {
        cfg.entropy_kinds = v;
    }
    if let Some(v) = flags.seed {
        cfg.seed = v;
    }
    if let Some(v) = flags.tol {
        cfg.tolerance = v;
    }
    if let Some(v) = flags.out {
        cfg.output_path = v;
    }
    let cfg = cfg.apply_env()?;
    let out = run_scatter(&cfg)?;
    write_scatter_csv(&cfg.output_path, &out.records)?;
    let mut stdout = io::stdout().lock();
    for g in &out.groups {
        writeln!(
            stdout,
            "alpha={} kind={} samples={} violations={} max_excess={:e} symmetry_checked={} symmetry_failures={}",
            g.alpha,
            g.entropy_kind,
            g.samples,
            g.violations,
            g.max_excess,
            g.symmetry_checked,
            g.symmetry_failures
        )
        .map_err(|e| Error::Io {
            path: "<stdout>".into(),
            source: e,
        })?;
    }
    eprintln!(
        "wrote {} records to {}",
        out.records.len(),
        cfg.output_path.display()
    );
    Ok(out.groups.iter().all(|g| g.symmetry_failures == 0))
}

fn verify(
    suite: Suite,
    tol: Option<f64>,
    seed: Option<u64>,
    instances: Option<usize>,
    config: Option<&Path>,
) -> Result<bool> {
    let mut cfg = load_config(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let cfg = cfg.apply_env()?;
    let opts = VerifyOptions {
        tolerance: tol,
        instances,
        ..VerifyOptions::from_config(&cfg)
    };
    let report = run_verify(suite, &opts)?;
    for c in &report.checks {
        println!(
            "[{}] {}: {} cases, {} failures, max error {:e} (tol {:e})",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            c.failures,
            c.max_error,
            c.tolerance
        );
        for d in &c.failed_cases {
            println!("    {d}");
        }
    }
    println!(
        "suite {suite} (seed {}): {}",
        cfg.seed,
        if report.passed() { "pass" } else { "FAIL" }
    );
    Ok(report.passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Entropy { state, kind, alpha } => entropy(&state, kind, alpha).map(|_| true),
        Command::Combine {
            w1,
            w2,
            op,
            kind,
            alpha,
        } => combine(&w1, &w2, op, kind, alpha).map(|_| true),
        Command::Transform { w, alpha } => transform(&w, alpha).map(|_| true),
        Command::Dual { w } => {
            print_json(&dual_channel(&parse_input(&w)?.channel()?)?).map(|_| true)
        }
        Command::Curves {
            families,
            kind,
            alpha,
            grid,
            out,
        } => curves(&families, kind, alpha, grid, &out).map(|_| true),
        Command::Scatter {
            config,
            samples,
            dim,
            alphas,
            kinds,
            seed,
            tol,
            out,
        } => scatter(ScatterFlags {
            config,
            samples,
            dim,
            alphas,
            kinds,
            seed,
            tol,
            out,
        }),
        Command::Verify {
            suite,
            tol,
            seed,
            instances,
            config,
        } => verify(suite, tol, seed, instances, config.as_deref()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
