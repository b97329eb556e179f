//! Command-line frontend for the multiclosure library.
//!
//! Exit codes: 0 success, 1 runtime or model error, 2 usage error. Every
//! failure prints exactly one line `error: <kind>: <message>` to stderr.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use multiclosure::ghype::{self, Covariate, FitOptions, LikelihoodMode, XiKind};
use multiclosure::mle::OptimOptions;
use multiclosure::multigraph::{read_contact_records, read_edge_csv, read_node_list};
use multiclosure::report::{self, Artifact};
use multiclosure::statistics::variance_explained;
use multiclosure::synth::{self, ClosureCovariate, GeneratorKind, GeneratorSpec};
use multiclosure::{countmodel, Error, MultiEdgeNetwork, StatisticSpec};

#[derive(Parser)]
#[command(name = "multiclosure", version, about = "Triadic closure in multi-edge networks")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute statistic matrices and their R² against the dyad counts.
    Stats(StatsArgs),
    /// Fit gHypEG or the Poisson count model.
    Fit(FitArgs),
    /// Generate a synthetic validation network.
    Synth(SynthArgs),
    /// Refit gHypEG on many generated networks and summarize the closure coefficient.
    Replicate(ReplicateArgs),
    /// Compare fit and replication outputs with the published values (markdown).
    Report(ReportArgs),
}

#[derive(Args)]
struct Input {
    /// Edge list CSV with header `source,target[,count]`.
    #[arg(long, conflicts_with = "contacts", required_unless_present = "contacts")]
    edges: Option<PathBuf>,
    /// SocioPatterns contact records (`t i j Ci Cj`); adds the `class` attribute.
    #[arg(long)]
    contacts: Option<PathBuf>,
    /// Node list (one label per row, header `node`) to declare isolated nodes.
    #[arg(long, requires = "edges")]
    node_list: Option<PathBuf>,
    /// Node attribute CSV with header `node,<attr>[,...]`.
    #[arg(long)]
    attrs: Option<PathBuf>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    input: Input,
    /// Statistics to compute.
    #[arg(long, num_args = 1.., value_parser = parse_stat, default_value = "weighted_sp")]
    stat: Vec<StatisticSpec>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output directory (one file per statistic); stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Ghype,
    Count,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum XiArg {
    Config,
    Meandeg,
}

impl From<XiArg> for XiKind {
    fn from(x: XiArg) -> Self {
        match x {
            XiArg::Config => XiKind::Config,
            XiArg::Meandeg => XiKind::MeanDeg,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LikelihoodArg {
    Auto,
    Exact,
    Multinomial,
}

impl From<LikelihoodArg> for LikelihoodMode {
    fn from(l: LikelihoodArg) -> Self {
        match l {
            LikelihoodArg::Auto => LikelihoodMode::Auto,
            LikelihoodArg::Exact => LikelihoodMode::Exact,
            LikelihoodArg::Multinomial => LikelihoodMode::Multinomial,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, num_args = 1.., value_parser = parse_stat, required = true)]
    covariate: Vec<StatisticSpec>,
    #[arg(long, value_enum, default_value_t = Model::Ghype)]
    model: Model,
    #[arg(long, value_enum, default_value_t = XiArg::Config)]
    xi: XiArg,
    /// `auto` uses the exact likelihood up to 2000 dyads.
    #[arg(long, value_enum, default_value_t = LikelihoodArg::Auto)]
    likelihood: LikelihoodArg,
    /// Add the `nonzero` term to the count model.
    #[arg(long)]
    nonzero: bool,
    /// Tag stored in the result (`karate`, `highschool` are recognized by `report`).
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    RandomComplete,
    RandomUniform,
    Triangles,
    Mixed,
}

impl From<KindArg> for GeneratorKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::RandomComplete => GeneratorKind::RandomComplete,
            KindArg::RandomUniform => GeneratorKind::RandomUniform,
            KindArg::Triangles => GeneratorKind::Triangles,
            KindArg::Mixed => GeneratorKind::Mixed,
        }
    }
}

#[derive(Args)]
struct GeneratorArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long, default_value_t = 34)]
    nodes: usize,
    /// Edge count (default 2000 for mixed, 1000 otherwise).
    #[arg(long)]
    m: Option<u64>,
    #[arg(long, default_value_t = 26)]
    triangles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GeneratorArgs {
    fn spec(&self) -> GeneratorSpec {
        let kind: GeneratorKind = self.kind.into();
        let default_m = if kind == GeneratorKind::Mixed { 2000 } else { 1000 };
        GeneratorSpec {
            kind,
            n: self.nodes,
            m: self.m.unwrap_or(default_m),
            n_tri: self.triangles,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    /// Edge list CSV output; stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum ClosureArg {
    WeightedSp,
    UnweightedSp,
}

#[derive(Args)]
struct ReplicateArgs {
    #[command(flatten)]
    generator: GeneratorArgs,
    #[arg(long, value_enum, default_value_t = ClosureArg::WeightedSp)]
    covariate: ClosureArg,
    #[arg(long, default_value_t = 100)]
    reps: u64,
    #[arg(long, value_enum, default_value_t = XiArg::Meandeg)]
    xi: XiArg,
    #[arg(long, value_enum, default_value_t = LikelihoodArg::Auto)]
    likelihood: LikelihoodArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON outputs of `fit` and `replicate`.
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_stat(s: &str) -> Result<StatisticSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = e.kind();
        let text = e.to_string();
        let message = text.strip_prefix(&format!("{kind}: ")).unwrap_or(&text).to_string();
        Failure { code: 1, kind: kind.into(), message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, kind: "usage".into(), message: message.into() }
}

fn open(path: &Path) -> Result<File, Failure> {
    File::open(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())).into())
}

fn load(input: &Input) -> Result<MultiEdgeNetwork, Failure> {
    let mut net = match (&input.edges, &input.contacts) {
        (Some(path), _) => {
            let rows = read_edge_csv(open(path)?)?;
            let declared = match &input.node_list {
                Some(p) => read_node_list(open(p)?)?,
                None => Vec::new(),
            };
            MultiEdgeNetwork::from_edge_list(&rows, &declared)?
        }
        (None, Some(path)) => read_contact_records(open(path)?)?,
        (None, None) => return Err(usage("one of --edges or --contacts is required")),
    };
    if let Some(p) = &input.attrs {
        net = net.with_attribute_csv(open(p)?)?;
    }
    Ok(net)
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", p.display()))))?,
        None => io::stdout().write_all(text.as_bytes()).map_err(Error::from)?,
    }
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<(), Failure> {
    if args.format == Format::Json {
        return Err(usage("stats writes csv or tsv"));
    }
    let net = load(&args.input)?;
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(Error::from)?;
    }
    for spec in &args.stat {
        let stat = spec.compute(&net)?;
        let mut buf = Vec::new();
        match args.format {
            Format::Tsv => stat.write_tsv(net.labels(), &mut buf)?,
            _ => stat.write_csv(net.labels(), &mut buf)?,
        }
        let text = String::from_utf8(buf).expect("writers emit utf-8");
        match &args.out {
            Some(dir) => {
                let ext = if args.format == Format::Tsv { "tsv" } else { "csv" };
                emit(Some(&dir.join(format!("{}.{ext}", spec.to_string().replace(':', "_")))), &text)?;
            }
            None => emit(None, &format!("# {spec}\n{text}"))?,
        }
        let r2 = match variance_explained(&net, &stat) {
            Ok(v) => format!("{v:.4}"),
            Err(_) => "undefined".into(),
        };
        eprintln!("{spec}: R^2 = {r2}");
    }
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(usage("fit writes json or tsv"));
    }
    let net = load(&args.input)?;
    let mut stats = Vec::with_capacity(args.covariate.len());
    for spec in &args.covariate {
        stats.push((spec.to_string(), spec.compute(&net)?));
    }
    let mut result = match args.model {
        Model::Ghype => {
            if args.nonzero {
                return Err(usage("--nonzero applies to the count model only"));
            }
            let covariates = stats
                .iter()
                .map(|(name, s)| Covariate::from_statistic(name, s))
                .collect::<multiclosure::Result<Vec<_>>>()?;
            let opts = FitOptions { xi: args.xi.into(), likelihood: args.likelihood.into(), optim: OptimOptions::default() };
            ghype::fit(&net, covariates, opts)?
        }
        Model::Count => countmodel::fit(&net, &stats, args.nonzero, OptimOptions::default())?,
    };
    result.dataset = args.dataset;
    let text = match args.format {
        Format::Tsv => {
            let mut t = String::from("term\testimate\tstd_err\tp_value\tstars\n");
            for c in &result.coefficients {
                t.push_str(&format!("{}\t{}\t{}\t{:e}\t{}\n", c.name, c.estimate, c.std_err, c.p_value, c.stars));
            }
            t
        }
        _ => result.to_json()? + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    eprint!("{}", result.table());
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Failure> {
    let net = synth::generate(&args.generator.spec())?;
    let mut buf = Vec::new();
    net.write_edge_csv(&mut buf)?;
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))
}

fn cmd_replicate(args: ReplicateArgs) -> Result<(), Failure> {
    if args.format == Format::Csv {
        return Err(usage("replicate writes json or tsv"));
    }
    let covariate = match args.covariate {
        ClosureArg::WeightedSp => ClosureCovariate::WeightedSp,
        ClosureArg::UnweightedSp => ClosureCovariate::UnweightedSp,
    };
    let opts = FitOptions { xi: args.xi.into(), likelihood: args.likelihood.into(), optim: OptimOptions::default() };
    let summary = synth::replicate(&args.generator.spec(), args.reps, covariate, opts)?;
    let text = match args.format {
        Format::Tsv => summary.to_tsv(),
        _ => summary.to_json()? + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    eprintln!(
        "{} / {}: mean {:.3} (sd {:.3}, min {:.3}, max {:.3}), {:.0}% with p < .001, {} failed",
        summary.generator.kind.as_str(),
        summary.covariate.as_str(),
        summary.mean,
        summary.sd,
        summary.min,
        summary.max,
        100.0 * summary.significant_fraction,
        summary.failures.len()
    );
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<(), Failure> {
    let missing: Vec<String> = args
        .inputs
        .iter()
        .filter(|p| !p.is_file())
        .map(|p| p.display().to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Input(format!("missing inputs: {}", missing.join(", "))).into());
    }
    let artifacts = args
        .inputs
        .iter()
        .map(|p| Artifact::load(p))
        .collect::<multiclosure::Result<Vec<_>>>()?;
    let rep = report::build(&artifacts)?;
    emit(args.out.as_deref(), &rep.to_markdown())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(format!("thread pool: {e}")))?;
    }
    match cli.command {
        Command::Stats(a) => cmd_stats(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Synth(a) => cmd_synth(a),
        Command::Replicate(a) => cmd_replicate(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help / --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.kind, f.message.replace('\n', " "));
            ExitCode::from(f.code)
        }
    }
}
