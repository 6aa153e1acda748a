use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use knowdis::pipeline::{load_report, run_all, run_stage, PipelineConfig, StageContext};
use knowdis::synthetic::{write_fixture, SyntheticSpec};
use knowdis::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_DEPENDENCY: u8 = 3;

#[derive(Parser)]
#[command(name = "knowdis", version, about = "Distant data augmentation for event causality detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand gold causal pairs through the lexical fixtures.
    Expand(StageArgs),
    /// Train the pair embedding and keep the closest candidates.
    TrainEmbed(StageArgs),
    /// Sample the corpus and distantly label sentences.
    Annotate(StageArgs),
    /// Build the co-occurrence table for causal strength.
    BuildCs(StageArgs),
    /// Score distant data and keep the strongest per partition.
    Filter(StageArgs),
    /// Relabel the refined data with a gold-trained detector.
    Relabel(StageArgs),
    /// Train the final detector.
    Train(StageArgs),
    /// Score a test set, or cross-validate when none is configured.
    Evaluate(StageArgs),
    /// Write a uniform sample of the refined data for manual checking.
    AuditSample(StageArgs),
    /// Run every stage from expand through train.
    All(StageArgs),
    /// Write a synthetic fixture directory with a ready config.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 3000)]
        corpus_sentences: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Component {
    Augment,
    ExtractedPairs,
    Connectives,
    CsScoring,
    Filter,
    Relabel,
    Anneal,
}

#[derive(Args)]
struct StageArgs {
    #[arg(long, short)]
    config: PathBuf,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the number of evaluation repeats.
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Disables one component; may be repeated.
    #[arg(long, value_enum)]
    ablate: Vec<Component>,
}

impl StageArgs {
    fn load(&self) -> knowdis::Result<PipelineConfig> {
        let mut cfg = PipelineConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.set_seed(seed);
        }
        if let Some(r) = self.repeats {
            cfg.eval.repeats = r;
        }
        for c in &self.ablate {
            let a = &mut cfg.ablation;
            match c {
                Component::Augment => a.augment = false,
                Component::ExtractedPairs => a.extracted_pairs = false,
                Component::Connectives => a.connectives = false,
                Component::CsScoring => a.cs_scoring = false,
                Component::Filter => a.filter = false,
                Component::Relabel => a.relabel = false,
                Component::Anneal => a.anneal = false,
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Dependency { .. } => EXIT_DEPENDENCY,
        _ => EXIT_FAILURE,
    }
}

fn run_stage_command(name: &str, args: &StageArgs) -> Result<(), u8> {
    let config = args.load().map_err(|e| {
        eprintln!("error: {e}");
        EXIT_CONFIG
    })?;
    let ctx = StageContext {
        config: &config,
        workers: args.workers,
    };
    let result = if name == "all" {
        run_all(&ctx).map(|_| ())
    } else {
        run_stage(name, &ctx).map(|m| {
            for (k, v) in &m.counts {
                println!("{k}\t{v}");
            }
        })
    };
    result.map_err(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })?;
    if name == "evaluate" {
        if let Ok(r) = load_report(&config) {
            println!("precision\t{:.4}\nrecall\t{:.4}\nf1\t{:.4}", r.precision, r.recall, r.f1);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let (name, args) = match &cli.command {
        Command::Expand(a) => ("expand", a),
        Command::TrainEmbed(a) => ("train-embed", a),
        Command::Annotate(a) => ("annotate", a),
        Command::BuildCs(a) => ("build-cs", a),
        Command::Filter(a) => ("filter", a),
        Command::Relabel(a) => ("relabel", a),
        Command::Train(a) => ("train", a),
        Command::Evaluate(a) => ("evaluate", a),
        Command::AuditSample(a) => ("audit-sample", a),
        Command::All(a) => ("all", a),
        Command::Synth { out, seed, corpus_sentences } => {
            let spec = SyntheticSpec {
                seed: *seed,
                corpus_sentences: *corpus_sentences,
                ..Default::default()
            };
            return match write_fixture(out, &spec) {
                Ok(path) => {
                    println!("{}", path.display());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(exit_code(&e))
                }
            };
        }
    };
    match run_stage_command(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
