//! `pride`: generate resume data, train the black box, extract its
//! transitions, learn a program and audit programs for bias.

mod config;
mod report;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use pride_core::audit::{audit, AuditConfig, AuditReport, RunMeta, RunPair};
use pride_core::blackbox::{extract_transitions, train};
use pride_core::faircv::{self, build_scenario, read_dataset_csv, write_dataset_csv, CvRecord};
use pride_core::io::{read_transitions_csv, write_transitions_csv, SchemaSource};
use pride_core::mvl::{parse_program_standalone, serialize_program};
use pride_core::{pride, BiasMode, Demographic, Program, Scenario, Schema, State, TieBreak, TrainedModel};

use config::{write_artifact, Config, Resolved};

#[derive(Debug, Parser)]
#[command(name = "pride", version, about = "Explain a classifier with minimal logic programs and audit them for bias")]
struct Cli {
    /// TOML configuration; command-line flags override its values.
    #[arg(long, global = true, env = "PRIDE_CONFIG")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BiasArg {
    None,
    Gender,
    Ethnicity,
}

impl From<BiasArg> for BiasMode {
    fn from(b: BiasArg) -> Self {
        match b {
            BiasArg::None => BiasMode::Unbiased,
            BiasArg::Gender => BiasMode::Gender,
            BiasArg::Ethnicity => BiasMode::Ethnicity,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DemographicArg {
    G,
    E,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TieArg {
    LowestIndex,
    HighestIndex,
    MostExcluding,
}

impl From<TieArg> for TieBreak {
    fn from(t: TieArg) -> Self {
        match t {
            TieArg::LowestIndex => TieBreak::LowestIndex,
            TieArg::HighestIndex => TieBreak::HighestIndex,
            TieArg::MostExcluding => TieBreak::MostExcluding,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a resume dataset with unbiased, gender- and ethnicity-biased scores.
    Generate {
        #[arg(long, env = "PRIDE_N")]
        n: Option<usize>,
        #[arg(long, env = "PRIDE_SEED")]
        seed: Option<u64>,
        /// `gender` also perturbs i3/i7 of male profiles.
        #[arg(long, value_enum, default_value = "none")]
        bias: BiasArg,
        /// Add the raw (undiscretized) score columns.
        #[arg(long)]
        raw: bool,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Train the black-box classifier on one scenario.
    Train {
        #[arg(long)]
        data: PathBuf,
        /// Scenario id, `s1` .. `s11`.
        #[arg(long)]
        scenario: String,
        /// Score to learn.
        #[arg(long, value_enum, default_value = "none")]
        bias: BiasArg,
        /// Demographic attribute in the inputs; defaults to `e` for the
        /// ethnicity score and `g` otherwise.
        #[arg(long, value_enum)]
        demographic: Option<DemographicArg>,
        #[arg(long, env = "PRIDE_EPOCHS")]
        epochs: Option<usize>,
        #[arg(long, env = "PRIDE_MODEL_SEED")]
        seed: Option<u64>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Record the model's prediction for every profile of a dataset.
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Learn a weighted program from a transitions CSV.
    Learn {
        #[arg(long)]
        transitions: PathBuf,
        /// Program header or model checkpoint (`.json`) providing the schema.
        #[arg(long, conflicts_with = "targets")]
        schema: Option<PathBuf>,
        /// Names of the trailing target columns; domains are taken from the data.
        #[arg(long, value_delimiter = ',', default_value = "scores")]
        targets: Vec<String>,
        #[arg(long, value_enum, env = "PRIDE_TIE_BREAK")]
        tie_break: Option<TieArg>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Compare programs learned from unbiased and biased scores.
    Audit {
        /// Unbiased and biased program; repeat for more pairs.
        #[arg(long, num_args = 2, value_names = ["UNBIASED", "BIASED"], required = true)]
        pair: Vec<PathBuf>,
        /// Attribute to leave out of the top-driver ranking; repeatable.
        #[arg(long)]
        exclude: Vec<String>,
        #[arg(long)]
        length_weighted: bool,
        /// Also write the long-format CSV table.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Summarize an audit report; optionally plot the increments as SVG.
    Report {
        #[arg(long)]
        audit: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

impl Command {
    fn stage(&self) -> &'static str {
        match self {
            Command::Generate { .. } => "generate",
            Command::Train { .. } => "train",
            Command::Extract { .. } => "extract",
            Command::Learn { .. } => "learn",
            Command::Audit { .. } => "audit",
            Command::Report { .. } => "report",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stage = cli.command.stage();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pride {stage}: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = Config::load(cli.config.as_deref())?;
    let stage = cli.command.stage();
    let mut args: BTreeMap<&str, String> = BTreeMap::new();
    match cli.command {
        Command::Generate { n, seed, bias, raw, out } => {
            if let Some(n) = n {
                cfg.generate.n_records = n;
            }
            if let Some(seed) = seed {
                cfg.generate.seed = seed;
            }
            if !matches!(bias, BiasArg::Gender) {
                cfg.generate.correlation = 0.0;
            }
            let ds = faircv::generate(&cfg.generate)?;
            let mut bytes = Vec::new();
            write_dataset_csv(&ds, raw, &mut bytes)?;
            args.insert("bias", BiasMode::from(bias).label().to_string());
            args.insert("raw", raw.to_string());
            write_artifact(&out, &bytes, &Resolved { stage, args, config: &cfg })?;
            eprintln!("wrote {} profiles to {}", ds.records.len(), out.display());
        }
        Command::Train { data, scenario, bias, demographic, epochs, seed, out } => {
            if let Some(epochs) = epochs {
                cfg.model.epochs = epochs;
            }
            if let Some(seed) = seed {
                cfg.model.seed = seed;
            }
            let mode = BiasMode::from(bias);
            let demographic = match (demographic, mode) {
                (Some(DemographicArg::G), _) => Demographic::Gender,
                (Some(DemographicArg::E), _) | (None, BiasMode::Ethnicity) => Demographic::Ethnicity,
                (None, _) => Demographic::Gender,
            };
            let sc = Scenario::parse(&scenario, demographic)?;
            let ds = load_dataset(&data)?;
            let (schema, ts) = build_scenario(&ds, &sc, mode);
            let model = train(&schema, &ts, &cfg.model)?;
            args.insert("data", data.display().to_string());
            args.insert("scenario", sc.id());
            args.insert("demographic", demographic.attribute().to_string());
            args.insert("bias", mode.label().to_string());
            write_artifact(&out, model.to_json().as_bytes(), &Resolved { stage, args, config: &cfg })?;
            eprintln!("training accuracy {:.4}, loss {:.4}", model.train_accuracy, model.final_loss);
        }
        Command::Extract { model, data, out } => {
            let m = load_model(&model)?;
            let ds = load_dataset(&data)?;
            let schema = m.schema();
            let states = ds.records.iter().map(|r| record_state(r, &schema)).collect::<Result<Vec<_>>>()?;
            let ts = extract_transitions(&m, &states)?;
            let mut bytes = Vec::new();
            write_transitions_csv(&schema, &ts, &mut bytes)?;
            args.insert("model", model.display().to_string());
            args.insert("data", data.display().to_string());
            write_artifact(&out, &bytes, &Resolved { stage, args, config: &cfg })?;
        }
        Command::Learn { transitions, schema, targets, tie_break, out } => {
            if let Some(t) = tie_break {
                cfg.learner.tie_break = t.into();
            }
            let file = fs::File::open(&transitions).with_context(|| format!("opening {}", transitions.display()))?;
            let (schema, ts) = match &schema {
                Some(path) => {
                    let s = load_schema(path)?;
                    read_transitions_csv(file, SchemaSource::Given(&s))?
                }
                None => {
                    let (s, ts) = read_transitions_csv(file, SchemaSource::Infer { targets: targets.len() })?;
                    let names: Vec<&str> = s.targets().iter().map(|v| v.name.as_str()).collect();
                    if names != targets {
                        bail!("trailing columns are {names:?}, expected targets {targets:?}");
                    }
                    (s, ts)
                }
            };
            let program = pride(&ts, &schema, &cfg.learner)?;
            args.insert("transitions", transitions.display().to_string());
            write_artifact(&out, serialize_program(&program).as_bytes(), &Resolved { stage, args, config: &cfg })?;
            eprintln!("learned {} rules from {} transitions", program.len(), ts.len());
        }
        Command::Audit { pair, exclude, length_weighted, csv, out } => {
            if !exclude.is_empty() {
                cfg.audit.exclude = exclude;
            }
            cfg.audit.length_weighted |= length_weighted;
            let programs = pair.iter().map(|p| load_program(p)).collect::<Result<Vec<_>>>()?;
            let pairs: Vec<RunPair<'_>> = pair
                .chunks(2)
                .zip(programs.chunks(2))
                .map(|(paths, progs)| RunPair {
                    label: format!("{}-vs-{}", stem(&paths[0]), stem(&paths[1])),
                    unbiased: (&progs[0], meta(&paths[0])),
                    biased: (&progs[1], meta(&paths[1])),
                })
                .collect();
            let acfg = AuditConfig { length_weighted: cfg.audit.length_weighted, exclude_from_top: cfg.audit.exclude.clone() };
            let report = audit(&pairs, &acfg)?;
            args.insert("pairs", pair.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(" "));
            if let Some(csv) = &csv {
                write_artifact(csv, report.to_csv().as_bytes(), &Resolved { stage, args: args.clone(), config: &cfg })?;
            }
            write_artifact(&out, report.to_json().as_bytes(), &Resolved { stage, args, config: &cfg })?;
        }
        Command::Report { audit, svg } => {
            let text = fs::read_to_string(&audit).with_context(|| format!("reading {}", audit.display()))?;
            let rep = AuditReport::from_json(&text).with_context(|| format!("parsing {}", audit.display()))?;
            print!("{}", report::summary(&rep));
            if let Some(svg) = svg {
                args.insert("audit", audit.display().to_string());
                write_artifact(&svg, report::svg(&rep).as_bytes(), &Resolved { stage, args, config: &cfg })?;
            }
        }
    }
    Ok(())
}

fn load_dataset(path: &Path) -> Result<faircv::Dataset> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    read_dataset_csv(file).with_context(|| format!("reading {}", path.display()))
}

fn load_model(path: &Path) -> Result<TrainedModel> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    TrainedModel::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

fn load_program(path: &Path) -> Result<Program> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_program_standalone(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Schema from a model checkpoint (`.json`) or from a program header.
fn load_schema(path: &Path) -> Result<Schema> {
    if path.extension().is_some_and(|e| e == "json") {
        return Ok(load_model(path)?.schema());
    }
    Ok(load_program(path)?.schema().clone())
}

/// Feature values of a profile for the model's input columns.
fn record_state(r: &CvRecord, schema: &Schema) -> Result<State> {
    schema
        .features()
        .iter()
        .map(|v| match v.name.as_str() {
            "g" => Ok(r.gender),
            "e" => Ok(r.ethnicity),
            name => name
                .strip_prefix('i')
                .and_then(|k| k.parse::<usize>().ok())
                .filter(|k| (1..=r.merits.len()).contains(k))
                .map(|k| r.merits[k - 1])
                .with_context(|| format!("model input `{name}` is not a dataset column")),
        })
        .collect::<Result<Vec<u32>>>()
        .map(State::new)
}

fn stem(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

fn meta(path: &Path) -> RunMeta {
    RunMeta { id: stem(path), scenario: None, bias: None, seed: None }
}
