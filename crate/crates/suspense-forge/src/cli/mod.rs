//! The `suspense-forge` command surface: `generate`, `variant`,
//! `stats`, `templates`, and `validate`.
//!
//! Every generation run lands in its own append-only run directory
//! containing `story.json`, `trace.json`, `transcript.jsonl`, and an
//! atomically written `manifest.json` recording the effective config —
//! re-running with the manifest's flags and cassette reproduces the
//! artifacts byte for byte.
//!
//! Exit codes: 0 success, 2 configuration or input error, 3 gateway
//! failure, 4 artifact validation failure, 5 missing/unusable outline
//! for a variant. Credentials are taken from environment variables
//! only (`SUSPENSE_FORGE_API_KEY`), never from flags, so they cannot
//! leak into shell history or manifests.

pub mod manifest;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::fs;
use std::path::{Path, PathBuf};

use crate::eval::{self, io as eval_io};
use crate::gateway::{
    Gateway, GatewayError, LiveBackend, TranscriptWriter, REPLAY_BACKEND_ID,
};
use crate::pipeline::{
    self, bundled_genres, sample_genre, GenerationOutcome, PipelineError, StageLog, StageTrace,
    StoryEngine,
};
use crate::prompt::{catalog, TEMPLATE_SET_VERSION};
use crate::story::{GenerationConfig, Genre, RevelationMode, StoryArtifact, VariantId};
use crate::variants::{self, ArityPolicy, VariantError};

use manifest::{
    create_run_dir, write_manifest, RunManifest, STORY_FILE, TRACE_FILE, TRANSCRIPT_FILE,
};

/// Process exit codes, kept stable as part of the CLI contract.
pub mod exit_code {
    /// Success; for generation commands this also means the artifact
    /// validated cleanly.
    pub const OK: i32 = 0;
    /// Configuration or input error: bad flags, bad config file, bad
    /// input data, missing credentials or cassette file.
    pub const CONFIG: i32 = 2;
    /// Gateway failure: provider errors, transport errors, cassette
    /// misses or corruption, empty model responses.
    pub const GATEWAY: i32 = 3;
    /// The generated artifact failed validation.
    pub const VALIDATION: i32 = 4;
    /// A variant needed an outline the source story does not carry.
    pub const MISSING_OUTLINE: i32 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "suspense-forge",
    version,
    about = "Iterative planning engine for suspenseful story generation",
    subcommand_required = true,
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a story through the three-stage pipeline.
    Generate(GenerateArgs),
    /// Generate a single-prompt comparison variant.
    Variant(VariantArgs),
    /// Evaluation statistics over preference data.
    Stats(StatsArgs),
    /// Print the versioned prompt template catalog.
    Templates,
    /// Validate a story artifact JSON file.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Outline iterations k (one action per iteration); at least 2.
    #[arg(long)]
    iterations: Option<u32>,
    /// Seed for genre sampling and other engine-side randomness.
    #[arg(long)]
    seed: Option<u64>,
    /// Fix the story genre instead of sampling one from the catalog.
    #[arg(long)]
    genre: Option<String>,
    /// Ask for a foreshadowing clue in each failing chapter (default).
    #[arg(long, overrides_with = "no_clue")]
    clue: bool,
    /// Skip the foreshadowing clue prompts.
    #[arg(long, overrides_with = "clue")]
    no_clue: bool,
    /// When the failure cause is revealed to the reader.
    #[arg(long, value_enum)]
    revelation: Option<RevelationArg>,
    /// Sentence budget appended to interim prompts: 3, 4, or 5.
    #[arg(long)]
    sentence_cap: Option<u8>,
    /// Chat backend: "live" or "replay".
    #[arg(long)]
    backend: Option<String>,
    /// Cassette file backing the replay backend.
    #[arg(long)]
    cassette: Option<PathBuf>,
    /// Record completed exchanges to this cassette file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// TOML config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Parent directory for run directories.
    #[arg(long, default_value = "runs")]
    out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RevelationArg {
    /// Reveal the coming failure before the attempt is narrated.
    Before,
    /// Explain the failure after the attempt is narrated.
    After,
}

impl RevelationArg {
    fn into_mode(self) -> RevelationMode {
        match self {
            RevelationArg::Before => RevelationMode::Beforehand,
            RevelationArg::After => RevelationMode::AfterTheFact,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VariantArg {
    Baseline,
    Ablation1,
    Ablation2,
}

impl VariantArg {
    fn id(self) -> VariantId {
        match self {
            VariantArg::Baseline => VariantId::Baseline,
            VariantArg::Ablation1 => VariantId::Ablation1,
            VariantArg::Ablation2 => VariantId::Ablation2,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ArityArg {
    /// Require the canonical 3-action outline shape.
    Strict3,
    /// Generalize the summary clause to any outline length.
    Generalize,
}

#[derive(Debug, Args)]
struct VariantArgs {
    /// Which comparison variant to generate.
    #[arg(value_enum)]
    which: VariantArg,
    /// Reuse the background (and outline) of an existing story.json
    /// instead of generating fresh planning stages.
    #[arg(long)]
    from: Option<PathBuf>,
    /// Outline arity policy for ablation1.
    #[arg(long, value_enum, default_value = "generalize")]
    arity: ArityArg,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[command(subcommand)]
    command: StatsCommand,
}

#[derive(Debug, Subcommand)]
enum StatsCommand {
    /// Exact two-sided sign test on win/loss counts (drop ties first).
    Sign {
        #[arg(long)]
        wins: u64,
        #[arg(long)]
        losses: u64,
    },
    /// Win/lose/tie table from rater responses and de-blinding keys.
    Tally {
        /// Responses as CSV (bundle_id,rater_id,question,choice) or JSONL.
        #[arg(long)]
        responses: PathBuf,
        /// JSON array of de-blinding keys.
        #[arg(long)]
        keys: PathBuf,
        /// Emit JSON instead of the plain-text table.
        #[arg(long)]
        json: bool,
    },
    /// Fleiss's kappa over a JSON rating count matrix.
    Kappa {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Empathy × suspense 5×5 count matrix from level-pair CSV.
    Heatmap {
        /// CSV with `empathy` and `suspense` columns, levels 1..=5.
        #[arg(long)]
        levels: PathBuf,
        /// Emit JSON instead of the plain-text grid.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Story artifact JSON file to check.
    path: PathBuf,
}

/// Runs the CLI on the given argument list (the first item is the
/// program name) and returns the process exit code.
pub fn run<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => exit_code::OK,
                _ => exit_code::CONFIG,
            };
            let _ = err.print();
            return code;
        }
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Variant(args) => cmd_variant(args),
        Command::Stats(args) => match cmd_stats(args.command) {
            Ok(output) => {
                print!("{output}");
                exit_code::OK
            }
            Err((code, message)) => {
                eprintln!("error: {message}");
                code
            }
        },
        Command::Templates => {
            print!("{}", catalog());
            exit_code::OK
        }
        Command::Validate(args) => cmd_validate(args),
    }
}

/// TOML config file mirroring the generation config; every key
/// optional, unknown keys rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    iterations: Option<u32>,
    seed: Option<u64>,
    genre: Option<String>,
    clue_setup: Option<bool>,
    revelation_mode: Option<String>,
    sentence_cap: Option<u8>,
    backend: Option<String>,
}

fn parse_revelation(text: &str) -> Option<RevelationMode> {
    match text
        .trim()
        .to_ascii_lowercase()
        .replace(['-', ' '], "_")
        .as_str()
    {
        "before" | "beforehand" => Some(RevelationMode::Beforehand),
        "after" | "after_the_fact" | "afterthefact" => Some(RevelationMode::AfterTheFact),
        _ => None,
    }
}

/// Merges built-in defaults, the optional TOML config file, and flags;
/// flags win over the file, the file wins over defaults.
fn effective_config(args: &CommonArgs) -> Result<GenerationConfig, String> {
    let file: FileConfig = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
            toml::from_str(&text)
                .map_err(|e| format!("invalid config file {}: {e}", path.display()))?
        }
        None => FileConfig::default(),
    };

    let file_revelation = match &file.revelation_mode {
        Some(text) => Some(parse_revelation(text).ok_or_else(|| {
            format!("invalid revelation_mode {text:?} in config file (use before or after)")
        })?),
        None => None,
    };
    let clue_flag = if args.no_clue {
        Some(false)
    } else if args.clue {
        Some(true)
    } else {
        None
    };

    let defaults = GenerationConfig::default();
    Ok(GenerationConfig {
        iterations: args.iterations.or(file.iterations).unwrap_or(defaults.iterations),
        clue_setup: clue_flag.or(file.clue_setup).unwrap_or(defaults.clue_setup),
        revelation_mode: args
            .revelation
            .map(RevelationArg::into_mode)
            .or(file_revelation)
            .unwrap_or(defaults.revelation_mode),
        sentence_cap: args.sentence_cap.or(file.sentence_cap).unwrap_or(defaults.sentence_cap),
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        backend: args
            .backend
            .clone()
            .or(file.backend)
            .unwrap_or(defaults.backend),
        genre_override: args
            .genre
            .clone()
            .or(file.genre)
            .map(|g| Genre::new(g.as_str())),
    })
}

fn gateway_exit_code(err: &GatewayError) -> i32 {
    match err {
        GatewayError::MissingCredentials(_) | GatewayError::UnknownBackend(_) => exit_code::CONFIG,
        _ => exit_code::GATEWAY,
    }
}

fn pipeline_exit_code(err: &PipelineError) -> i32 {
    match err {
        PipelineError::InvalidConfig(_) | PipelineError::EmptyCatalog => exit_code::CONFIG,
        PipelineError::Prompt(_) => exit_code::CONFIG,
        PipelineError::Gateway(e) => gateway_exit_code(e),
        PipelineError::EmptyResponse { .. } => exit_code::GATEWAY,
        PipelineError::Stage { source, .. } => pipeline_exit_code(source),
    }
}

fn variant_exit_code(err: &VariantError) -> i32 {
    match err {
        VariantError::ArityMismatch { .. } => exit_code::MISSING_OUTLINE,
        VariantError::EmptyResponse { .. } => exit_code::GATEWAY,
        VariantError::Prompt(_) => exit_code::CONFIG,
        VariantError::Gateway(e) => gateway_exit_code(e),
    }
}

/// Builds the gateway for the chosen backend. Setup problems are
/// reported before any run directory exists: a missing cassette file or
/// missing credentials are configuration errors, a corrupt cassette is
/// a gateway error.
fn build_gateway(config: &GenerationConfig, cassette: Option<&Path>) -> Result<Gateway, (i32, String)> {
    let mut gateway = Gateway::new();
    match config.backend.as_str() {
        REPLAY_BACKEND_ID => {
            let Some(path) = cassette else {
                return Err((
                    exit_code::CONFIG,
                    "the replay backend requires --cassette".to_owned(),
                ));
            };
            if !path.exists() {
                return Err((
                    exit_code::CONFIG,
                    format!("cassette file not found: {}", path.display()),
                ));
            }
            gateway
                .load_cassette(path)
                .map_err(|e| (gateway_exit_code(&e), e.to_string()))?;
        }
        "live" => {
            let backend =
                LiveBackend::from_env().map_err(|e| (gateway_exit_code(&e), e.to_string()))?;
            gateway.register("live", Box::new(backend));
        }
        other => {
            return Err((
                exit_code::CONFIG,
                format!("unknown backend {other:?} (expected \"live\" or \"replay\")"),
            ));
        }
    }
    Ok(gateway)
}

/// Shared post-run bookkeeping: writes artifacts, saves a recording
/// when requested, and writes the manifest atomically even on failure.
#[allow(clippy::too_many_arguments)]
fn finish_run(
    run_dir: &Path,
    run_id: String,
    command: &str,
    config: GenerationConfig,
    variant: Option<VariantId>,
    from: Option<PathBuf>,
    common: &CommonArgs,
    gateway: &mut Gateway,
    outcome: Result<GenerationOutcome, (i32, String)>,
) -> i32 {
    let mut status;
    match &outcome {
        Ok(result) => {
            let report = result.artifact.validate();
            status = if report.is_empty() {
                exit_code::OK
            } else {
                exit_code::VALIDATION
            };
            let story_path = run_dir.join(STORY_FILE);
            let trace_path = run_dir.join(TRACE_FILE);
            if let Err(e) = fs::write(&story_path, result.artifact.to_json())
                .and_then(|_| fs::write(&trace_path, result.trace.to_json()))
            {
                eprintln!("error: cannot write artifacts: {e}");
                status = exit_code::GATEWAY;
            }
            if !report.is_empty() {
                eprintln!("validation failed:\n{report}");
            }
        }
        Err((code, message)) => {
            status = *code;
            eprintln!("error: {message}");
        }
    }

    if let Some(record_path) = &common.record {
        match gateway.take_recording() {
            Ok(cassette) => {
                if let Err(e) = cassette.save(record_path) {
                    eprintln!("error: cannot save recording: {e}");
                    if status == exit_code::OK {
                        status = exit_code::GATEWAY;
                    }
                }
            }
            Err(e) => eprintln!("error: {e}"),
        }
    }

    let manifest = RunManifest {
        run_id,
        command: command.to_owned(),
        created_unix: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        config,
        variant,
        from,
        cassette: common.cassette.clone(),
        record: common.record.clone(),
        template_set_version: TEMPLATE_SET_VERSION.to_owned(),
        exit_status: status,
    };
    if let Err(e) = write_manifest(run_dir, &manifest) {
        eprintln!("error: cannot write manifest: {e}");
        if status == exit_code::OK {
            status = exit_code::GATEWAY;
        }
    }

    status
}

fn cmd_generate(args: GenerateArgs) -> i32 {
    let config = match effective_config(&args.common) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return exit_code::CONFIG;
        }
    };
    if let Err(e) = pipeline::validate_config(&config) {
        eprintln!("error: {e}");
        return exit_code::CONFIG;
    }
    let mut gateway = match build_gateway(&config, args.common.cassette.as_deref()) {
        Ok(gateway) => gateway,
        Err((code, message)) => {
            eprintln!("error: {message}");
            return code;
        }
    };

    let (run_dir, run_id) = match create_run_dir(&args.common.out, config.seed) {
        Ok(created) => created,
        Err(e) => {
            eprintln!("error: cannot create run directory: {e}");
            return exit_code::CONFIG;
        }
    };
    println!("{}", run_dir.display());

    match TranscriptWriter::to_file(&run_dir.join(TRANSCRIPT_FILE)) {
        Ok(writer) => gateway.set_transcript(writer),
        Err(e) => {
            eprintln!("error: cannot open transcript: {e}");
            return exit_code::CONFIG;
        }
    }
    if args.common.record.is_some() {
        gateway.enable_recording();
    }

    let outcome = {
        let engine = StoryEngine::new(&gateway);
        engine
            .generate_story(&config)
            .map_err(|e| (pipeline_exit_code(&e), e.to_string()))
    };
    if let Ok(result) = &outcome {
        println!("chapters: {}", result.artifact.chapters.len());
        println!("genre: {}", result.artifact.background.genre.label());
    }
    finish_run(
        &run_dir,
        run_id,
        "generate",
        config,
        None,
        None,
        &args.common,
        &mut gateway,
        outcome,
    )
}

fn cmd_variant(args: VariantArgs) -> i32 {
    let variant = args.which.id();
    let config = match effective_config(&args.common) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            return exit_code::CONFIG;
        }
    };
    if let Err(e) = pipeline::validate_config(&config) {
        eprintln!("error: {e}");
        return exit_code::CONFIG;
    }

    let source = match &args.from {
        Some(path) => {
            let text = match fs::read_to_string(path) {
                Ok(text) => text,
                Err(e) => {
                    eprintln!("error: cannot read --from {}: {e}", path.display());
                    return exit_code::CONFIG;
                }
            };
            match StoryArtifact::from_json(&text) {
                Ok(artifact) => Some(artifact),
                Err(e) => {
                    eprintln!("error: invalid story artifact {}: {e}", path.display());
                    return exit_code::CONFIG;
                }
            }
        }
        None => None,
    };

    // An outline-dependent variant cannot run from a story that has no
    // outline (e.g. another variant's artifact).
    if matches!(variant, VariantId::Ablation1) {
        if let Some(src) = &source {
            if src.outline.is_empty() {
                eprintln!(
                    "error: {} has an empty outline; ablation1 needs the planned actions",
                    args.from.as_ref().expect("source implies --from").display()
                );
                return exit_code::MISSING_OUTLINE;
            }
        }
    }

    let mut gateway = match build_gateway(&config, args.common.cassette.as_deref()) {
        Ok(gateway) => gateway,
        Err((code, message)) => {
            eprintln!("error: {message}");
            return code;
        }
    };

    let (run_dir, run_id) = match create_run_dir(&args.common.out, config.seed) {
        Ok(created) => created,
        Err(e) => {
            eprintln!("error: cannot create run directory: {e}");
            return exit_code::CONFIG;
        }
    };
    println!("{}", run_dir.display());
    println!("variant: {variant}");

    match TranscriptWriter::to_file(&run_dir.join(TRANSCRIPT_FILE)) {
        Ok(writer) => gateway.set_transcript(writer),
        Err(e) => {
            eprintln!("error: cannot open transcript: {e}");
            return exit_code::CONFIG;
        }
    }
    if args.common.record.is_some() {
        gateway.enable_recording();
    }

    let policy = match args.arity {
        ArityArg::Strict3 => ArityPolicy::Strict3,
        ArityArg::Generalize => ArityPolicy::Generalize,
    };
    let outcome = run_variant_stages(&gateway, &config, variant, policy, source.as_ref());
    finish_run(
        &run_dir,
        run_id,
        "variant",
        config,
        Some(variant),
        args.from.clone(),
        &args.common,
        &mut gateway,
        outcome,
    )
}

/// Produces the background (and outline, when needed) either from the
/// source artifact or by running the planning stages fresh, then makes
/// the single variant call.
fn run_variant_stages(
    gateway: &Gateway,
    config: &GenerationConfig,
    variant: VariantId,
    policy: ArityPolicy,
    source: Option<&StoryArtifact>,
) -> Result<GenerationOutcome, (i32, String)> {
    let engine = StoryEngine::new(gateway);
    let mut planning_stages: Vec<StageLog> = Vec::new();

    let (background, outline) = match source {
        Some(artifact) => (artifact.background.clone(), artifact.outline.clone()),
        None => {
            let genre = match &config.genre_override {
                Some(genre) => genre.clone(),
                None => sample_genre(config.seed, bundled_genres())
                    .map_err(|e| (pipeline_exit_code(&e), e.to_string()))?,
            };
            let mut session = gateway
                .open_session(&config.backend)
                .map_err(|e| (gateway_exit_code(&e), e.to_string()))?;
            let mut log = Vec::new();
            let background = engine
                .background_setup(&mut session, &genre, config.sentence_cap, &mut log)
                .map_err(|e| (pipeline_exit_code(&e), e.to_string()))?;
            planning_stages.push(StageLog {
                stage: pipeline::StageKind::Background,
                exchanges: log,
            });
            let outline = if matches!(variant, VariantId::Ablation1) {
                let mut log = Vec::new();
                let outline = engine
                    .plan_outline(
                        &mut session,
                        &background,
                        config.iterations,
                        config.sentence_cap,
                        &mut log,
                    )
                    .map_err(|e| (pipeline_exit_code(&e), e.to_string()))?;
                planning_stages.push(StageLog {
                    stage: pipeline::StageKind::Outline,
                    exchanges: log,
                });
                outline
            } else {
                Default::default()
            };
            (background, outline)
        }
    };

    let mut session = gateway
        .open_session(&config.backend)
        .map_err(|e| (gateway_exit_code(&e), e.to_string()))?;
    let result = match variant {
        VariantId::Baseline => {
            variants::generate_baseline(&engine, &mut session, &background, config)
        }
        VariantId::Ablation1 => variants::generate_ablation1(
            &engine,
            &mut session,
            &background,
            &outline,
            policy,
            config,
        ),
        VariantId::Ablation2 => {
            variants::generate_ablation2(&engine, &mut session, &background, config)
        }
    };
    let mut outcome = result.map_err(|e| (variant_exit_code(&e), e.to_string()))?;
    if !planning_stages.is_empty() {
        planning_stages.extend(outcome.trace.stages);
        outcome.trace = StageTrace {
            stages: planning_stages,
        };
    }
    Ok(outcome)
}

fn cmd_stats(command: StatsCommand) -> Result<String, (i32, String)> {
    match command {
        StatsCommand::Sign { wins, losses } => {
            let p = eval::sign_test(wins, losses)
                .map_err(|e| (exit_code::CONFIG, e.to_string()))?;
            Ok(format!("{p}\n"))
        }
        StatsCommand::Tally {
            responses,
            keys,
            json,
        } => {
            let parsed = read_responses(&responses)?;
            let keys_file = fs::File::open(&keys).map_err(|e| {
                (
                    exit_code::CONFIG,
                    format!("cannot read keys file {}: {e}", keys.display()),
                )
            })?;
            let parsed_keys = eval_io::read_blinding_keys(keys_file)
                .map_err(|e| (exit_code::CONFIG, format!("{}: {e}", keys.display())))?;
            let tally = eval::tally(&parsed, &parsed_keys)
                .map_err(|e| (exit_code::CONFIG, e.to_string()))?;
            Ok(if json {
                eval_io::tally_to_json(&tally)
            } else {
                eval_io::render_tally_table(&tally)
            })
        }
        StatsCommand::Kappa { matrix } => {
            let file = fs::File::open(&matrix).map_err(|e| {
                (
                    exit_code::CONFIG,
                    format!("cannot read matrix file {}: {e}", matrix.display()),
                )
            })?;
            let parsed = eval_io::read_rating_matrix(file)
                .map_err(|e| (exit_code::CONFIG, format!("{}: {e}", matrix.display())))?;
            let kappa = eval::fleiss_kappa(&parsed);
            let mut out = format!("{}\n", kappa.value);
            if kappa.degenerate {
                out.push_str("degenerate agreement: every rating fell in a single category\n");
            }
            Ok(out)
        }
        StatsCommand::Heatmap { levels, json } => {
            let file = fs::File::open(&levels).map_err(|e| {
                (
                    exit_code::CONFIG,
                    format!("cannot read levels file {}: {e}", levels.display()),
                )
            })?;
            let pairs = eval_io::read_level_pairs_csv(file)
                .map_err(|e| (exit_code::CONFIG, format!("{}: {e}", levels.display())))?;
            let map = eval::empathy_heatmap(&pairs);
            Ok(if json {
                eval_io::heatmap_to_json(&map)
            } else {
                eval_io::render_heatmap(&map)
            })
        }
    }
}

/// Reads responses as CSV or JSON lines, inferred from the extension.
fn read_responses(path: &Path) -> Result<Vec<eval::PreferenceResponse>, (i32, String)> {
    let extension = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    let file = fs::File::open(path).map_err(|e| {
        (
            exit_code::CONFIG,
            format!("cannot read responses file {}: {e}", path.display()),
        )
    })?;
    let result = match extension.as_str() {
        "csv" => eval_io::read_responses_csv(file),
        "jsonl" | "ndjson" | "json" => eval_io::read_responses_jsonl(std::io::BufReader::new(file)),
        other => {
            return Err((
                exit_code::CONFIG,
                format!("cannot infer response format from extension {other:?} (use .csv or .jsonl)"),
            ));
        }
    };
    result.map_err(|e| (exit_code::CONFIG, format!("{}: {e}", path.display())))
}

fn cmd_validate(args: ValidateArgs) -> i32 {
    let text = match fs::read_to_string(&args.path) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.path.display());
            return exit_code::CONFIG;
        }
    };
    let artifact = match StoryArtifact::from_json(&text) {
        Ok(artifact) => artifact,
        Err(e) => {
            eprintln!("error: invalid artifact JSON: {e}");
            return exit_code::CONFIG;
        }
    };
    let report = artifact.validate();
    if report.is_empty() {
        println!("valid");
        exit_code::OK
    } else {
        println!("{report}");
        exit_code::VALIDATION
    }
}
