//! Batch driver for the funkmeans experiments.
//!
//! Each command resolves a flat `key=value` configuration (defaults, then
//! `--config` file, then flags), validates it, runs the experiment under the
//! master seed and writes a CSV table plus `<out>.manifest`, which records
//! every resolved key and can be passed back as `--config`.

pub mod config;
pub mod experiments;

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Arg, ArgMatches, Command};
use thiserror::Error;

use config::{command_spec, ExperimentConfig, Origin, COMMANDS, COMMON};
use experiments::{Plan, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}: `{key}`: {reason}")]
    Config {
        origin: Origin,
        key: String,
        reason: String,
    },
    #[error("{0}")]
    Invalid(funkmeans::Error),
    #[error("cannot write `{path}`: {reason}")]
    Output { path: PathBuf, reason: String },
    #[error(transparent)]
    Model(#[from] funkmeans::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Output { .. } => 3,
            CliError::Model(_) => 1,
        }
    }
}

pub fn cli() -> Command {
    let mut app = Command::new("funkmeans")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Functional k-means experiments")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for spec in COMMANDS {
        let mut cmd = Command::new(spec.name).about(spec.about).arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("key=value file; flags override it"),
        );
        for k in COMMON.iter().chain(spec.keys) {
            cmd = cmd.arg(
                Arg::new(k.name)
                    .long(k.flag)
                    .value_name("VALUE")
                    .help(format!("{} [default: {}]", k.help, k.default)),
            );
        }
        app = app.subcommand(cmd);
    }
    app
}

/// Resolve defaults, the optional config file and flag overrides.
pub fn resolve(name: &str, matches: &ArgMatches) -> Result<ExperimentConfig, CliError> {
    let spec = command_spec(name).expect("subcommands come from COMMANDS");
    let mut config = ExperimentConfig::defaults(spec);
    if let Some(path) = matches.get_one::<String>("config") {
        config.apply_file(Path::new(path))?;
    }
    for k in COMMON.iter().chain(spec.keys) {
        if let Some(v) = matches.get_one::<String>(k.name) {
            config.set(k.name, v.clone(), Origin::Flag)?;
        }
    }
    Ok(config)
}

fn create(path: &Path) -> Result<File, CliError> {
    File::create(path).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

pub fn write_table(table: &Table, file: File, path: &Path) -> Result<(), CliError> {
    let fail = |e: csv::Error| CliError::Output {
        path: path.to_path_buf(),
        reason: e.to_string(),
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(file);
    w.write_record(&table.header).map_err(fail)?;
    for row in &table.rows {
        w.write_record(row).map_err(fail)?;
    }
    w.flush().map_err(|e| fail(e.into()))
}

/// Validate, run and write one experiment. Output files are opened before
/// any computation so an unwritable path fails fast.
pub fn run_command(config: &ExperimentConfig) -> Result<Table, CliError> {
    let seed: u64 = config.get("seed")?;
    let threads: usize = config.get("threads")?;
    let plan = Plan::build(config)?;
    let out = PathBuf::from(config.out_path());
    let manifest_path = PathBuf::from(format!("{}.manifest", out.display()));
    let csv_file = create(&out)?;
    let mut manifest = create(&manifest_path)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config {
            origin: Origin::Flag,
            key: "threads".into(),
            reason: e.to_string(),
        })?;
    let table = pool.install(|| plan.run(seed))?;
    write_table(&table, csv_file, &out)?;
    manifest
        .write_all(config.manifest().as_bytes())
        .map_err(|e| CliError::Output {
            path: manifest_path,
            reason: e.to_string(),
        })?;
    Ok(table)
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    match resolve(name, sub).and_then(|c| run_command(&c)) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
