//! Experiment harness: one subcommand per experiment, each run writing CSV
//! artifacts, a `report.json` summary and a `manifest.json`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod params;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{value_parser, Arg, ArgMatches};

pub use config::{ExperimentConfig, DEFAULT_OUTPUT_DIR};
pub use error::CliError;

use config::{merge, ConfigOverrides, FlagValues};
use error::usage;
use params::{parse_value, COMMANDS};

fn cli() -> clap::Command {
    let mut app = clap::Command::new("lowrank")
        .version(lowrank_core::VERSION)
        .about("Seeded low-rank recovery and concentration experiments")
        .arg(Arg::new("seed").long("seed").global(true).value_parser(value_parser!(u64)).help("master seed"))
        .arg(Arg::new("trials").long("trials").global(true).value_parser(value_parser!(usize)).help("trial count"))
        .arg(Arg::new("threads").long("threads").global(true).value_parser(value_parser!(usize)).help("worker threads"))
        .arg(Arg::new("out").long("out").global(true).value_parser(value_parser!(PathBuf)).help("output directory"))
        .arg(
            Arg::new("config")
                .long("config")
                .global(true)
                .value_parser(value_parser!(PathBuf))
                .help("JSON config; its fields override flags"),
        );
    for c in COMMANDS {
        let mut sub = clap::Command::new(c.name).about(c.about);
        for p in c.params {
            let mut arg = Arg::new(p.name).long(p.name.replace('_', "-")).value_name(p.kind.metavar()).help(p.help);
            if let Some(d) = p.default {
                arg = arg.help(format!("{} [default: {d}]", p.help));
            }
            sub = sub.arg(arg);
        }
        app = app.subcommand(sub);
    }
    app
}

fn flag_values(m: &ArgMatches) -> Result<(FlagValues, Option<PathBuf>, Option<usize>), CliError> {
    let mut flags = FlagValues {
        seed: m.get_one::<u64>("seed").copied(),
        trials: m.get_one::<usize>("trials").copied(),
        output_dir: m.get_one::<PathBuf>("out").cloned(),
        ..Default::default()
    };
    let mut config = m.get_one::<PathBuf>("config").cloned();
    let mut threads = m.get_one::<usize>("threads").copied();
    if let Some((name, sub)) = m.subcommand() {
        let cmd = params::command(name).expect("registered subcommand");
        for p in cmd.params {
            if let Some(text) = sub.get_one::<String>(p.name) {
                let v = parse_value(p.kind, text).map_err(|e| usage(format!("--{}: {e}", p.name.replace('_', "-"))))?;
                flags.params.insert(p.name.to_string(), v);
            }
        }
        // global flags given after the subcommand land in its matches
        flags.seed = sub.get_one::<u64>("seed").copied().or(flags.seed);
        flags.trials = sub.get_one::<usize>("trials").copied().or(flags.trials);
        flags.output_dir = sub.get_one::<PathBuf>("out").cloned().or(flags.output_dir);
        config = sub.get_one::<PathBuf>("config").cloned().or(config);
        threads = sub.get_one::<usize>("threads").copied().or(threads);
        flags.subcommand = Some(name.to_string());
    }
    Ok((flags, config, threads))
}

/// Runs one experiment and writes its artifacts; returns the manifest path.
pub fn run(config: &ExperimentConfig, threads: Option<usize>) -> Result<PathBuf, CliError> {
    let cfg = config.clone().resolved()?;
    let start = Instant::now();
    let out = match threads {
        Some(0) => return Err(usage("threads must be positive")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| experiments::execute(&cfg))?,
        None => experiments::execute(&cfg)?,
    };
    let mut files = out.files;
    files.push((output::REPORT.into(), serde_json::to_string_pretty(&out.report).expect("report serializes")));
    let mut names: Vec<String> = files.iter().map(|f| f.0.clone()).collect();
    names.push(output::MANIFEST.into());
    let manifest = output::manifest(&cfg, &names, start.elapsed().as_secs_f64(), threads);
    files.push((output::MANIFEST.into(), manifest));
    output::write_all(&cfg.output_dir, &files)?;
    Ok(cfg.output_dir.join(output::MANIFEST))
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match cli().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = flag_values(&matches).and_then(|(flags, config, threads)| {
        let file = match config {
            Some(path) => {
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Some(ConfigOverrides::from_json(&text)?)
            }
            None => None,
        };
        run(&merge(flags, file)?, threads)
    });
    match result {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
