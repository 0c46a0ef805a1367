mod args;
mod commands;
mod error;
mod manifest;

use std::ffi::OsString;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use args::{Cli, Command};
use commands::Context;
use error::{CliError, CliResult};
use manifest::{unix_now, Recorder, RunManifest, VERSION};

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Bounds(_) => "bounds",
        Command::Place(_) => "place",
        Command::Metrics(_) => "metrics",
        Command::Fingerprint(_) => "fingerprint",
        Command::Reconstruct(_) => "reconstruct",
        Command::Verify(v) => match v.check {
            args::VerifyCommand::Thm1(_) => "verify thm1",
            args::VerifyCommand::Thm2(_) => "verify thm2",
            args::VerifyCommand::Qd(_) => "verify qd",
        },
        Command::GenQd(_) => "gen-qd",
        Command::Train(_) => "train",
        Command::Eval(_) => "eval",
        Command::Replay(_) => "replay",
    }
}

fn parse(argv: &[String]) -> CliResult<Option<Cli>> {
    match Cli::try_parse_from(std::iter::once("rbc".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => Ok(Some(cli)),
        Err(e) if !e.use_stderr() => {
            // --help and --version
            print!("{e}");
            Ok(None)
        }
        Err(e) => Err(CliError::Usage(e.render().to_string().trim().to_string())),
    }
}

/// Runs one invocation; with `record`, writes a manifest next to each output.
fn run(argv: Vec<String>, record: bool) -> CliResult<()> {
    let Some(cli) = parse(&argv)? else {
        return Ok(());
    };
    if let Some(k) = cli.workers {
        if k == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        // a pool built by an earlier invocation in this process is kept
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
    }
    if let Command::Replay(r) = &cli.command {
        return replay(&r.manifest);
    }
    let started = Instant::now();
    let started_unix = unix_now();
    let mut ctx = Context {
        degrees: cli.degrees,
        rec: Recorder::default(),
    };
    match &cli.command {
        Command::Bounds(a) => commands::bounds(&mut ctx, a),
        Command::Place(a) => commands::place(&mut ctx, a),
        Command::Metrics(a) => commands::metrics(&mut ctx, a),
        Command::Fingerprint(a) => commands::fingerprint_cmd(&mut ctx, a),
        Command::Reconstruct(a) => commands::reconstruct(&mut ctx, a),
        Command::Verify(a) => commands::verify(&mut ctx, a),
        Command::GenQd(a) => commands::gen_qd(&mut ctx, a),
        Command::Train(a) => commands::train_cmd(&mut ctx, a),
        Command::Eval(a) => commands::eval(&mut ctx, a),
        Command::Replay(_) => unreachable!(),
    }?;
    if record && !ctx.rec.outputs.is_empty() {
        let cwd = std::env::current_dir().map_err(|e| CliError::io(std::path::Path::new("."), e))?;
        RunManifest {
            version: VERSION.to_string(),
            subcommand: subcommand_name(&cli.command).to_string(),
            args: argv,
            cwd,
            seeds: ctx.rec.seeds,
            inputs: ctx.rec.inputs,
            outputs: ctx.rec.outputs,
            workers: cli.workers,
            started_unix,
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        }
        .write_alongside()?;
    }
    Ok(())
}

fn replay(path: &std::path::Path) -> CliResult<()> {
    let manifest = RunManifest::load(path)?;
    std::env::set_current_dir(&manifest.cwd).map_err(|e| CliError::io(&manifest.cwd, e))?;
    let before = manifest
        .outputs
        .iter()
        .map(|p| std::fs::read(p).map_err(|e| CliError::io(p, e)))
        .collect::<CliResult<Vec<_>>>()?;
    run(manifest.args.clone(), false)?;
    let mut results = Vec::new();
    let mut differing = Vec::new();
    for (p, old) in manifest.outputs.iter().zip(before) {
        let new = std::fs::read(p).map_err(|e| CliError::io(p, e))?;
        let identical = new == old;
        if !identical {
            differing.push(p.display().to_string());
        }
        results.push(json!({ "path": p, "identical": identical }));
    }
    println!(
        "{}",
        json!({ "replayed": manifest.subcommand, "version": VERSION, "recorded_version": manifest.version, "outputs": results })
    );
    if differing.is_empty() {
        Ok(())
    } else {
        Err(CliError::ReplayMismatch(format!("outputs differ: {}", differing.join(", "))))
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args_os()
        .skip(1)
        .map(|a: OsString| a.to_string_lossy().into_owned())
        .collect();
    match run(argv, true) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
