use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use valuata_cli::{
    run, CliError, Command, FieldFlags, FieldSpec, Request, DEFAULT_BUDGET, DEFAULT_SAMPLES,
};

/// Best generators, Swan conductors and defect for degree-p extensions.
#[derive(Parser, Debug)]
#[command(name = "valuata", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    field: FieldArgs,
    /// Improvement step budget.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    #[arg(long, global = true, env = "VALUATA_SEED", default_value_t = 0)]
    seed: u64,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct FieldArgs {
    /// series or cyclo.
    #[arg(long, global = true)]
    field: Option<String>,
    #[arg(long, global = true)]
    p: Option<u64>,
    /// int, int-inv-p, rat or lex2.
    #[arg(long, global = true)]
    group: Option<String>,
    /// gf:q or ratfunc:q.
    #[arg(long, global = true)]
    residue: Option<String>,
    /// Extra ramification: pi^m = z.
    #[arg(long, global = true)]
    m: Option<u32>,
    #[arg(long, global = true)]
    with_y: bool,
    /// Series precision (a group element) or p-adic precision N.
    #[arg(long, global = true, allow_hyphen_values = true)]
    precision: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Classify an Artin-Schreier generator f.
    AnalyzeAs { expr: String },
    /// Improve f until it is best, trivial or the budget runs out.
    NormalizeAs { expr: String },
    /// Classify a Kummer generator h.
    ClassifyKummer { expr: String },
    /// Improve h until it is best, trivial or the budget runs out.
    NormalizeKummer { expr: String },
    /// Check the Lefschetz/Swan constructions on sampled generators of T^p - T = f.
    VerifyNormIdeal {
        expr: String,
        /// Random generators to sample.
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Explicit generator `c0; c1; ...`, repeatable.
        #[arg(long = "b", allow_hyphen_values = true)]
        b: Vec<String>,
    },
    /// Run the built-in example corpus.
    RunCorpus,
}

fn request(cli: &Cli) -> Result<Request, CliError> {
    let (command, expr) = match &cli.command {
        Cmd::AnalyzeAs { expr } => (Command::AnalyzeAs, Some(expr)),
        Cmd::NormalizeAs { expr } => (Command::NormalizeAs, Some(expr)),
        Cmd::ClassifyKummer { expr } => (Command::ClassifyKummer, Some(expr)),
        Cmd::NormalizeKummer { expr } => (Command::NormalizeKummer, Some(expr)),
        Cmd::VerifyNormIdeal { expr, .. } => (Command::VerifyNormIdeal, Some(expr)),
        Cmd::RunCorpus => (Command::RunCorpus, None),
    };
    let f = &cli.field;
    let flags = FieldFlags {
        field: f.field.clone(),
        p: f.p,
        group: f.group.clone(),
        residue: f.residue.clone(),
        m: f.m,
        with_y: f.with_y,
        precision: f.precision.clone(),
    };
    let mut req = Request::new(command).with_budget(cli.budget);
    req.seed = cli.seed;
    req.expr = expr.cloned();
    if command != Command::RunCorpus {
        req.field = Some(FieldSpec::from_flags(&flags, command.default_field())?);
    }
    if let Cmd::VerifyNormIdeal { samples, b, .. } = &cli.command {
        req.samples = *samples;
        req.b = b.clone();
    }
    Ok(req)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    let outcome = request(&cli).and_then(|req| run(&req));
    match outcome {
        Ok(out) => {
            let text = out.render();
            print!("{text}");
            if let Some(path) = &cli.json {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::from(1);
                }
            }
            ExitCode::from(out.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
