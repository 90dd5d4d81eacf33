use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use freediv::job::{parse_job_with, run, Command, JobSpec, ResultRecord};
use freediv::{Error, OrderKind};

#[derive(Parser)]
#[command(
    name = "freediv",
    version,
    about = "Exact computations with free and almost free divisors"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Overrides the job's degree bound (default 20).
    #[arg(long, global = true)]
    degree_bound: Option<i64>,
    #[arg(long, global = true, value_enum)]
    order: Option<OrderArg>,
    /// Seed for randomized checks (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: Output,
    /// Adds wall-clock time to the record.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Wdegrevlex,
    Lex,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(clap::Args)]
struct Input {
    /// Job file.
    #[arg(long)]
    input: PathBuf,
}

#[derive(Subcommand)]
enum Cmd {
    IsFree(Input),
    Derlog(Input),
    SaitoCheck(Input),
    OmegaCheck(Input),
    DeRhamCheck(Input),
    TorsionLength(Input),
    KevCodim(Input),
    T1Log(Input),
    CriticalIdeal(Input),
    MuE(Input),
    AeCodim(Input),
    FittingReduced(Input),
    /// Runs the command named inside the job file.
    Run(Input),
    /// Runs every `*.job` file of a directory in name order.
    Batch {
        dir: PathBuf,
        /// Writes `<name>.json` records here instead of printing them.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn apply(mut job: JobSpec, c: &Common) -> JobSpec {
    if let Some(d) = c.degree_bound {
        job.options.degree_bound = d;
    }
    if let Some(o) = c.order {
        job.options.order = match o {
            OrderArg::Wdegrevlex => OrderKind::WDegRevLex,
            OrderArg::Lex => OrderKind::Lex,
        };
    }
    if let Some(s) = c.seed {
        job.options.seed = s;
    }
    job
}

fn load(path: &Path, command: Option<Command>, c: &Common) -> Result<JobSpec, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
        line: 0,
        column: 0,
        message: format!("cannot read {}: {}", path.display(), e),
    })?;
    parse_job_with(&text, command).map(|j| apply(j, c))
}

fn render(r: &ResultRecord, out: Output) -> String {
    match out {
        Output::Json => r.to_json_string(),
        Output::Text => r.to_text_string(),
    }
}

fn single(input: &Input, command: Option<Command>, c: &Common) -> ExitCode {
    match load(&input.input, command, c) {
        Ok(job) => {
            let r = run(&job, c.timing);
            print!("{}", render(&r, c.output));
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("freediv: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn batch(dir: &Path, out: Option<&Path>, c: &Common) -> ExitCode {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "job"))
            .collect(),
        Err(e) => {
            eprintln!("freediv: cannot read {}: {}", dir.display(), e);
            return ExitCode::from(2);
        }
    };
    files.sort();
    let mut worst = 0;
    for f in files {
        let (code, text) = match load(&f, None, c) {
            Ok(job) => {
                let r = run(&job, c.timing);
                (r.exit_code(), render(&r, c.output))
            }
            Err(e) => (e.exit_code(), format!("{}\n", e)),
        };
        worst = worst.max(code);
        match out {
            Some(d) => {
                let name = f.file_stem().unwrap().to_string_lossy().into_owned();
                let ext = if c.output == Output::Json { "json" } else { "txt" };
                if let Err(e) =
                    std::fs::create_dir_all(d).and_then(|_| std::fs::write(d.join(format!("{}.{}", name, ext)), &text))
                {
                    eprintln!("freediv: {}", e);
                    return ExitCode::from(5);
                }
            }
            None => print!("{}", text),
        }
    }
    ExitCode::from(worst as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = &cli.common;
    let (input, cmd) = match &cli.command {
        Cmd::IsFree(i) => (i, Command::IsFree),
        Cmd::Derlog(i) => (i, Command::Derlog),
        Cmd::SaitoCheck(i) => (i, Command::SaitoCheck),
        Cmd::OmegaCheck(i) => (i, Command::OmegaCheck),
        Cmd::DeRhamCheck(i) => (i, Command::DeRhamCheck),
        Cmd::TorsionLength(i) => (i, Command::TorsionLength),
        Cmd::KevCodim(i) => (i, Command::KevCodim),
        Cmd::T1Log(i) => (i, Command::T1Log),
        Cmd::CriticalIdeal(i) => (i, Command::CriticalIdeal),
        Cmd::MuE(i) => (i, Command::MuE),
        Cmd::AeCodim(i) => (i, Command::AeCodim),
        Cmd::FittingReduced(i) => (i, Command::FittingReduced),
        Cmd::Run(i) => return single(i, None, c),
        Cmd::Batch { dir, out } => return batch(dir, out.as_deref(), c),
    };
    single(input, Some(cmd), c)
}
