use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use graded_tannaka::document::{bundled_text, CertBundle, DocError, Workspace};
use graded_tannaka::report::{run, Method, Options};

#[derive(Parser)]
#[command(name = "tannaka", version, about = "Exact computations with graded fiber functors on presented tensor categories")]
struct Cli {
    /// Roof search depth for hom queries.
    #[arg(long, global = true, default_value_t = 2)]
    depth: usize,
    /// Comma-separated labels replacing the document window.
    #[arg(long, global = true, value_delimiter = ',')]
    window: Option<Vec<String>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Lefschetz,
    Semisimple,
}

/// DOCUMENT is a file path or the name of a bundled dataset.
#[derive(Subcommand)]
enum Cmd {
    /// Check the presentation, functor, covers and motive data.
    Validate { document: String },
    /// Certified and upper bounds for Hom([F], [G]).
    Hom { document: String, src: Option<String>, tgt: Option<String> },
    /// Fiber dimensions of [F].
    Fiber { document: String, object: Option<String> },
    /// Künneth projectors of a motive.
    Split {
        document: String,
        motive: Option<String>,
        #[arg(long, value_enum, default_value_t = SplitArg::Lefschetz)]
        method: SplitArg,
    },
    /// Sign-twisted symmetry on the purity window.
    Twist { document: String },
    /// Run an invariant suite, or all of them.
    Check {
        document: String,
        #[arg(long)]
        suite: Option<String>,
    },
    /// Replay the certificates of a machine report against the document.
    Replay { document: String, report: Option<String> },
}

fn read(path: &str) -> Result<String, String> {
    match std::fs::read_to_string(path) {
        Ok(s) => Ok(s),
        Err(e) => bundled_text(path).map(str::to_string).ok_or_else(|| format!("{path}: {e}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut opts = Options { depth: cli.depth, ..Options::default() };
    let (doc, verb, args): (&String, &str, Vec<String>) = match &cli.cmd {
        Cmd::Validate { document } => (document, "validate", vec![]),
        Cmd::Hom { document, src, tgt } => (document, "hom", src.iter().chain(tgt).cloned().collect()),
        Cmd::Fiber { document, object } => (document, "fiber", object.iter().cloned().collect()),
        Cmd::Split { document, motive, method } => {
            opts.method = match method {
                SplitArg::Lefschetz => Method::Lefschetz,
                SplitArg::Semisimple => Method::Semisimple,
            };
            (document, "split", motive.iter().cloned().collect())
        }
        Cmd::Twist { document } => (document, "twist", vec![]),
        Cmd::Check { document, suite } => (document, "check", suite.iter().cloned().collect()),
        Cmd::Replay { document, .. } => (document, "replay", vec![]),
    };
    let input_error = |e: String| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    };
    let text = match read(doc) {
        Ok(t) => t,
        Err(e) => return input_error(e),
    };
    if let Cmd::Replay { report, .. } = &cli.cmd {
        let src = match report {
            Some(p) => read(p),
            None => Ok(text.clone()),
        };
        match src.and_then(|t| CertBundle::from_report(&t)) {
            Ok(b) => opts.bundle = Some(b),
            Err(e) => return input_error(e),
        }
    }
    let ws = Workspace::parse(&text).and_then(|mut ws| {
        if let Some(w) = &cli.window {
            ws.set_window(w)?;
        }
        Ok(ws)
    });
    let report = ws.and_then(|ws| run(&ws, verb, &args, &opts).map(|r| (ws, r)));
    match report {
        Ok((ws, r)) => {
            match cli.format {
                Format::Human => print!("{}", r.human()),
                Format::Machine => print!("{}", r.machine(&ws)),
            }
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e @ DocError::Parse { .. }) => input_error(format!("{doc}: {e}")),
        Err(e) => input_error(e.to_string()),
    }
}
