use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;

use commands::Failure;

/// Bruhat-Tits branches, local spinor images and representation fields.
#[derive(Parser)]
#[command(name = "qlat", version)]
struct Cli {
    /// Read the request from this file instead of stdin.
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Write the response to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Indent the JSON response.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    group: Group,
}

#[derive(Subcommand)]
enum Group {
    /// Orders over Z_(p) and their branches.
    Local {
        #[command(subcommand)]
        cmd: LocalCmd,
    },
    /// The Bruhat-Tits tree itself.
    Tree {
        #[command(subcommand)]
        cmd: TreeCmd,
    },
    /// Spinor class fields and representation fields.
    Global {
        #[command(subcommand)]
        cmd: GlobalCmd,
    },
}

#[derive(Subcommand)]
enum LocalCmd {
    /// Symbolic branch S_0 of an order.
    Classify,
    /// Enumerate S_r of an order on a ball and compare with the symbolic shape.
    BranchEnum,
    /// Spinor image for a genus of shifted Eichler orders.
    SpinorImage,
    /// Recover (endpoints, level, shift) of a shifted Eichler order.
    Decompose,
    /// Three maximal orders meeting in a shifted Eichler order.
    ThreeMaximals,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// List a ball of vertices.
    Ball {
        /// Also write the ball as DOT to this file.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Export a ball as DOT.
    Dot {
        /// Write DOT here instead of the response stream.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GlobalCmd {
    /// Degree of the spinor class field of a genus.
    Sigma,
    /// Representation field and selectivity ratio of a suborder.
    RepField,
}

enum Output {
    Json(serde_json::Value),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let mut text = String::new();
    match &cli.input {
        Some(path) => text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?,
        None => {
            std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    let limits = commands::limits_from_env()?;
    let json = match &cli.group {
        Group::Local { cmd } => match cmd {
            LocalCmd::Classify => commands::classify(&text, limits)?,
            LocalCmd::BranchEnum => commands::branch_enum(&text, limits)?,
            LocalCmd::SpinorImage => commands::spinor(&text, limits)?,
            LocalCmd::Decompose => commands::decompose(&text, limits)?,
            LocalCmd::ThreeMaximals => commands::three_maximals(&text)?,
        },
        Group::Tree { cmd } => match cmd {
            TreeCmd::Ball { dot } => {
                let (json, dot_text) = commands::tree_ball(&text, limits)?;
                if let Some(path) = dot {
                    std::fs::write(path, dot_text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                }
                json
            }
            TreeCmd::Dot { dot } => {
                let (_, dot_text) = commands::tree_ball(&text, limits)?;
                match dot {
                    Some(path) => {
                        std::fs::write(path, &dot_text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
                        serde_json::json!({ "written": path.display().to_string() })
                    }
                    None => return Ok(Output::Text(dot_text)),
                }
            }
        },
        Group::Global { cmd } => match cmd {
            GlobalCmd::Sigma => commands::sigma(&text)?,
            GlobalCmd::RepField => commands::rep_field(&text)?,
        },
    };
    Ok(Output::Json(json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|out| {
        let mut body = match out {
            Output::Text(t) => t,
            Output::Json(v) if cli.pretty => serde_json::to_string_pretty(&v).expect("serializable"),
            Output::Json(v) => serde_json::to_string(&v).expect("serializable"),
        };
        if !body.ends_with('\n') {
            body.push('\n');
        }
        match &cli.out {
            Some(path) => std::fs::write(path, body).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
            None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| Failure::Io(e.to_string())),
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qlat: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
