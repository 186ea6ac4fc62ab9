//! The `fuselage` command. [`run`] takes explicit streams so tests can drive
//! it in-process.
//!
//! Exit codes: 0 ok, 1 content failure, 2 usage error.

pub mod play;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand};
use fuselage::analysis::{to_dot, Report, DEFAULT_STATE_BUDGET};
use fuselage::model::{self, StoryGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONTENT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable overriding the analysis state budget.
pub const BUDGET_VAR: &str = "FUSELAGE_STATE_BUDGET";

#[derive(Parser, Debug)]
#[command(name = "fuselage", version, about = "Compile, check, play and serve branching stories")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a story to canonical graph JSON.
    Compile {
        input: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check a story or compiled graph without writing anything.
    Validate { input: PathBuf },
    /// Play a story in the terminal. Type `help` at the prompt for commands.
    Play {
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the save document here on `save` and on exit.
        #[arg(long)]
        save: Option<PathBuf>,
        /// Resume from a save document.
        #[arg(long)]
        load: Option<PathBuf>,
    },
    /// Reachability, dead nodes and ending witnesses.
    Analyze {
        input: PathBuf,
        #[arg(long, conflicts_with = "dot")]
        json: bool,
        /// Print the graph in Graphviz format instead.
        #[arg(long)]
        dot: bool,
    },
    /// Serve stories over HTTP. Each story's id is its file stem.
    Serve {
        #[arg(required = true)]
        stories: Vec<PathBuf>,
        #[arg(short, long, default_value_t = 8080, value_parser = clap::value_parser!(u16).range(1..))]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        /// Directory with the player UI.
        #[arg(long = "static")]
        static_dir: Option<PathBuf>,
        /// Idle seconds before a session is dropped.
        #[arg(long, default_value_t = fuselage_server::DEFAULT_IDLE_TTL.as_secs())]
        idle_ttl: u64,
    },
}

/// Failure carrying the exit code it maps to.
struct Fail(i32);

type Out<'a> = &'a mut dyn Write;

pub fn run<I, T>(args: I, stdin: &mut dyn BufRead, stdout: Out, stderr: Out) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Compile { input, output } => compile(&input, output.as_deref(), stdout, stderr),
        Command::Validate { input } => validate(&input, stdout, stderr),
        Command::Play { input, seed, save, load } => load_story(&input, stderr).and_then(|g| {
            play::play(Arc::new(g), seed, save.as_deref(), load.as_deref(), stdin, stdout, stderr)
        }),
        Command::Analyze { input, json, dot } => analyze(&input, json, dot, stdout, stderr),
        Command::Serve { stories, port, host, static_dir, idle_ttl } => {
            serve(&stories, SocketAddr::new(host, port), static_dir, Duration::from_secs(idle_ttl), stderr)
        }
    };
    let _ = stdout.flush();
    match result {
        Ok(()) => EXIT_OK,
        Err(Fail(code)) => code,
    }
}

fn read(path: &Path, stderr: Out) -> Result<Vec<u8>, Fail> {
    std::fs::read(path).map_err(|e| {
        let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
        Fail(EXIT_USAGE)
    })
}

fn is_compiled(path: &Path, bytes: &[u8]) -> bool {
    path.extension().is_some_and(|e| e == "json") || bytes.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'{')
}

/// Loads a `.story` source or a compiled graph, reporting problems on `stderr`.
pub fn load_graph(path: &Path, stderr: Out) -> Result<StoryGraph, i32> {
    load_story(path, stderr).map_err(|Fail(c)| c)
}

fn load_story(path: &Path, stderr: Out) -> Result<StoryGraph, Fail> {
    let bytes = read(path, stderr)?;
    if is_compiled(path, &bytes) {
        return model::decode(&bytes).map_err(|e| {
            let _ = writeln!(stderr, "{}: {e}", path.display());
            if let model::ModelError::InvalidGraph(diags) = e {
                for d in diags {
                    let _ = writeln!(stderr, "{d}");
                }
            }
            Fail(EXIT_CONTENT)
        });
    }
    let Ok(source) = String::from_utf8(bytes) else {
        let _ = writeln!(stderr, "error: {} is not UTF-8", path.display());
        return Err(Fail(EXIT_CONTENT));
    };
    match fuselage::compile::compile_named(&path.display().to_string(), &source) {
        Ok(c) => {
            for w in &c.warnings {
                let _ = writeln!(stderr, "{w}");
            }
            Ok(c.graph)
        }
        Err(diags) => {
            for d in &diags {
                let _ = writeln!(stderr, "{d}");
            }
            Err(Fail(EXIT_CONTENT))
        }
    }
}

fn compile(input: &Path, output: Option<&Path>, stdout: Out, stderr: Out) -> Result<(), Fail> {
    let graph = load_story(input, stderr)?;
    let bytes = model::encode(&graph).map_err(|e| {
        let _ = writeln!(stderr, "{e}");
        Fail(EXIT_CONTENT)
    })?;
    match output {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            Fail(EXIT_USAGE)
        }),
        None => stdout.write_all(&bytes).map_err(|_| Fail(EXIT_CONTENT)),
    }
}

fn validate(input: &Path, stdout: Out, stderr: Out) -> Result<(), Fail> {
    let graph = load_story(input, stderr)?;
    let _ = writeln!(stdout, "ok: {} nodes, {} endings", graph.nodes.len(), graph.endings().len());
    Ok(())
}

fn budget(stderr: Out) -> Result<usize, Fail> {
    match std::env::var(BUDGET_VAR) {
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
        Ok(v) => v.trim().parse::<usize>().ok().filter(|b| *b > 0).ok_or_else(|| {
            let _ = writeln!(stderr, "error: {BUDGET_VAR} must be a positive integer, got `{v}`");
            Fail(EXIT_USAGE)
        }),
    }
}

fn analyze(input: &Path, json: bool, dot: bool, stdout: Out, stderr: Out) -> Result<(), Fail> {
    let budget = budget(stderr)?;
    let graph = load_story(input, stderr)?;
    if dot {
        let _ = stdout.write_all(to_dot(&graph).as_bytes());
        return Ok(());
    }
    let report = Report::build(&graph, budget).map_err(|e| {
        let _ = writeln!(stderr, "error: {e}");
        Fail(EXIT_CONTENT)
    })?;
    let text = if json { report.to_json() + "\n" } else { report.to_table(&graph) };
    let _ = stdout.write_all(text.as_bytes());
    if report.is_clean() {
        Ok(())
    } else {
        Err(Fail(EXIT_CONTENT))
    }
}

/// `mask.story` and `mask.storyc.json` both become `mask`.
pub fn story_id(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.split('.').next().unwrap_or_default().to_string()
}

fn serve(paths: &[PathBuf], addr: SocketAddr, static_dir: Option<PathBuf>, idle_ttl: Duration, stderr: Out) -> Result<(), Fail> {
    let mut stories = BTreeMap::new();
    for path in paths {
        let id = story_id(path);
        let graph = load_story(path, stderr)?;
        if stories.insert(id.clone(), Arc::new(graph)).is_some() {
            let _ = writeln!(stderr, "error: two stories share the id `{id}`");
            return Err(Fail(EXIT_USAGE));
        }
    }
    let _ = writeln!(stderr, "serving {} story(ies) on http://{addr}", stories.len());
    let runtime = tokio::runtime::Runtime::new().map_err(|e| {
        let _ = writeln!(stderr, "error: {e}");
        Fail(EXIT_CONTENT)
    })?;
    let config = fuselage_server::Config { idle_ttl, static_dir };
    runtime.block_on(fuselage_server::serve(stories, addr, config)).map_err(|e| {
        let _ = writeln!(stderr, "error: {e}");
        Fail(EXIT_CONTENT)
    })
}
