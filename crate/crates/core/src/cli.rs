//! The `automath` command line.
//!
//! Exit codes: 0 ok, 1 check or coherence failure, 2 parse error,
//! 3 I/O error, 4 bad usage.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::book::{Book, BookError, BookErrorKind};
use crate::clean::clean_book;
use crate::kernel::KernelConfig;
use crate::syntax::{print_book, print_line, Dialect, Notation};
use crate::translate::{book_of_env, parse_denv, print_denv, DenvError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_USAGE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "automath", version, about = "Type checker for Automath books")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check one or more books.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value = "original")]
        dialect: Dialect,
        /// Admit η in conversion.
        #[arg(long)]
        eta: bool,
        /// Print each line with the judgement checked for it.
        #[arg(long)]
        emit_obligations: bool,
        /// Print line counts and reduction counters.
        #[arg(long)]
        stats: bool,
        /// Print a JSON report per file instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Print the book without dead-end assumption lines.
    Clean {
        file: PathBuf,
        #[arg(long, default_value = "original")]
        dialect: Dialect,
    },
    /// Print the environment of a book in `.denv` format.
    ToEnv {
        file: PathBuf,
        #[arg(long, default_value = "original")]
        dialect: Dialect,
    },
    /// Print the book of a `.denv` environment.
    FromEnv {
        file: PathBuf,
        #[arg(long, default_value = "original")]
        dialect: Dialect,
    },
}

/// Runs the command line with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Check { files, dialect, eta, emit_obligations, stats, json } => {
            let opts = CheckOpts { dialect, eta, emit_obligations, stats, json };
            files.iter().map(|f| io.check(f, &opts)).max().unwrap_or(EXIT_OK)
        }
        Command::Clean { file, dialect } => io.clean(&file, dialect),
        Command::ToEnv { file, dialect } => io.to_env(&file, dialect),
        Command::FromEnv { file, dialect } => io.from_env(&file, dialect),
    }
}

struct CheckOpts {
    dialect: Dialect,
    eta: bool,
    emit_obligations: bool,
    stats: bool,
    json: bool,
}

fn notation(d: Dialect) -> Notation {
    match d {
        Dialect::Original => Notation::Original,
        Dialect::Modern => Notation::Modern,
    }
}

fn exit_code(e: &BookError) -> i32 {
    match e.kind {
        BookErrorKind::Parse(_) => EXIT_PARSE,
        _ => EXIT_CHECK,
    }
}

fn message(e: &BookError) -> String {
    match &e.kind {
        BookErrorKind::Parse(p) => p.message.clone(),
        k => k.to_string(),
    }
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn read(&mut self, path: &Path) -> Result<String, i32> {
        std::fs::read_to_string(path).map_err(|e| {
            let _ = writeln!(self.err, "{}: error[Io]: {e}", path.display());
            EXIT_IO
        })
    }

    fn report_error(&mut self, path: &Path, e: &BookError) {
        let _ = writeln!(self.err, "{}:{}: error[{}]: {}", path.display(), e.loc, e.class(), message(e));
        if let Some(j) = &e.judgement {
            let _ = writeln!(self.err, "  {j}");
        }
    }

    fn load(&mut self, path: &Path, dialect: Dialect, cfg: KernelConfig) -> Result<Book, i32> {
        let text = self.read(path)?;
        Book::check_text(&text, dialect, cfg).map_err(|e| {
            self.report_error(path, &e);
            exit_code(&e)
        })
    }

    fn check(&mut self, path: &Path, opts: &CheckOpts) -> i32 {
        let text = match self.read(path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let cfg = KernelConfig::default().with_eta(opts.eta);
        let result = Book::check_text(&text, opts.dialect, cfg);
        if opts.json {
            let report = json_report(path, &result, opts);
            let _ = writeln!(self.out, "{report}");
            if let Err(e) = &result {
                self.report_error(path, e);
            }
            return result.as_ref().map_or_else(exit_code, |_| EXIT_OK);
        }
        match result {
            Ok(book) => {
                if opts.emit_obligations {
                    for (line, ob) in book.lines().iter().zip(book.obligations()) {
                        let _ = writeln!(self.out, "{}", print_line(line, notation(opts.dialect)));
                        let _ = writeln!(self.out, "{}", book.render_obligation(ob));
                    }
                }
                if opts.stats {
                    let c = book.counts();
                    let r = book.counters();
                    let s = book.elab_stats();
                    let _ = writeln!(
                        self.out,
                        "assumptions: {}\ndefinitions: {}\nprimitives: {}\ntotal: {}\nbeta: {}\ndelta: {}\neta: {}\nread as pi: {}\nread as lambda: {}",
                        c.assumptions, c.definitions, c.primitives, c.total, r.beta, r.delta, r.eta, s.pi, s.lam
                    );
                }
                let _ = writeln!(self.out, "{}: ok ({} lines)", path.display(), book.len());
                EXIT_OK
            }
            Err(e) => {
                self.report_error(path, &e);
                let _ = writeln!(self.out, "{}: failed at line {}", path.display(), e.loc.line);
                exit_code(&e)
            }
        }
    }

    fn clean(&mut self, path: &Path, dialect: Dialect) -> i32 {
        let book = match self.load(path, dialect, KernelConfig::default()) {
            Ok(b) => b,
            Err(code) => return code,
        };
        let report = clean_book(&book);
        let _ = write!(self.out, "{}", print_book(&report.result, notation(dialect)));
        for (pos, id, round) in &report.removed {
            let line = book.lines()[*pos].loc.line;
            let _ = writeln!(self.out, "# removed {id} (line {line}, round {round})");
        }
        EXIT_OK
    }

    fn to_env(&mut self, path: &Path, dialect: Dialect) -> i32 {
        match self.load(path, dialect, KernelConfig::default()) {
            Ok(book) => {
                let _ = write!(self.out, "{}", print_denv(book.env()));
                EXIT_OK
            }
            Err(code) => code,
        }
    }

    fn from_env(&mut self, path: &Path, dialect: Dialect) -> i32 {
        let text = match self.read(path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        let env = match parse_denv(&text) {
            Ok(env) => env,
            Err(e) => {
                let msg = match &e {
                    DenvError::Parse(p) => p.message.clone(),
                    DenvError::Elab { error, .. } => error.to_string(),
                };
                let _ = writeln!(self.err, "{}:{}: error[{}]: {msg}", path.display(), e.loc(), e.class());
                return if matches!(e, DenvError::Parse(_)) { EXIT_PARSE } else { EXIT_CHECK };
            }
        };
        match book_of_env(&env) {
            Ok(book) => {
                let _ = write!(self.out, "{}", print_book(&book, notation(dialect)));
                EXIT_OK
            }
            Err(e) => {
                let _ = writeln!(self.err, "{}: error[IllegalEnv]: {e}", path.display());
                EXIT_CHECK
            }
        }
    }
}

fn json_report(path: &Path, result: &Result<Book, BookError>, opts: &CheckOpts) -> Value {
    let mut report = json!({ "file": path.display().to_string() });
    match result {
        Ok(book) => {
            let lines: Vec<Value> = book
                .lines()
                .iter()
                .map(|l| json!({ "line": l.loc.line, "identifier": l.identifier.as_str(), "kind": l.kind() }))
                .collect();
            report["verdict"] = json!("ok");
            report["error"] = Value::Null;
            report["counts"] = json!(book.counts());
            report["counters"] = json!(book.counters());
            report["elaboration"] = json!(book.elab_stats());
            report["lines"] = json!(lines);
            if opts.emit_obligations {
                let obs: Vec<String> = book.obligations().iter().map(|o| book.render_obligation(o)).collect();
                report["obligations"] = json!(obs);
            }
        }
        Err(e) => {
            report["verdict"] = json!("failed");
            report["error"] = json!({
                "class": e.class(),
                "message": message(e),
                "line": e.loc.line,
                "col": e.loc.col,
                "judgement": e.judgement,
            });
        }
    }
    report
}
