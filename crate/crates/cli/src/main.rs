//! `lcy`: validate construction scripts, replay the bundled fixtures, and
//! emit deterministic reports.
//!
//! Exit codes: 0 success, 1 expectation failure, 2 script or validation
//! error, 3 I/O error or unknown fixture.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lcy_core::replay::{
    builtin_fixtures, document, elaborate_fixture, evaluate_expectations, run_fixture, Fixture,
    ReplayError,
};
use lcy_core::report::{ReportDocument, RootSearchSection};

#[derive(Parser)]
#[command(name = "lcy", version, about = "log Calabi-Yau surface construction calculator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct OutputArgs {
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
    /// Write the report to a file instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, elaborate and evaluate one script.
    Check {
        /// Path to a `.lcy` script.
        path: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Treat warnings as errors.
        #[arg(long)]
        strict: bool,
        /// Include root-enumeration diagnostics (blow-up count <= 8).
        #[arg(long)]
        root_search: bool,
    },
    /// Run bundled fixtures and check their expectations.
    Replay {
        /// Run every bundled fixture.
        #[arg(long, conflicts_with = "fixture")]
        all: bool,
        /// Run a single fixture by name.
        #[arg(long, value_name = "NAME")]
        fixture: Option<String>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List the bundled fixtures with their provenance.
    ListFixtures {
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Check {
            path,
            output,
            strict,
            root_search,
        } => cmd_check(&path, &output, strict, root_search),
        Command::Replay {
            all,
            fixture,
            output,
        } => cmd_replay(all, fixture.as_deref(), &output),
        Command::ListFixtures { output } => cmd_list_fixtures(&output),
    }
}

fn emit(output: &OutputArgs, text: String) -> ExitCode {
    match &output.out {
        None => {
            print!("{}", text);
            ExitCode::SUCCESS
        }
        Some(path) => match std::fs::File::create(path).and_then(|mut f| f.write_all(text.as_bytes())) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                ExitCode::from(3)
            }
        },
    }
}

fn with_exit(output: &OutputArgs, text: String, code: u8) -> ExitCode {
    let written = emit(output, text);
    if written != ExitCode::SUCCESS {
        return written;
    }
    ExitCode::from(code)
}

fn render(doc: &ReportDocument, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(doc).expect("serializable");
        s.push('\n');
        return s;
    }
    let mut s = String::new();
    use std::fmt::Write as _;
    writeln!(s, "{}", doc.name).unwrap();
    writeln!(
        s,
        "  surface: {} blow-ups, rank {}",
        doc.surface.blowups, doc.surface.rank
    )
    .unwrap();
    for c in &doc.surface.curves {
        writeln!(
            s,
            "    curve {} = {}  self {}  K {}",
            c.name, c.class, c.self_intersection, c.k_intersection
        )
        .unwrap();
    }
    if !doc.surface.contracted.is_empty() {
        writeln!(s, "    contracted: {}", doc.surface.contracted.join(" ")).unwrap();
    }
    let boundary: Vec<String> = doc
        .pair
        .boundary
        .iter()
        .map(|b| format!("{}:{}", b.class, b.coefficient))
        .collect();
    writeln!(s, "  boundary: {}", if boundary.is_empty() { "(empty)".into() } else { boundary.join(" + ") }).unwrap();
    writeln!(
        s,
        "  pair: index-one {}  complexity {}  coregularity {}  dual-complex {}",
        doc.pair.index_one,
        doc.pair.complexity,
        doc.pair
            .coregularity
            .map(|c| c.to_string())
            .unwrap_or_else(|| "-".into()),
        doc.pair.dual_complex.clone().unwrap_or_else(|| "-".into())
    )
    .unwrap();
    writeln!(s, "  singularities: {}", doc.singularities).unwrap();
    for m in &doc.maps {
        writeln!(
            s,
            "  map {}: ted {}  crepant {}  exceptional [{}]",
            m.name,
            m.ted,
            m.crepant,
            m.exceptional.join(" ")
        )
        .unwrap();
    }
    for e in &doc.expectations {
        writeln!(
            s,
            "  [{}] {}: expected {}, got {}",
            if e.pass { "pass" } else { "FAIL" },
            e.expectation,
            e.expected,
            e.actual
        )
        .unwrap();
    }
    for w in &doc.warnings {
        writeln!(s, "  warning: {}", w).unwrap();
    }
    if let Some(r) = &doc.root_search {
        writeln!(s, "  roots at n={}: {}", r.blowups, r.roots).unwrap();
    }
    s
}

fn cmd_check(path: &PathBuf, output: &OutputArgs, strict: bool, root_search: bool) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {}", path.display(), e);
            return ExitCode::from(3);
        }
    };
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "script".into());
    let fixture = Fixture {
        name: name.clone(),
        script: text,
        provenance: String::new(),
    };
    let elab = match elaborate_fixture(&fixture) {
        Ok(e) => e,
        Err(ReplayError::Parse(errs)) => {
            for e in errs {
                eprintln!("{}: {}", path.display(), e);
            }
            return ExitCode::from(2);
        }
        Err(ReplayError::Elaborate(e)) => {
            eprintln!("{}: {}", path.display(), e);
            return ExitCode::from(2);
        }
    };
    let violations = elab.pair.validate();
    if !violations.is_empty() {
        for v in &violations {
            eprintln!("{}: validation: {}", path.display(), v);
        }
        return ExitCode::from(2);
    }
    if strict && !elab.warnings.is_empty() {
        for w in &elab.warnings {
            eprintln!("{}: warning treated as error: {}", path.display(), w);
        }
        return ExitCode::from(2);
    }
    let entries = evaluate_expectations(&elab);
    let mut doc = document(&name, &elab, &entries);
    if root_search {
        let n = elab.pair.surface.blowup_count();
        if n <= 8 {
            if let Ok(roots) = lcy_core::enumerate_roots(n) {
                doc.root_search = Some(RootSearchSection {
                    blowups: n,
                    roots: roots.len(),
                });
            }
        }
    }
    let code = if entries.iter().all(|e| e.pass) { 0 } else { 1 };
    with_exit(output, render(&doc, output.json), code)
}

fn cmd_replay(all: bool, fixture: Option<&str>, output: &OutputArgs) -> ExitCode {
    let fixtures = builtin_fixtures();
    let selected: Vec<&Fixture> = if all || fixture.is_none() {
        fixtures.iter().collect()
    } else {
        let name = fixture.expect("checked");
        match fixtures.iter().find(|f| f.name == name) {
            Some(f) => vec![f],
            None => {
                eprintln!("error: unknown fixture `{}`", name);
                return ExitCode::from(3);
            }
        }
    };
    let mut text = String::new();
    let mut docs = Vec::new();
    let mut all_pass = true;
    use std::fmt::Write as _;
    for f in selected {
        match run_fixture(f) {
            Ok(report) => {
                let pass = report.passed();
                all_pass &= pass;
                if output.json {
                    let elab = elaborate_fixture(f).expect("ran once already");
                    docs.push(document(&f.name, &elab, &report.entries));
                } else {
                    writeln!(
                        text,
                        "[{}] {} ({} checks)",
                        if pass { "pass" } else { "FAIL" },
                        f.name,
                        report.entries.len()
                    )
                    .unwrap();
                    for e in report.entries.iter().filter(|e| !e.pass) {
                        writeln!(
                            text,
                            "       {}: expected {}, got {}",
                            e.label, e.expected, e.actual
                        )
                        .unwrap();
                    }
                }
            }
            Err(err) => {
                all_pass = false;
                writeln!(text, "[FAIL] {}: {}", f.name, err).unwrap();
            }
        }
    }
    if output.json {
        let mut s = serde_json::to_string_pretty(&docs).expect("serializable");
        s.push('\n');
        text = s;
    }
    with_exit(output, text, if all_pass { 0 } else { 1 })
}

fn cmd_list_fixtures(output: &OutputArgs) -> ExitCode {
    let fixtures = builtin_fixtures();
    let text = if output.json {
        let list: Vec<serde_json::Value> = fixtures
            .iter()
            .map(|f| {
                serde_json::json!({
                    "name": f.name,
                    "provenance": f.provenance,
                })
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&list).expect("serializable");
        s.push('\n');
        s
    } else {
        let mut s = String::new();
        use std::fmt::Write as _;
        for f in &fixtures {
            writeln!(s, "{} — {}", f.name, f.provenance).unwrap();
        }
        s
    };
    emit(output, text)
}
