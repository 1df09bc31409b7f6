//! Command-line front end for the operator verifier.
//!
//! Exit codes: 0 success, 1 verification/necessity failure, 2 parse or
//! usage error (including unknown catalog names), 3 internal error.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use hamcheck_core::ansatz::{self, Refutation};
use hamcheck_core::catalog;
use hamcheck_core::conditions::{verify_named, CheckOptions};
use hamcheck_core::dsl;
use hamcheck_core::report::Report;

#[derive(Parser)]
#[command(
    name = "hamcheck",
    version,
    about = "Exact Hamiltonianity checks for non-homogeneous hydrodynamic-type operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone)]
struct OutputOpts {
    /// Emit the machine-readable JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct VerifyOpts {
    /// Restrict checks to condition groups (W, M or C); repeatable.
    #[arg(long = "family", value_parser = ["W", "M", "C"])]
    families: Vec<String>,
    /// Generate the full index ranges instead of symmetry-reduced tuples.
    #[arg(long)]
    full_range: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify an operator file (`.hop`).
    Verify {
        path: PathBuf,
        #[command(flatten)]
        out: OutputOpts,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Browse, verify or export the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
    /// Run the recorded necessity fixtures for an entry, or a fixture file.
    Necessity {
        /// Catalog entry name (omit when using --fixture).
        name: Option<String>,
        /// A `.hop` file with a `perturb { ... }` block.
        #[arg(long)]
        fixture: Option<PathBuf>,
        /// Additionally try this many random off-family directions.
        #[arg(long)]
        fuzz: Option<usize>,
        /// Seed for --fuzz.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        out: OutputOpts,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    /// List all entries with section anchors and rank classes.
    List {
        #[command(flatten)]
        out: OutputOpts,
    },
    /// Verify one entry (all of its family cases) or the whole catalog.
    Verify {
        name: Option<String>,
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        out: OutputOpts,
        #[command(flatten)]
        opts: VerifyOpts,
    },
    /// Write an entry (a chosen family case) as a `.hop` file.
    Export {
        name: String,
        /// Case index (default 0; see `catalog list` for counts).
        #[arg(long, default_value_t = 0)]
        case: usize,
        /// Output path (defaults to `<NAME>.hop`).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn check_options(v: &VerifyOpts) -> CheckOptions {
    CheckOptions {
        full_range: v.full_range,
        groups: v
            .families
            .iter()
            .map(|s| s.chars().next().unwrap())
            .collect(),
        ..CheckOptions::default()
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            3
        }
    };
    ExitCode::from(code)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Cmd::Verify { path, out, opts } => cmd_verify(&path, &out, &opts),
        Cmd::Catalog { action } => match action {
            CatalogCmd::List { out } => cmd_catalog_list(&out),
            CatalogCmd::Verify {
                name,
                all,
                out,
                opts,
            } => cmd_catalog_verify(name.as_deref(), all, &out, &opts),
            CatalogCmd::Export { name, case, output } => {
                cmd_catalog_export(&name, case, output.as_deref())
            }
        },
        Cmd::Necessity {
            name,
            fixture,
            fuzz,
            seed,
            out,
        } => cmd_necessity(name.as_deref(), fixture.as_deref(), fuzz, seed, &out),
    }
}

fn read_unit(path: &std::path::Path) -> Result<dsl::ParsedUnit, (String, u8)> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return Err((format!("{}: {e}", path.display()), 2)),
    };
    match dsl::parse(&text) {
        Ok(u) => Ok(u),
        Err(e) => Err((format!("{}:{e}", path.display()), 2)),
    }
}

fn cmd_verify(path: &std::path::Path, out: &OutputOpts, opts: &VerifyOpts) -> Result<u8, String> {
    let parsed = match read_unit(path) {
        Ok(x) => x,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return Ok(code);
        }
    };
    let started = Instant::now();
    let target = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "operator".into());
    let report = verify_named(&parsed.spec, &check_options(opts), &target);
    let rep = Report::from_conditions(&report, &parsed.spec.space, started.elapsed().as_millis());
    if out.json {
        println!("{}", rep.to_json());
    } else {
        print!("{}", rep.to_text());
    }
    Ok(if rep.hamiltonian { 0 } else { 1 })
}

fn cmd_catalog_list(out: &OutputOpts) -> Result<u8, String> {
    if out.json {
        let rows: Vec<serde_json::Value> = catalog::all()
            .iter()
            .map(|e| {
                serde_json::json!({
                    "name": e.name,
                    "section": e.section,
                    "rank_class": e.rank_class,
                    "cases": e.cases.len(),
                    "notes": e.notes,
                })
            })
            .collect();
        println!("{}", serde_json::to_string_pretty(&rows).unwrap());
    } else {
        for e in catalog::all() {
            println!(
                "{:<12} {:<28} {:<38} {} case{}",
                e.name,
                e.rank_class,
                e.section,
                e.cases.len(),
                if e.cases.len() == 1 { "" } else { "s" }
            );
        }
    }
    Ok(0)
}

/// Verify the family cases of one entry; returns per-case reports.
fn entry_reports(entry: &catalog::CatalogEntry, opts: &CheckOptions) -> Vec<Report> {
    entry
        .cases
        .iter()
        .map(|case| {
            let started = Instant::now();
            let rep = entry.verify_case(case, opts);
            Report::from_conditions(&rep, &entry.op.space, started.elapsed().as_millis())
        })
        .collect()
}

fn thread_cap() -> usize {
    std::env::var("HAMCHECK_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

fn cmd_catalog_verify(
    name: Option<&str>,
    all: bool,
    out: &OutputOpts,
    vopts: &VerifyOpts,
) -> Result<u8, String> {
    let opts = check_options(vopts);
    let entries: Vec<&'static catalog::CatalogEntry> = if all {
        catalog::all().iter().collect()
    } else {
        let name = match name {
            Some(n) => n,
            None => {
                eprintln!("error: give an entry name or --all");
                return Ok(2);
            }
        };
        match catalog::get(name) {
            Some(e) => vec![e],
            None => {
                eprintln!("error: unknown catalog entry `{name}`");
                return Ok(2);
            }
        }
    };
    // verify entries concurrently, assemble output in catalog order
    let threads = thread_cap().min(entries.len()).max(1);
    let mut slots: Vec<Option<Vec<Report>>> = vec![None; entries.len()];
    if threads <= 1 {
        for (ix, e) in entries.iter().enumerate() {
            slots[ix] = Some(entry_reports(e, &opts));
        }
    } else {
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots_mutex = std::sync::Mutex::new(&mut slots);
        std::thread::scope(|scope| {
            for _ in 0..threads {
                scope.spawn(|| loop {
                    let ix = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if ix >= entries.len() {
                        break;
                    }
                    let result = entry_reports(entries[ix], &opts);
                    slots_mutex.lock().unwrap()[ix] = Some(result);
                });
            }
        });
    }
    let mut ok = true;
    let mut flat = Vec::new();
    for s in slots {
        for rep in s.expect("every entry processed") {
            ok &= rep.hamiltonian;
            flat.push(rep);
        }
    }
    if out.json {
        println!("{}", serde_json::to_string_pretty(&flat).unwrap());
    } else {
        for rep in &flat {
            print!("{}", rep.to_text());
        }
        println!(
            "{}: {}/{} cases pass",
            if ok { "PASS" } else { "FAIL" },
            flat.iter().filter(|r| r.hamiltonian).count(),
            flat.len()
        );
    }
    Ok(if ok { 0 } else { 1 })
}

fn cmd_catalog_export(
    name: &str,
    case: usize,
    output: Option<&std::path::Path>,
) -> Result<u8, String> {
    let entry = match catalog::get(name) {
        Some(e) => e,
        None => {
            eprintln!("error: unknown catalog entry `{name}`");
            return Ok(2);
        }
    };
    let Some(fam) = entry.cases.get(case) else {
        eprintln!(
            "error: `{}` has {} case(s); index {case} is out of range",
            entry.name,
            entry.cases.len()
        );
        return Ok(2);
    };
    let spec = fam.instantiate(&entry.op);
    let text = dsl::print(&spec);
    let path = output
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(format!("{}.hop", entry.name)));
    std::fs::write(&path, &text).map_err(|e| format!("{}: {e}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(0)
}

#[derive(serde::Serialize)]
struct NecessityReport {
    version: &'static str,
    input: String,
    forced: Vec<ForcedRecord>,
    expected_missing: Vec<String>,
    perturbations: Vec<PerturbRecord>,
    pass: bool,
    timing_ms: u128,
}

#[derive(serde::Serialize)]
struct ForcedRecord {
    atom: String,
    witness: String,
}

#[derive(serde::Serialize)]
struct PerturbRecord {
    label: String,
    refuted_by: Option<String>,
}

fn cmd_necessity(
    name: Option<&str>,
    fixture: Option<&std::path::Path>,
    fuzz: Option<usize>,
    seed: u64,
    out: &OutputOpts,
) -> Result<u8, String> {
    if let Some(path) = fixture {
        return cmd_necessity_fixture(path, out);
    }
    let name = match name {
        Some(n) => n,
        None => {
            eprintln!("error: give a catalog entry name or --fixture <path>");
            return Ok(2);
        }
    };
    let entry = match catalog::get(name) {
        Some(e) => e,
        None => {
            eprintln!("error: unknown catalog entry `{name}`");
            return Ok(2);
        }
    };
    let started = Instant::now();
    let space = &entry.op.space;
    let atom_text =
        |a: &hamcheck_core::Atom| dsl::expr_text(&hamcheck_core::Expr::atom(a.clone()), space);

    let set = ansatz::extract(
        &entry.op,
        &entry.ansatz_unknowns,
        &entry.ansatz,
        &entry.name,
    );
    let detected = ansatz::detect_forced_zero(&set, &entry.op);
    let forced: Vec<ForcedRecord> = detected
        .iter()
        .map(|f| ForcedRecord {
            atom: atom_text(&f.atom),
            witness: f.witness.to_string(),
        })
        .collect();
    let expected_missing: Vec<String> = entry
        .necessity
        .expected_forced
        .iter()
        .filter(|a| !detected.iter().any(|f| &f.atom == *a))
        .map(|a| atom_text(a))
        .collect();

    let mut perturbations = Vec::new();
    let mut all_refuted = true;
    for p in &entry.necessity.perturbations {
        let spec = p.case.instantiate(&entry.op);
        let refuted_by = match ansatz::perturb_and_refute(&spec, &p.label) {
            Refutation::Refuted(id) => Some(id.to_string()),
            Refutation::NotRefuted => {
                all_refuted = false;
                None
            }
        };
        perturbations.push(PerturbRecord {
            label: p.label.clone(),
            refuted_by,
        });
    }
    if let Some(count) = fuzz {
        let base = &entry.cases[entry.fuzz_case];
        let dirs = ansatz::fuzz_directions(
            entry.op.n_fields(),
            space.field_names(),
            &entry.fuzz_free,
            seed,
            count,
        );
        for d in dirs {
            let case = catalog::FamilyCase {
                omega: ansatz::apply_direction(&base.omega, &d),
                ..base.clone()
            };
            let spec = case.instantiate(&entry.op);
            let refuted_by = match ansatz::perturb_and_refute(&spec, &d.label) {
                Refutation::Refuted(id) => Some(id.to_string()),
                Refutation::NotRefuted => {
                    all_refuted = false;
                    None
                }
            };
            perturbations.push(PerturbRecord {
                label: format!("fuzz: {}", d.label),
                refuted_by,
            });
        }
    }
    let pass = all_refuted && expected_missing.is_empty();
    let report = NecessityReport {
        version: hamcheck_core::report::TOOL_VERSION,
        input: entry.name.clone(),
        forced,
        expected_missing,
        perturbations,
        pass,
        timing_ms: started.elapsed().as_millis(),
    };
    if out.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "{}: necessity {}",
            report.input,
            if report.pass { "PASS" } else { "FAIL" }
        );
        for f in &report.forced {
            println!("  forced  {} = 0   (witness {})", f.atom, f.witness);
        }
        for m in &report.expected_missing {
            println!("  MISSING expected forced atom {m}");
        }
        for p in &report.perturbations {
            match &p.refuted_by {
                Some(id) => println!("  refuted {} by {}", p.label, id),
                None => println!("  NOT REFUTED: {}", p.label),
            }
        }
    }
    Ok(if pass { 0 } else { 1 })
}

fn cmd_necessity_fixture(path: &std::path::Path, out: &OutputOpts) -> Result<u8, String> {
    let parsed = match read_unit(path) {
        Ok(x) => x,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return Ok(code);
        }
    };
    let started = Instant::now();
    let target = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "fixture".into());
    let base = verify_named(&parsed.spec, &CheckOptions::default(), &target);
    if !base.hamiltonian {
        eprintln!("error: the fixture's base operator does not verify");
        return Ok(1);
    }
    let mut perturbations = Vec::new();
    let mut pass = true;
    if !parsed.unit.perturb.is_empty() {
        let bindings: BTreeMap<_, _> = parsed.unit.perturb.clone();
        let perturbed = parsed
            .spec
            .substitute(&bindings)
            .map_err(|e| e.to_string())?;
        let refuted_by = match ansatz::perturb_and_refute(&perturbed, &target) {
            Refutation::Refuted(id) => Some(id.to_string()),
            Refutation::NotRefuted => {
                pass = false;
                None
            }
        };
        perturbations.push(PerturbRecord {
            label: "perturb block".to_string(),
            refuted_by,
        });
    }
    let report = NecessityReport {
        version: hamcheck_core::report::TOOL_VERSION,
        input: target,
        forced: Vec::new(),
        expected_missing: Vec::new(),
        perturbations,
        pass,
        timing_ms: started.elapsed().as_millis(),
    };
    if out.json {
        println!("{}", serde_json::to_string_pretty(&report).unwrap());
    } else {
        println!(
            "{}: necessity {}",
            report.input,
            if report.pass { "PASS" } else { "FAIL" }
        );
        for p in &report.perturbations {
            match &p.refuted_by {
                Some(id) => println!("  refuted {} by {}", p.label, id),
                None => println!("  NOT REFUTED: {}", p.label),
            }
        }
    }
    Ok(if pass { 0 } else { 1 })
}
