mod args;
mod render;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::Parser;
use spreadseq::analysis::{mem_budget, SpreadingMatrix};
use spreadseq::constructions::Variant;
use spreadseq::export::{read_csv, write_csv, ExportDoc};
use spreadseq::report::{analyze, verify_matrix, AnalysisOptions, AnalysisReport};
use spreadseq::Error;

use args::{Cli, CoherenceArgs, Command, ConstructionArgs, Format, GenerateArgs, PaprArgs, TableArgs, VerifyArgs};

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_CONDITION: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_CAPACITY: u8 = 4;

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::Parse { .. }) => EXIT_PARSE,
        Some(Error::Capacity { .. }) => EXIT_CAPACITY,
        Some(_) => EXIT_CONDITION,
        None => EXIT_CHECK_FAILED,
    }
}

fn status(passed: bool) -> ExitCode {
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_CHECK_FAILED)
    }
}

fn print_timings(timings: &[(String, Duration)]) {
    for (name, t) in timings {
        eprintln!("time {name}: {:.3} s", t.as_secs_f64());
    }
}

fn build(c: &ConstructionArgs, out: &mut String) -> anyhow::Result<SpreadingMatrix> {
    let (spec, draw) = c.resolve()?;
    let phi = spec.build()?;
    if let (Some(seed), Some(d)) = (c.seed, &draw) {
        render::draw(out, seed, d);
    }
    Ok(phi)
}

fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> anyhow::Result<()>) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().with_context(|| format!("cannot write {}", path.display()))
}

fn generate(g: &GenerateArgs) -> anyhow::Result<ExitCode> {
    let mut out = String::new();
    let phi = build(&g.construction, &mut out)?;
    let opts = AnalysisOptions {
        oversample: g.oversample,
        brute_force: g.brute_force,
        verify: !g.no_verify,
        papr: true,
    };
    let report = analyze(&phi, &opts)?;
    render::analysis(&mut out, &report);
    if let Some(path) = &g.out {
        match g.format {
            Format::Json => {
                let doc = ExportDoc::from_spreading(&phi, g.normalize)?;
                let text = doc.to_json()?;
                write_file(path, |w| Ok(writeln!(w, "{text}")?))?;
            }
            Format::Csv => {
                let pm = phi.materialize(mem_budget())?;
                write_file(path, |w| Ok(write_csv(&pm, w)?))?;
            }
        }
    }
    if let Some(path) = &g.report {
        let text = serde_json::to_string_pretty(&report)?;
        write_file(path, |w| Ok(writeln!(w, "{text}")?))?;
    }
    print!("{out}");
    print_timings(&report.timings);
    Ok(status(report.passed()))
}

fn verify(v: &VerifyArgs) -> anyhow::Result<ExitCode> {
    let format = v.format.unwrap_or_else(|| {
        match v.input.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    });
    let file = File::open(&v.input).with_context(|| format!("cannot open {}", v.input.display()))?;
    let report = match format {
        Format::Json => {
            let doc = ExportDoc::read_json(file)?;
            let pm = doc.phase_matrix()?;
            let family = doc.family()?;
            let leads = doc.leading_coordinates();
            verify_matrix(&pm, doc.p, doc.m, leads.as_deref(), Some(&family), v.oversample)?
        }
        Format::Csv => {
            let p = v
                .p
                .ok_or_else(|| Error::Precondition("--p is required for CSV input".into()))?;
            let q = spreadseq::ebf::phase_modulus(spreadseq::fp::PrimeModulus::new(p)?, v.h)?;
            let pm = read_csv(file, q, None)?;
            let m = (1..=32)
                .find(|&m| (p as usize).checked_pow(m as u32) == Some(pm.rows))
                .ok_or_else(|| Error::Shape(format!("{} rows is not a power of {p}", pm.rows)))?;
            verify_matrix(&pm, p, m, None, None, v.oversample)?
        }
    };
    let mut out = String::new();
    render::verify(&mut out, &report);
    print!("{out}");
    Ok(status(report.passed()))
}

fn valid_m(v: Variant, p: u32, m: usize) -> bool {
    match v {
        Variant::ThmP3Even => p == 3 && m.is_multiple_of(2) && m >= 4 && m % 3 != 2,
        Variant::ThmP3Any => p == 3 && m >= 2,
        Variant::Thm2pShift => m >= 3,
        _ => m >= 2,
    }
}

fn table(t: &TableArgs) -> anyhow::Result<ExitCode> {
    let variants = [
        Variant::ThmLp,
        Variant::Thm2pDiff,
        Variant::Thm2pShift,
        Variant::ThmP3Even,
        Variant::ThmP3Any,
    ];
    let mut out = String::new();
    out.push_str(&format!(
        "{:<14}{:>3}{:>4}{:>6}{:>9}{:>8}{:>13}  {:<16}{:>8}  {}\n",
        "variant", "p", "m", "q", "N", "M", "overloading", "coherence", "mu", "PAPR"
    ));
    for v in variants {
        for &p in &t.p {
            spreadseq::fp::PrimeModulus::new(p)?;
            for &m in &t.m {
                if !valid_m(v, p, m) || t.h == 0 || t.h > m {
                    continue;
                }
                let blocks = v.blocks(p).expect("base variants have a block count");
                let len = (p as u64).pow(m as u32);
                let q = (p as u64).pow(t.h as u32);
                let deficit = v.rank_deficit().expect("base variants have a rank bound");
                let (formula, mu) = match (t.h, deficit) {
                    (1, 0) => ("1/sqrt(M)".to_string(), format!("{:.4}", (len as f64).powf(-0.5))),
                    (1, _) => (
                        format!("<= sqrt({p}/M)"),
                        format!("{:.4}", (p as f64 / len as f64).sqrt()),
                    ),
                    _ => ("brute force".to_string(), "-".to_string()),
                };
                out.push_str(&format!(
                    "{:<14}{:>3}{:>4}{:>6}{:>9}{:>8}{:>13}  {:<16}{:>8}  <= {p}\n",
                    v.name(),
                    p,
                    m,
                    q,
                    blocks as u64 * len,
                    len,
                    blocks,
                    formula,
                    mu
                ));
            }
        }
    }
    print!("{out}");
    Ok(ExitCode::SUCCESS)
}

fn header(out: &mut String, r: &AnalysisReport) {
    out.push_str(&format!("{:<16}{}\n", "construction", render::provenance(&r.construction)));
}

fn papr(a: &PaprArgs) -> anyhow::Result<ExitCode> {
    let mut out = String::new();
    let phi = build(&a.construction, &mut out)?;
    let opts = AnalysisOptions {
        oversample: a.oversample,
        brute_force: false,
        verify: false,
        papr: true,
    };
    let report = analyze(&phi, &opts)?;
    header(&mut out, &report);
    let summary = report.papr.as_ref().expect("papr was requested");
    render::papr(&mut out, summary);
    print!("{out}");
    print_timings(&report.timings);
    Ok(status(summary.within_bound))
}

fn coherence(a: &CoherenceArgs) -> anyhow::Result<ExitCode> {
    let mut out = String::new();
    let phi = build(&a.construction, &mut out)?;
    let opts = AnalysisOptions {
        brute_force: a.brute_force,
        papr: false,
        ..AnalysisOptions::default()
    };
    let report = analyze(&phi, &opts)?;
    render::analysis(&mut out, &report);
    print!("{out}");
    print_timings(&report.timings);
    Ok(status(report.passed()))
}

fn run(cli: &Cli) -> anyhow::Result<ExitCode> {
    match &cli.command {
        Command::Generate(g) => generate(g),
        Command::Verify(v) => verify(v),
        Command::Table(t) => table(t),
        Command::Papr(p) => papr(p),
        Command::Coherence(c) => coherence(c),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_PARSE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
