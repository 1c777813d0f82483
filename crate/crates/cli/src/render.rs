//! Plain-text reports. Numbers carry four decimals.

use std::fmt::Write;

use spreadseq::analysis::{CoherenceReport, ColumnPair};
use spreadseq::quadform::Provenance;
use spreadseq::random::Draw;
use spreadseq::report::{AnalysisReport, PaprSummary, Verification, VerifyReport};

fn line(out: &mut String, label: &str, value: impl std::fmt::Display) {
    let text = format!("{label:<16}{value}");
    let _ = writeln!(out, "{}", text.trim_end());
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

pub fn provenance(p: &Provenance) -> String {
    let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{} {}", p.construction, params.join(" "))
}

pub fn pair(p: &ColumnPair) -> String {
    format!(
        "block {} column {} and block {} column {}",
        p.block_i + 1,
        p.col_i,
        p.block_j + 1,
        p.col_j
    )
}

pub fn draw(out: &mut String, seed: u64, d: &Draw) {
    line(out, "seed", format!("{seed} ({} rejected draws)", d.rejections));
}

fn coherence(out: &mut String, label: &str, c: &CoherenceReport) {
    let exact = c
        .max_inner_sq
        .map(|v| format!("  (max |<s,t>|^2 = {v}, M = {})", c.rows))
        .unwrap_or_default();
    line(out, label, format!("{:.4}{exact}", c.mu));
}

pub fn papr(out: &mut String, s: &PaprSummary) {
    line(
        out,
        "papr",
        format!(
            "{:.4} at oversample {} (bound {:.4}, {})",
            s.set_max,
            s.oversample,
            s.bound,
            if s.within_bound { "within" } else { "EXCEEDED" }
        ),
    );
    line(out, "papr t = j/M", format!("{:.4}", s.critical_grid_max));
    let blocks: Vec<String> = s.per_block.iter().map(|v| format!("{v:.4}")).collect();
    line(out, "papr per block", blocks.join(" "));
}

pub fn ranks(out: &mut String, table: &[Vec<usize>]) {
    line(out, "pairwise ranks", "");
    for (i, row) in table.iter().enumerate() {
        let cells: Vec<String> = row
            .iter()
            .enumerate()
            .map(|(j, r)| if i == j { "-".into() } else { r.to_string() })
            .collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
}

fn verification(out: &mut String, v: &Verification) {
    let orth = match &v.violation {
        Some(p) => format!("NO: {} are not orthogonal", pair(p)),
        None => "yes".into(),
    };
    line(out, "orthogonal", orth);
    let cs = match v.cs_failure {
        Some((b, c)) => format!("NO: block {} column {c}", b + 1),
        None => "yes".into(),
    };
    line(out, "cs property", cs);
}

pub fn analysis(out: &mut String, r: &AnalysisReport) {
    line(out, "construction", provenance(&r.construction));
    line(
        out,
        "shape",
        format!(
            "N = {}, M = {}, q = {}, blocks = {}, overloading = {}",
            r.n, r.len, r.q, r.blocks, r.overloading
        ),
    );
    if let Some(rm) = r.r_min {
        line(out, "r_min", rm);
    }
    if let Some(c) = &r.coherence_rank {
        let label = if r.h == 1 { "mu (rank)" } else { "mu (p-ary base)" };
        coherence(out, label, c);
    }
    if let Some(c) = &r.coherence_brute {
        coherence(out, "mu (brute)", c);
    }
    if let Some(a) = r.coherence_agree {
        line(out, "mu agree", yes(a));
    }
    if let Some(p) = &r.papr {
        papr(out, p);
    }
    if let Some(v) = &r.verification {
        verification(out, v);
    }
    ranks(out, &r.rank_table);
}

pub fn verify(out: &mut String, r: &VerifyReport) {
    verification(out, &r.structure);
    coherence(out, "mu (brute)", &r.coherence);
    if let Some(c) = &r.coherence_rank {
        coherence(out, "mu (rank)", c);
    }
    if let Some(a) = r.coherence_agree {
        line(out, "mu agree", yes(a));
    }
    line(
        out,
        "papr",
        format!(
            "{:.4} at oversample {} (bound {:.4}, {})",
            r.papr_max,
            r.oversample,
            r.papr_bound,
            if r.papr_within_bound { "within" } else { "EXCEEDED" }
        ),
    );
    line(out, "result", if r.passed() { "PASS" } else { "FAIL" });
}
