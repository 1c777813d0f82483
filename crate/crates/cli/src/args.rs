use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spreadseq::analysis::DEFAULT_OVERSAMPLE;
use spreadseq::constructions::{ConstructionSpec, Variant};
use spreadseq::random::{seeded_spec, Draw};
use spreadseq::Error;

#[derive(Debug, Parser)]
#[command(name = "spreadseq", version, about = "Low-coherence, low-PAPR spreading sequence sets over F_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a sequence set, analyze it and optionally export the phase matrix.
    Generate(GenerateArgs),
    /// Check an exported phase matrix.
    Verify(VerifyArgs),
    /// Print alphabet, coherence, overloading and PAPR bound per variant.
    Table(TableArgs),
    /// PAPR of every block of a sequence set.
    Papr(PaprArgs),
    /// Coherence of a sequence set from ranks and optionally by brute force.
    Coherence(CoherenceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct ConstructionArgs {
    #[arg(long, value_parser = parse_variant)]
    pub variant: Variant,
    /// Variant whose matrices are lifted when --variant is corollary-lift.
    #[arg(long, value_parser = parse_variant)]
    pub base: Option<Variant>,
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub m: usize,
    /// Alphabet exponent, q = p^h. Any h > 1 lifts the chosen variant.
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    /// Permutation, 1-indexed, comma separated.
    #[arg(long)]
    pub pi: Option<String>,
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub b: Option<String>,
    /// Diagonal vectors, ';' between vectors and ',' between entries.
    #[arg(long)]
    pub d: Option<String>,
    #[arg(long)]
    pub tau: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long)]
    pub e: Option<u8>,
    /// Draw valid parameters from this seed instead of reading them from flags.
    #[arg(long, conflicts_with_all = ["pi", "a", "b", "d", "tau", "s", "e"])]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    pub oversample: usize,
    #[arg(long)]
    pub brute_force: bool,
    /// Skip the orthogonality and complementary-set checks.
    #[arg(long)]
    pub no_verify: bool,
    /// Phase matrix output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Scale entries by M^(-1/2) in the JSON export.
    #[arg(long)]
    pub normalize: bool,
    /// JSON analysis report output file.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub input: PathBuf,
    /// Input format; taken from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Prime for CSV input.
    #[arg(long)]
    pub p: Option<u32>,
    /// Alphabet exponent for CSV input.
    #[arg(long, default_value_t = 1)]
    pub h: usize,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    pub oversample: usize,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [3u32, 5])]
    pub p: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 3, 4])]
    pub m: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub h: usize,
}

#[derive(Debug, Args)]
pub struct PaprArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long, default_value_t = DEFAULT_OVERSAMPLE)]
    pub oversample: usize,
}

#[derive(Debug, Args)]
pub struct CoherenceArgs {
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long)]
    pub brute_force: bool,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse::<Variant>().map_err(|e| e.to_string())
}

fn list<T: std::str::FromStr>(flag: &str, s: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| {
            t.parse().map_err(|_| Error::Parse {
                location: format!("--{flag} entry {}", i + 1),
                message: format!("{t:?} is not a number"),
            })
        })
        .collect()
}

fn vectors(flag: &str, s: &str) -> Result<Vec<Vec<u8>>, Error> {
    s.split(';')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .enumerate()
        .map(|(k, v)| list(&format!("{flag} vector {}", k + 1), v))
        .collect()
}

fn required<'a>(flag: &str, v: &'a Option<String>) -> Result<&'a str, Error> {
    v.as_deref()
        .ok_or_else(|| Error::Precondition(format!("--{flag} is required without --seed")))
}

impl ConstructionArgs {
    /// The spec to build, plus the seeded draw when --seed was given.
    pub fn resolve(&self) -> Result<(ConstructionSpec, Option<Draw>), Error> {
        let (variant, base) = match (self.variant, self.h) {
            (Variant::CorollaryLift, _) => (Variant::CorollaryLift, self.base),
            (v, 1) => (v, None),
            (v, _) => (Variant::CorollaryLift, Some(v)),
        };
        if let Some(seed) = self.seed {
            let draw = seeded_spec(variant, base, self.p, self.m, self.h, seed)?;
            return Ok((draw.spec.clone(), Some(draw)));
        }
        let spec = ConstructionSpec {
            variant,
            p: self.p,
            m: self.m,
            h: self.h,
            pi: list("pi", required("pi", &self.pi)?)?,
            a: list("a", required("a", &self.a)?)?,
            b: self.b.as_deref().map(|b| list("b", b)).transpose()?.unwrap_or_default(),
            d: vectors("d", required("d", &self.d)?)?,
            tau: self.tau,
            s: self.s,
            e: self.e,
            base,
        };
        Ok((spec, None))
    }
}
