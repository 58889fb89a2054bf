//! Command-line front end. Every subcommand prints either a JSON document
//! (schema `witt-k/1`) or a plain-text table with the same content.

use std::fmt::Write as _;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::abgroup::FinAbGroup;
use crate::homology::{expected_homology, homology, iota_check, IotaReport};
use crate::rational::kgroups_rational;
use crate::trunc::{build_poset, TruncationSet};
use crate::witt::{format_coords, is_prime, CoefficientRing, WittVector};
use crate::wittfp::kgroups_fp;
use crate::words::for_each_block_necklace;

pub const SCHEMA: &str = "witt-k/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WittOp {
    Add,
    Sub,
    Mul,
    Neg,
    Ghost,
}

#[derive(Debug, Parser)]
#[command(name = "wittk", version, about = "Relative K-groups of truncated free algebras via big Witt vectors")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Output::Json, global = true)]
    pub output: Output,
    #[command(subcommand)]
    pub command: Command,
}

fn positive_u64(s: &str) -> Result<u64, String> {
    match s.parse::<u64>() {
        Ok(v) if v >= 1 => Ok(v),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

fn prime(s: &str) -> Result<u64, String> {
    let p = positive_u64(s)?;
    if is_prime(p) {
        Ok(p)
    } else {
        Err(format!("{p} is not prime"))
    }
}

fn block_size(s: &str) -> Result<usize, String> {
    let a = positive_u64(s)?;
    if a < 2 {
        return Err("must be at least 2".into());
    }
    usize::try_from(a).map_err(|e| e.to_string())
}

fn positive_usize(s: &str) -> Result<usize, String> {
    usize::try_from(positive_u64(s)?).map_err(|e| e.to_string())
}

fn alphabet(s: &str) -> Result<u8, String> {
    let n = positive_u64(s)?;
    u8::try_from(n).map_err(|_| format!("alphabet size {n} exceeds 255"))
}

fn ring(s: &str) -> Result<CoefficientRing, String> {
    let parse = |t: &str| t.parse::<u64>().map_err(|e| e.to_string());
    let r = match s {
        "Z" => Ok(CoefficientRing::Integers),
        "Q" => Ok(CoefficientRing::Rationals),
        _ if s.starts_with("Z/") => CoefficientRing::integers_mod(parse(&s[2..])?),
        _ if s.starts_with("F_") => CoefficientRing::prime_field(parse(&s[2..])?),
        _ if s.starts_with('F') => CoefficientRing::prime_field(parse(&s[1..])?),
        _ => return Err(format!("unknown ring {s:?}; use Z, Q, Z/m or F_p")),
    };
    r.map_err(|e| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// K-groups over F_p, with both assembly paths cross-checked.
    Kgroup {
        #[arg(long, value_parser = alphabet)]
        n: u8,
        #[arg(long, value_parser = block_size)]
        a: usize,
        #[arg(long, value_parser = positive_usize)]
        q: usize,
        #[arg(long, value_parser = prime)]
        p: u64,
    },
    /// Dimensions of the rational K-groups over Z.
    KgroupRational {
        #[arg(long, value_parser = alphabet)]
        n: u8,
        #[arg(long, value_parser = block_size)]
        a: usize,
        #[arg(long, value_parser = positive_usize)]
        q: usize,
    },
    /// Reduced integral homology of X_{s,a} and its explicit cycles.
    Homology {
        #[arg(long, value_parser = positive_usize)]
        s: usize,
        #[arg(long, value_parser = block_size)]
        a: usize,
    },
    /// Witt vector arithmetic on {1..len}; coordinates comma-separated.
    Witt {
        #[arg(long, value_enum)]
        op: WittOp,
        /// Prime field F_p (shorthand for --ring F_p).
        #[arg(long, value_parser = prime, conflicts_with = "ring")]
        p: Option<u64>,
        #[arg(long, value_parser = ring)]
        ring: Option<CoefficientRing>,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
    },
    /// Aperiodic necklaces (Lyndon words) by length.
    Necklaces {
        #[arg(long, value_parser = alphabet)]
        n: u8,
        #[arg(long, value_parser = positive_usize)]
        lmax: usize,
    },
    /// Components of the truncation poset S_n(a, N).
    Poset {
        #[arg(long, value_parser = alphabet)]
        n: u8,
        #[arg(long, value_parser = positive_usize)]
        a: usize,
        #[arg(long = "N", value_parser = positive_usize)]
        big_n: usize,
    },
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn usage(msg: String) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: msg }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'static str,
    #[serde(flatten)]
    body: &'a T,
}

fn to_json<T: Serialize>(command: &'static str, body: &T) -> String {
    let mut s = serde_json::to_string(&Envelope { schema: SCHEMA, command, body }).expect("serializable");
    s.push('\n');
    s
}

pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 { Outcome::ok(text) } else { Outcome::usage(text) };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(msg) => Outcome::usage(format!("error: {msg}\n")),
    }
}

fn execute(cli: &Cli) -> Result<Outcome, String> {
    let json = cli.output == Output::Json;
    match &cli.command {
        Command::Kgroup { n, a, q, p } => {
            let report = kgroups_fp(*n, *a, *q, *p).map_err(|e| e.to_string())?;
            let stdout = if json { to_json("kgroup", &report) } else { kgroup_table(&report) };
            if report.crosscheck {
                Ok(Outcome::ok(stdout))
            } else {
                Ok(Outcome {
                    code: 1,
                    stdout,
                    stderr: "error: theorem and corollary paths disagree\n".into(),
                })
            }
        }
        Command::KgroupRational { n, a, q } => {
            let r = kgroups_rational(*n, *a, *q).map_err(|e| e.to_string())?;
            if json {
                return Ok(Outcome::ok(to_json("kgroup-rational", &r)));
            }
            let mut t = String::new();
            let _ = writeln!(t, "n={} a={} q={}", r.params.n, r.params.a, r.params.q);
            let _ = writeln!(t, "dim_K_even            {}", r.dim_even);
            let _ = writeln!(t, "dim_K_odd             {}", r.dim_odd);
            let _ = writeln!(t, "source_dim            {}", r.source_dim);
            let _ = writeln!(t, "target_dim            {}", r.target_dim);
            let _ = writeln!(t, "rank                  {}", r.rank);
            let _ = writeln!(t, "top_block_surjective  {}", r.checks.top_block_surjective);
            let _ = writeln!(t, "odd_closed_form       {}", r.checks.odd_closed_form);
            let _ = writeln!(t, "even_fiber_sum        {}", r.checks.even_fiber_sum);
            Ok(Outcome::ok(t))
        }
        Command::Homology { s, a } => {
            let report = HomologyReport::new(*s, *a);
            Ok(Outcome::ok(if json { to_json("homology", &report) } else { report.table() }))
        }
        Command::Witt { op, p, ring, x, y } => {
            let ring = match (p, ring) {
                (Some(p), _) => CoefficientRing::PrimeField(*p),
                (None, Some(r)) => *r,
                (None, None) => return Err("one of --p or --ring is required".into()),
            };
            let report = witt_report(*op, ring, x, y.as_deref())?;
            if json {
                return Ok(Outcome::ok(to_json("witt", &report)));
            }
            let mut t = String::new();
            let _ = writeln!(t, "op      {}", serde_json::to_value(op).expect("op").as_str().unwrap_or(""));
            let _ = writeln!(t, "ring    {}", report.ring);
            let _ = writeln!(t, "trunc   {}", join(&report.trunc));
            let _ = writeln!(t, "x       {}", report.x.join(","));
            if let Some(y) = &report.y {
                let _ = writeln!(t, "y       {}", y.join(","));
            }
            let _ = writeln!(t, "result  {}", report.result.join(","));
            Ok(Outcome::ok(t))
        }
        Command::Necklaces { n, lmax } => {
            let report = necklace_report(*n, *lmax);
            if json {
                return Ok(Outcome::ok(to_json("necklaces", &report)));
            }
            let mut t = String::new();
            let _ = writeln!(t, "n={} lmax={}", report.n, report.lmax);
            let _ = writeln!(t, "counts  {}", join(&report.counts));
            for row in &report.by_length {
                let _ = writeln!(t, "{:>3}  {}", row.length, row.words.join(" "));
            }
            Ok(Outcome::ok(t))
        }
        Command::Poset { n, a, big_n } => {
            let poset = build_poset(*n, *a, *big_n).map_err(|e| e.to_string())?;
            let report = PosetReport {
                n: *n,
                a: *a,
                big_n: *big_n,
                total: poset.total(),
                components: poset
                    .components
                    .iter()
                    .map(|c| PosetRow { label: c.label.to_string(), size: c.size })
                    .collect(),
            };
            if json {
                return Ok(Outcome::ok(to_json("poset", &report)));
            }
            let mut t = String::new();
            let _ = writeln!(t, "n={} a={} N={}", report.n, report.a, report.big_n);
            let _ = writeln!(t, "total  {}", report.total);
            for c in &report.components {
                let _ = writeln!(t, "{}  {}", c.label, c.size);
            }
            Ok(Outcome::ok(t))
        }
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

fn kgroup_table(r: &crate::wittfp::KGroupReport) -> String {
    let mut t = String::new();
    let pr = &r.params;
    let _ = writeln!(t, "n={} a={} q={} p={}", pr.n, pr.a, pr.q, pr.p);
    let _ = writeln!(t, "K_odd       {}", r.odd);
    let _ = writeln!(t, "K_even      {}", r.even);
    let _ = writeln!(t, "theorem     K_odd={}  K_even={}", r.theorem_path.odd, r.theorem_path.even);
    let _ = writeln!(t, "corollary   K_odd={}  K_even={}", r.corollary_path.odd, r.corollary_path.even);
    let _ = writeln!(t, "crosscheck  {}", r.crosscheck);
    let _ = writeln!(t, "necklace  length  g  K_odd  K_even");
    for term in &r.per_necklace {
        let _ = writeln!(t, "{}  {}  {}  {}  {}", term.word, term.length, term.g, term.odd, term.even);
    }
    t
}

#[derive(Serialize)]
struct DegreeRow {
    degree: usize,
    group: FinAbGroup,
}

#[derive(Serialize)]
struct HomologyReport {
    s: usize,
    a: usize,
    degrees: Vec<DegreeRow>,
    matches_prediction: bool,
    iota: IotaReport,
}

impl HomologyReport {
    fn new(s: usize, a: usize) -> Self {
        let groups = homology(s, a);
        let matches_prediction = groups == expected_homology(s, a);
        let degrees = groups.into_iter().enumerate().map(|(degree, group)| DegreeRow { degree, group }).collect();
        HomologyReport { s, a, degrees, matches_prediction, iota: iota_check(s, a) }
    }

    fn table(&self) -> String {
        let mut t = String::new();
        let _ = writeln!(t, "s={} a={}", self.s, self.a);
        for row in &self.degrees {
            let _ = writeln!(t, "H~_{}  {}", row.degree, row.group);
        }
        let _ = writeln!(t, "matches_prediction  {}", self.matches_prediction);
        let i = &self.iota;
        let _ = writeln!(t, "iota degree {}  are_cycles {}  generate {}  passed {}", i.degree, i.are_cycles, i.generate, i.passed);
        for c in &i.cycles {
            let _ = writeln!(t, "  {}", c.join(" + "));
        }
        t
    }
}

#[derive(Serialize)]
struct WittReport {
    op: WittOp,
    ring: String,
    trunc: Vec<u64>,
    x: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y: Option<Vec<String>>,
    result: Vec<String>,
}

fn parse_coords(ring: CoefficientRing, text: &str, flag: &str) -> Result<WittVector, String> {
    let coords = text
        .split(',')
        .map(|c| {
            let c = c.trim();
            match c.split_once('/') {
                Some((num, den)) => {
                    let num: BigInt = num.parse().map_err(|_| format!("--{flag}: bad coordinate {c:?}"))?;
                    let den: BigInt = den.parse().map_err(|_| format!("--{flag}: bad coordinate {c:?}"))?;
                    if den == BigInt::from(0) {
                        return Err(format!("--{flag}: zero denominator"));
                    }
                    Ok(BigRational::new(num, den))
                }
                None => c
                    .parse::<BigInt>()
                    .map(BigRational::from_integer)
                    .map_err(|_| format!("--{flag}: bad coordinate {c:?}")),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let trunc = TruncationSet::initial(coords.len() as u64);
    WittVector::new(ring, trunc, coords).map_err(|e| format!("--{flag}: {e}"))
}

fn witt_report(op: WittOp, ring: CoefficientRing, x: &str, y: Option<&str>) -> Result<WittReport, String> {
    let xv = parse_coords(ring, x, "x")?;
    let needs_y = matches!(op, WittOp::Add | WittOp::Sub | WittOp::Mul);
    let yv = match (needs_y, y) {
        (true, Some(y)) => Some(parse_coords(ring, y, "y")?),
        (true, None) => return Err("--y is required for this operation".into()),
        (false, Some(_)) => return Err("--y is not used by this operation".into()),
        (false, None) => None,
    };
    if let Some(yv) = &yv {
        if yv.trunc() != xv.trunc() {
            return Err("--x and --y must have the same number of coordinates".into());
        }
    }
    let result = match op {
        WittOp::Add => format_coords(&xv.add(yv.as_ref().expect("y")).map_err(|e| e.to_string())?),
        WittOp::Sub => format_coords(&xv.sub(yv.as_ref().expect("y")).map_err(|e| e.to_string())?),
        WittOp::Mul => format_coords(&xv.mul(yv.as_ref().expect("y")).map_err(|e| e.to_string())?),
        WittOp::Neg => format_coords(&xv.neg().map_err(|e| e.to_string())?),
        WittOp::Ghost => xv
            .ghost()
            .iter()
            .map(|g| if g.is_integer() { g.to_integer().to_string() } else { g.to_string() })
            .collect(),
    };
    Ok(WittReport {
        op,
        ring: ring.to_string(),
        trunc: xv.trunc().elements().to_vec(),
        x: format_coords(&xv),
        y: yv.as_ref().map(format_coords),
        result,
    })
}

#[derive(Serialize)]
struct NecklaceRow {
    length: usize,
    count: usize,
    words: Vec<String>,
}

#[derive(Serialize)]
struct NecklaceReport {
    n: u8,
    lmax: usize,
    counts: Vec<usize>,
    by_length: Vec<NecklaceRow>,
}

fn necklace_report(n: u8, lmax: usize) -> NecklaceReport {
    let by_length: Vec<NecklaceRow> = (1..=lmax)
        .map(|length| {
            let mut words = Vec::new();
            for_each_block_necklace(n, 1, length, |letters, period| {
                if period == 1 {
                    words.push(letters.iter().map(|l| format!("x{l}")).collect());
                }
            });
            NecklaceRow { length, count: words.len(), words }
        })
        .collect();
    NecklaceReport { n, lmax, counts: by_length.iter().map(|r| r.count).collect(), by_length }
}

#[derive(Serialize)]
struct PosetRow {
    label: String,
    size: usize,
}

#[derive(Serialize)]
struct PosetReport {
    n: u8,
    a: usize,
    #[serde(rename = "N")]
    big_n: usize,
    total: usize,
    components: Vec<PosetRow>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn call(args: &str) -> Outcome {
        run(std::iter::once("wittk").chain(args.split_whitespace()))
    }

    fn json(args: &str) -> Value {
        let out = call(args);
        assert_eq!(out.code, 0, "{args}: {}", out.stderr);
        serde_json::from_str(&out.stdout).unwrap()
    }

    #[test]
    fn kgroup_example() {
        let v = json("kgroup --n 1 --a 2 --q 1 --p 2");
        assert_eq!(v["schema"], "witt-k/1");
        assert_eq!(v["K_odd"]["divisors"], serde_json::json!([2]));
        assert_eq!(v["K_even"]["divisors"], serde_json::json!([]));
        assert_eq!(v["crosscheck"], true);
    }

    #[test]
    fn homology_example() {
        let v = json("homology --s 4 --a 2");
        let degrees = v["degrees"].as_array().unwrap();
        for d in degrees {
            let expected = if d["degree"] == 3 { serde_json::json!([0]) } else { serde_json::json!([]) };
            assert_eq!(d["group"]["divisors"], expected);
        }
        assert_eq!(v["iota"]["passed"], true);
    }

    #[test]
    fn necklaces_example() {
        let v = json("necklaces --n 2 --lmax 4");
        assert_eq!(v["counts"], serde_json::json!([2, 1, 2, 3]));
    }

    #[test]
    fn witt_example() {
        let v = json("witt --op add --p 2 --x 1,0 --y 1,0");
        assert_eq!(v["result"], serde_json::json!(["0", "1"]));
        let v = json("witt --op ghost --ring Z --x 1,1");
        assert_eq!(v["result"], serde_json::json!(["1", "3"]));
        let v = json("witt --op mul --ring Q --x 1/2,0 --y 2,0");
        assert_eq!(v["result"][0], "1");
    }

    #[test]
    fn poset_and_rational() {
        let v = json("poset --n 1 --a 2 --N 4");
        assert_eq!(v["total"], 2);
        let v = json("kgroup-rational --n 2 --a 2 --q 1");
        assert_eq!((v["dim_K_even"].as_u64(), v["dim_K_odd"].as_u64()), (Some(1), Some(2)));
    }

    #[test]
    fn usage_errors_name_the_flag() {
        for (args, flag) in [
            ("kgroup --n 1 --a 1 --q 1 --p 2", "--a"),
            ("kgroup --n 1 --a 2 --q 1 --p 4", "--p"),
            ("kgroup --n 0 --a 2 --q 1 --p 2", "--n"),
            ("homology --s 0 --a 2", "--s"),
            ("necklaces --n 2", "--lmax"),
            ("witt --op add --ring Z/1 --x 1 --y 1", "--ring"),
            ("witt --op add --p 2 --x 1,z --y 1,0", "--x"),
        ] {
            let out = call(args);
            assert_eq!(out.code, 2, "{args}");
            assert!(out.stderr.contains(flag), "{args}: {}", out.stderr);
            assert!(out.stdout.is_empty());
        }
    }

    #[test]
    fn table_and_json_agree() {
        let v = json("kgroup --n 2 --a 2 --q 1 --p 2");
        let t = call("kgroup --n 2 --a 2 --q 1 --p 2 --output table").stdout;
        let odd = FinAbGroup::from_divisors(serde_json::from_value(v["K_odd"]["divisors"].clone()).unwrap());
        let even = FinAbGroup::from_divisors(serde_json::from_value(v["K_even"]["divisors"].clone()).unwrap());
        assert!(t.contains(&format!("K_odd       {odd}\n")));
        assert!(t.contains(&format!("K_even      {even}\n")));
        assert_eq!(t.lines().filter(|l| l.starts_with('x')).count(), v["per_necklace"].as_array().unwrap().len());
    }

    #[test]
    fn help_exits_zero() {
        let out = call("--help");
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("kgroup"));
    }
}
