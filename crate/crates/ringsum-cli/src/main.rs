//! `ringsum` — power sums over finite rings from the command line.
//!
//! Every command prints JSON: point queries print a single object, sweeps
//! print one JSON object per line. Exit codes: 0 success, 1 verification
//! mismatch, 2 bad input, 3 unsupported ring/method, 4 resource bound hit.

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use ringsum::algebra::{AlgebraError, Element, FiniteAlgebra};
use ringsum::classify::{classify_prime_power_algebra, ideal_maximality, ClassifyError};
use ringsum::closedform::{
    evaluate, powersum_spec, powersum_spec_table, ComponentClass, PowerSumError, SymbolicValue,
    Value,
};
use ringsum::constructors::{parse_spec, realize, spec_order, RealizeError, RingSpec};
use ringsum::numtheory::NumTheoryError;
use ringsum::oracle::brute_power_sum;
use ringsum::poly::{parse_univariate, PolyError};
use ringsum::search::{
    check_giuga_order, discrepancy_scan, search_giuga, search_self_power, GiugaVerdict,
    ScanBounds, ScanFamily, SearchError,
};
use ringsum::DEFAULT_MAX_ELEMENTS;

#[derive(Parser)]
#[command(
    name = "ringsum",
    version,
    about = "Power sums over finite commutative rings: closed forms, brute force, and searches"
)]
struct Cli {
    /// Worker threads for parallel sweeps (default: one per CPU). Output is
    /// identical for every value.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest ring the brute-force oracle may enumerate. Overrides the
    /// RINGSUM_MAX_ELEMENTS environment variable; default 2^24.
    #[arg(long, global = true)]
    max_elements: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute S_k(R) = sum of r^k over all r in R.
    Sum {
        /// Ring spec, e.g. zmod:6, gf:2^3, quad:10:1:1, product:(gf:4)x(zmod:9)
        #[arg(long)]
        ring: String,
        /// Exponent k >= 1.
        #[arg(long)]
        k: u64,
        /// composed: per-prime decomposition engine; paper: the printed
        /// case tables taken literally; brute: full enumeration; all: every
        /// method plus agreement flags.
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
    },
    /// Identify a prime-power ring: field, Z/p^s, the square-zero
    /// four-element ring, or other.
    Classify {
        #[arg(long)]
        ring: String,
    },
    /// Irreducibility of a monic polynomial mod p, by the power-sum field
    /// criterion on the quotient ring.
    Irreducible {
        #[arg(long)]
        p: u64,
        /// Monic polynomial in x, e.g. "x^3+x+1".
        #[arg(long)]
        poly: String,
    },
    /// Maximality of the ideal defining a generators-and-relations
    /// quotient over Z/p.
    Maximal {
        #[arg(long)]
        p: u64,
        /// Comma-separated variable names, e.g. "x,y".
        #[arg(long)]
        vars: String,
        /// One rewrite rule per variable, e.g. --rule "x^2=2+2*y^2".
        #[arg(long = "rule")]
        rules: Vec<String>,
    },
    /// Bounded searches over ring orders.
    Search {
        #[command(subcommand)]
        what: SearchCommand,
    },
    /// Sweep a family, comparing printed tables, the composed engine, and
    /// the oracle; prints one line per discrepancy. Exits nonzero only if
    /// the composed engine disagrees with the oracle.
    Verify {
        /// zmod | gaussian | quadratic | polyquot | matrix | all
        family: String,
    },
}

#[derive(Subcommand)]
enum SearchCommand {
    /// Orders m whose product-of-fields ring satisfies S_m(R) = target.
    Selfpower {
        /// +1 or -1.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Inclusive upper bound on m.
        #[arg(long)]
        max: u64,
    },
    /// Generalized Giuga candidates: m with S_{m-1}(R) = -1 over >= 2
    /// fields.
    Giuga {
        /// Sweep every order up to this bound (prints candidates, if any).
        #[arg(long)]
        max: Option<u64>,
        /// Print the full verdict for one order instead of sweeping.
        #[arg(long)]
        check: Option<u64>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Composed,
    Paper,
    Brute,
    All,
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }
}

trait IntoFailure {
    fn code(&self) -> u8;
}

impl IntoFailure for NumTheoryError {
    fn code(&self) -> u8 {
        match self {
            NumTheoryError::FactorTooLarge(_) => 4,
            _ => 2,
        }
    }
}

impl IntoFailure for AlgebraError {
    fn code(&self) -> u8 {
        match self {
            AlgebraError::SizeBound { .. } | AlgebraError::OrderOverflow => 4,
            _ => 2,
        }
    }
}

impl IntoFailure for PolyError {
    fn code(&self) -> u8 {
        match self {
            PolyError::RewriteBudget { .. } => 4,
            _ => 2,
        }
    }
}

impl IntoFailure for RealizeError {
    fn code(&self) -> u8 {
        match self {
            RealizeError::TooManyGenerators { .. } => 4,
            RealizeError::Rewrite(e) => e.code(),
            RealizeError::Algebra(e) => e.code(),
            _ => 2,
        }
    }
}

impl IntoFailure for PowerSumError {
    fn code(&self) -> u8 {
        match self {
            PowerSumError::Unsupported(_) => 3,
            PowerSumError::Overflow => 4,
            PowerSumError::NoSpecialNilpotent | PowerSumError::NotCoprime(..) => 1,
            PowerSumError::NumTheory(e) => e.code(),
            PowerSumError::Poly(e) => e.code(),
            PowerSumError::Algebra(e) => e.code(),
            _ => 2,
        }
    }
}

impl IntoFailure for ClassifyError {
    fn code(&self) -> u8 {
        match self {
            ClassifyError::NotPrimePower(_) => 3,
            ClassifyError::NotPrime(_) => 2,
            ClassifyError::Realize(e) => e.code(),
            ClassifyError::Algebra(e) => e.code(),
            ClassifyError::NumTheory(e) => e.code(),
            ClassifyError::PowerSum(e) => e.code(),
        }
    }
}

impl IntoFailure for SearchError {
    fn code(&self) -> u8 {
        match self {
            SearchError::BoundTooLarge { .. } => 4,
            SearchError::BadTarget => 2,
            SearchError::EngineMismatch { .. } => 1,
            SearchError::PowerSum(e) => e.code(),
            SearchError::Realize(e) => e.code(),
            SearchError::Algebra(e) => e.code(),
            SearchError::NumTheory(e) => e.code(),
        }
    }
}

fn fail<E: IntoFailure + std::fmt::Display>(e: E) -> Failure {
    Failure::new(e.code(), e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // build_global errors if a pool already exists; for a CLI entry
        // point this runs first, and a second call is a no-op anyway
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let max_elements = cli
        .max_elements
        .or_else(|| {
            std::env::var("RINGSUM_MAX_ELEMENTS").ok().and_then(|v| v.parse().ok())
        })
        .unwrap_or(DEFAULT_MAX_ELEMENTS);
    match run(cli.command, max_elements) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command, max_elements: u64) -> Result<ExitCode, Failure> {
    match command {
        Command::Sum { ring, k, method } => cmd_sum(&ring, k, method, max_elements),
        Command::Classify { ring } => cmd_classify(&ring, max_elements),
        Command::Irreducible { p, poly } => cmd_irreducible(p, &poly, max_elements),
        Command::Maximal { p, vars, rules } => cmd_maximal(p, &vars, &rules, max_elements),
        Command::Search { what } => match what {
            SearchCommand::Selfpower { target, max } => cmd_selfpower(&target, max),
            SearchCommand::Giuga { max, check } => cmd_giuga(max, check),
        },
        Command::Verify { family } => cmd_verify(&family, max_elements),
    }
}

// ---------------------------------------------------------------------------
// JSON rendering helpers
// ---------------------------------------------------------------------------

fn element_json(a: &FiniteAlgebra, e: &Element) -> Json {
    let mut coords = Map::new();
    for (label, &c) in a.labels().iter().zip(&e.coords) {
        coords.insert(label.clone(), json!(c));
    }
    json!({ "coords": coords, "pretty": a.pretty(e) })
}

fn symbolic_text(v: &Value) -> String {
    match v {
        Value::IntMultiple(c) => c.to_string(),
        Value::NilpotentU => "u".to_string(),
        Value::Coords(cs) => format!("{cs:?}"),
    }
}

fn method_json(sym: &SymbolicValue, element: Option<(&FiniteAlgebra, &Element)>) -> Json {
    let mut obj = Map::new();
    obj.insert("case".into(), json!(sym.case_label));
    obj.insert("value".into(), json!(symbolic_text(&sym.value)));
    if let Some((a, e)) = element {
        obj.insert("element".into(), element_json(a, e));
    }
    Json::Object(obj)
}

fn parse_ring(text: &str) -> Result<RingSpec, Failure> {
    parse_spec(text).map_err(|e| {
        Failure::new(2, format!("bad ring spec at offset {}: {}", e.offset, e.message))
    })
}

// ---------------------------------------------------------------------------
// sum
// ---------------------------------------------------------------------------

fn cmd_sum(ring: &str, k: u64, method: MethodArg, max_elements: u64) -> Result<ExitCode, Failure> {
    let spec = parse_ring(ring)?;
    if k == 0 {
        return Err(Failure::new(2, "power sums are defined for k >= 1"));
    }

    // realize when the ring fits the enumeration budget; symbolic methods
    // still work (without element rendering) when it does not
    let realizable = spec_order(&spec).map(|n| n <= max_elements as u128).unwrap_or(false);
    let algebra = if realizable { Some(realize(&spec).map_err(fail)?) } else { None };

    let want = |m: MethodArg| method == MethodArg::All || method == m;
    let mut methods = Map::new();
    let mut exit = ExitCode::SUCCESS;

    let mut composed_elem: Option<Element> = None;
    let mut table_elem: Option<Element> = None;
    let mut brute_elem: Option<Element> = None;

    if want(MethodArg::Composed) {
        match powersum_spec(&spec, k) {
            Ok(sym) => {
                composed_elem = algebra
                    .as_ref()
                    .map(|a| evaluate(&sym.value, a, max_elements))
                    .transpose()
                    .map_err(fail)?;
                let el = composed_elem.as_ref().map(|e| (algebra.as_ref().unwrap(), e));
                methods.insert("composed".into(), method_json(&sym, el));
            }
            Err(e) if method == MethodArg::All && matches!(e, PowerSumError::Unsupported(_)) => {
                methods.insert("composed".into(), json!({ "error": e.to_string() }));
                exit = ExitCode::from(3);
            }
            Err(e) => return Err(fail(e)),
        }
    }
    if want(MethodArg::Paper) {
        match powersum_spec_table(&spec, k) {
            Ok(sym) => {
                table_elem = algebra
                    .as_ref()
                    .map(|a| evaluate(&sym.value, a, max_elements))
                    .transpose()
                    .map_err(fail)?;
                let el = table_elem.as_ref().map(|e| (algebra.as_ref().unwrap(), e));
                methods.insert("paper".into(), method_json(&sym, el));
            }
            Err(e) if method == MethodArg::All && matches!(e, PowerSumError::Unsupported(_)) => {
                methods.insert("paper".into(), json!({ "error": e.to_string() }));
                exit = ExitCode::from(3);
            }
            Err(e) => return Err(fail(e)),
        }
    }
    if want(MethodArg::Brute) {
        let a = algebra.as_ref().ok_or_else(|| {
            Failure::new(
                4,
                format!(
                    "ring has {} elements, above the enumeration budget {max_elements}",
                    spec_order(&spec).map(|n| n.to_string()).unwrap_or_else(|| "too many".into())
                ),
            )
        })?;
        let e = brute_power_sum(a, k, max_elements).map_err(fail)?;
        methods.insert("brute".into(), json!({ "element": element_json(a, &e) }));
        brute_elem = Some(e);
    }

    let mut agreement = Map::new();
    if let (Some(c), Some(b)) = (&composed_elem, &brute_elem) {
        let ok = c == b;
        agreement.insert("composed_equals_brute".into(), json!(ok));
        if !ok {
            exit = ExitCode::from(1);
        }
    }
    if let (Some(t), Some(c)) = (&table_elem, &composed_elem) {
        agreement.insert("paper_equals_composed".into(), json!(t == c));
    }

    let mut out = Map::new();
    out.insert("ring".into(), json!(spec.to_string()));
    out.insert("k".into(), json!(k));
    if let Some(a) = &algebra {
        out.insert("order".into(), json!(a.order() as u64));
    } else if let Some(n) = spec_order(&spec) {
        out.insert("order".into(), json!(n.to_string()));
    }
    out.insert("methods".into(), Json::Object(methods));
    if !agreement.is_empty() {
        out.insert("agreement".into(), Json::Object(agreement));
    }
    println!("{}", Json::Object(out));
    Ok(exit)
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

fn class_json(class: &ComponentClass) -> Json {
    match *class {
        ComponentClass::Field { p, s } => json!({ "kind": "field", "p": p, "s": s }),
        ComponentClass::ZModPrimePower { p, s } => {
            json!({ "kind": "zmod-prime-power", "p": p, "s": s })
        }
        ComponentClass::F2X2 => json!({ "kind": "f2x2" }),
        ComponentClass::OtherPrimePower { p, t, cyclic } => {
            json!({ "kind": "other-prime-power", "p": p, "t": t, "cyclic": cyclic })
        }
    }
}

fn cmd_classify(ring: &str, max_elements: u64) -> Result<ExitCode, Failure> {
    let spec = parse_ring(ring)?;
    let a = realize(&spec).map_err(fail)?;
    let class = classify_prime_power_algebra(&a, max_elements).map_err(fail)?;
    println!(
        "{}",
        json!({
            "ring": spec.to_string(),
            "order": a.order() as u64,
            "commutative": a.is_commutative(),
            "class": class_json(&class),
        })
    );
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// irreducible / maximal
// ---------------------------------------------------------------------------

fn cmd_irreducible(p: u64, poly: &str, max_elements: u64) -> Result<ExitCode, Failure> {
    let f = parse_univariate(poly, p).map_err(|e| {
        Failure::new(2, format!("bad polynomial at offset {}: {}", e.offset, e.message))
    })?;
    let verdict =
        ringsum::classify::poly_irreducible_mod_p(p, &f, max_elements).map_err(fail)?;
    println!("{}", json!({ "p": p, "poly": f.to_string(), "irreducible": verdict }));
    Ok(ExitCode::SUCCESS)
}

fn cmd_maximal(p: u64, vars: &str, rules: &[String], max_elements: u64) -> Result<ExitCode, Failure> {
    if rules.is_empty() {
        return Err(Failure::new(2, "at least one --rule is required"));
    }
    let strip = |s: &str| s.chars().filter(|c| !c.is_whitespace()).collect::<String>();
    let spec_text = format!("mvq:{p}:{}:{}", strip(vars), rules.iter().map(|r| strip(r)).collect::<Vec<_>>().join(";"));
    let spec = parse_ring(&spec_text)?;
    let report = ideal_maximality(&spec, max_elements).map_err(fail)?;
    println!("{}", json!({ "maximal": report.maximal, "coords": report.coords }));
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn cmd_selfpower(target: &str, max: u64) -> Result<ExitCode, Failure> {
    let t: i8 = match target {
        "+1" | "1" => 1,
        "-1" => -1,
        _ => return Err(Failure::new(2, "target must be +1 or -1")),
    };
    let hits = search_self_power(t, max).map_err(fail)?;
    for hit in hits {
        println!(
            "{}",
            json!({
                "m": hit.m,
                "target": hit.target,
                "fields": hit.field_sizes,
                "degenerate": hit.degenerate,
            })
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn giuga_json(v: &GiugaVerdict) -> Json {
    match v {
        GiugaVerdict::FieldTrivial { q } => json!({ "verdict": "field-trivial", "q": q }),
        GiugaVerdict::Candidate { m, field_sizes } => {
            json!({ "verdict": "candidate", "m": m, "fields": field_sizes })
        }
        GiugaVerdict::Rejected { m, p, e, condition, observed, required } => json!({
            "verdict": "rejected",
            "m": m,
            "p": p,
            "e": e,
            "condition": condition,
            "observed": observed,
            "required": required,
        }),
    }
}

fn cmd_giuga(max: Option<u64>, check: Option<u64>) -> Result<ExitCode, Failure> {
    match (max, check) {
        (_, Some(m)) => {
            if m < 2 {
                return Err(Failure::new(2, "--check needs an order >= 2"));
            }
            let verdict = check_giuga_order(m).map_err(fail)?;
            println!("{}", giuga_json(&verdict));
            Ok(ExitCode::SUCCESS)
        }
        (Some(max), None) => {
            for candidate in search_giuga(max).map_err(fail)? {
                println!("{}", giuga_json(&candidate));
            }
            Ok(ExitCode::SUCCESS)
        }
        (None, None) => Err(Failure::new(2, "pass --max to sweep or --check for one order")),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn cmd_verify(family: &str, max_elements: u64) -> Result<ExitCode, Failure> {
    let families: Vec<ScanFamily> = if family == "all" {
        ScanFamily::ALL.to_vec()
    } else {
        vec![ScanFamily::from_name(family).ok_or_else(|| {
            Failure::new(2, format!("unknown family '{family}' (zmod, gaussian, quadratic, polyquot, matrix, all)"))
        })?]
    };
    for fam in families {
        let bounds = ScanBounds::default_for(fam);
        let rows = discrepancy_scan(fam, &bounds, max_elements).map_err(fail)?;
        let count = rows.len();
        for row in rows {
            let a = realize(&parse_spec(&row.spec).expect("scan emits canonical specs"))
                .map_err(fail)?;
            println!(
                "{}",
                json!({
                    "family": row.family,
                    "ring": row.spec,
                    "k": row.k,
                    "paper": method_json(&row.table, Some((&a, &row.table_element))),
                    "composed": method_json(&row.composed, Some((&a, &row.oracle_element))),
                    "oracle": element_json(&a, &row.oracle_element),
                    "paper_equals_oracle": false,
                    "composed_equals_oracle": true,
                })
            );
        }
        println!(
            "{}",
            json!({ "family": fam.name(), "discrepancies": count, "composed_vs_oracle": "ok" })
        );
    }
    Ok(ExitCode::SUCCESS)
}
