//! Command-line veneer over the library: lattice normal forms, factored
//! function-field elements, Kummer levels, Puiseux series arithmetic and
//! root expansion, and block-scenario probes.
//!
//! Exit codes: 0 success, 1 domain error (typed message on stderr),
//! 2 usage error.

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde_json::{json, Value};
use std::io::Write;

use crate::compos::{
    build_scenario, build_scenario_unchecked, locally_free_probe, specialize, Scenario,
};
use crate::epmod::matrix::{snf, IntMat};
use crate::epmod::{
    canonical_lattice_ints, is_simple, pure_hull, saturation_index, Characteristic,
    EpLattice, EpScalar, ExponentVector, Simplicity,
};
use crate::kummer::{check_finite_determination, determination_constant, kummer_group};
use crate::multfield::poly::parse_poly;
use crate::multfield::{
    factor, independent_mod_constants, pure_hull_basis_mod_constants, BaseField, MultElement,
};
use crate::puiseux::coeff::{Coeff, CoeffField};
use crate::puiseux::{newton_puiseux, PuiseuxSeries};

#[derive(Parser)]
#[command(
    name = "mullat",
    version,
    about = "Lattices over E_p, factored multiplicative elements, Kummer levels, \
             Puiseux series, and block-scenario probes"
)]
struct Cli {
    /// Field characteristic: 0 for the rationals, a prime p for F_p.
    #[arg(long, global = true, default_value_t = 0)]
    p: u64,
    /// Seed for randomized subroutines. Accepted for interface stability;
    /// every current subcommand is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Default truncation exponent for exact series inputs.
    #[arg(long, global = true, default_value_t = 8)]
    trunc: i64,
    /// Target precision for Puiseux root expansion.
    #[arg(long, global = true, default_value_t = 8)]
    prec: i64,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Smith normal form of an integer matrix.
    Snf {
        /// Matrix as a JSON array of integer rows, e.g. '[[2,4],[6,8]]'.
        #[arg(long)]
        matrix: String,
    },
    /// Pure hull (saturation) of a lattice inside an ambient module.
    Saturate {
        /// Generators as JSON rows, or 'identityK' for the full rank-K module.
        #[arg(long)]
        lattice: String,
        /// Ambient module (same syntax); defaults to the full module.
        #[arg(long)]
        ambient: Option<String>,
    },
    /// Test whether a vector spans a pure line in a lattice.
    Simple {
        /// Vector as a JSON array, e.g. '[2,2]'.
        #[arg(long)]
        vector: String,
        /// Lattice as JSON rows or 'identityK'.
        #[arg(long)]
        lattice: String,
    },
    /// Factor a rational-function expression into irreducibles.
    ///
    /// Univariate polynomials are factored completely; multivariate bases
    /// must already be presented as a product of irreducibles and are
    /// checked rather than split.
    Factor {
        /// Expression such as 'x^2 - 4' or '(x+y)^2/(x-y)'.
        expr: String,
    },
    /// Multiplicative independence of a tuple modulo constants.
    Independent {
        /// Comma-separated expressions (top-level commas only).
        #[arg(long)]
        elems: String,
    },
    /// Invariants of the level-n Kummer group of a tuple.
    KummerDegree {
        #[arg(long)]
        elems: String,
        #[arg(long)]
        n: u64,
    },
    /// Determination constant m of a pair of tuples (a; b).
    DetConstant {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Check realizable twists level by level up to n.
    TwistCheck {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        n: u64,
    },
    /// Evaluate a Puiseux-series expression.
    ///
    /// Atoms: integers, 't', 't^k', 't^(a/b)', or parenthesized series
    /// literals like '(1 - t + O(t^8))'; operators + - * / and ^k. Exact
    /// inputs without an O(...) tail are truncated at --trunc.
    PuiseuxEval {
        expr: String,
    },
    /// Puiseux expansions of the roots of a polynomial in y over series in t.
    PuiseuxRoots {
        /// Polynomial in the variables y and t, e.g. 'y^2 - t'.
        #[arg(long)]
        poly: String,
    },
    /// Residue (coefficient at t^0) of a series of non-negative valuation.
    Residue {
        series: String,
    },
    /// Class-lattice probe of elements against a block scenario.
    ScenarioProbe {
        /// Blocks as ';'-separated groups of ','-separated variables: 'x;y'.
        #[arg(long)]
        blocks: String,
        #[arg(long)]
        elems: String,
        /// Scenario variables; defaults to every variable seen in the blocks
        /// and elements.
        #[arg(long)]
        vars: Option<String>,
        /// Allow blocks that do not cover all variables (exploratory; no
        /// freeness claim).
        #[arg(long = "unsafe")]
        unsafe_blocks: bool,
    },
    /// Evaluate away all variables outside --keep at small integer points.
    Specialize {
        #[arg(long)]
        blocks: String,
        /// Comma-separated variables to keep transcendental.
        #[arg(long)]
        keep: String,
        #[arg(long)]
        elems: String,
    },
}

enum CliError {
    Domain(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}
domain_from!(
    crate::multfield::MfError,
    crate::epmod::EpError,
    crate::kummer::KumError,
    crate::puiseux::PuiError,
    crate::compos::CompError
);

impl From<String> for CliError {
    fn from(e: String) -> Self {
        CliError::Domain(e)
    }
}

pub fn cli_run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => 0,
        Err(CliError::Domain(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let chr = Characteristic::new(cli.p).map_err(|e| CliError::Domain(e.to_string()))?;
    let field = BaseField::from_p(cli.p)?;
    match &cli.cmd {
        Cmd::Snf { matrix } => cmd_snf(matrix, cli.json, out),
        Cmd::Saturate { lattice, ambient } => {
            cmd_saturate(chr, lattice, ambient.as_deref(), cli.json, out)
        }
        Cmd::Simple { vector, lattice } => cmd_simple(chr, vector, lattice, cli.json, out),
        Cmd::Factor { expr } => cmd_factor(field, expr, cli.json, out),
        Cmd::Independent { elems } => cmd_independent(field, elems, cli.json, out),
        Cmd::KummerDegree { elems, n } => cmd_kummer_degree(field, elems, *n, cli.json, out),
        Cmd::DetConstant { a, b } => cmd_det_constant(field, a, b, cli.json, out),
        Cmd::TwistCheck { a, b, n } => cmd_twist_check(field, a, b, *n, cli.json, out),
        Cmd::PuiseuxEval { expr } => cmd_puiseux_eval(cli.p, cli.trunc, expr, cli.json, out),
        Cmd::PuiseuxRoots { poly } => {
            cmd_puiseux_roots(cli.p, field, cli.prec, poly, cli.json, out)
        }
        Cmd::Residue { series } => cmd_residue(cli.p, cli.trunc, series, cli.json, out),
        Cmd::ScenarioProbe { blocks, elems, vars, unsafe_blocks } => cmd_scenario_probe(
            field,
            blocks,
            elems,
            vars.as_deref(),
            *unsafe_blocks,
            cli.json,
            out,
        ),
        Cmd::Specialize { blocks, keep, elems } => {
            cmd_specialize(field, blocks, keep, elems, cli.json, out)
        }
    }
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn json_value(src: &str) -> Result<Value, CliError> {
    serde_json::from_str(src).map_err(|e| CliError::Domain(format!("bad JSON input: {e}")))
}

fn value_bigint(v: &Value) -> Result<BigInt, CliError> {
    if let Some(i) = v.as_i64() {
        return Ok(BigInt::from(i));
    }
    if let Some(s) = v.as_str() {
        return s
            .parse::<BigInt>()
            .map_err(|e| CliError::Domain(format!("bad integer '{s}': {e}")));
    }
    Err(CliError::Domain(format!("expected an integer, got {v}")))
}

fn parse_int_rows(src: &str) -> Result<Vec<Vec<BigInt>>, CliError> {
    let v = json_value(src)?;
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::Domain("matrix must be a JSON array of rows".to_string()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let entries = row
            .as_array()
            .ok_or_else(|| CliError::Domain("matrix rows must be arrays".to_string()))?;
        out.push(entries.iter().map(value_bigint).collect::<Result<Vec<_>, _>>()?);
    }
    if let Some(first) = out.first() {
        if out.iter().any(|r| r.len() != first.len()) {
            return Err(CliError::Domain("matrix rows have unequal lengths".to_string()));
        }
    }
    Ok(out)
}

fn parse_int_vector(src: &str) -> Result<Vec<BigInt>, CliError> {
    let v = json_value(src)?;
    let entries = v
        .as_array()
        .ok_or_else(|| CliError::Domain("vector must be a JSON array".to_string()))?;
    entries.iter().map(value_bigint).collect()
}

/// 'identityK' for the full rank-K module, otherwise JSON rows.
fn parse_lattice(src: &str, chr: Characteristic) -> Result<EpLattice, CliError> {
    if let Some(k) = src.strip_prefix("identity") {
        let k: usize = k
            .parse()
            .map_err(|_| CliError::Domain(format!("bad lattice shorthand '{src}'")))?;
        return Ok(EpLattice::full(chr, k));
    }
    let rows = parse_int_rows(src)?;
    let k = rows.first().map_or(0, Vec::len);
    canonical_lattice_ints(chr, k, rows).map_err(CliError::from)
}

/// Splits on `sep` at parenthesis/bracket depth zero.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            parts.push(cur.trim().to_string());
            cur = String::new();
        } else {
            cur.push(c);
        }
    }
    parts.push(cur.trim().to_string());
    parts.retain(|p| !p.is_empty());
    parts
}

fn parse_elems(field: BaseField, src: &str) -> Result<Vec<MultElement>, CliError> {
    split_top_level(src, ',')
        .iter()
        .map(|e| factor(field, e).map_err(CliError::from))
        .collect()
}

fn coeff_field(p: u64) -> Result<CoeffField, CliError> {
    if p == 0 {
        Ok(CoeffField::Q)
    } else {
        Characteristic::new(p).map_err(|e| CliError::Domain(e.to_string()))?;
        Ok(CoeffField::Fp(p))
    }
}

fn fmt_list<T: std::fmt::Display>(items: &[T]) -> String {
    let inner: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("[{}]", inner.join(","))
}

fn rows_json(m: &IntMat) -> Value {
    let rows: Vec<Value> = (0..m.nrows())
        .map(|i| {
            Value::Array(
                m.row(i).iter().map(crate::jsonio::bigint_to_value).collect::<Vec<_>>(),
            )
        })
        .collect();
    Value::Array(rows)
}

fn rat_of(n: i64) -> BigRational {
    BigRational::from(BigInt::from(n))
}

// ---------------------------------------------------------------------------
// Subcommand bodies
// ---------------------------------------------------------------------------

fn cmd_snf(matrix: &str, as_json: bool, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = parse_int_rows(matrix)?;
    let ncols = rows.first().map_or(0, Vec::len);
    let m = IntMat::from_rows(ncols, rows);
    let r = snf(&m);
    if as_json {
        let j = json!({
            "invariants": r.invariants.iter().map(crate::jsonio::bigint_to_value).collect::<Vec<_>>(),
            "u": rows_json(&r.u),
            "v": rows_json(&r.v),
        });
        writeln!(out, "{j}")?;
    } else {
        writeln!(out, "invariants {}", fmt_list(&r.invariants))?;
    }
    Ok(())
}

fn cmd_saturate(
    chr: Characteristic,
    lattice: &str,
    ambient: Option<&str>,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let a = parse_lattice(lattice, chr)?;
    let m = match ambient {
        Some(src) => parse_lattice(src, chr)?,
        None => EpLattice::full(chr, a.basis().ncols()),
    };
    let hull = pure_hull(&a, &m)?;
    let idx = saturation_index(&a, &m)?;
    if as_json {
        let j = json!({
            "hull": rows_json(hull.basis()),
            "rank": hull.rank(),
            "invariant_factors": idx.factors.iter().map(crate::jsonio::bigint_to_value).collect::<Vec<_>>(),
            "index": crate::jsonio::bigint_to_value(&idx.index),
            "exponent": crate::jsonio::bigint_to_value(&idx.exponent),
        });
        writeln!(out, "{j}")?;
    } else {
        for i in 0..hull.rank() {
            writeln!(out, "hull row {}", fmt_list(hull.basis().row(i)))?;
        }
        writeln!(out, "invariant factors {}", fmt_list(&idx.factors))?;
        writeln!(out, "index {}", idx.index)?;
    }
    Ok(())
}

fn cmd_simple(
    chr: Characteristic,
    vector: &str,
    lattice: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let v = ExponentVector(
        parse_int_vector(vector)?.into_iter().map(EpScalar::from_int).collect(),
    );
    let lat = parse_lattice(lattice, chr)?;
    let s = is_simple(&v, &lat)?;
    if as_json {
        let j = match &s {
            Simplicity::Simple => json!({"simple": true}),
            Simplicity::NotSimple { prime, alpha } => json!({
                "simple": false,
                "prime": crate::jsonio::bigint_to_value(prime),
                "alpha": alpha.0.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            }),
        };
        writeln!(out, "{j}")?;
    } else {
        writeln!(out, "simple: {}", s.is_simple())?;
        if let Simplicity::NotSimple { prime, alpha } = &s {
            let entries: Vec<String> = alpha.0.iter().map(|e| e.to_string()).collect();
            writeln!(out, "witness: {} * [{}]", prime, entries.join(","))?;
        }
    }
    Ok(())
}

fn cmd_factor(
    field: BaseField,
    expr: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let e = factor(field, expr)?;
    if as_json {
        writeln!(out, "{}", e.to_json())?;
    } else {
        writeln!(out, "{e}")?;
    }
    Ok(())
}

fn cmd_independent(
    field: BaseField,
    elems: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let es = parse_elems(field, elems)?;
    let ind = independent_mod_constants(&es)?;
    if as_json {
        writeln!(out, "{}", json!({ "independent": ind }))?;
    } else {
        writeln!(out, "independent: {ind}")?;
    }
    Ok(())
}

fn cmd_kummer_degree(
    field: BaseField,
    elems: &str,
    n: u64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let es = parse_elems(field, elems)?;
    let gamma = pure_hull_basis_mod_constants(&es)?;
    let g = kummer_group(&es, n, &gamma)?;
    if as_json {
        writeln!(out, "{}", json!({ "invariants": g.invariants, "order": g.order() }))?;
    } else {
        writeln!(out, "invariants {}", fmt_list(&g.invariants))?;
        writeln!(out, "order {}", g.order())?;
    }
    Ok(())
}

fn cmd_det_constant(
    field: BaseField,
    a: &str,
    b: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ea = parse_elems(field, a)?;
    let eb = parse_elems(field, b)?;
    let (m, _) = determination_constant(&ea, &eb)?;
    if as_json {
        writeln!(out, "{}", json!({ "m": crate::jsonio::bigint_to_value(&m) }))?;
    } else {
        writeln!(out, "m = {m}")?;
    }
    Ok(())
}

fn cmd_twist_check(
    field: BaseField,
    a: &str,
    b: &str,
    n: u64,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ea = parse_elems(field, a)?;
    let eb = parse_elems(field, b)?;
    let rep = check_finite_determination(&ea, &eb, n)?;
    if as_json {
        writeln!(out, "{}", rep.to_json())?;
    } else {
        writeln!(out, "m = {}", rep.m)?;
        for l in &rep.levels {
            writeln!(out, "level {}: {}", l.n, if l.ok { "ok" } else { "FAIL" })?;
        }
        writeln!(out, "all levels ok: {}", rep.all_ok())?;
    }
    Ok(())
}

fn cmd_puiseux_eval(
    p: u64,
    trunc: i64,
    expr: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cf = coeff_field(p)?;
    let s = eval_series_expr(&cf, trunc, expr)?;
    if as_json {
        let j = json!({
            "series": s.to_text(),
            "val": s.val().map(|v| v.to_string()),
            "ram": s.ram().to_string(),
        });
        writeln!(out, "{j}")?;
    } else {
        writeln!(out, "{s}")?;
    }
    Ok(())
}

fn cmd_puiseux_roots(
    p: u64,
    field: BaseField,
    prec: i64,
    poly: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cf = coeff_field(p)?;
    let f = series_coeffs_in_y(field, &cf, prec, poly)?;
    let prec_r = rat_of(prec);
    let roots = newton_puiseux(&f, &prec_r)?;
    if as_json {
        let j: Vec<Value> = roots
            .iter()
            .map(|(s, m)| json!({ "series": s.to_text(), "mult": m }))
            .collect();
        writeln!(out, "{}", Value::Array(j))?;
    } else {
        for (s, m) in &roots {
            writeln!(out, "root {s}  (multiplicity {m})")?;
        }
    }
    Ok(())
}

/// Parses a polynomial in {y, t} and returns its dense coefficient list in
/// y, each coefficient an exact series in t truncated past every term.
fn series_coeffs_in_y(
    field: BaseField,
    cf: &CoeffField,
    prec: i64,
    src: &str,
) -> Result<Vec<PuiseuxSeries>, CliError> {
    let poly = parse_poly(src, field)?;
    for v in poly.vars() {
        if v != "y" && v != "t" {
            return Err(CliError::Domain(format!(
                "polynomial must use only y and t, found '{v}'"
            )));
        }
    }
    let dy = poly.degree_in("y") as usize;
    if dy == 0 {
        return Err(CliError::Domain("polynomial must involve y".to_string()));
    }
    let dt = poly.degree_in("t") as i64;
    let trunc = rat_of(prec.max(0) + dt + 2);
    let mut buckets: Vec<Vec<(BigRational, Coeff)>> = vec![Vec::new(); dy + 1];
    for (mono, c) in poly.terms() {
        let yi = mono.0.get("y").copied().unwrap_or(0) as usize;
        let ti = mono.0.get("t").copied().unwrap_or(0) as i64;
        buckets[yi].push((rat_of(ti), Coeff::from_rational(cf, c)));
    }
    Ok(buckets
        .into_iter()
        .map(|terms| PuiseuxSeries::new(cf.clone(), terms, trunc.clone()))
        .collect())
}

fn cmd_residue(
    p: u64,
    trunc: i64,
    series: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cf = coeff_field(p)?;
    let s = parse_series_literal(&cf, trunc, series)?;
    let r = s.residue()?;
    let text = cf.to_text(&r);
    if as_json {
        writeln!(out, "{}", json!({ "residue": text }))?;
    } else {
        writeln!(out, "residue {text}")?;
    }
    Ok(())
}

fn parse_block_spec(src: &str) -> Vec<Vec<String>> {
    split_top_level(src, ';')
        .iter()
        .map(|b| split_top_level(b, ','))
        .collect()
}

fn scenario_from_flags(
    field: BaseField,
    blocks: &str,
    vars: Option<&str>,
    extra_vars: &[String],
    allow_uncovered: bool,
) -> Result<Scenario, CliError> {
    let block_vars = parse_block_spec(blocks);
    let vars: Vec<String> = match vars {
        Some(v) => split_top_level(v, ','),
        None => {
            let mut all: Vec<String> =
                block_vars.iter().flatten().cloned().chain(extra_vars.iter().cloned()).collect();
            all.sort();
            all.dedup();
            all
        }
    };
    let s = if allow_uncovered {
        build_scenario_unchecked(field, &vars, &block_vars)?
    } else {
        build_scenario(field, &vars, &block_vars)?
    };
    Ok(s)
}

fn cmd_scenario_probe(
    field: BaseField,
    blocks: &str,
    elems: &str,
    vars: Option<&str>,
    unsafe_blocks: bool,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let es = parse_elems(field, elems)?;
    let mut elem_vars: Vec<String> = es.iter().flat_map(|e| e.vars()).collect();
    elem_vars.sort();
    elem_vars.dedup();
    let s = scenario_from_flags(field, blocks, vars, &elem_vars, unsafe_blocks)?;
    let rep = locally_free_probe(&s, &es)?;
    if as_json {
        writeln!(out, "{}", rep.to_json())?;
    } else {
        writeln!(out, "model: factor-support quotient")?;
        writeln!(out, "covering: {}", rep.covering)?;
        writeln!(out, "rank {}", rep.rank)?;
        let basis: Vec<String> = rep.hull_basis.iter().map(|e| e.to_string()).collect();
        writeln!(out, "hull basis [{}]", basis.join(", "))?;
        writeln!(out, "invariant factors {}", fmt_list(&rep.invariant_factors))?;
        writeln!(out, "m {}", rep.m)?;
        writeln!(out, "free: {}", rep.free)?;
        for (i, e) in rep.elements.iter().enumerate() {
            if e.zero_class {
                writeln!(out, "element {}: trivial class", i + 1)?;
            } else {
                let idx = e.index.as_ref().expect("nonzero class has an index");
                let tag = if e.simple == Some(true) { "simple" } else { "not simple" };
                writeln!(
                    out,
                    "element {}: class {}, index [{}], {}",
                    i + 1,
                    e.class_text,
                    idx,
                    tag
                )?;
            }
        }
    }
    Ok(())
}

fn cmd_specialize(
    field: BaseField,
    blocks: &str,
    keep: &str,
    elems: &str,
    as_json: bool,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let es = parse_elems(field, elems)?;
    let keep_vars = split_top_level(keep, ',');
    let mut elem_vars: Vec<String> = es.iter().flat_map(|e| e.vars()).collect();
    elem_vars.extend(keep_vars.iter().cloned());
    elem_vars.sort();
    elem_vars.dedup();
    let s = scenario_from_flags(field, blocks, None, &elem_vars, false)?;
    let (assignment, specialized) = specialize(&s, &keep_vars, &es)?;
    if as_json {
        let asn: serde_json::Map<String, Value> = assignment
            .iter()
            .map(|(k, v)| (k.clone(), Value::from(crate::jsonio::rational_to_string(v))))
            .collect();
        let j = json!({
            "assignment": asn,
            "elements": specialized.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        });
        writeln!(out, "{j}")?;
    } else {
        for (k, v) in &assignment {
            writeln!(out, "{k} -> {v}")?;
        }
        for (i, e) in specialized.iter().enumerate() {
            writeln!(out, "element {}: {}", i + 1, e)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Puiseux expression evaluation
// ---------------------------------------------------------------------------

/// Parses a series literal; inputs without an O(...) tail are treated as
/// exact and truncated at t^trunc.
fn parse_series_literal(
    cf: &CoeffField,
    trunc: i64,
    src: &str,
) -> Result<PuiseuxSeries, CliError> {
    let text = if src.contains("O(") {
        src.to_string()
    } else {
        format!("{src} + O(t^{trunc})")
    };
    PuiseuxSeries::parse(cf, &text).map_err(CliError::from)
}

/// Arithmetic over Puiseux series: the whole input is first tried as a
/// single literal; otherwise it is parsed as an expression whose atoms are
/// integers, t-monomials, and parenthesized literals or subexpressions.
fn eval_series_expr(
    cf: &CoeffField,
    trunc: i64,
    src: &str,
) -> Result<PuiseuxSeries, CliError> {
    if let Ok(s) = parse_series_literal(cf, trunc, src) {
        return Ok(s);
    }
    let mut p = ExprParser { src: src.as_bytes(), pos: 0, cf, trunc };
    let s = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(CliError::Domain(format!(
            "unexpected trailing input at byte {} of '{src}'",
            p.pos
        )));
    }
    Ok(s)
}

struct ExprParser<'a> {
    src: &'a [u8],
    pos: usize,
    cf: &'a CoeffField,
    trunc: i64,
}

impl<'a> ExprParser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<PuiseuxSeries, CliError> {
        let mut negated = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negated = true;
        }
        let mut acc = self.term()?;
        if negated {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t)?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<PuiseuxSeries, CliError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = acc.mul(&f)?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let f = self.power()?;
                    acc = acc.mul(&f.invert()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<PuiseuxSeries, CliError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let e = self.integer()?;
            return if e >= 0 {
                base.pow(e as u32).map_err(CliError::from)
            } else {
                base.invert()?.pow((-e) as u32).map_err(CliError::from)
            };
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64, CliError> {
        self.skip_ws();
        let start = self.pos;
        if self.src.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| CliError::Domain(format!("expected an integer at byte {start}")))
    }

    fn atom(&mut self) -> Result<PuiseuxSeries, CliError> {
        match self.peek() {
            Some(b'(') => {
                let close = self.matching_paren()?;
                let inner =
                    std::str::from_utf8(&self.src[self.pos + 1..close]).expect("ascii input");
                let result = match parse_series_literal(self.cf, self.trunc, inner) {
                    Ok(s) => s,
                    Err(_) => eval_series_expr(self.cf, self.trunc, inner)?,
                };
                self.pos = close + 1;
                Ok(result)
            }
            Some(b't') => {
                self.pos += 1;
                let exp = if self.src.get(self.pos) == Some(&b'^') {
                    self.pos += 1;
                    self.exponent()?
                } else {
                    BigRational::one()
                };
                let trunc = rat_of(self.trunc)
                    + if exp.is_positive() { exp.clone() } else { BigRational::zero() };
                Ok(PuiseuxSeries::monomial(self.cf, &exp, &Coeff::one(self.cf), &trunc))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(PuiseuxSeries::constant(
                    self.cf,
                    &Coeff::from_rational(self.cf, &rat_of(n)),
                    &rat_of(self.trunc),
                ))
            }
            other => Err(CliError::Domain(format!(
                "unexpected token {:?} at byte {} in series expression",
                other.map(char::from),
                self.pos
            ))),
        }
    }

    /// Exponent after '^': an integer or '(num/den)'.
    fn exponent(&mut self) -> Result<BigRational, CliError> {
        if self.src.get(self.pos) == Some(&b'(') {
            let close = self.matching_paren()?;
            let inner = std::str::from_utf8(&self.src[self.pos + 1..close])
                .expect("ascii input")
                .trim()
                .to_string();
            self.pos = close + 1;
            let (num, den) = match inner.split_once('/') {
                Some((n, d)) => (n.trim().to_string(), d.trim().to_string()),
                None => (inner, "1".to_string()),
            };
            let n: BigInt = num
                .parse()
                .map_err(|_| CliError::Domain(format!("bad exponent numerator '{num}'")))?;
            let d: BigInt = den
                .parse()
                .map_err(|_| CliError::Domain(format!("bad exponent denominator '{den}'")))?;
            if d.is_zero() {
                return Err(CliError::Domain("exponent denominator is zero".to_string()));
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from(BigInt::from(self.integer()?)))
        }
    }

    /// Index of the ')' matching the '(' at the current position.
    fn matching_paren(&mut self) -> Result<usize, CliError> {
        let open = self.pos;
        let mut depth = 0i32;
        for i in open..self.src.len() {
            match self.src[i] {
                b'(' => depth += 1,
                b')' => {
                    depth -= 1;
                    if depth == 0 {
                        return Ok(i);
                    }
                }
                _ => {}
            }
        }
        Err(CliError::Domain(format!("unbalanced parenthesis at byte {open}")))
    }
}
