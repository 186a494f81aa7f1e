//! Block scenarios over a multivariate function field: the quotient of the
//! multiplicative group by constants and single-block content, evaluation
//! places that keep a chosen set of variables, and local-freeness probes on
//! the mixed-support exponent lattice.
//!
//! The "inside one block" test is a factor-support model of the block
//! subfields: a factor is quotiented away exactly when the variables it
//! mentions all fit in a single block. Every probe is a statement about this
//! model.

use crate::epmod::{EpScalar, ExponentVector};
use crate::multfield::{
    combine, hull_of_span_mod_constants, substitute_element, BaseField, CombineOp,
    HullModConstants, Irreducible, MfError, MultElement,
};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompError {
    #[error("variable '{0}' is not covered by any block")]
    Uncovered(String),
    #[error("a scenario needs at least one block")]
    NoBlocks,
    #[error("unknown variable '{0}'")]
    ForeignVariable(String),
    #[error("element field does not match the scenario")]
    FieldMismatch,
    #[error("malformed scenario JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Element(#[from] MfError),
}

/// An independent-system scenario: an ordered variable list and a family of
/// blocks. `covering` records whether every variable lies in some block (the
/// validated construction); non-covering scenarios are exploratory only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scenario {
    field: BaseField,
    vars: Vec<String>,
    blocks: Vec<BTreeSet<String>>,
    covering: bool,
}

fn assemble(
    field: BaseField,
    vars: &[String],
    blocks: &[Vec<String>],
    require_covering: bool,
) -> Result<Scenario, CompError> {
    if blocks.is_empty() {
        return Err(CompError::NoBlocks);
    }
    let mut ordered: Vec<String> = Vec::new();
    for v in vars {
        if !ordered.contains(v) {
            ordered.push(v.clone());
        }
    }
    let var_set: BTreeSet<&String> = ordered.iter().collect();
    let mut block_sets = Vec::with_capacity(blocks.len());
    for b in blocks {
        let mut set = BTreeSet::new();
        for v in b {
            if !var_set.contains(v) {
                return Err(CompError::ForeignVariable(v.clone()));
            }
            set.insert(v.clone());
        }
        block_sets.push(set);
    }
    let mut covering = true;
    for v in &ordered {
        if !block_sets.iter().any(|b| b.contains(v)) {
            if require_covering {
                return Err(CompError::Uncovered(v.clone()));
            }
            covering = false;
        }
    }
    Ok(Scenario { field, vars: ordered, blocks: block_sets, covering })
}

/// Validated scenario: blocks nonempty and jointly covering the variables.
pub fn build_scenario(
    field: BaseField,
    vars: &[String],
    blocks: &[Vec<String>],
) -> Result<Scenario, CompError> {
    assemble(field, vars, blocks, true)
}

/// Exploratory variant: blocks may leave variables uncovered. No freeness
/// claim is attached to probes over such scenarios.
pub fn build_scenario_unchecked(
    field: BaseField,
    vars: &[String],
    blocks: &[Vec<String>],
) -> Result<Scenario, CompError> {
    assemble(field, vars, blocks, false)
}

impl Scenario {
    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn blocks(&self) -> &[BTreeSet<String>] {
        &self.blocks
    }

    pub fn is_covering(&self) -> bool {
        self.covering
    }

    pub fn to_json(&self) -> Value {
        json!({
            "p": self.field.p(),
            "vars": self.vars,
            "blocks": self.blocks.iter().map(|b| b.iter().cloned().collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value, allow_noncovering: bool) -> Result<Scenario, CompError> {
        let p = v
            .get("p")
            .and_then(Value::as_u64)
            .ok_or_else(|| CompError::Json("missing numeric 'p'".to_string()))?;
        let strings = |key: &str, item: &Value| -> Result<Vec<String>, CompError> {
            item.as_array()
                .ok_or_else(|| CompError::Json(format!("'{key}' entries must be arrays")))?
                .iter()
                .map(|s| {
                    s.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| CompError::Json(format!("'{key}' must hold strings")))
                })
                .collect()
        };
        let vars: Vec<String> = v
            .get("vars")
            .and_then(Value::as_array)
            .ok_or_else(|| CompError::Json("missing 'vars' array".to_string()))?
            .iter()
            .map(|s| {
                s.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| CompError::Json("'vars' must hold strings".to_string()))
            })
            .collect::<Result<_, _>>()?;
        let blocks: Vec<Vec<String>> = v
            .get("blocks")
            .and_then(Value::as_array)
            .ok_or_else(|| CompError::Json("missing 'blocks' array".to_string()))?
            .iter()
            .map(|b| strings("blocks", b))
            .collect::<Result<_, _>>()?;
        let field = BaseField::from_p(p).map_err(CompError::Json)?;
        if allow_noncovering {
            build_scenario_unchecked(field, &vars, &blocks)
        } else {
            build_scenario(field, &vars, &blocks)
        }
    }
}

/// The image of an element in the quotient by constants and single-block
/// content: only factors whose variable support straddles blocks survive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeClass {
    factors: BTreeMap<Irreducible, EpScalar>,
}

impl CompositeClass {
    pub fn is_zero(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &BTreeMap<Irreducible, EpScalar> {
        &self.factors
    }

    /// A representative element (constant 1) of the class.
    pub fn representative(&self, field: BaseField) -> MultElement {
        MultElement::from_parts(
            field,
            BigRational::one(),
            self.factors.iter().map(|(i, e)| (i.clone(), e.clone())).collect(),
        )
        .expect("constant 1 is nonzero")
    }
}

/// Projects an element to its composite class: constants and factors whose
/// support lies inside a single block are quotiented away.
pub fn class_of(e: &MultElement, s: &Scenario) -> Result<CompositeClass, CompError> {
    if e.field() != s.field {
        return Err(CompError::FieldMismatch);
    }
    for v in e.vars() {
        if !s.vars.contains(&v) {
            return Err(CompError::ForeignVariable(v));
        }
    }
    let mut factors = BTreeMap::new();
    for (irr, exp) in e.factors() {
        let support = match irr {
            Irreducible::Prime(_) => continue,
            Irreducible::Poly(p) => p.vars(),
        };
        let single_block = s
            .blocks
            .iter()
            .any(|b| support.iter().all(|v| b.contains(v)));
        if !single_block {
            factors.insert(irr.clone(), exp.clone());
        }
    }
    Ok(CompositeClass { factors })
}

const SPECIALIZE_SEARCH_CAP: i64 = 256;

/// Assigns the variables outside `keep` the smallest non-negative integers
/// (searched componentwise in scenario order) that keep every element
/// defined and nonzero, and returns the assignment with the specialized
/// elements re-factored over the kept variables.
pub fn specialize(
    s: &Scenario,
    keep: &[String],
    elems: &[MultElement],
) -> Result<(BTreeMap<String, BigRational>, Vec<MultElement>), CompError> {
    for v in keep {
        if !s.vars.contains(v) {
            return Err(CompError::ForeignVariable(v.clone()));
        }
    }
    for e in elems {
        if e.field() != s.field {
            return Err(CompError::FieldMismatch);
        }
        for v in e.vars() {
            if !s.vars.contains(&v) {
                return Err(CompError::ForeignVariable(v));
            }
        }
    }
    let killed: Vec<&String> = s.vars.iter().filter(|v| !keep.contains(v)).collect();
    let mut assignment = BTreeMap::new();
    let mut current: Vec<MultElement> = elems.to_vec();
    for var in killed {
        let mut chosen = None;
        'search: for k in 0..=SPECIALIZE_SEARCH_CAP {
            let v = BigRational::from(BigInt::from(k));
            let mut one_var = BTreeMap::new();
            one_var.insert(var.clone(), v.clone());
            let mut next = Vec::with_capacity(current.len());
            for e in &current {
                match substitute_element(e, &one_var) {
                    Ok(se) => next.push(se),
                    Err(MfError::PlaceUndefined) => continue 'search,
                    Err(other) => return Err(CompError::Element(other)),
                }
            }
            chosen = Some((v, next));
            break;
        }
        let (v, next) = chosen.expect(
            "a nonzero polynomial vanishes at finitely many points, so the search terminates",
        );
        assignment.insert(var.clone(), v);
        current = next;
    }
    Ok((assignment, current))
}

/// Per-element summary inside a probe report.
#[derive(Debug, Clone)]
pub struct ElementReport {
    pub class_text: String,
    pub zero_class: bool,
    /// Whether the class generates a saturated rank-1 sublattice (undefined
    /// for the zero class).
    pub simple: Option<bool>,
    /// Saturation index of the single class in its own pure hull.
    pub index: Option<BigInt>,
}

#[derive(Debug, Clone)]
pub struct ProbeReport {
    pub rank: usize,
    pub hull_basis: Vec<MultElement>,
    pub invariant_factors: Vec<BigInt>,
    pub m: BigInt,
    pub free: bool,
    pub covering: bool,
    pub elements: Vec<ElementReport>,
    pub hull: HullModConstants,
}

fn bigint_json(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => Value::from(i),
        None => Value::from(v.to_string()),
    }
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "model": "factor-support quotient",
            "rank": self.rank,
            "hull_basis": self.hull_basis.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            "invariant_factors": self.invariant_factors.iter().map(bigint_json).collect::<Vec<_>>(),
            "m": bigint_json(&self.m),
            "free": self.free,
            "covering": self.covering,
            "elements": self.elements.iter().map(|e| json!({
                "class": e.class_text,
                "zero": e.zero_class,
                "simple": e.simple,
                "index": e.index.as_ref().map(bigint_json),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Builds the exponent lattice of the elements' classes over mixed-support
/// irreducibles, computes its pure hull in the ambient lattice, and reports
/// the basis, invariant factors, and determination exponent. Pure hulls of
/// finite rank are free; the probe's content is the explicit basis and the
/// consistency of the inclusion data.
pub fn locally_free_probe(
    s: &Scenario,
    elems: &[MultElement],
) -> Result<ProbeReport, CompError> {
    let classes: Vec<CompositeClass> = elems
        .iter()
        .map(|e| class_of(e, s))
        .collect::<Result<_, _>>()?;
    let reps: Vec<MultElement> =
        classes.iter().map(|c| c.representative(s.field)).collect();
    let hull = hull_of_span_mod_constants(&reps)?;

    let mut elements = Vec::with_capacity(classes.len());
    for (class, rep) in classes.iter().zip(&reps) {
        if class.is_zero() {
            elements.push(ElementReport {
                class_text: "1".to_string(),
                zero_class: true,
                simple: None,
                index: None,
            });
        } else {
            let own = hull_of_span_mod_constants(std::slice::from_ref(rep))?;
            let index = own.index_product.clone();
            elements.push(ElementReport {
                class_text: rep.to_string(),
                zero_class: false,
                simple: Some(index.is_one()),
                index: Some(index),
            });
        }
    }

    // Consistency: the invariant factors must form a divisibility chain
    // ending at m, and the inclusion coordinates must reconstruct each
    // element's (p-cleared) class row from the hull basis.
    let mut consistent = true;
    for w in hull.invariant_factors.windows(2) {
        if !(&w[1] % &w[0]).is_zero() {
            consistent = false;
        }
    }
    if let Some(last) = hull.invariant_factors.last() {
        consistent &= last == &hull.m;
    } else {
        consistent &= hull.m.is_one();
    }
    let chr = s.field.chr();
    let k = hull.index.len();
    for (coords, rep) in hull.inclusion.iter().zip(&reps) {
        let scal_row: Vec<EpScalar> = hull
            .index
            .iter()
            .map(|irr| rep.factors().get(irr).cloned().unwrap_or_else(EpScalar::zero))
            .collect();
        let (cleared, _) = ExponentVector(scal_row).clear_denominators(chr);
        let mut rebuilt = vec![BigInt::zero(); k];
        for (bi, c) in coords.iter().enumerate() {
            for j in 0..k {
                rebuilt[j] += c * hull.hull.basis().at(bi, j);
            }
        }
        consistent &= rebuilt == cleared;
    }

    Ok(ProbeReport {
        rank: hull.hull.rank(),
        hull_basis: hull.basis_elements.clone(),
        invariant_factors: hull.invariant_factors.clone(),
        m: hull.m.clone(),
        free: consistent,
        covering: s.covering,
        elements,
        hull,
    })
}

/// Multiplies the elements pairwise and checks the homomorphism property of
/// class_of on exponent data; used by probes and tests.
pub fn class_product(
    a: &MultElement,
    b: &MultElement,
    s: &Scenario,
) -> Result<(CompositeClass, CompositeClass), CompError> {
    let prod = combine(a, b, CombineOp::Multiply)?;
    Ok((class_of(&prod, s)?, merge_classes(&class_of(a, s)?, &class_of(b, s)?, s)))
}

fn merge_classes(a: &CompositeClass, b: &CompositeClass, s: &Scenario) -> CompositeClass {
    let chr = s.field.chr();
    let mut factors = a.factors.clone();
    for (irr, exp) in &b.factors {
        match factors.remove(irr) {
            None => {
                factors.insert(irr.clone(), exp.clone());
            }
            Some(prev) => {
                let sum = prev.add(exp, chr);
                if !sum.is_zero() {
                    factors.insert(irr.clone(), sum);
                }
            }
        }
    }
    CompositeClass { factors }
}
