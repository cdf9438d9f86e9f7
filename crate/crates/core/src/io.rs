//! JSON file formats. Scalars are strings (`"p/q"` over ℚ, residues over
//! 𝔽_p); generators are referenced as `"S->T:degree:label"`.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::ainf::{AInfPair, AInfStructure, Report, Table};
use crate::basis::{Basis, Vector, Word};
use crate::deformation::{AdaptedComplex, DeformedModuleComplex, ModuleMap};
use crate::dual::{DualElement, TruncatedDualAlgebra};
use crate::error::{Error, Result};
use crate::functor::{AInfFunctor, HomotopyData, MorphismHomotopy};
use crate::graded::GradedSpace;
use crate::jet::{JetAutomorphism, JetIdeal, JetMatrix, JetPoly};
use crate::kill::KillStep;
use crate::par::ExecMode;
use crate::scalar::FieldSpec;
use crate::transfer::MinimalModel;

pub const AINF: &str = "ainf/v1";
pub const AINF_MAP: &str = "ainf-map/v1";
pub const DUALALG: &str = "dualalg/v1";
pub const DEFCOMPLEX: &str = "defcomplex/v1";
pub const JET: &str = "jet/v1";
pub const KILLLOG: &str = "killlog/v1";
pub const TRANSFER_REPORT: &str = "transfer-report/v1";

fn bad(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field_of<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| bad(format!("missing field {key:?}")))
}

fn str_of<'a>(v: &'a Value, key: &str) -> Result<&'a str> {
    field_of(v, key)?.as_str().ok_or_else(|| bad(format!("field {key:?} must be a string")))
}

fn usize_of(v: &Value, key: &str) -> Result<usize> {
    field_of(v, key)?
        .as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| bad(format!("field {key:?} must be a nonnegative integer")))
}

fn array_of<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>> {
    field_of(v, key)?.as_array().ok_or_else(|| bad(format!("field {key:?} must be an array")))
}

fn object_of<'a>(v: &'a Value, key: &str) -> Result<&'a Map<String, Value>> {
    field_of(v, key)?.as_object().ok_or_else(|| bad(format!("field {key:?} must be an object")))
}

pub fn check_schema(v: &Value, expected: &str) -> Result<()> {
    let got = str_of(v, "schema")?;
    if got != expected {
        return Err(bad(format!("expected schema {expected:?}, found {got:?}")));
    }
    Ok(())
}

/// Parses JSON text; syntax errors carry line and column.
pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn to_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

/// Writes through a temporary file in the same directory and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::Invalid(format!("{} is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn gen_ref(b: &Basis, g: u32) -> String {
    let gen = b.gen(g);
    format!("{}->{}:{}:{}", b.objects()[gen.source], b.objects()[gen.target], gen.degree, gen.label)
}

pub fn parse_ref(b: &Basis, r: &str) -> Result<u32> {
    let mut it = r.splitn(3, ':');
    let (Some(span), Some(deg), Some(label)) = (it.next(), it.next(), it.next()) else {
        return Err(bad(format!("generator reference {r:?} is not S->T:degree:label")));
    };
    let (s, t) = span.split_once("->").ok_or_else(|| bad(format!("bad span in {r:?}")))?;
    let obj = |o: &str| b.object_index(o).ok_or_else(|| bad(format!("unknown object {o:?} in {r:?}")));
    let d: i32 = deg.parse().map_err(|_| bad(format!("bad degree in {r:?}")))?;
    b.find(obj(s)?, obj(t)?, d, label).ok_or_else(|| bad(format!("unknown generator {r:?}")))
}

pub fn vector_to_json(b: &Basis, field: FieldSpec, v: &Vector) -> Value {
    Value::Object(v.iter().map(|(&g, c)| (gen_ref(b, g), Value::String(field.format_scalar(c)))).collect())
}

pub fn vector_from_json(b: &Basis, field: FieldSpec, v: &Value) -> Result<Vector> {
    let obj = v.as_object().ok_or_else(|| bad("a vector must be an object"))?;
    let mut out = Vector::new();
    for (k, c) in obj {
        let c = c.as_str().ok_or_else(|| bad(format!("coefficient of {k:?} must be a string")))?;
        out.add_term(parse_ref(b, k)?, &field.parse_scalar(c)?);
    }
    Ok(out)
}

fn word_to_json(b: &Basis, w: &[u32]) -> Value {
    Value::Array(w.iter().map(|&g| Value::String(gen_ref(b, g))).collect())
}

fn word_from_json(b: &Basis, v: &Value) -> Result<Word> {
    v.as_array()
        .ok_or_else(|| bad("inputs must be an array"))?
        .iter()
        .map(|x| parse_ref(b, x.as_str().ok_or_else(|| bad("generator references are strings"))?))
        .collect()
}

/// Entries of a table as `[{inputs, value}]`.
pub fn table_to_json<'a>(b: &Basis, target: &Basis, field: FieldSpec, entries: impl Iterator<Item = (&'a Word, &'a Vector)>) -> Value {
    Value::Array(
        entries
            .map(|(w, v)| json!({"inputs": word_to_json(b, w), "value": vector_to_json(target, field, v)}))
            .collect(),
    )
}

fn table_from_json(b: &Basis, target: &Basis, field: FieldSpec, v: &Value) -> Result<Vec<(Word, Vector)>> {
    v.as_array()
        .ok_or_else(|| bad("entries must be an array"))?
        .iter()
        .map(|e| Ok((word_from_json(b, field_of(e, "inputs")?)?, vector_from_json(target, field, field_of(e, "value")?)?)))
        .collect()
}

fn basis_to_json(b: &Basis) -> (Value, Value) {
    let objects = Value::Array(b.objects().iter().map(|o| Value::String(o.clone())).collect());
    let weights = b.weights();
    let hom = b
        .hom()
        .iter()
        .map(|(&(s, t), sp)| {
            let degrees: Map<String, Value> = sp
                .degrees()
                .map(|(d, ls)| (d.to_string(), Value::Array(ls.iter().map(|l| Value::String(l.clone())).collect())))
                .collect();
            let mut e = json!({"source": b.objects()[s], "target": b.objects()[t], "degrees": degrees});
            let w: Map<String, Value> = sp
                .degrees()
                .flat_map(|(d, ls)| ls.iter().map(move |l| (d, l)))
                .filter_map(|(d, l)| {
                    let x = *weights.get(&(s, t, d, l.clone()))?;
                    (x > 0).then(|| (format!("{d}:{l}"), json!(x)))
                })
                .collect();
            if !w.is_empty() {
                e["weights"] = Value::Object(w);
            }
            e
        })
        .collect();
    (objects, Value::Array(hom))
}

fn basis_from_json(v: &Value) -> Result<Basis> {
    let objects: Vec<String> = array_of(v, "objects")?
        .iter()
        .map(|o| o.as_str().map(String::from).ok_or_else(|| bad("object names are strings")))
        .collect::<Result<_>>()?;
    let idx = |o: &str| objects.iter().position(|x| x == o).ok_or_else(|| bad(format!("unknown object {o:?}")));
    let mut hom = BTreeMap::new();
    let mut weights = HashMap::new();
    for e in array_of(v, "hom")? {
        let (s, t) = (idx(str_of(e, "source")?)?, idx(str_of(e, "target")?)?);
        let mut degrees = Vec::new();
        for (d, ls) in object_of(e, "degrees")? {
            let d: i32 = d.parse().map_err(|_| bad(format!("bad degree {d:?}")))?;
            let ls: Vec<String> = ls
                .as_array()
                .ok_or_else(|| bad("labels must be an array"))?
                .iter()
                .map(|l| l.as_str().map(String::from).ok_or_else(|| bad("labels are strings")))
                .collect::<Result<_>>()?;
            degrees.push((d, ls));
        }
        if let Some(w) = e.get("weights") {
            for (k, x) in w.as_object().ok_or_else(|| bad("weights must be an object"))? {
                let (d, l) = k.split_once(':').ok_or_else(|| bad(format!("bad weight key {k:?}")))?;
                let d: i32 = d.parse().map_err(|_| bad(format!("bad weight key {k:?}")))?;
                let x = x.as_u64().ok_or_else(|| bad("weights are nonnegative integers"))? as u32;
                weights.insert((s, t, d, l.to_string()), x);
            }
        }
        if hom.insert((s, t), GradedSpace::from_degrees(degrees)?).is_some() {
            return Err(bad(format!("hom space {}->{} listed twice", objects[s], objects[t])));
        }
    }
    Basis::with_weights(objects, hom, &weights)
}

pub fn structure_to_json(s: &AInfStructure) -> Value {
    let b = s.basis();
    let (objects, hom) = basis_to_json(b);
    json!({
        "schema": AINF,
        "field": s.field.to_string(),
        "arity": s.arity_bound(),
        "objects": objects,
        "hom": hom,
        "products": table_to_json(b, b, s.field, s.entries()),
    })
}

pub fn structure_from_json(v: &Value) -> Result<AInfStructure> {
    check_schema(v, AINF)?;
    let field: FieldSpec = str_of(v, "field")?.parse()?;
    let basis = Arc::new(basis_from_json(v)?);
    let mut s = AInfStructure::new(field, basis.clone(), usize_of(v, "arity")?)?;
    for (w, val) in table_from_json(&basis, &basis, field, field_of(v, "products")?)? {
        s.set_product(&w, val)?;
    }
    Ok(s)
}

/// Pairs are structures with two extra fields naming `X` and `Y`.
pub fn pair_to_json(p: &AInfPair) -> Value {
    let mut v = structure_to_json(p.structure());
    let objs = p.basis().objects();
    v["pair"] = json!({"x": objs[p.x()], "y": objs[p.y()]});
    v
}

/// A structure file as a pair: by the `pair` field if present, otherwise
/// inferred from which hom spaces vanish.
pub fn pair_from_json(v: &Value) -> Result<AInfPair> {
    let s = structure_from_json(v)?;
    match v.get("pair") {
        Some(p) => AInfPair::from_names(s, str_of(p, "x")?, str_of(p, "y")?),
        None => AInfPair::infer(s),
    }
}

pub fn functor_to_json(f: &AInfFunctor) -> Value {
    let (sb, tb) = (f.source.basis(), f.target.basis());
    let comps = (1..=f.arity_bound()).flat_map(|n| f.components(n).iter());
    json!({
        "schema": AINF_MAP,
        "kind": "functor",
        "shift": "1-n",
        "source": structure_to_json(&f.source),
        "target": structure_to_json(&f.target),
        "object_map": f.object_map.iter().map(|&o| tb.objects()[o].clone()).collect::<Vec<_>>(),
        "components": table_to_json(sb, tb, f.source.field, comps),
    })
}

pub fn homotopy_to_json(h: &HomotopyData) -> Value {
    let b = h.base.basis();
    let comps = (2..=h.arity_bound()).flat_map(|n| h.components(n).iter());
    json!({
        "schema": AINF_MAP,
        "kind": "homotopy",
        "shift": "1-n",
        "source": structure_to_json(&h.base),
        "components": table_to_json(b, b, h.base.field, comps),
    })
}

pub fn morphism_homotopy_to_json(h: &MorphismHomotopy) -> Value {
    let (sb, tb) = (h.source.basis(), h.target.basis());
    let comps = (1..=h.arity_bound()).flat_map(|n| h.components(n).iter());
    json!({
        "schema": AINF_MAP,
        "kind": "morphism-homotopy",
        "shift": "-n",
        "source": structure_to_json(&h.source),
        "target": structure_to_json(&h.target),
        "object_map": h.object_map.iter().map(|&o| tb.objects()[o].clone()).collect::<Vec<_>>(),
        "components": table_to_json(sb, tb, h.source.field, comps),
    })
}

/// The three kinds of `ainf-map/v1` file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapFile {
    Functor(AInfFunctor),
    Homotopy(HomotopyData),
    MorphismHomotopy(MorphismHomotopy),
}

pub fn map_to_json(m: &MapFile) -> Value {
    match m {
        MapFile::Functor(f) => functor_to_json(f),
        MapFile::Homotopy(h) => homotopy_to_json(h),
        MapFile::MorphismHomotopy(h) => morphism_homotopy_to_json(h),
    }
}

pub fn map_from_json(v: &Value) -> Result<MapFile> {
    check_schema(v, AINF_MAP)?;
    let kind = str_of(v, "kind")?;
    let shift = str_of(v, "shift")?;
    let expected = if kind == "morphism-homotopy" { "-n" } else { "1-n" };
    if shift != expected {
        return Err(bad(format!("kind {kind:?} needs shift {expected:?}, found {shift:?}")));
    }
    let source = Arc::new(structure_from_json(field_of(v, "source")?)?);
    let sb = source.basis().clone();
    let field = source.field;
    if kind == "homotopy" {
        let mut h = HomotopyData::zero(source.clone());
        for (w, val) in table_from_json(&sb, &sb, field, field_of(v, "components")?)? {
            h.set_component(&w, val)?;
        }
        return Ok(MapFile::Homotopy(h));
    }
    let target = Arc::new(structure_from_json(field_of(v, "target")?)?);
    let tb = target.basis().clone();
    let object_map: Vec<usize> = array_of(v, "object_map")?
        .iter()
        .map(|o| {
            let o = o.as_str().ok_or_else(|| bad("object names are strings"))?;
            tb.object_index(o).ok_or_else(|| bad(format!("unknown object {o:?}")))
        })
        .collect::<Result<_>>()?;
    let entries = table_from_json(&sb, &tb, field, field_of(v, "components")?)?;
    match kind {
        "functor" => {
            let mut f = AInfFunctor::new(source, target, object_map)?;
            for (w, val) in entries {
                f.set_component(&w, val)?;
            }
            Ok(MapFile::Functor(f))
        }
        "morphism-homotopy" => {
            let base = AInfFunctor::new(source, target, object_map)?;
            let mut h = MorphismHomotopy::zero(&base);
            for (w, val) in entries {
                h.set_component(&w, val)?;
            }
            Ok(MapFile::MorphismHomotopy(h))
        }
        other => Err(bad(format!("unknown map kind {other:?}"))),
    }
}

fn dual_word_key(labels: &[String], w: &[u32]) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(|&i| labels[i as usize].as_str()).collect::<Vec<_>>().join(" ")
    }
}

fn dual_word_parse(labels: &[String], s: &str) -> Result<Word> {
    if s == "1" {
        return Ok(Vec::new());
    }
    s.split(' ')
        .map(|l| labels.iter().position(|x| x == l).map(|i| i as u32).ok_or_else(|| bad(format!("unknown dual generator {l:?}"))))
        .collect()
}

pub fn dual_element_to_json(field: FieldSpec, labels: &[String], x: &DualElement) -> Value {
    Value::Object(x.iter().map(|(w, c)| (dual_word_key(labels, w), Value::String(field.format_scalar(c)))).collect())
}

fn dual_element_from_json(field: FieldSpec, labels: &[String], v: &Value) -> Result<DualElement> {
    let mut out = DualElement::new();
    for (k, c) in v.as_object().ok_or_else(|| bad("a dual element must be an object"))? {
        let c = c.as_str().ok_or_else(|| bad("coefficients are strings"))?;
        out.add_term(dual_word_parse(labels, k)?, &field.parse_scalar(c)?);
    }
    Ok(out)
}

pub fn dual_to_json(r: &TruncatedDualAlgebra) -> Value {
    json!({
        "schema": DUALALG,
        "field": r.field.to_string(),
        "generators": r.labels,
        "source_generators": r.source_gens,
        "K": r.k,
        "relations": r.relations.iter().map(|x| dual_element_to_json(r.field, &r.labels, x)).collect::<Vec<_>>(),
        "normal_basis": r.normal_basis().iter().map(|w| dual_word_key(&r.labels, w)).collect::<Vec<_>>(),
        "hilbert_function": r.hilbert_function(),
    })
}

/// Rebuilds the algebra from its relations and checks the stored normal
/// basis against the recomputed one.
pub fn dual_from_json(v: &Value) -> Result<TruncatedDualAlgebra> {
    check_schema(v, DUALALG)?;
    let field: FieldSpec = str_of(v, "field")?.parse()?;
    let labels: Vec<String> = serde_json::from_value(field_of(v, "generators")?.clone())?;
    let source_gens: Vec<u32> = match v.get("source_generators") {
        Some(x) => serde_json::from_value(x.clone())?,
        None => (0..labels.len() as u32).collect(),
    };
    let k = usize_of(v, "K")?;
    let relations = array_of(v, "relations")?
        .iter()
        .map(|x| dual_element_from_json(field, &labels, x))
        .collect::<Result<Vec<_>>>()?;
    let r = TruncatedDualAlgebra::from_relations(field, labels.clone(), source_gens, k, relations, ExecMode::default());
    let stored: Vec<Word> = array_of(v, "normal_basis")?
        .iter()
        .map(|w| dual_word_parse(&labels, w.as_str().ok_or_else(|| bad("normal basis words are strings"))?))
        .collect::<Result<_>>()?;
    if stored != r.normal_basis() {
        return Err(Error::Invalid("stored normal basis does not match the relations".into()));
    }
    Ok(r)
}

fn module_map_entries(
    field: FieldSpec,
    labels: &[String],
    row: &HashMap<u32, usize>,
    col: &HashMap<u32, usize>,
    m: &ModuleMap,
) -> Vec<Value> {
    let mut out = Vec::new();
    for (x, img) in m {
        for (o, c) in img {
            if c.is_empty() {
                continue;
            }
            out.push(json!({"row": row[o], "col": col[x], "poly": dual_element_to_json(field, labels, c)}));
        }
    }
    out
}

/// The deformed module as a two-term-per-degree complex: one term per
/// module degree, a single differential block with rows and columns
/// indexed by all module generators.
pub fn deformed_to_json(d: &DeformedModuleComplex) -> Value {
    let r = d.algebra();
    let b = d.pair.basis();
    let idx: HashMap<u32, usize> = d.module_gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut by_degree: BTreeMap<i32, usize> = BTreeMap::new();
    for &g in &d.module_gens {
        *by_degree.entry(b.gen(g).degree).or_default() += 1;
    }
    json!({
        "schema": DEFCOMPLEX,
        "field": r.field.to_string(),
        "K": r.k,
        "variables": r.labels,
        "generators": d.module_gens.iter().map(|&g| gen_ref(b, g)).collect::<Vec<_>>(),
        "terms": by_degree.iter().map(|(d, n)| json!({"rank": n, "degree": d})).collect::<Vec<_>>(),
        "differentials": [module_map_entries(r.field, &r.labels, &idx, &idx, &d.differential)],
    })
}

/// Adapted complex: term `i` is `Hom^0(P^i, O) ⊗ R(O)` in degree `i`;
/// `differentials[i]` maps term `i+1` to term `i`.
pub fn adapted_to_json(s: &AInfStructure, c: &AdaptedComplex) -> Value {
    let r = &c.dual.algebra;
    let b = s.basis();
    let index = |t: &Vec<u32>| -> HashMap<u32, usize> { t.iter().enumerate().map(|(i, &g)| (g, i)).collect() };
    let diffs: Vec<Value> = c
        .differentials
        .iter()
        .enumerate()
        .map(|(i, m)| Value::Array(module_map_entries(r.field, &r.labels, &index(&c.terms[i]), &index(&c.terms[i + 1]), m)))
        .collect();
    json!({
        "schema": DEFCOMPLEX,
        "field": r.field.to_string(),
        "K": r.k,
        "variables": r.labels,
        "generators": c.terms.iter().flatten().map(|&g| gen_ref(b, g)).collect::<Vec<_>>(),
        "terms": c.terms.iter().enumerate().map(|(i, t)| json!({"rank": t.len(), "degree": i})).collect::<Vec<_>>(),
        "differentials": diffs,
    })
}

pub fn poly_to_json(field: FieldSpec, p: &JetPoly) -> Value {
    Value::Object(
        p.terms()
            .map(|(m, c)| {
                let key = m.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
                (key, Value::String(field.format_scalar(c)))
            })
            .collect(),
    )
}

pub fn poly_from_json(field: FieldSpec, nvars: usize, order: usize, v: &Value) -> Result<JetPoly> {
    let mut p = JetPoly::zero(nvars, order);
    for (k, c) in v.as_object().ok_or_else(|| bad("a polynomial must be an object"))? {
        let m: Vec<u32> = if k.is_empty() {
            Vec::new()
        } else {
            k.split(',').map(|e| e.trim().parse().map_err(|_| bad(format!("bad exponent vector {k:?}")))).collect::<Result<_>>()?
        };
        if m.len() != nvars {
            return Err(bad(format!("exponent vector {k:?} needs {nvars} entries")));
        }
        let c = c.as_str().ok_or_else(|| bad("coefficients are strings"))?;
        p.add_term(m, &field.parse_scalar(c)?);
    }
    Ok(p)
}

pub fn matrix_to_json(field: FieldSpec, m: &JetMatrix) -> Value {
    json!({
        "rows": m.rows,
        "cols": m.cols,
        "entries": m.entries.iter().map(|e| poly_to_json(field, e)).collect::<Vec<_>>(),
    })
}

fn matrix_from_json(field: FieldSpec, nvars: usize, order: usize, v: &Value) -> Result<JetMatrix> {
    let (rows, cols) = (usize_of(v, "rows")?, usize_of(v, "cols")?);
    let entries = array_of(v, "entries")?
        .iter()
        .map(|e| poly_from_json(field, nvars, order, e))
        .collect::<Result<Vec<_>>>()?;
    if entries.len() != rows * cols {
        return Err(bad(format!("{rows}x{cols} matrix needs {} entries", rows * cols)));
    }
    Ok(JetMatrix { rows, cols, nvars, order, entries })
}

/// Contents of a `jet/v1` file; every part is optional.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct JetFile {
    pub field: FieldSpec,
    pub nvars: usize,
    pub order: usize,
    pub matrix: Option<JetMatrix>,
    pub automorphism: Option<JetAutomorphism>,
    pub ideals: Vec<(String, JetIdeal)>,
}

pub fn jet_to_json(j: &JetFile) -> Value {
    let mut v = json!({"schema": JET, "field": j.field.to_string(), "nvars": j.nvars, "order": j.order});
    if let Some(m) = &j.matrix {
        v["matrix"] = matrix_to_json(j.field, m);
    }
    if let Some(a) = &j.automorphism {
        v["automorphism"] = Value::Array(a.images.iter().map(|p| poly_to_json(j.field, p)).collect());
    }
    if !j.ideals.is_empty() {
        v["ideals"] = Value::Object(
            j.ideals
                .iter()
                .map(|(name, i)| (name.clone(), Value::Array(i.generators.iter().map(|p| poly_to_json(j.field, p)).collect())))
                .collect(),
        );
    }
    v
}

pub fn jet_from_json(v: &Value) -> Result<JetFile> {
    check_schema(v, JET)?;
    let field: FieldSpec = str_of(v, "field")?.parse()?;
    let (nvars, order) = (usize_of(v, "nvars")?, usize_of(v, "order")?);
    let polys = |x: &Value| -> Result<Vec<JetPoly>> {
        x.as_array()
            .ok_or_else(|| bad("expected an array of polynomials"))?
            .iter()
            .map(|p| poly_from_json(field, nvars, order, p))
            .collect()
    };
    let matrix = v.get("matrix").map(|m| matrix_from_json(field, nvars, order, m)).transpose()?;
    let automorphism = v.get("automorphism").map(|a| JetAutomorphism::new(polys(a)?)).transpose()?;
    let mut ideals = Vec::new();
    if let Some(is) = v.get("ideals") {
        for (name, gens) in is.as_object().ok_or_else(|| bad("ideals must be an object"))? {
            ideals.push((name.clone(), JetIdeal { nvars, order, generators: polys(gens)? }));
        }
    }
    Ok(JetFile { field, nvars, order, matrix, automorphism, ideals })
}

pub fn killlog_to_json(s: &AInfStructure, steps: &[KillStep]) -> Value {
    let b = s.basis();
    json!({
        "schema": KILLLOG,
        "field": s.field.to_string(),
        "stages": steps.iter().map(|st| json!({
            "stage": st.stage,
            "f": table_to_json(b, b, s.field, st.f.iter()),
            "sign": st.sign,
            "residual_before": st.residual_before.to_string(),
            "residual_after": st.residual_after.to_string(),
        })).collect::<Vec<_>>(),
    })
}

/// Steps of a kill log, resolved against the basis they were computed on.
pub fn killlog_from_json(b: &Basis, v: &Value) -> Result<Vec<KillStep>> {
    check_schema(v, KILLLOG)?;
    let field: FieldSpec = str_of(v, "field")?.parse()?;
    array_of(v, "stages")?
        .iter()
        .map(|st| {
            let f: Table = table_from_json(b, b, field, field_of(st, "f")?)?.into_iter().collect();
            let sign = field_of(st, "sign")?.as_i64().ok_or_else(|| bad("sign must be ±1"))?;
            if sign.abs() != 1 {
                return Err(bad("sign must be ±1"));
            }
            let num = |k: &str| -> Result<num_bigint::BigInt> { str_of(st, k)?.parse().map_err(|_| bad(format!("bad {k}"))) };
            Ok(KillStep {
                stage: usize_of(st, "stage")?,
                f,
                sign: sign as i8,
                residual_before: num("residual_before")?,
                residual_after: num("residual_after")?,
            })
        })
        .collect()
}

/// Per arity: number of failing words and the largest coefficient height.
pub fn residual_norms(report: &Report, up_to: usize) -> Vec<Value> {
    (1..=up_to)
        .map(|n| {
            let here: Vec<_> = report.iter().filter(|r| r.arity == n).collect();
            let max = here
                .iter()
                .flat_map(|r| r.value.iter().map(|(_, c)| c.height()))
                .max()
                .unwrap_or_default();
            json!({"arity": n, "failing": here.len(), "max_height": max.to_string()})
        })
        .collect()
}

pub fn residuals_to_json(b: &Basis, field: FieldSpec, report: &Report, limit: usize) -> Value {
    Value::Array(
        report
            .iter()
            .take(limit)
            .map(|r| json!({"arity": r.arity, "inputs": word_to_json(b, &r.inputs), "value": vector_to_json(b, field, &r.value)}))
            .collect(),
    )
}

/// Arity-by-arity residuals of the transferred structure and of the
/// functor from the dg-model.
pub fn transfer_report_to_json(model: &MinimalModel, ainf: &Report, functor: &Report, up_to: usize) -> Value {
    json!({
        "schema": TRANSFER_REPORT,
        "arity": up_to,
        "dg_generators": model.functor.source.basis().len(),
        "cohomology_generators": model.structure.basis().len(),
        "ainf_residuals": residual_norms(ainf, up_to),
        "functor_residuals": residual_norms(functor, up_to),
        "clean": ainf.is_empty() && functor.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::dual_algebra;
    use crate::fixtures;
    use crate::kill::{kill_all, KillTarget};
    use crate::transfer::local_algebra_fixture;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn round_trip_structure(s: &AInfStructure) {
        let text = to_text(&structure_to_json(s));
        let back = structure_from_json(&parse_json(&text).unwrap()).unwrap();
        assert_eq!(&back, s);
        assert_eq!(to_text(&structure_to_json(&back)), text);
    }

    #[test]
    fn structures_round_trip() {
        round_trip_structure(&local_algebra_fixture(3, 4, FieldSpec::Rationals).unwrap());
        round_trip_structure(&local_algebra_fixture(2, 3, FieldSpec::Prime(7)).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        round_trip_structure(fixtures::kill_target(&mut rng, [3, 1, 2], 3, 0.5, FieldSpec::Rationals).structure());
    }

    #[test]
    fn pairs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = fixtures::kill_target(&mut rng, [3, 1, 2], 3, 0.5, FieldSpec::Rationals);
        let back = pair_from_json(&pair_to_json(&p)).unwrap();
        assert_eq!(back.structure(), p.structure());
        assert_eq!((back.x(), back.y()), (p.x(), p.y()));
    }

    #[test]
    fn maps_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = Arc::new(fixtures::two_step_algebra(&mut rng, 2, 1, 3, FieldSpec::Rationals));
        let f = fixtures::random_functor(&mut rng, s.clone(), 2).unwrap();
        let m = MapFile::Functor(f.clone());
        assert_eq!(map_from_json(&map_to_json(&m)).unwrap(), m);
        let mut h = HomotopyData::zero(s.clone());
        let a = s.basis().gens_in(0, 0, 1);
        h.set_component(&[a[0], a[1]], Vector::single(a[0], FieldSpec::Rationals.from_i64(3))).unwrap();
        let m = MapFile::Homotopy(h);
        assert_eq!(map_from_json(&map_to_json(&m)).unwrap(), m);
        let mh = MorphismHomotopy::zero(&f);
        let m = MapFile::MorphismHomotopy(mh);
        assert_eq!(map_from_json(&map_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn shift_must_match_kind() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let s = Arc::new(fixtures::two_step_algebra(&mut rng, 2, 1, 3, FieldSpec::Rationals));
        let mut v = homotopy_to_json(&HomotopyData::zero(s));
        v["shift"] = json!("-n");
        assert!(matches!(map_from_json(&v), Err(Error::Parse(_))));
    }

    #[test]
    fn dual_algebra_round_trips() {
        let d = local_algebra_fixture(3, 5, FieldSpec::Rationals).unwrap();
        let m = crate::transfer::transfer(&d, &crate::transfer::contraction_from_dg(&d), 5).unwrap();
        let r = dual_algebra(&crate::dual::positive_part(&m.structure, 0).unwrap(), 0, 4).unwrap();
        let v = dual_to_json(&r);
        assert_eq!(v["hilbert_function"], json!([1, 1, 1, 0, 0]));
        let back = dual_from_json(&v).unwrap();
        assert_eq!(back.normal_basis(), r.normal_basis());
        assert_eq!(dual_to_json(&back), v);
    }

    #[test]
    fn jet_files_round_trip() {
        let mut p = JetPoly::var(2, 3, 0);
        p.add_term(vec![0, 2], &FieldSpec::Rationals.from_i64(-1));
        let phi = JetAutomorphism::new(vec![p.clone(), JetPoly::var(2, 3, 1)]).unwrap();
        let m = JetMatrix::coordinate(1, 2, 2, 3);
        let j = JetFile {
            field: FieldSpec::Rationals,
            nvars: 2,
            order: 3,
            matrix: Some(m.clone()),
            automorphism: Some(phi),
            ideals: vec![("I".into(), crate::jet::minors(&m, 1).unwrap())],
        };
        let v = jet_to_json(&j);
        assert_eq!(v["automorphism"][0], json!({"1,0": "1/1", "0,2": "-1/1"}));
        assert_eq!(jet_from_json(&v).unwrap(), j);
    }

    #[test]
    fn kill_logs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = KillTarget::new(fixtures::kill_target(&mut rng, [4, 2, 2], 4, 0.5, FieldSpec::Rationals)).unwrap();
        let (_, steps) = kill_all(&t, 4).unwrap();
        let v = killlog_to_json(t.structure(), &steps);
        assert_eq!(killlog_from_json(t.pair.basis(), &v).unwrap(), steps);
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_json("{\n  \"schema\": \"ainf/v1\",\n  oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = std::env::temp_dir().join(format!("ainf-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("x.json");
        write_atomic(&p, "a").unwrap();
        write_atomic(&p, "b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn random_pairs_round_trip(seed in 0u64..10_000, p in prop::sample::select(vec![0u64, 5, 7])) {
            let field = if p == 0 { FieldSpec::Rationals } else { FieldSpec::Prime(p) };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pair = fixtures::random_pair(&mut rng, [2, 1, 1, 2], 3, 0.6, field);
            let s = pair.structure();
            let back = structure_from_json(&structure_to_json(s)).unwrap();
            prop_assert_eq!(&back, s);
        }
    }
}
