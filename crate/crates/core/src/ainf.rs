//! A∞-structures on finite graded quivers and their defining identity.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::basis::{Basis, Vector, Word};
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::scalar::{FieldSpec, Scalar};

/// Sparse table of one multilinear operation on basis words.
pub type Table = BTreeMap<Word, Vector>;

/// Operations `m_1, …, m_N` of an A∞-category, stored on basis words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfStructure {
    pub field: FieldSpec,
    basis: Arc<Basis>,
    products: Vec<Table>,
}

/// One failing instance of an identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub arity: usize,
    pub inputs: Word,
    pub value: Vector,
}

pub type Report = Vec<Residual>;

/// Turns an accumulator into a report sorted by (arity, word).
pub(crate) fn into_report(acc: HashMap<Word, Vector>) -> Report {
    let mut out: Report = acc
        .into_iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(w, value)| Residual {
            arity: w.len(),
            inputs: w,
            value,
        })
        .collect();
    out.sort_by(|a, b| (a.arity, &a.inputs).cmp(&(b.arity, &b.inputs)));
    out
}

pub(crate) fn merge_acc(mut a: HashMap<Word, Vector>, b: HashMap<Word, Vector>) -> HashMap<Word, Vector> {
    if a.len() < b.len() {
        return merge_acc(b, a);
    }
    for (k, v) in b {
        a.entry(k).or_default().add(&v);
    }
    a
}

impl AInfStructure {
    /// All products zero, arity bound `arity_bound ≥ 2`.
    pub fn new(field: FieldSpec, basis: Arc<Basis>, arity_bound: usize) -> Result<Self> {
        if arity_bound < 2 {
            return Err(Error::Invalid("arity bound must be at least 2".into()));
        }
        Ok(AInfStructure {
            field,
            basis,
            products: vec![Table::new(); arity_bound],
        })
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn arity_bound(&self) -> usize {
        self.products.len()
    }

    /// Same products, different bound (higher products dropped when lowering).
    pub fn with_arity_bound(&self, n: usize) -> Result<Self> {
        let mut out = AInfStructure::new(self.field, self.basis.clone(), n)?;
        for (i, t) in self.products.iter().enumerate().take(n) {
            out.products[i] = t.clone();
        }
        Ok(out)
    }

    pub fn products(&self, n: usize) -> &Table {
        &self.products[n - 1]
    }

    pub fn product(&self, w: &[u32]) -> Option<&Vector> {
        self.products.get(w.len().wrapping_sub(1))?.get(w)
    }

    /// Validates composability and degree, then stores (or clears) `m(w)`.
    pub fn set_product(&mut self, w: &[u32], value: Vector) -> Result<()> {
        let n = w.len();
        if n == 0 || n > self.arity_bound() {
            return Err(Error::ArityExceeded {
                requested: n,
                bound: self.arity_bound(),
            });
        }
        check_value(&self.basis, w, &value, 2 - n as i32)?;
        let value = value.map_coefficients(|c| self.field.coerce(c));
        if value.is_zero() {
            self.products[n - 1].remove(w);
        } else {
            self.products[n - 1].insert(w.to_vec(), value);
        }
        Ok(())
    }

    /// Adds `value` to `m(w)`.
    pub fn add_to_product(&mut self, w: &[u32], value: &Vector) -> Result<()> {
        let mut v = self.product(w).cloned().unwrap_or_default();
        v.add(value);
        self.set_product(w, v)
    }

    pub fn is_minimal(&self) -> bool {
        self.products[0].is_empty()
    }

    pub fn nonzero_entries(&self) -> usize {
        self.products.iter().map(|t| t.len()).sum()
    }

    /// Every stored (word, value), all arities.
    pub fn entries(&self) -> impl Iterator<Item = (&Word, &Vector)> {
        self.products.iter().flat_map(|t| t.iter())
    }

    /// Index from a generator to the entries whose value involves it,
    /// restricted to arity ≤ `up_to`.
    fn by_output(&self, up_to: usize) -> HashMap<u32, Vec<(&Word, Scalar)>> {
        let mut idx: HashMap<u32, Vec<(&Word, Scalar)>> = HashMap::new();
        for t in self.products.iter().take(up_to) {
            for (w, v) in t {
                for (&g, c) in v.iter() {
                    idx.entry(g).or_default().push((w, c.clone()));
                }
            }
        }
        idx
    }
}

/// Checks that `w` is composable and `value` lies in the correct hom space in
/// degree `Σ|a_i| + shift`.
pub(crate) fn check_value(basis: &Basis, w: &[u32], value: &Vector, shift: i32) -> Result<()> {
    check_value_into(basis, basis, w, value, shift, |o| o)
}

pub(crate) fn check_value_into(
    source: &Basis,
    target: &Basis,
    w: &[u32],
    value: &Vector,
    shift: i32,
    object_map: impl Fn(usize) -> usize,
) -> Result<()> {
    if w.iter().any(|&a| a as usize >= source.len()) {
        return Err(Error::Invalid("word letter out of range".into()));
    }
    if !source.composable(w) {
        let names: Vec<_> = w.iter().map(|&a| source.describe(a)).collect();
        return Err(Error::Invalid(format!("tuple {names:?} is not composable")));
    }
    let (s, t) = source.span(w);
    let (s, t) = (object_map(s), object_map(t));
    let deg = source.degree_sum(w) + shift;
    for &g in value.keys() {
        let gen = target.gen(g);
        if gen.source != s || gen.target != t || gen.degree != deg {
            return Err(Error::Invalid(format!(
                "value term {} is not in Hom({}, {}) of degree {deg}",
                target.describe(g),
                target.objects()[s],
                target.objects()[t]
            )));
        }
    }
    Ok(())
}

/// Residuals of `Σ (-1)^{j+l(k-j)+ε} m_k(a_1,…,m_l(a_j,…),…,a_n)` for all
/// `n ≤ up_to`, with `ε = l Σ_{i<j} |a_i|`. Empty iff the identity holds.
pub fn check_ainf(s: &AInfStructure, up_to: usize) -> Result<Report> {
    check_ainf_with(s, up_to, ExecMode::default())
}

pub fn check_ainf_with(s: &AInfStructure, up_to: usize, mode: ExecMode) -> Result<Report> {
    if up_to > s.arity_bound() {
        return Err(Error::ArityExceeded {
            requested: up_to,
            bound: s.arity_bound(),
        });
    }
    let basis = &s.basis;
    let inner = s.by_output(up_to);
    let outer: Vec<(&Word, &Vector)> = s.products.iter().take(up_to).flat_map(|t| t.iter()).collect();
    let acc = par::map_reduce(
        mode,
        &outer,
        HashMap::new,
        |acc: &mut HashMap<Word, Vector>, (tw, tv)| {
            let k = tw.len();
            let mut prefix_deg: i64 = 0;
            for j in 1..=k {
                let slot = tw[j - 1];
                if let Some(list) = inner.get(&slot) {
                    for (uw, c) in list {
                        let l = uw.len();
                        if k + l - 1 > up_to {
                            continue;
                        }
                        let e = j as i64 + (l * (k - j)) as i64 + l as i64 * prefix_deg;
                        let coeff = Scalar::sign(e) * c;
                        let mut key = Vec::with_capacity(k + l - 1);
                        key.extend_from_slice(&tw[..j - 1]);
                        key.extend_from_slice(uw);
                        key.extend_from_slice(&tw[j..]);
                        acc.entry(key).or_default().add_scaled(tv, &coeff);
                    }
                }
                prefix_deg += basis.gen(slot).degree as i64;
            }
        },
        merge_acc,
    );
    Ok(into_report(acc))
}

/// Opposite category: `Hom^op(A,B) = Hom(B,A)` and
/// `m_n^op(a_1,…,a_n) = (-1)^{C(n+1,2)+1+ε} m_n(a_n,…,a_1)`,
/// `ε = Σ_{i<j} |a_i| |a_j|`.
pub fn opposite(s: &AInfStructure) -> AInfStructure {
    let b = &s.basis;
    let hom = b.hom().iter().map(|(&(src, tgt), sp)| ((tgt, src), sp.clone())).collect();
    let weights = b
        .weights()
        .into_iter()
        .map(|((src, tgt, d, l), w)| ((tgt, src, d, l), w))
        .collect();
    let ob = Arc::new(Basis::with_weights(b.objects().to_vec(), hom, &weights).expect("transposed basis"));
    let to_op: Vec<u32> = b
        .gens()
        .iter()
        .map(|g| ob.find(g.target, g.source, g.degree, &g.label).unwrap())
        .collect();
    let mut out = AInfStructure::new(s.field, ob, s.arity_bound()).unwrap();
    for t in &s.products {
        for (w, v) in t {
            let n = w.len() as i64;
            let red: Vec<i64> = w.iter().map(|&a| b.gen(a).degree as i64).collect();
            let mut eps = 0i64;
            for i in 0..red.len() {
                for j in i + 1..red.len() {
                    eps += red[i] * red[j];
                }
            }
            let sign = Scalar::sign(n * (n + 1) / 2 + 1 + eps);
            let ow: Word = w.iter().rev().map(|&a| to_op[a as usize]).collect();
            let ov: Vector = v.iter().map(|(&g, c)| (to_op[g as usize], c * &sign)).collect();
            out.products[w.len() - 1].insert(ow, ov);
        }
    }
    out
}

/// An A∞-structure with two objects `X`, `Y` such that `Hom(Y,X)` and
/// `Hom(X,X)` vanish: the algebra is `A = Hom(Y,Y)`, the module `M = Hom(X,Y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfPair {
    structure: AInfStructure,
    x: usize,
    y: usize,
}

impl AInfPair {
    pub fn new(structure: AInfStructure, x: usize, y: usize) -> Result<Self> {
        let b = structure.basis();
        if b.objects().len() != 2 || x == y || x > 1 || y > 1 {
            return Err(Error::WrongModuleShape("a pair needs exactly two objects".into()));
        }
        for (s, t) in [(y, x), (x, x)] {
            if b.hom_space(s, t).is_some_and(|sp| !sp.is_zero()) {
                return Err(Error::WrongModuleShape(format!(
                    "Hom({}, {}) must vanish",
                    b.objects()[s],
                    b.objects()[t]
                )));
            }
        }
        Ok(AInfPair { structure, x, y })
    }

    /// Pair found by object names.
    pub fn from_names(structure: AInfStructure, x: &str, y: &str) -> Result<Self> {
        let b = structure.basis();
        let xi = b
            .object_index(x)
            .ok_or_else(|| Error::WrongModuleShape(format!("no object {x:?}")))?;
        let yi = b
            .object_index(y)
            .ok_or_else(|| Error::WrongModuleShape(format!("no object {y:?}")))?;
        AInfPair::new(structure, xi, yi)
    }

    /// Guesses `X`, `Y` from which hom spaces are nonzero.
    pub fn infer(structure: AInfStructure) -> Result<Self> {
        let a = AInfPair::new(structure.clone(), 0, 1);
        if a.is_ok() {
            return a;
        }
        AInfPair::new(structure, 1, 0)
    }

    pub fn structure(&self) -> &AInfStructure {
        &self.structure
    }

    pub fn into_structure(self) -> AInfStructure {
        self.structure
    }

    pub fn x(&self) -> usize {
        self.x
    }

    pub fn y(&self) -> usize {
        self.y
    }

    pub fn basis(&self) -> &Arc<Basis> {
        self.structure.basis()
    }

    pub fn field(&self) -> FieldSpec {
        self.structure.field
    }

    pub fn algebra_gens(&self) -> Vec<u32> {
        self.gens_of(self.y, self.y)
    }

    pub fn module_gens(&self) -> Vec<u32> {
        self.gens_of(self.x, self.y)
    }

    /// Algebra generators of one degree.
    pub fn algebra_gens_in(&self, degree: i32) -> Vec<u32> {
        self.basis().gens_in(self.y, self.y, degree)
    }

    pub fn module_gens_in(&self, degree: i32) -> Vec<u32> {
        self.basis().gens_in(self.x, self.y, degree)
    }

    fn gens_of(&self, s: usize, t: usize) -> Vec<u32> {
        let b = self.basis();
        (0..b.len() as u32)
            .filter(|&g| b.gen(g).source == s && b.gen(g).target == t)
            .collect()
    }
}

/// The pair `A = Hom(O,O)`, `M = Hom(X,O)` cut out of `s`, with products
/// inherited. When `X = O` the module object is a renamed copy of `O`.
pub fn representable_pair(s: &AInfStructure, o: usize, x: usize) -> Result<AInfPair> {
    let b = s.basis();
    if o >= b.objects().len() || x >= b.objects().len() {
        return Err(Error::Invalid("object index out of range".into()));
    }
    let oname = b.objects()[o].clone();
    let mut xname = b.objects()[x].clone();
    if x == o {
        xname.push('\'');
    }
    // new indices: X = 0, Y = 1
    let mut hom = BTreeMap::new();
    let mut weights = HashMap::new();
    for (src, old_src) in [(1usize, o), (0usize, x)] {
        if let Some(sp) = b.hom_space(old_src, o) {
            hom.insert((src, 1), sp.clone());
            for (d, labels) in sp.degrees() {
                for l in labels {
                    let g = b.gen(b.find(old_src, o, d, l).unwrap());
                    if g.weight > 0 {
                        weights.insert((src, 1, d, l.clone()), g.weight);
                    }
                }
            }
        }
    }
    let nb = Arc::new(Basis::with_weights(vec![xname, oname], hom, &weights)?);
    let map_to = |g: u32, src: usize| -> u32 {
        let gen = b.gen(g);
        nb.find(src, 1, gen.degree, &gen.label).unwrap()
    };
    let mut out = AInfStructure::new(s.field, nb.clone(), s.arity_bound())?;
    let in_a = |g: u32| b.gen(g).source == o && b.gen(g).target == o;
    let in_m = |g: u32| b.gen(g).source == x && b.gen(g).target == o;
    for (w, v) in s.entries() {
        let (init, last) = w.split_at(w.len() - 1);
        if !init.iter().all(|&a| in_a(a)) {
            continue;
        }
        if in_a(last[0]) {
            let nw: Word = w.iter().map(|&a| map_to(a, 1)).collect();
            let nv: Vector = v.iter().map(|(&g, c)| (map_to(g, 1), c.clone())).collect();
            out.products[w.len() - 1].insert(nw, nv);
        }
        if in_m(last[0]) {
            let mut nw: Word = init.iter().map(|&a| map_to(a, 1)).collect();
            nw.push(map_to(last[0], 0));
            let nv: Vector = v.iter().map(|(&g, c)| (map_to(g, 0), c.clone())).collect();
            out.products[w.len() - 1].insert(nw, nv);
        }
    }
    AInfPair::new(out, 0, 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::hom_map;

    /// Exterior algebra on two odd generators: m2 only.
    fn exterior() -> AInfStructure {
        let b = Arc::new(
            Basis::new(
                vec!["O".into()],
                hom_map(&[(0, 0, &[(0, &["1"]), (1, &["a", "b"]), (2, &["ab"])])]),
            )
            .unwrap(),
        );
        let g = |d, l| b.find(0, 0, d, l).unwrap();
        let (one, a, bb, ab) = (g(0, "1"), g(1, "a"), g(1, "b"), g(2, "ab"));
        let mut s = AInfStructure::new(FieldSpec::Rationals, b.clone(), 4).unwrap();
        let v = |x: u32, c: i64| Vector::single(x, Scalar::from(c));
        for x in [one, a, bb, ab] {
            s.set_product(&[one, x], v(x, 1)).unwrap();
            s.set_product(&[x, one], v(x, 1)).unwrap();
        }
        s.set_product(&[a, bb], v(ab, 1)).unwrap();
        s.set_product(&[bb, a], v(ab, -1)).unwrap();
        s
    }

    #[test]
    fn graded_associative_algebra_is_ainf() {
        assert!(check_ainf(&exterior(), 4).unwrap().is_empty());
    }

    #[test]
    fn arity_beyond_bound_rejected() {
        assert!(matches!(check_ainf(&exterior(), 5), Err(Error::ArityExceeded { .. })));
    }

    #[test]
    fn degree_is_validated() {
        let mut s = exterior();
        let b = s.basis().clone();
        let a = b.find(0, 0, 1, "a").unwrap();
        assert!(s.set_product(&[a, a], Vector::single(a, Scalar::one())).is_err());
    }

    #[test]
    fn altered_m3_breaks_arity_4() {
        let mut s = exterior();
        let b = s.basis().clone();
        let a = b.find(0, 0, 1, "a").unwrap();
        let one = b.find(0, 0, 0, "1").unwrap();
        // m3(a,a,1) has degree 1+1+0-1 = 1
        s.set_product(&[a, a, one], Vector::single(a, Scalar::one())).unwrap();
        let r = check_ainf(&s, 4).unwrap();
        assert!(!r.is_empty());
        assert!(r.iter().all(|x| x.arity == 4));
    }

    #[test]
    fn opposite_signs() {
        let s = exterior();
        let op = opposite(&s);
        let b = op.basis();
        let (a, bb, ab) = (
            b.find(0, 0, 1, "a").unwrap(),
            b.find(0, 0, 1, "b").unwrap(),
            b.find(0, 0, 2, "ab").unwrap(),
        );
        // odd a, b: m2^op(a,b) = -m2(b,a) = ab
        assert_eq!(op.product(&[a, bb]), Some(&Vector::single(ab, Scalar::one())));
        assert!(check_ainf(&op, 4).unwrap().is_empty());
        assert_eq!(opposite(&op), s);
    }

    #[test]
    fn self_representable_pair() {
        let s = exterior();
        let p = representable_pair(&s, 0, 0).unwrap();
        assert_eq!(p.algebra_gens().len(), 4);
        assert_eq!(p.module_gens().len(), 4);
        assert!(check_ainf(p.structure(), 4).unwrap().is_empty());
    }
}
