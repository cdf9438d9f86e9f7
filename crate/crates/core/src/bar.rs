//! Truncated bar coalgebras: coderivations, coalgebra morphisms and
//! conjugation of a coderivation by an invertible morphism.
//!
//! A bar word is a sequence of suspended generators; letter `a` has degree
//! `|a| - 1`. Components are stored on words of the same generator indices.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ainf::{into_report, merge_acc, AInfStructure, Report, Table};
use crate::basis::{Basis, Vector, Word};
use crate::combo::Combo;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::par::{self, ExecMode};
use crate::scalar::{FieldSpec, Scalar};

/// Sparse combination of bar words.
pub type BarElement = Combo<Word>;

/// All ways to cut `0..n` into `r ≥ 1` consecutive nonempty blocks, as the
/// list of block end points.
pub fn compositions(n: usize) -> impl Iterator<Item = Vec<usize>> {
    let cuts = n.saturating_sub(1);
    (0u64..(1u64 << cuts)).map(move |mask| {
        let mut ends = Vec::new();
        for i in 0..cuts {
            if mask & (1 << i) != 0 {
                ends.push(i + 1);
            }
        }
        ends.push(n);
        ends
    })
}

/// Expands `v_1 ⊗ … ⊗ v_r` into words.
pub fn tensor(parts: &[&Vector]) -> BarElement {
    let mut acc: Vec<(Word, Scalar)> = vec![(Vec::new(), Scalar::one())];
    for p in parts {
        let mut next = Vec::with_capacity(acc.len() * p.len());
        for (w, c) in &acc {
            for (&g, d) in p.iter() {
                let mut w2 = w.clone();
                w2.push(g);
                next.push((w2, c * d));
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc.into_iter().collect()
}

fn suspended_degree(basis: &Basis, a: u32) -> i64 {
    basis.gen(a).degree as i64 - 1
}

/// The degree +1 coderivation determined by components `b_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarCoderivation {
    basis: Arc<Basis>,
    components: Vec<Table>,
}

impl BarCoderivation {
    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn arity_bound(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, w: &[u32]) -> Option<&Vector> {
        self.components.get(w.len().wrapping_sub(1))?.get(w)
    }

    pub fn components(&self, n: usize) -> &Table {
        &self.components[n - 1]
    }

    /// Products recovered from the components.
    pub fn to_structure(&self, field: FieldSpec) -> AInfStructure {
        let mut s = AInfStructure::new(field, self.basis.clone(), self.arity_bound().max(2)).unwrap();
        for t in &self.components {
            for (w, v) in t {
                let sign = self.basis.bar_sign(w);
                s.set_product(w, v.scaled(&sign)).unwrap();
            }
        }
        s
    }

    /// `b(w) = Σ (-1)^{Σ_{i<j}|s a_i|} w_{<j} ⊗ b_l(w_j…w_{j+l-1}) ⊗ rest`.
    pub fn apply(&self, w: &[u32]) -> BarElement {
        let mut out = BarElement::new();
        self.apply_into(w, &Scalar::one(), &mut out);
        out
    }

    fn apply_into(&self, w: &[u32], scale: &Scalar, out: &mut BarElement) {
        let n = w.len();
        let mut prefix: i64 = 0;
        for j in 0..n {
            let sign = Scalar::sign(prefix) * scale;
            for l in 1..=(n - j).min(self.components.len()) {
                if let Some(v) = self.components[l - 1].get(&w[j..j + l]) {
                    for (&g, c) in v.iter() {
                        let mut key = Vec::with_capacity(n - l + 1);
                        key.extend_from_slice(&w[..j]);
                        key.push(g);
                        key.extend_from_slice(&w[j + l..]);
                        out.add_term(key, &(c * &sign));
                    }
                }
            }
            prefix += suspended_degree(&self.basis, w[j]);
        }
    }

    pub fn apply_element(&self, x: &BarElement) -> BarElement {
        let mut out = BarElement::new();
        for (w, c) in x.iter() {
            self.apply_into(w, c, &mut out);
        }
        out
    }

    /// Projection of `b(x)` to word length one.
    pub fn project(&self, x: &BarElement) -> Vector {
        let mut out = Vector::new();
        for (w, c) in x.iter() {
            if let Some(v) = self.component(w) {
                out.add_scaled(v, c);
            }
        }
        out
    }
}

/// Components `b_n(sa_1…sa_n) = (-1)^{Σ(n-i)|a_i|} s m_n(a_1,…,a_n)`.
pub fn bar_differential(s: &AInfStructure) -> BarCoderivation {
    let basis = s.basis().clone();
    let components = (1..=s.arity_bound())
        .map(|n| {
            s.products(n)
                .iter()
                .map(|(w, v)| (w.clone(), v.scaled(&basis.bar_sign(w))))
                .collect()
        })
        .collect();
    BarCoderivation { basis, components }
}

/// Word-length-one components of `b²` on words of length ≤ `up_to`.
/// Since `b²` is a coderivation these determine it.
pub fn check_bar_square(b: &BarCoderivation, up_to: usize) -> Report {
    check_bar_square_with(b, up_to, ExecMode::default())
}

pub fn check_bar_square_with(b: &BarCoderivation, up_to: usize, mode: ExecMode) -> Report {
    let up_to = up_to.min(b.arity_bound());
    let mut inner: HashMap<u32, Vec<(&Word, &Scalar)>> = HashMap::new();
    for t in b.components.iter().take(up_to) {
        for (w, v) in t {
            for (g, c) in v.iter() {
                inner.entry(*g).or_default().push((w, c));
            }
        }
    }
    let outer: Vec<(&Word, &Vector)> = b.components.iter().take(up_to).flat_map(|t| t.iter()).collect();
    let acc = par::map_reduce(
        mode,
        &outer,
        HashMap::new,
        |acc: &mut HashMap<Word, Vector>, (tw, tv)| {
            let k = tw.len();
            let mut prefix: i64 = 0;
            for j in 0..k {
                if let Some(list) = inner.get(&tw[j]) {
                    for (uw, c) in list {
                        let l = uw.len();
                        if k + l - 1 > up_to {
                            continue;
                        }
                        let coeff = Scalar::sign(prefix) * *c;
                        let mut key = Vec::with_capacity(k + l - 1);
                        key.extend_from_slice(&tw[..j]);
                        key.extend_from_slice(uw);
                        key.extend_from_slice(&tw[j + 1..]);
                        acc.entry(key).or_default().add_scaled(tv, &coeff);
                    }
                }
                prefix += suspended_degree(&b.basis, tw[j]);
            }
        },
        merge_acc,
    );
    into_report(acc)
}

/// A degree-zero coalgebra morphism `Bar(S) → Bar(S')` given by components
/// `F_n` on suspended words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarMorphism {
    pub source: Arc<Basis>,
    pub target: Arc<Basis>,
    pub object_map: Vec<usize>,
    components: Vec<Table>,
}

impl BarMorphism {
    pub fn new(source: Arc<Basis>, target: Arc<Basis>, object_map: Vec<usize>, arity_bound: usize) -> Self {
        BarMorphism {
            source,
            target,
            object_map,
            components: vec![Table::new(); arity_bound],
        }
    }

    pub fn identity(basis: Arc<Basis>, arity_bound: usize) -> Self {
        let objects = (0..basis.objects().len()).collect();
        let mut f = BarMorphism::new(basis.clone(), basis.clone(), objects, arity_bound);
        for g in 0..basis.len() as u32 {
            f.components[0].insert(vec![g], Vector::single(g, Scalar::one()));
        }
        f
    }

    pub fn arity_bound(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, w: &[u32]) -> Option<&Vector> {
        self.components.get(w.len().wrapping_sub(1))?.get(w)
    }

    pub fn components(&self, n: usize) -> &Table {
        &self.components[n - 1]
    }

    pub fn set(&mut self, w: Word, v: Vector) {
        let n = w.len();
        if v.is_zero() {
            self.components[n - 1].remove(&w);
        } else {
            self.components[n - 1].insert(w, v);
        }
    }

    pub(crate) fn set_table(&mut self, n: usize, t: Table) {
        self.components[n - 1] = t;
    }

    /// `F(w) = Σ_{blocks} F(w^1) ⊗ … ⊗ F(w^r)`; no signs since `F` is even.
    pub fn apply(&self, w: &[u32]) -> BarElement {
        let mut out = BarElement::new();
        self.apply_into(w, &Scalar::one(), &mut out);
        out
    }

    fn apply_into(&self, w: &[u32], scale: &Scalar, out: &mut BarElement) {
        let n = w.len();
        'outer: for ends in compositions(n) {
            let mut parts = Vec::with_capacity(ends.len());
            let mut start = 0;
            for &e in &ends {
                if e - start > self.components.len() {
                    continue 'outer;
                }
                match self.component(&w[start..e]) {
                    Some(v) => parts.push(v),
                    None => continue 'outer,
                }
                start = e;
            }
            out.add_scaled(&tensor(&parts), scale);
        }
    }

    pub fn apply_element(&self, x: &BarElement) -> BarElement {
        let mut out = BarElement::new();
        for (w, c) in x.iter() {
            self.apply_into(w, c, &mut out);
        }
        out
    }

    /// Length-one projection of `F(x)`.
    pub fn project(&self, x: &BarElement) -> Vector {
        let mut out = Vector::new();
        for (w, c) in x.iter() {
            if let Some(v) = self.component(w) {
                out.add_scaled(v, c);
            }
        }
        out
    }

    /// `Σ_{r ≥ min_blocks} Σ_{blocks} F_r(x(w^1) ⊗ … ⊗ x(w^r))` where `x` gives
    /// the value on each block.
    pub(crate) fn project_blocks<'a>(
        &self,
        w: &[u32],
        min_blocks: usize,
        max_blocks: usize,
        block: impl Fn(&[u32]) -> Option<&'a Vector>,
    ) -> Vector {
        let mut out = Vector::new();
        let n = w.len();
        'outer: for ends in compositions(n) {
            let r = ends.len();
            if r < min_blocks || r > max_blocks || r > self.components.len() {
                continue;
            }
            let mut parts = Vec::with_capacity(r);
            let mut start = 0;
            for &e in &ends {
                match block(&w[start..e]) {
                    Some(v) => parts.push(v),
                    None => continue 'outer,
                }
                start = e;
            }
            for (word, c) in tensor(&parts) {
                if let Some(v) = self.component(&word) {
                    out.add_scaled(v, &c);
                }
            }
        }
        out
    }

    /// `self ∘ other` truncated at the common arity bound.
    pub fn compose(&self, other: &BarMorphism, mode: ExecMode) -> Result<BarMorphism> {
        if *other.target != *self.source {
            return Err(Error::StructureMismatch("composition: middle bases differ".into()));
        }
        let n_max = self.arity_bound().min(other.arity_bound());
        let object_map = other.object_map.iter().map(|&o| self.object_map[o]).collect();
        let mut out = BarMorphism::new(other.source.clone(), self.target.clone(), object_map, n_max);
        for n in 1..=n_max {
            let words = candidate_words(&other.source, &self.target, &out.object_map, n, 1);
            let vals = par::map(mode, &words, |w| {
                self.project_blocks(w, 1, n, |b| other.component(b))
            });
            let t: Table = words.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect();
            out.set_table(n, t);
        }
        Ok(out)
    }

    /// Matrix of `F_1` on `Hom(s,t)` in degree `d`.
    fn linear_block(&self, s: usize, t: usize, d: i32) -> (Vec<u32>, Vec<u32>, Matrix) {
        let src = self.source.gens_in(s, t, d);
        let tgt = self.target.gens_in(self.object_map[s], self.object_map[t], d);
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (j, &a) in src.iter().enumerate() {
            if let Some(v) = self.component(&[a]) {
                for (i, &b) in tgt.iter().enumerate() {
                    m[(i, j)] = v.get(&b);
                }
            }
        }
        (src, tgt, m)
    }

    /// Inverse morphism, defined when the object map is bijective and `F_1`
    /// is invertible. Solved arity by arity from `F ∘ G = id`.
    pub fn inverse(&self, mode: ExecMode) -> Result<BarMorphism> {
        let k = self.object_map.len();
        let mut inv_obj = vec![usize::MAX; k];
        for (i, &o) in self.object_map.iter().enumerate() {
            if o >= k || inv_obj[o] != usize::MAX {
                return Err(Error::Invalid("object map is not a bijection".into()));
            }
            inv_obj[o] = i;
        }
        if self.target.objects().len() != k {
            return Err(Error::Invalid("object map is not a bijection".into()));
        }
        let n_max = self.arity_bound();
        let mut g = BarMorphism::new(self.target.clone(), self.source.clone(), inv_obj, n_max);
        for (&(s, t), sp) in self.source.hom() {
            for (d, _) in sp.degrees() {
                let (src, tgt, m) = self.linear_block(s, t, d);
                if src.len() != tgt.len() {
                    return Err(Error::Invalid("linear part is not invertible".into()));
                }
                let mi = linalg::inverse(&m).ok_or_else(|| Error::Invalid("linear part is not invertible".into()))?;
                for (j, &b) in tgt.iter().enumerate() {
                    let v: Vector = src.iter().enumerate().map(|(i, &a)| (a, mi[(i, j)].clone())).collect();
                    g.set(vec![b], v);
                }
            }
        }
        for (&(s, t), sp) in self.target.hom() {
            if self.source.hom_space(g.object_map[s], g.object_map[t]).map_or(0, |x| x.total_dim()) != sp.total_dim() {
                return Err(Error::Invalid("linear part is not invertible".into()));
            }
        }
        for n in 2..=n_max {
            let words = candidate_words(&self.target, &self.source, &g.object_map, n, 1);
            let vals = par::map(mode, &words, |w| {
                let rest = self.project_blocks(w, 2, n, |b| g.component(b));
                let mut out = Vector::new();
                for (x, c) in rest.iter() {
                    if let Some(v) = g.component(&[*x]) {
                        out.add_scaled(v, &-c);
                    }
                }
                out
            });
            let t: Table = words.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect();
            g.set_table(n, t);
        }
        Ok(g)
    }
}

/// Words of length `n` in `source` on which an operation of degree `c - n`
/// can be nonzero in `target` (`c = 2` for products, `1` for functor
/// components, `0` for homotopies).
pub(crate) fn candidate_words(source: &Basis, target: &Basis, object_map: &[usize], n: usize, c: i32) -> Vec<Word> {
    let shift = c - n as i32;
    let bound = if target.has_weights() || source.has_weights() {
        Some(target.max_weight())
    } else {
        None
    };
    source.words(n, bound, |w| {
        let (s, t) = source.span(w);
        target.has_degree(object_map[s], object_map[t], source.degree_sum(w) + shift)
    })
}

/// Conjugate `F ∘ b ∘ F⁻¹` of a coderivation by an invertible morphism,
/// read off on cogenerators.
pub fn conjugate(b: &BarCoderivation, f: &BarMorphism, mode: ExecMode) -> Result<BarCoderivation> {
    if *f.source != *b.basis {
        return Err(Error::StructureMismatch("morphism source differs from the coderivation's basis".into()));
    }
    let g = f.inverse(mode)?;
    let n_max = b.arity_bound().min(f.arity_bound());
    let tb = f.target.clone();
    let ident: Vec<usize> = (0..tb.objects().len()).collect();
    let mut components = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let words = candidate_words(&tb, &tb, &ident, n, 2);
        let vals = par::map(mode, &words, |w| f.project(&b.apply_element(&g.apply(w))));
        components.push(words.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect());
    }
    Ok(BarCoderivation { basis: tb, components })
}

/// Same as [`conjugate`] for a morphism with `F_1 = id`, solved arity by
/// arity from `b' ∘ F = F ∘ b` without forming `F⁻¹`:
/// `b'_n(w) = π F b(w) - Σ_{r<n} b'_r(F(w^1) ⊗ … ⊗ F(w^r))`.
pub fn conjugate_unipotent(b: &BarCoderivation, f: &BarMorphism, mode: ExecMode) -> Result<BarCoderivation> {
    conjugate_unipotent_partial(b, f, mode, usize::MAX, |_| true)
}

/// [`conjugate_unipotent`] up to arity `up_to`, keeping only the words
/// accepted by `keep` in the top arity. Arities the conjugation cannot
/// change are copied from `b`.
pub(crate) fn conjugate_unipotent_partial(
    b: &BarCoderivation,
    f: &BarMorphism,
    mode: ExecMode,
    up_to: usize,
    keep: impl Fn(&[u32]) -> bool + Sync,
) -> Result<BarCoderivation> {
    if *f.source != *b.basis || *f.target != *b.basis {
        return Err(Error::StructureMismatch("morphism must be an endomorphism of the coderivation's basis".into()));
    }
    let unipotent = f.object_map.iter().enumerate().all(|(i, &o)| i == o)
        && f.components(1).len() == b.basis.len()
        && f.components(1).iter().all(|(w, v)| v.len() == 1 && v.get(&w[0]).is_one());
    if !unipotent {
        return Err(Error::Invalid("linear part is not the identity".into()));
    }
    let n_max = b.arity_bound().min(f.arity_bound()).min(up_to);
    // with F = id + (terms of arity ≥ n0), b'_r = b_r for r < n0, and also
    // for r = n0 when b_1 = 0
    let n0 = (2..=f.arity_bound()).find(|&n| !f.components(n).is_empty()).unwrap_or(usize::MAX);
    let unchanged = if b.components(1).is_empty() { n0 } else { n0 - 1 };
    let tb = b.basis.clone();
    let ident: Vec<usize> = (0..tb.objects().len()).collect();
    let mut components: Vec<Table> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n <= unchanged {
            components.push(b.components(n).clone());
            continue;
        }
        let mut words = candidate_words(&tb, &tb, &ident, n, 2);
        if n == n_max {
            words.retain(|w| keep(w));
        }
        let done = &components;
        let vals = par::map(mode, &words, |w| {
            let mut out = f.project(&b.apply(w));
            'outer: for ends in compositions(n) {
                let r = ends.len();
                if r == n {
                    continue;
                }
                let mut parts = Vec::with_capacity(r);
                let mut start = 0;
                for &e in &ends {
                    match f.component(&w[start..e]) {
                        Some(v) => parts.push(v),
                        None => continue 'outer,
                    }
                    start = e;
                }
                for (word, c) in tensor(&parts) {
                    if let Some(v) = done[r - 1].get(&word) {
                        out.add_scaled(v, &-c);
                    }
                }
            }
            out
        });
        components.push(words.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect());
    }
    Ok(BarCoderivation { basis: tb, components })
}
