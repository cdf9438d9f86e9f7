//! A∞-functors, homotopies of minimal structures and homotopies between
//! functors. All identities are evaluated on the truncated bar side.

use std::collections::HashMap;
use std::sync::Arc;

use crate::ainf::{check_value_into, into_report, AInfStructure, Report, Table};
use crate::bar::{bar_differential, candidate_words, conjugate, conjugate_unipotent, tensor, BarCoderivation, BarElement, BarMorphism};
use crate::basis::{Basis, Vector, Word};
use crate::error::{Error, Result};
use crate::par::{self, ExecMode};
use crate::scalar::Scalar;

/// Components `f_n` of degree `1 - n` together with both structures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfFunctor {
    pub source: Arc<AInfStructure>,
    pub target: Arc<AInfStructure>,
    pub object_map: Vec<usize>,
    components: Vec<Table>,
}

impl AInfFunctor {
    pub fn new(source: Arc<AInfStructure>, target: Arc<AInfStructure>, object_map: Vec<usize>) -> Result<Self> {
        if source.arity_bound() != target.arity_bound() {
            return Err(Error::StructureMismatch(format!(
                "arity bounds differ ({} vs {})",
                source.arity_bound(),
                target.arity_bound()
            )));
        }
        let k = target.basis().objects().len();
        if object_map.len() != source.basis().objects().len() || object_map.iter().any(|&o| o >= k) {
            return Err(Error::ObjectMapMismatch("object map has the wrong shape".into()));
        }
        let n = source.arity_bound();
        Ok(AInfFunctor {
            source,
            target,
            object_map,
            components: vec![Table::new(); n],
        })
    }

    /// `F_1 = id`, higher components zero.
    pub fn identity(s: Arc<AInfStructure>) -> Self {
        let objects = (0..s.basis().objects().len()).collect();
        let mut f = AInfFunctor::new(s.clone(), s.clone(), objects).unwrap();
        for g in 0..s.basis().len() as u32 {
            f.components[0].insert(vec![g], Vector::single(g, Scalar::one()));
        }
        f
    }

    /// Same components between two structures on the same bases.
    pub fn with_structures(&self, source: Arc<AInfStructure>, target: Arc<AInfStructure>) -> Result<Self> {
        if source.basis() != self.source.basis() || target.basis() != self.target.basis() {
            return Err(Error::StructureMismatch("bases differ".into()));
        }
        let mut f = AInfFunctor::new(source, target, self.object_map.clone())?;
        f.components = self.components.clone();
        Ok(f)
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

    pub fn set_component(&mut self, w: &[u32], value: Vector) -> Result<()> {
        let n = w.len();
        if n == 0 || n > self.arity_bound() {
            return Err(Error::ArityExceeded {
                requested: n,
                bound: self.arity_bound(),
            });
        }
        check_value_into(self.source.basis(), self.target.basis(), w, &value, 1 - n as i32, |o| self.object_map[o])
            .map_err(|e| Error::ObjectMapMismatch(e.to_string()))?;
        let value = value.map_coefficients(|c| self.target.field.coerce(c));
        if value.is_zero() {
            self.components[n - 1].remove(w);
        } else {
            self.components[n - 1].insert(w.to_vec(), value);
        }
        Ok(())
    }

    /// `F_n(sa) = (-1)^{Σ(n-i)|a_i|} s f_n(a)`.
    pub fn to_bar(&self) -> BarMorphism {
        let sb = self.source.basis();
        let mut m = BarMorphism::new(sb.clone(), self.target.basis().clone(), self.object_map.clone(), self.arity_bound());
        for t in &self.components {
            for (w, v) in t {
                m.set(w.clone(), v.scaled(&sb.bar_sign(w)));
            }
        }
        m
    }

    pub fn from_bar(source: Arc<AInfStructure>, target: Arc<AInfStructure>, m: &BarMorphism) -> Result<Self> {
        let mut f = AInfFunctor::new(source, target, m.object_map.clone())?;
        let sb = f.source.basis().clone();
        for n in 1..=f.arity_bound().min(m.arity_bound()) {
            for (w, v) in m.components(n) {
                f.set_component(w, v.scaled(&sb.bar_sign(w)))?;
            }
        }
        Ok(f)
    }

    fn validate(&self) -> Result<()> {
        let sb = self.source.basis();
        let tb = self.target.basis();
        for t in &self.components {
            for (w, v) in t {
                check_value_into(sb, tb, w, v, 1 - w.len() as i32, |o| self.object_map[o])
                    .map_err(|e| Error::ObjectMapMismatch(e.to_string()))?;
            }
        }
        Ok(())
    }
}

/// Residuals of `F ∘ b = b' ∘ F` projected to cogenerators, one per source
/// word of length ≤ the arity bound.
pub fn check_functor(f: &AInfFunctor) -> Result<Report> {
    check_functor_with(f, ExecMode::default())
}

pub fn check_functor_with(f: &AInfFunctor, mode: ExecMode) -> Result<Report> {
    f.validate()?;
    let fb = f.to_bar();
    let b = bar_differential(&f.source);
    let b2 = bar_differential(&f.target);
    let sb = f.source.basis();
    let tb = f.target.basis();
    let mut words = Vec::new();
    for n in 1..=f.arity_bound() {
        words.extend(candidate_words(sb, tb, &f.object_map, n, 2));
    }
    let vals = par::map(mode, &words, |w| {
        let mut r = fb.project(&b.apply(w));
        let rhs = b2.project(&fb.apply(w));
        r.add_scaled(&rhs, &-Scalar::one());
        r
    });
    Ok(into_report(words.into_iter().zip(vals).collect()))
}

/// `G ∘ F`.
pub fn compose_functors(g: &AInfFunctor, f: &AInfFunctor) -> Result<AInfFunctor> {
    compose_functors_with(g, f, ExecMode::default())
}

pub fn compose_functors_with(g: &AInfFunctor, f: &AInfFunctor, mode: ExecMode) -> Result<AInfFunctor> {
    if *f.target != *g.source {
        return Err(Error::StructureMismatch("target of F differs from source of G".into()));
    }
    if f.arity_bound() != g.arity_bound() {
        return Err(Error::StructureMismatch("arity bounds differ".into()));
    }
    let m = g.to_bar().compose(&f.to_bar(), mode)?;
    AInfFunctor::from_bar(f.source.clone(), g.target.clone(), &m)
}

/// Higher components `F_n`, `n ≥ 2`, of a homotopy with `F_1 = id` on a
/// minimal structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomotopyData {
    pub base: Arc<AInfStructure>,
    components: Vec<Table>,
}

impl HomotopyData {
    pub fn zero(base: Arc<AInfStructure>) -> Self {
        let n = base.arity_bound();
        HomotopyData {
            base,
            components: vec![Table::new(); n],
        }
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

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|t| t.is_empty())
    }

    pub fn set_component(&mut self, w: &[u32], value: Vector) -> Result<()> {
        let n = w.len();
        if n < 2 || n > self.arity_bound() {
            return Err(Error::ArityExceeded {
                requested: n,
                bound: self.arity_bound(),
            });
        }
        let b = self.base.basis();
        check_value_into(b, b, w, &value, 1 - n as i32, |o| o)?;
        let value = value.map_coefficients(|c| self.base.field.coerce(c));
        if value.is_zero() {
            self.components[n - 1].remove(w);
        } else {
            self.components[n - 1].insert(w.to_vec(), value);
        }
        Ok(())
    }

    pub fn to_bar(&self) -> BarMorphism {
        let b = self.base.basis().clone();
        let mut m = BarMorphism::identity(b.clone(), self.arity_bound());
        for t in self.components.iter().skip(1) {
            for (w, v) in t {
                m.set(w.clone(), v.scaled(&b.bar_sign(w)));
            }
        }
        m
    }

    fn from_bar(base: Arc<AInfStructure>, m: &BarMorphism) -> Result<Self> {
        let mut h = HomotopyData::zero(base);
        let b = h.base.basis().clone();
        for n in 2..=h.arity_bound().min(m.arity_bound()) {
            for (w, v) in m.components(n) {
                h.set_component(w, v.scaled(&b.bar_sign(w)))?;
            }
        }
        Ok(h)
    }

    /// Group inverse: the morphism `G` with `F ∘ G = id`.
    pub fn inverse(&self) -> Result<Self> {
        let g = self.to_bar().inverse(ExecMode::default())?;
        HomotopyData::from_bar(self.base.clone(), &g)
    }

    /// `self ∘ other` as coalgebra maps (apply `other` first).
    pub fn compose(&self, other: &HomotopyData) -> Result<Self> {
        if self.base.basis() != other.base.basis() {
            return Err(Error::StructureMismatch("homotopies on different bases".into()));
        }
        let m = self.to_bar().compose(&other.to_bar(), ExecMode::default())?;
        HomotopyData::from_bar(other.base.clone(), &m)
    }

    /// The homotopy as a functor `(C, m) → (C, m')`.
    pub fn as_functor(&self, target: Arc<AInfStructure>) -> Result<AInfFunctor> {
        AInfFunctor::from_bar(self.base.clone(), target, &self.to_bar())
    }

    /// Same components over another structure on the same basis.
    pub fn rebase(&self, base: Arc<AInfStructure>) -> Result<Self> {
        if base.basis() != self.base.basis() || base.arity_bound() != self.arity_bound() {
            return Err(Error::StructureMismatch("rebase onto a different basis".into()));
        }
        Ok(HomotopyData {
            base,
            components: self.components.clone(),
        })
    }
}

/// `m' = m + δ(F)`: the structure making `F` a homotopy from `m`, computed as
/// `b' = F ∘ b ∘ F⁻¹` on the bar side.
pub fn apply_homotopy(m: &AInfStructure, f: &HomotopyData) -> Result<AInfStructure> {
    apply_homotopy_with(m, f, ExecMode::default())
}

pub fn apply_homotopy_with(m: &AInfStructure, f: &HomotopyData, mode: ExecMode) -> Result<AInfStructure> {
    if !m.is_minimal() {
        return Err(Error::NotMinimal(m.products(1).len()));
    }
    if m.basis() != f.base.basis() {
        return Err(Error::StructureMismatch("homotopy lives on a different basis".into()));
    }
    if f.arity_bound() > m.arity_bound() {
        return Err(Error::ArityExceeded {
            requested: f.arity_bound(),
            bound: m.arity_bound(),
        });
    }
    let b = conjugate_unipotent(&bar_differential(m), &f.to_bar(), mode)?;
    let mut out = b.to_structure(m.field);
    if out.arity_bound() != m.arity_bound() {
        out = out.with_arity_bound(m.arity_bound())?;
    }
    Ok(out)
}

/// Structure on the target basis obtained by conjugating with an invertible
/// coalgebra map; unlike [`apply_homotopy`] this accepts any `m` and any
/// invertible linear part.
pub fn transport_with(m: &AInfStructure, f: &BarMorphism, mode: ExecMode) -> Result<AInfStructure> {
    let b = conjugate(&bar_differential(m), f, mode)?;
    let n = m.arity_bound();
    let mut out = b.to_structure(m.field);
    if out.arity_bound() != n {
        out = out.with_arity_bound(n)?;
    }
    Ok(out)
}

/// Components `h_n` of degree `-n` of a homotopy between two functors with
/// common source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismHomotopy {
    pub source: Arc<AInfStructure>,
    pub target: Arc<AInfStructure>,
    pub object_map: Vec<usize>,
    components: Vec<Table>,
}

impl MorphismHomotopy {
    pub fn zero(f: &AInfFunctor) -> Self {
        MorphismHomotopy {
            source: f.source.clone(),
            target: f.target.clone(),
            object_map: f.object_map.clone(),
            components: vec![Table::new(); f.arity_bound()],
        }
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

    pub fn set_component(&mut self, w: &[u32], value: Vector) -> Result<()> {
        let n = w.len();
        if n == 0 || n > self.arity_bound() {
            return Err(Error::ArityExceeded {
                requested: n,
                bound: self.arity_bound(),
            });
        }
        check_value_into(self.source.basis(), self.target.basis(), w, &value, -(n as i32), |o| self.object_map[o])?;
        let value = value.map_coefficients(|c| self.target.field.coerce(c));
        if value.is_zero() {
            self.components[n - 1].remove(w);
        } else {
            self.components[n - 1].insert(w.to_vec(), value);
        }
        Ok(())
    }

    fn bar_components(&self) -> HashMap<Word, Vector> {
        let sb = self.source.basis();
        self.components
            .iter()
            .flat_map(|t| t.iter())
            .map(|(w, v)| (w.clone(), v.scaled(&sb.bar_sign(w))))
            .collect()
    }
}

/// `H(w) = Σ (-1)^{Σ|s u|} F(u) ⊗ H(v) ⊗ G(x)` over `w = u v x`, `v ≠ ∅`.
fn homotopy_extension(
    sb: &Basis,
    h: &HashMap<Word, Vector>,
    f: &BarMorphism,
    g: &BarMorphism,
    w: &[u32],
) -> BarElement {
    let n = w.len();
    let mut out = BarElement::new();
    let mut prefix = 0i64;
    for i in 0..n {
        let fu = if i == 0 { None } else { Some(f.apply(&w[..i])) };
        if fu.as_ref().is_some_and(|x| x.is_zero()) {
            prefix += sb.gen(w[i]).degree as i64 - 1;
            continue;
        }
        let sign = Scalar::sign(prefix);
        for j in i + 1..=n {
            let Some(hv) = h.get(&w[i..j]) else { continue };
            let gx = if j == n { None } else { Some(g.apply(&w[j..])) };
            if gx.as_ref().is_some_and(|x| x.is_zero()) {
                continue;
            }
            let mid = tensor(&[hv]);
            let left = fu.clone().unwrap_or_else(|| BarElement::single(Vec::new(), Scalar::one()));
            let right = gx.unwrap_or_else(|| BarElement::single(Vec::new(), Scalar::one()));
            for (a, ca) in left.iter() {
                for (m, cm) in mid.iter() {
                    for (c, cc) in right.iter() {
                        let mut word = a.clone();
                        word.extend_from_slice(m);
                        word.extend_from_slice(c);
                        out.add_term(word, &(&(&sign * ca) * &(cm * cc)));
                    }
                }
            }
        }
        prefix += sb.gen(w[i]).degree as i64 - 1;
    }
    out
}

fn project_map(h: &HashMap<Word, Vector>, x: &BarElement) -> Vector {
    let mut out = Vector::new();
    for (w, c) in x.iter() {
        if let Some(v) = h.get(w) {
            out.add_scaled(v, c);
        }
    }
    out
}

fn homotopy_words(h: &MorphismHomotopy, c: i32) -> Vec<Word> {
    let mut words = Vec::new();
    for n in 1..=h.arity_bound() {
        words.extend(candidate_words(h.source.basis(), h.target.basis(), &h.object_map, n, c));
    }
    words
}

/// `F - G = b'H + Hb` on cogenerators, with `H` extended from its
/// components by `Δ H = (F ⊗ H + H ⊗ G) Δ` (so the coproduct condition holds
/// by construction).
pub fn check_morphism_homotopy(h: &MorphismHomotopy, f: &AInfFunctor, g: &AInfFunctor) -> bool {
    let same = |x: &AInfFunctor| x.source == h.source && x.target == h.target && x.object_map == h.object_map;
    if !same(f) || !same(g) {
        return false;
    }
    let hb = h.bar_components();
    let (fb, gb) = (f.to_bar(), g.to_bar());
    let b = bar_differential(&h.source);
    let b2 = bar_differential(&h.target);
    let sb = h.source.basis();
    let words = homotopy_words(h, 1);
    let bad = par::map(ExecMode::default(), &words, |w| {
        let lhs = {
            let mut v = fb.component(w).cloned().unwrap_or_default();
            if let Some(x) = gb.component(w) {
                v.add_scaled(x, &-Scalar::one());
            }
            v
        };
        let mut rhs = b2.project(&homotopy_extension(sb, &hb, &fb, &gb, w));
        rhs.add(&project_map(&hb, &b.apply(w)));
        lhs != rhs
    });
    !bad.into_iter().any(|x| x)
}

/// The functor `G` with `F - G = b'H + Hb`, solved arity by arity.
pub fn homotopic_functor(f: &AInfFunctor, h: &MorphismHomotopy) -> Result<AInfFunctor> {
    if f.source != h.source || f.target != h.target || f.object_map != h.object_map {
        return Err(Error::StructureMismatch("homotopy and functor disagree".into()));
    }
    let hb = h.bar_components();
    let fb = f.to_bar();
    let b = bar_differential(&h.source);
    let b2: BarCoderivation = bar_differential(&h.target);
    let sb = h.source.basis().clone();
    let mut gb = BarMorphism::new(sb.clone(), h.target.basis().clone(), h.object_map.clone(), f.arity_bound());
    for n in 1..=f.arity_bound() {
        let words = candidate_words(&sb, h.target.basis(), &h.object_map, n, 1);
        let vals = par::map(ExecMode::default(), &words, |w| {
            let mut v = fb.component(w).cloned().unwrap_or_default();
            let mut corr = b2.project(&homotopy_extension(&sb, &hb, &fb, &gb, w));
            corr.add(&project_map(&hb, &b.apply(w)));
            v.add_scaled(&corr, &-Scalar::one());
            v
        });
        for (w, v) in words.into_iter().zip(vals) {
            gb.set(w, v);
        }
    }
    AInfFunctor::from_bar(f.source.clone(), f.target.clone(), &gb)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::check_ainf;
    use crate::basis::hom_map;
    use crate::scalar::FieldSpec;

    /// Free-ish minimal algebra: a, b of degree 1, ab of degree 2.
    fn small() -> Arc<AInfStructure> {
        let bs = Arc::new(Basis::new(vec!["O".into()], hom_map(&[(0, 0, &[(1, &["a", "b"]), (2, &["ab"])])])).unwrap());
        let mut s = AInfStructure::new(FieldSpec::Rationals, bs.clone(), 4).unwrap();
        s.set_product(&[0, 1], Vector::single(2, Scalar::one())).unwrap();
        Arc::new(s)
    }

    #[test]
    fn zero_homotopy_is_trivial() {
        let s = small();
        let h = HomotopyData::zero(s.clone());
        assert_eq!(apply_homotopy(&s, &h).unwrap(), *s);
    }

    #[test]
    fn homotopy_keeps_m2_and_validity() {
        let s = small();
        let mut h = HomotopyData::zero(s.clone());
        // F_2(a, a) has degree 1 + 1 - 1 = 1
        h.set_component(&[0, 0], Vector::single(1, Scalar::from(3))).unwrap();
        let s2 = apply_homotopy(&s, &h).unwrap();
        assert_eq!(s2.products(2), s.products(2));
        assert!(check_ainf(&s2, 4).unwrap().is_empty());
        assert_ne!(s2, *s);
        let f = h.as_functor(Arc::new(s2.clone())).unwrap();
        assert!(check_functor(&f).unwrap().is_empty());
        let back = apply_homotopy(&s2, &h.inverse().unwrap().rebase(Arc::new(s2.clone())).unwrap()).unwrap();
        assert_eq!(back, *s);
    }

    #[test]
    fn non_minimal_rejected() {
        let bs = Arc::new(Basis::new(vec!["O".into()], hom_map(&[(0, 0, &[(0, &["u"]), (1, &["v"])])])).unwrap());
        let mut s = AInfStructure::new(FieldSpec::Rationals, bs, 3).unwrap();
        s.set_product(&[0], Vector::single(1, Scalar::one())).unwrap();
        let h = HomotopyData::zero(Arc::new(s.clone()));
        assert!(matches!(apply_homotopy(&s, &h), Err(Error::NotMinimal(1))));
    }

    #[test]
    fn identity_functor_checks() {
        let s = small();
        let id = AInfFunctor::identity(s.clone());
        assert!(check_functor(&id).unwrap().is_empty());
        assert_eq!(compose_functors(&id, &id).unwrap(), id);
    }

    #[test]
    fn morphism_homotopy_basics() {
        let s = small();
        let id = AInfFunctor::identity(s.clone());
        let h0 = MorphismHomotopy::zero(&id);
        assert!(check_morphism_homotopy(&h0, &id, &id));
        let mut h = MorphismHomotopy::zero(&id);
        // h_2(a, b) of degree 2 - 2 = 0: nothing there; h_1(ab) degree 1
        h.set_component(&[2], Vector::single(0, Scalar::one())).unwrap();
        let g = homotopic_functor(&id, &h).unwrap();
        assert_ne!(g, id);
        assert!(check_functor(&g).unwrap().is_empty());
        assert!(check_morphism_homotopy(&h, &id, &g));
        assert!(!check_morphism_homotopy(&h0, &id, &g));
    }
    #[test]
    fn unipotent_conjugation_matches_the_inverse_route() {
        use crate::fixtures;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..4 {
            let pair = fixtures::kill_target(&mut rng, [3, 1, 2], 4, 0.5, FieldSpec::Rationals);
            let base = Arc::new(pair.structure().clone());
            let mut h = HomotopyData::zero(base.clone());
            let b = base.basis().clone();
            for n in 2..=3 {
                for w in candidate_words(&b, &b, &[0, 1], n, 1) {
                    let (src, tgt) = b.span(&w);
                    let d = b.degree_sum(&w) + 1 - n as i32;
                    h.set_component(&w, fixtures::random_vector(&mut rng, FieldSpec::Rationals, &b.gens_in(src, tgt, d), 0.5)).unwrap();
                }
            }
            let fast = apply_homotopy(&base, &h).unwrap();
            let slow = transport_with(&base, &h.to_bar(), ExecMode::Sequential).unwrap();
            assert_eq!(fast, slow);
        }
    }

}
