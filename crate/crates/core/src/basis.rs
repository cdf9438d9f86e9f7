//! Global indexing of the basis morphisms of a finite graded quiver.

use std::collections::{BTreeMap, HashMap};

use crate::combo::Combo;
use crate::error::{Error, Result};
use crate::graded::{Element, GradedSpace};
use crate::scalar::Scalar;

/// A basis tuple, letters are generator indices.
pub type Word = Vec<u32>;

/// Sparse vector over the generators of a [`Basis`].
pub type Vector = Combo<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Generator {
    pub source: usize,
    pub target: usize,
    pub degree: i32,
    pub label: String,
    /// Auxiliary nonnegative grading preserved by every operation on
    /// structures that declare one; zero otherwise. Only used for pruning.
    pub weight: u32,
}

/// Objects plus, for each ordered pair, a graded space of morphisms
/// `source → target`. Generators are numbered in the order
/// (source, target, degree, label).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    objects: Vec<String>,
    hom: BTreeMap<(usize, usize), GradedSpace>,
    gens: Vec<Generator>,
    lookup: HashMap<(usize, usize, i32, String), u32>,
    by_target: Vec<Vec<u32>>,
    max_weight: u32,
}

impl Basis {
    pub fn new(objects: Vec<String>, hom: BTreeMap<(usize, usize), GradedSpace>) -> Result<Self> {
        Self::with_weights(objects, hom, &HashMap::new())
    }

    /// Weights are keyed by (source, target, degree, label); missing keys
    /// have weight zero.
    pub fn with_weights(
        objects: Vec<String>,
        hom: BTreeMap<(usize, usize), GradedSpace>,
        weights: &HashMap<(usize, usize, i32, String), u32>,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for o in &objects {
            if !seen.insert(o) {
                return Err(Error::Invalid(format!("duplicate object {o:?}")));
            }
        }
        let hom: BTreeMap<_, _> = hom.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        let mut gens = Vec::new();
        for (&(s, t), space) in &hom {
            if s >= objects.len() || t >= objects.len() {
                return Err(Error::Invalid(format!("hom space ({s},{t}) names a missing object")));
            }
            for (d, labels) in space.degrees() {
                for l in labels {
                    let weight = weights.get(&(s, t, d, l.clone())).copied().unwrap_or(0);
                    gens.push(Generator {
                        source: s,
                        target: t,
                        degree: d,
                        label: l.clone(),
                        weight,
                    });
                }
            }
        }
        let mut lookup = HashMap::new();
        let mut by_target = vec![Vec::new(); objects.len()];
        for (i, g) in gens.iter().enumerate() {
            lookup.insert((g.source, g.target, g.degree, g.label.clone()), i as u32);
            by_target[g.target].push(i as u32);
        }
        let max_weight = gens.iter().map(|g| g.weight).max().unwrap_or(0);
        Ok(Basis {
            objects,
            hom,
            gens,
            lookup,
            by_target,
            max_weight,
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn hom(&self) -> &BTreeMap<(usize, usize), GradedSpace> {
        &self.hom
    }

    pub fn hom_space(&self, source: usize, target: usize) -> Option<&GradedSpace> {
        self.hom.get(&(source, target))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gen(&self, i: u32) -> &Generator {
        &self.gens[i as usize]
    }

    pub fn gens(&self) -> &[Generator] {
        &self.gens
    }

    pub fn find(&self, source: usize, target: usize, degree: i32, label: &str) -> Option<u32> {
        self.lookup.get(&(source, target, degree, label.to_string())).copied()
    }

    pub fn has_weights(&self) -> bool {
        self.max_weight > 0
    }

    pub fn max_weight(&self) -> u32 {
        self.max_weight
    }

    pub fn weights(&self) -> HashMap<(usize, usize, i32, String), u32> {
        self.gens
            .iter()
            .filter(|g| g.weight > 0)
            .map(|g| ((g.source, g.target, g.degree, g.label.clone()), g.weight))
            .collect()
    }

    /// Generators of `Hom(source, target)` in one degree.
    pub fn gens_in(&self, source: usize, target: usize, degree: i32) -> Vec<u32> {
        self.hom_space(source, target)
            .map(|sp| {
                sp.labels(degree)
                    .iter()
                    .map(|l| self.find(source, target, degree, l).unwrap())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn has_degree(&self, source: usize, target: usize, degree: i32) -> bool {
        self.hom_space(source, target).is_some_and(|s| s.dim(degree) > 0)
    }

    /// Checks `a_i.source == a_{i+1}.target` along the word.
    pub fn composable(&self, w: &[u32]) -> bool {
        w.windows(2).all(|p| self.gen(p[0]).source == self.gen(p[1]).target)
    }

    /// `(source of last, target of first)`: the hom space a product of `w` lands in.
    pub fn span(&self, w: &[u32]) -> (usize, usize) {
        (self.gen(*w.last().unwrap()).source, self.gen(w[0]).target)
    }

    pub fn degree_sum(&self, w: &[u32]) -> i32 {
        w.iter().map(|&a| self.gen(a).degree).sum()
    }

    pub fn weight_sum(&self, w: &[u32]) -> u32 {
        w.iter().map(|&a| self.gen(a).weight).sum()
    }

    /// `(-1)^{Σ_i (n-i) |a_i|}`: the sign relating `m_n` to its bar component.
    pub fn bar_sign(&self, w: &[u32]) -> Scalar {
        let n = w.len() as i64;
        let e: i64 = w
            .iter()
            .enumerate()
            .map(|(i, &a)| (n - 1 - i as i64) * self.gen(a).degree as i64)
            .sum();
        Scalar::sign(e)
    }

    /// Every composable word of length `len` with total weight at most
    /// `max_weight` accepted by `keep`, in lexicographic order.
    pub fn words(&self, len: usize, max_weight: Option<u32>, mut keep: impl FnMut(&[u32]) -> bool) -> Vec<Word> {
        let mut out = Vec::new();
        if len == 0 {
            return out;
        }
        let mut w = Vec::with_capacity(len);
        let bound = max_weight.unwrap_or(u32::MAX);
        for a in 0..self.gens.len() as u32 {
            self.extend_words(&mut w, a, 0, len, bound, &mut keep, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn extend_words(
        &self,
        w: &mut Word,
        a: u32,
        weight: u32,
        len: usize,
        bound: u32,
        keep: &mut impl FnMut(&[u32]) -> bool,
        out: &mut Vec<Word>,
    ) {
        let weight = weight + self.gen(a).weight;
        if weight > bound {
            return;
        }
        w.push(a);
        if w.len() == len {
            if keep(w) {
                out.push(w.clone());
            }
        } else {
            let src = self.gen(a).source;
            for &b in &self.by_target[src] {
                self.extend_words(w, b, weight, len, bound, keep, out);
            }
        }
        w.pop();
    }

    /// Converts a sparse vector supported in one hom space and degree.
    pub fn to_element(&self, v: &Vector, degree: i32) -> Element {
        let mut e = Element::zero(degree);
        for (&g, c) in v.iter() {
            e.add_term(&self.gen(g).label, c);
        }
        e
    }

    pub fn from_element(&self, source: usize, target: usize, e: &Element) -> Result<Vector> {
        let mut v = Vector::new();
        for (l, c) in e.terms() {
            let g = self.find(source, target, e.degree, l).ok_or_else(|| {
                Error::Invalid(format!(
                    "label {l:?} is not a basis element of Hom({}, {}) in degree {}",
                    self.objects[source], self.objects[target], e.degree
                ))
            })?;
            v.add_term(g, c);
        }
        Ok(v)
    }

    pub fn describe(&self, g: u32) -> String {
        let g = self.gen(g);
        format!("{}:{}->{}", g.label, self.objects[g.source], self.objects[g.target])
    }
}

/// `(source, target, [(degree, labels)])`.
pub type HomEntry<'a> = (usize, usize, &'a [(i32, &'a [&'a str])]);

/// Shorthand for building a hom map from [`HomEntry`] rows.
pub fn hom_map(entries: &[HomEntry]) -> BTreeMap<(usize, usize), GradedSpace> {
    entries
        .iter()
        .map(|(s, t, spec)| {
            let sp = GradedSpace::from_degrees(spec.iter().map(|(d, l)| (*d, l.iter().copied()))).unwrap();
            ((*s, *t), sp)
        })
        .collect()
}
