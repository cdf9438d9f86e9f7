//! Sparse formal linear combinations.

use std::collections::BTreeMap;

use crate::scalar::Scalar;

/// Finite sum `Σ c_k k` with no stored zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Combo<K: Ord>(BTreeMap<K, Scalar>);

impl<K: Ord> Default for Combo<K> {
    fn default() -> Self {
        Combo(BTreeMap::new())
    }
}

impl<K: Ord + Clone> Combo<K> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(k: K, c: Scalar) -> Self {
        let mut out = Self::new();
        out.add_term(k, &c);
        out
    }

    pub fn add_term(&mut self, k: K, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, other: &Combo<K>, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        for (k, v) in &other.0 {
            self.add_term(k.clone(), &(v * c));
        }
    }

    pub fn add(&mut self, other: &Combo<K>) {
        for (k, v) in &other.0 {
            self.add_term(k.clone(), v);
        }
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        let mut out = Self::new();
        out.add_scaled(self, c);
        out
    }

    pub fn get(&self, k: &K) -> Scalar {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Scalar)> {
        self.0.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.0.keys()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Scalar) -> Self {
        let mut out = Self::new();
        for (k, v) in &self.0 {
            out.add_term(k.clone(), &f(v));
        }
        out
    }
}

impl<K: Ord + Clone> FromIterator<(K, Scalar)> for Combo<K> {
    fn from_iter<I: IntoIterator<Item = (K, Scalar)>>(iter: I) -> Self {
        let mut out = Self::new();
        for (k, c) in iter {
            out.add_term(k, &c);
        }
        out
    }
}

impl<K: Ord> IntoIterator for Combo<K> {
    type Item = (K, Scalar);
    type IntoIter = std::collections::btree_map::IntoIter<K, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}
