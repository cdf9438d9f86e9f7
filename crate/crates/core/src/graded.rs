//! Graded vector spaces with labelled bases, their elements and linear maps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// `(-1)^(moved · Σ passed)`.
pub fn koszul_sign(moved_degree: i64, passed_degrees: &[i64]) -> Scalar {
    let total: i64 = passed_degrees.iter().sum();
    Scalar::sign(moved_degree * total)
}

/// A finite graded vector space: degree ↦ ordered basis labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GradedSpace {
    degrees: BTreeMap<i32, Vec<String>>,
}

impl GradedSpace {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a space; labels are sorted within each degree and empty degrees
    /// dropped. Duplicate labels in one degree are rejected.
    pub fn from_degrees<I, L>(degrees: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, L)>,
        L: IntoIterator,
        L::Item: Into<String>,
    {
        let mut out = BTreeMap::new();
        for (d, labels) in degrees {
            let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
            labels.sort();
            if labels.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Invalid(format!("duplicate label in degree {d}")));
            }
            if !labels.is_empty() {
                let slot: &mut Vec<String> = out.entry(d).or_default();
                slot.extend(labels);
                slot.sort();
                if slot.windows(2).any(|w| w[0] == w[1]) {
                    return Err(Error::Invalid(format!("duplicate label in degree {d}")));
                }
            }
        }
        Ok(GradedSpace { degrees: out })
    }

    pub fn degrees(&self) -> impl Iterator<Item = (i32, &[String])> {
        self.degrees.iter().map(|(d, l)| (*d, l.as_slice()))
    }

    pub fn labels(&self, degree: i32) -> &[String] {
        self.degrees.get(&degree).map_or(&[], |v| v.as_slice())
    }

    pub fn dim(&self, degree: i32) -> usize {
        self.labels(degree).len()
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_dim() == 0
    }

    pub fn index_of(&self, degree: i32, label: &str) -> Option<usize> {
        self.labels(degree).binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    pub fn contains(&self, degree: i32, label: &str) -> bool {
        self.index_of(degree, label).is_some()
    }
}

/// A homogeneous element; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: i32,
    coefficients: BTreeMap<String, Scalar>,
}

impl Element {
    pub fn zero(degree: i32) -> Self {
        Element {
            degree,
            coefficients: BTreeMap::new(),
        }
    }

    pub fn basis(degree: i32, label: impl Into<String>) -> Self {
        let mut e = Element::zero(degree);
        e.coefficients.insert(label.into(), Scalar::one());
        e
    }

    pub fn add_term(&mut self, label: &str, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let slot = self
            .coefficients
            .entry(label.to_string())
            .or_insert_with(Scalar::zero);
        *slot += c;
        if slot.is_zero() {
            self.coefficients.remove(label);
        }
    }

    pub fn coefficient(&self, label: &str) -> Scalar {
        self.coefficients.get(label).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Scalar)> {
        self.coefficients.iter().map(|(l, c)| (l.as_str(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Checks every label against `space` in this element's degree.
    pub fn validate(&self, space: &GradedSpace) -> Result<()> {
        for l in self.coefficients.keys() {
            if !space.contains(self.degree, l) {
                return Err(Error::Invalid(format!(
                    "label {l:?} not in degree {} of the space",
                    self.degree
                )));
            }
        }
        Ok(())
    }

    fn to_column(&self, space: &GradedSpace) -> Vec<Scalar> {
        space
            .labels(self.degree)
            .iter()
            .map(|l| self.coefficient(l))
            .collect()
    }
}

/// A homogeneous linear map of fixed degree shift, given on basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap {
    pub source: GradedSpace,
    pub target: GradedSpace,
    pub shift: i32,
    entries: BTreeMap<(i32, String), Element>,
}

impl LinearMap {
    pub fn new(source: GradedSpace, target: GradedSpace, shift: i32) -> Self {
        LinearMap {
            source,
            target,
            shift,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(space: &GradedSpace) -> Self {
        let mut m = LinearMap::new(space.clone(), space.clone(), 0);
        for (d, labels) in space.degrees() {
            for l in labels {
                m.set(d, l, Element::basis(d, l.clone())).unwrap();
            }
        }
        m
    }

    pub fn set(&mut self, degree: i32, label: &str, value: Element) -> Result<()> {
        if !self.source.contains(degree, label) {
            return Err(Error::Invalid(format!("{label:?} not a source basis label")));
        }
        if value.degree != degree + self.shift {
            return Err(Error::Invalid(format!(
                "image of {label:?} has degree {} but expected {}",
                value.degree,
                degree + self.shift
            )));
        }
        value.validate(&self.target)?;
        if value.is_zero() {
            self.entries.remove(&(degree, label.to_string()));
        } else {
            self.entries.insert((degree, label.to_string()), value);
        }
        Ok(())
    }

    pub fn apply_basis(&self, degree: i32, label: &str) -> Element {
        self.entries
            .get(&(degree, label.to_string()))
            .cloned()
            .unwrap_or_else(|| Element::zero(degree + self.shift))
    }

    pub fn apply(&self, x: &Element) -> Element {
        let mut out = Element::zero(x.degree + self.shift);
        for (l, c) in x.terms() {
            for (tl, tc) in self.apply_basis(x.degree, l).terms() {
                out.add_term(tl, &(c * tc));
            }
        }
        out
    }

    /// Matrix of the component `source_d → target_{d+shift}`.
    pub fn matrix(&self, source_degree: i32) -> Matrix {
        let src = self.source.labels(source_degree);
        let tgt = self.target.labels(source_degree + self.shift);
        let mut m = Matrix::zeros(tgt.len(), src.len());
        for (j, l) in src.iter().enumerate() {
            let col = self.apply_basis(source_degree, l).to_column(&self.target);
            for (i, v) in col.into_iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> LinearMap {
        assert_eq!(other.target, self.source, "composition of incompatible maps");
        let mut out = LinearMap::new(other.source.clone(), self.target.clone(), self.shift + other.shift);
        for (d, labels) in other.source.degrees() {
            for l in labels {
                let v = self.apply(&other.apply_basis(d, l));
                out.set(d, l, v).unwrap();
            }
        }
        out
    }
}

/// Section `s` of a degreewise surjective map: `map ∘ s = id` on the target.
/// The choice is the pivot-column section of the reduced row-echelon form.
pub fn right_inverse(map: &LinearMap) -> Result<LinearMap> {
    let mut s = LinearMap::new(map.target.clone(), map.source.clone(), -map.shift);
    for (td, tlabels) in map.target.degrees() {
        let sd = td - map.shift;
        let m = map.matrix(sd);
        let sec = linalg::right_inverse(&m).map_err(|e| match e {
            Error::NotSurjective { rank, target_dim, .. } => Error::NotSurjective {
                degree: td,
                rank,
                target_dim,
            },
            other => other,
        })?;
        let slabels = map.source.labels(sd);
        for (j, tl) in tlabels.iter().enumerate() {
            let mut e = Element::zero(sd);
            for (i, sl) in slabels.iter().enumerate() {
                e.add_term(sl, &sec[(i, j)]);
            }
            s.set(td, tl, e)?;
        }
    }
    Ok(s)
}
