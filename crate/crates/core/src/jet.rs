//! Truncated commutative power series: polynomials modulo total degree
//! `> K`, matrices over them, ideals realized as subspaces, and coordinate
//! changes.

use std::collections::HashMap;

use crate::combo::Combo;
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonBasis, Matrix};
use crate::par::{self, ExecMode};
use crate::scalar::Scalar;

/// Exponent vector.
pub type Monomial = Vec<u32>;

pub fn monomial_degree(m: &[u32]) -> usize {
    m.iter().map(|&e| e as usize).sum()
}

/// All monomials in `nvars` variables of degree ≤ `order`, by increasing
/// degree and, within a degree, with `t_1` before `t_2` before ….
pub fn monomials(nvars: usize, order: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for d in 0..=order {
        let mut cur = vec![0u32; nvars];
        fill(&mut cur, 0, d, &mut out);
    }
    out
}

fn fill(cur: &mut Monomial, i: usize, left: usize, out: &mut Vec<Monomial>) {
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == cur.len() - 1 {
        cur[i] = left as u32;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for e in (0..=left).rev() {
        cur[i] = e as u32;
        fill(cur, i + 1, left - e, out);
    }
    cur[i] = 0;
}

/// Element of `k[t_1..t_g] / (t)^{K+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetPoly {
    pub nvars: usize,
    pub order: usize,
    terms: Combo<Monomial>,
}

impl JetPoly {
    pub fn zero(nvars: usize, order: usize) -> Self {
        JetPoly {
            nvars,
            order,
            terms: Combo::new(),
        }
    }

    pub fn constant(nvars: usize, order: usize, c: Scalar) -> Self {
        let mut p = JetPoly::zero(nvars, order);
        p.add_term(vec![0; nvars], &c);
        p
    }

    pub fn one(nvars: usize, order: usize) -> Self {
        JetPoly::constant(nvars, order, Scalar::one())
    }

    pub fn var(nvars: usize, order: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        let mut p = JetPoly::zero(nvars, order);
        p.add_term(m, &Scalar::one());
        p
    }

    /// Adds `c·m`, dropping it if `deg m > K`.
    pub fn add_term(&mut self, m: Monomial, c: &Scalar) {
        assert_eq!(m.len(), self.nvars, "monomial has the wrong number of variables");
        if monomial_degree(&m) <= self.order {
            self.terms.add_term(m, c);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &[u32]) -> Scalar {
        self.terms.get(&m.to_vec())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    /// Lowest total degree of a term, `None` for zero.
    pub fn low_degree(&self) -> Option<usize> {
        self.terms.keys().map(|m| monomial_degree(m)).min()
    }

    /// Coefficients of `t_1 … t_g`.
    pub fn linear_part(&self) -> Vec<Scalar> {
        (0..self.nvars)
            .map(|i| {
                let mut m = vec![0; self.nvars];
                m[i] = 1;
                self.coefficient(&m)
            })
            .collect()
    }

    /// Part of degree exactly `d`.
    pub fn homogeneous(&self, d: usize) -> JetPoly {
        let mut out = JetPoly::zero(self.nvars, self.order);
        for (m, c) in self.terms() {
            if monomial_degree(m) == d {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    pub fn truncate(&self, order: usize) -> JetPoly {
        let mut out = JetPoly::zero(self.nvars, order);
        for (m, c) in self.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn add(&self, other: &JetPoly) -> JetPoly {
        self.check_ring(other);
        let mut out = self.clone();
        out.terms.add(&other.terms);
        out
    }

    pub fn sub(&self, other: &JetPoly) -> JetPoly {
        self.check_ring(other);
        let mut out = self.clone();
        out.terms.add_scaled(&other.terms, &-Scalar::one());
        out
    }

    pub fn scale(&self, c: &Scalar) -> JetPoly {
        JetPoly {
            nvars: self.nvars,
            order: self.order,
            terms: self.terms.scaled(c),
        }
    }

    pub fn mul(&self, other: &JetPoly) -> JetPoly {
        self.check_ring(other);
        let mut out = JetPoly::zero(self.nvars, self.order);
        for (a, ca) in self.terms() {
            let da = monomial_degree(a);
            for (b, cb) in other.terms() {
                if da + monomial_degree(b) > self.order {
                    continue;
                }
                let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
                out.terms.add_term(m, &(ca * cb));
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &[u32], c: &Scalar) -> JetPoly {
        let mut out = JetPoly::zero(self.nvars, self.order);
        for (a, ca) in self.terms() {
            let p: Monomial = a.iter().zip(m).map(|(x, y)| x + y).collect();
            out.add_term(p, &(ca * c));
        }
        out
    }

    /// `f(images_1, …, images_g)`; the images live in a ring with
    /// possibly different variables but the same order.
    pub fn substitute(&self, images: &[JetPoly]) -> JetPoly {
        assert_eq!(images.len(), self.nvars);
        let (nv, order) = images
            .first()
            .map_or((0, self.order), |p| (p.nvars, p.order));
        let mut powers: HashMap<(usize, u32), JetPoly> = HashMap::new();
        let mut out = JetPoly::zero(nv, order);
        for (m, c) in self.terms() {
            let mut term = JetPoly::constant(nv, order, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let p = powers
                    .entry((i, e))
                    .or_insert_with(|| {
                        let mut acc = JetPoly::one(nv, order);
                        for _ in 0..e {
                            acc = acc.mul(&images[i]);
                        }
                        acc
                    })
                    .clone();
                term = term.mul(&p);
                if term.is_zero() {
                    break;
                }
            }
            out = out.add(&term);
        }
        out
    }

    fn check_ring(&self, other: &JetPoly) {
        assert!(
            self.nvars == other.nvars && self.order == other.order,
            "jet polynomials from different rings"
        );
    }

    /// Dense coordinates against `monomials(nvars, order)`.
    pub fn to_dense(&self, index: &HashMap<Monomial, usize>) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); index.len()];
        for (m, c) in self.terms() {
            v[index[m]] = c.clone();
        }
        v
    }
}

/// Row-major matrix of jet polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetMatrix {
    pub rows: usize,
    pub cols: usize,
    pub nvars: usize,
    pub order: usize,
    pub entries: Vec<JetPoly>,
}

impl JetMatrix {
    pub fn zeros(rows: usize, cols: usize, nvars: usize, order: usize) -> Self {
        JetMatrix {
            rows,
            cols,
            nvars,
            order,
            entries: vec![JetPoly::zero(nvars, order); rows * cols],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> &JetPoly {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: JetPoly) {
        assert!(p.nvars == self.nvars && p.order == self.order);
        self.entries[i * self.cols + j] = p;
    }

    /// Matrix whose entries are distinct coordinates `t_0, t_1, …` row-major.
    pub fn coordinate(rows: usize, cols: usize, nvars: usize, order: usize) -> Self {
        let mut m = JetMatrix::zeros(rows, cols, nvars, order);
        for k in 0..rows * cols {
            m.entries[k] = JetPoly::var(nvars, order, k);
        }
        m
    }

    pub fn map(&self, f: impl Fn(&JetPoly) -> JetPoly) -> JetMatrix {
        JetMatrix {
            entries: self.entries.iter().map(f).collect(),
            ..self.clone()
        }
    }
}

fn det(m: &JetMatrix, rows: &[usize], cols: &[usize]) -> JetPoly {
    if rows.len() == 1 {
        return m.get(rows[0], cols[0]).clone();
    }
    let mut out = JetPoly::zero(m.nvars, m.order);
    let r0 = rows[0];
    for (k, &c) in cols.iter().enumerate() {
        let e = m.get(r0, c);
        if e.is_zero() {
            continue;
        }
        let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
        let minor = det(m, &rows[1..], &sub_cols);
        let t = e.mul(&minor);
        out = if k % 2 == 0 { out.add(&t) } else { out.sub(&t) };
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Ideal given by generators; compared through the subspace it spans in
/// the truncated ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetIdeal {
    pub nvars: usize,
    pub order: usize,
    pub generators: Vec<JetPoly>,
}

impl JetIdeal {
    pub fn new(nvars: usize, order: usize, generators: Vec<JetPoly>) -> Self {
        JetIdeal {
            nvars,
            order,
            generators,
        }
    }

    /// Echelon basis of `span{ m · g }` in `k[t]/(t)^{K+1}`, columns ordered as
    /// in [`monomials`], so pivots are lowest-degree terms.
    pub fn realized(&self) -> (Vec<Monomial>, EchelonBasis) {
        let mons = monomials(self.nvars, self.order);
        let index: HashMap<Monomial, usize> = mons.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut ech = EchelonBasis::new(mons.len());
        for g in &self.generators {
            let Some(low) = g.low_degree() else { continue };
            for m in &mons {
                if monomial_degree(m) + low > self.order {
                    break;
                }
                let p = g.mul_monomial(m, &Scalar::one());
                ech.insert(p.to_dense(&index));
            }
        }
        (mons, ech)
    }

    /// Dimension of the quotient in each degree `0..=K` (by initial terms).
    pub fn hilbert_function(&self) -> Vec<usize> {
        let (mons, ech) = self.realized();
        let mut out = vec![0; self.order + 1];
        let piv: std::collections::HashSet<usize> = ech.pivots().into_iter().collect();
        for (i, m) in mons.iter().enumerate() {
            if !piv.contains(&i) {
                out[monomial_degree(m)] += 1;
            }
        }
        out
    }

    pub fn contains(&self, p: &JetPoly) -> bool {
        let (mons, ech) = self.realized();
        let index: HashMap<Monomial, usize> = mons.into_iter().enumerate().map(|(i, m)| (m, i)).collect();
        ech.contains(&p.to_dense(&index))
    }

    /// Image under a coordinate change.
    pub fn apply(&self, phi: &JetAutomorphism) -> JetIdeal {
        JetIdeal::new(self.nvars, self.order, self.generators.iter().map(|g| phi.apply(g)).collect())
    }
}

/// All `s × s` minors, generators ordered by (row subset, column subset).
pub fn minors(m: &JetMatrix, s: usize) -> Result<JetIdeal> {
    minors_with(m, s, ExecMode::default())
}

pub fn minors_with(m: &JetMatrix, s: usize, mode: ExecMode) -> Result<JetIdeal> {
    if s > m.rows.min(m.cols) {
        return Err(Error::SizeTooLarge {
            size: s,
            rows: m.rows,
            cols: m.cols,
        });
    }
    if s == 0 {
        return Ok(JetIdeal::new(m.nvars, m.order, vec![JetPoly::one(m.nvars, m.order)]));
    }
    let rs = subsets(m.rows, s);
    let cs = subsets(m.cols, s);
    let pairs: Vec<(&Vec<usize>, &Vec<usize>)> = rs.iter().flat_map(|r| cs.iter().map(move |c| (r, c))).collect();
    let gens = par::map(mode, &pairs, |(r, c)| det(m, r, c));
    Ok(JetIdeal::new(m.nvars, m.order, gens))
}

/// Whether the degree-one parts of all entries are linearly independent.
pub fn linear_independence(m: &JetMatrix) -> bool {
    let n = m.entries.len();
    if n > m.nvars {
        return false;
    }
    let rows: Vec<Vec<Scalar>> = m.entries.iter().map(|e| e.linear_part()).collect();
    if n == 0 {
        return true;
    }
    Matrix::from_rows(rows).rank() == n
}

/// Compares realized subspaces at order `k`.
pub fn ideal_jet_equal(i: &JetIdeal, j: &JetIdeal, k: usize) -> Result<bool> {
    if i.nvars != j.nvars {
        return Err(Error::RingMismatch(format!("{} vs {} variables", i.nvars, j.nvars)));
    }
    if i.order < k || j.order < k {
        return Err(Error::RingMismatch(format!("orders {} and {} below {k}", i.order, j.order)));
    }
    let cut = |x: &JetIdeal| JetIdeal::new(x.nvars, k, x.generators.iter().map(|g| g.truncate(k)).collect());
    let (a, b) = (cut(i), cut(j));
    let (_, ea) = a.realized();
    let (_, eb) = b.realized();
    if ea.rank() != eb.rank() {
        return Ok(false);
    }
    let same = ea.rows().all(|(_, r)| eb.contains(r));
    Ok(same)
}

/// Substitution `t_i ↦ images_i` with invertible linear part and no
/// constant terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetAutomorphism {
    pub nvars: usize,
    pub order: usize,
    pub images: Vec<JetPoly>,
}

impl JetAutomorphism {
    pub fn identity(nvars: usize, order: usize) -> Self {
        JetAutomorphism {
            nvars,
            order,
            images: (0..nvars).map(|i| JetPoly::var(nvars, order, i)).collect(),
        }
    }

    pub fn new(images: Vec<JetPoly>) -> Result<Self> {
        let nvars = images.len();
        let order = images.first().map_or(0, |p| p.order);
        if images.iter().any(|p| p.nvars != nvars || p.order != order) {
            return Err(Error::RingMismatch("images live in different rings".into()));
        }
        if images.iter().any(|p| !p.coefficient(&vec![0; nvars]).is_zero()) {
            return Err(Error::Invalid("automorphism images must have no constant term".into()));
        }
        let lin = Matrix::from_rows(images.iter().map(|p| p.linear_part()).collect());
        if nvars > 0 && lin.rank() < nvars {
            return Err(Error::DependentLinearParts);
        }
        Ok(JetAutomorphism { nvars, order, images })
    }

    pub fn apply(&self, f: &JetPoly) -> JetPoly {
        f.substitute(&self.images)
    }

    pub fn apply_matrix(&self, m: &JetMatrix) -> JetMatrix {
        m.map(|e| self.apply(e))
    }

    /// `(self ∘ other)(f) = self(other(f))`, i.e. images `other_i(self)`.
    pub fn compose(&self, other: &JetAutomorphism) -> JetAutomorphism {
        JetAutomorphism {
            nvars: self.nvars,
            order: self.order,
            images: other.images.iter().map(|p| self.apply(p)).collect(),
        }
    }

    /// Inverse by the fixed-point iteration `ψ ← L⁻¹(t - N(ψ))`, one degree
    /// per pass.
    pub fn inverse(&self) -> JetAutomorphism {
        let n = self.nvars;
        let lin = Matrix::from_rows(self.images.iter().map(|p| p.linear_part()).collect());
        let li = linalg::inverse(&lin).expect("invertible linear part");
        let nonlinear: Vec<JetPoly> = self
            .images
            .iter()
            .map(|p| {
                let mut q = p.clone();
                for (i, c) in p.linear_part().iter().enumerate() {
                    let mut m = vec![0; n];
                    m[i] = 1;
                    q.add_term(m, &-c);
                }
                q
            })
            .collect();
        let vars: Vec<JetPoly> = (0..n).map(|i| JetPoly::var(n, self.order, i)).collect();
        let mut psi = vars.clone();
        for _ in 0..self.order {
            let rhs: Vec<JetPoly> = (0..n).map(|k| vars[k].sub(&nonlinear[k].substitute(&psi))).collect();
            psi = (0..n)
                .map(|i| {
                    let mut acc = JetPoly::zero(n, self.order);
                    for (k, r) in rhs.iter().enumerate() {
                        if !li[(i, k)].is_zero() {
                            acc = acc.add(&r.scale(&li[(i, k)]));
                        }
                    }
                    acc
                })
                .collect();
        }
        JetAutomorphism {
            nvars: n,
            order: self.order,
            images: psi,
        }
    }
}

/// Result of [`straighten`].
#[derive(Clone, Debug)]
pub struct Straightening {
    pub automorphism: JetAutomorphism,
    pub matrix: JetMatrix,
    /// Entry `j` (row-major) becomes the coordinate `t_{assignment[j]}`.
    pub assignment: Vec<usize>,
}

/// A coordinate change turning every entry into a distinct coordinate.
/// Entries are completed to a coordinate system by the standard coordinates
/// outside the pivot columns of their linear parts.
pub fn straighten(m: &JetMatrix) -> Result<Straightening> {
    if !linear_independence(m) {
        return Err(Error::DependentLinearParts);
    }
    let n = m.nvars;
    let mut ech = EchelonBasis::new(n);
    let mut assignment = Vec::with_capacity(m.entries.len());
    for e in &m.entries {
        ech.insert(e.linear_part());
        let (p, _) = ech.rows().last().unwrap();
        assignment.push(p);
    }
    // θ_{c(j)} = entry_j (without constant term), θ_k = t_k otherwise
    let mut theta: Vec<JetPoly> = (0..n).map(|i| JetPoly::var(n, m.order, i)).collect();
    for (j, e) in m.entries.iter().enumerate() {
        let mut e = e.clone();
        let c0 = e.coefficient(&vec![0; n]);
        e.add_term(vec![0; n], &-c0);
        theta[assignment[j]] = e;
    }
    let theta = JetAutomorphism::new(theta)?;
    let phi = theta.inverse();
    let matrix = phi.apply_matrix(m);
    Ok(Straightening {
        automorphism: phi,
        matrix,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn t(n: usize, k: usize, i: usize) -> JetPoly {
        JetPoly::var(n, k, i)
    }

    #[test]
    fn monomial_count() {
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(6, 4).len(), 210);
        assert_eq!(monomials(2, 1)[1], vec![1, 0]);
    }

    #[test]
    fn coordinate_minors() {
        let m = JetMatrix::coordinate(2, 2, 4, 3);
        let i2 = minors(&m, 2).unwrap();
        let expect = t(4, 3, 0).mul(&t(4, 3, 3)).sub(&t(4, 3, 1).mul(&t(4, 3, 2)));
        assert_eq!(i2.generators, vec![expect]);
        let i1 = minors(&m, 1).unwrap();
        assert_eq!(i1.generators.len(), 4);
        assert!(matches!(minors(&m, 3), Err(Error::SizeTooLarge { .. })));
    }

    #[test]
    fn independence_examples() {
        let mut m = JetMatrix::zeros(1, 2, 2, 3);
        m.set(0, 0, t(2, 3, 0));
        m.set(0, 1, t(2, 3, 1));
        assert!(linear_independence(&m));
        m.set(0, 1, t(2, 3, 0).add(&t(2, 3, 1).mul(&t(2, 3, 1))));
        assert!(!linear_independence(&m));
        m.set(0, 0, t(2, 3, 0).add(&t(2, 3, 1).mul(&t(2, 3, 1))));
        m.set(0, 1, t(2, 3, 1));
        assert!(linear_independence(&m));
    }

    #[test]
    fn straighten_square_term() {
        let mut m = JetMatrix::zeros(1, 1, 2, 3);
        let sq = t(2, 3, 1).mul(&t(2, 3, 1));
        m.set(0, 0, t(2, 3, 0).add(&sq));
        let s = straighten(&m).unwrap();
        assert_eq!(s.automorphism.images[0], t(2, 3, 0).sub(&sq));
        assert_eq!(s.automorphism.images[1], t(2, 3, 1));
        assert_eq!(s.matrix.get(0, 0), &t(2, 3, 0));
    }

    #[test]
    fn straighten_identity() {
        let mut m = JetMatrix::zeros(1, 2, 3, 2);
        m.set(0, 0, t(3, 2, 0));
        m.set(0, 1, t(3, 2, 1));
        let s = straighten(&m).unwrap();
        assert_eq!(s.automorphism, JetAutomorphism::identity(3, 2));
    }

    #[test]
    fn ideal_comparison_examples() {
        let a = JetIdeal::new(2, 3, vec![t(2, 3, 0)]);
        let b = JetIdeal::new(2, 3, vec![t(2, 3, 0).add(&t(2, 3, 0).mul(&t(2, 3, 1)))]);
        let c = JetIdeal::new(2, 3, vec![t(2, 3, 1)]);
        assert!(ideal_jet_equal(&a, &b, 3).unwrap());
        assert!(!ideal_jet_equal(&a, &c, 3).unwrap());
        assert!(ideal_jet_equal(&a, &a, 3).unwrap());
        let d = JetIdeal::new(3, 3, vec![]);
        assert!(matches!(ideal_jet_equal(&a, &d, 3), Err(Error::RingMismatch(_))));
    }

    fn poly(n: usize, k: usize, coeffs: &[i64], skip_constant: bool) -> JetPoly {
        let mut p = JetPoly::zero(n, k);
        for (m, c) in monomials(n, k).into_iter().zip(coeffs) {
            if skip_constant && monomial_degree(&m) == 0 {
                continue;
            }
            p.add_term(m, &Scalar::from(*c));
        }
        p
    }

    fn random_auto(n: usize, k: usize, coeffs: &[i64]) -> Option<JetAutomorphism> {
        let per = monomials(n, k).len();
        let images: Vec<JetPoly> = (0..n)
            .map(|i| {
                let mut p = poly(n, k, &coeffs[i * per..(i + 1) * per], true);
                // keep the linear part close to the identity
                let mut m = vec![0; n];
                m[i] = 1;
                p.add_term(m, &Scalar::from(3));
                p
            })
            .collect();
        JetAutomorphism::new(images).ok()
    }

    proptest! {
        #[test]
        fn inverse_is_two_sided(coeffs in proptest::collection::vec(-1i64..2, 2 * 10)) {
            if let Some(phi) = random_auto(2, 3, &coeffs) {
                let psi = phi.inverse();
                prop_assert_eq!(phi.compose(&psi), JetAutomorphism::identity(2, 3));
                prop_assert_eq!(psi.compose(&phi), JetAutomorphism::identity(2, 3));
            }
        }

        #[test]
        fn minors_commute_with_automorphisms(
            coeffs in proptest::collection::vec(-1i64..2, 2 * 10),
            entries in proptest::collection::vec(-1i64..2, 4 * 10),
        ) {
            if let Some(phi) = random_auto(2, 3, &coeffs) {
                let mut m = JetMatrix::zeros(2, 2, 2, 3);
                for k in 0..4 {
                    m.entries[k] = poly(2, 3, &entries[k * 10..(k + 1) * 10], false);
                }
                for s in 1..=2 {
                    let lhs = minors(&phi.apply_matrix(&m), s).unwrap();
                    let rhs = minors(&m, s).unwrap().apply(&phi);
                    prop_assert!(ideal_jet_equal(&lhs, &rhs, 3).unwrap());
                }
                let i2 = minors(&m, 2).unwrap();
                let i1 = minors(&m, 1).unwrap();
                prop_assert!(i2.generators.iter().all(|g| i1.contains(g)));
            }
        }
    }
}
