//! Minimal models: contraction data for a dg-model and the transferred
//! minimal structure on cohomology, with the quasi-isomorphism `D → H`.
//!
//! The transferred structure and the functor `P` (with `P_1 = p`) are solved
//! arity by arity from `P ∘ b_D = b_H ∘ P` on the bar side. The linear parts
//! `b_1 = m_1` are inverted with the tensor extension of the homotopy, so the
//! result agrees with the usual sum over planar trees up to the choice of
//! contraction; both outputs are certified by the checkers.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::ainf::{AInfStructure, Table};
use crate::bar::{bar_differential, candidate_words, compositions, tensor, BarElement, BarMorphism};
use crate::basis::{Basis, Vector};
use crate::error::{Error, Result};
use crate::functor::AInfFunctor;
use crate::graded::GradedSpace;
use crate::linalg::{self, EchelonBasis, Matrix};
use crate::par::{self, ExecMode};
use crate::scalar::{FieldSpec, Scalar};

/// Cohomology with inclusion `i`, projection `p` and homotopy `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionData {
    pub cohomology: Arc<Basis>,
    /// Indexed by cohomology generator.
    pub inclusion: Vec<Vector>,
    /// Indexed by generator of the dg-model.
    pub projection: Vec<Vector>,
    pub homotopy: Vec<Vector>,
}

/// Which end of each degree's basis is preferred when choosing complements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Splitting {
    #[default]
    Forward,
    Reverse,
}

/// Minimal structure on cohomology and the functor from the dg-model.
#[derive(Clone, Debug)]
pub struct MinimalModel {
    pub structure: Arc<AInfStructure>,
    pub functor: AInfFunctor,
    pub contraction: ContractionData,
}

fn apply_linear(map: &[Vector], v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (&g, c) in v.iter() {
        out.add_scaled(&map[g as usize], c);
    }
    out
}

fn m1_image(d: &AInfStructure, g: u32) -> Vector {
    d.product(&[g]).cloned().unwrap_or_default()
}

pub fn contraction_from_dg(d: &AInfStructure) -> ContractionData {
    contraction_from_dg_with(d, Splitting::Forward)
}

/// Splits every hom complex (and weight) as `B ⊕ H ⊕ L` with `m_1: L ≅ B`,
/// by row reduction, and sets `h = -(m_1|_L)^{-1}` on `B`, zero elsewhere.
pub fn contraction_from_dg_with(d: &AInfStructure, splitting: Splitting) -> ContractionData {
    let b = d.basis();
    let homog = d
        .products(1)
        .iter()
        .all(|(w, v)| v.keys().all(|&g| b.gen(g).weight == b.gen(w[0]).weight));
    let key_weight = |g: u32| if homog { b.gen(g).weight } else { 0 };
    // block → degree → generators
    let mut blocks: BTreeMap<(usize, usize, u32), BTreeMap<i32, Vec<u32>>> = BTreeMap::new();
    for g in 0..b.len() as u32 {
        let gen = b.gen(g);
        blocks
            .entry((gen.source, gen.target, key_weight(g)))
            .or_default()
            .entry(gen.degree)
            .or_default()
            .push(g);
    }
    let n = b.len();
    let mut projection = vec![Vector::new(); n];
    let mut homotopy = vec![Vector::new(); n];
    // (source, target, degree, label, weight, representative)
    let mut h_gens: Vec<(usize, usize, i32, String, u32, Vector)> = Vec::new();

    for (&(s, t, w), by_deg) in &blocks {
        let mut by_deg = by_deg.clone();
        if splitting == Splitting::Reverse {
            for v in by_deg.values_mut() {
                v.reverse();
            }
        }
        let dim = |deg: i32| by_deg.get(&deg).map_or(0, |v| v.len());
        let to_vec = |deg: i32, v: &Vector| -> Vec<Scalar> {
            let gens = &by_deg[&deg];
            gens.iter().map(|g| v.get(g)).collect()
        };
        let from_vec = |deg: i32, x: &[Scalar]| -> Vector {
            by_deg[&deg].iter().zip(x).map(|(&g, c)| (g, c.clone())).collect()
        };
        // m1 matrices C^deg → C^{deg+1}
        let mut ls: BTreeMap<i32, Vec<Vec<Scalar>>> = BTreeMap::new();
        let mut bs: BTreeMap<i32, Vec<Vec<Scalar>>> = BTreeMap::new();
        let mut zs: BTreeMap<i32, Vec<Vec<Scalar>>> = BTreeMap::new();
        for (&deg, gens) in &by_deg {
            let rows = dim(deg + 1);
            let mut m = Matrix::zeros(rows, gens.len());
            if rows > 0 {
                for (j, &g) in gens.iter().enumerate() {
                    let col = to_vec(deg + 1, &m1_image(d, g));
                    for (i, c) in col.into_iter().enumerate() {
                        m[(i, j)] = c;
                    }
                }
            }
            let z = linalg::kernel(&m);
            let mut ech = EchelonBasis::new(gens.len());
            for v in &z {
                ech.insert(v.clone());
            }
            let mut l = Vec::new();
            for j in 0..gens.len() {
                let mut e = vec![Scalar::zero(); gens.len()];
                e[j] = Scalar::one();
                if ech.insert(e.clone()) {
                    l.push(e);
                }
            }
            let bnext: Vec<Vec<Scalar>> = l
                .iter()
                .map(|x| {
                    let col = Matrix::from_rows(x.iter().map(|c| vec![c.clone()]).collect());
                    let y = m.mul(&col);
                    (0..rows).map(|i| y[(i, 0)].clone()).collect()
                })
                .collect();
            if rows > 0 {
                bs.insert(deg + 1, bnext);
            }
            ls.insert(deg, l);
            zs.insert(deg, z);
        }
        for (&deg, gens) in &by_deg {
            let dimc = gens.len();
            let bd = bs.get(&deg).cloned().unwrap_or_default();
            let mut ech = EchelonBasis::new(dimc);
            for v in &bd {
                ech.insert(v.clone());
            }
            let mut hd = Vec::new();
            for z in &zs[&deg] {
                if ech.insert(z.clone()) {
                    hd.push(z.clone());
                }
            }
            let ld = &ls[&deg];
            // columns [B | H | L]
            let mut q = Matrix::zeros(dimc, dimc);
            for (j, col) in bd.iter().chain(hd.iter()).chain(ld.iter()).enumerate() {
                for (i, c) in col.iter().enumerate() {
                    q[(i, j)] = c.clone();
                }
            }
            let qi = linalg::inverse(&q).expect("B ⊕ H ⊕ L spans the degree");
            let lprev = ls.get(&(deg - 1)).cloned().unwrap_or_default();
            let hstart = h_gens.len();
            // label each class by a distinct pivot column of its representative
            let mut piv = EchelonBasis::new(dimc);
            for v in &hd {
                piv.insert(v.clone());
            }
            for (v, (col, _)) in hd.iter().zip(piv.rows()) {
                let label = b.gen(gens[col]).label.clone();
                h_gens.push((s, t, deg, label, w, from_vec(deg, v)));
            }
            for (j, &g) in gens.iter().enumerate() {
                let mut pv = Vector::new();
                for k in 0..hd.len() {
                    pv.add_term((hstart + k) as u32, &qi[(bd.len() + k, j)]);
                }
                projection[g as usize] = pv;
                let mut hv = vec![Scalar::zero(); dim(deg - 1)];
                for (k, l) in lprev.iter().enumerate() {
                    let c = &qi[(k, j)];
                    if c.is_zero() {
                        continue;
                    }
                    for (i, x) in l.iter().enumerate() {
                        let t = c * x;
                        hv[i] -= &t;
                    }
                }
                if !hv.is_empty() {
                    homotopy[g as usize] = from_vec(deg - 1, &hv);
                }
            }
        }
    }
    // cohomology basis, renumbered in canonical generator order
    let mut hom: BTreeMap<(usize, usize), Vec<(i32, String)>> = BTreeMap::new();
    let mut weights = HashMap::new();
    for (s, t, deg, label, w, _) in &h_gens {
        hom.entry((*s, *t)).or_default().push((*deg, label.clone()));
        if *w > 0 {
            weights.insert((*s, *t, *deg, label.clone()), *w);
        }
    }
    let hom = hom
        .into_iter()
        .map(|(k, v)| {
            let mut by: BTreeMap<i32, Vec<String>> = BTreeMap::new();
            for (d, l) in v {
                by.entry(d).or_default().push(l);
            }
            (k, GradedSpace::from_degrees(by).expect("distinct cohomology labels"))
        })
        .collect();
    let hb = Arc::new(Basis::with_weights(b.objects().to_vec(), hom, &weights).unwrap());
    let renum: Vec<u32> = h_gens
        .iter()
        .map(|(s, t, d, l, _, _)| hb.find(*s, *t, *d, l).unwrap())
        .collect();
    let mut inclusion = vec![Vector::new(); hb.len()];
    for (k, (.., rep)) in h_gens.iter().enumerate() {
        inclusion[renum[k] as usize] = rep.clone();
    }
    let projection = projection
        .into_iter()
        .map(|v| v.iter().map(|(&k, c)| (renum[k as usize], c.clone())).collect())
        .collect();
    ContractionData {
        cohomology: hb,
        inclusion,
        projection,
        homotopy,
    }
}

/// Verifies `p i = 1`, `i p - 1 = m_1 h + h m_1`, `h i = 0`, `p h = 0`,
/// `h h = 0` and that `i` lands in cycles.
pub fn check_contraction(d: &AInfStructure, c: &ContractionData) -> Result<()> {
    let b = d.basis();
    let err = |s: String| Err(Error::InvalidContraction(s));
    if c.projection.len() != b.len() || c.homotopy.len() != b.len() || c.inclusion.len() != c.cohomology.len() {
        return err("maps have the wrong size".into());
    }
    let m1 = |v: &Vector| {
        let mut out = Vector::new();
        for (&g, x) in v.iter() {
            out.add_scaled(&m1_image(d, g), x);
        }
        out
    };
    for (k, iv) in c.inclusion.iter().enumerate() {
        if apply_linear(&c.projection, iv) != Vector::single(k as u32, Scalar::one()) {
            return err(format!("p i ≠ 1 on {}", c.cohomology.describe(k as u32)));
        }
        if !apply_linear(&c.homotopy, iv).is_zero() {
            return err("h i ≠ 0".into());
        }
        if !m1(iv).is_zero() {
            return err("i does not land in cycles".into());
        }
    }
    for g in 0..b.len() as u32 {
        let e = Vector::single(g, Scalar::one());
        let mut lhs = apply_linear(&c.inclusion, &c.projection[g as usize]);
        lhs.add_scaled(&e, &-Scalar::one());
        let mut rhs = m1(&c.homotopy[g as usize]);
        rhs.add(&apply_linear(&c.homotopy, &m1_image(d, g)));
        if lhs != rhs {
            return err(format!("i p - 1 ≠ m1 h + h m1 on {}", b.describe(g)));
        }
        if !apply_linear(&c.projection, &c.homotopy[g as usize]).is_zero() {
            return err("p h ≠ 0".into());
        }
        if !apply_linear(&c.homotopy, &c.homotopy[g as usize]).is_zero() {
            return err("h h ≠ 0".into());
        }
    }
    Ok(())
}

/// Minimal model up to arity `n_max`.
pub fn transfer(d: &AInfStructure, c: &ContractionData, n_max: usize) -> Result<MinimalModel> {
    transfer_with(d, c, n_max, ExecMode::default())
}

pub fn transfer_with(d: &AInfStructure, c: &ContractionData, n_max: usize, mode: ExecMode) -> Result<MinimalModel> {
    check_contraction(d, c)?;
    let n_max = n_max.max(2);
    let d = d.with_arity_bound(n_max)?;
    let db = d.basis().clone();
    let hb = c.cohomology.clone();
    let objects: Vec<usize> = (0..db.objects().len()).collect();
    let field = d.field;

    // b_D without its linear part
    let mut higher = d.clone();
    for w in d.products(1).keys() {
        higher.set_product(w, Vector::new())?;
    }
    let b_high = bar_differential(&higher);
    let ip: Vec<Vector> = c.projection.iter().map(|v| apply_linear(&c.inclusion, v)).collect();

    let mut p = BarMorphism::new(db.clone(), hb.clone(), objects.clone(), n_max);
    for (g, v) in c.projection.iter().enumerate() {
        p.set(vec![g as u32], v.clone());
    }
    let mut bh: Vec<Table> = vec![Table::new(); n_max];

    for n in 2..=n_max {
        // b_H on H-words: Σ_{k<n} P_k(b_D^{≥2}(I y)) - Σ_{2≤r<n} b_H,r(P-blocks of I y)
        let hwords = candidate_words(&hb, &hb, &objects, n, 2);
        let vals = par::map(mode, &hwords, |y| {
            let parts: Vec<&Vector> = y.iter().map(|&g| &c.inclusion[g as usize]).collect();
            let iy = tensor(&parts);
            let mut out = p.project(&b_high.apply_element(&iy));
            let sub = blocks_through(&bh, &p, &iy, n - 1);
            out.add_scaled(&sub, &-Scalar::one());
            out
        });
        bh[n - 1] = hwords.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect();

        // P_n(w) = -T_n(H_T(w))
        let dwords = candidate_words(&db, &hb, &objects, n, 1);
        let vals = par::map(mode, &dwords, |w| {
            let ht = tensor_homotopy(&db, &c.homotopy, &ip, w);
            let mut t = blocks_through(&bh, &p, &ht, n);
            t.add_scaled(&p.project(&b_high.apply_element(&ht)), &-Scalar::one());
            t.scaled(&-Scalar::one())
        });
        let table: Table = dwords.into_iter().zip(vals).filter(|(_, v)| !v.is_zero()).collect();
        for (w, v) in table {
            p.set(w, v);
        }
    }

    let mut h = AInfStructure::new(field, hb.clone(), n_max)?;
    for t in &bh {
        for (w, v) in t {
            h.set_product(w, v.scaled(&hb.bar_sign(w)))?;
        }
    }
    let h = Arc::new(h);
    let functor = AInfFunctor::from_bar(Arc::new(d), h.clone(), &p)?;
    Ok(MinimalModel {
        structure: h,
        functor,
        contraction: c.clone(),
    })
}

/// `Σ_{2 ≤ r ≤ max_r} Σ_{blocks} b_H,r(P(w^1) ⊗ … ⊗ P(w^r))` over the words of `x`.
fn blocks_through(bh: &[Table], p: &BarMorphism, x: &BarElement, max_r: usize) -> Vector {
    let mut out = Vector::new();
    for (w, c) in x.iter() {
        let n = w.len();
        'outer: for ends in compositions(n) {
            let r = ends.len();
            if r < 2 || r > max_r || r > bh.len() || bh[r - 1].is_empty() {
                continue;
            }
            let mut parts = Vec::with_capacity(r);
            let mut start = 0;
            for &e in &ends {
                match p.component(&w[start..e]) {
                    Some(v) => parts.push(v),
                    None => continue 'outer,
                }
                start = e;
            }
            for (word, d) in tensor(&parts) {
                if let Some(v) = bh[r - 1].get(&word) {
                    out.add_scaled(v, &(c * &d));
                }
            }
        }
    }
    out
}

/// `Σ_j (-1)^{Σ_{i<j}|s w_i|} w_{<j} ⊗ h(w_j) ⊗ (ip)(w_{>j})`.
fn tensor_homotopy(db: &Basis, h: &[Vector], ip: &[Vector], w: &[u32]) -> BarElement {
    let n = w.len();
    let mut out = BarElement::new();
    let mut prefix = 0i64;
    for j in 0..n {
        let hv = &h[w[j] as usize];
        if !hv.is_zero() {
            let singles: Vec<Vector> = w[..j].iter().map(|&a| Vector::single(a, Scalar::one())).collect();
            let mut parts: Vec<&Vector> = singles.iter().collect();
            parts.push(hv);
            for &a in &w[j + 1..] {
                parts.push(&ip[a as usize]);
            }
            out.add_scaled(&tensor(&parts), &Scalar::sign(prefix));
        }
        prefix += db.gen(w[j]).degree as i64 - 1;
    }
    out
}

fn word_label(w: &[usize]) -> String {
    if w.is_empty() {
        return "1".into();
    }
    w.iter().map(|k| format!("x{k}")).collect::<Vec<_>>().join(".")
}

/// dg-model of the A∞ Ext-algebra of the residue field of `k[x]/(x^n)`:
/// the cobar construction on the dual coalgebra, tensor algebra on
/// `ξ_1 … ξ_{n-1}` (degree 1, weight `i`) with `dξ_k = -Σ_{i+j=k} ξ_i ξ_j`,
/// unit included, truncated to weight `max(n, big_n)`. The truncation is a
/// quotient by a dg-ideal, so cohomology is exact in every weight kept; this
/// covers all products of at most `big_n` degree-one classes.
pub fn local_algebra_fixture(n: usize, big_n: usize, field: FieldSpec) -> Result<AInfStructure> {
    if n < 2 {
        return Err(Error::Invalid("need n ≥ 2".into()));
    }
    let wt = n.max(big_n);
    // all words in letters 1..n-1 of total weight ≤ wt
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    let mut frontier: Vec<(Vec<usize>, usize)> = vec![(vec![], 0)];
    while let Some((w, weight)) = frontier.pop() {
        for k in 1..n {
            if weight + k <= wt {
                let mut w2 = w.clone();
                w2.push(k);
                words.push(w2.clone());
                frontier.push((w2, weight + k));
            }
        }
    }
    let mut by_deg: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    let mut weights = HashMap::new();
    for w in &words {
        by_deg.entry(w.len() as i32).or_default().push(word_label(w));
        let weight: usize = w.iter().sum();
        if weight > 0 {
            weights.insert((0, 0, w.len() as i32, word_label(w)), weight as u32);
        }
    }
    let mut hom = BTreeMap::new();
    hom.insert((0, 0), GradedSpace::from_degrees(by_deg)?);
    let basis = Arc::new(Basis::with_weights(vec!["O".into()], hom, &weights)?);
    let idx: HashMap<Vec<usize>, u32> = words
        .iter()
        .map(|w| (w.clone(), basis.find(0, 0, w.len() as i32, &word_label(w)).unwrap()))
        .collect();
    let mut s = AInfStructure::new(field, basis, big_n.max(2))?;
    for w in &words {
        // differential
        let mut dv = Vector::new();
        for (pos, &k) in w.iter().enumerate() {
            let sign = Scalar::sign(pos as i64 + 1);
            for i in 1..k {
                let mut w2 = w[..pos].to_vec();
                w2.push(i);
                w2.push(k - i);
                w2.extend_from_slice(&w[pos + 1..]);
                dv.add_term(idx[&w2], &sign);
            }
        }
        s.set_product(&[idx[w]], dv)?;
        for v in &words {
            let weight: usize = w.iter().chain(v.iter()).sum();
            if weight <= wt {
                let mut wv = w.clone();
                wv.extend_from_slice(v);
                s.set_product(&[idx[w], idx[v]], Vector::single(idx[&wv], Scalar::one()))?;
            }
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::check_ainf;
    use crate::basis::hom_map;
    use crate::functor::check_functor;

    #[test]
    fn fixture_is_dg() {
        for n in 2..=4 {
            let d = local_algebra_fixture(n, 4, FieldSpec::Rationals).unwrap();
            assert!(check_ainf(&d, 3).unwrap().is_empty(), "n = {n}");
        }
    }

    #[test]
    fn minimal_input_is_its_own_model() {
        let b = Arc::new(Basis::new(vec!["O".into()], hom_map(&[(0, 0, &[(1, &["a"]), (2, &["aa"])])])).unwrap());
        let mut s = AInfStructure::new(FieldSpec::Rationals, b, 3).unwrap();
        s.set_product(&[0, 0], Vector::single(1, Scalar::one())).unwrap();
        let c = contraction_from_dg(&s);
        assert!(c.homotopy.iter().all(|v| v.is_zero()));
        let mm = transfer(&s, &c, 3).unwrap();
        assert_eq!(*mm.structure, s);
    }

    #[test]
    fn acyclic_two_term_complex() {
        let b = Arc::new(Basis::new(vec!["O".into()], hom_map(&[(0, 0, &[(0, &["u"]), (1, &["v"])])])).unwrap());
        let mut s = AInfStructure::new(FieldSpec::Rationals, b, 2).unwrap();
        s.set_product(&[0], Vector::single(1, Scalar::from(2))).unwrap();
        let c = contraction_from_dg(&s);
        assert!(c.cohomology.is_empty());
        assert_eq!(c.homotopy[1], Vector::single(0, Scalar::from(-1) / Scalar::from(2)));
        check_contraction(&s, &c).unwrap();
    }

    #[test]
    fn dual_numbers_model() {
        let d = local_algebra_fixture(2, 4, FieldSpec::Rationals).unwrap();
        let c = contraction_from_dg(&d);
        let dims: Vec<usize> = (0..=4).map(|k| c.cohomology.gens_in(0, 0, k).len()).collect();
        assert_eq!(dims, vec![1; 5]);
        let mm = transfer(&d, &c, 4).unwrap();
        assert!(check_ainf(&mm.structure, 4).unwrap().is_empty());
        assert!(check_functor(&mm.functor).unwrap().is_empty());
        for k in 3..=4 {
            assert!(mm.structure.products(k).is_empty());
        }
    }

    #[test]
    fn cubic_model_has_m3() {
        let d = local_algebra_fixture(3, 4, FieldSpec::Rationals).unwrap();
        for split in [Splitting::Forward, Splitting::Reverse] {
            let c = contraction_from_dg_with(&d, split);
            check_contraction(&d, &c).unwrap();
            let mm = transfer(&d, &c, 4).unwrap();
            let h = &mm.structure;
            assert!(check_ainf(h, 4).unwrap().is_empty());
            assert!(check_functor(&mm.functor).unwrap().is_empty());
            let y = h.basis().gens_in(0, 0, 1)[0];
            let z = h.basis().gens_in(0, 0, 2)[0];
            assert!(h.product(&[y, y]).is_none());
            let m3 = h.product(&[y, y, y]).unwrap();
            assert_eq!(m3.len(), 1);
            assert!(!m3.get(&z).is_zero());
        }
    }
}
