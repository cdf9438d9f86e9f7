//! Seeded random structures for tests, benches and the `fixture` command.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;

use crate::ainf::{AInfPair, AInfStructure};
use crate::bar::candidate_words;
use crate::basis::{Basis, Vector, Word};
use crate::error::Result;
use crate::deformation::AdaptedChain;
use crate::dual::positive_part;
use crate::functor::{apply_homotopy, transport_with, AInfFunctor, HomotopyData};
use crate::graded::GradedSpace;
use crate::linalg::Matrix;
use crate::par::ExecMode;
use crate::scalar::{FieldSpec, Scalar};
use crate::transfer::{contraction_from_dg, local_algebra_fixture, transfer};

/// The generator every seeded fixture is drawn from.
pub fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// Small integer in `-2..=2`, zero with probability about `1 - density`.
pub fn small_scalar<R: Rng>(rng: &mut R, field: FieldSpec, density: f64) -> Scalar {
    if !rng.gen_bool(density) {
        return Scalar::zero();
    }
    let v = [-2, -1, 1, 2][rng.gen_range(0..4)];
    field.from_i64(v)
}

pub fn random_vector<R: Rng>(rng: &mut R, field: FieldSpec, support: &[u32], density: f64) -> Vector {
    support.iter().map(|&g| (g, small_scalar(rng, field, density))).filter(|(_, c)| !c.is_zero()).collect()
}

/// Random invertible `n × n` matrix with small entries.
pub fn random_invertible<R: Rng>(rng: &mut R, field: FieldSpec, n: usize) -> Matrix {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| field.from_i64(rng.gen_range(-2..=2))).collect())
            .collect();
        let m = Matrix::from_rows(rows);
        if n == 0 || m.rank() == n {
            return m;
        }
    }
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

/// One object with `A_1` of dimension `d1` (labels `a*`) and `A_2` of
/// dimension `d2` (labels `b*`), and random products `A_1^{⊗n} → A_2` for
/// `2 ≤ n ≤ arity`. Every composite of two products has an `A_2` input, so
/// any such choice is A∞.
pub fn two_step_algebra<R: Rng>(rng: &mut R, d1: usize, d2: usize, arity: usize, field: FieldSpec) -> AInfStructure {
    let mut degrees = BTreeMap::new();
    if d1 > 0 {
        degrees.insert(1, labels("a", d1));
    }
    if d2 > 0 {
        degrees.insert(2, labels("b", d2));
    }
    let mut hom = BTreeMap::new();
    hom.insert((0, 0), GradedSpace::from_degrees(degrees).unwrap());
    let basis = Arc::new(Basis::new(vec!["O".into()], hom).unwrap());
    let a2: Vec<u32> = basis.gens_in(0, 0, 2);
    let mut s = AInfStructure::new(field, basis.clone(), arity.max(2)).unwrap();
    for n in 2..=arity {
        for w in basis.words(n, None, |w| w.iter().all(|&a| basis.gen(a).degree == 1)) {
            let v = random_vector(rng, field, &a2, 0.5);
            s.set_product(&w, v).unwrap();
        }
    }
    s
}

/// Functor from `s` with random invertible linear part (blockwise on each
/// hom space and degree) and, if `higher > 0`, random components of arity
/// `2..=higher+1`; its target is the transported structure.
pub fn random_functor<R: Rng>(rng: &mut R, s: Arc<AInfStructure>, higher: usize) -> Result<AInfFunctor> {
    let b = s.basis().clone();
    let field = s.field;
    let objects: Vec<usize> = (0..b.objects().len()).collect();
    let mut f = AInfFunctor::new(s.clone(), s.clone(), objects.clone())?;
    for (&(src, tgt), space) in b.hom() {
        for (d, _) in space.degrees() {
            let gens = b.gens_in(src, tgt, d);
            let m = random_invertible(rng, field, gens.len());
            for (j, &g) in gens.iter().enumerate() {
                let v: Vector = gens.iter().enumerate().map(|(i, &h)| (h, m[(i, j)].clone())).collect();
                f.set_component(&[g], v)?;
            }
        }
    }
    for n in 2..=(higher + 1).min(s.arity_bound()) {
        for w in candidate_words(&b, &b, &objects, n, 1) {
            let (src, tgt) = b.span(&w);
            let d = b.degree_sum(&w) + 1 - n as i32;
            let v = random_vector(rng, field, &b.gens_in(src, tgt, d), 0.5);
            f.set_component(&w, v)?;
        }
    }
    let target = Arc::new(transport_with(&s, &f.to_bar(), ExecMode::default())?);
    f.with_structures(s, target)
}

/// Pair with `A = A_1 ⊕ A_2` and `M = M_0 ⊕ M_1` (dimensions in that
/// order), products `A_1^{⊗n} → A_2` and `A_1^{⊗n} ⊗ M_0 → M_1` drawn with
/// the given density. Degrees force every composite to vanish, so the
/// result is always A∞.
pub fn random_pair<R: Rng>(rng: &mut R, dims: [usize; 4], arity: usize, density: f64, field: FieldSpec) -> AInfPair {
    let [a1, a2, m0, m1] = dims;
    let mut a = BTreeMap::new();
    if a1 > 0 {
        a.insert(1, labels("a", a1));
    }
    if a2 > 0 {
        a.insert(2, labels("b", a2));
    }
    let mut m = BTreeMap::new();
    if m0 > 0 {
        m.insert(0, labels("u", m0));
    }
    if m1 > 0 {
        m.insert(1, labels("v", m1));
    }
    let mut hom = BTreeMap::new();
    hom.insert((1, 1), GradedSpace::from_degrees(a).unwrap());
    hom.insert((0, 1), GradedSpace::from_degrees(m).unwrap());
    let basis = Arc::new(Basis::new(vec!["X".into(), "Y".into()], hom).unwrap());
    let mut s = AInfStructure::new(field, basis.clone(), arity.max(2)).unwrap();
    let out_a = basis.gens_in(1, 1, 2);
    let out_m = basis.gens_in(0, 1, 1);
    let m0s = basis.gens_in(0, 1, 0);
    for n in 1..=arity {
        let words = basis.words(n, None, |w| {
            let (init, last) = w.split_at(n - 1);
            init.iter().all(|&g| basis.gen(g).source == 1 && basis.gen(g).degree == 1)
                && (basis.gen(last[0]).degree == 1 && basis.gen(last[0]).source == 1 && n >= 2
                    || m0s.contains(&last[0]) && n >= 2)
        });
        for w in words {
            let support = if basis.gen(w[n - 1]).source == 1 { &out_a } else { &out_m };
            s.set_product(&w, random_vector(rng, field, support, density)).unwrap();
        }
    }
    AInfPair::new(s, 0, 1).unwrap()
}

/// Random surjective `rows × cols` matrix; needs `rows <= cols`.
pub fn random_surjective<R: Rng>(rng: &mut R, field: FieldSpec, rows: usize, cols: usize) -> Matrix {
    assert!(rows <= cols);
    loop {
        let m = Matrix::from_rows(
            (0..rows)
                .map(|_| (0..cols).map(|_| field.from_i64(rng.gen_range(-2..=2))).collect())
                .collect(),
        );
        if m.rank() == rows {
            return m;
        }
    }
}

/// Pair with `A = A_1`, `M = M_0 ⊕ M_1` (dimensions `[a1, m0, m1]`), `m_2`
/// given by a random surjective `σ: A_1 → Hom(M_0, M_1)` and no higher
/// products, then moved by a random homotopy on all words of arity
/// `2..arity` drawn with `density`. With `density = 0` the pair is clean.
pub fn kill_target<R: Rng>(rng: &mut R, dims: [usize; 3], arity: usize, density: f64, field: FieldSpec) -> AInfPair {
    let [a1, m0, m1] = dims;
    let clean = random_pair(rng, [a1, 0, m0, m1], arity, 0.0, field);
    let mut s = clean.into_structure();
    let b = s.basis().clone();
    let (es, us, vs) = (b.gens_in(1, 1, 1), b.gens_in(0, 1, 0), b.gens_in(0, 1, 1));
    let sigma = random_surjective(rng, field, m0 * m1, a1);
    for (j, &e) in es.iter().enumerate() {
        for (ai, &x) in us.iter().enumerate() {
            let v: Vector = vs.iter().enumerate().map(|(bi, &y)| (y, sigma[(bi * m0 + ai, j)].clone())).collect();
            s.set_product(&[e, x], v).unwrap();
        }
    }
    if density > 0.0 {
        let base = Arc::new(s.clone());
        let mut h = HomotopyData::zero(base.clone());
        for n in 2..arity {
            for w in candidate_words(&b, &b, &[0, 1], n, 1) {
                let (src, tgt) = b.span(&w);
                let d = b.degree_sum(&w) + 1 - n as i32;
                h.set_component(&w, random_vector(rng, field, &b.gens_in(src, tgt, d), density)).unwrap();
            }
        }
        s = apply_homotopy(&s, &h).unwrap();
    }
    AInfPair::new(s, 0, 1).unwrap()
}

/// `End_{≥0}(V)` as a dg algebra for a random complex `V` with `dims[i]`
/// basis vectors in degree `i`: `m_1(f) = d∘f - (-1)^{|f|} f∘d` and
/// `m_2(f, g) = f∘g`. `V` is a sum of acyclic pairs and single classes moved
/// by a random change of basis in each degree. Generator `e{i}_{j}` sends
/// basis vector `j` to `i`.
pub fn random_dg<R: Rng>(rng: &mut R, dims: &[usize], arity: usize, field: FieldSpec) -> AInfStructure {
    let deg: Vec<i32> = dims.iter().enumerate().flat_map(|(d, &n)| std::iter::repeat_n(d as i32, n)).collect();
    let n = deg.len();
    let offsets: Vec<usize> = dims.iter().scan(0, |acc, &k| {
        let o = *acc;
        *acc += k;
        Some(o)
    }).collect();
    // standard differential: pair up vectors of consecutive degrees
    let mut d = vec![vec![Scalar::zero(); n]; n];
    let mut free: Vec<Vec<usize>> = dims.iter().enumerate().map(|(i, &k)| (offsets[i]..offsets[i] + k).collect()).collect();
    for i in 0..dims.len().saturating_sub(1) {
        while !free[i].is_empty() && !free[i + 1].is_empty() && rng.gen_bool(0.5) {
            let x = free[i].pop().unwrap();
            let y = free[i + 1].remove(0);
            d[y][x] = field.one();
        }
    }
    // conjugate by a random block-diagonal P: d' = P d P^{-1}
    let mut p = Matrix::zeros(n, n);
    for (i, &k) in dims.iter().enumerate() {
        let b = random_invertible(rng, field, k);
        for r in 0..k {
            for c in 0..k {
                p[(offsets[i] + r, offsets[i] + c)] = b[(r, c)].clone();
            }
        }
    }
    let pinv = crate::linalg::inverse(&p).unwrap();
    let dm = p.mul(&Matrix::from_rows(d)).mul(&pinv);
    let mut by_deg: BTreeMap<i32, Vec<String>> = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            if deg[i] >= deg[j] {
                by_deg.entry(deg[i] - deg[j]).or_default().push(format!("e{i}_{j}"));
            }
        }
    }
    let mut hom = BTreeMap::new();
    hom.insert((0, 0), GradedSpace::from_degrees(by_deg).unwrap());
    let basis = Arc::new(Basis::new(vec!["O".into()], hom).unwrap());
    let e = |i: usize, j: usize| basis.find(0, 0, deg[i] - deg[j], &format!("e{i}_{j}"));
    let mut s = AInfStructure::new(field, basis.clone(), arity.max(2)).unwrap();
    for i in 0..n {
        for j in 0..n {
            let Some(f) = e(i, j) else { continue };
            // d∘e_ij = Σ_k d[k][i] e_kj, e_ij∘d = Σ_k d[j][k] e_ik
            let sign = Scalar::sign((deg[i] - deg[j]) as i64);
            let mut v = Vector::new();
            for k in 0..n {
                if let Some(g) = e(k, j) {
                    v.add_term(g, &dm[(k, i)]);
                }
                if let Some(g) = e(i, k) {
                    v.add_term(g, &-(&sign * &dm[(j, k)]));
                }
            }
            s.set_product(&[f], v).unwrap();
            for k in 0..n {
                if let (Some(g), Some(h)) = (e(j, k), e(i, k)) {
                    s.set_product(&[f, g], Vector::single(h, field.one())).unwrap();
                }
            }
        }
    }
    s
}

/// Homotopy on `s` with random components of arity `2..=higher+1` and
/// identity linear part.
pub fn random_homotopy<R: Rng>(rng: &mut R, s: &AInfStructure, higher: usize, density: f64) -> HomotopyData {
    let b = s.basis().clone();
    let objects: Vec<usize> = (0..b.objects().len()).collect();
    let mut h = HomotopyData::zero(Arc::new(s.clone()));
    for n in 2..=(higher + 1).min(s.arity_bound()) {
        for w in candidate_words(&b, &b, &objects, n, 1) {
            let (src, tgt) = b.span(&w);
            let d = b.degree_sum(&w) + 1 - n as i32;
            h.set_component(&w, random_vector(rng, s.field, &b.gens_in(src, tgt, d), density)).unwrap();
        }
    }
    h
}

/// `m + δ(F)` for a [`random_homotopy`], via conjugation on the bar side.
/// Works for non-minimal `m`.
pub fn perturb<R: Rng>(rng: &mut R, s: &AInfStructure, higher: usize, density: f64) -> AInfStructure {
    let h = random_homotopy(rng, s, higher, density);
    let bar = crate::bar::conjugate_unipotent(&crate::bar::bar_differential(s), &h.to_bar(), ExecMode::default()).unwrap();
    let mut out = bar.to_structure(s.field);
    if out.arity_bound() != s.arity_bound() {
        out = out.with_arity_bound(s.arity_bound()).unwrap();
    }
    out
}

/// Adds a random nonzero vector of the right degree to one product of
/// arity `2..=arity`, or to `m_1` when no such word exists.
pub fn corrupt<R: Rng>(rng: &mut R, s: &AInfStructure, arity: usize) -> AInfStructure {
    let b = s.basis().clone();
    let objects: Vec<usize> = (0..b.objects().len()).collect();
    let mut out = s.clone();
    let mut choices: Vec<(Word, Vec<u32>)> = Vec::new();
    for n in (1..=arity.min(s.arity_bound())).rev() {
        for w in candidate_words(&b, &b, &objects, n, 2) {
            let (src, tgt) = b.span(&w);
            let d = b.degree_sum(&w) + 2 - n as i32;
            choices.push((w, b.gens_in(src, tgt, d)));
        }
        if n == 2 && !choices.is_empty() {
            break;
        }
    }
    if choices.is_empty() {
        return out;
    }
    let (w, support) = &choices[rng.gen_range(0..choices.len())];
    let mut extra = random_vector(rng, s.field, support, 1.0);
    if extra.is_zero() {
        extra = Vector::single(support[0], s.field.one());
    }
    out.add_to_product(w, &extra).unwrap();
    out
}

/// Category with the positive part of the Ext-model of `k[x]/(x^n)` as
/// `End(O)`, objects `P0, P1, …` with `Hom(P_i, O)` of dimension `dims[i]`
/// in degree 0, one map `f_i: P_i → P_{i+1}`, and random products
/// `m(e_1,…,e_k, x, f_i)`. Every composite lands in a vanishing degree.
pub fn adapted_chain<R: Rng>(rng: &mut R, n: usize, dims: &[usize], arity: usize, field: FieldSpec) -> (AInfStructure, AdaptedChain) {
    let d = local_algebra_fixture(n, arity, field).unwrap();
    let mm = transfer(&d, &contraction_from_dg(&d), arity).unwrap();
    let a = positive_part(&mm.structure, 0).unwrap();
    let ab = a.basis();
    let mut objects = vec!["O".to_string()];
    objects.extend((0..dims.len()).map(|i| format!("P{i}")));
    let mut hom = BTreeMap::new();
    hom.insert((0, 0), ab.hom_space(0, 0).unwrap().clone());
    for (i, &dim) in dims.iter().enumerate() {
        let mut deg = BTreeMap::new();
        deg.insert(0, labels(&format!("x{i}_"), dim));
        hom.insert((i + 1, 0), GradedSpace::from_degrees(deg).unwrap());
        if i + 1 < dims.len() {
            let mut f = BTreeMap::new();
            f.insert(0, vec![format!("f{i}")]);
            hom.insert((i + 1, i + 2), GradedSpace::from_degrees(f).unwrap());
        }
    }
    let basis = Arc::new(Basis::new(objects, hom).unwrap());
    let remap = |g: u32| {
        let gen = ab.gen(g);
        basis.find(0, 0, gen.degree, &gen.label).unwrap()
    };
    let mut s = AInfStructure::new(field, basis.clone(), arity).unwrap();
    for (w, v) in a.entries() {
        let nw: Vec<u32> = w.iter().map(|&g| remap(g)).collect();
        let nv: Vector = v.iter().map(|(&g, c)| (remap(g), c.clone())).collect();
        s.set_product(&nw, nv).unwrap();
    }
    let e1 = basis.gens_in(0, 0, 1);
    let mut maps = Vec::new();
    for i in 0..dims.len().saturating_sub(1) {
        let f = basis.find(i + 1, i + 2, 0, &format!("f{i}")).unwrap();
        maps.push(Vector::single(f, Scalar::one()));
        let xs = basis.gens_in(i + 2, 0, 0);
        let out = basis.gens_in(i + 1, 0, 0);
        for k in 0..=arity - 2 {
            let prefixes: Vec<Vec<u32>> = if k == 0 {
                vec![vec![]]
            } else {
                basis.words(k, None, |w| w.iter().all(|g| e1.contains(g)))
            };
            for pre in &prefixes {
                for &x in &xs {
                    let mut w = pre.clone();
                    w.push(x);
                    w.push(f);
                    s.set_product(&w, random_vector(rng, field, &out, 0.6)).unwrap();
                }
            }
        }
    }
    let chain = AdaptedChain {
        objects: (1..=dims.len()).collect(),
        maps,
        target: 0,
    };
    (s, chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::check_ainf;
    use crate::functor::check_functor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_step_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = two_step_algebra(&mut rng, 2, 2, 4, FieldSpec::Rationals);
        assert!(s.nonzero_entries() > 0);
        assert!(check_ainf(&s, 4).unwrap().is_empty());
    }

    #[test]
    fn random_functor_is_a_functor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = Arc::new(two_step_algebra(&mut rng, 2, 2, 3, FieldSpec::Rationals));
        let f = random_functor(&mut rng, s, 2).unwrap();
        assert!(check_ainf(&f.target, 3).unwrap().is_empty());
        assert!(check_functor(&f).unwrap().is_empty());
    }

    #[test]
    fn seeded_output_is_reproducible() {
        let a = two_step_algebra(&mut ChaCha8Rng::seed_from_u64(4), 3, 2, 3, FieldSpec::Rationals);
        let b = two_step_algebra(&mut ChaCha8Rng::seed_from_u64(4), 3, 2, 3, FieldSpec::Rationals);
        assert_eq!(a, b);
    }
    #[test]
    fn random_dg_is_dg() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for dims in [vec![1, 1], vec![2, 1], vec![1, 1, 1], vec![1, 2], vec![3]] {
            for _ in 0..3 {
                let s = random_dg(&mut rng, &dims, 4, FieldSpec::Rationals);
                assert!(check_ainf(&s, 4).unwrap().is_empty(), "{dims:?}");
                let p = perturb(&mut rng, &s, 2, 0.5);
                assert!(check_ainf(&p, 4).unwrap().is_empty(), "{dims:?}");
            }
        }
    }

    #[test]
    fn corruption_usually_breaks_the_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let broken = (0..10)
            .filter(|_| {
                let s = random_dg(&mut rng, &[1, 1, 1], 4, FieldSpec::Rationals);
                !check_ainf(&corrupt(&mut rng, &s, 3), 4).unwrap().is_empty()
            })
            .count();
        assert!(broken >= 8, "{broken}");
    }

}
