//! The deformation `M ⊗ A^!` of a module's differential, the components of
//! the deformed representable functor, adapted complexes, first-order
//! specialization and the commutative family matrix.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use crate::ainf::{AInfPair, AInfStructure};
use crate::basis::{Vector, Word};
use crate::dual::{abelianize, dual_algebra, positive_part, CommutativeJetRing, DualElement, TruncatedDualAlgebra};
use crate::error::{Error, Result};
use crate::jet::{JetMatrix, JetPoly};
use crate::scalar::Scalar;

/// Element of `Hom(·, O) ⊗ A^!`: basis generator ↦ coefficient.
pub type ModuleElement = BTreeMap<u32, DualElement>;

/// Right `A^!`-linear map given on generators.
pub type ModuleMap = BTreeMap<u32, ModuleElement>;

/// `R(O)` together with the generators of `Hom^1(O,O)` in `s` that its
/// letters stand for.
#[derive(Clone, Debug)]
pub struct ObjectDual {
    pub algebra: Arc<TruncatedDualAlgebra>,
    pub letters: Vec<u32>,
}

impl ObjectDual {
    /// Dual algebra of the positive part of `End(o)`.
    pub fn new(s: &AInfStructure, o: usize, k: usize) -> Result<Self> {
        let pos = positive_part(s, o)?;
        let algebra = dual_algebra(&pos, 0, k)?;
        let b = s.basis();
        let letters = algebra
            .source_gens
            .iter()
            .map(|&g| {
                let gen = pos.basis().gen(g);
                b.find(o, o, gen.degree, &gen.label).unwrap()
            })
            .collect();
        Ok(ObjectDual {
            algebra: Arc::new(algebra),
            letters,
        })
    }

    pub fn k(&self) -> usize {
        self.algebra.k
    }

    fn positions(&self) -> HashMap<u32, u32> {
        self.letters.iter().enumerate().map(|(i, &g)| (g, i as u32)).collect()
    }
}

/// `Σ_I ±m(e_I, x, tail) ⊗ e*_I` for every `x` and every `tail` of length
/// `p`, grouped by `(x, tail)`; the sign is the bar sign of the whole word.
fn expand(s: &AInfStructure, d: &ObjectDual, p: usize, keep: impl Fn(&[u32]) -> bool) -> HashMap<Word, ModuleElement> {
    let pos = d.positions();
    let b = s.basis();
    let mut out: HashMap<Word, ModuleElement> = HashMap::new();
    for (w, v) in s.entries() {
        if w.len() < p + 1 || w.len() - p - 1 > d.k() {
            continue;
        }
        let (prefix, suffix) = w.split_at(w.len() - p - 1);
        if !keep(suffix) {
            continue;
        }
        let Some(dw) = prefix.iter().map(|a| pos.get(a).copied()).collect::<Option<Word>>() else {
            continue;
        };
        let sign = b.bar_sign(w);
        let entry = out.entry(suffix.to_vec()).or_default();
        for (&o, c) in v.iter() {
            entry.entry(o).or_default().add_term(dw.clone(), &(&sign * c));
        }
    }
    for e in out.values_mut() {
        for c in e.values_mut() {
            *c = d.algebra.normal_form(c);
        }
        e.retain(|_, c| !c.is_zero());
    }
    out
}

/// `f(x ⊗ r) = Σ out ⊗ f_x(out)·r`, extended right-linearly.
pub fn apply_map(r: &TruncatedDualAlgebra, f: &ModuleMap, x: &ModuleElement) -> ModuleElement {
    let mut out = ModuleElement::new();
    for (g, rho) in x {
        let Some(img) = f.get(g) else { continue };
        for (o, sigma) in img {
            out.entry(*o).or_default().add(&r.multiply(sigma, rho));
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `g ∘ f`.
pub fn compose_maps(r: &TruncatedDualAlgebra, g: &ModuleMap, f: &ModuleMap) -> ModuleMap {
    f.iter()
        .map(|(x, img)| (*x, apply_map(r, g, img)))
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

fn add_into(acc: &mut ModuleElement, x: &ModuleElement, c: &Scalar) {
    for (g, rho) in x {
        acc.entry(*g).or_default().add_scaled(rho, c);
    }
    acc.retain(|_, c| !c.is_zero());
}

/// `M ⊗ A^!` with the differential `c_M`.
#[derive(Clone, Debug)]
pub struct DeformedModuleComplex {
    pub pair: AInfPair,
    pub dual: ObjectDual,
    /// Module generators by (degree, label).
    pub module_gens: Vec<u32>,
    /// `c_M(x ⊗ 1)` for each module generator `x`.
    pub differential: ModuleMap,
}

/// `c_M(x ⊗ r) = Σ_n (-1)^{C(n+1,2)} m_{n+1}(e_{i_1},…,e_{i_n},x) ⊗ e*_{i_1}…e*_{i_n}·r`
/// over words of length `≤ K`, with `A^! = R(Y)` the dual of `End(Y)_{>0}`.
pub fn deformed_differential(pair: &AInfPair, k: usize) -> Result<DeformedModuleComplex> {
    let s = pair.structure();
    let dual = ObjectDual::new(s, pair.y(), k)?;
    let module_gens = pair.module_gens();
    let b = s.basis().clone();
    let x = pair.x();
    let raw = expand(s, &dual, 0, |suffix| b.gen(suffix[0]).source == x);
    let differential = raw.into_iter().map(|(w, v)| (w[0], v)).filter(|(_, v)| !v.is_empty()).collect();
    Ok(DeformedModuleComplex {
        pair: pair.clone(),
        dual,
        module_gens,
        differential,
    })
}

impl DeformedModuleComplex {
    pub fn algebra(&self) -> &TruncatedDualAlgebra {
        &self.dual.algebra
    }

    /// `c_M ∘ c_M` in normal form. Only meaningful while every word of
    /// length `≤ K` sees a full arity: `K + 1 ≤ N`.
    pub fn square(&self) -> Result<ModuleMap> {
        let n = self.pair.structure().arity_bound();
        let k = self.dual.k();
        if k + 1 > n {
            return Err(Error::TruncationTooSmall { have: n, need: k + 1 });
        }
        Ok(compose_maps(self.algebra(), &self.differential, &self.differential))
    }

    /// `(M, m_1)`: the word-length-zero part.
    pub fn specialize_augmentation(&self) -> BTreeMap<u32, Vector> {
        self.differential
            .iter()
            .map(|(x, img)| {
                let v: Vector = img.iter().map(|(o, c)| (*o, c.get(&Vec::new()))).filter(|(_, c)| !c.is_zero()).collect();
                (*x, v)
            })
            .filter(|(_, v)| !v.is_zero())
            .collect()
    }

    pub fn to_matrix_terms(&self) -> Vec<(u32, u32, DualElement)> {
        let mut out = Vec::new();
        for (x, img) in &self.differential {
            for (o, c) in img {
                out.push((*o, *x, c.clone()));
            }
        }
        out
    }
}

/// Differential over `k[ε]/(ε²)`: `d(a) = base(a) + eps(a)·ε`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstOrder {
    pub base: BTreeMap<u32, Vector>,
    pub eps: BTreeMap<u32, Vector>,
}

/// Pushes `c_M` along `π_ξ(e*) = e*(ξ)·ε`: words of length two or more die,
/// a letter `e*_i` becomes `ξ_i ε`.
pub fn specialize_first_order(d: &DeformedModuleComplex, xi: &Vector) -> FirstOrder {
    let pos: HashMap<u32, usize> = d.dual.letters.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let mut coords = vec![Scalar::zero(); d.dual.letters.len()];
    for (g, c) in xi.iter() {
        if let Some(&i) = pos.get(g) {
            coords[i] = c.clone();
        }
    }
    let mut base = BTreeMap::new();
    let mut eps = BTreeMap::new();
    for (x, img) in &d.differential {
        let mut b0 = Vector::new();
        let mut b1 = Vector::new();
        for (o, c) in img {
            for (w, coef) in c.iter() {
                match w.len() {
                    0 => b0.add_term(*o, coef),
                    1 => b1.add_term(*o, &(coef * &coords[w[0] as usize])),
                    _ => {}
                }
            }
        }
        if !b0.is_zero() {
            base.insert(*x, b0);
        }
        if !b1.is_zero() {
            eps.insert(*x, b1);
        }
    }
    FirstOrder { base, eps }
}

/// `F_{O,p}(x_1,…,x_p)` for every composable tuple in a structure, sharing
/// one dual algebra `R(O)`.
#[derive(Clone, Debug)]
pub struct DeformedFunctor {
    pub structure: Arc<AInfStructure>,
    pub object: usize,
    pub dual: ObjectDual,
    by_tail: Vec<HashMap<Word, ModuleMap>>,
}

impl DeformedFunctor {
    pub fn new(s: Arc<AInfStructure>, o: usize, k: usize, p_max: usize) -> Result<Self> {
        let dual = ObjectDual::new(&s, o, k)?;
        let b = s.basis().clone();
        let mut by_tail = Vec::with_capacity(p_max + 1);
        for p in 0..=p_max {
            let raw = expand(&s, &dual, p, |suffix| b.gen(suffix[0]).target == o);
            let mut t: HashMap<Word, ModuleMap> = HashMap::new();
            for (w, v) in raw {
                if !v.is_empty() {
                    t.entry(w[1..].to_vec()).or_default().insert(w[0], v);
                }
            }
            by_tail.push(t);
        }
        Ok(DeformedFunctor {
            structure: s,
            object: o,
            dual,
            by_tail,
        })
    }

    pub fn p_max(&self) -> usize {
        self.by_tail.len() - 1
    }

    /// `F_{O,p}(x_1,…,x_p)`: `Hom(X_0,O) ⊗ A^! → Hom(X_p,O) ⊗ A^!`.
    pub fn component(&self, xs: &[u32]) -> ModuleMap {
        self.by_tail
            .get(xs.len())
            .and_then(|t| t.get(xs))
            .cloned()
            .unwrap_or_default()
    }

    fn component_multilinear(&self, xs: &[Vector]) -> ModuleMap {
        let mut acc: Vec<(Word, Scalar)> = vec![(Vec::new(), Scalar::one())];
        for v in xs {
            let mut next = Vec::new();
            for (w, c) in &acc {
                for (&g, d) in v.iter() {
                    let mut w2 = w.clone();
                    w2.push(g);
                    next.push((w2, c * d));
                }
            }
            acc = next;
        }
        let mut out = ModuleMap::new();
        for (w, c) in acc {
            for (x, img) in self.component(&w) {
                add_into(out.entry(x).or_default(), &img, &c);
            }
        }
        out.retain(|_, v| !v.is_empty());
        out
    }

    /// The A∞-functor identity at `(x; x_1,…,x_p)`, read off from `b² = 0`:
    /// `Σ_q F_{p-q}(x_{q+1}…)∘F_q(x_1…x_q)(x) + Σ_{i≤j} ± F(x_1…, m(x_i…x_j), …)(x)`,
    /// which vanishes in `Hom(X_p,O) ⊗ A^!` when `K + 1 + p ≤ N`.
    pub fn residual(&self, x: u32, xs: &[u32]) -> Result<ModuleElement> {
        let s = &self.structure;
        let b = s.basis();
        let p = xs.len();
        let n = s.arity_bound();
        if self.dual.k() + 1 + p > n {
            return Err(Error::TruncationTooSmall { have: n, need: self.dual.k() + 1 + p });
        }
        if p > self.p_max() {
            return Err(Error::ArityExceeded {
                requested: p,
                bound: self.p_max(),
            });
        }
        let r = self.dual.algebra.as_ref();
        let one: ModuleElement = [(x, r.one())].into_iter().collect();
        let mut acc = ModuleElement::new();
        for q in 0..=p {
            let inner = apply_map(r, &self.component(&xs[..q]), &one);
            let outer = apply_map(r, &self.component(&xs[q..]), &inner);
            add_into(&mut acc, &outer, &Scalar::one());
        }
        let sd = |g: u32| b.gen(g).degree as i64 - 1;
        for i in 0..p {
            let prefix: i64 = sd(x) + xs[..i].iter().map(|&g| sd(g)).sum::<i64>();
            for j in i..p {
                let block = &xs[i..=j];
                let Some(m) = s.product(block) else { continue };
                let inner = m.scaled(&(b.bar_sign(block) * Scalar::sign(prefix)));
                let mut args: Vec<Vector> = xs[..i].iter().map(|&g| Vector::single(g, Scalar::one())).collect();
                args.push(inner);
                args.extend(xs[j + 1..].iter().map(|&g| Vector::single(g, Scalar::one())));
                let f = self.component_multilinear(&args);
                add_into(&mut acc, &apply_map(r, &f, &one), &Scalar::one());
            }
        }
        for c in acc.values_mut() {
            *c = r.normal_form(c);
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(acc)
    }
}

/// `F_{O,p}(x_1,…,x_p)` on its own; builds `R(O)` at `K`.
pub fn functor_component(s: &AInfStructure, o: usize, xs: &[u32], k: usize) -> Result<ModuleMap> {
    let f = DeformedFunctor::new(Arc::new(s.clone()), o, k, xs.len())?;
    Ok(f.component(xs))
}

/// Objects `P^0, …, P^n` (in the order the complex runs), maps
/// `P^i → P^{i+1}` of degree 0, and the target object `O`.
#[derive(Clone, Debug)]
pub struct AdaptedChain {
    pub objects: Vec<usize>,
    pub maps: Vec<Vector>,
    pub target: usize,
}

/// `Hom^0(P^n,O)⊗A^! → … → Hom^0(P^0,O)⊗A^!` with differentials `F_{O,1}`.
#[derive(Clone, Debug)]
pub struct AdaptedComplex {
    pub dual: ObjectDual,
    /// Generators of `Hom^0(P^i, O)`.
    pub terms: Vec<Vec<u32>>,
    /// `differentials[i]: term i+1 → term i`, induced by `P^i → P^{i+1}`.
    pub differentials: Vec<ModuleMap>,
}

pub fn adapted_complex(s: &AInfStructure, chain: &AdaptedChain, k: usize) -> Result<AdaptedComplex> {
    let b = s.basis();
    let o = chain.target;
    if chain.maps.len() + 1 != chain.objects.len() {
        return Err(Error::Invalid("need one map between consecutive objects".into()));
    }
    let mut terms = Vec::new();
    for (i, &p) in chain.objects.iter().enumerate() {
        if let Some(sp) = b.hom_space(p, o) {
            for (d, labels) in sp.degrees() {
                if d != 0 && !labels.is_empty() {
                    return Err(Error::NotAdapted {
                        position: i,
                        degree: d,
                        reason: "Hom(P, O) is not concentrated in degree 0".into(),
                    });
                }
            }
        }
        terms.push(b.gens_in(p, o, 0));
    }
    for (i, f) in chain.maps.iter().enumerate() {
        let (src, tgt) = (chain.objects[i], chain.objects[i + 1]);
        for (&g, _) in f.iter() {
            let gen = b.gen(g);
            if gen.source != src || gen.target != tgt || gen.degree != 0 {
                return Err(Error::NotAdapted {
                    position: i,
                    degree: gen.degree,
                    reason: "chain map is not a degree-0 morphism P^i → P^{i+1}".into(),
                });
            }
        }
    }
    for i in 0..chain.maps.len().saturating_sub(1) {
        let mut comp = Vector::new();
        for (&g, c) in chain.maps[i + 1].iter() {
            for (&h, d) in chain.maps[i].iter() {
                if let Some(m) = s.product(&[g, h]) {
                    comp.add_scaled(m, &(c * d));
                }
            }
        }
        if !comp.is_zero() {
            return Err(Error::NotAdapted {
                position: i,
                degree: 0,
                reason: "consecutive chain maps do not compose to zero".into(),
            });
        }
    }
    let f = DeformedFunctor::new(Arc::new(s.clone()), o, k, 1)?;
    let differentials = chain.maps.iter().map(|m| f.component_multilinear(std::slice::from_ref(m))).collect();
    Ok(AdaptedComplex {
        dual: f.dual.clone(),
        terms,
        differentials,
    })
}

impl AdaptedComplex {
    /// `d_i ∘ d_{i+1}` for each consecutive pair.
    pub fn squares(&self) -> Vec<ModuleMap> {
        let r = self.dual.algebra.as_ref();
        (0..self.differentials.len().saturating_sub(1))
            .map(|i| compose_maps(r, &self.differentials[i], &self.differentials[i + 1]))
            .collect()
    }
}

/// The differential `H^0 ⊗ R → H^1 ⊗ R` as a matrix of jet polynomials.
#[derive(Clone, Debug)]
pub struct FamilyMatrix {
    /// Generators of `M_1` (rows) and `M_0` (columns).
    pub rows: Vec<u32>,
    pub cols: Vec<u32>,
    /// Generators of `A_1` whose duals are the variables.
    pub variables: Vec<u32>,
    pub ring: CommutativeJetRing,
    pub matrix: JetMatrix,
}

/// Entry `(β, α) = Σ_n (-1)^{C(n+1,2)} ⟨β*, m_{n+1}(e_{i_1},…,e_{i_n},x_α)⟩ t_{i_1}⋯t_{i_n}`.
pub fn family_matrix(pair: &AInfPair, k: usize) -> Result<FamilyMatrix> {
    let s = pair.structure();
    let b = s.basis();
    for g in pair.module_gens() {
        let d = b.gen(g).degree;
        if d != 0 && d != 1 {
            return Err(Error::WrongModuleShape(format!("module has a generator in degree {d}")));
        }
        if s.product(&[g]).is_some() {
            return Err(Error::WrongModuleShape("m1 does not vanish on the module".into()));
        }
    }
    let dual = ObjectDual::new(s, pair.y(), k)?;
    let ring = abelianize(&dual.algebra);
    let rows = pair.module_gens_in(1);
    let cols = pair.module_gens_in(0);
    let g = dual.letters.len();
    let pos = dual.positions();
    let row_of: HashMap<u32, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let col_of: HashMap<u32, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut entries = vec![JetPoly::zero(g, k); rows.len() * cols.len()];
    for (w, v) in s.entries() {
        let (prefix, last) = w.split_at(w.len() - 1);
        let Some(&col) = col_of.get(&last[0]) else { continue };
        if prefix.len() > k {
            continue;
        }
        let Some(letters) = prefix.iter().map(|a| pos.get(a).copied()).collect::<Option<Word>>() else {
            continue;
        };
        let mut mono = vec![0u32; g];
        for &l in &letters {
            mono[l as usize] += 1;
        }
        let sign = b.bar_sign(w);
        for (o, c) in v.iter() {
            if let Some(&row) = row_of.get(o) {
                entries[row * cols.len() + col].add_term(mono.clone(), &(&sign * c));
            }
        }
    }
    let entries = entries.iter().map(|e| ring.normal_form(e)).collect();
    Ok(FamilyMatrix {
        matrix: JetMatrix {
            rows: rows.len(),
            cols: cols.len(),
            nvars: g,
            order: k,
            entries,
        },
        rows,
        cols,
        variables: dual.letters,
        ring,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::representable_pair;
    use crate::fixtures;
    use crate::scalar::FieldSpec;
    use crate::transfer::{contraction_from_dg, local_algebra_fixture, transfer};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn local_pair(n: usize, arity: usize) -> AInfPair {
        let d = local_algebra_fixture(n, arity, FieldSpec::Rationals).unwrap();
        let mm = transfer(&d, &contraction_from_dg(&d), arity).unwrap();
        representable_pair(&mm.structure, 0, 0).unwrap()
    }

    #[test]
    fn square_vanishes_on_local_pairs() {
        for n in 2..=3 {
            let p = local_pair(n, 5);
            let c = deformed_differential(&p, 4).unwrap();
            assert!(c.square().unwrap().is_empty(), "n = {n}");
            assert!(!c.differential.is_empty());
        }
    }

    #[test]
    fn truncation_guard() {
        let p = local_pair(2, 3);
        let c = deformed_differential(&p, 4).unwrap();
        assert!(matches!(c.square(), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn dual_numbers_expansion() {
        // A = Ext^+ (y, z), M = Ext^* (1, y, z); c_M(1 ⊗ 1) = -m2(y,1) ⊗ t
        let p = local_pair(2, 3);
        let c = deformed_differential(&p, 2).unwrap();
        let b = p.basis();
        let one = b.find(p.x(), p.y(), 0, "1").unwrap();
        let y = b.gens_in(p.x(), p.y(), 1)[0];
        let img = &c.differential[&one];
        assert_eq!(img.len(), 1);
        assert_eq!(img[&y], DualElement::single(vec![0], Scalar::from(-1)));
        assert!(c.specialize_augmentation().is_empty());
    }

    #[test]
    fn no_products_gives_m1() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pair = fixtures::random_pair(&mut rng, [2, 1, 2, 3], 4, 0.0, FieldSpec::Rationals);
        let c = deformed_differential(&pair, 3).unwrap();
        assert!(c.differential.values().all(|img| img.values().all(|r| r.keys().all(Vec::is_empty))));
    }

    #[test]
    fn first_order_examples() {
        let p = local_pair(3, 4);
        let c = deformed_differential(&p, 3).unwrap();
        let zero = specialize_first_order(&c, &Vector::new());
        assert!(zero.eps.is_empty());
        assert_eq!(zero.base, c.specialize_augmentation());
        let y = p.algebra_gens_in(1)[0];
        let fo = specialize_first_order(&c, &Vector::single(y, Scalar::one()));
        assert!(!fo.eps.is_empty());
        // ε-part is -m2(ξ, a)
        let b = p.basis();
        for (x, v) in &fo.eps {
            let m = p.structure().product(&[y, *x]).cloned().unwrap_or_default();
            assert_eq!(*v, m.scaled(&Scalar::from(-1)), "{}", b.describe(*x));
        }
    }

    #[test]
    fn functor_identities_on_chain_fixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (s, chain) = fixtures::adapted_chain(&mut rng, 3, &[2, 3], 5, FieldSpec::Rationals);
        let s = Arc::new(s);
        let f = DeformedFunctor::new(s.clone(), chain.target, 2, 2).unwrap();
        let b = s.basis();
        let o = chain.target;
        let mut checked = 0;
        for x in b.gens().iter().enumerate().filter(|(_, g)| g.target == o).map(|(i, _)| i as u32) {
            let x0 = b.gen(x).source;
            let tails1 = b.words(1, None, |w| b.gen(w[0]).target == x0);
            for t in &tails1 {
                assert!(f.residual(x, t).unwrap().is_empty());
                checked += 1;
                let tails2 = b.words(1, None, |w| b.gen(w[0]).target == b.gen(t[0]).source);
                for u in tails2 {
                    let xs = [t[0], u[0]];
                    assert!(f.residual(x, &xs).unwrap().is_empty());
                }
            }
            assert!(f.residual(x, &[]).unwrap().is_empty());
        }
        assert!(checked > 0);
    }

    #[test]
    fn adapted_complex_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (s, chain) = fixtures::adapted_chain(&mut rng, 3, &[2, 3], 5, FieldSpec::Rationals);
        let c = adapted_complex(&s, &chain, 3).unwrap();
        assert_eq!(c.terms.len(), 2);
        assert!(c.squares().iter().all(|m| m.is_empty()));
        // specialization at the augmentation is the ordinary Hom complex
        let d = &c.differentials[0];
        for &x in &c.terms[1] {
            let mut expect = Vector::new();
            for (&f, cf) in chain.maps[0].iter() {
                if let Some(m) = s.product(&[x, f]) {
                    expect.add_scaled(m, cf);
                }
            }
            let got: Vector = d
                .get(&x)
                .map(|img| img.iter().map(|(o, r)| (*o, r.get(&Vec::new()))).collect())
                .unwrap_or_default();
            assert_eq!(got, expect);
        }
        let single = AdaptedChain {
            objects: vec![chain.objects[0]],
            maps: vec![],
            target: chain.target,
        };
        let c1 = adapted_complex(&s, &single, 3).unwrap();
        assert!(c1.differentials.is_empty());
        let zero = AdaptedChain {
            maps: vec![Vector::new()],
            ..chain.clone()
        };
        assert!(adapted_complex(&s, &zero, 3).unwrap().differentials[0].is_empty());
    }

    #[test]
    fn not_adapted_is_reported() {
        let p = local_pair(2, 3);
        let chain = AdaptedChain {
            objects: vec![p.x()],
            maps: vec![],
            target: p.y(),
        };
        let e = adapted_complex(p.structure(), &chain, 2).unwrap_err();
        assert!(matches!(e, Error::NotAdapted { position: 0, degree: 1, .. }));
    }

    #[test]
    fn family_matrix_linear_part_is_m2_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pair = fixtures::random_pair(&mut rng, [3, 2, 2, 3], 4, 0.6, FieldSpec::Rationals);
        let fm = family_matrix(&pair, 3).unwrap();
        let s = pair.structure();
        for (ri, &beta) in fm.rows.iter().enumerate() {
            for (ci, &alpha) in fm.cols.iter().enumerate() {
                let lin = fm.matrix.get(ri, ci).linear_part();
                for (vi, &e) in fm.variables.iter().enumerate() {
                    let m = s.product(&[e, alpha]).map(|v| v.get(&beta)).unwrap_or_else(Scalar::zero);
                    // (-1)^{C(2,2)} = -1
                    assert_eq!(lin[vi], -m);
                }
            }
        }
    }

    #[test]
    fn family_matrix_shape_errors() {
        let p = local_pair(3, 4);
        assert!(matches!(family_matrix(&p, 2), Err(Error::WrongModuleShape(_))));
    }
}
