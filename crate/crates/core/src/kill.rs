//! Killing the products `A_1^{⊗(n-1)} ⊗ M_0 → M_1` for `n > 2` by a sequence
//! of homotopies whose only component is `f_n: A_1^{⊗n} → A_1`.

use std::collections::HashSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::ainf::{AInfPair, AInfStructure};
use crate::ainf::Table;
use crate::bar::{bar_differential, conjugate_unipotent_partial};
use crate::basis::{Vector, Word};
use crate::error::{Error, Result};
use crate::functor::{apply_homotopy_with, HomotopyData};
use crate::linalg::{right_inverse, Matrix};
use crate::par::ExecMode;
use crate::scalar::Scalar;

/// A minimal pair together with the pieces the killing algorithm uses.
#[derive(Clone, Debug)]
pub struct KillTarget {
    pub pair: AInfPair,
    pub a1: Vec<u32>,
    pub m0: Vec<u32>,
    pub m1: Vec<u32>,
    /// `σ(e)(x) = m_2(e, x)`; row `β·|M_0| + α`, column `e`.
    pub sigma: Matrix,
}

impl KillTarget {
    pub fn new(pair: AInfPair) -> Result<Self> {
        let s = pair.structure();
        if !s.is_minimal() {
            return Err(Error::NotMinimal(s.products(1).len()));
        }
        let a1 = pair.algebra_gens_in(1);
        let m0 = pair.module_gens_in(0);
        let m1 = pair.module_gens_in(1);
        let mut sigma = Matrix::zeros(m0.len() * m1.len(), a1.len());
        for (j, &e) in a1.iter().enumerate() {
            for (ai, &x) in m0.iter().enumerate() {
                if let Some(v) = s.product(&[e, x]) {
                    for (bi, &y) in m1.iter().enumerate() {
                        sigma[(bi * m0.len() + ai, j)] = v.get(&y);
                    }
                }
            }
        }
        Ok(KillTarget { pair, a1, m0, m1, sigma })
    }

    pub fn structure(&self) -> &AInfStructure {
        self.pair.structure()
    }

    /// Words `e_1 … e_n x` with `e_i ∈ A_1`, `x ∈ M_0`.
    pub fn targeted_words(&self, n: usize) -> Vec<Word> {
        let b = self.pair.basis();
        b.words(n + 1, None, |w| {
            let (init, last) = w.split_at(n);
            init.iter().all(|g| self.a1.contains(g)) && self.m0.contains(&last[0])
        })
    }

    /// `M_1`-part of `m_{n+1}(e_1, …, e_n, x)` for all targeted words.
    pub fn targeted_component(&self, n: usize) -> Vec<(Word, Vector)> {
        let s = self.structure();
        self.targeted_words(n)
            .into_iter()
            .filter_map(|w| {
                let v: Vector = s
                    .product(&w)?
                    .iter()
                    .filter(|(g, _)| self.m1.contains(g))
                    .map(|(g, c)| (*g, c.clone()))
                    .collect();
                (!v.is_zero()).then_some((w, v))
            })
            .collect()
    }

    /// Largest coefficient height in the targeted component, zero if it vanishes.
    pub fn residual(&self, n: usize) -> BigInt {
        self.targeted_component(n)
            .iter()
            .flat_map(|(_, v)| v.iter().map(|(_, c)| c.height()).collect::<Vec<_>>())
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

/// Whether `σ` is surjective, with its pivot section when it is.
pub fn check_petri(t: &KillTarget) -> (bool, Option<Matrix>) {
    match right_inverse(&t.sigma) {
        Ok(s) => (true, Some(s)),
        Err(_) => (false, None),
    }
}

fn petri_section(t: &KillTarget) -> Result<Matrix> {
    check_petri(t).1.ok_or_else(|| Error::PetriFails {
        rank_defect: t.sigma.rows - t.sigma.rank(),
    })
}

/// One stage of the algorithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KillStep {
    pub stage: usize,
    /// `f_n` on words of `A_1`, as solved (before the sign).
    pub f: Table,
    /// `+1` if `δ(f)` was applied, `-1` for `δ(-f)`.
    pub sign: i8,
    pub residual_before: BigInt,
    pub residual_after: BigInt,
}

/// Solves `σ ∘ f_n = m_{n+1}|` and applies whichever of `δ(±f_n)` kills the
/// arity-`n+1` targeted component.
pub fn kill_stage(t: &KillTarget, n: usize) -> Result<(KillStep, KillTarget)> {
    kill_stage_with(t, n, ExecMode::default())
}

pub fn kill_stage_with(t: &KillTarget, n: usize, mode: ExecMode) -> Result<(KillStep, KillTarget)> {
    let section = petri_section(t)?;
    let s = t.structure();
    if n + 1 > s.arity_bound() {
        return Err(Error::ArityExceeded {
            requested: n + 1,
            bound: s.arity_bound(),
        });
    }
    let b = t.pair.basis();
    let (m0, m1) = (t.m0.len(), t.m1.len());
    let words = b.words(n, None, |w| w.iter().all(|g| t.a1.contains(g)));
    let mut f = Table::new();
    for w in &words {
        let mut rhs = vec![Scalar::zero(); m0 * m1];
        for (ai, &x) in t.m0.iter().enumerate() {
            let mut full = w.clone();
            full.push(x);
            if let Some(v) = s.product(&full) {
                for (bi, &y) in t.m1.iter().enumerate() {
                    rhs[bi * m0 + ai] = v.get(&y);
                }
            }
        }
        if rhs.iter().all(Scalar::is_zero) {
            continue;
        }
        let v: Vector = (0..t.a1.len())
            .map(|j| {
                let c = (0..rhs.len()).fold(Scalar::zero(), |acc, i| acc + &section[(j, i)] * &rhs[i]);
                (t.a1[j], c)
            })
            .filter(|(_, c)| !c.is_zero())
            .collect();
        f.insert(w.clone(), v);
    }
    let before = t.residual(n);
    if f.is_empty() {
        let step = KillStep {
            stage: n,
            f,
            sign: 1,
            residual_before: before.clone(),
            residual_after: before,
        };
        return Ok((step, t.clone()));
    }
    let base = Arc::new(s.clone());
    let bar = bar_differential(s);
    let targeted: HashSet<Word> = t.targeted_words(n).into_iter().collect();
    for sign in [1i8, -1] {
        let mut h = HomotopyData::zero(base.clone());
        for (w, v) in &f {
            h.set_component(w, v.scaled(&Scalar::from(sign as i64)))?;
        }
        let probe = conjugate_unipotent_partial(&bar, &h.to_bar(), mode, n + 1, |w| targeted.contains(w))?;
        let kills = probe.components(n + 1).values().all(|v| v.keys().all(|g| !t.m1.contains(g)));
        if !kills {
            continue;
        }
        let next = apply_homotopy_with(s, &h, mode)?;
        let nt = KillTarget::new(AInfPair::new(next, t.pair.x(), t.pair.y())?)?;
        let after = nt.residual(n);
        if !after.is_zero() {
            return Err(Error::Invalid(format!("stage {n}: probe and full transport disagree")));
        }
        let step = KillStep {
            stage: n,
            f,
            sign,
            residual_before: before,
            residual_after: after,
        };
        return Ok((step, nt));
    }
    Err(Error::SignAmbiguity { stage: n, arity: n + 1 })
}

/// Stages `2 … N-1`, so that the targeted products vanish for `3 ≤ k ≤ N`.
pub fn kill_all(t: &KillTarget, n_max: usize) -> Result<(KillTarget, Vec<KillStep>)> {
    kill_all_with(t, n_max, ExecMode::default(), |_, _| Ok(()))
}

/// Like [`kill_all`], calling `observe` on every intermediate target.
pub fn kill_all_with(
    t: &KillTarget,
    n_max: usize,
    mode: ExecMode,
    mut observe: impl FnMut(usize, &KillTarget) -> Result<()>,
) -> Result<(KillTarget, Vec<KillStep>)> {
    petri_section(t)?;
    let n_max = n_max.min(t.structure().arity_bound());
    let mut cur = t.clone();
    let mut steps = Vec::new();
    for n in 2..n_max {
        let (step, next) = kill_stage_with(&cur, n, mode)?;
        observe(n, &next)?;
        steps.push(step);
        cur = next;
    }
    Ok((cur, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainf::check_ainf;
    use crate::fixtures;
    use crate::scalar::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn petri_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = KillTarget::new(fixtures::kill_target(&mut rng, [4, 2, 2], 3, 0.0, FieldSpec::Rationals)).unwrap();
        let (ok, s) = check_petri(&t);
        assert!(ok);
        assert_eq!(t.sigma.mul(&s.unwrap()), Matrix::identity(4));
        let zero = KillTarget::new(fixtures::random_pair(&mut rng, [3, 0, 2, 2], 3, 0.0, FieldSpec::Rationals)).unwrap();
        assert!(!check_petri(&zero).0);
        assert!(matches!(kill_all(&zero, 3), Err(Error::PetriFails { rank_defect: 4 })));
    }

    #[test]
    fn clean_target_is_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = KillTarget::new(fixtures::kill_target(&mut rng, [4, 2, 2], 4, 0.0, FieldSpec::Rationals)).unwrap();
        let (out, steps) = kill_all(&t, 4).unwrap();
        assert_eq!(out.structure(), t.structure());
        assert!(steps.iter().all(|s| s.f.is_empty()));
    }

    #[test]
    fn recovers_a_known_stage_two_homotopy() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let clean = fixtures::kill_target(&mut rng, [4, 2, 2], 3, 0.0, FieldSpec::Rationals);
        let base = Arc::new(clean.structure().clone());
        let t0 = KillTarget::new(clean.clone()).unwrap();
        let mut h = HomotopyData::zero(base.clone());
        let b = base.basis();
        for w in b.words(2, None, |w| w.iter().all(|g| t0.a1.contains(g))) {
            h.set_component(&w, fixtures::random_vector(&mut rng, FieldSpec::Rationals, &t0.a1, 0.5)).unwrap();
        }
        let perturbed = crate::functor::apply_homotopy(&base, &h).unwrap();
        let t = KillTarget::new(AInfPair::new(perturbed, 0, 1).unwrap()).unwrap();
        let (step, out) = kill_stage(&t, 2).unwrap();
        assert!(out.targeted_component(2).is_empty());
        // σ is bijective here, so the lift is ±f
        let sign = Scalar::from(step.sign as i64);
        for (w, v) in h.components(2) {
            assert_eq!(step.f.get(w).map(|x| x.scaled(&sign)), Some(v.scaled(&Scalar::from(-1))));
        }
        assert_eq!(step.f.len(), h.components(2).len());
    }

    #[test]
    fn kill_all_on_perturbed_targets() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..3 {
            let pair = fixtures::kill_target(&mut rng, [4, 2, 2], 4, 0.5, FieldSpec::Rationals);
            let t = KillTarget::new(pair).unwrap();
            let m2_before: Vec<_> = t.structure().products(2).clone().into_iter().collect();
            let (out, steps) = kill_all_with(&t, 4, ExecMode::default(), |_, x| {
                assert!(check_ainf(x.structure(), 4).unwrap().is_empty());
                Ok(())
            })
            .unwrap();
            assert_eq!(steps.len(), 2);
            for n in 2..4 {
                assert!(out.targeted_component(n).is_empty(), "arity {}", n + 1);
            }
            let m2_after: Vec<_> = out.structure().products(2).clone().into_iter().collect();
            assert_eq!(m2_before, m2_after);
            assert!(steps.iter().all(|s| s.residual_after.is_zero()));
        }
    }
}
