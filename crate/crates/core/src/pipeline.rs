//! End to end: kill the higher products of a pair, read off the family
//! matrix and compare its minors with those of a coordinate matrix.

use crate::ainf::AInfPair;
use crate::deformation::{family_matrix, FamilyMatrix};
use crate::error::{Error, Result};
use crate::jet::{ideal_jet_equal, linear_independence, minors_with, straighten, JetIdeal, JetMatrix, Straightening};
use crate::kill::{check_petri, kill_all_with, KillStep, KillTarget};
use crate::par::ExecMode;

/// Comparison of one determinantal ideal.
#[derive(Clone, Debug)]
pub struct MinorComparison {
    pub r: usize,
    pub size: usize,
    /// Minors of the family matrix, moved by the straightening.
    pub family_minors: JetIdeal,
    pub coordinate_minors: JetIdeal,
    pub equal: bool,
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub arity: usize,
    pub order: usize,
    pub killed: KillTarget,
    pub steps: Vec<KillStep>,
    pub family: FamilyMatrix,
    /// No entry of the family matrix has a term of degree 0 or at least 2.
    pub entries_linear: bool,
    pub independent: bool,
    pub straightening: Straightening,
    pub coordinate: JetMatrix,
    pub comparisons: Vec<MinorComparison>,
}

impl PipelineReport {
    pub fn passed(&self) -> bool {
        self.entries_linear && self.independent && self.comparisons.iter().all(|c| c.equal)
    }
}

pub fn bn_pipeline(pair: &AInfPair, n: usize, k: usize, ranks: &[usize]) -> Result<PipelineReport> {
    bn_pipeline_with(pair, n, k, ranks, ExecMode::default())
}

pub fn bn_pipeline_with(pair: &AInfPair, n: usize, k: usize, ranks: &[usize], mode: ExecMode) -> Result<PipelineReport> {
    let target = KillTarget::new(pair.clone())?;
    if !check_petri(&target).0 {
        return Err(Error::PetriFails {
            rank_defect: target.sigma.rows - target.sigma.rank(),
        });
    }
    let (killed, steps) = kill_all_with(&target, n, mode, |_, _| Ok(()))?;
    let family = family_matrix(&killed.pair, k)?;
    let m = &family.matrix;
    let entries_linear = m.entries.iter().all(|e| e.terms().all(|(mono, _)| mono.iter().sum::<u32>() == 1));
    let independent = linear_independence(m);
    let straightening = straighten(m)?;
    let mut coordinate = JetMatrix::zeros(m.rows, m.cols, m.nvars, m.order);
    for (j, &c) in straightening.assignment.iter().enumerate() {
        coordinate.entries[j] = crate::jet::JetPoly::var(m.nvars, m.order, c);
    }
    let h = m.cols;
    let mut comparisons = Vec::new();
    for &r in ranks {
        let size = h.checked_sub(r).ok_or_else(|| Error::Invalid(format!("r = {r} exceeds h = {h}")))?;
        let family_minors = minors_with(m, size, mode)?.apply(&straightening.automorphism);
        let coordinate_minors = minors_with(&coordinate, size, mode)?;
        let equal = ideal_jet_equal(&family_minors, &coordinate_minors, k)?;
        comparisons.push(MinorComparison {
            r,
            size,
            family_minors,
            coordinate_minors,
            equal,
        });
    }
    Ok(PipelineReport {
        arity: n,
        order: k,
        killed,
        steps,
        family,
        entries_linear,
        independent,
        straightening,
        coordinate,
        comparisons,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::scalar::FieldSpec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn clean_and_perturbed_pairs_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for density in [0.0, 0.5] {
            let pair = fixtures::kill_target(&mut rng, [6, 2, 3], 4, density, FieldSpec::Rationals);
            let rep = bn_pipeline(&pair, 4, 3, &[0, 1]).unwrap();
            assert!(rep.entries_linear && rep.independent);
            assert!(rep.passed(), "density {density}");
            assert_eq!(rep.comparisons[0].size, 2);
        }
    }

    #[test]
    fn unkilled_entries_are_not_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pair = fixtures::kill_target(&mut rng, [6, 2, 3], 4, 0.5, FieldSpec::Rationals);
        let fam = family_matrix(&pair, 3).unwrap();
        assert!(fam.matrix.entries.iter().any(|e| e.terms().any(|(m, _)| m.iter().sum::<u32>() >= 2)));
    }

    #[test]
    fn petri_failure_is_reported() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pair = fixtures::random_pair(&mut rng, [6, 0, 2, 3], 3, 0.0, FieldSpec::Rationals);
        assert!(matches!(bn_pipeline(&pair, 3, 2, &[0]), Err(Error::PetriFails { rank_defect: 6 })));
    }
}
