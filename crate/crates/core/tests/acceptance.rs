use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use ainf_core::fixtures::{self, seeded};
use ainf_core::kill::kill_all_with;
use ainf_core::transfer::{contraction_from_dg_with, Splitting};
use ainf_core::{
    apply_homotopy, bar_differential, bn_pipeline, check_ainf, check_bar_square, check_functor, compose_functors,
    contraction_from_dg, deformed_differential, dual_algebra, induced_dual_map, local_algebra_fixture, opposite,
    positive_part, representable_pair, specialize_first_order, transfer, AInfFunctor, AInfPair, AInfStructure, Error,
    ExecMode, FieldSpec, KillTarget, Report, Scalar, Vector,
};
use rand::Rng;

const Q: FieldSpec = FieldSpec::Rationals;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, limit: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let t = start.elapsed();
    let pass = out.pass && t < limit;
    println!(
        "criterion {id} ({name}): {} [{}; {:.1} s of {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        t.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn arities(r: &Report) -> BTreeSet<usize> {
    r.iter().map(|x| x.arity).collect()
}

fn bar_equivalence() -> Outcome {
    let shapes: [&[usize]; 5] = [&[1], &[1, 1], &[1, 0, 1], &[1, 1, 1], &[1, 0, 0, 1]];
    let (mut agree, mut valid_clean, mut corrupt_caught) = (0, 0, 0);
    for i in 0..200u64 {
        let mut rng = seeded(100 + i);
        let dims = shapes[rng.gen_range(0..shapes.len())];
        let dg = fixtures::random_dg(&mut rng, dims, 5, Q);
        let valid = fixtures::perturb(&mut rng, &dg, 3, 0.5);
        let s = if i % 2 == 0 { valid } else { fixtures::corrupt(&mut rng, &valid, 5) };
        let a = check_ainf(&s, 5).unwrap();
        let b = check_bar_square(&bar_differential(&s), 5);
        agree += (arities(&a) == arities(&b)) as usize;
        if i % 2 == 0 {
            valid_clean += a.is_empty() as usize;
        } else {
            corrupt_caught += (!a.is_empty()) as usize;
        }
    }
    Outcome {
        pass: agree == 200 && valid_clean == 100,
        detail: format!("{agree}/200 agree arity by arity, {valid_clean}/100 valid clean, {corrupt_caught}/100 corrupted flagged"),
    }
}

/// The 2-periodic resolution `… → A --x--> A --x^{n-1}--> A --x--> A → k`
/// of `k` over `A = k[x]/(x^n)` has one generator in each degree and zero
/// differentials after `Hom(-, k)`. So `Ext^1 = k·y`, `Ext^2 = k·z`, the
/// first nonzero product of copies of `y` is `m_n(y,…,y) = ±z`, and the dual
/// algebra is `k[t]/(t^n)`: Hilbert function `1` in degrees `< n`.
fn periodic_oracle(n: usize, k: usize) -> (Vec<usize>, usize) {
    ((0..=k).map(|i| (i < n) as usize).collect(), n)
}

fn local_duals() -> Outcome {
    let mut ok = true;
    let mut seen = Vec::new();
    for n in 2..=4 {
        let d = local_algebra_fixture(n, 6, Q).unwrap();
        let mm = transfer(&d, &contraction_from_dg(&d), 6).unwrap();
        let r = dual_algebra(&positive_part(&mm.structure, 0).unwrap(), 0, 6).unwrap();
        let (hilbert, rel_len) = periodic_oracle(n, 6);
        let rels: Vec<_> = r.relations.iter().filter(|x| !x.is_zero()).collect();
        let single_power = rels.len() == 1
            && rels[0].len() == 1
            && rels[0].keys().all(|w| w.len() == rel_len && w.iter().all(|&a| a == w[0]));
        ok &= r.hilbert_function() == hilbert && single_power && r.generators() == 1;
        seen.push(format!("n={n}: {:?}", r.hilbert_function()));
    }
    Outcome {
        pass: ok,
        detail: seen.join(", "),
    }
}

fn m2_vec(d: &AInfStructure, u: &Vector, v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (&a, ca) in u.iter() {
        for (&b, cb) in v.iter() {
            if let Some(p) = d.product(&[a, b]) {
                out.add_scaled(p, &(ca * cb));
            }
        }
    }
    out
}

fn linear(map: &[Vector], v: &Vector) -> Vector {
    let mut out = Vector::new();
    for (&g, c) in v.iter() {
        out.add_scaled(&map[g as usize], c);
    }
    out
}

fn cubic_transfer() -> Outcome {
    let d = local_algebra_fixture(3, 6, Q).unwrap();
    let mut ok = true;
    let mut notes = Vec::new();
    for split in [Splitting::Forward, Splitting::Reverse] {
        let c = contraction_from_dg_with(&d, split);
        let mm = transfer(&d, &c, 6).unwrap();
        let h = &mm.structure;
        let y = h.basis().gens_in(0, 0, 1)[0];
        let z = h.basis().gens_in(0, 0, 2)[0];
        // two planar trees with three leaves: p m2(h m2(iy, iy), iy) and p m2(iy, h m2(iy, iy))
        let iy = &c.inclusion[y as usize];
        let hyy = linear(&c.homotopy, &m2_vec(&d, iy, iy));
        let left = linear(&c.projection, &m2_vec(&d, &hyy, iy));
        let right = linear(&c.projection, &m2_vec(&d, iy, &hyy));
        // with m1 h + h m1 = ip - 1 and |y| = 1 the tree signs are -1 and -1
        let mut expected = left.scaled(&-Scalar::one());
        expected.add_scaled(&right, &-Scalar::one());
        let m2 = h.product(&[y, y]).cloned().unwrap_or_default();
        let m3 = h.product(&[y, y, y]).cloned().unwrap_or_default();
        let unit_z = m3.len() == 1 && !m3.get(&z).is_zero();
        let clean = check_ainf(h, 6).unwrap().is_empty() && check_functor(&mm.functor).unwrap().is_empty();
        ok &= m2.is_zero() && unit_z && m3 == expected && clean;
        notes.push(format!("{split:?}: m3(y,y,y) = {}·z, tree oracle {}", m3.get(&z), if m3 == expected { "agrees" } else { "differs" }));
    }
    Outcome {
        pass: ok,
        detail: notes.join("; "),
    }
}

fn fixture_pairs() -> Vec<(String, AInfPair)> {
    let mut out = Vec::new();
    for n in 2..=3 {
        let d = local_algebra_fixture(n, 5, Q).unwrap();
        let mm = transfer(&d, &contraction_from_dg(&d), 5).unwrap();
        out.push((format!("local n={n}"), representable_pair(&mm.structure, 0, 0).unwrap()));
    }
    for i in 0..6u64 {
        let mut rng = seeded(400 + i);
        out.push((format!("pair {i}"), fixtures::random_pair(&mut rng, [2, 1, 2, 2], 5, 0.5, Q)));
    }
    for i in 0..2u64 {
        let mut rng = seeded(450 + i);
        out.push((format!("kill target {i}"), fixtures::kill_target(&mut rng, [4, 2, 2], 5, 0.5, Q)));
    }
    out
}

fn deformation() -> Outcome {
    let (mut square_ok, mut aug_ok, mut fo_literal, mut fo_total, mut fo_swapped) = (0, 0, 0, 0, 0);
    let pairs = fixture_pairs();
    for (_, p) in &pairs {
        let s = p.structure();
        let c = deformed_differential(p, 4).unwrap();
        square_ok += c.square().unwrap().is_empty() as usize;
        let m1: std::collections::BTreeMap<u32, Vector> =
            p.module_gens().into_iter().filter_map(|g| s.product(&[g]).map(|v| (g, v.clone()))).collect();
        aug_ok += (c.specialize_augmentation() == m1) as usize;
        for xi in p.algebra_gens_in(1) {
            let fo = specialize_first_order(&c, &Vector::single(xi, Scalar::one()));
            for a in p.module_gens() {
                let eps = fo.eps.get(&a).cloned().unwrap_or_default();
                let literal = s.product(&[a, xi]).cloned().unwrap_or_default();
                let swapped = s.product(&[xi, a]).cloned().unwrap_or_default().scaled(&-Scalar::one());
                fo_total += 1;
                fo_literal += (eps == literal) as usize;
                fo_swapped += (eps == swapped) as usize;
            }
        }
    }
    let n = pairs.len();
    Outcome {
        pass: square_ok == n && aug_ok == n && fo_literal == fo_total,
        detail: format!(
            "c_M^2 = 0 on {square_ok}/{n} pairs, augmentation gives (M, m1) on {aug_ok}/{n}, \
             eps-part equals m2(a,xi) on {fo_literal}/{fo_total} entries and -m2(xi,a) on {fo_swapped}/{fo_total}"
        ),
    }
}

fn kill_targets() -> Vec<AInfPair> {
    (0..50u64)
        .map(|i| fixtures::kill_target(&mut seeded(500 + i), [6, 2, 3], 5, 0.5, Q))
        .collect()
}

fn killing(targets: &[AInfPair]) -> Outcome {
    let mut ok = 0;
    let mut signs = BTreeSet::new();
    for pair in targets {
        let t = KillTarget::new(pair.clone()).unwrap();
        let res = kill_all_with(&t, 5, ExecMode::default(), |n, next| {
            if check_ainf(next.structure(), 5)?.is_empty() {
                Ok(())
            } else {
                Err(Error::Invalid(format!("stage {n} broke the identities")))
            }
        });
        let Ok((killed, steps)) = res else { continue };
        let zeroed = (2..5).all(|n| killed.residual(n) == 0.into());
        let m2_kept = killed.structure().products(2) == t.structure().products(2);
        let before = (2..5).any(|n| t.residual(n) != 0.into());
        signs.extend(steps.iter().map(|s| (s.stage, s.sign)));
        ok += (zeroed && m2_kept && before) as usize;
    }
    Outcome {
        pass: ok == targets.len(),
        detail: format!("{ok}/{} targets killed through arity 5, signs (stage, sign) {signs:?}", targets.len()),
    }
}

fn pipeline(targets: &[AInfPair]) -> Outcome {
    let mut ok = 0;
    for pair in targets {
        if let Ok(rep) = bn_pipeline(pair, 5, 4, &[0, 1]) {
            ok += (rep.passed() && rep.comparisons.len() == 2) as usize;
        }
    }
    Outcome {
        pass: ok == targets.len(),
        detail: format!("{ok}/{} pipelines with equal minor ideals for r = 0, 1 at K = 4", targets.len()),
    }
}

fn functoriality() -> Outcome {
    let (mut ids, mut comps, mut ops) = (0, 0, 0);
    for i in 0..50u64 {
        let mut rng = seeded(700 + i);
        let (d1, d2) = (rng.gen_range(1..=2), rng.gen_range(1..=2));
        let s = Arc::new(fixtures::two_step_algebra(&mut rng, d1, d2, 3, Q));
        ids += induced_dual_map(&AInfFunctor::identity(s.clone()), 0, 3).unwrap().is_identity() as usize;
        let f = fixtures::random_functor(&mut rng, s, 1).unwrap();
        let g = fixtures::random_functor(&mut rng, f.target.clone(), 1).unwrap();
        let gf = compose_functors(&g, &f).unwrap();
        let lhs = induced_dual_map(&gf, 0, 3).unwrap();
        let rhs = induced_dual_map(&g, 0, 3).unwrap().then(&induced_dual_map(&f, 0, 3).unwrap());
        comps += lhs.agrees_with(&rhs) as usize;
    }
    let shapes: [&[usize]; 3] = [&[1, 1], &[1, 0, 1], &[1, 1, 1]];
    for i in 0..50u64 {
        let mut rng = seeded(750 + i);
        let s = if i % 2 == 0 {
            let dg = fixtures::random_dg(&mut rng, shapes[i as usize % 3], 4, Q);
            fixtures::perturb(&mut rng, &dg, 2, 0.5)
        } else {
            fixtures::two_step_algebra(&mut rng, 2, 2, 4, Q)
        };
        ops += (opposite(&opposite(&s)) == s) as usize;
    }
    Outcome {
        pass: ids == 50 && comps == 50 && ops == 50,
        detail: format!("id^! = id {ids}/50, (g f)^! = f^! g^! {comps}/50, op op = id {ops}/50"),
    }
}

fn homotopy_invariance() -> Outcome {
    let mut ok = 0;
    let mut moved = 0;
    for i in 0..20u64 {
        let mut rng = seeded(900 + i);
        let (a1, a2) = (rng.gen_range(2..=3), rng.gen_range(1..=2));
        let pair = fixtures::random_pair(&mut rng, [a1, a2, 1, 1], 5, 0.5, Q);
        let s = pair.structure();
        let h = fixtures::random_homotopy(&mut rng, s, 3, 0.5);
        let s2 = apply_homotopy(s, &h).unwrap();
        moved += (s2 != *s) as usize;
        let before = dual_algebra(s, pair.y(), 4).unwrap().hilbert_function();
        let after = dual_algebra(&s2, pair.y(), 4).unwrap().hilbert_function();
        ok += (before == after) as usize;
    }
    Outcome {
        pass: ok == 20,
        detail: format!("{ok}/20 Hilbert functions agree, {moved}/20 structures moved"),
    }
}

fn main() {
    let secs = Duration::from_secs;
    let mut results = vec![
        run(1, "bar equivalence", secs(30), bar_equivalence),
        run(2, "dual of local algebras", secs(20), local_duals),
        run(3, "transfer of k[x]/(x^3)", secs(20), cubic_transfer),
        run(4, "deformation differential", secs(10), deformation),
    ];
    let targets = kill_targets();
    results.push(run(5, "killing", secs(60), || killing(&targets)));
    results.push(run(6, "determinantal pipeline", secs(60), || pipeline(&targets)));
    results.push(run(7, "functoriality", secs(10), functoriality));
    results.push(run(8, "homotopy invariance", secs(20), homotopy_invariance));
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
