use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ainf_core::ainf::check_ainf_with;
use ainf_core::bar::check_bar_square_with;
use ainf_core::fixtures::{self, seeded};
use ainf_core::jet::minors_with;
use ainf_core::kill::kill_stage_with;
use ainf_core::transfer::transfer_with;
use ainf_core::{bar_differential, contraction_from_dg, family_matrix, local_algebra_fixture, ExecMode, FieldSpec, KillTarget};

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn identities(c: &mut Criterion) {
    let mut rng = seeded(1);
    let dg = fixtures::random_dg(&mut rng, &[1, 1, 1], 5, FieldSpec::Rationals);
    let s = fixtures::perturb(&mut rng, &dg, 3, 0.5);
    let b = bar_differential(&s);
    let mut g = c.benchmark_group("identities");
    for mode in MODES {
        g.bench_with_input(BenchmarkId::new("check_ainf", format!("{mode:?}")), &mode, |bch, &m| {
            bch.iter(|| check_ainf_with(&s, 5, m).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bar_square", format!("{mode:?}")), &mode, |bch, &m| {
            bch.iter(|| check_bar_square_with(&b, 5, m))
        });
    }
    g.finish();
}

fn transfer(c: &mut Criterion) {
    let d = local_algebra_fixture(3, 6, FieldSpec::Rationals).unwrap();
    let h = contraction_from_dg(&d);
    let mut g = c.benchmark_group("transfer");
    g.sample_size(10);
    for mode in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |bch, &m| {
            bch.iter(|| transfer_with(&d, &h, 6, m).unwrap())
        });
    }
    g.finish();
}

fn killing(c: &mut Criterion) {
    let pair = fixtures::kill_target(&mut seeded(2), [6, 2, 3], 4, 0.5, FieldSpec::Rationals);
    let t = KillTarget::new(pair).unwrap();
    let mut g = c.benchmark_group("kill_stage");
    g.sample_size(10);
    for mode in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |bch, &m| {
            bch.iter(|| kill_stage_with(&t, 2, m).unwrap())
        });
    }
    g.finish();
}

fn determinantal(c: &mut Criterion) {
    let pair = fixtures::kill_target(&mut seeded(3), [6, 2, 3], 4, 0.0, FieldSpec::Rationals);
    let m = family_matrix(&pair, 3).unwrap().matrix;
    let mut g = c.benchmark_group("minors");
    for mode in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{mode:?}")), &mode, |bch, &md| {
            bch.iter(|| minors_with(&m, 2, md).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, identities, transfer, killing, determinantal);
criterion_main!(benches);
