use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use bigv_core::analysis::{g2_ci_test, lhv_same_outcome_bound};
use bigv_core::bell::{closed_form_table, sample_trials, ExperimentKind, SettingPolicy};
use bigv_core::scm::{bigv_retro_scm, damascus_scm, RetroMode};

fn tables(c: &mut Criterion) {
    let policy = SettingPolicy::uniform();
    c.bench_function("closed_form_table_bigv", |b| {
        b.iter(|| closed_form_table(black_box(ExperimentKind::BigV), &policy).unwrap())
    });
    let bigv = closed_form_table(ExperimentKind::BigV, &policy).unwrap();
    c.bench_function("mutual_information_pair", |b| {
        b.iter(|| bigv.mutual_information(black_box("a"), black_box("B")).unwrap())
    });
}

fn sampling(c: &mut Criterion) {
    let policy = SettingPolicy::uniform();
    c.bench_function("sample_trials_bigv_10k", |b| {
        b.iter(|| sample_trials(ExperimentKind::BigV, 10_000, black_box(7), &policy).unwrap())
    });
}

fn scm_ops(c: &mut Criterion) {
    let retro = bigv_retro_scm(RetroMode::LockedCompatible).unwrap();
    c.bench_function("exact_joint_retro", |b| {
        b.iter(|| black_box(&retro).exact_joint().unwrap())
    });
    let damascus = damascus_scm();
    let evidence = [("you", "damascus"), ("death", "aleppo"), ("meeting", "0")];
    c.bench_function("counterfactual_damascus", |b| {
        b.iter(|| {
            damascus
                .counterfactual_query(&evidence, &[("you", "aleppo")], black_box("death"))
                .unwrap()
        })
    });
    c.bench_function("d_separated_retro", |b| {
        b.iter(|| {
            retro
                .dag()
                .d_separated(black_box(&["a"]), &["B"], &["I"])
                .unwrap()
        })
    });
}

fn statistics(c: &mut Criterion) {
    let ds = sample_trials(ExperimentKind::BigV, 10_000, 7, &SettingPolicy::uniform()).unwrap();
    let frame = ds.to_frame();
    c.bench_function("g2_test_10k", |b| {
        b.iter(|| g2_ci_test(&frame, &["A"], &["B"], &["a", "b"], 0.01).unwrap())
    });
    c.bench_function("lhv_enumeration", |b| b.iter(lhv_same_outcome_bound));
}

criterion_group!(benches, tables, sampling, scm_ops, statistics);
criterion_main!(benches);
