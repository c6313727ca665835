//! Property suites: d-separation soundness and genericity, the noise-grid
//! oracle for the chain rule, figure-level claims against the exact tables,
//! and randomized invariants.

use proptest::prelude::*;

use bigv_core::analysis::{exact_ci, exact_ci_deviation};
use bigv_core::bell::{
    closed_form_table, pair_probability, sample_trials, ExperimentKind, SettingPolicy,
};
use bigv_core::causal::{figure_graph, Dag, FigureId, FigureModel};
use bigv_core::quantum::{
    joint_outcome_probability, make_state, InitialLabel, MeasurementDirection, Outcome,
};
use bigv_core::report::random_binary_scm;
use bigv_core::rng::chunk_rng;
use bigv_core::scm::{bigv_nonlocal_scm, bigv_retro_scm, damascus_scm, RetroMode, Scm};

/// Enumerates all subsets of `pool`.
fn all_subsets<'a>(pool: &[&'a str]) -> Vec<Vec<&'a str>> {
    let mut out = Vec::with_capacity(1 << pool.len());
    for mask in 0..(1u32 << pool.len()) {
        out.push(
            pool.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, v)| *v)
                .collect(),
        );
    }
    out
}

/// d-separation is sound on every sampled model, and complete (no unfaithful
/// independencies) on at least 95% of them.
#[test]
fn d_separation_soundness_and_genericity() {
    let mut rng = chunk_rng(31337, 0);
    let cases = 200;
    let mut complete_cases = 0;
    for _ in 0..cases {
        let scm = random_binary_scm(&mut rng, 6);
        let joint = scm.exact_joint().unwrap();
        let nodes: Vec<&str> = scm.dag().nodes().iter().map(String::as_str).collect();
        let mut complete = true;
        for i in 0..nodes.len() {
            for j in (i + 1)..nodes.len() {
                let (x, y) = (nodes[i], nodes[j]);
                let pool: Vec<&str> = nodes
                    .iter()
                    .copied()
                    .filter(|v| *v != x && *v != y)
                    .collect();
                for z in all_subsets(&pool) {
                    let separated = scm.dag().d_separated(&[x], &[y], &z).unwrap();
                    let deviation = exact_ci_deviation(&joint, &[x], &[y], &z).unwrap();
                    if separated {
                        assert!(
                            deviation < 1e-10,
                            "soundness breach: {x} vs {y} given {z:?}, deviation {deviation}"
                        );
                    } else if deviation < 1e-10 {
                        complete = false;
                    }
                }
            }
        }
        if complete {
            complete_cases += 1;
        }
    }
    assert!(
        complete_cases * 100 >= cases * 95,
        "only {complete_cases}/{cases} cases faithful"
    );
}

/// The figure of probabilistic dependencies holds in the BIG-V table: each
/// operational variable depends on I given the other three, while the four
/// are pairwise independent.
#[test]
fn figure_one_claims_hold_in_the_bigv_table() {
    let table = closed_form_table(ExperimentKind::BigV, &SettingPolicy::uniform()).unwrap();
    let FigureModel::Claims(set) = figure_graph(FigureId::Fig1) else {
        panic!("fig1 is a claim set");
    };
    for claim in &set.claims {
        let given: Vec<&str> = claim.given.iter().map(String::as_str).collect();
        let independent = exact_ci(&table, &[&claim.x], &[&claim.y], &given).unwrap();
        assert_eq!(
            independent, !claim.dependent,
            "claim {} vs {} given {given:?}",
            claim.x, claim.y
        );
    }
    let vars = ["a", "b", "A", "B"];
    for i in 0..4 {
        for j in (i + 1)..4 {
            assert!(exact_ci(&table, &[vars[i]], &[vars[j]], &[]).unwrap());
        }
    }
}

/// Evaluates the deterministic inverse-CDF mechanism on a uniform noise grid
/// (per-node resolution) and histograms the outcomes. With the grid aligned
/// to the CPT boundaries this is an exact independent route to the joint.
fn noise_grid_joint(scm: &Scm, grid: &[usize]) -> Vec<f64> {
    let order = scm.dag().topological_order();
    let n = grid.len();
    let joint = scm.exact_joint().unwrap();
    let mut counts = vec![0.0; joint.probs().len()];
    let weight: f64 = grid.iter().map(|&k| 1.0 / k as f64).product();
    let mut idx = vec![0usize; n];
    loop {
        let mut config = vec![0usize; n];
        for &node in &order {
            let u = (idx[node] as f64 + 0.5) / grid[node] as f64;
            let row = scm.mechanism_row(node, &config);
            let mut acc = 0.0;
            let mut value = row.len() - 1;
            for (v, &p) in row.iter().enumerate() {
                acc += p;
                if u < acc {
                    value = v;
                    break;
                }
            }
            config[node] = value;
        }
        counts[joint.encode(&config)] += weight;

        let mut k = n;
        loop {
            if k == 0 {
                return counts;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < grid[k] {
                break;
            }
            idx[k] = 0;
        }
    }
}

#[test]
fn chain_rule_matches_the_noise_grid_oracle() {
    // Grid resolutions chosen so every CPT boundary of the scenario lies on a
    // grid-cell edge; node order follows each model's graph order.
    let cases: Vec<(Scm, Vec<usize>)> = vec![
        (damascus_scm(), vec![2, 2, 2]),
        (
            bigv_retro_scm(RetroMode::LockedCompatible).unwrap(),
            vec![3, 3, 2, 8, 2, 2],
        ),
        (
            bigv_retro_scm(RetroMode::UnlockedDemo { epsilon: 0.2 }).unwrap(),
            vec![3, 3, 10, 8, 2, 2],
        ),
        (bigv_nonlocal_scm(), vec![3, 3, 2, 8, 2, 2]),
    ];
    for (scm, grid) in cases {
        let joint = scm.exact_joint().unwrap();
        let oracle = noise_grid_joint(&scm, &grid);
        for (i, (&p, &q)) in joint.probs().iter().zip(oracle.iter()).enumerate() {
            assert!(
                (p - q).abs() < 1e-6,
                "entry {i}: chain rule {p} vs noise grid {q}"
            );
        }
    }
}

/// The sampled G² test tracks the exact verdicts on both sides: a strong
/// dependence is detected on every seed, an exact independence is accepted on
/// at least 95 of 100 seeds at alpha 0.01.
#[test]
fn g2_calibration_tracks_exact_verdicts() {
    use bigv_core::analysis::g2_ci_test;
    let policy = SettingPolicy::uniform();
    let mut dependent_hits = 0;
    let mut independent_hits = 0;
    for seed in 0..100 {
        let v1 = sample_trials(ExperimentKind::V1, 100_000, 5000 + seed, &policy).unwrap();
        if g2_ci_test(&v1.to_frame(), &["A"], &["B"], &["a", "b"], 0.01)
            .unwrap()
            .dependent()
        {
            dependent_hits += 1;
        }
        let bigv = sample_trials(ExperimentKind::BigV, 100_000, 5000 + seed, &policy).unwrap();
        if !g2_ci_test(&bigv.to_frame(), &["A"], &["b"], &[], 0.01)
            .unwrap()
            .dependent()
        {
            independent_hits += 1;
        }
    }
    assert!(dependent_hits >= 95, "dependence detected {dependent_hits}/100");
    assert!(independent_hits >= 95, "independence accepted {independent_hits}/100");
}

/// d-separation is never violated by any bundled model's joint.
#[test]
fn bundled_models_have_no_faithful_violations() {
    use bigv_core::analysis::faithfulness_report;
    let models = vec![
        damascus_scm(),
        bigv_retro_scm(RetroMode::LockedCompatible).unwrap(),
        bigv_retro_scm(RetroMode::UnlockedDemo { epsilon: 0.2 }).unwrap(),
        bigv_nonlocal_scm(),
    ];
    for scm in &models {
        let report = faithfulness_report(scm).unwrap();
        assert!(report.faithful_violations.is_empty());
    }
}

proptest! {
    /// The projector route and the closed-form pair probabilities agree at
    /// arbitrary angles, and both describe a simplex.
    #[test]
    fn kernel_and_closed_form_agree(
        alpha in 0.0..std::f64::consts::TAU,
        beta in 0.0..std::f64::consts::TAU,
        label_bit in 0usize..2,
    ) {
        let label = InitialLabel::from_index(label_bit).unwrap();
        let state = make_state(label);
        let delta = alpha - beta;
        let mut total = 0.0;
        for oa in Outcome::ALL {
            for ob in Outcome::ALL {
                let kernel = joint_outcome_probability(
                    &state,
                    MeasurementDirection::new(alpha),
                    MeasurementDirection::new(beta),
                    oa,
                    ob,
                ).unwrap();
                let closed = pair_probability(label, delta, oa, ob);
                prop_assert!((kernel - closed).abs() < 1e-12);
                prop_assert!(kernel >= 0.0);
                total += kernel;
            }
        }
        prop_assert!((total - 1.0).abs() < 1e-12);
    }

    /// Marginalization and preselection preserve total mass.
    #[test]
    fn table_operations_preserve_mass(seed in any::<u64>()) {
        let mut rng = chunk_rng(seed, 0);
        let scm = random_binary_scm(&mut rng, 5);
        let joint = scm.exact_joint().unwrap();
        let first = scm.dag().nodes()[0].clone();
        let m = joint.marginal(&[&first]).unwrap();
        let total: f64 = m.probs().iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        if m.probs()[0] > 0.0 {
            let (sel, factor) = joint.preselect(&first, "0").unwrap();
            prop_assert!((factor - m.probs()[0]).abs() < 1e-12);
            let total: f64 = sel.probs().iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    /// Sampling is a pure function of (kind, n, seed).
    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), kind_bit in 0usize..3) {
        let kind = [ExperimentKind::V1, ExperimentKind::V2, ExperimentKind::BigV][kind_bit];
        let policy = SettingPolicy::uniform();
        let a = sample_trials(kind, 257, seed, &policy).unwrap();
        let b = sample_trials(kind, 257, seed, &policy).unwrap();
        prop_assert_eq!(a.to_csv(false), b.to_csv(false));
    }

    /// Any edge set that respects an ordering builds a DAG, and collider
    /// status is exactly in-degree >= 2.
    #[test]
    fn ordered_edge_sets_always_build(mask in 0u32..(1 << 10)) {
        let names = ["n0", "n1", "n2", "n3", "n4"];
        let mut edges = Vec::new();
        let mut bit = 0;
        for i in 0..5 {
            for j in (i + 1)..5 {
                if mask >> bit & 1 == 1 {
                    edges.push((names[i], names[j]));
                }
                bit += 1;
            }
        }
        let dag = Dag::new(names, &edges).unwrap();
        for name in names {
            let indeg = dag.in_degree(name).unwrap();
            prop_assert_eq!(dag.is_collider(name).unwrap(), indeg >= 2);
        }
    }
}
