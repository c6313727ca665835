//! The V1 / V2 / BIG-V experiments: exact joint tables, seeded samplers,
//! posteriors over the initial state, and preselection.
//!
//! Settings are the three trine directions (azimuths 0, 2π/3, 4π/3). V1 runs
//! the parallel-spins state I1 on every trial, V2 the singlet I2, and BIG-V
//! draws a fair initial label per trial and mixes the results.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{InitialLabel, Outcome};
use crate::rng::{sample_chunked, sample_cumulative};
use crate::table::{kahan_sum, Frame, FrameColumn, JointTable, VarDef};

/// One of the three trine measurement settings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Setting(u8);

impl Setting {
    pub const ALL: [Setting; 3] = [Setting(0), Setting(1), Setting(2)];

    pub fn new(index: u8) -> Result<Self> {
        if index > 2 {
            return Err(Error::ParameterOutOfRange(format!(
                "setting index {index} not in 0..=2"
            )));
        }
        Ok(Setting(index))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Azimuth of this setting: 2π·index/3.
    pub fn azimuth(self) -> f64 {
        std::f64::consts::TAU * f64::from(self.0) / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    V1,
    V2,
    BigV,
}

impl ExperimentKind {
    /// The initial label this experiment fixes, if any.
    pub fn fixed_label(self) -> Option<InitialLabel> {
        match self {
            ExperimentKind::V1 => Some(InitialLabel::I1),
            ExperimentKind::V2 => Some(InitialLabel::I2),
            ExperimentKind::BigV => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::V1 => "v1",
            ExperimentKind::V2 => "v2",
            ExperimentKind::BigV => "bigv",
        }
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "v1" => Ok(ExperimentKind::V1),
            "v2" => Ok(ExperimentKind::V2),
            "bigv" | "big-v" => Ok(ExperimentKind::BigV),
            other => Err(Error::ParameterOutOfRange(format!(
                "unknown experiment `{other}`"
            ))),
        }
    }
}

/// Distribution over the 3×3 setting pairs. Every pair must carry strictly
/// positive mass, otherwise the posterior conditionals downstream break.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettingPolicy {
    probs: [[f64; 3]; 3],
    label: String,
}

impl SettingPolicy {
    /// Uniform independent choices on both sides.
    pub fn uniform() -> Self {
        SettingPolicy {
            probs: [[1.0 / 9.0; 3]; 3],
            label: "uniform".into(),
        }
    }

    pub fn new(probs: [[f64; 3]; 3]) -> Result<Self> {
        let mut total = 0.0;
        for row in &probs {
            for &p in row {
                if p <= 0.0 || !p.is_finite() {
                    return Err(Error::InvalidPolicy(format!(
                        "setting pair probability {p} is not strictly positive"
                    )));
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > crate::table::PROB_TOL {
            return Err(Error::InvalidPolicy(format!("probabilities sum to {total}")));
        }
        Ok(SettingPolicy {
            probs,
            label: "custom".into(),
        })
    }

    pub fn prob(&self, a: Setting, b: Setting) -> f64 {
        self.probs[a.index()][b.index()]
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn cumulative(&self) -> [f64; 9] {
        let mut cum = [0.0; 9];
        let mut acc = 0.0;
        for a in 0..3 {
            for b in 0..3 {
                acc += self.probs[a][b];
                cum[a * 3 + b] = acc;
            }
        }
        cum
    }
}

/// One Bell trial. `initial` is the ground-truth state label; consumers that
/// want the operationally hidden view mask it on output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialRecord {
    pub trial: u64,
    pub a: Setting,
    pub b: Setting,
    pub outcome_a: Outcome,
    pub outcome_b: Outcome,
    pub initial: Option<InitialLabel>,
}

/// A seeded collection of trials.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub records: Vec<TrialRecord>,
    pub seed: u64,
    pub kind: ExperimentKind,
    pub policy: SettingPolicy,
}

/// Probability of the outcome pair `(oa, ob)` given a state label and the
/// azimuth difference between the two settings.
///
/// Equal pairs carry ½cos²(Δ/2) each for I1 and ½sin²(Δ/2) for I2; unequal
/// pairs swap the two. At Δ = 0 these are exact zeros and ones.
pub fn pair_probability(label: InitialLabel, delta: f64, oa: Outcome, ob: Outcome) -> f64 {
    let half = 0.5 * delta;
    let same = match label {
        InitialLabel::I1 => 0.5 * half.cos().powi(2),
        InitialLabel::I2 => 0.5 * half.sin().powi(2),
    };
    let diff = 0.5 - same;
    if oa == ob {
        same
    } else {
        diff
    }
}

fn label_weight(kind: ExperimentKind, label: InitialLabel) -> f64 {
    match kind.fixed_label() {
        Some(fixed) if fixed == label => 1.0,
        Some(_) => 0.0,
        None => 0.5,
    }
}

/// Variable layout shared by all experiment tables: a, b, I, A, B.
pub fn bell_vars() -> Vec<VarDef> {
    vec![
        VarDef::new("a", &["0", "1", "2"]),
        VarDef::new("b", &["0", "1", "2"]),
        VarDef::new("I", &["1", "2"]),
        VarDef::new("A", &["0", "1"]),
        VarDef::new("B", &["0", "1"]),
    ]
}

/// Exact joint distribution of one experiment under a setting policy.
pub fn closed_form_table(kind: ExperimentKind, policy: &SettingPolicy) -> Result<JointTable> {
    let mut probs = Vec::with_capacity(3 * 3 * 2 * 2 * 2);
    for a in Setting::ALL {
        for b in Setting::ALL {
            let delta = a.azimuth() - b.azimuth();
            for label in InitialLabel::ALL {
                let w = policy.prob(a, b) * label_weight(kind, label);
                for oa in Outcome::ALL {
                    for ob in Outcome::ALL {
                        probs.push(w * pair_probability(label, delta, oa, ob));
                    }
                }
            }
        }
    }
    JointTable::new(bell_vars(), probs)
}

/// Draws `n` i.i.d. trials from the experiment's exact distribution.
/// Deterministic in `(kind, n, seed, policy)` and independent of worker count.
pub fn sample_trials(
    kind: ExperimentKind,
    n: u64,
    seed: u64,
    policy: &SettingPolicy,
) -> Result<Dataset> {
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    let policy_cum = policy.cumulative();

    // Outcome-pair cumulative per (a, b, label), order (00, 01, 10, 11).
    let mut pair_cum = [[[[0.0f64; 4]; 2]; 3]; 3];
    for a in Setting::ALL {
        for b in Setting::ALL {
            let delta = a.azimuth() - b.azimuth();
            for label in InitialLabel::ALL {
                let mut acc = 0.0;
                for (i, (oa, ob)) in [
                    (Outcome::Zero, Outcome::Zero),
                    (Outcome::Zero, Outcome::One),
                    (Outcome::One, Outcome::Zero),
                    (Outcome::One, Outcome::One),
                ]
                .into_iter()
                .enumerate()
                {
                    acc += pair_probability(label, delta, oa, ob);
                    pair_cum[a.index()][b.index()][label.index()][i] = acc;
                }
            }
        }
    }

    let records = sample_chunked(n, seed, |trial, rng| {
        let pair = sample_cumulative(rng, &policy_cum);
        let a = Setting((pair / 3) as u8);
        let b = Setting((pair % 3) as u8);
        let label = match kind.fixed_label() {
            Some(l) => l,
            None => {
                if rng.random::<f64>() < 0.5 {
                    InitialLabel::I1
                } else {
                    InitialLabel::I2
                }
            }
        };
        let o = sample_cumulative(rng, &pair_cum[a.index()][b.index()][label.index()]);
        TrialRecord {
            trial,
            a,
            b,
            outcome_a: Outcome::from_index(o / 2).unwrap(),
            outcome_b: Outcome::from_index(o % 2).unwrap(),
            initial: Some(label),
        }
    });

    Ok(Dataset {
        records,
        seed,
        kind,
        policy: policy.clone(),
    })
}

/// Relation between the two members of a pair of settings or outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Equal,
    Unequal,
}

impl Relation {
    fn matches(self, x: usize, y: usize) -> bool {
        match self {
            Relation::Equal => x == y,
            Relation::Unequal => x != y,
        }
    }
}

/// Exact P(A=B | settings relation) read off a table over {a, b, A, B, ...}.
pub fn outcome_agreement(table: &JointTable, settings: Relation) -> Result<f64> {
    let (ai, bi, oa, ob) = (
        table.var_index("a")?,
        table.var_index("b")?,
        table.var_index("A")?,
        table.var_index("B")?,
    );
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (levels, p) in table.iter() {
        if settings.matches(levels[ai], levels[bi]) {
            den.push(p);
            if levels[oa] == levels[ob] {
                num.push(p);
            }
        }
    }
    let den = kahan_sum(den);
    if den <= 0.0 {
        return Err(Error::ZeroProbabilityEvidence(format!(
            "no mass with settings {settings:?}"
        )));
    }
    Ok(kahan_sum(num) / den)
}

/// P(I₁ | ·) and P(I₂ | ·) given the relation of the settings and of the
/// outcomes. Requires a table whose I marginal is non-degenerate (BIG-V).
pub fn posterior_initial(
    table: &JointTable,
    settings: Relation,
    outcomes: Relation,
) -> Result<(f64, f64)> {
    let pi = table.marginal_dist("I")?;
    if pi.iter().any(|&p| p <= 0.0) {
        return Err(Error::DegeneratePosterior(format!(
            "I marginal is ({}, {})",
            pi[0], pi[1]
        )));
    }
    let (ai, bi, ii, oa, ob) = (
        table.var_index("a")?,
        table.var_index("b")?,
        table.var_index("I")?,
        table.var_index("A")?,
        table.var_index("B")?,
    );
    let mut mass = [Vec::new(), Vec::new()];
    for (levels, p) in table.iter() {
        if settings.matches(levels[ai], levels[bi]) && outcomes.matches(levels[oa], levels[ob]) {
            mass[levels[ii]].push(p);
        }
    }
    let m1 = kahan_sum(mass[0].iter().copied());
    let m2 = kahan_sum(mass[1].iter().copied());
    let total = m1 + m2;
    if total <= 0.0 {
        return Err(Error::ZeroProbabilityEvidence(format!(
            "settings {settings:?}, outcomes {outcomes:?}"
        )));
    }
    Ok((m1 / total, m2 / total))
}

/// Keeps the probability mass with the given initial label and renormalizes.
/// The returned factor is the kept mass.
pub fn preselect_table(table: &JointTable, label: InitialLabel) -> Result<(JointTable, f64)> {
    table.preselect("I", &label.tag().to_string())
}

/// Keeps exactly the records carrying the given initial label.
/// The factor is the kept fraction of records.
pub fn preselect_dataset(dataset: &Dataset, label: InitialLabel) -> Result<(Dataset, f64)> {
    let kept: Vec<TrialRecord> = dataset
        .records
        .iter()
        .filter(|r| r.initial == Some(label))
        .copied()
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptySelection(format!(
            "no records with initial state {label}"
        )));
    }
    let factor = kept.len() as f64 / dataset.records.len() as f64;
    Ok((
        Dataset {
            records: kept,
            seed: dataset.seed,
            kind: dataset.kind,
            policy: dataset.policy.clone(),
        },
        factor,
    ))
}

pub const CSV_HEADER: &str = "trial,a,b,A,B,I";

impl Dataset {
    /// CSV with header `trial,a,b,A,B,I`. With `mask_initial` the I column is
    /// left empty, which is the operationally hidden view of BIG-V.
    pub fn to_csv(&self, mask_initial: bool) -> String {
        let mut out = String::with_capacity(16 * self.records.len() + 24);
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let i = match (mask_initial, r.initial) {
                (false, Some(label)) => label.tag().to_string(),
                _ => String::new(),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.trial,
                r.a.index(),
                r.b.index(),
                r.outcome_a.index(),
                r.outcome_b.index(),
                i
            ));
        }
        out
    }

    /// Columnar view for the statistical tests. Includes an I column only
    /// when every record carries a label.
    pub fn to_frame(&self) -> Frame {
        frame_from_records(&self.records)
    }
}

/// Parses the dataset CSV format, reporting 1-based line numbers on errors.
pub fn read_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::Csv { line: 1, msg: "empty file".into() })?;
    if header.trim_end() != CSV_HEADER {
        return Err(Error::Csv {
            line: 1,
            msg: format!("expected header `{CSV_HEADER}`, found `{header}`"),
        });
    }
    let mut records = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Csv {
                line: lineno,
                msg: format!("expected 6 fields, found {}", fields.len()),
            });
        }
        let parse_u8 = |s: &str, what: &str, max: u8| -> Result<u8> {
            let v: u8 = s.trim().parse().map_err(|_| Error::Csv {
                line: lineno,
                msg: format!("bad {what} `{s}`"),
            })?;
            if v > max {
                return Err(Error::Csv {
                    line: lineno,
                    msg: format!("{what} {v} out of range 0..={max}"),
                });
            }
            Ok(v)
        };
        let trial: u64 = fields[0].trim().parse().map_err(|_| Error::Csv {
            line: lineno,
            msg: format!("bad trial index `{}`", fields[0]),
        })?;
        let a = Setting(parse_u8(fields[1], "setting a", 2)?);
        let b = Setting(parse_u8(fields[2], "setting b", 2)?);
        let oa = Outcome::from_index(parse_u8(fields[3], "outcome A", 1)? as usize).unwrap();
        let ob = Outcome::from_index(parse_u8(fields[4], "outcome B", 1)? as usize).unwrap();
        let initial = match fields[5].trim() {
            "" => None,
            "1" => Some(InitialLabel::I1),
            "2" => Some(InitialLabel::I2),
            other => {
                return Err(Error::Csv {
                    line: lineno,
                    msg: format!("bad initial label `{other}` (expected 1, 2, or empty)"),
                })
            }
        };
        records.push(TrialRecord {
            trial,
            a,
            b,
            outcome_a: oa,
            outcome_b: ob,
            initial,
        });
    }
    Ok(records)
}

/// Columnar view of loose records (see `Dataset::to_frame`).
pub fn frame_from_records(records: &[TrialRecord]) -> Frame {
    let setting_levels = ["0", "1", "2"];
    let outcome_levels = ["0", "1"];
    let mut columns = vec![
        FrameColumn {
            name: "a".into(),
            levels: setting_levels.iter().map(|s| s.to_string()).collect(),
            data: records.iter().map(|r| r.a.index() as u32).collect(),
        },
        FrameColumn {
            name: "b".into(),
            levels: setting_levels.iter().map(|s| s.to_string()).collect(),
            data: records.iter().map(|r| r.b.index() as u32).collect(),
        },
        FrameColumn {
            name: "A".into(),
            levels: outcome_levels.iter().map(|s| s.to_string()).collect(),
            data: records.iter().map(|r| r.outcome_a.index() as u32).collect(),
        },
        FrameColumn {
            name: "B".into(),
            levels: outcome_levels.iter().map(|s| s.to_string()).collect(),
            data: records.iter().map(|r| r.outcome_b.index() as u32).collect(),
        },
    ];
    if !records.is_empty() && records.iter().all(|r| r.initial.is_some()) {
        columns.push(FrameColumn {
            name: "I".into(),
            levels: vec!["1".into(), "2".into()],
            data: records
                .iter()
                .map(|r| r.initial.unwrap().index() as u32)
                .collect(),
        });
    }
    Frame::new(columns).expect("records map to aligned columns")
}

/// Empirical agreement rates split by a relation over settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationSummary {
    pub n: u64,
    pub p_equal_outcomes: f64,
    pub p_unequal_outcomes: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairSummary {
    pub a: u8,
    pub b: u8,
    pub n: u64,
    pub p_equal_outcomes: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PosteriorEstimate {
    pub settings: Relation,
    pub outcomes: Relation,
    pub n: u64,
    pub p_i1: f64,
    pub p_i2: f64,
}

/// Empirical counterpart of the experiment tables, suitable for JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub schema_version: u32,
    pub experiment: String,
    pub n: u64,
    pub seed: u64,
    pub setting_policy: String,
    pub same_settings: RelationSummary,
    pub different_settings: RelationSummary,
    pub per_setting_pair: Vec<PairSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub posterior_initial: Option<Vec<PosteriorEstimate>>,
}

fn relation_summary(records: &[TrialRecord], rel: Relation) -> RelationSummary {
    let selected: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| rel.matches(r.a.index(), r.b.index()))
        .collect();
    let n = selected.len() as u64;
    let equal = selected
        .iter()
        .filter(|r| r.outcome_a == r.outcome_b)
        .count() as f64;
    let (p_eq, p_ne) = if n == 0 {
        (f64::NAN, f64::NAN)
    } else {
        (equal / n as f64, 1.0 - equal / n as f64)
    };
    RelationSummary {
        n,
        p_equal_outcomes: p_eq,
        p_unequal_outcomes: p_ne,
    }
}

/// Empirical posterior estimates over the initial label, one per relation
/// pair. `None` when any record lacks a label.
pub fn empirical_posteriors(records: &[TrialRecord]) -> Option<Vec<PosteriorEstimate>> {
    if records.is_empty() || records.iter().any(|r| r.initial.is_none()) {
        return None;
    }
    let mut out = Vec::new();
    for settings in [Relation::Equal, Relation::Unequal] {
        for outcomes in [Relation::Equal, Relation::Unequal] {
            let selected: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| {
                    settings.matches(r.a.index(), r.b.index())
                        && outcomes.matches(r.outcome_a.index(), r.outcome_b.index())
                })
                .collect();
            let n = selected.len() as u64;
            let i1 = selected
                .iter()
                .filter(|r| r.initial == Some(InitialLabel::I1))
                .count() as f64;
            let (p1, p2) = if n == 0 {
                (f64::NAN, f64::NAN)
            } else {
                (i1 / n as f64, 1.0 - i1 / n as f64)
            };
            out.push(PosteriorEstimate {
                settings,
                outcomes,
                n,
                p_i1: p1,
                p_i2: p2,
            });
        }
    }
    Some(out)
}

impl Dataset {
    pub fn summary(&self) -> DatasetSummary {
        let mut per_pair = Vec::new();
        for a in Setting::ALL {
            for b in Setting::ALL {
                let selected: Vec<&TrialRecord> = self
                    .records
                    .iter()
                    .filter(|r| r.a == a && r.b == b)
                    .collect();
                let n = selected.len() as u64;
                let eq = selected
                    .iter()
                    .filter(|r| r.outcome_a == r.outcome_b)
                    .count() as f64;
                per_pair.push(PairSummary {
                    a: a.0,
                    b: b.0,
                    n,
                    p_equal_outcomes: if n == 0 { f64::NAN } else { eq / n as f64 },
                });
            }
        }
        DatasetSummary {
            schema_version: 1,
            experiment: self.kind.name().into(),
            n: self.records.len() as u64,
            seed: self.seed,
            setting_policy: self.policy.label().into(),
            same_settings: relation_summary(&self.records, Relation::Equal),
            different_settings: relation_summary(&self.records, Relation::Unequal),
            per_setting_pair: per_pair,
            posterior_initial: empirical_posteriors(&self.records),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{joint_outcome_probability, make_state, MeasurementDirection};

    const TOL: f64 = 1e-12;

    fn agreement(table: &JointTable, settings: Relation) -> f64 {
        let (ai, bi, oa, ob) = (
            table.var_index("a").unwrap(),
            table.var_index("b").unwrap(),
            table.var_index("A").unwrap(),
            table.var_index("B").unwrap(),
        );
        let mut num = 0.0;
        let mut den = 0.0;
        for (levels, p) in table.iter() {
            if settings.matches(levels[ai], levels[bi]) {
                den += p;
                if levels[oa] == levels[ob] {
                    num += p;
                }
            }
        }
        num / den
    }

    #[test]
    fn closed_form_tables_match_the_stated_rates() {
        let u = SettingPolicy::uniform();
        let v1 = closed_form_table(ExperimentKind::V1, &u).unwrap();
        assert!((agreement(&v1, Relation::Equal) - 1.0).abs() < TOL);
        assert!((agreement(&v1, Relation::Unequal) - 0.25).abs() < TOL);
        let v2 = closed_form_table(ExperimentKind::V2, &u).unwrap();
        assert!((agreement(&v2, Relation::Equal) - 0.0).abs() < TOL);
        assert!((agreement(&v2, Relation::Unequal) - 0.75).abs() < TOL);
        let bigv = closed_form_table(ExperimentKind::BigV, &u).unwrap();
        assert!((agreement(&bigv, Relation::Equal) - 0.5).abs() < TOL);
    }

    #[test]
    fn tables_agree_with_the_projector_oracle_at_trine_angles() {
        let u = SettingPolicy::uniform();
        for kind in [ExperimentKind::V1, ExperimentKind::V2] {
            let table = closed_form_table(kind, &u).unwrap();
            let label = kind.fixed_label().unwrap();
            let state = make_state(label);
            for (levels, p) in table.iter() {
                let expected = if levels[2] == label.index() {
                    let alice = MeasurementDirection::new(Setting(levels[0] as u8).azimuth());
                    let bob = MeasurementDirection::new(Setting(levels[1] as u8).azimuth());
                    u.prob(Setting(levels[0] as u8), Setting(levels[1] as u8))
                        * joint_outcome_probability(
                            &state,
                            alice,
                            bob,
                            Outcome::from_index(levels[3]).unwrap(),
                            Outcome::from_index(levels[4]).unwrap(),
                        )
                        .unwrap()
                } else {
                    0.0
                };
                assert!((p - expected).abs() < TOL);
            }
        }
    }

    #[test]
    fn bigv_is_the_even_mixture_of_v1_and_v2() {
        let u = SettingPolicy::uniform();
        let v1 = closed_form_table(ExperimentKind::V1, &u).unwrap();
        let v2 = closed_form_table(ExperimentKind::V2, &u).unwrap();
        let bigv = closed_form_table(ExperimentKind::BigV, &u).unwrap();
        for ((p, q), r) in v1.probs().iter().zip(v2.probs()).zip(bigv.probs()) {
            assert!((0.5 * p + 0.5 * q - r).abs() < TOL);
        }
    }

    #[test]
    fn bigv_outcome_and_setting_pairs_are_independent() {
        let bigv = closed_form_table(ExperimentKind::BigV, &SettingPolicy::uniform()).unwrap();
        let vars = ["a", "b", "A", "B"];
        for i in 0..4 {
            for j in (i + 1)..4 {
                let mi = bigv.mutual_information(vars[i], vars[j]).unwrap();
                assert!(mi.abs() < TOL, "MI({}, {}) = {mi}", vars[i], vars[j]);
            }
        }
    }

    #[test]
    fn posterior_initial_reproduces_the_listed_values() {
        let bigv = closed_form_table(ExperimentKind::BigV, &SettingPolicy::uniform()).unwrap();
        let cases = [
            (Relation::Equal, Relation::Equal, 1.0),
            (Relation::Equal, Relation::Unequal, 0.0),
            (Relation::Unequal, Relation::Equal, 0.25),
            (Relation::Unequal, Relation::Unequal, 0.75),
        ];
        for (settings, outcomes, want_i1) in cases {
            let (p1, p2) = posterior_initial(&bigv, settings, outcomes).unwrap();
            assert!((p1 - want_i1).abs() < TOL);
            assert!((p1 + p2 - 1.0).abs() < TOL);
        }
        // Tables with a locked I marginal cannot support the posterior.
        let v1 = closed_form_table(ExperimentKind::V1, &SettingPolicy::uniform()).unwrap();
        assert!(matches!(
            posterior_initial(&v1, Relation::Equal, Relation::Equal),
            Err(Error::DegeneratePosterior(_))
        ));
    }

    #[test]
    fn preselection_recovers_the_component_experiments() {
        let u = SettingPolicy::uniform();
        let bigv = closed_form_table(ExperimentKind::BigV, &u).unwrap();
        let v1 = closed_form_table(ExperimentKind::V1, &u).unwrap();
        let v2 = closed_form_table(ExperimentKind::V2, &u).unwrap();

        let (sel1, f1) = preselect_table(&bigv, InitialLabel::I1).unwrap();
        assert!((f1 - 0.5).abs() < TOL);
        assert!(sel1.max_abs_diff(&v1).unwrap() < TOL);
        let (sel2, f2) = preselect_table(&bigv, InitialLabel::I2).unwrap();
        assert!((f2 - 0.5).abs() < TOL);
        assert!(sel2.max_abs_diff(&v2).unwrap() < TOL);

        // Idempotent on an already-locked table.
        let (again, factor) = preselect_table(&v1, InitialLabel::I1).unwrap();
        assert!((factor - 1.0).abs() < TOL);
        assert!(again.max_abs_diff(&v1).unwrap() < TOL);
        // And empty on the opposite label.
        assert!(matches!(
            preselect_table(&v1, InitialLabel::I2),
            Err(Error::EmptySelection(_))
        ));
    }

    #[test]
    fn sampling_is_deterministic_and_respects_v1_perfect_agreement() {
        let u = SettingPolicy::uniform();
        assert!(matches!(
            sample_trials(ExperimentKind::V1, 0, 7, &u),
            Err(Error::EmptyDataset)
        ));
        let ds = sample_trials(ExperimentKind::V1, 100_000, 7, &u).unwrap();
        assert_eq!(ds.records.len(), 100_000);
        for r in &ds.records {
            assert_eq!(r.initial, Some(InitialLabel::I1));
            if r.a == r.b {
                assert_eq!(r.outcome_a, r.outcome_b, "V1 must agree when a = b");
            }
        }
        let again = sample_trials(ExperimentKind::V1, 100_000, 7, &u).unwrap();
        assert_eq!(ds.records, again.records);

        let one = sample_trials(ExperimentKind::BigV, 1, 3, &u).unwrap();
        let two = sample_trials(ExperimentKind::BigV, 1, 3, &u).unwrap();
        assert_eq!(one.records, two.records);
    }

    #[test]
    fn sampled_v2_agreement_is_close_to_three_quarters() {
        let ds = sample_trials(ExperimentKind::V2, 100_000, 7, &SettingPolicy::uniform()).unwrap();
        let s = ds.summary();
        let p = s.different_settings.p_equal_outcomes;
        let n = s.different_settings.n as f64;
        let sigma = (0.75 * 0.25 / n).sqrt();
        assert!((p - 0.75).abs() < 3.0 * sigma, "p = {p}, 3σ = {}", 3.0 * sigma);
    }

    #[test]
    fn empirical_cells_stay_within_four_sigma_of_the_table() {
        let u = SettingPolicy::uniform();
        for kind in [ExperimentKind::V1, ExperimentKind::V2, ExperimentKind::BigV] {
            let table = closed_form_table(kind, &u).unwrap();
            let ds = sample_trials(kind, 100_000, 11, &u).unwrap();
            let n = ds.records.len() as f64;
            let mut counts = vec![0u64; table.probs().len()];
            for r in &ds.records {
                let flat = table.encode(&[
                    r.a.index(),
                    r.b.index(),
                    r.initial.unwrap().index(),
                    r.outcome_a.index(),
                    r.outcome_b.index(),
                ]);
                counts[flat] += 1;
            }
            for (i, &p) in table.probs().iter().enumerate() {
                let freq = counts[i] as f64 / n;
                let sigma = (p * (1.0 - p) / n).sqrt();
                assert!(
                    (freq - p).abs() <= 4.0 * sigma,
                    "{kind:?} cell {i}: freq {freq} vs p {p}"
                );
            }
        }
    }

    #[test]
    fn csv_round_trip_and_masking() {
        let ds = sample_trials(ExperimentKind::BigV, 500, 5, &SettingPolicy::uniform()).unwrap();
        let text = ds.to_csv(false);
        let parsed = read_csv(&text).unwrap();
        assert_eq!(parsed, ds.records);

        let masked = ds.to_csv(true);
        let parsed = read_csv(&masked).unwrap();
        assert!(parsed.iter().all(|r| r.initial.is_none()));

        assert!(matches!(
            read_csv("nope,nope\n"),
            Err(Error::Csv { line: 1, .. })
        ));
        let bad = format!("{CSV_HEADER}\n0,0,0,0,0,1\n1,9,0,0,0,2\n");
        assert!(matches!(read_csv(&bad), Err(Error::Csv { line: 3, .. })));
    }

    #[test]
    fn dataset_preselection_keeps_only_the_label() {
        let ds = sample_trials(ExperimentKind::BigV, 2000, 21, &SettingPolicy::uniform()).unwrap();
        let (kept, factor) = preselect_dataset(&ds, InitialLabel::I2).unwrap();
        assert!(kept.records.iter().all(|r| r.initial == Some(InitialLabel::I2)));
        assert!((factor - kept.records.len() as f64 / 2000.0).abs() < TOL);
        assert!(factor > 0.4 && factor < 0.6);

        let v1 = sample_trials(ExperimentKind::V1, 100, 21, &SettingPolicy::uniform()).unwrap();
        assert!(matches!(
            preselect_dataset(&v1, InitialLabel::I2),
            Err(Error::EmptySelection(_))
        ));
    }

    #[test]
    fn table_json_lists_every_configuration() {
        let table = closed_form_table(ExperimentKind::V1, &SettingPolicy::uniform()).unwrap();
        let v = table.to_json();
        let entries = v["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 72);
        assert!(entries[0]["p"].is_number());
        assert_eq!(entries[0]["a"], "0");
        assert_eq!(v["metadata"]["locked"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn policy_validation_rejects_zero_mass_pairs() {
        let mut probs = [[1.0 / 9.0; 3]; 3];
        probs[0][0] = 0.0;
        probs[2][2] = 2.0 / 9.0;
        assert!(matches!(
            SettingPolicy::new(probs),
            Err(Error::InvalidPolicy(_))
        ));
    }
}
