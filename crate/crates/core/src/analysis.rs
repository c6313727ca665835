//! Statistical and structural diagnostics: exact and sampled conditional
//! independence, no-signalling, the deterministic hidden-variable bound,
//! CHSH, statistical-independence checks, faithfulness reports, and
//! fine-tuning sweeps.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::causal::Dag;
use crate::error::{Error, Result};
use crate::quantum::{
    correlation_e, joint_outcome_probability, make_state, InitialLabel, MeasurementDirection,
    Outcome, StateVector,
};
use crate::rng::chunk_rng;
use crate::scm::{
    bigv_retro_scm, constrain_collider, damascus_constrained, damascus_scm, Constraint,
    RetroMode, Scm,
};
use crate::table::{Frame, JointTable, VarDef};

/// Exact independence statements are accepted below this deviation.
pub const CI_TOL: f64 = 1e-10;

fn check_disjoint(x: &[&str], y: &[&str], z: &[&str]) -> Result<()> {
    for &v in x {
        if y.contains(&v) || z.contains(&v) {
            return Err(Error::OverlappingSets(v.to_string()));
        }
    }
    for &v in y {
        if z.contains(&v) {
            return Err(Error::OverlappingSets(v.to_string()));
        }
    }
    Ok(())
}

/// Largest gap between P(x, y | z) and P(x | z)·P(y | z) over configurations
/// with P(z) > 0.
pub fn exact_ci_deviation(
    table: &JointTable,
    x: &[&str],
    y: &[&str],
    z: &[&str],
) -> Result<f64> {
    check_disjoint(x, y, z)?;
    if x.is_empty() || y.is_empty() {
        return Ok(0.0);
    }
    let mut keep: Vec<&str> = Vec::new();
    keep.extend(x);
    keep.extend(y);
    keep.extend(z);
    let m = table.marginal(&keep)?;
    let card = |names: &[&str]| -> usize {
        names
            .iter()
            .map(|n| m.vars()[m.var_index(n).unwrap()].cardinality())
            .product()
    };
    let (cx, cy, cz) = (card(x), card(y), card(z).max(1));

    // Flat index of `m` is (x, y, z) in row-major order by construction.
    let mut p_z = vec![0.0; cz];
    let mut p_xz = vec![0.0; cx * cz];
    let mut p_yz = vec![0.0; cy * cz];
    let probs = m.probs();
    for (flat, &p) in probs.iter().enumerate() {
        let zc = flat % cz;
        let yc = (flat / cz) % cy;
        let xc = flat / (cz * cy);
        p_z[zc] += p;
        p_xz[xc * cz + zc] += p;
        p_yz[yc * cz + zc] += p;
    }
    let mut worst = 0.0f64;
    for zc in 0..cz {
        if p_z[zc] <= 0.0 {
            continue;
        }
        for xc in 0..cx {
            for yc in 0..cy {
                let joint = probs[(xc * cy + yc) * cz + zc] / p_z[zc];
                let product = (p_xz[xc * cz + zc] / p_z[zc]) * (p_yz[yc * cz + zc] / p_z[zc]);
                worst = worst.max((joint - product).abs());
            }
        }
    }
    Ok(worst)
}

/// True iff X ⫫ Y | Z holds exactly (deviation below `CI_TOL`).
pub fn exact_ci(table: &JointTable, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool> {
    Ok(exact_ci_deviation(table, x, y, z)? < CI_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Independent,
    Dependent,
}

/// G² likelihood-ratio independence test result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CiTestResult {
    pub x: String,
    pub y: String,
    pub given: Vec<String>,
    pub statistic: f64,
    pub dof: u64,
    pub p: f64,
    pub verdict: Verdict,
    /// Set when empty conditioning strata reduced the degrees of freedom.
    pub warning: bool,
}

impl CiTestResult {
    pub fn dependent(&self) -> bool {
        self.verdict == Verdict::Dependent
    }
}

/// G² test of X ⫫ Y | Z on categorical samples.
///
/// dof is (|X|−1)(|Y|−1) per observed conditioning stratum; strata with no
/// observations are dropped from the dof and flagged, since degenerate strata
/// are expected under preselection.
pub fn g2_ci_test(
    frame: &Frame,
    x: &[&str],
    y: &[&str],
    z: &[&str],
    alpha: f64,
) -> Result<CiTestResult> {
    check_disjoint(x, y, z)?;
    if frame.is_empty() {
        return Err(Error::Precondition("empty dataset".into()));
    }
    if !(0.0..1.0).contains(&alpha) || alpha <= 0.0 {
        return Err(Error::ParameterOutOfRange(format!("alpha {alpha}")));
    }
    let cols = |names: &[&str]| -> Result<Vec<&crate::table::FrameColumn>> {
        names.iter().map(|n| frame.column(n)).collect()
    };
    let (xs, ys, zs) = (cols(x)?, cols(y)?, cols(z)?);
    let compound = |set: &[&crate::table::FrameColumn], row: usize| -> usize {
        set.iter()
            .fold(0usize, |acc, c| acc * c.levels.len() + c.data[row] as usize)
    };
    let cx: usize = xs.iter().map(|c| c.levels.len()).product();
    let cy: usize = ys.iter().map(|c| c.levels.len()).product();
    let cz: usize = zs.iter().map(|c| c.levels.len()).product::<usize>().max(1);

    let mut counts = vec![0u64; cx * cy * cz];
    for row in 0..frame.len() {
        let (xc, yc, zc) = (compound(&xs, row), compound(&ys, row), compound(&zs, row));
        counts[(zc * cx + xc) * cy + yc] += 1;
    }

    let mut g2 = 0.0;
    let mut nonempty = 0u64;
    for zc in 0..cz {
        let stratum = &counts[zc * cx * cy..(zc + 1) * cx * cy];
        let n_z: u64 = stratum.iter().sum();
        if n_z == 0 {
            continue;
        }
        nonempty += 1;
        let mut row_tot = vec![0u64; cx];
        let mut col_tot = vec![0u64; cy];
        for xc in 0..cx {
            for yc in 0..cy {
                row_tot[xc] += stratum[xc * cy + yc];
                col_tot[yc] += stratum[xc * cy + yc];
            }
        }
        for xc in 0..cx {
            for yc in 0..cy {
                let o = stratum[xc * cy + yc];
                if o == 0 {
                    continue;
                }
                let e = row_tot[xc] as f64 * col_tot[yc] as f64 / n_z as f64;
                g2 += 2.0 * o as f64 * (o as f64 / e).ln();
            }
        }
    }
    let warning = nonempty < cz as u64;
    let dof = (nonempty * ((cx - 1) * (cy - 1)) as u64).max(1);
    let g2 = g2.max(0.0);
    let chi = ChiSquared::new(dof as f64).expect("dof >= 1");
    let p = 1.0 - chi.cdf(g2);
    Ok(CiTestResult {
        x: x.join(","),
        y: y.join(","),
        given: z.iter().map(|s| s.to_string()).collect(),
        statistic: g2,
        dof,
        p,
        verdict: if p < alpha {
            Verdict::Dependent
        } else {
            Verdict::Independent
        },
        warning,
    })
}

/// No-signalling audit of a table over at least {a, b, A, B}: each side's
/// outcome marginal may not vary with the remote setting.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoSignallingReport {
    pub passed: bool,
    pub max_deviation: f64,
}

pub fn no_signalling_check(table: &JointTable) -> Result<NoSignallingReport> {
    let mut worst = 0.0f64;
    for (local, outcome) in [("a", "A"), ("b", "B")] {
        let remote = if local == "a" { "b" } else { "a" };
        let m = table.marginal(&[local, remote, outcome])?;
        let (cl, cr, co) = (
            m.vars()[0].cardinality(),
            m.vars()[1].cardinality(),
            m.vars()[2].cardinality(),
        );
        let probs = m.probs();
        for l in 0..cl {
            for o in 0..co {
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for r in 0..cr {
                    let p_lr: f64 = (0..co).map(|k| probs[(l * cr + r) * co + k]).sum();
                    if p_lr <= 0.0 {
                        continue;
                    }
                    let cond = probs[(l * cr + r) * co + o] / p_lr;
                    lo = lo.min(cond);
                    hi = hi.max(cond);
                }
                if hi >= lo {
                    worst = worst.max(hi - lo);
                }
            }
        }
    }
    Ok(NoSignallingReport {
        passed: worst < CI_TOL,
        max_deviation: worst,
    })
}

/// Joint table over {a, b, A, B} produced by the projector oracle at
/// arbitrary angle menus, with uniform independent settings.
pub fn kernel_table(
    label: InitialLabel,
    alice_angles: &[f64],
    bob_angles: &[f64],
) -> Result<JointTable> {
    kernel_table_from_state(&make_state(label), alice_angles, bob_angles)
}

pub fn kernel_table_from_state(
    state: &StateVector,
    alice_angles: &[f64],
    bob_angles: &[f64],
) -> Result<JointTable> {
    if alice_angles.is_empty() || bob_angles.is_empty() {
        return Err(Error::ParameterOutOfRange("empty angle menu".into()));
    }
    let idx_levels = |n: usize| -> Vec<String> { (0..n).map(|i| i.to_string()).collect() };
    let vars = vec![
        VarDef {
            name: "a".into(),
            levels: idx_levels(alice_angles.len()),
        },
        VarDef {
            name: "b".into(),
            levels: idx_levels(bob_angles.len()),
        },
        VarDef::new("A", &["0", "1"]),
        VarDef::new("B", &["0", "1"]),
    ];
    let w = 1.0 / (alice_angles.len() * bob_angles.len()) as f64;
    let mut probs = Vec::new();
    for &alpha in alice_angles {
        for &beta in bob_angles {
            for oa in Outcome::ALL {
                for ob in Outcome::ALL {
                    probs.push(
                        w * joint_outcome_probability(
                            state,
                            MeasurementDirection::new(alpha),
                            MeasurementDirection::new(beta),
                            oa,
                            ob,
                        )?,
                    );
                }
            }
        }
    }
    JointTable::new(vars, probs)
}

/// One deterministic local response strategy: an outcome for each of the
/// three settings on each side. These are the canonical hidden variables of
/// the enumeration bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub alice: [Outcome; 3],
    pub bob: [Outcome; 3],
}

impl DeterministicStrategy {
    /// All 64 strategies.
    pub fn enumerate() -> Vec<DeterministicStrategy> {
        let maps: Vec<[Outcome; 3]> = (0..8u8)
            .map(|bits| {
                [0, 1, 2].map(|i| Outcome::from_index(((bits >> i) & 1) as usize).unwrap())
            })
            .collect();
        let mut out = Vec::with_capacity(64);
        for &alice in &maps {
            for &bob in &maps {
                out.push(DeterministicStrategy { alice, bob });
            }
        }
        out
    }

    /// Agrees on every matching setting pair.
    pub fn perfect_same_setting_agreement(&self) -> bool {
        (0..3).all(|s| self.alice[s] == self.bob[s])
    }

    /// Same-outcome rate over the six ordered unequal setting pairs, weighted
    /// uniformly.
    pub fn same_outcome_rate_unequal(&self) -> f64 {
        let mut matches = 0u32;
        for a in 0..3 {
            for b in 0..3 {
                if a != b && self.alice[a] == self.bob[b] {
                    matches += 1;
                }
            }
        }
        f64::from(matches) / 6.0
    }
}

/// Minimum of P(A=B | a≠b) over deterministic strategies with perfect
/// same-setting agreement. Exhaustive over the 64 strategies.
pub fn lhv_same_outcome_bound() -> f64 {
    DeterministicStrategy::enumerate()
        .into_iter()
        .filter(DeterministicStrategy::perfect_same_setting_agreement)
        .map(|s| s.same_outcome_rate_unequal())
        .fold(f64::INFINITY, f64::min)
}

/// S = |E(α₁,β₁) + E(α₁,β₂) + E(α₂,β₁) − E(α₂,β₂)| from the projector oracle.
pub fn chsh_value(label: InitialLabel, alice: [f64; 2], bob: [f64; 2]) -> Result<f64> {
    let state = make_state(label);
    let e = |i: usize, j: usize| -> Result<f64> {
        correlation_e(
            &state,
            MeasurementDirection::new(alice[i]),
            MeasurementDirection::new(bob[j]),
        )
    };
    Ok((e(0, 0)? + e(0, 1)? + e(1, 0)? - e(1, 1)?).abs())
}

/// A quadruple maximizing S for both bundled states under the sign convention
/// above.
pub fn chsh_optimal_angles() -> ([f64; 2], [f64; 2]) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    ([0.0, FRAC_PI_2], [FRAC_PI_4, -FRAC_PI_4])
}

/// Statistical-independence audit: is the hidden variable's conditional given
/// one setting equal to its marginal?
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SiReport {
    pub hidden: String,
    pub setting: String,
    pub passed: bool,
    pub max_deviation: f64,
}

pub fn si_check(table: &JointTable, hidden: &str, setting: &str) -> Result<SiReport> {
    let m = table.marginal(&[hidden, setting])?;
    let ch = m.vars()[0].cardinality();
    let cs = m.vars()[1].cardinality();
    let probs = m.probs();
    let marginal: Vec<f64> = (0..ch)
        .map(|h| (0..cs).map(|s| probs[h * cs + s]).sum())
        .collect();
    let mut worst = 0.0f64;
    for s in 0..cs {
        let p_s: f64 = (0..ch).map(|h| probs[h * cs + s]).sum();
        if p_s <= 0.0 {
            continue;
        }
        for h in 0..ch {
            worst = worst.max((probs[h * cs + s] / p_s - marginal[h]).abs());
        }
    }
    Ok(SiReport {
        hidden: hidden.to_string(),
        setting: setting.to_string(),
        passed: worst < CI_TOL,
        max_deviation: worst,
    })
}

pub fn si_check_scm(scm: &Scm, hidden: &str, setting: &str) -> Result<SiReport> {
    si_check(&scm.exact_joint()?, hidden, setting)
}

/// A conditional-independence statement X ⫫ Y | Z with singleton X and Y,
/// stored in canonical (sorted) form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CiStatement {
    pub x: String,
    pub y: String,
    pub given: Vec<String>,
}

impl CiStatement {
    pub fn new(x: &str, y: &str, given: &[&str]) -> Self {
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let mut given: Vec<String> = given.iter().map(|s| s.to_string()).collect();
        given.sort();
        CiStatement {
            x: x.to_string(),
            y: y.to_string(),
            given,
        }
    }
}

/// Graph-implied vs distribution-level independencies among the observable
/// variables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub implied: Vec<CiStatement>,
    pub actual: Vec<CiStatement>,
    /// Independencies that hold in the joint without graphical support.
    pub unfaithful: Vec<CiStatement>,
    /// d-separations that fail in the joint; empty for any well-formed model.
    pub faithful_violations: Vec<CiStatement>,
}

impl FaithfulnessReport {
    pub fn flags_unfaithful(&self, x: &str, y: &str, given: &[&str]) -> bool {
        self.unfaithful.contains(&CiStatement::new(x, y, given))
    }
}

fn subsets_up_to(pool: &[&str], max_size: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for k in 1..=max_size.min(pool.len()) {
        let mut stack: Vec<(usize, Vec<String>)> = vec![(0, Vec::new())];
        while let Some((start, cur)) = stack.pop() {
            if cur.len() == k {
                out.push(cur);
                continue;
            }
            for (i, name) in pool.iter().enumerate().skip(start) {
                let mut next = cur.clone();
                next.push(name.to_string());
                stack.push((i + 1, next));
            }
        }
    }
    out
}

/// Compares d-separation verdicts with exact conditional independencies for
/// all singleton pairs of observable variables and conditioning sets of size
/// at most 3. Internal scaffolding nodes are excluded from the statements but
/// kept in the graph for the d-separation verdicts.
pub fn faithfulness_report(scm: &Scm) -> Result<FaithfulnessReport> {
    faithfulness_report_on(scm.dag(), &scm.exact_joint_observable()?, &scm.observable_nodes())
}

/// The same comparison for an explicit (graph, joint) pair.
pub fn faithfulness_report_on(
    dag: &Dag,
    joint: &JointTable,
    variables: &[&str],
) -> Result<FaithfulnessReport> {
    let mut implied = Vec::new();
    let mut actual = Vec::new();
    let mut unfaithful = Vec::new();
    let mut faithful_violations = Vec::new();
    for i in 0..variables.len() {
        for j in (i + 1)..variables.len() {
            let (x, y) = (variables[i], variables[j]);
            let pool: Vec<&str> = variables
                .iter()
                .copied()
                .filter(|v| *v != x && *v != y)
                .collect();
            for given in subsets_up_to(&pool, 3) {
                let z: Vec<&str> = given.iter().map(String::as_str).collect();
                let stmt = CiStatement::new(x, y, &z);
                let separated = dag.d_separated(&[x], &[y], &z)?;
                let independent = exact_ci(joint, &[x], &[y], &z)?;
                if separated {
                    implied.push(stmt.clone());
                }
                if independent {
                    actual.push(stmt.clone());
                }
                match (separated, independent) {
                    (false, true) => unfaithful.push(stmt),
                    (true, false) => faithful_violations.push(stmt),
                    _ => {}
                }
            }
        }
    }
    Ok(FaithfulnessReport {
        implied,
        actual,
        unfaithful,
        faithful_violations,
    })
}

/// Fraction of ε-perturbed models in which the target independence survives.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepResult {
    pub target: CiStatement,
    pub epsilon: f64,
    pub trials: u32,
    pub surviving_fraction: f64,
}

/// Perturbs every CPT row by uniform noise bounded by `epsilon` (renormalized)
/// and reports how often the target independence survives. A fraction near 0
/// diagnoses fine-tuning; near 1, a structurally guaranteed independence.
pub fn fine_tuning_sweep(
    scm: &Scm,
    target: &CiStatement,
    epsilon: f64,
    trials: u32,
    seed: u64,
) -> Result<SweepResult> {
    if epsilon < 0.0 || !epsilon.is_finite() {
        return Err(Error::ParameterOutOfRange(format!("epsilon {epsilon}")));
    }
    let z: Vec<&str> = target.given.iter().map(String::as_str).collect();
    let baseline = exact_ci(
        &scm.exact_joint_observable()?,
        &[&target.x],
        &[&target.y],
        &z,
    )?;
    if !baseline {
        return Err(Error::Precondition(format!(
            "target {} ⫫ {} | {:?} does not hold in the unperturbed model",
            target.x, target.y, target.given
        )));
    }
    let mut surviving = 0u32;
    for t in 0..trials {
        let mut rng = chunk_rng(seed, u64::from(t));
        let perturbed = scm.perturb_rows(epsilon, &mut rng);
        let joint = perturbed.exact_joint_observable()?;
        if exact_ci(&joint, &[&target.x], &[&target.y], &z)? {
            surviving += 1;
        }
    }
    Ok(SweepResult {
        target: target.clone(),
        epsilon,
        trials,
        surviving_fraction: if trials == 0 {
            1.0
        } else {
            f64::from(surviving) / f64::from(trials)
        },
    })
}

/// The scenarios wired into the support report and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Damascus,
    BigvRetro,
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "damascus" => Ok(Scenario::Damascus),
            "bigv-retro" | "bigv_retro" => Ok(Scenario::BigvRetro),
            other => Err(Error::UnknownNode(format!("scenario `{other}`"))),
        }
    }
}

/// Selection correlation and counterfactual far-side movement for one
/// scenario, with the resulting classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupportReport {
    pub scenario: String,
    pub constrained: bool,
    pub selection_corr: f64,
    pub far_side_movement: f64,
    pub classification: String,
}

fn total_variation(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p
        .iter()
        .zip(q.iter())
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
}

fn point_mass(levels: &[String], level: &str) -> Vec<f64> {
    let mut out = vec![0.0; levels.len()];
    let i = levels.iter().position(|l| l == level).expect("known level");
    out[i] = 1.0;
    out
}

/// Correlation of the outcomes restricted to trials with matching settings.
fn outcome_correlation_same_settings(table: &JointTable) -> Result<f64> {
    let (ai, bi, oa, ob) = (
        table.var_index("a")?,
        table.var_index("b")?,
        table.var_index("A")?,
        table.var_index("B")?,
    );
    let (mut w, mut ex, mut ey, mut exx, mut eyy, mut exy) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for (levels, p) in table.iter() {
        if levels[ai] != levels[bi] {
            continue;
        }
        let (x, y) = (levels[oa] as f64, levels[ob] as f64);
        w += p;
        ex += p * x;
        ey += p * y;
        exx += p * x * x;
        eyy += p * y * y;
        exy += p * x * y;
    }
    let (ex, ey, exx, eyy, exy) = (ex / w, ey / w, exx / w, eyy / w, exy / w);
    let (vx, vy) = (exx - ex * ex, eyy - ey * ey);
    Ok((exy - ex * ey) / (vx * vy).sqrt())
}

fn classify(constrained: bool, movement: f64) -> String {
    if movement <= CI_TOL {
        "selection artefact".into()
    } else if constrained {
        "CCC".into()
    } else {
        // Movement carried by the legacy outcome mechanism rather than the
        // constraint.
        "mechanism".into()
    }
}

/// Runs the matched pair of queries for a scenario: the correlation induced
/// by selection, and whether a local choice flip moves the far side
/// (plain counterfactual when unconstrained, the constrained counterfactual
/// when locked).
pub fn counterfactual_support_report(
    scenario: Scenario,
    constrained: bool,
) -> Result<SupportReport> {
    let report = match (scenario, constrained) {
        (Scenario::Damascus, false) => {
            let scm = damascus_scm();
            let joint = scm.exact_joint()?;
            let (survivors, _) = joint.condition_drop(&[("meeting", "0")])?;
            let selection_corr = survivors.correlation("you", "death")?;
            let evidence = [("you", "damascus"), ("death", "aleppo"), ("meeting", "0")];
            let cf = scm.counterfactual_query(&evidence, &[("you", "aleppo")], "death")?;
            let factual = point_mass(scm.levels("death")?, "aleppo");
            let movement = total_variation(&cf, &factual);
            SupportReport {
                scenario: "damascus".into(),
                constrained,
                selection_corr,
                far_side_movement: movement,
                classification: classify(constrained, movement),
            }
        }
        (Scenario::Damascus, true) => {
            let c = damascus_constrained();
            let selection_corr = c.joint().correlation("you", "death")?;
            let evidence = [("you", "damascus")];
            let factual = c.conditional(&evidence, "death")?;
            let cf = c.ccc_counterfactual(&evidence, &[("you", "aleppo")], "death")?;
            let movement = total_variation(&cf, &factual);
            SupportReport {
                scenario: "damascus".into(),
                constrained,
                selection_corr,
                far_side_movement: movement,
                classification: classify(constrained, movement),
            }
        }
        (Scenario::BigvRetro, false) => {
            let scm = bigv_retro_scm(RetroMode::LockedCompatible)?;
            let joint = scm.exact_joint()?;
            let (selected, _) = joint.condition_drop(&[("I", "2")])?;
            let selection_corr = outcome_correlation_same_settings(&selected)?;
            let evidence = [("a", "0"), ("b", "0"), ("I", "2"), ("A", "0"), ("B", "1")];
            let cf = scm.counterfactual_query(&evidence, &[("a", "1")], "B")?;
            let factual = point_mass(scm.levels("B")?, "1");
            let movement = total_variation(&cf, &factual);
            SupportReport {
                scenario: "bigv-retro".into(),
                constrained,
                selection_corr,
                far_side_movement: movement,
                classification: classify(constrained, movement),
            }
        }
        (Scenario::BigvRetro, true) => {
            let scm = bigv_retro_scm(RetroMode::LockedCompatible)?;
            let c = constrain_collider(
                scm,
                Constraint {
                    node: "I".into(),
                    value: "2".into(),
                },
            )?;
            let selection_corr = outcome_correlation_same_settings(c.joint())?;
            let evidence = [("a", "0"), ("b", "0"), ("A", "0")];
            let factual = c.conditional(&evidence, "B")?;
            let cf = c.ccc_counterfactual(&evidence, &[("a", "1")], "B")?;
            let movement = total_variation(&cf, &factual);
            SupportReport {
                scenario: "bigv-retro".into(),
                constrained,
                selection_corr,
                far_side_movement: movement,
                classification: classify(constrained, movement),
            }
        }
    };
    Ok(report)
}
