//! Discrete structural causal models: exact joints, seeded sampling,
//! interventions, noise-based counterfactuals, and constrained (locked)
//! colliders.
//!
//! Every node carries one independent uniform exogenous noise variable and a
//! deterministic inverse-CDF mechanism: with the node's CPT row selected by
//! its parents, the node takes level `v` exactly when the noise falls in the
//! row's `v`-th cumulative interval. This fixes counterfactual semantics:
//! abduction restricts each noise to the interval consistent with the
//! evidence, interventions replace mechanisms, and prediction propagates the
//! shared noise through the modified model.

use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::BTreeSet;

use crate::bell::{pair_probability, Setting};
use crate::causal::{figure_graph, Dag, FigureId, FigureModel};
use crate::error::{Error, Result};
use crate::quantum::{InitialLabel, Outcome};
use crate::rng::{sample_chunked, sample_cumulative};
use crate::table::{Frame, FrameColumn, JointTable, VarDef, PROB_TOL};

/// Counterfactual queries enumerate pairs of worlds; keep them desk-scale.
pub const MAX_COUNTERFACTUAL_CONFIGURATIONS: u128 = 100_000;

/// Conditional probability table for one node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cpt {
    node: String,
    parents: Vec<String>,
    levels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Cpt {
    /// `rows` holds one distribution per parent assignment, row-major over
    /// the declared parent order. Row counts are validated against the parent
    /// cardinalities when the CPT joins an `Scm`.
    pub fn new(
        node: impl Into<String>,
        parents: &[&str],
        levels: &[&str],
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let node = node.into();
        if levels.is_empty() {
            return Err(Error::BadCpt {
                node,
                reason: "no levels".into(),
            });
        }
        for row in &rows {
            if row.len() != levels.len() {
                return Err(Error::BadCpt {
                    node,
                    reason: format!("row of width {}, expected {}", row.len(), levels.len()),
                });
            }
            if row.iter().any(|p| *p < 0.0 || !p.is_finite()) {
                return Err(Error::BadCpt {
                    node,
                    reason: "negative or non-finite probability".into(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::BadCpt {
                    node,
                    reason: format!("row sums to {sum}"),
                });
            }
        }
        Ok(Cpt {
            node,
            parents: parents.iter().map(|s| s.to_string()).collect(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
            rows,
        })
    }

    /// Point mass used by interventions.
    pub fn point_mass(node: impl Into<String>, levels: &[&str], at: usize) -> Self {
        let mut row = vec![0.0; levels.len()];
        row[at] = 1.0;
        Cpt {
            node: node.into(),
            parents: Vec::new(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
            rows: vec![row],
        }
    }

    pub fn node(&self) -> &str {
        &self.node
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn levels(&self) -> &[String] {
        &self.levels
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

#[derive(Debug, Clone, Copy)]
struct NodeRef {
    cpt: usize,
}

/// A DAG with one CPT per node and canonical exogenous noise.
#[derive(Debug, Clone)]
pub struct Scm {
    dag: Dag,
    cpts: Vec<Cpt>,
    // For node i: parent node indices in the CPT's declared order.
    parent_idx: Vec<Vec<usize>>,
    node_ref: Vec<NodeRef>,
    internal: BTreeSet<String>,
}

impl Scm {
    pub fn new(dag: Dag, cpts: Vec<Cpt>) -> Result<Self> {
        let n = dag.nodes().len();
        if cpts.len() != n {
            return Err(Error::BadCpt {
                node: "(scm)".into(),
                reason: format!("{} CPTs for {} nodes", cpts.len(), n),
            });
        }
        let mut node_ref = vec![None; n];
        for (ci, cpt) in cpts.iter().enumerate() {
            let ni = dag.node_index(cpt.node())?;
            if node_ref[ni].is_some() {
                return Err(Error::BadCpt {
                    node: cpt.node().to_string(),
                    reason: "duplicate CPT".into(),
                });
            }
            node_ref[ni] = Some(NodeRef { cpt: ci });
        }
        let node_ref: Vec<NodeRef> = node_ref
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::BadCpt {
                node: "(scm)".into(),
                reason: "missing CPT for some node".into(),
            })?;

        let mut parent_idx = Vec::with_capacity(n);
        for ni in 0..n {
            let cpt = &cpts[node_ref[ni].cpt];
            let declared: BTreeSet<&str> = cpt.parents().iter().map(String::as_str).collect();
            let actual: BTreeSet<&str> = dag
                .parents_of(&dag.nodes()[ni])?
                .into_iter()
                .collect();
            if declared != actual {
                return Err(Error::BadCpt {
                    node: cpt.node().to_string(),
                    reason: format!("CPT parents {declared:?} != graph parents {actual:?}"),
                });
            }
            let idx: Vec<usize> = cpt
                .parents()
                .iter()
                .map(|p| dag.node_index(p))
                .collect::<Result<_>>()?;
            parent_idx.push(idx);
        }

        let scm = Scm {
            dag,
            cpts,
            parent_idx,
            node_ref,
            internal: BTreeSet::new(),
        };
        // Row counts must cover every parent assignment.
        for ni in 0..n {
            let want: usize = scm.parent_idx[ni]
                .iter()
                .map(|&p| scm.levels_of(p).len())
                .product();
            let cpt = scm.cpt_of(ni);
            if cpt.rows().len() != want {
                return Err(Error::BadCpt {
                    node: cpt.node().to_string(),
                    reason: format!("{} rows, expected {}", cpt.rows().len(), want),
                });
            }
        }
        Ok(scm)
    }

    /// Marks nodes as internal scaffolding, excluded from observable joints
    /// and faithfulness enumeration.
    pub fn with_internal(mut self, nodes: &[&str]) -> Result<Self> {
        for n in nodes {
            self.dag.node_index(n)?;
            self.internal.insert(n.to_string());
        }
        Ok(self)
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn internal_nodes(&self) -> &BTreeSet<String> {
        &self.internal
    }

    /// Observable (non-internal) node names in graph order.
    pub fn observable_nodes(&self) -> Vec<&str> {
        self.dag
            .nodes()
            .iter()
            .map(String::as_str)
            .filter(|n| !self.internal.contains(*n))
            .collect()
    }

    pub fn cpt(&self, node: &str) -> Result<&Cpt> {
        Ok(self.cpt_of(self.dag.node_index(node)?))
    }

    fn cpt_of(&self, ni: usize) -> &Cpt {
        &self.cpts[self.node_ref[ni].cpt]
    }

    pub fn levels(&self, node: &str) -> Result<&[String]> {
        Ok(self.cpt(node)?.levels())
    }

    fn levels_of(&self, ni: usize) -> &[String] {
        self.cpt_of(ni).levels()
    }

    pub fn state_space(&self) -> u128 {
        (0..self.dag.nodes().len())
            .map(|i| self.levels_of(i).len() as u128)
            .product()
    }

    /// The CPT row driving `node` in a full configuration (levels indexed in
    /// graph node order). This is the mechanism's lookup, shared by the exact
    /// joint, the sampler, and test oracles.
    pub fn mechanism_row(&self, node: usize, config: &[usize]) -> &[f64] {
        let cpt = self.cpt_of(node);
        let mut row = 0usize;
        for &p in &self.parent_idx[node] {
            row = row * self.levels_of(p).len() + config[p];
        }
        &cpt.rows()[row]
    }

    fn level_index(&self, node: &str, level: &str) -> Result<(usize, usize)> {
        let ni = self.dag.node_index(node)?;
        let li = self
            .levels_of(ni)
            .iter()
            .position(|l| l == level)
            .ok_or_else(|| Error::UnknownLevel {
                var: node.to_string(),
                level: level.to_string(),
            })?;
        Ok((ni, li))
    }

    fn decode(&self, mut flat: usize) -> Vec<usize> {
        let n = self.dag.nodes().len();
        let mut out = vec![0usize; n];
        for i in (0..n).rev() {
            let c = self.levels_of(i).len();
            out[i] = flat % c;
            flat /= c;
        }
        out
    }

    /// Exact joint by the chain rule, variables in graph node order.
    pub fn exact_joint(&self) -> Result<JointTable> {
        let size = self.state_space();
        if size > crate::table::MAX_CONFIGURATIONS {
            return Err(Error::StateSpaceTooLarge {
                size,
                limit: crate::table::MAX_CONFIGURATIONS,
            });
        }
        let n = self.dag.nodes().len();
        let vars: Vec<VarDef> = (0..n)
            .map(|i| VarDef {
                name: self.dag.nodes()[i].clone(),
                levels: self.levels_of(i).to_vec(),
            })
            .collect();
        let mut probs = Vec::with_capacity(size as usize);
        let mut config = vec![0usize; n];
        loop {
            let mut p = 1.0;
            for i in 0..n {
                p *= self.mechanism_row(i, &config)[config[i]];
                if p == 0.0 {
                    break;
                }
            }
            probs.push(p);
            // Odometer increment, last variable fastest.
            let mut k = n;
            loop {
                if k == 0 {
                    break;
                }
                k -= 1;
                config[k] += 1;
                if config[k] < self.levels_of(k).len() {
                    break;
                }
                config[k] = 0;
            }
            if config.iter().all(|&c| c == 0) {
                break;
            }
        }
        JointTable::new(vars, probs)
    }

    /// Exact joint with internal scaffolding marginalized out.
    pub fn exact_joint_observable(&self) -> Result<JointTable> {
        let joint = self.exact_joint()?;
        let keep = self.observable_nodes();
        joint.marginal(&keep)
    }

    /// Ancestral sampling; deterministic in `(n, seed)` and worker count.
    pub fn sample(&self, n: u64, seed: u64) -> Result<Frame> {
        if n == 0 {
            return Err(Error::EmptyDataset);
        }
        let order = self.dag.topological_order();
        let nn = self.dag.nodes().len();
        let rows = sample_chunked(n, seed, |_, rng: &mut ChaCha12Rng| {
            let mut config = vec![0usize; nn];
            for &node in &order {
                let row = self.mechanism_row(node, &config);
                let mut cum = Vec::with_capacity(row.len());
                let mut acc = 0.0;
                for &p in row {
                    acc += p;
                    cum.push(acc);
                }
                config[node] = sample_cumulative(rng, &cum);
            }
            config
        });
        let columns = (0..nn)
            .map(|i| FrameColumn {
                name: self.dag.nodes()[i].clone(),
                levels: self.levels_of(i).to_vec(),
                data: rows.iter().map(|r| r[i] as u32).collect(),
            })
            .collect();
        Frame::new(columns)
    }

    /// Replaces `node`'s mechanism with a point mass and removes its incoming
    /// edges.
    pub fn do_intervene(&self, node: &str, level: &str) -> Result<Scm> {
        let (ni, li) = self.level_index(node, level)?;
        let dag = self.dag.without_incoming(node)?;
        let levels: Vec<&str> = self.levels_of(ni).iter().map(String::as_str).collect();
        let mut cpts = self.cpts.clone();
        cpts[self.node_ref[ni].cpt] = Cpt::point_mass(node, &levels, li);
        let mut out = Scm::new(dag, cpts)?;
        out.internal = self.internal.clone();
        Ok(out)
    }

    fn assignment_indices(&self, assignment: &[(&str, &str)]) -> Result<Vec<(usize, usize)>> {
        assignment
            .iter()
            .map(|(node, level)| self.level_index(node, level))
            .collect()
    }

    /// Abduction–action–prediction over the shared exogenous noise.
    ///
    /// Returns the counterfactual distribution of `query` after conditioning
    /// the noise on `evidence` and applying `intervention`. Exact: worlds
    /// consistent with the evidence are enumerated, each node's noise is
    /// uniform on its factual cumulative interval, and interval overlaps give
    /// the counterfactual transition weights.
    pub fn counterfactual_query(
        &self,
        evidence: &[(&str, &str)],
        intervention: &[(&str, &str)],
        query: &str,
    ) -> Result<Vec<f64>> {
        let size = self.state_space();
        if size > MAX_COUNTERFACTUAL_CONFIGURATIONS {
            return Err(Error::StateSpaceTooLarge {
                size,
                limit: MAX_COUNTERFACTUAL_CONFIGURATIONS,
            });
        }
        let n = self.dag.nodes().len();
        let evidence_idx = self.assignment_indices(evidence)?;
        let intervention_idx = self.assignment_indices(intervention)?;
        let query_idx = self.dag.node_index(query)?;
        let mut intervened: Vec<Option<usize>> = vec![None; n];
        for &(ni, li) in &intervention_idx {
            intervened[ni] = Some(li);
        }
        let order = self.dag.topological_order();

        let mut dist = vec![0.0; self.levels_of(query_idx).len()];
        let mut total = 0.0;
        'worlds: for flat in 0..size as usize {
            let world = self.decode(flat);
            for &(ni, li) in &evidence_idx {
                if world[ni] != li {
                    continue 'worlds;
                }
            }
            let mut pw = 1.0;
            for i in 0..n {
                pw *= self.mechanism_row(i, &world)[world[i]];
                if pw == 0.0 {
                    continue 'worlds;
                }
            }
            total += pw;

            // Factual noise interval per node: [lo, lo + len).
            let mut noise_lo = vec![0.0; n];
            let mut noise_len = vec![0.0; n];
            for i in 0..n {
                let row = self.mechanism_row(i, &world);
                noise_lo[i] = row[..world[i]].iter().sum();
                noise_len[i] = row[world[i]];
            }

            // Depth-first propagation of the counterfactual world.
            let mut cf = vec![0usize; n];
            self.propagate_counterfactual(
                &order,
                0,
                &mut cf,
                pw,
                &intervened,
                &noise_lo,
                &noise_len,
                query_idx,
                &mut dist,
            );
        }
        if total <= 0.0 {
            return Err(Error::ZeroProbabilityEvidence(format!("{evidence:?}")));
        }
        for d in &mut dist {
            *d /= total;
        }
        Ok(dist)
    }

    #[allow(clippy::too_many_arguments)]
    fn propagate_counterfactual(
        &self,
        order: &[usize],
        depth: usize,
        cf: &mut [usize],
        weight: f64,
        intervened: &[Option<usize>],
        noise_lo: &[f64],
        noise_len: &[f64],
        query: usize,
        dist: &mut [f64],
    ) {
        if depth == order.len() {
            dist[cf[query]] += weight;
            return;
        }
        let node = order[depth];
        if let Some(forced) = intervened[node] {
            cf[node] = forced;
            self.propagate_counterfactual(
                order,
                depth + 1,
                cf,
                weight,
                intervened,
                noise_lo,
                noise_len,
                query,
                dist,
            );
            return;
        }
        let row = self.mechanism_row(node, cf);
        let (flo, flen) = (noise_lo[node], noise_len[node]);
        let mut lo = 0.0;
        for (v, &p) in row.iter().enumerate() {
            let hi = lo + p;
            let overlap = (hi.min(flo + flen) - lo.max(flo)).max(0.0);
            if overlap > 0.0 {
                cf[node] = v;
                self.propagate_counterfactual(
                    order,
                    depth + 1,
                    cf,
                    weight * overlap / flen,
                    intervened,
                    noise_lo,
                    noise_len,
                    query,
                    dist,
                );
            }
            lo = hi;
        }
    }

    /// Clone with every CPT row nudged by uniform noise in `[-epsilon,
    /// epsilon]` (clipped to `[0, 1]`, renormalized). The probe used by the
    /// fine-tuning sweep.
    pub fn perturb_rows(&self, epsilon: f64, rng: &mut ChaCha12Rng) -> Scm {
        use rand::Rng;
        let mut out = self.clone();
        for cpt in &mut out.cpts {
            for row in &mut cpt.rows {
                let original = row.clone();
                for p in row.iter_mut() {
                    let delta = rng.random::<f64>() * 2.0 * epsilon - epsilon;
                    *p = (*p + delta).clamp(0.0, 1.0);
                }
                let sum: f64 = row.iter().sum();
                if sum <= 1e-9 {
                    row.clone_from(&original);
                } else {
                    for p in row.iter_mut() {
                        *p /= sum;
                    }
                }
            }
        }
        out
    }

    /// JSON form: dag block plus per-node CPT rows.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "dag": self.dag.to_json(),
            "cpts": self.cpts.iter().map(|c| json!({
                "node": c.node,
                "parents": c.parents,
                "levels": c.levels,
                "rows": c.rows,
            })).collect::<Vec<_>>(),
            "internal": self.internal,
        })
    }
}

/// A collider node locked to one value by a boundary condition outside the
/// model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub node: String,
    pub value: String,
}

/// An `Scm` whose collider has been locked: the conditioned joint over the
/// remaining variables, with the locked node removed from the variable set.
#[derive(Debug, Clone)]
pub struct ConstrainedScm {
    base: Scm,
    constraint: Constraint,
    joint: JointTable,
    prior_mass: f64,
}

/// Locks a collider at a value with nonzero prior mass.
pub fn constrain_collider(base: Scm, constraint: Constraint) -> Result<ConstrainedScm> {
    if !base.dag().is_collider(&constraint.node)? {
        return Err(Error::NotACollider(constraint.node.clone()));
    }
    base.level_index(&constraint.node, &constraint.value)?;
    let joint = base.exact_joint()?;
    let (conditioned, prior_mass) =
        joint.condition_drop(&[(constraint.node.as_str(), constraint.value.as_str())])?;
    Ok(ConstrainedScm {
        base,
        constraint,
        joint: conditioned,
        prior_mass,
    })
}

impl ConstrainedScm {
    pub fn base(&self) -> &Scm {
        &self.base
    }

    pub fn constraint(&self) -> &Constraint {
        &self.constraint
    }

    /// Prior probability of the locked value before conditioning.
    pub fn prior_mass(&self) -> f64 {
        self.prior_mass
    }

    /// Conditioned joint over all remaining variables (internal included).
    pub fn joint(&self) -> &JointTable {
        &self.joint
    }

    /// Conditioned joint over the observable remaining variables.
    pub fn observable_joint(&self) -> Result<JointTable> {
        let keep: Vec<&str> = self
            .base
            .observable_nodes()
            .into_iter()
            .filter(|n| *n != self.constraint.node)
            .collect();
        self.joint.marginal(&keep)
    }

    fn reject_locked(&self, node: &str, role: &str) -> Result<()> {
        if node == self.constraint.node {
            return Err(Error::ConstraintTarget(format!(
                "{role} names the locked node `{node}`"
            )));
        }
        Ok(())
    }

    /// Counterfactual across the locked collider: intervene on the base
    /// model, re-impose the constraint, condition on the evidence that
    /// survives the intervention, and read off the query.
    pub fn ccc_counterfactual(
        &self,
        evidence: &[(&str, &str)],
        intervention: &[(&str, &str)],
        query: &str,
    ) -> Result<Vec<f64>> {
        self.reject_locked(query, "query")?;
        for (node, _) in intervention {
            self.reject_locked(node, "intervention")?;
        }
        for (node, value) in evidence {
            if *node == self.constraint.node && *value != self.constraint.value {
                return Err(Error::ZeroProbabilityEvidence(format!(
                    "evidence {node} = {value} contradicts the lock at {}",
                    self.constraint.value
                )));
            }
        }

        let mut intervened = self.base.clone();
        for (node, value) in intervention {
            intervened = intervened.do_intervene(node, value)?;
        }
        let joint = intervened.exact_joint()?;
        let (reimposed, mass) = joint
            .condition_drop(&[(self.constraint.node.as_str(), self.constraint.value.as_str())])
            .map_err(|_| {
                Error::InfeasibleCounterfactual(format!(
                    "intervention leaves no mass at {} = {}",
                    self.constraint.node, self.constraint.value
                ))
            })?;
        debug_assert!(mass > 0.0);

        let surviving: Vec<(&str, &str)> = evidence
            .iter()
            .filter(|(node, _)| {
                *node != self.constraint.node
                    && !intervention.iter().any(|(inode, _)| inode == node)
            })
            .copied()
            .collect();

        if let Some((_, v)) = intervention.iter().find(|(n, _)| *n == query) {
            let levels = self.base.levels(query)?;
            let li = levels.iter().position(|l| l == v).unwrap();
            let mut dist = vec![0.0; levels.len()];
            dist[li] = 1.0;
            return Ok(dist);
        }
        if let Some((_, v)) = surviving.iter().find(|(n, _)| *n == query) {
            let levels = self.base.levels(query)?;
            let li = levels.iter().position(|l| l == v).ok_or_else(|| {
                Error::UnknownLevel {
                    var: query.to_string(),
                    level: v.to_string(),
                }
            })?;
            let mut dist = vec![0.0; levels.len()];
            dist[li] = 1.0;
            return Ok(dist);
        }
        let (conditioned, _) = reimposed.condition_drop(&surviving)?;
        conditioned.marginal_dist(query)
    }

    /// Factual conditional of `query` given evidence, under the lock.
    pub fn conditional(&self, evidence: &[(&str, &str)], query: &str) -> Result<Vec<f64>> {
        self.reject_locked(query, "query")?;
        let surviving: Vec<(&str, &str)> = evidence
            .iter()
            .filter(|(node, _)| *node != self.constraint.node)
            .copied()
            .collect();
        if let Some((_, v)) = surviving.iter().find(|(n, _)| *n == query) {
            let levels = self.base.levels(query)?;
            let li = levels.iter().position(|l| l == v).ok_or_else(|| {
                Error::UnknownLevel {
                    var: query.to_string(),
                    level: v.to_string(),
                }
            })?;
            let mut dist = vec![0.0; levels.len()];
            dist[li] = 1.0;
            return Ok(dist);
        }
        let (conditioned, _) = self.joint.condition_drop(&surviving)?;
        conditioned.marginal_dist(query)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = self.base.to_json();
        v["constraint"] = json!({
            "node": self.constraint.node,
            "value": self.constraint.value,
        });
        v
    }
}

// ---------------------------------------------------------------------------
// Bundled scenarios
// ---------------------------------------------------------------------------

/// The two-traveller collider: `you` and `death` choose a city uniformly,
/// `meeting` records whether they chose the same one.
pub fn damascus_scm() -> Scm {
    let dag = match figure_graph(FigureId::Fig5) {
        FigureModel::Graph(d) => d,
        _ => unreachable!(),
    };
    let cities = ["damascus", "aleppo"];
    let uniform = vec![vec![0.5, 0.5]];
    let meet_rows = vec![
        vec![0.0, 1.0], // damascus, damascus
        vec![1.0, 0.0], // damascus, aleppo
        vec![1.0, 0.0], // aleppo, damascus
        vec![0.0, 1.0], // aleppo, aleppo
    ];
    Scm::new(
        dag,
        vec![
            Cpt::new("you", &[], &cities, uniform.clone()).unwrap(),
            Cpt::new("death", &[], &cities, uniform).unwrap(),
            Cpt::new("meeting", &["you", "death"], &["0", "1"], meet_rows).unwrap(),
        ],
    )
    .expect("static model")
}

/// The fated variant: the meeting collider locked at 1.
pub fn damascus_constrained() -> ConstrainedScm {
    constrain_collider(
        damascus_scm(),
        Constraint {
            node: "meeting".into(),
            value: "1".into(),
        },
    )
    .expect("static model")
}

/// Parameterization of the retro BIG-V model (I as a collider of the
/// settings).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RetroMode {
    /// Edges a→I and b→I present but with flat rows P(I|a,b) = (½, ½); the
    /// observable joint coincides with the BIG-V table.
    LockedCompatible,
    /// Setting-dependent rows P(I₁|a,b) = ½ + ε·f(a,b), a demonstration of a
    /// statistical-independence violation, not a physical proposal.
    UnlockedDemo { epsilon: f64 },
}

pub const UNLOCKED_DEMO_EPSILON: f64 = 0.2;

/// The fixed ±1 pattern of the demo mode: +1 when a + b is even.
fn demo_sign(a: usize, b: usize) -> f64 {
    if (a + b).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

const PAIR_LEVELS: [&str; 4] = ["00", "01", "10", "11"];

fn quantum_pair_rows() -> Vec<Vec<f64>> {
    // Row-major over (a, b, I); outcome-pair order (00, 01, 10, 11).
    let mut rows = Vec::with_capacity(3 * 3 * 2);
    for a in Setting::ALL {
        for b in Setting::ALL {
            let delta = a.azimuth() - b.azimuth();
            for label in InitialLabel::ALL {
                let row: Vec<f64> = [
                    (Outcome::Zero, Outcome::Zero),
                    (Outcome::Zero, Outcome::One),
                    (Outcome::One, Outcome::Zero),
                    (Outcome::One, Outcome::One),
                ]
                .into_iter()
                .map(|(oa, ob)| pair_probability(label, delta, oa, ob))
                .collect();
                rows.push(row);
            }
        }
    }
    rows
}

/// Deterministic projection of the outcome-pair node onto one side.
fn projection_rows(parent_cards: &[usize], pair_axis: usize, second: bool) -> Vec<Vec<f64>> {
    let total: usize = parent_cards.iter().product();
    let mut rows = Vec::with_capacity(total);
    for flat in 0..total {
        // Decode the pair value from the row index.
        let mut rem = flat;
        let mut pair = 0;
        for (i, &c) in parent_cards.iter().enumerate().rev() {
            let v = rem % c;
            rem /= c;
            if i == pair_axis {
                pair = v;
            }
        }
        let bit = if second { pair % 2 } else { pair / 2 };
        let mut row = vec![0.0, 0.0];
        row[bit] = 1.0;
        rows.push(row);
    }
    rows
}

/// BIG-V with the initial state drawn as a common effect of the settings.
///
/// The dag carries the setting→I edges plus the legacy outcome edges, and the
/// outcome pair is produced through one internal node `L` (children A and B)
/// whose rows match the quantum joint given (a, b, I). The quantum conditional
/// P(A,B|a,b,I) does not factor into P(A|a,I)·P(B|b,I), so the pair has to be
/// generated jointly.
pub fn bigv_retro_scm(mode: RetroMode) -> Result<Scm> {
    let settings = ["0", "1", "2"];
    let i_rows: Vec<Vec<f64>> = match mode {
        RetroMode::LockedCompatible => vec![vec![0.5, 0.5]; 9],
        RetroMode::UnlockedDemo { epsilon } => {
            if !(-0.5..=0.5).contains(&epsilon) || epsilon.abs() >= 0.5 {
                return Err(Error::ParameterOutOfRange(format!(
                    "epsilon {epsilon} not inside (-0.5, 0.5)"
                )));
            }
            let mut rows = Vec::with_capacity(9);
            for a in 0..3 {
                for b in 0..3 {
                    let p1 = 0.5 + epsilon * demo_sign(a, b);
                    rows.push(vec![p1, 1.0 - p1]);
                }
            }
            rows
        }
    };

    let dag = Dag::new(
        ["a", "b", "I", "L", "A", "B"],
        &[
            ("a", "I"),
            ("b", "I"),
            ("I", "A"),
            ("I", "B"),
            ("a", "A"),
            ("b", "B"),
            ("a", "L"),
            ("b", "L"),
            ("I", "L"),
            ("L", "A"),
            ("L", "B"),
        ],
    )?;

    let third = vec![vec![1.0 / 3.0; 3]];
    let cpts = vec![
        Cpt::new("a", &[], &settings, third.clone())?,
        Cpt::new("b", &[], &settings, third)?,
        Cpt::new("I", &["a", "b"], &["1", "2"], i_rows)?,
        Cpt::new("L", &["a", "b", "I"], &PAIR_LEVELS, quantum_pair_rows())?,
        // A reads the first bit of L; the a and I edges are legacy structure
        // with flat dependence.
        Cpt::new(
            "A",
            &["a", "I", "L"],
            &["0", "1"],
            projection_rows(&[3, 2, 4], 2, false),
        )?,
        Cpt::new(
            "B",
            &["b", "I", "L"],
            &["0", "1"],
            projection_rows(&[3, 2, 4], 2, true),
        )?,
    ];
    Scm::new(dag, cpts)?.with_internal(&["L"])
}

/// BIG-V with the nonlocal reading: direct cross-side edges a→B and b→A, the
/// initial state exogenous, and the quantum joint realized through the same
/// internal pair node. The cross-side edges exist in the graph while the
/// no-signalling marginals hide them — the fine-tuned structure the
/// faithfulness report is meant to flag.
pub fn bigv_nonlocal_scm() -> Scm {
    let settings = ["0", "1", "2"];
    let dag = Dag::new(
        ["a", "b", "I", "L", "A", "B"],
        &[
            ("I", "A"),
            ("I", "B"),
            ("a", "A"),
            ("b", "B"),
            ("a", "B"),
            ("b", "A"),
            ("a", "L"),
            ("b", "L"),
            ("I", "L"),
            ("L", "A"),
            ("L", "B"),
        ],
    )
    .expect("static graph");
    let third = vec![vec![1.0 / 3.0; 3]];
    let cpts = vec![
        Cpt::new("a", &[], &settings, third.clone()).unwrap(),
        Cpt::new("b", &[], &settings, third).unwrap(),
        Cpt::new("I", &[], &["1", "2"], vec![vec![0.5, 0.5]]).unwrap(),
        Cpt::new("L", &["a", "b", "I"], &PAIR_LEVELS, quantum_pair_rows()).unwrap(),
        Cpt::new(
            "A",
            &["a", "b", "I", "L"],
            &["0", "1"],
            projection_rows(&[3, 3, 2, 4], 3, false),
        )
        .unwrap(),
        Cpt::new(
            "B",
            &["a", "b", "I", "L"],
            &["0", "1"],
            projection_rows(&[3, 3, 2, 4], 3, true),
        )
        .unwrap(),
    ];
    Scm::new(dag, cpts)
        .expect("static model")
        .with_internal(&["L"])
        .expect("L exists")
}
