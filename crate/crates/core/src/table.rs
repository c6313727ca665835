//! Exact joint distributions over named categorical variables.
//!
//! A `JointTable` stores one probability per configuration, row-major over the
//! variable order. It is the common currency between the Bell tables, the SCM
//! engine, and the independence diagnostics.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};

/// Probabilities are validated and compared at this tolerance.
pub const PROB_TOL: f64 = 1e-12;

/// Hard cap on enumerable state spaces.
pub const MAX_CONFIGURATIONS: u128 = 1_000_000;

/// A named categorical variable and its ordered level labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarDef {
    pub name: String,
    pub levels: Vec<String>,
}

impl VarDef {
    pub fn new(name: impl Into<String>, levels: &[&str]) -> Self {
        VarDef {
            name: name.into(),
            levels: levels.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn cardinality(&self) -> usize {
        self.levels.len()
    }
}

/// A variable fixed to one level by selection.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LockedVar {
    pub node: String,
    pub value: String,
}

/// Bookkeeping for operations applied to a table.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TableMeta {
    pub marginalized: Vec<String>,
    pub locked: Vec<LockedVar>,
}

/// Compensated summation; table sums must stay trustworthy at 1e-12 even for
/// large state spaces.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for v in values {
        let y = v - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<VarDef>,
    probs: Vec<f64>,
    meta: TableMeta,
}

impl JointTable {
    /// Builds a table, checking shape, nonnegativity, and total mass 1.
    pub fn new(vars: Vec<VarDef>, probs: Vec<f64>) -> Result<Self> {
        let size: u128 = vars.iter().map(|v| v.cardinality() as u128).product();
        if size > MAX_CONFIGURATIONS {
            return Err(Error::StateSpaceTooLarge {
                size,
                limit: MAX_CONFIGURATIONS,
            });
        }
        if vars.iter().any(|v| v.cardinality() == 0) {
            return Err(Error::BadTable("variable with no levels".into()));
        }
        if probs.len() as u128 != size {
            return Err(Error::BadTable(format!(
                "expected {} entries, got {}",
                size,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| **p < 0.0 || !p.is_finite()) {
            return Err(Error::BadTable(format!("invalid probability {p}")));
        }
        let total = kahan_sum(probs.iter().copied());
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::BadTable(format!("entries sum to {total}, not 1")));
        }
        Ok(JointTable {
            vars,
            probs,
            meta: TableMeta::default(),
        })
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn meta(&self) -> &TableMeta {
        &self.meta
    }

    pub fn var_index(&self, name: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn level_index(&self, var: &str, level: &str) -> Result<usize> {
        let vi = self.var_index(var)?;
        self.vars[vi]
            .levels
            .iter()
            .position(|l| l == level)
            .ok_or_else(|| Error::UnknownLevel {
                var: var.to_string(),
                level: level.to_string(),
            })
    }

    /// Decodes a flat index into per-variable level indices.
    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0usize; self.vars.len()];
        for (i, v) in self.vars.iter().enumerate().rev() {
            let c = v.cardinality();
            out[i] = flat % c;
            flat /= c;
        }
        out
    }

    /// Encodes per-variable level indices into a flat index.
    pub fn encode(&self, levels: &[usize]) -> usize {
        let mut flat = 0usize;
        for (i, v) in self.vars.iter().enumerate() {
            flat = flat * v.cardinality() + levels[i];
        }
        flat
    }

    /// Iterates `(levels, probability)` over every configuration.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (self.decode(i), p))
    }

    /// Marginal over `keep`, with variables emitted in the order given.
    pub fn marginal(&self, keep: &[&str]) -> Result<JointTable> {
        let keep_idx: Vec<usize> = keep
            .iter()
            .map(|n| self.var_index(n))
            .collect::<Result<_>>()?;
        let out_vars: Vec<VarDef> = keep_idx.iter().map(|&i| self.vars[i].clone()).collect();
        let out_size: usize = out_vars.iter().map(|v| v.cardinality()).product();
        let mut acc = vec![Vec::new(); out_size];
        for (levels, p) in self.iter() {
            let mut flat = 0usize;
            for (k, &vi) in keep_idx.iter().enumerate() {
                flat = flat * out_vars[k].cardinality() + levels[vi];
            }
            acc[flat].push(p);
        }
        let probs: Vec<f64> = acc.into_iter().map(kahan_sum).collect();
        let mut out = JointTable::new(out_vars, probs)?;
        out.meta = self.meta.clone();
        for v in &self.vars {
            if !keep.contains(&v.name.as_str()) {
                out.meta.marginalized.push(v.name.clone());
            }
        }
        Ok(out)
    }

    /// Zeroes out all mass where `var != level` and renormalizes, keeping the
    /// (now degenerate) coordinate in place. Returns the kept mass.
    pub fn preselect(&self, var: &str, level: &str) -> Result<(JointTable, f64)> {
        let vi = self.var_index(var)?;
        let li = self.level_index(var, level)?;
        let kept = kahan_sum(
            self.iter()
                .filter(|(levels, _)| levels[vi] == li)
                .map(|(_, p)| p),
        );
        if kept <= 0.0 {
            return Err(Error::EmptySelection(format!(
                "no probability mass with {var} = {level}"
            )));
        }
        let probs: Vec<f64> = self
            .probs
            .iter()
            .enumerate()
            .map(|(i, &p)| if self.decode(i)[vi] == li { p / kept } else { 0.0 })
            .collect();
        let mut out = JointTable::new(self.vars.clone(), probs)?;
        out.meta = self.meta.clone();
        out.meta.locked.push(LockedVar {
            node: var.to_string(),
            value: level.to_string(),
        });
        Ok((out, kept))
    }

    /// Conditions on `assignments` and drops the conditioned variables.
    /// Returns the conditioned table and the mass of the conditioning event.
    pub fn condition_drop(&self, assignments: &[(&str, &str)]) -> Result<(JointTable, f64)> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.vars.len()];
        for (var, level) in assignments {
            let vi = self.var_index(var)?;
            let li = self.level_index(var, level)?;
            fixed[vi] = Some(li);
        }
        let keep_idx: Vec<usize> = (0..self.vars.len()).filter(|i| fixed[*i].is_none()).collect();
        let out_vars: Vec<VarDef> = keep_idx.iter().map(|&i| self.vars[i].clone()).collect();
        let out_size: usize = out_vars.iter().map(|v| v.cardinality()).product::<usize>().max(1);
        let mut acc = vec![Vec::new(); out_size];
        for (levels, p) in self.iter() {
            if fixed
                .iter()
                .enumerate()
                .any(|(i, f)| f.is_some_and(|want| levels[i] != want))
            {
                continue;
            }
            let mut flat = 0usize;
            for (k, &vi) in keep_idx.iter().enumerate() {
                flat = flat * out_vars[k].cardinality() + levels[vi];
            }
            acc[flat].push(p);
        }
        let mass = kahan_sum(acc.iter().flatten().copied());
        if mass <= 0.0 {
            return Err(Error::ZeroProbabilityEvidence(format!(
                "{:?} has zero probability",
                assignments
            )));
        }
        let probs: Vec<f64> = acc.into_iter().map(|v| kahan_sum(v) / mass).collect();
        let mut out = JointTable::new(out_vars, probs)?;
        out.meta = self.meta.clone();
        for (var, level) in assignments {
            out.meta.locked.push(LockedVar {
                node: var.to_string(),
                value: level.to_string(),
            });
        }
        Ok((out, mass))
    }

    /// Marginal distribution of a single variable.
    pub fn marginal_dist(&self, var: &str) -> Result<Vec<f64>> {
        let m = self.marginal(&[var])?;
        Ok(m.probs)
    }

    /// Exact mutual information (nats) between two variables.
    pub fn mutual_information(&self, x: &str, y: &str) -> Result<f64> {
        let joint = self.marginal(&[x, y])?;
        let px = joint.marginal_dist(x)?;
        let py = joint.marginal_dist(y)?;
        let cy = py.len();
        let mut terms = Vec::with_capacity(px.len() * cy);
        for (i, &p) in joint.probs.iter().enumerate() {
            if p > 0.0 {
                let prod = px[i / cy] * py[i % cy];
                terms.push(p * (p / prod).ln());
            }
        }
        Ok(kahan_sum(terms))
    }

    /// Pearson correlation of two variables with levels scored by index.
    pub fn correlation(&self, x: &str, y: &str) -> Result<f64> {
        let joint = self.marginal(&[x, y])?;
        let cy = joint.vars[1].cardinality();
        let (mut ex, mut ey, mut exx, mut eyy, mut exy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (i, &p) in joint.probs.iter().enumerate() {
            let (xi, yi) = ((i / cy) as f64, (i % cy) as f64);
            ex += p * xi;
            ey += p * yi;
            exx += p * xi * xi;
            eyy += p * yi * yi;
            exy += p * xi * yi;
        }
        let vx = exx - ex * ex;
        let vy = eyy - ey * ey;
        if vx <= 0.0 || vy <= 0.0 {
            return Err(Error::DegeneratePosterior(format!(
                "correlation undefined: {x} or {y} is constant"
            )));
        }
        Ok((exy - ex * ey) / (vx * vy).sqrt())
    }

    /// Largest absolute entrywise difference. Tables must agree on variables
    /// and level order.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64> {
        if self.vars != other.vars {
            return Err(Error::BadTable(
                "tables have different variable layouts".into(),
            ));
        }
        Ok(self
            .probs
            .iter()
            .zip(other.probs.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// JSON form: a metadata block plus one `{var: level, ..., "p": prob}`
    /// object per configuration.
    pub fn to_json(&self) -> serde_json::Value {
        let entries: Vec<serde_json::Value> = self
            .iter()
            .map(|(levels, p)| {
                let mut obj = serde_json::Map::new();
                for (i, v) in self.vars.iter().enumerate() {
                    obj.insert(v.name.clone(), json!(v.levels[levels[i]]));
                }
                obj.insert("p".into(), json!(p));
                serde_json::Value::Object(obj)
            })
            .collect();
        json!({
            "metadata": {
                "variables": self.vars,
                "marginalized": self.meta.marginalized,
                "locked": self.meta.locked,
            },
            "entries": entries,
        })
    }
}

/// Column-oriented categorical samples, the finite-data counterpart of
/// `JointTable`.
#[derive(Debug, Clone)]
pub struct Frame {
    columns: Vec<FrameColumn>,
}

#[derive(Debug, Clone)]
pub struct FrameColumn {
    pub name: String,
    pub levels: Vec<String>,
    pub data: Vec<u32>,
}

impl Frame {
    pub fn new(columns: Vec<FrameColumn>) -> Result<Self> {
        if let Some(first) = columns.first() {
            let n = first.data.len();
            for c in &columns {
                if c.data.len() != n {
                    return Err(Error::BadTable("ragged frame columns".into()));
                }
                if c.data.iter().any(|&v| v as usize >= c.levels.len()) {
                    return Err(Error::BadTable(format!(
                        "column {} holds an out-of-range code",
                        c.name
                    )));
                }
            }
        }
        Ok(Frame { columns })
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.data.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn columns(&self) -> &[FrameColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Result<&FrameColumn> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coin_pair() -> JointTable {
        // Two fair coins, independent.
        JointTable::new(
            vec![VarDef::new("x", &["0", "1"]), VarDef::new("y", &["0", "1"])],
            vec![0.25; 4],
        )
        .unwrap()
    }

    #[test]
    fn validates_shape_and_mass() {
        let vars = vec![VarDef::new("x", &["0", "1"])];
        assert!(JointTable::new(vars.clone(), vec![0.5, 0.6]).is_err());
        assert!(JointTable::new(vars.clone(), vec![0.5]).is_err());
        assert!(JointTable::new(vars.clone(), vec![-0.1, 1.1]).is_err());
        assert!(JointTable::new(vars, vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn marginal_and_preselect() {
        let t = coin_pair();
        let m = t.marginal(&["y"]).unwrap();
        assert_eq!(m.vars().len(), 1);
        assert!((m.probs()[0] - 0.5).abs() < PROB_TOL);
        assert_eq!(m.meta().marginalized, vec!["x".to_string()]);

        let (sel, mass) = t.preselect("x", "1").unwrap();
        assert!((mass - 0.5).abs() < PROB_TOL);
        assert_eq!(sel.meta().locked.len(), 1);
        // Mass now lives only on x = 1.
        let px = sel.marginal_dist("x").unwrap();
        assert!((px[0] - 0.0).abs() < PROB_TOL && (px[1] - 1.0).abs() < PROB_TOL);
    }

    #[test]
    fn condition_drop_removes_variables() {
        let t = JointTable::new(
            vec![VarDef::new("x", &["0", "1"]), VarDef::new("y", &["0", "1"])],
            vec![0.5, 0.0, 0.0, 0.5], // y copies x
        )
        .unwrap();
        let (c, mass) = t.condition_drop(&[("x", "1")]).unwrap();
        assert!((mass - 0.5).abs() < PROB_TOL);
        assert_eq!(c.vars().len(), 1);
        assert!((c.probs()[1] - 1.0).abs() < PROB_TOL);
        assert!(t.condition_drop(&[("x", "2")]).is_err());
    }

    #[test]
    fn mutual_information_detects_coupling() {
        let indep = coin_pair();
        assert!(indep.mutual_information("x", "y").unwrap().abs() < PROB_TOL);
        let coupled = JointTable::new(
            vec![VarDef::new("x", &["0", "1"]), VarDef::new("y", &["0", "1"])],
            vec![0.5, 0.0, 0.0, 0.5],
        )
        .unwrap();
        let mi = coupled.mutual_information("x", "y").unwrap();
        assert!((mi - std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn correlation_of_perfect_disagreement_is_minus_one() {
        let t = JointTable::new(
            vec![VarDef::new("x", &["0", "1"]), VarDef::new("y", &["0", "1"])],
            vec![0.0, 0.5, 0.5, 0.0],
        )
        .unwrap();
        assert_eq!(t.correlation("x", "y").unwrap(), -1.0);
    }
}
