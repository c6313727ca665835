//! Directed acyclic graphs over named variables: collider queries,
//! d-separation, and the bundled experiment graphs.

use serde::{Deserialize, Serialize};
use serde_json::json;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};

/// A validated DAG. Nodes keep insertion order; edges are deduplicated and
/// acyclicity is enforced at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn new<N: Into<String>>(
        nodes: impl IntoIterator<Item = N>,
        edges: &[(&str, &str)],
    ) -> Result<Self> {
        let nodes: Vec<String> = nodes.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateNode(n.clone()));
            }
        }
        let mut dag = Dag {
            parents: vec![Vec::new(); nodes.len()],
            children: vec![Vec::new(); nodes.len()],
            nodes,
            index,
        };
        for &(from, to) in edges {
            dag.add_edge(from, to)?;
        }
        Ok(dag)
    }

    fn add_edge(&mut self, from: &str, to: &str) -> Result<()> {
        let f = self.node_index(from)?;
        let t = self.node_index(to)?;
        if f == t {
            return Err(Error::SelfLoop(from.to_string()));
        }
        if self.children[f].contains(&t) {
            return Err(Error::DuplicateEdge {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        // Adding f -> t closes a cycle iff f is reachable from t.
        if self.reachable(t, f) {
            return Err(Error::Cycle {
                from: from.to_string(),
                to: to.to_string(),
            });
        }
        self.children[f].push(t);
        self.parents[t].push(f);
        Ok(())
    }

    fn reachable(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.children[u].iter().copied());
        }
        false
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownNode(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for (f, ch) in self.children.iter().enumerate() {
            for &t in ch {
                out.push((self.nodes[f].clone(), self.nodes[t].clone()));
            }
        }
        out
    }

    pub fn parents_of(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.node_index(name)?;
        Ok(self.parents[i].iter().map(|&p| self.nodes[p].as_str()).collect())
    }

    pub fn children_of(&self, name: &str) -> Result<Vec<&str>> {
        let i = self.node_index(name)?;
        Ok(self.children[i].iter().map(|&c| self.nodes[c].as_str()).collect())
    }

    pub fn in_degree(&self, name: &str) -> Result<usize> {
        Ok(self.parents[self.node_index(name)?].len())
    }

    /// A collider is a node with two or more direct causes.
    pub fn is_collider(&self, name: &str) -> Result<bool> {
        Ok(self.in_degree(name)? >= 2)
    }

    /// Nodes in an order where every parent precedes its children.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.nodes.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &c in &self.children[u] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push_back(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "construction guarantees acyclicity");
        order
    }

    /// Returns a copy with all edges into `node` removed (the graph surgery
    /// behind an intervention).
    pub fn without_incoming(&self, node: &str) -> Result<Dag> {
        let t = self.node_index(node)?;
        let mut out = self.clone();
        for &p in &self.parents[t] {
            out.children[p].retain(|&c| c != t);
        }
        out.parents[t].clear();
        Ok(out)
    }

    fn ancestral_mask(&self, seeds: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = seeds.to_vec();
        while let Some(u) = stack.pop() {
            if std::mem::replace(&mut mask[u], true) {
                continue;
            }
            stack.extend(self.parents[u].iter().copied());
        }
        mask
    }

    /// Standard d-separation: true iff every path between X and Y is blocked
    /// by Z (colliders block unless they or a descendant are in Z).
    ///
    /// Implemented by moralizing the ancestral subgraph of X ∪ Y ∪ Z and
    /// testing connectivity with Z removed.
    pub fn d_separated(&self, x: &[&str], y: &[&str], z: &[&str]) -> Result<bool> {
        let xi: Vec<usize> = x.iter().map(|n| self.node_index(n)).collect::<Result<_>>()?;
        let yi: Vec<usize> = y.iter().map(|n| self.node_index(n)).collect::<Result<_>>()?;
        let zi: Vec<usize> = z.iter().map(|n| self.node_index(n)).collect::<Result<_>>()?;
        let mut seen = vec![0u8; self.nodes.len()];
        for (set, tag) in [(&xi, 1u8), (&yi, 2), (&zi, 3)] {
            for &i in set {
                if seen[i] != 0 && seen[i] != tag {
                    return Err(Error::OverlappingSets(self.nodes[i].clone()));
                }
                seen[i] = tag;
            }
        }
        if xi.is_empty() || yi.is_empty() {
            return Ok(true);
        }

        let mut seeds = xi.clone();
        seeds.extend(&yi);
        seeds.extend(&zi);
        let mask = self.ancestral_mask(&seeds);

        // Moral graph on the ancestral set: keep every edge, marry parents.
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for v in 0..n {
            if !mask[v] {
                continue;
            }
            let ps = &self.parents[v];
            for &p in ps {
                if mask[p] {
                    adj[v].push(p);
                    adj[p].push(v);
                }
            }
            for i in 0..ps.len() {
                for j in (i + 1)..ps.len() {
                    if mask[ps[i]] && mask[ps[j]] {
                        adj[ps[i]].push(ps[j]);
                        adj[ps[j]].push(ps[i]);
                    }
                }
            }
        }

        let mut blocked = vec![false; n];
        for &i in &zi {
            blocked[i] = true;
        }
        let mut target = vec![false; n];
        for &i in &yi {
            target[i] = true;
        }
        let mut visited = vec![false; n];
        let mut queue: VecDeque<usize> = xi.iter().copied().filter(|&i| !blocked[i]).collect();
        for &i in &queue {
            visited[i] = true;
        }
        while let Some(u) = queue.pop_front() {
            if target[u] {
                return Ok(false);
            }
            for &w in &adj[u] {
                if mask[w] && !blocked[w] && !visited[w] {
                    visited[w] = true;
                    queue.push_back(w);
                }
            }
        }
        Ok(true)
    }

    /// JSON form `{nodes: [...], edges: [[from, to], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "nodes": self.nodes,
            "edges": self.edges().iter().map(|(f, t)| json!([f, t])).collect::<Vec<_>>(),
        })
    }
}

/// One probabilistic (in)dependence assertion between named variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyClaim {
    pub x: String,
    pub y: String,
    pub given: Vec<String>,
    pub dependent: bool,
}

/// A set of distribution-level claims (the content of figures whose arrows
/// are probabilistic rather than causal).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DependencyClaimSet {
    pub variables: Vec<String>,
    pub claims: Vec<DependencyClaim>,
}

impl DependencyClaimSet {
    pub fn new(variables: Vec<String>, claims: Vec<DependencyClaim>) -> Result<Self> {
        for c in &claims {
            for v in [&c.x, &c.y].into_iter().chain(c.given.iter()) {
                if !variables.contains(v) {
                    return Err(Error::UnknownNode(v.clone()));
                }
            }
        }
        Ok(DependencyClaimSet { variables, claims })
    }
}

/// The bundled experiment graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

impl std::str::FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fig1" => Ok(FigureId::Fig1),
            "fig2" => Ok(FigureId::Fig2),
            "fig3" => Ok(FigureId::Fig3),
            "fig4" => Ok(FigureId::Fig4),
            "fig5" => Ok(FigureId::Fig5),
            "fig6" => Ok(FigureId::Fig6),
            other => Err(Error::UnknownNode(format!("figure `{other}`"))),
        }
    }
}

/// A figure is either a causal DAG, a set of distribution-level claims, or a
/// DAG with a lock marker on one node.
#[derive(Debug, Clone, PartialEq)]
pub enum FigureModel {
    Graph(Dag),
    Claims(DependencyClaimSet),
    LockedGraph { dag: Dag, locked: String },
}

const BELL_NODES: [&str; 5] = ["a", "b", "I", "A", "B"];

/// Builds the bundled graphs.
///
/// fig1: the four operational variables are each dependent on I given the
/// other three — claims, not edges. fig2: settings into I only. fig3: fig2
/// plus the legacy outcome edges (I may become a collider). fig4: the
/// nonlocal reading with direct cross-side edges. fig5: the two-traveller
/// collider. fig6: fig3 with the lock marker on I.
pub fn figure_graph(id: FigureId) -> FigureModel {
    let build = |edges: &[(&str, &str)]| Dag::new(BELL_NODES, edges).expect("static graph");
    match id {
        FigureId::Fig1 => {
            let vars: Vec<String> = BELL_NODES.iter().map(|s| s.to_string()).collect();
            let claims = ["a", "b", "A", "B"]
                .iter()
                .map(|&v| DependencyClaim {
                    x: v.into(),
                    y: "I".into(),
                    given: ["a", "b", "A", "B"]
                        .iter()
                        .filter(|&&o| o != v)
                        .map(|&o| o.to_string())
                        .collect(),
                    dependent: true,
                })
                .collect();
            FigureModel::Claims(DependencyClaimSet::new(vars, claims).expect("static claims"))
        }
        FigureId::Fig2 => FigureModel::Graph(build(&[("a", "I"), ("b", "I")])),
        FigureId::Fig3 => FigureModel::Graph(build(&[
            ("a", "I"),
            ("b", "I"),
            ("I", "A"),
            ("I", "B"),
            ("a", "A"),
            ("b", "B"),
        ])),
        FigureId::Fig4 => FigureModel::Graph(build(&[
            ("I", "A"),
            ("I", "B"),
            ("a", "A"),
            ("b", "B"),
            ("a", "B"),
            ("b", "A"),
        ])),
        FigureId::Fig5 => FigureModel::Graph(
            Dag::new(
                ["you", "death", "meeting"],
                &[("you", "meeting"), ("death", "meeting")],
            )
            .expect("static graph"),
        ),
        FigureId::Fig6 => {
            let FigureModel::Graph(dag) = figure_graph(FigureId::Fig3) else {
                unreachable!()
            };
            FigureModel::LockedGraph {
                dag,
                locked: "I".into(),
            }
        }
    }
}
