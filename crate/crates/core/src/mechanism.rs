//! Extensive-form mechanisms: a rooted tree whose internal nodes let one
//! applicant narrow down their type and whose leaves fix a matching.
//!
//! Each applicant has a universe of types (full preference orders), named by
//! their index in that universe. A node's branches partition the acting
//! applicant's current type set `T_i(h)`, which is inherited along the path
//! and only refined where that applicant acts.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::da::run_da;
use crate::error::{Error, Result};
use crate::market::{Matching, PreferenceProfile, PrioritySet};
use crate::order::{all_orders, applicant_name, Order};

/// Violations beyond this count are tallied but not itemised.
pub const MAX_REPORTED_VIOLATIONS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// Sorted type ids of the acting applicant routed to `child`.
    pub types: Vec<u32>,
    pub child: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Internal { player: usize, branches: Vec<Branch> },
    Leaf(Matching),
}

/// A mechanism tree with nodes stored in preorder; node 0 is the root.
#[derive(Clone, Debug)]
pub struct MechanismTree {
    n: usize,
    universe: Vec<Vec<Order>>,
    nodes: Vec<Node>,
    lookup: Vec<HashMap<Order, u32>>,
}

impl PartialEq for MechanismTree {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.universe == other.universe && self.nodes == other.nodes
    }
}

impl Eq for MechanismTree {}

fn build_lookup(universe: &[Vec<Order>]) -> Vec<HashMap<Order, u32>> {
    universe
        .iter()
        .map(|u| u.iter().enumerate().map(|(k, o)| (o.clone(), k as u32)).collect())
        .collect()
}

impl MechanismTree {
    /// Builds and validates a tree.
    pub fn new(n: usize, universe: Vec<Vec<Order>>, nodes: Vec<Node>) -> Result<Self> {
        let tree = Self::from_parts_unchecked(n, universe, nodes);
        tree.validate()?;
        Ok(tree)
    }

    pub(crate) fn from_parts_unchecked(n: usize, universe: Vec<Vec<Order>>, nodes: Vec<Node>) -> Self {
        let lookup = build_lookup(&universe);
        Self { n, universe, nodes, lookup }
    }

    /// Every applicant may hold any of the `n!` orders; type ids are the
    /// lexicographic indices of [`all_orders`].
    pub fn full_universe(n: usize) -> Vec<Vec<Order>> {
        vec![all_orders(n); n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &[Vec<Order>] {
        &self.universe
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    /// Type id of `order` for `applicant`.
    pub fn type_id(&self, applicant: usize, order: &Order) -> Option<u32> {
        self.lookup.get(applicant)?.get(order).copied()
    }

    fn root_types(&self) -> Vec<Vec<u32>> {
        self.universe.iter().map(|u| (0..u.len() as u32).collect()).collect()
    }

    /// Checks the partition, preorder and leaf invariants, reporting the
    /// first offending node.
    pub fn validate(&self) -> Result<()> {
        let bad = |node: usize, reason: String| Error::InvalidTree { node, reason };
        if self.universe.len() != self.n {
            return Err(bad(0, format!("universe lists {} applicants, expected {}", self.universe.len(), self.n)));
        }
        for (a, u) in self.universe.iter().enumerate() {
            if u.is_empty() {
                return Err(bad(0, format!("empty universe for applicant {}", applicant_name(a))));
            }
            if u.iter().any(|o| o.len() != self.n) {
                return Err(bad(0, format!("universe of applicant {} has an order of wrong length", applicant_name(a))));
            }
            if self.lookup[a].len() != u.len() {
                return Err(bad(0, format!("universe of applicant {} repeats an order", applicant_name(a))));
            }
        }
        if self.nodes.is_empty() {
            return Err(bad(0, "tree has no nodes".into()));
        }
        let root = self.root_types();
        let mut stack: Vec<(usize, Vec<&[u32]>)> = vec![(0, root.iter().map(Vec::as_slice).collect())];
        let mut expected = 0usize;
        while let Some((id, types)) = stack.pop() {
            if id != expected {
                return Err(bad(id, format!("nodes are not in preorder (expected node {expected})")));
            }
            expected += 1;
            match &self.nodes[id] {
                Node::Leaf(m) => {
                    if m.n() != self.n {
                        return Err(bad(id, format!("leaf matching has size {}", m.n())));
                    }
                }
                Node::Internal { player, branches } => {
                    let i = *player;
                    if i >= self.n {
                        return Err(bad(id, format!("player {i} out of range")));
                    }
                    if branches.is_empty() {
                        return Err(bad(id, "internal node without children".into()));
                    }
                    let mut union: Vec<u32> = Vec::with_capacity(types[i].len());
                    for b in branches {
                        if b.types.is_empty() {
                            return Err(bad(id, format!("empty type set towards child {}", b.child)));
                        }
                        if b.types.windows(2).any(|w| w[0] >= w[1]) {
                            return Err(bad(id, format!("type set towards child {} is not strictly sorted", b.child)));
                        }
                        if b.child <= id || b.child >= self.nodes.len() {
                            return Err(bad(id, format!("child index {} out of range", b.child)));
                        }
                        union.extend_from_slice(&b.types);
                    }
                    union.sort_unstable();
                    if union.windows(2).any(|w| w[0] == w[1]) {
                        return Err(bad(id, "child type sets overlap".into()));
                    }
                    if union.as_slice() != types[i] {
                        return Err(bad(id, format!("child type sets do not cover T_{}(h)", applicant_name(i))));
                    }
                    for b in branches.iter().rev() {
                        let mut t = types.clone();
                        t[i] = &b.types;
                        stack.push((b.child, t));
                    }
                }
            }
        }
        if expected != self.nodes.len() {
            return Err(bad(expected, "node unreachable from the root".into()));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    /// Leaf reached when every applicant reports the given type id.
    pub fn leaf_for(&self, ids: &[u32]) -> usize {
        let mut id = 0;
        loop {
            match &self.nodes[id] {
                Node::Leaf(_) => return id,
                Node::Internal { player, branches } => {
                    let t = ids[*player];
                    id = branches
                        .iter()
                        .find(|b| b.types.binary_search(&t).is_ok())
                        .expect("validated tree routes every type")
                        .child;
                }
            }
        }
    }

    pub fn leaf_matching(&self, leaf: usize) -> &Matching {
        match &self.nodes[leaf] {
            Node::Leaf(m) => m,
            Node::Internal { .. } => panic!("node {leaf} is not a leaf"),
        }
    }

    pub fn type_ids(&self, p: &PreferenceProfile) -> Result<Vec<u32>> {
        if p.n() != self.n {
            return Err(Error::SizeMismatch { expected: self.n, found: p.n() });
        }
        (0..self.n)
            .map(|a| self.type_id(a, p.pref(a)).ok_or(Error::OutsideEnvironment { applicant: a }))
            .collect()
    }

    /// Plays the tree with truthful reports.
    pub fn execute(&self, p: &PreferenceProfile) -> Result<Matching> {
        let ids = self.type_ids(p)?;
        Ok(self.leaf_matching(self.leaf_for(&ids)).clone())
    }

    fn profile_of(&self, ids: &[u32]) -> PreferenceProfile {
        PreferenceProfile::new(ids.iter().enumerate().map(|(a, &t)| self.universe[a][t as usize].clone()).collect())
            .expect("universe orders are complete")
    }

    fn environment_size(&self) -> Option<u64> {
        self.universe.iter().try_fold(1u64, |acc, u| acc.checked_mul(u.len() as u64))
    }

    fn decode(&self, mut index: u64) -> Vec<u32> {
        let mut ids = vec![0u32; self.n];
        for a in (0..self.n).rev() {
            let base = self.universe[a].len() as u64;
            ids[a] = (index % base) as u32;
            index /= base;
        }
        ids
    }
}

/// Which profiles [`check_implements`] compares against deferred acceptance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every profile in the environment.
    Exhaustive,
    /// `count` profiles drawn uniformly from the environment.
    Sampled { count: u64, seed: u64 },
    /// Everyone reports as in `base` except `free`, who ranges over their
    /// whole universe.
    Slice { free: usize, base: PreferenceProfile },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub profile: PreferenceProfile,
    pub tree_outcome: Matching,
    pub da_outcome: Matching,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImplementsReport {
    pub checked: u64,
    /// Earliest mismatch in enumeration order.
    pub counterexample: Option<Counterexample>,
}

impl ImplementsReport {
    pub fn ok(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Compares the tree's outcome with deferred acceptance under `q`.
pub fn check_implements(tree: &MechanismTree, q: &PrioritySet, mode: &CheckMode) -> Result<ImplementsReport> {
    if q.n() != tree.n() {
        return Err(Error::SizeMismatch { expected: tree.n(), found: q.n() });
    }
    let mismatch = |ids: Vec<u32>| -> Option<Counterexample> {
        let profile = tree.profile_of(&ids);
        let tree_outcome = tree.leaf_matching(tree.leaf_for(&ids));
        let da_outcome = run_da(q, &profile).expect("sizes agree");
        (*tree_outcome != da_outcome).then(|| Counterexample {
            profile,
            tree_outcome: tree_outcome.clone(),
            da_outcome,
        })
    };
    let (checked, counterexample) = match mode {
        CheckMode::Exhaustive => {
            let total = tree
                .environment_size()
                .ok_or(Error::TooLarge { n: tree.n(), limit: 0 })?;
            let found = (0..total).into_par_iter().find_map_first(|k| mismatch(tree.decode(k)));
            (total, found)
        }
        CheckMode::Sampled { count, seed } => {
            let found = (0..*count).into_par_iter().find_map_first(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                rng.set_stream(k);
                let ids = tree.universe.iter().map(|u| rng.random_range(0..u.len() as u32)).collect();
                mismatch(ids)
            });
            (*count, found)
        }
        CheckMode::Slice { free, base } => {
            if *free >= tree.n() {
                return Err(Error::Precondition(format!("free applicant {free} out of range")));
            }
            let base_ids = tree.type_ids(base)?;
            let size = tree.universe[*free].len() as u32;
            let found = (0..size).into_par_iter().find_map_first(|t| {
                let mut ids = base_ids.clone();
                ids[*free] = t;
                mismatch(ids)
            });
            (size as u64, found)
        }
    };
    Ok(ImplementsReport { checked, counterexample })
}

/// A node where truthful play can end worse than some deviation's best case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub player: usize,
    pub type_id: u32,
    /// Leaf under the truthful child, consistent with `type_id`, giving the
    /// player their worst position there.
    pub truthful_leaf: usize,
    /// Leaf under another child giving the player a strictly better position.
    pub deviating_leaf: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OspReport {
    pub violation_count: usize,
    /// At most [`MAX_REPORTED_VIOLATIONS`] violations, ordered by node.
    pub violations: Vec<Violation>,
}

impl OspReport {
    pub fn ok(&self) -> bool {
        self.violation_count == 0
    }
}

impl Violation {
    pub fn describe(&self, tree: &MechanismTree) -> String {
        let t = &tree.universe()[self.player][self.type_id as usize];
        let truthful = tree.leaf_matching(self.truthful_leaf);
        let deviating = tree.leaf_matching(self.deviating_leaf);
        format!(
            "node {}: applicant {} with preference {} may end at position {} (leaf {}) by acting truthfully but can reach position {} (leaf {}) by deviating",
            self.node,
            applicant_name(self.player),
            t.ranking().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(","),
            truthful.position_of(self.player) + 1,
            self.truthful_leaf,
            deviating.position_of(self.player) + 1,
            self.deviating_leaf,
        )
    }
}

/// Per-node summaries used by the OSP check and the structural bounds.
struct Summary {
    /// `reach[node][i]`: positions applicant `i` takes at leaves below.
    reach: Vec<Vec<u32>>,
    /// `acts_below[node]`: bitmask of applicants acting in the subtree.
    acts_below: Vec<u64>,
}

fn summarize(tree: &MechanismTree) -> Summary {
    let n = tree.n();
    let len = tree.nodes.len();
    let mut reach = vec![vec![0u32; n]; len];
    let mut acts_below = vec![0u64; len];
    // Preorder puts children after parents, so a reverse sweep is bottom-up.
    for id in (0..len).rev() {
        match &tree.nodes[id] {
            Node::Leaf(m) => {
                for (a, r) in reach[id].iter_mut().enumerate() {
                    *r = 1 << m.position_of(a);
                }
            }
            Node::Internal { player, branches } => {
                let mut acc = vec![0u32; n];
                let mut acts = 1u64 << player;
                for b in branches {
                    for (x, y) in acc.iter_mut().zip(&reach[b.child]) {
                        *x |= y;
                    }
                    acts |= acts_below[b.child];
                }
                reach[id] = acc;
                acts_below[id] = acts;
            }
        }
    }
    Summary { reach, acts_below }
}

/// For every type of `player` in `types`, ORs into `out[t]` the positions
/// the player takes at leaves below `id` that are consistent with `t`.
fn collect_positions(tree: &MechanismTree, s: &Summary, id: usize, player: usize, types: &[u32], out: &mut [u32]) {
    if s.acts_below[id] & (1 << player) == 0 {
        let r = s.reach[id][player];
        for &t in types {
            out[t as usize] |= r;
        }
        return;
    }
    if let Node::Internal { player: p, branches } = &tree.nodes[id] {
        for b in branches {
            let sub: &[u32] = if *p == player { &b.types } else { types };
            collect_positions(tree, s, b.child, player, sub, out);
        }
    }
}

/// A leaf below `id`, consistent with type `t` of `player` when given, where
/// the player sits at `position`.
fn find_leaf(tree: &MechanismTree, id: usize, player: usize, t: Option<u32>, position: usize) -> Option<usize> {
    match &tree.nodes[id] {
        Node::Leaf(m) => (m.position_of(player) == position).then_some(id),
        Node::Internal { player: p, branches } => branches
            .iter()
            .filter(|b| *p != player || t.is_none_or(|t| b.types.binary_search(&t).is_ok()))
            .find_map(|b| find_leaf(tree, b.child, player, t, position)),
    }
}

/// Exact obvious-strategyproofness check.
///
/// At every node `h` with player `i` and every `t` in `T_i(h)`, the worst
/// position `i` can end at by following `t`'s branch (over leaves consistent
/// with `t`) must be at least as good under `t` as the best position any
/// other branch can lead to.
pub fn check_osp(tree: &MechanismTree) -> Result<OspReport> {
    tree.validate()?;
    let s = summarize(tree);
    let per_node: Vec<(usize, Vec<Violation>)> = (0..tree.nodes.len())
        .into_par_iter()
        .filter_map(|id| {
            let Node::Internal { player, branches } = &tree.nodes[id] else {
                return None;
            };
            let i = *player;
            let universe = &tree.universe[i];
            let mut found = Vec::new();
            let mut count = 0usize;
            let mut truthful = vec![0u32; universe.len()];
            for (k, b) in branches.iter().enumerate() {
                collect_positions(tree, &s, b.child, i, &b.types, &mut truthful);
                let others: u32 = branches
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != k)
                    .fold(0, |acc, (_, c)| acc | s.reach[c.child][i]);
                for &t in &b.types {
                    let order = &universe[t as usize];
                    let (Some(worst), Some(best)) = (order.worst_in(truthful[t as usize]), order.favorite_in(others)) else {
                        continue;
                    };
                    if order.prefers(best, worst) {
                        count += 1;
                        if found.len() < MAX_REPORTED_VIOLATIONS {
                            let truthful_leaf = find_leaf(tree, b.child, i, Some(t), worst).expect("worst position is reached");
                            let deviating_leaf = branches
                                .iter()
                                .enumerate()
                                .filter(|&(j, _)| j != k)
                                .find_map(|(_, c)| find_leaf(tree, c.child, i, None, best))
                                .expect("best position is reached");
                            found.push(Violation { node: id, player: i, type_id: t, truthful_leaf, deviating_leaf });
                        }
                    }
                }
            }
            (count > 0).then_some((count, found))
        })
        .collect();
    let violation_count = per_node.iter().map(|(c, _)| c).sum();
    let violations = per_node
        .into_iter()
        .flat_map(|(_, v)| v)
        .take(MAX_REPORTED_VIOLATIONS)
        .collect();
    Ok(OspReport { violation_count, violations })
}

/// The same mechanism on a smaller environment: applicant `i` keeps only the
/// universe entries listed in `keep[i]` (renumbered in that order) and
/// branches left without types are dropped.
pub fn prune(tree: &MechanismTree, keep: &[Vec<u32>]) -> Result<MechanismTree> {
    if keep.len() != tree.n() {
        return Err(Error::SizeMismatch { expected: tree.n(), found: keep.len() });
    }
    let mut renumber: Vec<HashMap<u32, u32>> = Vec::with_capacity(keep.len());
    let mut universe = Vec::with_capacity(keep.len());
    for (a, k) in keep.iter().enumerate() {
        if k.is_empty() {
            return Err(Error::Precondition(format!("applicant {} keeps no types", applicant_name(a))));
        }
        let mut map = HashMap::new();
        for (new, &old) in k.iter().enumerate() {
            let order = tree.universe[a]
                .get(old as usize)
                .ok_or_else(|| Error::Precondition(format!("type id {old} out of range")))?;
            if map.insert(old, new as u32).is_some() {
                return Err(Error::Precondition(format!("type id {old} kept twice")));
            }
            universe.push((a, order.clone()));
        }
        renumber.push(map);
    }
    let universe: Vec<Vec<Order>> = (0..tree.n())
        .map(|a| universe.iter().filter(|(b, _)| *b == a).map(|(_, o)| o.clone()).collect())
        .collect();
    let mut nodes = Vec::new();
    prune_into(tree, 0, &renumber, &mut nodes);
    MechanismTree::new(tree.n(), universe, nodes)
}

fn prune_into(tree: &MechanismTree, id: usize, renumber: &[HashMap<u32, u32>], nodes: &mut Vec<Node>) -> usize {
    let me = nodes.len();
    match &tree.nodes[id] {
        Node::Leaf(m) => nodes.push(Node::Leaf(m.clone())),
        Node::Internal { player, branches } => {
            nodes.push(Node::Internal { player: *player, branches: Vec::new() });
            let mut kept = Vec::new();
            for b in branches {
                let mut types: Vec<u32> = b.types.iter().filter_map(|t| renumber[*player].get(t).copied()).collect();
                if types.is_empty() {
                    continue;
                }
                types.sort_unstable();
                let child = prune_into(tree, b.child, renumber, nodes);
                kept.push(Branch { types, child });
            }
            nodes[me] = Node::Internal { player: *player, branches: kept };
        }
    }
    me
}

/// Largest number of times one applicant acts on a root-to-leaf path.
pub fn max_actions_per_path(tree: &MechanismTree) -> usize {
    let n = tree.n();
    let mut best = 0;
    let mut stack = vec![(0usize, vec![0usize; n])];
    while let Some((id, counts)) = stack.pop() {
        best = best.max(counts.iter().copied().max().unwrap_or(0));
        if let Node::Internal { player, branches } = &tree.nodes[id] {
            let mut c = counts;
            c[*player] += 1;
            best = best.max(c[*player]);
            for b in branches {
                stack.push((b.child, c.clone()));
            }
        }
    }
    best
}

/// Largest number of applicants that are active at one node: they act there
/// or acted above it, and their final position still varies below it.
pub fn max_active(tree: &MechanismTree) -> usize {
    let s = summarize(tree);
    let mut best = 0;
    let mut stack = vec![(0usize, 0u64)];
    while let Some((id, acted_above)) = stack.pop() {
        if let Node::Internal { player, branches } = &tree.nodes[id] {
            let acted = acted_above | (1 << player);
            let active = (0..tree.n())
                .filter(|&a| acted & (1 << a) != 0 && s.reach[id][a].count_ones() > 1)
                .count();
            best = best.max(active);
            for b in branches {
                stack.push((b.child, acted));
            }
        }
    }
    best
}

/// Applicants report their full ranking one after another in `order`; each
/// leaf holds the deferred-acceptance outcome under `q`.
pub fn direct_revelation(q: &PrioritySet, order: &[usize]) -> Result<MechanismTree> {
    let n = q.n();
    let universe = MechanismTree::full_universe(n);
    let mut nodes = Vec::new();
    let mut ids = vec![0u32; n];
    reveal_into(q, &universe, order, &mut ids, &mut nodes);
    MechanismTree::new(n, universe, nodes)
}

fn reveal_into(q: &PrioritySet, universe: &[Vec<Order>], order: &[usize], ids: &mut Vec<u32>, nodes: &mut Vec<Node>) -> usize {
    let me = nodes.len();
    match order.split_first() {
        None => {
            let p = PreferenceProfile::new(ids.iter().enumerate().map(|(a, &t)| universe[a][t as usize].clone()).collect())
                .expect("complete orders");
            nodes.push(Node::Leaf(run_da(q, &p).expect("sizes agree")));
        }
        Some((&i, rest)) => {
            nodes.push(Node::Internal { player: i, branches: Vec::new() });
            let mut branches = Vec::new();
            for t in 0..universe[i].len() as u32 {
                ids[i] = t;
                let child = reveal_into(q, universe, rest, ids, nodes);
                branches.push(Branch { types: vec![t], child });
            }
            nodes[me] = Node::Internal { player: i, branches };
        }
    }
    me
}

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    n: usize,
    universe: Vec<Vec<Vec<usize>>>,
    nodes: Vec<NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Internal { player: usize, children: Vec<BranchDoc> },
    Leaf { leaf: Vec<usize> },
}

#[derive(Serialize, Deserialize)]
struct BranchDoc {
    types: Vec<u32>,
    child: usize,
}

impl MechanismTree {
    /// JSON with 0-based indices: universe orders as rankings, nodes in
    /// preorder, leaves as applicant-to-position arrays.
    pub fn to_json(&self) -> String {
        let doc = TreeDoc {
            n: self.n,
            universe: self
                .universe
                .iter()
                .map(|u| u.iter().map(|o| o.ranking().collect()).collect())
                .collect(),
            nodes: self
                .nodes
                .iter()
                .map(|node| match node {
                    Node::Leaf(m) => NodeDoc::Leaf { leaf: m.applicant_positions() },
                    Node::Internal { player, branches } => NodeDoc::Internal {
                        player: *player,
                        children: branches
                            .iter()
                            .map(|b| BranchDoc { types: b.types.clone(), child: b.child })
                            .collect(),
                    },
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("tree serializes")
    }

    /// Parses and validates a tree written by [`MechanismTree::to_json`].
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: TreeDoc = serde_json::from_str(text)?;
        let universe = doc
            .universe
            .into_iter()
            .map(|u| u.into_iter().map(Order::new).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let nodes = doc
            .nodes
            .into_iter()
            .map(|node| {
                Ok(match node {
                    NodeDoc::Leaf { leaf } => Node::Leaf(Matching::from_applicant_positions(leaf)?),
                    NodeDoc::Internal { player, children } => Node::Internal {
                        player,
                        branches: children.into_iter().map(|b| Branch { types: b.types, child: b.child }).collect(),
                    },
                })
            })
            .collect::<Result<Vec<_>>>()?;
        MechanismTree::new(doc.n, universe, nodes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::patterns::three_cycle;

    fn single_leaf() -> MechanismTree {
        let m = Matching::from_applicant_positions(vec![0]).unwrap();
        MechanismTree::new(1, MechanismTree::full_universe(1), vec![Node::Leaf(m)]).unwrap()
    }

    #[test]
    fn single_leaf_tree() {
        let t = single_leaf();
        let p = PreferenceProfile::from_one_based(&[&[1]]).unwrap();
        assert_eq!(t.execute(&p).unwrap(), Matching::from_applicant_positions(vec![0]).unwrap());
        assert!(check_osp(&t).unwrap().ok());
    }

    #[test]
    fn overlapping_children_rejected() {
        let m = |v: Vec<usize>| Node::Leaf(Matching::from_applicant_positions(v).unwrap());
        let nodes = vec![
            Node::Internal {
                player: 0,
                branches: vec![
                    Branch { types: vec![0, 1], child: 1 },
                    Branch { types: vec![1], child: 2 },
                ],
            },
            m(vec![0, 1]),
            m(vec![1, 0]),
        ];
        let err = MechanismTree::new(2, MechanismTree::full_universe(2), nodes).unwrap_err();
        assert!(matches!(err, Error::InvalidTree { node: 0, .. }));
    }

    #[test]
    fn direct_revelation_of_cyclic_priorities_is_not_obvious() {
        let q = three_cycle();
        let t = direct_revelation(&q, &[0, 1, 2]).unwrap();
        assert!(check_implements(&t, &q, &CheckMode::Exhaustive).unwrap().ok());
        let report = check_osp(&t).unwrap();
        assert!(!report.ok());
        let v = &report.violations[0];
        assert_eq!(v.node, 0);
        let order = &t.universe()[v.player][v.type_id as usize];
        let worst = t.leaf_matching(v.truthful_leaf).position_of(v.player);
        let best = t.leaf_matching(v.deviating_leaf).position_of(v.player);
        assert!(order.prefers(best, worst));
    }

    #[test]
    fn json_round_trip() {
        let t = direct_revelation(&three_cycle(), &[2, 0, 1]).unwrap();
        assert_eq!(MechanismTree::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn constant_tree_fails_implementation() {
        let q = three_cycle();
        let m = Matching::from_applicant_positions(vec![0, 1, 2]).unwrap();
        let t = MechanismTree::new(3, MechanismTree::full_universe(3), vec![Node::Leaf(m)]).unwrap();
        let r = check_implements(&t, &q, &CheckMode::Exhaustive).unwrap();
        assert!(!r.ok());
        let c = r.counterexample.unwrap();
        assert_eq!(run_da(&q, &c.profile).unwrap(), c.da_outcome);
    }
}
