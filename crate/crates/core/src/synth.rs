//! Builds an obviously strategyproof implementation of deferred acceptance
//! for limited-cyclic priorities.
//!
//! The first block of the residual market is resolved by a gadget, the
//! resolved applicants and positions are removed and the residual market is
//! classified again:
//!
//! * a single applicant picks their favorite remaining position;
//! * a pair trades: the first may clinch any position where they have top
//!   priority or pass, after which the second takes their favorite;
//! * a larger alternating block runs the lurker gadget, where at most three
//!   of its applicants are undecided at once.

use std::collections::BTreeMap;

use crate::classify::{classify, TaaLabeling};
use crate::error::{Error, Result};
use crate::market::{restrict, Matching, PrioritySet, Restriction};
use crate::mechanism::{Branch, MechanismTree, Node};
use crate::order::{all_orders, Order};

/// Largest market accepted by [`synthesize`]; every applicant's universe
/// holds `n!` orders.
pub const SYNTH_LIMIT: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Choice {
    Clinch(usize),
    Pass,
}

#[derive(Clone)]
struct State {
    assigned: Vec<Option<usize>>,
    types: Vec<Vec<u32>>,
}

impl State {
    fn with(mut self, pairs: &[(usize, usize)]) -> Self {
        for &(a, x) in pairs {
            self.assigned[a] = Some(x);
        }
        self
    }
}

type Cont<'c> = &'c dyn Fn(&mut Builder, State, Choice) -> usize;

struct Builder<'q> {
    q: &'q PrioritySet,
    orders: Vec<Order>,
    nodes: Vec<Node>,
}

fn mask(items: &[usize]) -> u32 {
    items.iter().fold(0, |m, &x| m | (1 << x))
}

impl Builder<'_> {
    /// Lets `player` choose among the groups produced by `choose`; a node is
    /// emitted only when at least two groups are nonempty.
    fn act(&mut self, st: State, player: usize, choose: impl Fn(&Order) -> Choice, cont: Cont) -> usize {
        let mut groups: BTreeMap<Choice, Vec<u32>> = BTreeMap::new();
        for &t in &st.types[player] {
            groups.entry(choose(&self.orders[t as usize])).or_default().push(t);
        }
        if groups.len() == 1 {
            let choice = *groups.keys().next().expect("one group");
            return cont(self, st, choice);
        }
        let me = self.nodes.len();
        self.nodes.push(Node::Internal { player, branches: Vec::new() });
        let mut branches = Vec::with_capacity(groups.len());
        for (choice, types) in groups {
            let mut child_state = st.clone();
            child_state.types[player] = types.clone();
            let child = cont(self, child_state, choice);
            branches.push(Branch { types, child });
        }
        self.nodes[me] = Node::Internal { player, branches };
        me
    }

    fn fresh(&mut self, st: State) -> usize {
        let n = self.q.n();
        let applicants: Vec<usize> = (0..n).filter(|&a| st.assigned[a].is_none()).collect();
        if applicants.is_empty() {
            let positions = st.assigned.iter().map(|x| x.expect("all assigned")).collect();
            let me = self.nodes.len();
            self.nodes.push(Node::Leaf(Matching::from_applicant_positions(positions).expect("assignment is a bijection")));
            return me;
        }
        let taken = mask(&st.assigned.iter().flatten().copied().collect::<Vec<_>>());
        let positions: Vec<usize> = (0..n).filter(|&x| taken & (1 << x) == 0).collect();
        let r = Restriction::new(applicants.clone(), positions.clone(), n).expect("balanced residual");
        let sub = restrict(self.q, &r).expect("residual fits");
        let c = classify(&sub);
        let blocks = c.partition.expect("restrictions of limited-cyclic priorities are limited cyclic");
        let block: Vec<usize> = blocks[0].iter().map(|&a| applicants[a]).collect();
        let rest = mask(&positions);
        match block.len() {
            1 => self.serial(st, block[0], rest),
            2 => {
                let (a, b) = (block[0], block[1]);
                let u = positions.iter().filter(|&&x| self.q.list(x).prefers(a, b)).fold(0, |m, &x| m | (1 << x));
                self.trade(st, a, b, u, rest)
            }
            _ => {
                let (_, local) = c.block_labelings.iter().find(|(i, _)| *i == 0).expect("large block has a labeling");
                let lab = TaaLabeling {
                    applicants: local.applicants.iter().map(|&a| applicants[a]).collect(),
                    x_positions: local.x_positions.iter().map(|&x| positions[x]).collect(),
                    u_position: positions[local.u_position],
                    v_position: positions[local.v_position],
                };
                self.lurker(st, &lab, rest)
            }
        }
    }

    fn serial(&mut self, st: State, a: usize, rest: u32) -> usize {
        self.act(
            st,
            a,
            |t| Choice::Clinch(t.favorite_in(rest).expect("positions remain")),
            &|b: &mut Builder, st: State, c: Choice| match c {
                Choice::Clinch(x) => b.fresh(st.with(&[(a, x)])),
                Choice::Pass => unreachable!("serial choice never passes"),
            },
        )
    }

    /// `u`: positions where `a` outranks `b`.
    fn trade(&mut self, st: State, a: usize, b: usize, u: u32, rest: u32) -> usize {
        self.act(
            st,
            a,
            |t| {
                let fav = t.favorite_in(rest).expect("positions remain");
                if u & (1 << fav) != 0 {
                    Choice::Clinch(fav)
                } else {
                    Choice::Pass
                }
            },
            &|bl: &mut Builder, st: State, c: Choice| match c {
                Choice::Clinch(x) => bl.fresh(st.with(&[(a, x)])),
                Choice::Pass => bl.serial(st, b, rest),
            },
        )
    }

    fn lurker(&mut self, st: State, lab: &TaaLabeling, rest: u32) -> usize {
        let (a1, a2, a3) = (lab.applicants[0], lab.applicants[1], lab.applicants[2]);
        let (u, v) = (lab.u_position, lab.v_position);
        let fav = move |t: &Order, m: u32| t.favorite_in(m).expect("positions remain");
        let without_v = rest & !(1 << v);
        let without_u = rest & !(1 << u);

        // Fourth step: a2 was displaced from u by a3 and chooses again.
        let step4 = move |bl: &mut Builder, st: State| {
            bl.act(st, a2, |t| Choice::Clinch(fav(t, without_u)), &|bl: &mut Builder, st: State, c: Choice| match c {
                Choice::Clinch(x) if x == v => bl.fresh(st.with(&[(a2, v)])),
                Choice::Clinch(x) => bl.fresh(st.with(&[(a2, x), (a1, v), (a3, u)])),
                Choice::Pass => unreachable!(),
            })
        };
        // Third step: a1 holds v and a2 holds u; a3 may clinch elsewhere.
        let step3 = move |bl: &mut Builder, st: State| {
            bl.act(
                st,
                a3,
                |t| match fav(t, without_v) {
                    x if x == u => Choice::Pass,
                    x => Choice::Clinch(x),
                },
                &|bl: &mut Builder, st: State, c: Choice| match c {
                    Choice::Clinch(x) => bl.fresh(st.with(&[(a1, v), (a2, u), (a3, x)])),
                    Choice::Pass => step4(bl, st),
                },
            )
        };
        // Second step: a1 wants v, where only a2 outranks them.
        let step2 = move |bl: &mut Builder, st: State| {
            bl.act(
                st,
                a2,
                |t| match fav(t, rest) {
                    x if x == u => Choice::Pass,
                    x => Choice::Clinch(x),
                },
                &|bl: &mut Builder, st: State, c: Choice| match c {
                    Choice::Clinch(x) if x == v => bl.fresh(st.with(&[(a2, v)])),
                    Choice::Clinch(x) => bl.fresh(st.with(&[(a2, x), (a1, v)])),
                    Choice::Pass => step3(bl, st),
                },
            )
        };
        self.act(
            st,
            a1,
            |t| match fav(t, rest) {
                x if x == v => Choice::Pass,
                x => Choice::Clinch(x),
            },
            &|bl: &mut Builder, st: State, c: Choice| match c {
                Choice::Clinch(x) => bl.fresh(st.with(&[(a1, x)])),
                Choice::Pass => step2(bl, st),
            },
        )
    }
}

/// An obviously strategyproof tree implementing deferred acceptance under
/// `q` on the full environment (every applicant may hold any order).
pub fn synthesize(q: &PrioritySet) -> Result<MechanismTree> {
    let n = q.n();
    if n > SYNTH_LIMIT {
        return Err(Error::TooLarge { n, limit: SYNTH_LIMIT });
    }
    let c = classify(q);
    if !c.is_limited_cyclic() {
        return Err(Error::NotLimitedCyclic { witness: c.witness.map(|w| w.describe()) });
    }
    let orders = all_orders(n);
    let all: Vec<u32> = (0..orders.len() as u32).collect();
    let mut builder = Builder { q, orders, nodes: Vec::new() };
    let root = State { assigned: vec![None; n], types: vec![all; n] };
    builder.fresh(root);
    Ok(MechanismTree::from_parts_unchecked(n, MechanismTree::full_universe(n), builder.nodes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::PreferenceProfile;
    use crate::mechanism::{check_implements, check_osp, max_actions_per_path, max_active, CheckMode};
    use crate::patterns::{cyclic_osp_3x3, three_cycle};

    fn profile(rows: &[&[usize]]) -> PreferenceProfile {
        PreferenceProfile::from_one_based(rows).unwrap()
    }

    #[test]
    fn small_cyclic_example() {
        let q = cyclic_osp_3x3();
        let t = synthesize(&q).unwrap();
        t.validate().unwrap();
        match &t.nodes()[0] {
            Node::Internal { player, branches } => {
                assert_eq!(*player, 0);
                assert_eq!(branches.len(), 3);
            }
            Node::Leaf(_) => panic!("root is a leaf"),
        }
        let p = profile(&[&[3, 1, 2], &[1, 2, 3], &[2, 3, 1]]);
        assert_eq!(t.execute(&p).unwrap(), Matching::from_applicant_positions(vec![2, 0, 1]).unwrap());
        let p = profile(&[&[3], &[2], &[1]]);
        assert_eq!(t.execute(&p).unwrap(), Matching::from_applicant_positions(vec![2, 1, 0]).unwrap());
        assert!(check_implements(&t, &q, &CheckMode::Exhaustive).unwrap().ok());
        assert!(check_osp(&t).unwrap().ok());
        assert!(max_actions_per_path(&t) <= 2);
        assert!(max_active(&t) <= 3);
    }

    #[test]
    fn single_applicant_is_one_leaf() {
        let t = synthesize(&PrioritySet::from_letters(&["a"]).unwrap()).unwrap();
        assert_eq!(t.node_count(), 1);
    }

    #[test]
    fn refuses_forbidden_patterns() {
        let err = synthesize(&three_cycle()).unwrap_err();
        assert!(matches!(err, Error::NotLimitedCyclic { witness: Some(_) }));
    }
}
