//! Structural predicates on priority sets: Ergin cycles, acyclic partitions,
//! two-adjacent-alternating blocks and the limited-cyclic classification.

use itertools::Itertools;

use crate::canon::canonical_form;
use crate::error::{Error, Result};
use crate::market::{restrict, restrictions, PrioritySet, Restriction};
use crate::order::{applicant_name, Order};
use crate::patterns::{forbidden_patterns, pattern_index, ForbiddenPattern};

/// Largest block size handled by the exhaustive labeling search.
pub const TAA_BRUTE_FORCE_LIMIT: usize = 7;

/// `beats[c][a]`: some list ranks `c` above `a`.
fn beats_table(lists: &[Order], k: usize) -> Vec<Vec<bool>> {
    let mut beats = vec![vec![false; k]; k];
    for l in lists {
        for (r, c) in l.ranking().enumerate() {
            for a in l.ranking().skip(r + 1) {
                beats[c][a] = true;
            }
        }
    }
    beats
}

/// Ergin cycle test on lists over a common applicant set.
pub fn lists_are_cyclic(lists: &[Order]) -> bool {
    let Some(k) = lists.first().map(Order::len) else {
        return false;
    };
    let beats = beats_table(lists, k);
    lists.iter().any(|l| {
        (0..k).any(|r| (r + 2..k).any(|s| beats[l.item_at(s)][l.item_at(r)]))
    })
}

/// True iff there are applicants `a, b, c` and positions `i, j` with
/// `a >_i b >_i c` and `c >_j a`.
pub fn is_cyclic(q: &PrioritySet) -> bool {
    lists_are_cyclic(q.lists())
}

/// Ordered partition into blocks of size at most two with unanimous
/// dominance between blocks, or `None` when the lists are cyclic.
pub fn lists_acyclic_partition(lists: &[Order]) -> Option<Vec<Vec<usize>>> {
    let k = lists.first().map_or(0, Order::len);
    let mut removed = vec![false; k];
    let mut left = k;
    let mut blocks = Vec::new();
    while left > 0 {
        let mut heads = lists.iter().map(|l| {
            let mut it = l.ranking().filter(|&a| !removed[a]);
            (it.next().expect("nonempty"), it.next())
        });
        let tops: Vec<usize> = lists
            .iter()
            .map(|l| l.ranking().find(|&a| !removed[a]).expect("nonempty"))
            .sorted()
            .dedup()
            .collect();
        let block = match tops.as_slice() {
            [a] => vec![*a],
            [a, b] => {
                let pair_on_top = heads.all(|(first, second)| {
                    let second = second.expect("two tops imply two applicants");
                    (first == *a && second == *b) || (first == *b && second == *a)
                });
                if !pair_on_top {
                    return None;
                }
                vec![*a, *b]
            }
            _ => return None,
        };
        for &a in &block {
            removed[a] = true;
        }
        left -= block.len();
        blocks.push(block);
    }
    Some(blocks)
}

pub fn acyclic_partition(q: &PrioritySet) -> Option<Vec<Vec<usize>>> {
    lists_acyclic_partition(q.lists())
}

/// Labeling witnessing the two-adjacent-alternating structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TaaLabeling {
    /// `a_1..a_k`: the common order `x` of the majority lists.
    pub applicants: Vec<usize>,
    /// Indices of the lists equal to `x`.
    pub x_positions: Vec<usize>,
    pub u_position: usize,
    pub v_position: usize,
}

impl TaaLabeling {
    fn mapped(&self, applicants: &[usize], positions: &[usize]) -> TaaLabeling {
        TaaLabeling {
            applicants: self.applicants.iter().map(|&a| applicants[a]).collect(),
            x_positions: self.x_positions.iter().map(|&x| positions[x]).collect(),
            u_position: positions[self.u_position],
            v_position: positions[self.v_position],
        }
    }
}

/// The `x`, `u`, `v` rankings induced by a labeling `a_1..a_k`.
pub fn taa_rankings(labels: &[usize]) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let x = labels.to_vec();
    let mut u = labels.to_vec();
    let mut i = 1;
    while i + 1 < u.len() {
        u.swap(i, i + 1);
        i += 2;
    }
    let mut v = labels.to_vec();
    let mut i = 0;
    while i + 1 < v.len() {
        v.swap(i, i + 1);
        i += 2;
    }
    (x, u, v)
}

fn match_labeling(lists: &[Order], labels: &[usize]) -> Option<TaaLabeling> {
    let (x, u, v) = taa_rankings(labels);
    let (mut xs, mut us, mut vs) = (Vec::new(), Vec::new(), Vec::new());
    for (pos, l) in lists.iter().enumerate() {
        if l.ranking().eq(x.iter().copied()) {
            xs.push(pos);
        } else if l.ranking().eq(u.iter().copied()) {
            us.push(pos);
        } else if l.ranking().eq(v.iter().copied()) {
            vs.push(pos);
        } else {
            return None;
        }
    }
    (xs.len() == lists.len() - 2 && us.len() == 1 && vs.len() == 1).then(|| TaaLabeling {
        applicants: x,
        x_positions: xs,
        u_position: us[0],
        v_position: vs[0],
    })
}

fn check_taa_shape(lists: &[Order]) -> Result<usize> {
    let k = lists.first().map_or(0, Order::len);
    if lists.len() < 3 || k < 3 {
        return Err(Error::Precondition(format!(
            "two-adjacent-alternating needs at least 3 lists over at least 3 applicants, got {} over {k}",
            lists.len()
        )));
    }
    if lists.iter().any(|l| l.len() != k) {
        return Err(Error::SizeMismatch { expected: k, found: lists.iter().map(Order::len).find(|&m| m != k).unwrap_or(k) });
    }
    Ok(k)
}

/// Exhaustive search over all `k!` labelings.
pub fn taa_brute_force(lists: &[Order]) -> Result<Option<TaaLabeling>> {
    let k = check_taa_shape(lists)?;
    if k > TAA_BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n: k, limit: TAA_BRUTE_FORCE_LIMIT });
    }
    Ok((0..k).permutations(k).find_map(|labels| match_labeling(lists, &labels)))
}

/// Linear-time detection: the majority list fixes the labeling, which is
/// then verified. With three lists every list is tried as the majority.
pub fn taa_fingerprint(lists: &[Order]) -> Result<Option<TaaLabeling>> {
    check_taa_shape(lists)?;
    let candidates: Vec<&Order> = if lists.len() == 3 {
        lists.iter().collect()
    } else {
        let majority = lists
            .iter()
            .find(|l| lists.iter().filter(|m| m == l).count() == lists.len() - 2);
        majority.into_iter().collect()
    };
    Ok(candidates
        .into_iter()
        .find_map(|x| match_labeling(lists, &x.ranking().collect::<Vec<_>>())))
}

/// Two-adjacent-alternating test on `l >= 3` lists over `k >= 3` applicants.
pub fn lists_two_adjacent_alternating(lists: &[Order]) -> Result<Option<TaaLabeling>> {
    let k = check_taa_shape(lists)?;
    if k <= TAA_BRUTE_FORCE_LIMIT {
        taa_brute_force(lists)
    } else {
        taa_fingerprint(lists)
    }
}

pub fn is_two_adjacent_alternating(q: &PrioritySet) -> Result<Option<TaaLabeling>> {
    lists_two_adjacent_alternating(q.lists())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    LimitedCyclic,
    NotLimitedCyclic,
}

/// A restriction whose canonical form is one of the forbidden patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenWitness {
    pub restriction: Restriction,
    /// Index into [`forbidden_patterns`].
    pub pattern: usize,
}

impl ForbiddenWitness {
    pub fn pattern(&self) -> &'static ForbiddenPattern {
        &forbidden_patterns()[self.pattern]
    }

    pub fn describe(&self) -> String {
        format!("forbidden pattern {} on {}", self.pattern().label(), self.restriction)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Ordered blocks; present iff limited cyclic.
    pub partition: Option<Vec<Vec<usize>>>,
    /// `(block index, labeling)` for every block of size at least three,
    /// in global applicant and position indices.
    pub block_labelings: Vec<(usize, TaaLabeling)>,
    pub witness: Option<ForbiddenWitness>,
}

impl Classification {
    pub fn is_limited_cyclic(&self) -> bool {
        self.verdict == Verdict::LimitedCyclic
    }

    pub fn summary(&self) -> String {
        match (&self.partition, &self.witness) {
            (Some(blocks), _) => {
                let blocks = blocks
                    .iter()
                    .map(|b| format!("{{{}}}", b.iter().map(|&a| applicant_name(a)).join(",")))
                    .join(" > ");
                format!("limited cyclic; blocks {blocks}")
            }
            (None, Some(w)) => format!("not limited cyclic; {}", w.describe()),
            (None, None) => "not limited cyclic".to_string(),
        }
    }
}

/// Finest ordered partition such that two applicants on which some pair of
/// positions disagrees share a block, read off position 0's list.
///
/// Blocks are listed best first and keep position 0's internal order.
pub fn disagreement_partition(q: &PrioritySet) -> Vec<Vec<usize>> {
    let n = q.n();
    let anchor: Vec<usize> = q.list(0).ranking().collect();
    // far[s]: furthest anchor index t > s whose applicant some list ranks
    // above anchor[s].
    let mut far: Vec<usize> = (0..n).collect();
    for (s, &a) in anchor.iter().enumerate() {
        for (t, &b) in anchor.iter().enumerate().skip(s + 1) {
            if q.lists().iter().any(|l| l.prefers(b, a)) {
                far[s] = t;
            }
        }
    }
    let mut blocks = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = far[start];
        let mut s = start;
        while s <= end {
            end = end.max(far[s]);
            s += 1;
        }
        blocks.push(anchor[start..=end].to_vec());
        start = end + 1;
    }
    blocks
}

/// Limited-cyclic classification with its certificate.
pub fn classify(q: &PrioritySet) -> Classification {
    let n = q.n();
    let blocks = disagreement_partition(q);
    let all_positions: Vec<usize> = (0..n).collect();
    let mut labelings = Vec::new();
    let mut ok = true;
    for (index, block) in blocks.iter().enumerate().filter(|(_, b)| b.len() >= 3) {
        let members: Vec<usize> = block.iter().copied().sorted().collect();
        let lists: Vec<Order> = q.lists().iter().map(|l| l.filtered(&members)).collect();
        match lists_two_adjacent_alternating(&lists) {
            Ok(Some(lab)) => labelings.push((index, lab.mapped(&members, &all_positions))),
            _ => {
                ok = false;
                break;
            }
        }
    }
    if ok {
        Classification {
            verdict: Verdict::LimitedCyclic,
            partition: Some(blocks),
            block_labelings: labelings,
            witness: None,
        }
    } else {
        Classification {
            verdict: Verdict::NotLimitedCyclic,
            partition: None,
            block_labelings: Vec::new(),
            witness: scan_forbidden(q),
        }
    }
}

/// First restriction of size 3, then 4, equal up to relabeling to a
/// forbidden pattern.
pub fn scan_forbidden(q: &PrioritySet) -> Option<ForbiddenWitness> {
    let n = q.n();
    (3..=4.min(n)).find_map(|m| {
        restrictions(n, m).find_map(|r| {
            let sub = restrict(q, &r).expect("generated restriction fits");
            // Every forbidden pattern is cyclic; skip the cheap negatives.
            if !is_cyclic(&sub) {
                return None;
            }
            pattern_index(&canonical_form(&sub)).map(|pattern| ForbiddenWitness { restriction: r, pattern })
        })
    })
}
