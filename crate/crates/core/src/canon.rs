//! Canonical forms up to relabeling, and exhaustive enumeration of priority
//! sets.

use itertools::Itertools;

use crate::market::PrioritySet;
use crate::order::{all_orders, factorial, Order};

/// Canonical representative of `q` under relabeling of applicants and of
/// positions.
///
/// Every applicant relabeling is tried; the relabeled lists are sorted (so
/// positions act as an unordered multiset) and the lexicographically least
/// result is kept.
pub fn canonical_form(q: &PrioritySet) -> PrioritySet {
    let n = q.n();
    let rows: Vec<&[u8]> = q.lists().iter().map(|l| l.ranking_bytes()).collect();
    let mut best: Option<Vec<Vec<u8>>> = None;
    let mut scratch: Vec<Vec<u8>> = vec![vec![0u8; n]; n];
    for perm in (0..n as u8).permutations(n) {
        for (dst, src) in scratch.iter_mut().zip(&rows) {
            for (d, &s) in dst.iter_mut().zip(src.iter()) {
                *d = perm[s as usize];
            }
        }
        scratch.sort_unstable();
        if best.as_ref().is_none_or(|b| scratch < *b) {
            best = Some(scratch.clone());
        }
    }
    let lists = best
        .unwrap_or_default()
        .into_iter()
        .map(Order::from_ranking_unchecked)
        .collect();
    PrioritySet::from_lists_unchecked(lists)
}

/// Number of priority sets of size `n`, `(n!)^n`, when it fits in a `u64`.
pub fn priority_set_count(n: usize) -> Option<u64> {
    (factorial(n) as u64).checked_pow(n as u32)
}

/// Iterator over all `(n!)^n` priority sets of size `n`.
///
/// Set number `i` takes its mixed-radix digits (base `n!`, position 0 most
/// significant) as indices into the lexicographic list of orders, so any
/// index range can be enumerated independently.
#[derive(Clone)]
pub struct PrioritySets {
    n: usize,
    orders: Vec<Order>,
    next: u64,
    end: u64,
}

impl PrioritySets {
    pub fn range(n: usize, start: u64, end: u64) -> Self {
        let total = priority_set_count(n).expect("priority set count overflows u64");
        Self {
            n,
            orders: all_orders(n),
            next: start.min(total),
            end: end.min(total),
        }
    }

    pub fn nth_set(&self, index: u64) -> PrioritySet {
        let base = self.orders.len() as u64;
        let mut digits = vec![0usize; self.n];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = (rest % base) as usize;
            rest /= base;
        }
        PrioritySet::from_lists_unchecked(digits.into_iter().map(|d| self.orders[d].clone()).collect())
    }
}

impl Iterator for PrioritySets {
    type Item = PrioritySet;

    fn next(&mut self) -> Option<PrioritySet> {
        if self.next >= self.end {
            return None;
        }
        let q = self.nth_set(self.next);
        self.next += 1;
        Some(q)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for PrioritySets {}

/// All priority sets of size `n` in a fixed order.
pub fn enumerate_priority_sets(n: usize) -> PrioritySets {
    PrioritySets::range(n, 0, u64::MAX)
}
