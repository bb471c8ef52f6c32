//! Strict total orders over `0..n`.
//!
//! An [`Order`] is used both for priorities (a position ranking applicants)
//! and for preferences (an applicant ranking positions).

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use itertools::Itertools;

use crate::error::{Error, Result};

/// Largest market size supported by the compact representation.
pub const MAX_ITEMS: usize = 32;

/// A strict total order, stored as a ranking (best first) together with its
/// inverse permutation.
#[derive(Clone)]
pub struct Order {
    ranking: Vec<u8>,
    rank: Vec<u8>,
}

impl Order {
    pub fn new(ranking: Vec<usize>) -> Result<Self> {
        let n = ranking.len();
        if n > MAX_ITEMS {
            return Err(Error::TooLarge { n, limit: MAX_ITEMS });
        }
        let mut rank = vec![u8::MAX; n];
        for (r, &item) in ranking.iter().enumerate() {
            if item >= n || rank[item] != u8::MAX {
                return Err(Error::NotAPermutation { n, ranking });
            }
            rank[item] = r as u8;
        }
        Ok(Self {
            ranking: ranking.into_iter().map(|x| x as u8).collect(),
            rank,
        })
    }

    pub(crate) fn from_ranking_unchecked(ranking: Vec<u8>) -> Self {
        let mut rank = vec![0u8; ranking.len()];
        for (r, &item) in ranking.iter().enumerate() {
            rank[item as usize] = r as u8;
        }
        Self { ranking, rank }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_ranking_unchecked((0..n as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.ranking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranking.is_empty()
    }

    /// Items from most to least preferred.
    pub fn ranking(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.ranking.iter().map(|&x| x as usize)
    }

    pub fn ranking_bytes(&self) -> &[u8] {
        &self.ranking
    }

    pub fn item_at(&self, r: usize) -> usize {
        self.ranking[r] as usize
    }

    /// Position of `item` in the ranking; 0 is best.
    pub fn rank_of(&self, item: usize) -> usize {
        self.rank[item] as usize
    }

    pub fn prefers(&self, x: usize, y: usize) -> bool {
        self.rank[x] < self.rank[y]
    }

    pub fn top(&self) -> usize {
        self.ranking[0] as usize
    }

    /// Most preferred item among those whose bit is set in `mask`.
    pub fn favorite_in(&self, mask: u32) -> Option<usize> {
        self.ranking
            .iter()
            .map(|&x| x as usize)
            .find(|&x| mask & (1 << x) != 0)
    }

    /// Least preferred item among those whose bit is set in `mask`.
    pub fn worst_in(&self, mask: u32) -> Option<usize> {
        self.ranking
            .iter()
            .rev()
            .map(|&x| x as usize)
            .find(|&x| mask & (1 << x) != 0)
    }

    /// The induced order on `subset` (sorted ascending), relabeled so that
    /// `subset[k]` becomes `k`.
    pub fn filtered(&self, subset: &[usize]) -> Order {
        let mut local = vec![u8::MAX; self.len()];
        for (k, &item) in subset.iter().enumerate() {
            local[item] = k as u8;
        }
        let ranking = self
            .ranking
            .iter()
            .filter_map(|&x| {
                let l = local[x as usize];
                (l != u8::MAX).then_some(l)
            })
            .collect();
        Order::from_ranking_unchecked(ranking)
    }

    /// Renames every item `x` to `perm[x]`.
    pub fn relabeled(&self, perm: &[usize]) -> Order {
        Order::from_ranking_unchecked(self.ranking.iter().map(|&x| perm[x as usize] as u8).collect())
    }

    /// Completes a partial ranking by appending the missing items in
    /// ascending order.
    pub fn completed(n: usize, prefix: &[usize]) -> Result<Order> {
        let mut ranking = prefix.to_vec();
        ranking.extend((0..n).filter(|x| !prefix.contains(x)));
        Order::new(ranking)
    }
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.ranking == other.ranking
    }
}

impl Eq for Order {}

impl Hash for Order {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ranking.hash(state);
    }
}

impl PartialOrd for Order {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Order {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ranking.cmp(&other.ranking)
    }
}

impl fmt::Debug for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Order{:?}", self.ranking)
    }
}

/// All `n!` orders over `0..n` in lexicographic order of their rankings.
pub fn all_orders(n: usize) -> Vec<Order> {
    (0..n as u8)
        .permutations(n)
        .map(Order::from_ranking_unchecked)
        .collect()
}

/// Index of `order` within [`all_orders`] (its lexicographic rank).
pub fn lex_index(order: &Order) -> usize {
    let n = order.len();
    let mut used = 0u32;
    let mut index = 0usize;
    for (i, &x) in order.ranking.iter().enumerate() {
        let smaller_unused = (0..x).filter(|&y| used & (1 << y) == 0).count();
        index = index * (n - i) + smaller_unused;
        used |= 1 << x;
    }
    index
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Letter name of applicant `a` (`0 -> 'a'`).
pub fn applicant_name(a: usize) -> char {
    (b'a' + a as u8) as char
}

/// Renders an order over applicants as letters, e.g. `abc`.
pub fn applicant_string(order: &Order) -> String {
    order.ranking().map(applicant_name).collect()
}
