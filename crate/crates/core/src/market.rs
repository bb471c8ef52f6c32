//! Balanced one-to-one matching markets: priorities, preferences, matchings
//! and restrictions to sub-markets.

use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::order::{applicant_name, applicant_string, Order, MAX_ITEMS};

/// One priority list over applicants per position. `lists[x]` is position
/// `x`'s ranking; every list is complete.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrioritySet {
    lists: Vec<Order>,
}

impl PrioritySet {
    pub fn new(lists: Vec<Order>) -> Result<Self> {
        let n = lists.len();
        if n == 0 {
            return Err(Error::Precondition("a market needs at least one position".into()));
        }
        if n > MAX_ITEMS {
            return Err(Error::TooLarge { n, limit: MAX_ITEMS });
        }
        if let Some(bad) = lists.iter().find(|l| l.len() != n) {
            return Err(Error::SizeMismatch { expected: n, found: bad.len() });
        }
        Ok(Self { lists })
    }

    /// Builds a priority set from rows of applicant letters, e.g.
    /// `["abc", "bca", "cab"]`.
    pub fn from_letters(rows: &[&str]) -> Result<Self> {
        let lists = rows
            .iter()
            .map(|row| {
                let ranking = row
                    .chars()
                    .filter(|c| !c.is_whitespace())
                    .map(|c| {
                        if c.is_ascii_lowercase() {
                            Ok((c as u8 - b'a') as usize)
                        } else {
                            Err(Error::Parse(format!("bad applicant letter {c:?}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()?;
                Order::new(ranking)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(lists)
    }

    pub fn n(&self) -> usize {
        self.lists.len()
    }

    pub fn lists(&self) -> &[Order] {
        &self.lists
    }

    pub fn list(&self, position: usize) -> &Order {
        &self.lists[position]
    }

    /// Renames applicant `a` to `applicants[a]` and moves position `x`'s list
    /// to slot `positions[x]`.
    pub fn relabeled(&self, applicants: &[usize], positions: &[usize]) -> PrioritySet {
        let mut lists = vec![Order::identity(0); self.n()];
        for (x, list) in self.lists.iter().enumerate() {
            lists[positions[x]] = list.relabeled(applicants);
        }
        PrioritySet { lists }
    }

    pub(crate) fn from_lists_unchecked(lists: Vec<Order>) -> Self {
        Self { lists }
    }

    /// Rows as letter strings, one per position.
    pub fn rows(&self) -> Vec<String> {
        self.lists.iter().map(applicant_string).collect()
    }
}

impl fmt::Debug for PrioritySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (x, row) in self.rows().iter().enumerate() {
            if x > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", x + 1, row)?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for PrioritySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.rows().join(","))
    }
}

/// Reported preferences, one order over positions per applicant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PreferenceProfile {
    prefs: Vec<Order>,
}

impl PreferenceProfile {
    pub fn new(prefs: Vec<Order>) -> Result<Self> {
        let n = prefs.len();
        if n > MAX_ITEMS {
            return Err(Error::TooLarge { n, limit: MAX_ITEMS });
        }
        if let Some(bad) = prefs.iter().find(|p| p.len() != n) {
            return Err(Error::SizeMismatch { expected: n, found: bad.len() });
        }
        Ok(Self { prefs })
    }

    /// Builds a profile from 1-based position rankings; partial rankings are
    /// completed by appending the missing positions in ascending order.
    pub fn from_one_based(rows: &[&[usize]]) -> Result<Self> {
        let n = rows.len();
        let prefs = rows
            .iter()
            .map(|row| {
                let zero: Vec<usize> = row
                    .iter()
                    .map(|&p| p.checked_sub(1).ok_or_else(|| Error::Parse("positions are 1-based".into())))
                    .collect::<Result<_>>()?;
                Order::completed(n, &zero)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(prefs)
    }

    pub fn n(&self) -> usize {
        self.prefs.len()
    }

    pub fn prefs(&self) -> &[Order] {
        &self.prefs
    }

    pub fn pref(&self, applicant: usize) -> &Order {
        &self.prefs[applicant]
    }

    pub fn with_pref(&self, applicant: usize, pref: Order) -> PreferenceProfile {
        let mut prefs = self.prefs.clone();
        prefs[applicant] = pref;
        PreferenceProfile { prefs }
    }
}

impl fmt::Debug for PreferenceProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (a, p) in self.prefs.iter().enumerate() {
            if a > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:", applicant_name(a))?;
            for x in p.ranking() {
                write!(f, "{}", x + 1)?;
            }
        }
        write!(f, "}}")
    }
}

/// A perfect matching between applicants and positions.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matching {
    applicant_to_position: Vec<u8>,
    position_to_applicant: Vec<u8>,
}

impl Matching {
    pub fn from_applicant_positions(positions: Vec<usize>) -> Result<Self> {
        let order = Order::new(positions.clone())?;
        let inverse = (0..positions.len()).map(|x| order.rank_of(x) as u8).collect();
        Ok(Self {
            applicant_to_position: positions.into_iter().map(|x| x as u8).collect(),
            position_to_applicant: inverse,
        })
    }

    pub fn n(&self) -> usize {
        self.applicant_to_position.len()
    }

    pub fn position_of(&self, applicant: usize) -> usize {
        self.applicant_to_position[applicant] as usize
    }

    pub fn applicant_at(&self, position: usize) -> usize {
        self.position_to_applicant[position] as usize
    }

    pub fn applicant_positions(&self) -> Vec<usize> {
        self.applicant_to_position.iter().map(|&x| x as usize).collect()
    }
}

impl fmt::Debug for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs = self
            .applicant_to_position
            .iter()
            .enumerate()
            .map(|(a, &x)| format!("({},{})", applicant_name(a), x + 1))
            .join(",");
        write!(f, "{{{pairs}}}")
    }
}

/// Equal-size subsets of applicants and positions, both sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Restriction {
    applicants: Vec<usize>,
    positions: Vec<usize>,
}

impl Restriction {
    pub fn new(mut applicants: Vec<usize>, mut positions: Vec<usize>, n: usize) -> Result<Self> {
        applicants.sort_unstable();
        positions.sort_unstable();
        if applicants.len() != positions.len() {
            return Err(Error::InvalidRestriction(format!(
                "|S| = {} but |T| = {}",
                applicants.len(),
                positions.len()
            )));
        }
        if applicants.is_empty() {
            return Err(Error::InvalidRestriction("empty restriction".into()));
        }
        for set in [&applicants, &positions] {
            if set.windows(2).any(|w| w[0] == w[1]) || set.iter().any(|&x| x >= n) {
                return Err(Error::InvalidRestriction(format!("{set:?} is not a subset of 0..{n}")));
            }
        }
        Ok(Self { applicants, positions })
    }

    pub fn full(n: usize) -> Self {
        Self { applicants: (0..n).collect(), positions: (0..n).collect() }
    }

    pub fn applicants(&self) -> &[usize] {
        &self.applicants
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    pub fn size(&self) -> usize {
        self.applicants.len()
    }

    /// Maps a restriction of `restrict(q, self)` back to indices of `q`.
    pub fn compose(&self, inner: &Restriction) -> Restriction {
        Restriction {
            applicants: inner.applicants.iter().map(|&a| self.applicants[a]).collect(),
            positions: inner.positions.iter().map(|&x| self.positions[x]).collect(),
        }
    }
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "applicants {{{}}} positions {{{}}}",
            self.applicants.iter().map(|&a| applicant_name(a)).join(","),
            self.positions.iter().map(|&x| x + 1).join(",")
        )
    }
}

/// The priority set induced on `r`'s applicants and positions; indices are
/// renumbered `0..m` in ascending order.
pub fn restrict(q: &PrioritySet, r: &Restriction) -> Result<PrioritySet> {
    let n = q.n();
    if r.applicants.iter().chain(&r.positions).any(|&x| x >= n) {
        return Err(Error::InvalidRestriction(format!("{r} does not fit a market of size {n}")));
    }
    if r.applicants.len() != r.positions.len() {
        return Err(Error::InvalidRestriction("|S| != |T|".into()));
    }
    Ok(PrioritySet {
        lists: r.positions.iter().map(|&x| q.list(x).filtered(&r.applicants)).collect(),
    })
}

/// All `C(n, m)^2` restrictions of size `m`, applicant subsets outermost, both
/// in lexicographic order.
pub fn restrictions(n: usize, m: usize) -> impl Iterator<Item = Restriction> {
    let subsets: Vec<Vec<usize>> = if m <= n { (0..n).combinations(m).collect() } else { Vec::new() };
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = subsets
        .iter()
        .cartesian_product(subsets.iter())
        .map(|(s, t)| (s.clone(), t.clone()))
        .collect();
    pairs
        .into_iter()
        .map(|(applicants, positions)| Restriction { applicants, positions })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_applicant_pattern() -> PrioritySet {
        PrioritySet::from_letters(&["abcd", "abdc", "acbd", "bacd"]).unwrap()
    }

    #[test]
    fn restrict_four_applicant_pattern_to_first_three() {
        let r = Restriction::new(vec![0, 1, 2], vec![0, 1, 2], 4).unwrap();
        let sub = restrict(&four_applicant_pattern(), &r).unwrap();
        assert_eq!(sub, PrioritySet::from_letters(&["abc", "abc", "acb"]).unwrap());
    }

    #[test]
    fn identity_restriction_is_noop() {
        let q = four_applicant_pattern();
        assert_eq!(restrict(&q, &Restriction::full(4)).unwrap(), q);
    }

    #[test]
    fn singleton_restriction() {
        let q = PrioritySet::from_letters(&["abc", "bca", "cab"]).unwrap();
        let r = Restriction::new(vec![2], vec![1], 3).unwrap();
        assert_eq!(restrict(&q, &r).unwrap(), PrioritySet::from_letters(&["a"]).unwrap());
    }

    #[test]
    fn mismatched_restriction_rejected() {
        assert!(matches!(
            Restriction::new(vec![0, 1], vec![0], 3),
            Err(Error::InvalidRestriction(_))
        ));
        assert!(Restriction::new(vec![0, 0], vec![0, 1], 3).is_err());
        assert!(Restriction::new(vec![0, 5], vec![0, 1], 3).is_err());
    }

    #[test]
    fn restriction_counts() {
        assert_eq!(restrictions(4, 3).count(), 16);
        assert_eq!(restrictions(3, 3).count(), 1);
        assert_eq!(restrictions(4, 4).count(), 1);
        assert_eq!(restrictions(5, 2).count(), 100);
    }

    #[test]
    fn ragged_priorities_rejected() {
        let lists = vec![Order::identity(3), Order::identity(2), Order::identity(3)];
        assert!(matches!(PrioritySet::new(lists), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn matching_inverse() {
        let m = Matching::from_applicant_positions(vec![1, 0, 2]).unwrap();
        assert_eq!(m.applicant_at(1), 0);
        assert_eq!(m.position_of(1), 0);
        assert!(Matching::from_applicant_positions(vec![1, 1, 2]).is_err());
    }
}
