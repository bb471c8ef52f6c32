//! Certificates that deferred acceptance admits no obviously strategyproof
//! implementation.
//!
//! A subdomain gives every applicant one to three types. If every applicant
//! with two types has some type that a deviation can strictly beat, and every
//! applicant with three types has this for each of its types, no tree
//! restricted to the subdomain can be OSP, so neither can any tree on the
//! full environment.

use itertools::Itertools;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::da::run_da;
use crate::error::{Error, Result};
use crate::market::{PreferenceProfile, PrioritySet};
use crate::order::{all_orders, applicant_name, Order};
use crate::patterns::{two_identical, reversed_third, four_applicant_pattern};

/// Most types an applicant may hold in a subdomain.
pub const MAX_TYPES: usize = 3;

/// Largest market accepted by [`check_witness`] (up to `3^n` profiles).
pub const WITNESS_LIMIT: usize = 8;

/// Independent search streams used by [`find_witness`].
pub const SEARCH_SHARDS: u64 = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subdomain {
    types: Vec<Vec<Order>>,
}

impl Subdomain {
    pub fn new(types: Vec<Vec<Order>>) -> Result<Self> {
        let n = types.len();
        for (a, list) in types.iter().enumerate() {
            if list.is_empty() || list.len() > MAX_TYPES {
                return Err(Error::MalformedSubdomain(format!(
                    "applicant {} has {} types, expected 1 to {MAX_TYPES}",
                    applicant_name(a),
                    list.len()
                )));
            }
            if list.iter().any(|o| o.len() != n) {
                return Err(Error::MalformedSubdomain(format!("applicant {} has an order of wrong length", applicant_name(a))));
            }
            if list.iter().duplicates().next().is_some() {
                return Err(Error::MalformedSubdomain(format!("applicant {} repeats a type", applicant_name(a))));
            }
        }
        if types.iter().all(|l| l.len() == 1) {
            return Err(Error::MalformedSubdomain("every applicant has a single type".into()));
        }
        Ok(Self { types })
    }

    /// Lists of 1-based, possibly partial rankings, completed ascending.
    pub fn from_one_based(rows: &[&[&[usize]]]) -> Result<Self> {
        let n = rows.len();
        let types = rows
            .iter()
            .map(|list| {
                list.iter()
                    .map(|r| {
                        let zero: Vec<usize> = r.iter().map(|&x| x.wrapping_sub(1)).collect();
                        Order::completed(n, &zero)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(types)
    }

    pub fn n(&self) -> usize {
        self.types.len()
    }

    pub fn types(&self) -> &[Vec<Order>] {
        &self.types
    }

    /// The subdomain after renaming applicant `a` to `applicants[a]` and
    /// position `x` to `positions[x]`.
    pub fn relabeled(&self, applicants: &[usize], positions: &[usize]) -> Subdomain {
        let mut types = vec![Vec::new(); self.n()];
        for (a, list) in self.types.iter().enumerate() {
            types[applicants[a]] = list.iter().map(|o| o.relabeled(positions)).collect();
        }
        Subdomain { types }
    }

    fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.types.iter().map(|l| 0..l.len()).multi_cartesian_product()
    }

    fn profile(&self, choice: &[usize]) -> PreferenceProfile {
        PreferenceProfile::new(choice.iter().enumerate().map(|(a, &k)| self.types[a][k].clone()).collect())
            .expect("subdomain orders are complete")
    }
}

/// Profiles showing that type `type_index` of `applicant` can be beaten:
/// reporting truthfully in `truthful` ends strictly worse, judged by that
/// type, than the deviation in `deviation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evidence {
    pub applicant: usize,
    pub type_index: usize,
    pub truthful: PreferenceProfile,
    pub deviation: PreferenceProfile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub holds: bool,
    /// One entry per beaten type, for every applicant with several types.
    pub evidence: Vec<Evidence>,
    /// Applicants whose condition fails.
    pub failing: Vec<usize>,
}

/// Checks both conditions of the certificate against deferred acceptance
/// under `q`, over every pair of profiles in the subdomain.
pub fn check_witness(q: &PrioritySet, d: &Subdomain) -> Result<WitnessReport> {
    let n = q.n();
    if d.n() != n {
        return Err(Error::SizeMismatch { expected: n, found: d.n() });
    }
    if n > WITNESS_LIMIT {
        return Err(Error::TooLarge { n, limit: WITNESS_LIMIT });
    }
    let outcomes: Vec<(Vec<usize>, Vec<usize>)> = d
        .profiles()
        .map(|c| {
            let m = run_da(q, &d.profile(&c)).expect("sizes agree");
            (c, m.applicant_positions())
        })
        .collect();
    let mut evidence = Vec::new();
    let mut failing = Vec::new();
    for (i, list) in d.types.iter().enumerate() {
        if list.len() == 1 {
            continue;
        }
        let mut beaten = 0;
        for (k, t) in list.iter().enumerate() {
            let truthful = outcomes
                .iter()
                .filter(|(c, _)| c[i] == k)
                .max_by_key(|(_, m)| t.rank_of(m[i]))
                .expect("subdomain is nonempty");
            let deviation = outcomes
                .iter()
                .filter(|(c, _)| c[i] != k)
                .min_by_key(|(_, m)| t.rank_of(m[i]))
                .expect("another type exists");
            if t.prefers(deviation.1[i], truthful.1[i]) {
                beaten += 1;
                evidence.push(Evidence {
                    applicant: i,
                    type_index: k,
                    truthful: d.profile(&truthful.0),
                    deviation: d.profile(&deviation.0),
                });
            }
        }
        let ok = if list.len() == 2 { beaten >= 1 } else { beaten == list.len() };
        if !ok {
            failing.push(i);
        }
    }
    Ok(WitnessReport { holds: failing.is_empty(), evidence, failing })
}

fn top_two(o: &Order) -> (usize, usize) {
    (o.item_at(0), o.item_at(1.min(o.len() - 1)))
}

fn sample_subdomain(rng: &mut ChaCha8Rng, orders: &[Order], n: usize) -> Subdomain {
    loop {
        let mut types = Vec::with_capacity(n);
        for _ in 0..n {
            let count = rng.random_range(1..=MAX_TYPES);
            let mut list: Vec<Order> = Vec::with_capacity(count);
            let mut attempts = 0;
            while list.len() < count && attempts < 32 {
                attempts += 1;
                let o = orders.choose(rng).expect("orders exist");
                if list.iter().all(|p| top_two(p) != top_two(o)) {
                    list.push(o.clone());
                }
            }
            types.push(list);
        }
        if let Ok(d) = Subdomain::new(types) {
            return d;
        }
    }
}

/// Randomized search for a certificate.
///
/// The budget is split over [`SEARCH_SHARDS`] streams seeded from `seed`;
/// the result is the first success of the lowest successful stream, so it
/// does not depend on scheduling.
pub fn find_witness(q: &PrioritySet, budget: u64, seed: u64) -> Result<Option<Subdomain>> {
    let n = q.n();
    if n > WITNESS_LIMIT {
        return Err(Error::TooLarge { n, limit: WITNESS_LIMIT });
    }
    if n < 2 {
        return Ok(None);
    }
    let orders = all_orders(n);
    let per_shard = budget.div_ceil(SEARCH_SHARDS);
    let found = (0..SEARCH_SHARDS).into_par_iter().find_map_first(|shard| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(shard);
        let iterations = per_shard.min(budget.saturating_sub(shard * per_shard));
        (0..iterations).find_map(|_| {
            let d = sample_subdomain(&mut rng, &orders, n);
            check_witness(q, &d).expect("sizes agree").holds.then_some(d)
        })
    });
    Ok(found)
}

/// A bundled certificate for one forbidden pattern.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub label: String,
    /// Letter of the forbidden pattern the priorities belong to.
    pub pattern: char,
    pub priorities: PrioritySet,
    pub subdomain: Subdomain,
}

/// Applicant and position renamings carrying `from` onto `to`, if any.
pub fn find_relabeling(from: &PrioritySet, to: &PrioritySet) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = from.n();
    if to.n() != n {
        return None;
    }
    (0..n).permutations(n).find_map(|sigma| {
        let lists: Vec<Order> = from.lists().iter().map(|l| l.relabeled(&sigma)).collect();
        let mut used = vec![false; n];
        let mut pi = vec![0; n];
        for (x, l) in lists.iter().enumerate() {
            let y = (0..n).find(|&y| !used[y] && to.list(y) == l)?;
            used[y] = true;
            pi[x] = y;
        }
        Some((sigma, pi))
    })
}

fn set(rows: &[&str]) -> PrioritySet {
    PrioritySet::from_letters(rows).expect("static priority set")
}

fn domain(rows: &[&[&[usize]]]) -> Subdomain {
    Subdomain::from_one_based(rows).expect("static subdomain")
}

/// The certificates bundled with the library, one or more per forbidden
/// pattern, partial rankings completed ascending.
pub fn fixtures() -> Vec<Fixture> {
    let mut out = Vec::new();
    // Found by `find_witness(three_cycle(), 100_000, 1)` and frozen.
    out.push(Fixture {
        label: "three-cycle".into(),
        pattern: 'a',
        priorities: set(&["abc", "bca", "cab"]),
        subdomain: domain(&[
            &[&[3, 2, 1], &[2, 1, 3]],
            &[&[1, 3, 2], &[3, 2, 1]],
            &[&[2, 3, 1], &[1, 2, 3], &[1, 3, 2]],
        ]),
    });
    let two_same = domain(&[
        &[&[3, 1, 2], &[3, 2, 1]],
        &[&[1, 2, 3], &[2, 1, 3]],
        &[&[1, 2, 3], &[1, 3, 2], &[2, 3, 1]],
    ]);
    for v in 0..3 {
        out.push(Fixture {
            label: format!("two identical lists, variant {}", v + 1),
            pattern: 'b',
            priorities: two_identical(v),
            subdomain: two_same.clone(),
        });
    }
    out.push(Fixture {
        label: "one shared top, reversed third list".into(),
        pattern: 'c',
        priorities: reversed_third(),
        subdomain: domain(&[
            &[&[3, 1, 2], &[3, 2, 1]],
            &[&[1, 2, 3], &[2, 1, 3], &[2, 3, 1]],
            &[&[1, 2, 3], &[1, 3, 2], &[2, 3, 1]],
        ]),
    });
    let distinct_tops = set(&["abc", "bac", "cab"]);
    let distinct_domain = domain(&[
        &[&[2, 1, 3], &[3, 1, 2], &[3, 2, 1]],
        &[&[3, 2, 1], &[1, 3, 2]],
        &[&[2, 3, 1], &[1, 2, 3], &[1, 3, 2]],
    ]);
    out.push(Fixture {
        label: "distinct tops".into(),
        pattern: 'd',
        priorities: distinct_tops.clone(),
        subdomain: distinct_domain.clone(),
    });
    for rows in [["abc", "bac", "cba"], ["abc", "cba", "bca"]] {
        let target = set(&rows);
        let (sigma, pi) = find_relabeling(&distinct_tops, &target).expect("same pattern up to relabeling");
        out.push(Fixture {
            label: format!("distinct tops relabeled as {}", rows.join(",")),
            pattern: 'd',
            priorities: target,
            subdomain: distinct_domain.relabeled(&sigma, &pi),
        });
    }
    out.push(Fixture {
        label: "four applicants".into(),
        pattern: 'e',
        priorities: four_applicant_pattern(),
        subdomain: domain(&[
            &[&[4, 2], &[4, 3]],
            &[&[3, 1], &[3, 4]],
            &[&[2, 3], &[3, 1]],
            &[&[1, 2], &[2, 1]],
        ]),
    });
    out
}
