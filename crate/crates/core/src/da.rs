//! Applicant-proposing deferred acceptance and brute-force stability oracles.

use std::fmt::Write as _;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::market::{Matching, PreferenceProfile, PrioritySet};
use crate::order::applicant_name;

/// Largest `n` accepted by [`all_stable_matchings`].
pub const BRUTE_FORCE_LIMIT: usize = 6;

/// Proposals made in each round of deferred acceptance, as
/// `(applicant, position)` pairs in ascending applicant order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    n: usize,
    rounds: Vec<Vec<(usize, usize)>>,
}

impl Transcript {
    pub fn rounds(&self) -> &[Vec<(usize, usize)>] {
        &self.rounds
    }

    /// `cells[position][round]`: applicants proposing to `position` in `round`.
    pub fn cells(&self) -> Vec<Vec<Vec<usize>>> {
        let mut cells = vec![vec![Vec::new(); self.rounds.len()]; self.n];
        for (r, round) in self.rounds.iter().enumerate() {
            for &(a, x) in round {
                cells[x][r].push(a);
            }
        }
        cells
    }

    /// Table with one row per position and one column per round.
    pub fn render(&self) -> String {
        let cells = self.cells();
        let text: Vec<Vec<String>> = cells
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.iter().map(|&a| applicant_name(a)).join(" "))
                    .collect()
            })
            .collect();
        let widths: Vec<usize> = (0..self.rounds.len())
            .map(|r| text.iter().map(|row| row[r].len()).max().unwrap_or(0).max(1))
            .collect();
        let mut out = String::new();
        for (x, row) in text.iter().enumerate() {
            let mut line = format!("{}", x + 1);
            let used = row.iter().rposition(|c| !c.is_empty()).map_or(0, |r| r + 1);
            for (cell, w) in row[..used].iter().zip(&widths) {
                let _ = write!(line, " | {cell:<w$}");
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

fn check_sizes(q: &PrioritySet, p: &PreferenceProfile) -> Result<()> {
    if q.n() != p.n() {
        return Err(Error::SizeMismatch { expected: q.n(), found: p.n() });
    }
    Ok(())
}

fn deferred_acceptance(q: &PrioritySet, p: &PreferenceProfile, mut log: Option<&mut Vec<Vec<(usize, usize)>>>) -> Matching {
    let n = q.n();
    let mut next_choice = vec![0usize; n];
    let mut held: Vec<Option<usize>> = vec![None; n];
    let mut free: Vec<usize> = (0..n).collect();
    while !free.is_empty() {
        let proposals: Vec<(usize, usize)> = free
            .iter()
            .map(|&a| {
                let x = p.pref(a).item_at(next_choice[a]);
                next_choice[a] += 1;
                (a, x)
            })
            .collect();
        free.clear();
        for &(a, x) in &proposals {
            match held[x] {
                Some(b) if q.list(x).prefers(b, a) => free.push(a),
                Some(b) => {
                    free.push(b);
                    held[x] = Some(a);
                }
                None => held[x] = Some(a),
            }
        }
        free.sort_unstable();
        if let Some(log) = log.as_deref_mut() {
            log.push(proposals);
        }
    }
    let mut positions = vec![0usize; n];
    for (x, a) in held.iter().enumerate() {
        positions[a.expect("complete lists leave no position empty")] = x;
    }
    Matching::from_applicant_positions(positions).expect("deferred acceptance yields a bijection")
}

/// The applicant-optimal stable matching.
///
/// All currently unmatched applicants propose simultaneously each round to
/// their best position not yet proposed to; each position keeps its
/// highest-priority proposer.
pub fn run_da(q: &PrioritySet, p: &PreferenceProfile) -> Result<Matching> {
    check_sizes(q, p)?;
    Ok(deferred_acceptance(q, p, None))
}

/// Like [`run_da`], also returning the round-by-round proposals.
pub fn run_da_transcript(q: &PrioritySet, p: &PreferenceProfile) -> Result<(Matching, Transcript)> {
    check_sizes(q, p)?;
    let mut rounds = Vec::new();
    let m = deferred_acceptance(q, p, Some(&mut rounds));
    Ok((m, Transcript { n: q.n(), rounds }))
}

/// True iff no applicant and position both prefer each other to their
/// assignment in `mu`.
pub fn is_stable(q: &PrioritySet, p: &PreferenceProfile, mu: &Matching) -> bool {
    let n = q.n();
    (0..n).all(|a| {
        (0..n).all(|x| {
            let mine = mu.position_of(a);
            mine == x || p.pref(a).prefers(mine, x) || q.list(x).prefers(mu.applicant_at(x), a)
        })
    })
}

/// Every stable matching, found by checking all `n!` matchings.
pub fn all_stable_matchings(q: &PrioritySet, p: &PreferenceProfile) -> Result<Vec<Matching>> {
    check_sizes(q, p)?;
    let n = q.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    Ok((0..n)
        .permutations(n)
        .map(|perm| Matching::from_applicant_positions(perm).expect("permutation"))
        .filter(|mu| is_stable(q, p, mu))
        .collect())
}
