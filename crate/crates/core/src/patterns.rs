//! Named priority sets: the forbidden sub-patterns and a handful of reference
//! markets used in documentation and tests.

use std::collections::HashMap;
use std::sync::OnceLock;

use crate::canon::canonical_form;
use crate::market::PrioritySet;

fn set(rows: &[&str]) -> PrioritySet {
    PrioritySet::from_letters(rows).expect("static priority set")
}

/// Fully cyclic 3x3 set.
pub fn three_cycle() -> PrioritySet {
    set(&["abc", "bca", "cab"])
}

/// Two identical lists plus one of three cyclic third lists (`variant` 0..3).
pub fn two_identical(variant: usize) -> PrioritySet {
    let third = ["cab", "cba", "bca"][variant];
    set(&["abc", "abc", third])
}

pub fn reversed_third() -> PrioritySet {
    set(&["abc", "acb", "cba"])
}

pub fn distinct_tops() -> PrioritySet {
    set(&["abc", "bac", "cba"])
}

pub fn four_applicant_pattern() -> PrioritySet {
    set(&["abcd", "abdc", "acbd", "bacd"])
}

/// The smallest cyclic set that is still limited cyclic.
pub fn cyclic_osp_3x3() -> PrioritySet {
    set(&["abc", "acb", "bac"])
}

/// Six applicants: four identical lists plus the two alternating ones.
pub fn star6() -> PrioritySet {
    set(&["abcdef", "abcdef", "abcdef", "abcdef", "acbedf", "badcfe"])
}

/// Seven-applicant alternating example with five identical lists.
pub fn star7() -> PrioritySet {
    set(&["abcdefg", "abcdefg", "abcdefg", "abcdefg", "abcdefg", "acbedgf", "badcfeg"])
}

/// Cyclic 4x4 sets without a forbidden 3x3 restriction, as enumerated by
/// hand (six sets, two of which are the 4x4 forbidden pattern).
pub fn cyclic_4x4_candidates() -> Vec<PrioritySet> {
    vec![
        set(&["dabc", "dabc", "dacb", "dbac"]),
        set(&["adbc", "dabc", "dacb", "dbac"]),
        set(&["dabc", "dabc", "adcb", "dbac"]),
        set(&["abcd", "abcd", "acbd", "badc"]),
        set(&["abcd", "abdc", "acbd", "bacd"]),
        set(&["abcd", "abcd", "acbd", "bacd"]),
    ]
}

/// The cyclic 4x4 sets that contain no forbidden pattern at all.
pub fn cyclic_osp_4x4() -> Vec<PrioritySet> {
    vec![
        set(&["dabc", "dabc", "dacb", "dbac"]),
        set(&["abcd", "abcd", "acbd", "badc"]),
        set(&["abcd", "abcd", "acbd", "bacd"]),
    ]
}

/// One forbidden sub-pattern.
#[derive(Clone, Debug)]
pub struct ForbiddenPattern {
    /// Pattern letter, `'a'..='e'`.
    pub letter: char,
    /// Distinguishes the three sets sharing letter `'b'`.
    pub variant: usize,
    pub priorities: PrioritySet,
    pub canonical: PrioritySet,
}

impl ForbiddenPattern {
    pub fn label(&self) -> String {
        if self.letter == 'b' {
            format!("({}{})", self.letter, self.variant + 1)
        } else {
            format!("({})", self.letter)
        }
    }
}

struct PatternTable {
    patterns: Vec<ForbiddenPattern>,
    by_canonical: HashMap<PrioritySet, usize>,
}

fn table() -> &'static PatternTable {
    static TABLE: OnceLock<PatternTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut raw = vec![('a', 0, three_cycle())];
        raw.extend((0..3).map(|v| ('b', v, two_identical(v))));
        raw.push(('c', 0, reversed_third()));
        raw.push(('d', 0, distinct_tops()));
        raw.push(('e', 0, four_applicant_pattern()));
        let patterns: Vec<ForbiddenPattern> = raw
            .into_iter()
            .map(|(letter, variant, priorities)| ForbiddenPattern {
                letter,
                variant,
                canonical: canonical_form(&priorities),
                priorities,
            })
            .collect();
        let by_canonical = patterns
            .iter()
            .enumerate()
            .map(|(i, p)| (p.canonical.clone(), i))
            .collect();
        PatternTable { patterns, by_canonical }
    })
}

/// The forbidden sub-patterns, all stored with their canonical forms: one set
/// each for letters a, c, d, e and three for letter b.
pub fn forbidden_patterns() -> &'static [ForbiddenPattern] {
    &table().patterns
}

/// Index into [`forbidden_patterns`] of the pattern whose canonical form is
/// `canonical`.
pub fn pattern_index(canonical: &PrioritySet) -> Option<usize> {
    table().by_canonical.get(canonical).copied()
}
