//! Proposal tables from the worked non-OSP arguments, reproduced round by
//! round.

mod common;

use common::{parse_rows, TABLES};
use osp_da::da::run_da_transcript;
use osp_da::order::applicant_name;
use osp_da::{PreferenceProfile, PrioritySet};

fn computed_table(q: &PrioritySet, p: &PreferenceProfile) -> Vec<Vec<String>> {
    let (_, t) = run_da_transcript(q, p).unwrap();
    t.cells()
        .into_iter()
        .map(|row| {
            let mut cells: Vec<String> = row
                .into_iter()
                .map(|c| c.into_iter().map(|a| applicant_name(a).to_string()).collect::<Vec<_>>().join(" "))
                .collect();
            while cells.last().is_some_and(|c| c.is_empty()) {
                cells.pop();
            }
            cells
        })
        .collect()
}

fn check(name: &str) {
    let t = TABLES.iter().find(|t| t.name == name).unwrap();
    let q = PrioritySet::from_letters(t.priorities).unwrap();
    let p = PreferenceProfile::from_one_based(t.profile).unwrap();
    assert_eq!(computed_table(&q, &p), parse_rows(t.rows.iter().copied(), '&'), "{name}");
}

#[test]
fn two_identical_lists_root_a_truth() {
    check("two identical lists, a truthful");
}

#[test]
fn two_identical_lists_root_b_truth_and_lie() {
    check("two identical lists, b truthful");
    check("two identical lists, b lies");
}

#[test]
fn reversed_third_list_root_c_truth() {
    check("reversed third list, c truthful");
}

#[test]
fn distinct_tops_truth() {
    check("distinct tops, first profile");
    check("distinct tops, second profile");
}

#[test]
fn four_applicants_truth_and_lie() {
    check("four applicants, truthful");
    check("four applicants, lie");
}

#[test]
fn rendered_transcript_matches_cells() {
    for t in TABLES {
        let q = PrioritySet::from_letters(t.priorities).unwrap();
        let p = PreferenceProfile::from_one_based(t.profile).unwrap();
        let (_, tr) = run_da_transcript(&q, &p).unwrap();
        assert_eq!(parse_rows(tr.render().lines(), '|'), parse_rows(t.rows.iter().copied(), '&'), "{}", t.name);
    }
}
