//! Proposal tables from the worked non-OSP arguments, shared by the
//! transcript tests and the acceptance run.

#![allow(dead_code)]

pub struct Table {
    pub name: &'static str,
    pub priorities: &'static [&'static str],
    pub profile: &'static [&'static [usize]],
    /// Rows of `"x & cell & cell ..."`, one per position.
    pub rows: &'static [&'static str],
}

pub const TABLES: &[Table] = &[
    Table {
        name: "two identical lists, a truthful",
        priorities: &["abc", "abc", "cab"],
        profile: &[&[3, 2, 1], &[1, 2, 3], &[1, 3, 2]],
        rows: &["1 & b c & ", "2 &   &   & a ", "3 & a & c &"],
    },
    Table {
        name: "two identical lists, b truthful",
        priorities: &["abc", "abc", "cab"],
        profile: &[&[3, 1, 2], &[1, 2, 3], &[1, 3, 2]],
        rows: &["1 & b c & & a & ", "2 &   &   &   & b ", "3 & a & c &"],
    },
    Table {
        name: "two identical lists, b lies",
        priorities: &["abc", "abc", "cab"],
        profile: &[&[3, 2, 1], &[2, 1, 3], &[2, 3, 1]],
        rows: &["1 &  &    &   & b", "2 & b c & & a ", "3 & a & c &"],
    },
    Table {
        name: "reversed third list, c truthful",
        priorities: &["abc", "acb", "cba"],
        profile: &[&[3, 2, 1], &[2, 3, 1], &[2, 3, 1]],
        rows: &["1 &     & &   &   & b", "2 & b c & & a &   &   ", "3 & a & b &   & c &"],
    },
    Table {
        name: "distinct tops, first profile",
        priorities: &["abc", "bac", "cab"],
        profile: &[&[3, 1, 2], &[1, 3, 2], &[1, 3, 2]],
        rows: &["1 & b c &  & a && ", "2 &     &  &   &   & b ", "3 & a   & c&   & b"],
    },
    Table {
        name: "distinct tops, second profile",
        priorities: &["abc", "bac", "cab"],
        profile: &[&[2, 1, 3], &[3, 2, 1], &[2, 3, 1]],
        rows: &["1 &     &  &   & a ", "2 & a c &  & b &    ", "3 & b   & c &"],
    },
    Table {
        name: "four applicants, truthful",
        priorities: &["abcd", "abdc", "acbd", "bacd"],
        profile: &[&[4, 2], &[3, 4], &[3, 1], &[1, 2]],
        rows: &["1 & d   &   &     ", "2 &     &   & a   ", "3 & b c &   &     ", "4 & a   & b &    "],
    },
    Table {
        name: "four applicants, lie",
        priorities: &["abcd", "abdc", "acbd", "bacd"],
        profile: &[&[4, 3], &[3, 4], &[2, 3], &[1, 2]],
        rows: &["1 & d    ", "2 & c    ", "3 & b    ", "4 & a   "],
    },
];

/// Splits rows on `sep`, drops the position label, normalizes whitespace
/// and trims trailing empty cells.
pub fn parse_rows<'a>(rows: impl IntoIterator<Item = &'a str>, sep: char) -> Vec<Vec<String>> {
    rows.into_iter()
        .map(|row| {
            let mut cells: Vec<String> =
                row.split(sep).skip(1).map(|c| c.split_whitespace().collect::<Vec<_>>().join(" ")).collect();
            while cells.last().is_some_and(|c| c.is_empty()) {
                cells.pop();
            }
            cells
        })
        .collect()
}
