//! Command-line front end.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage or input error, and 3
//! when a witness is requested for limited-cyclic priorities.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use itertools::Itertools;
use rayon::prelude::*;
use serde_json::json;

use crate::canon::{canonical_form, enumerate_priority_sets};
use crate::classify::classify;
use crate::da::{run_da, run_da_transcript};
use crate::error::{Error, Result};
use crate::io::*;
use crate::market::PrioritySet;
use crate::mechanism::{check_implements, check_osp, CheckMode, MechanismTree};
use crate::order::applicant_name;
use crate::synth::synthesize;
use crate::witness::{check_witness, find_relabeling, find_witness, fixtures, Subdomain};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMITED_CYCLIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "osp-da", version, about = "Obviously strategyproof deferred acceptance under fixed priorities")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run deferred acceptance on a profile.
    Da {
        priorities: PathBuf,
        profile: PathBuf,
        /// Print the round-by-round proposals.
        #[arg(long)]
        transcript: bool,
    },
    /// Decide whether priorities are limited cyclic.
    Classify { priorities: PathBuf },
    /// Build an OSP mechanism tree.
    Synthesize {
        priorities: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Validate a tree, compare it with deferred acceptance and check OSP.
    VerifyTree {
        tree: PathBuf,
        priorities: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Report OSP violations of a tree.
    CheckOsp { tree: PathBuf },
    /// Look for a certificate that no OSP implementation exists.
    Witness {
        priorities: PathBuf,
        /// Only try the bundled certificates.
        #[arg(long, conflicts_with = "search")]
        fixtures: bool,
        /// Only run the randomized search.
        #[arg(long)]
        search: bool,
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Classify every priority set of a given size up to relabeling.
    Enumerate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        n: u8,
        /// Tab-separated report, one row per class.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct Sampling {
    /// Check every profile.
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Check this many random profiles.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_priorities(path: &Path) -> Result<PrioritySet> {
    priorities_from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_tree(path: &Path) -> Result<MechanismTree> {
    MechanismTree::from_json(&read(path)?).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command, writing
/// to `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(k) = cli.threads {
        // A global pool can only be installed once per process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn emit(out: &mut dyn Write, text: impl AsRef<str>) -> Result<()> {
    writeln!(out, "{}", text.as_ref()).map_err(|e| Error::Parse(format!("writing output: {e}")))
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Da { priorities, profile, transcript } => {
            let q = load_priorities(priorities)?;
            let p = profile_from_json(&read(profile)?)?;
            let (m, t) = if *transcript {
                let (m, t) = run_da_transcript(&q, &p)?;
                (m, Some(t))
            } else {
                (run_da(&q, &p)?, None)
            };
            if cli.json {
                let mut doc = matching_to_value(&m);
                if let Some(t) = &t {
                    doc["transcript"] = json!(t.render());
                }
                emit(out, doc.to_string())?;
            } else {
                if let Some(t) = &t {
                    emit(out, t.render().trim_end())?;
                }
                emit(out, matching_to_json(&m))?;
            }
            Ok(EXIT_OK)
        }
        Command::Classify { priorities } => {
            let q = load_priorities(priorities)?;
            let c = classify(&q);
            if cli.json {
                emit(out, classification_to_value(&c).to_string())?;
            } else {
                emit(out, c.summary())?;
                for (block, l) in &c.block_labelings {
                    emit(
                        out,
                        format!(
                            "block {}: a_1..a_{} = {}; x = {{{}}}; u = {}; v = {}",
                            block + 1,
                            l.applicants.len(),
                            l.applicants.iter().map(|&a| applicant_name(a)).join(","),
                            l.x_positions.iter().map(|x| x + 1).join(","),
                            l.u_position + 1,
                            l.v_position + 1
                        ),
                    )?;
                }
            }
            Ok(if c.is_limited_cyclic() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Synthesize { priorities, output } => {
            let q = load_priorities(priorities)?;
            match synthesize(&q) {
                Ok(tree) => {
                    fs::write(output, tree.to_json())
                        .map_err(|e| Error::Parse(format!("{}: {e}", output.display())))?;
                    let msg = format!("wrote {} nodes ({} leaves) to {}", tree.node_count(), tree.leaf_count(), output.display());
                    if cli.json {
                        emit(out, json!({"nodes": tree.node_count(), "leaves": tree.leaf_count()}).to_string())?;
                    } else {
                        emit(out, msg)?;
                    }
                    Ok(EXIT_OK)
                }
                Err(e @ Error::NotLimitedCyclic { .. }) => {
                    if cli.json {
                        emit(out, classification_to_value(&classify(&q)).to_string())?;
                    } else {
                        emit(out, e.to_string())?;
                    }
                    Ok(EXIT_NEGATIVE)
                }
                Err(e) => Err(e),
            }
        }
        Command::VerifyTree { tree, priorities, sampling } => {
            let t = load_tree(tree)?;
            let q = load_priorities(priorities)?;
            let mode = match sampling.samples {
                Some(count) if !sampling.exhaustive => CheckMode::Sampled { count, seed: sampling.seed },
                _ => CheckMode::Exhaustive,
            };
            let implements = check_implements(&t, &q, &mode)?;
            let osp = check_osp(&t)?;
            if cli.json {
                emit(
                    out,
                    json!({
                        "valid": true,
                        "profiles_checked": implements.checked,
                        "implements": implements.ok(),
                        "counterexample": implements.counterexample.as_ref().map(|c| json!({
                            "profile": profile_to_value(&c.profile),
                            "tree": matching_to_value(&c.tree_outcome),
                            "da": matching_to_value(&c.da_outcome),
                        })),
                        "osp": osp.ok(),
                        "violations": osp.violation_count,
                    })
                    .to_string(),
                )?;
            } else {
                emit(out, "valid: yes")?;
                match &implements.counterexample {
                    None => emit(out, format!("implements deferred acceptance: yes ({} profiles)", implements.checked))?,
                    Some(c) => emit(
                        out,
                        format!(
                            "implements deferred acceptance: no; profile {} gives {:?}, deferred acceptance gives {:?}",
                            profile_to_json(&c.profile),
                            c.tree_outcome,
                            c.da_outcome
                        ),
                    )?,
                }
                emit(out, format!("obviously strategyproof: {} ({} violations)", if osp.ok() { "yes" } else { "no" }, osp.violation_count))?;
            }
            Ok(if implements.ok() && osp.ok() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::CheckOsp { tree } => {
            let t = load_tree(tree)?;
            let report = check_osp(&t)?;
            if cli.json {
                let violations: Vec<_> = report
                    .violations
                    .iter()
                    .map(|v| {
                        json!({
                            "node": v.node,
                            "player": applicant_name(v.player).to_string(),
                            "type": t.universe()[v.player][v.type_id as usize].ranking().map(|x| x + 1).collect::<Vec<_>>(),
                            "truthful_leaf": v.truthful_leaf,
                            "deviating_leaf": v.deviating_leaf,
                        })
                    })
                    .collect();
                emit(out, json!({"ok": report.ok(), "violation_count": report.violation_count, "violations": violations}).to_string())?;
            } else if report.ok() {
                emit(out, "obviously strategyproof: yes")?;
            } else {
                emit(out, format!("obviously strategyproof: no ({} violations)", report.violation_count))?;
                for v in &report.violations {
                    emit(out, v.describe(&t))?;
                }
            }
            Ok(if report.ok() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Witness { priorities, fixtures: only_fixtures, search, budget, seed } => {
            let q = load_priorities(priorities)?;
            if classify(&q).is_limited_cyclic() {
                emit(out, "priorities are limited cyclic; no certificate exists")?;
                return Ok(EXIT_LIMITED_CYCLIC);
            }
            let mut found: Option<Subdomain> = None;
            if !*search {
                found = fixtures().into_iter().find_map(|f| {
                    let (sigma, pi) = find_relabeling(&f.priorities, &q)?;
                    Some(f.subdomain.relabeled(&sigma, &pi))
                });
            }
            if found.is_none() && !*only_fixtures {
                found = find_witness(&q, *budget, *seed)?;
            }
            let Some(d) = found else {
                emit(out, if cli.json { json!({"found": false}).to_string() } else { "no certificate found".into() })?;
                return Ok(EXIT_NEGATIVE);
            };
            let report = check_witness(&q, &d)?;
            let evidence: Vec<_> = report.evidence.iter().map(evidence_to_value).collect();
            let doc = json!({"found": true, "subdomain": subdomain_to_value(&d), "evidence": evidence});
            if cli.json {
                emit(out, doc.to_string())?;
            } else {
                emit(out, serde_json::to_string_pretty(&doc).expect("serializable"))?;
            }
            Ok(if report.holds { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Enumerate { n, report } => {
            let rows = enumerate_classes(*n as usize);
            let limited = rows.iter().filter(|r| r.limited_cyclic).count();
            if let Some(path) = report {
                let mut tsv = String::from("canonical\tcount\tverdict\tpattern\n");
                for r in &rows {
                    tsv.push_str(&format!(
                        "{}\t{}\t{}\t{}\n",
                        r.canonical,
                        r.count,
                        if r.limited_cyclic { "limited_cyclic" } else { "not_limited_cyclic" },
                        r.pattern.map(String::from).unwrap_or_else(|| "-".into())
                    ));
                }
                fs::write(path, tsv).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
            }
            let total: u64 = rows.iter().map(|r| r.count).sum();
            if cli.json {
                emit(out, json!({"sets": total, "classes": rows.len(), "limited_cyclic_classes": limited}).to_string())?;
            } else {
                emit(out, format!("{total} priority sets, {} classes, {limited} limited cyclic", rows.len()))?;
            }
            Ok(EXIT_OK)
        }
    }
}

/// One equivalence class in an enumeration report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassRow {
    pub canonical: String,
    pub count: u64,
    pub limited_cyclic: bool,
    pub pattern: Option<char>,
}

/// Every class of `n x n` priority sets, sorted by canonical form.
pub fn enumerate_classes(n: usize) -> Vec<ClassRow> {
    let counts = enumerate_priority_sets(n)
        .par_bridge()
        .fold(HashMap::new, |mut m: HashMap<PrioritySet, u64>, q| {
            *m.entry(canonical_form(&q)).or_default() += 1;
            m
        })
        .reduce(HashMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    let mut rows: Vec<ClassRow> = counts
        .into_par_iter()
        .map(|(q, count)| {
            let c = classify(&q);
            ClassRow {
                canonical: q.to_string(),
                count,
                limited_cyclic: c.is_limited_cyclic(),
                pattern: c.witness.map(|w| w.pattern().letter),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.canonical.cmp(&b.canonical));
    rows
}
