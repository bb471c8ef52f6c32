//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{parse_rows, TABLES};
use itertools::Itertools;
use osp_da::canon::{canonical_form, enumerate_priority_sets};
use osp_da::classify::{classify, is_cyclic, scan_forbidden};
use osp_da::da::{all_stable_matchings, is_stable, run_da};
use osp_da::io::{priorities_to_json, profile_to_json};
use osp_da::market::{restrict, restrictions};
use osp_da::mechanism::{check_implements, check_osp, max_actions_per_path, max_active, prune, CheckMode};
use osp_da::order::all_orders;
use osp_da::patterns::{cyclic_4x4_candidates, cyclic_osp_4x4, three_cycle, four_applicant_pattern, forbidden_patterns, star6};
use osp_da::synth::synthesize;
use osp_da::witness::{check_witness, find_witness, fixtures};
use osp_da::{PreferenceProfile, PrioritySet};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

/// Name, time limit and body of one criterion.
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sweep_3x3() -> Outcome {
    let mut forbidden = BTreeSet::new();
    for q in enumerate_priority_sets(3) {
        let limited = classify(&q).is_limited_cyclic();
        ensure(limited == scan_forbidden(&q).is_none(), || format!("classifier and scan disagree on {q}"))?;
        if !limited {
            forbidden.insert(canonical_form(&q));
        }
    }
    let patterns: BTreeSet<PrioritySet> =
        forbidden_patterns().iter().filter(|p| p.priorities.n() == 3).map(|p| p.canonical.clone()).collect();
    ensure(forbidden == patterns, || format!("forbidden classes {forbidden:?}"))?;
    let letters: BTreeSet<char> = forbidden.iter().map(|q| scan_forbidden(q).unwrap().pattern().letter).collect();
    ensure(letters == BTreeSet::from(['a', 'b', 'c', 'd']), || format!("letters {letters:?}"))?;
    Ok(format!("216 sets, {} forbidden classes over patterns (a)-(d)", forbidden.len()))
}

fn constructive_3x3() -> Outcome {
    let sets: Vec<PrioritySet> = enumerate_priority_sets(3).filter(|q| classify(q).is_limited_cyclic()).collect();
    for q in &sets {
        let t = synthesize(q).map_err(|e| format!("{q}: {e}"))?;
        t.validate().map_err(|e| format!("{q}: {e}"))?;
        let r = check_implements(&t, q, &CheckMode::Exhaustive).map_err(|e| e.to_string())?;
        ensure(r.ok() && r.checked == 216, || format!("{q}: {:?}", r.counterexample))?;
        ensure(check_osp(&t).map_err(|e| e.to_string())?.ok(), || format!("{q}: not OSP"))?;
    }
    Ok(format!("{} limited-cyclic sets synthesized and verified", sets.len()))
}

fn equivalence_4x4() -> Outcome {
    let classes: BTreeMap<PrioritySet, (u64, bool)> = enumerate_priority_sets(4)
        .par_bridge()
        .map(|q| {
            let limited = classify(&q).is_limited_cyclic();
            let scan = scan_forbidden(&q).is_none();
            (canonical_form(&q), limited, scan)
        })
        .try_fold(BTreeMap::new, |mut m: BTreeMap<PrioritySet, (u64, bool)>, (c, limited, scan)| {
            if limited != scan {
                return Err(format!("classifier and scan disagree in class {c}"));
            }
            m.entry(c).or_insert((0, limited)).0 += 1;
            Ok(m)
        })
        .try_reduce(BTreeMap::new, |mut a, b| {
            for (k, (n, l)) in b {
                a.entry(k).or_insert((0, l)).0 += n;
            }
            Ok(a)
        })?;
    let total: u64 = classes.values().map(|(n, _)| n).sum();
    ensure(total == 331_776, || format!("{total} sets enumerated"))?;
    // Cyclic classes without a forbidden 3x3 restriction.
    let bare: BTreeSet<PrioritySet> = classes
        .keys()
        .filter(|q| is_cyclic(q) && restrictions(4, 3).all(|r| scan_forbidden(&restrict(q, &r).unwrap()).is_none()))
        .cloned()
        .collect();
    let listed: BTreeSet<PrioritySet> = cyclic_4x4_candidates().iter().map(canonical_form).collect();
    ensure(bare == listed, || format!("bare cyclic classes {bare:?}"))?;
    let q_class = canonical_form(&four_applicant_pattern());
    let non_q: Vec<PrioritySet> = cyclic_4x4_candidates().into_iter().filter(|q| canonical_form(q) != q_class).collect();
    ensure(non_q.len() == 4, || format!("{} listed sets outside the four-applicant pattern", non_q.len()))?;
    let corollary: BTreeSet<PrioritySet> = cyclic_osp_4x4().iter().map(canonical_form).collect();
    for q in &non_q {
        ensure(corollary.contains(&canonical_form(q)), || format!("{q} missing from the OSP list"))?;
        ensure(classify(q).is_limited_cyclic(), || format!("{q} rejected"))?;
    }
    ensure(!classify(&four_applicant_pattern()).is_limited_cyclic(), || "four-applicant pattern accepted".into())?;
    let limited = classes.values().filter(|(_, l)| *l).count();
    Ok(format!("331776 sets, {} classes ({limited} limited cyclic), {} bare cyclic classes", classes.len(), bare.len()))
}

fn fixture_certification() -> Outcome {
    let all = fixtures();
    let mut letters = BTreeSet::new();
    for f in &all {
        let r = check_witness(&f.priorities, &f.subdomain).map_err(|e| e.to_string())?;
        ensure(r.holds, || format!("{}: failing {:?}", f.label, r.failing))?;
        for e in &r.evidence {
            let t = &f.subdomain.types()[e.applicant][e.type_index];
            let truthful = run_da(&f.priorities, &e.truthful).unwrap().position_of(e.applicant);
            let deviation = run_da(&f.priorities, &e.deviation).unwrap().position_of(e.applicant);
            ensure(e.truthful.pref(e.applicant) == t && t.prefers(deviation, truthful), || format!("{}: evidence does not replay", f.label))?;
        }
        letters.insert(f.pattern);
    }
    ensure(letters.len() == 5, || format!("patterns covered {letters:?}"))?;
    Ok(format!("{} certificates over patterns {}", all.len(), letters.iter().collect::<String>()))
}

fn flagship() -> Outcome {
    let q = star6();
    let t = synthesize(&q).map_err(|e| e.to_string())?;
    t.validate().map_err(|e| e.to_string())?;
    let osp = check_osp(&t).map_err(|e| e.to_string())?;
    ensure(osp.ok(), || format!("{} violations", osp.violation_count))?;
    let r = check_implements(&t, &q, &CheckMode::Sampled { count: 100_000, seed: 2024 }).map_err(|e| e.to_string())?;
    ensure(r.ok(), || format!("sampled counterexample {:?}", r.counterexample))?;
    let orders = all_orders(6);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for free in 0..6 {
        let base = PreferenceProfile::new((0..6).map(|_| orders[rng.random_range(0..orders.len())].clone()).collect()).unwrap();
        let r = check_implements(&t, &q, &CheckMode::Slice { free, base }).map_err(|e| e.to_string())?;
        ensure(r.ok() && r.checked == 720, || format!("slice {free}: {:?}", r.counterexample))?;
    }
    let (acts, active) = (max_actions_per_path(&t), max_active(&t));
    ensure(acts <= 2 && active <= 3, || format!("bounds: {acts} actions, {active} active"))?;
    Ok(format!("{} nodes; 100000 samples and 6x720 slices agree; acts <= {acts}, active <= {active}", t.node_count()))
}

fn da_oracles() -> Outcome {
    let sets: Vec<PrioritySet> = enumerate_priority_sets(3).collect();
    let orders = all_orders(3);
    let profiles: Vec<PreferenceProfile> = (0..3)
        .map(|_| orders.iter().cloned())
        .multi_cartesian_product()
        .map(|p| PreferenceProfile::new(p).unwrap())
        .collect();
    sets.par_iter().try_for_each(|q| {
        for p in &profiles {
            let mu = run_da(q, p).unwrap();
            ensure(is_stable(q, p, &mu), || format!("unstable on {q} {}", profile_to_json(p)))?;
            for other in all_stable_matchings(q, p).unwrap() {
                for a in 0..3 {
                    let (mine, theirs) = (mu.position_of(a), other.position_of(a));
                    ensure(mine == theirs || p.pref(a).prefers(mine, theirs), || format!("not optimal on {q}"))?;
                }
            }
            for a in 0..3 {
                for lie in &orders {
                    let x = run_da(q, &p.with_pref(a, lie.clone())).unwrap().position_of(a);
                    ensure(!p.pref(a).prefers(x, mu.position_of(a)), || format!("misreport helps on {q}"))?;
                }
            }
        }
        Ok::<(), String>(())
    })?;
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    for (k, t) in TABLES.iter().enumerate() {
        let qpath = dir.path().join(format!("q{k}.json"));
        let ppath = dir.path().join(format!("p{k}.json"));
        let q = PrioritySet::from_letters(t.priorities).unwrap();
        let p = PreferenceProfile::from_one_based(t.profile).unwrap();
        std::fs::write(&qpath, priorities_to_json(&q)).map_err(|e| e.to_string())?;
        std::fs::write(&ppath, profile_to_json(&p)).map_err(|e| e.to_string())?;
        let out = Command::new(env!("CARGO_BIN_EXE_osp-da"))
            .arg("da")
            .arg("--transcript")
            .arg(&qpath)
            .arg(&ppath)
            .output()
            .map_err(|e| e.to_string())?;
        let text = String::from_utf8_lossy(&out.stdout).into_owned();
        let table: Vec<&str> = text.lines().filter(|l| l.contains('|')).collect();
        ensure(parse_rows(table, '|') == parse_rows(t.rows.iter().copied(), '&'), || format!("transcript differs: {}", t.name))?;
    }
    Ok(format!("216x216 pairs stable, optimal and strategyproof; {} transcripts exact", TABLES.len()))
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 3..=5 {
        let orders = all_orders(n);
        for _ in 0..1000 {
            let q = PrioritySet::new((0..n).map(|_| orders.choose(&mut rng).unwrap().clone()).collect()).unwrap();
            let mut sigma: Vec<usize> = (0..n).collect();
            let mut pi: Vec<usize> = (0..n).collect();
            sigma.shuffle(&mut rng);
            pi.shuffle(&mut rng);
            ensure(canonical_form(&q.relabeled(&sigma, &pi)) == canonical_form(&q), || format!("canonical form moved for {q}"))?;
        }
    }
    let mut trees = Vec::new();
    for q in enumerate_priority_sets(3).filter(|q| classify(q).is_limited_cyclic() && is_cyclic(q)) {
        trees.push(synthesize(&q).unwrap());
    }
    for q in cyclic_osp_4x4() {
        trees.push(synthesize(&q).unwrap());
    }
    for k in 0..100 {
        let t = &trees[k % trees.len()];
        let keep: Vec<Vec<u32>> = t
            .universe()
            .iter()
            .map(|u| {
                let mut ids: Vec<u32> = (0..u.len() as u32).collect();
                ids.shuffle(&mut rng);
                ids.truncate(rng.random_range(1..=u.len()));
                ids.sort_unstable();
                ids
            })
            .collect();
        let p = prune(t, &keep).map_err(|e| e.to_string())?;
        p.validate().map_err(|e| e.to_string())?;
        ensure(check_osp(&p).map_err(|e| e.to_string())?.ok(), || format!("pruned tree {k} not OSP"))?;
        let ids: Vec<u32> = keep.iter().map(|k| rng.random_range(0..k.len() as u32)).collect();
        let orig: Vec<u32> = ids.iter().zip(&keep).map(|(&i, k)| k[i as usize]).collect();
        ensure(p.leaf_matching(p.leaf_for(&ids)) == t.leaf_matching(t.leaf_for(&orig)), || format!("pruned tree {k} plays differently"))?;
    }
    let a = find_witness(&three_cycle(), 100_000, 1).map_err(|e| e.to_string())?;
    let b = find_witness(&three_cycle(), 100_000, 1).map_err(|e| e.to_string())?;
    ensure(a == b, || "search is not deterministic".into())?;
    let d = a.ok_or("no certificate for the three-cycle within 100000")?;
    ensure(check_witness(&three_cycle(), &d).unwrap().holds, || "found certificate fails".into())?;
    Ok("3000 relabelings, 100 pruned trees, deterministic search".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("3x3 full sweep", Duration::from_secs(60), sweep_3x3),
        ("3x3 constructive sweep", Duration::from_secs(300), constructive_3x3),
        ("4x4 classifier equivalence", Duration::from_secs(900), equivalence_4x4),
        ("fixture certification", Duration::from_secs(10), fixture_certification),
        ("flagship 6x6", Duration::from_secs(300), flagship),
        ("deferred acceptance oracles", Duration::from_secs(120), da_oracles),
        ("property suite", Duration::from_secs(600), properties),
    ];
    let mut failed = 0;
    for (k, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|m| {
            if elapsed > limit {
                Err(format!("{m}; over the {}s limit", limit.as_secs()))
            } else {
                Ok(m)
            }
        });
        match outcome {
            Ok(m) => println!("PASS criterion {}: {name}: {m} ({:.1}s)", k + 1, elapsed.as_secs_f64()),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {m} ({:.1}s)", k + 1, elapsed.as_secs_f64());
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
