//! Acceptance suite: one PASS/FAIL line per criterion, then a single assertion.
//! Run with `cargo test -p apf-core --test acceptance -- --nocapture` to see the lines.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use apf_core::algorithm::{move_ready, Mutation, Rules};
use apf_core::configuration::nominees;
use apf_core::harness::{batch, gen_instance, instance_seed, BatchSpec, SchedulerKind};
use apf_core::simulator::{
    epoch_bound, explore_schedules, fsync_symmetry_experiment, run, ActivationPolicy, Mode, RunOptions, SimError,
    SymmetryRule, ViolationKind,
};
use apf_core::{classify, ConfigClass, Configuration, GapSequence, TurnAngle};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const SEED: u64 = 20_240_611;
const BATCH_NS: [usize; 6] = [3, 5, 7, 9, 11, 15];
const BATCH_TRIALS: usize = 50;
const BATCH_TIME_LIMIT: Duration = Duration::from_secs(120);
const ALLOWED_VIOLATIONS: usize = 0;
const ALLOWED_COLLISIONS: usize = 0;
const GRID: i64 = 24;
const RANDOM_NOMINEE_INSTANCES: usize = 10_000;
const EXPLORE_BUDGET: usize = 4;
const EXPLORE_INSTANCES: u64 = 40;
const EXPLORE_TIME_LIMIT: Duration = Duration::from_secs(60);
const SYMMETRIC_INSTANCES: usize = 20;
const SYMMETRY_ROUNDS: usize = 10;
const RANDOMIZED_NS: [usize; 3] = [4, 6, 8];
const RANDOMIZED_TRIALS: usize = 100;
const ORACLE_INSTANCES: usize = 1000;

fn within(count: usize, tolerance: usize) -> bool {
    count <= tolerance
}

struct Line {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn count_kind(cells: &[apf_core::harness::BatchCell], kinds: &[ViolationKind]) -> usize {
    cells.iter().flat_map(|c| kinds.iter().map(move |k| c.by_kind.get(k).copied().unwrap_or(0))).sum()
}

fn criteria_from_batch(out: &mut Vec<Line>) {
    let spec = BatchSpec::new(BATCH_NS.to_vec(), BATCH_TRIALS, SEED, Mode::Deterministic);
    let start = Instant::now();
    let cells = batch(&spec);
    let took = start.elapsed();
    let runs: usize = cells.iter().map(|c| c.trials).sum();
    let formed: usize = cells.iter().map(|c| c.formed).sum();
    let over_bound = cells.iter().filter(|c| c.max_epochs > c.bound).count()
        + count_kind(&cells, &[ViolationKind::BoundExceeded, ViolationKind::NotFormed, ViolationKind::TerminationLate]);
    let worst = cells.iter().map(|c| format!("n={} {}:{}/{}", c.n, c.scheduler, c.max_epochs, c.bound));
    let worst: Vec<String> = worst.collect();
    let errors = cells.iter().filter(|c| c.error.is_some()).count();
    out.push(Line {
        id: 1,
        name: "formation within n+4 epochs",
        pass: runs == BATCH_NS.len() * BATCH_TRIALS * 4
            && formed == runs
            && within(over_bound, ALLOWED_VIOLATIONS)
            && errors == 0
            && took < BATCH_TIME_LIMIT,
        detail: format!(
            "{formed}/{runs} formed, {over_bound} over bound, {took:.1?} (limit {BATCH_TIME_LIMIT:?}); worst max/bound {}",
            worst.iter().step_by(4).cloned().collect::<Vec<_>>().join(" ")
        ),
    });
    let collisions: usize =
        cells.iter().map(|c| c.collisions).sum::<usize>() + count_kind(&cells, &[ViolationKind::Collision]);
    out.push(Line {
        id: 2,
        name: "collision freedom",
        pass: within(collisions, ALLOWED_COLLISIONS),
        detail: format!("{collisions} collision witnesses over {runs} runs"),
    });
    let late = count_kind(&cells, &[ViolationKind::LeaderLate, ViolationKind::TieNotBroken]);
    out.push(Line {
        id: 3,
        name: "leader within one epoch",
        pass: within(late, ALLOWED_VIOLATIONS),
        detail: format!("{late} late leader elections"),
    });
    let phase = count_kind(
        &cells,
        &[ViolationKind::RfcLate, ViolationKind::PfcLate, ViolationKind::NoProgress, ViolationKind::StepPostcondition],
    );
    out.push(Line {
        id: 4,
        name: "phase bounds",
        pass: within(phase, ALLOWED_VIOLATIONS),
        detail: format!("{phase} phase-bound or step violations"),
    });
    let changed = count_kind(&cells, &[ViolationKind::LeaderChanged]);
    out.push(Line {
        id: 5,
        name: "leader/pivotal stability after RFC",
        pass: within(changed, ALLOWED_VIOLATIONS),
        detail: format!("{changed} leader changes"),
    });
    let other: usize = cells.iter().map(|c| c.by_kind.values().sum::<usize>()).sum();
    if other > 0 {
        for c in cells.iter().filter(|c| c.first_failure.is_some()) {
            println!("    n={} {}: {:?}", c.n, c.scheduler, c.first_failure);
        }
    }
}

fn nominee_robots(c: &Configuration) -> usize {
    nominees(c).unwrap().iter().map(|x| x.index).collect::<BTreeSet<_>>().len()
}

fn criterion_6() -> Line {
    let mut checked = 0usize;
    let mut bad = 0usize;
    for n in 3..=5usize {
        // every n-subset of the grid, in lexicographic order
        let mut idx: Vec<i64> = (0..n as i64).collect();
        loop {
            let c = Configuration::new(idx.iter().map(|&k| TurnAngle::new(k, GRID)).collect()).unwrap();
            if c.fold() == 1 {
                checked += 1;
                let k = nominee_robots(&c);
                if !(1..=2).contains(&k) || nominees(&c).unwrap() != brute_nominees(&c) {
                    bad += 1;
                }
            }
            let Some(i) = (0..n).rev().find(|&i| idx[i] < GRID - (n - i) as i64) else {
                break;
            };
            idx[i] += 1;
            for j in i + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let mut random = 0usize;
    while random < RANDOM_NOMINEE_INSTANCES {
        let n = rng.random_range(3..=12);
        let c = Configuration::new(random_positions(&mut rng, n, 1 << 12)).unwrap();
        if c.fold() > 1 {
            continue;
        }
        random += 1;
        if !(1..=2).contains(&nominee_robots(&c)) {
            bad += 1;
        }
    }
    Line {
        id: 6,
        name: "nominee count in {1, 2}",
        pass: bad == 0,
        detail: format!("{checked} asymmetric grid configurations (24ths, n = 3..5) + {random} random, {bad} bad"),
    }
}

fn criterion_7() -> Line {
    let start = Instant::now();
    let mut prefixes = 0u64;
    let mut found = Vec::new();
    let mut instances = vec![(
        Configuration::new(vec![t(0, 1), t(1, 20), t(7, 20)]).unwrap(),
        apf_core::TargetPattern::from_gaps(vec![t(1, 10), t(4, 10), t(5, 10)]).unwrap(),
    )];
    // tied start: the robot on the mirror axis has to break the tie
    instances.push((
        Configuration::new(vec![t(0, 1), t(1, 5), t(4, 5)]).unwrap(),
        apf_core::TargetPattern::from_gaps(vec![t(1, 6), t(1, 3), t(1, 2)]).unwrap(),
    ));
    instances.extend((0..EXPLORE_INSTANCES).map(|k| gen_instance(3, SEED + k, 24).unwrap()));
    for (c, p) in &instances {
        match explore_schedules(c, p, EXPLORE_BUDGET, Rules::default()) {
            Ok(r) => {
                prefixes += r.prefixes;
                if let Some((_, v)) = r.counterexample {
                    found.push(format!("{:?}", v.kind));
                }
            }
            Err(e) => found.push(e.to_string()),
        }
    }
    let (c, p) = &instances[0];
    let mutant = Rules { mutation: Some(Mutation::DropSecondGapLowerBound) };
    let caught = explore_schedules(c, p, EXPLORE_BUDGET, mutant).ok().and_then(|r| r.counterexample);
    let took = start.elapsed();
    Line {
        id: 7,
        name: "bounded exhaustive schedules",
        pass: found.is_empty() && caught.is_some() && took < EXPLORE_TIME_LIMIT,
        detail: format!(
            "{} instances, n = 3, budget {EXPLORE_BUDGET} ({} schedule prefixes each): {prefixes} transitions after merging equal states, counterexamples {found:?}; mutant caught: {}; {took:.1?}",
            instances.len(),
            26u64.pow(EXPLORE_BUDGET as u32),
            caught.map(|(_, v)| format!("{:?} at round {}", v.kind, v.round)).unwrap_or_else(|| "no".into())
        ),
    }
}

fn criterion_8() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let rules = [SymmetryRule::Stay, SymmetryRule::ForwardStep { amount: t(1, 100) }, SymmetryRule::GapMidpoint];
    let mut dropped = 0usize;
    let mut not_unsolvable = 0usize;
    for i in 0..SYMMETRIC_INSTANCES {
        let k = 2 + i % 3;
        let m = rng.random_range(1..=3usize);
        let q = 60i64;
        let sector = q / k as i64;
        let base = random_positions(&mut rng, m, sector);
        let pos: Vec<TurnAngle> = (0..k)
            .flat_map(|j| base.iter().map(move |b| b.clone() + TurnAngle::new(j as i64, k as i64)))
            .map(|x| x.wrap())
            .collect();
        let c = Configuration::new(pos).unwrap();
        let fold = c.fold();
        let tr = fsync_symmetry_experiment(&c, &rules[i % 3], SYMMETRY_ROUNDS);
        if !tr.preserved() || fold < k {
            dropped += 1;
        }
        let n = c.len();
        if n >= 3 {
            let pattern = random_pattern(&mut rng, n, 64);
            let mode = if n.is_multiple_of(2) { Mode::Randomized } else { Mode::Deterministic };
            let o = RunOptions::new(ActivationPolicy::new(SchedulerKind::Fsync.policy(n, 0.5, None), 0), mode);
            if !matches!(run(&c, &pattern, o), Err(SimError::Unsolvable { .. })) {
                not_unsolvable += 1;
            }
        }
    }
    Line {
        id: 8,
        name: "symmetry preservation",
        pass: dropped == 0 && not_unsolvable == 0,
        detail: format!(
            "{SYMMETRIC_INSTANCES} instances (k = 2, 3, 4), {SYMMETRY_ROUNDS} rounds: {dropped} fold drops, {not_unsolvable} runs not rejected"
        ),
    }
}

fn criterion_9() -> Line {
    let jobs: Vec<(usize, SchedulerKind, usize)> = RANDOMIZED_NS
        .iter()
        .flat_map(|&n| SchedulerKind::ALL.into_iter().flat_map(move |s| (0..RANDOMIZED_TRIALS).map(move |k| (n, s, k))))
        .collect();
    // every job twice: from a generated instance and from a tied start
    let jobs: Vec<(usize, SchedulerKind, usize, bool)> =
        jobs.into_iter().flat_map(|(n, s, k)| [(n, s, k, false), (n, s, k, true)]).collect();
    let results: Vec<(bool, usize, usize, usize)> = jobs
        .par_iter()
        .map(|&(n, s, k, tied)| {
            let iseed = instance_seed(SEED ^ 9, n, k);
            let (mut c, p) = gen_instance(n, iseed, 8 * n as u64).unwrap();
            if tied {
                c = random_tied(&mut ChaCha8Rng::seed_from_u64(iseed), n);
                assert!(matches!(classify(&c), Ok(ConfigClass::DoubleNomineeTied { ref on_bisector, .. }) if on_bisector.is_empty()));
            }
            let o = RunOptions::new(ActivationPolicy::new(s.policy(n, 0.5, None), iseed ^ s as u64), Mode::Randomized);
            let (rep, _) = run(&c, &p, o).unwrap();
            let joint = rep.tie_breaks.iter().filter(|d| d.epsilons.len() > 1).count();
            let repeated = rep
                .tie_breaks
                .iter()
                .filter(|d| d.epsilons.iter().collect::<BTreeSet<_>>().len() < d.epsilons.len())
                .count();
            let ok = rep.formed && rep.epochs <= epoch_bound(n, Mode::Randomized) && rep.is_clean();
            (ok, rep.tie_breaks.len(), joint, repeated)
        })
        .collect();
    let failed = results.iter().filter(|r| !r.0).count();
    let draws: usize = results.iter().map(|r| r.1).sum();
    let joint: usize = results.iter().map(|r| r.2).sum();
    let repeated: usize = results.iter().map(|r| r.3).sum();
    Line {
        id: 9,
        name: "randomized even n",
        pass: failed == 0 && repeated == 0,
        detail: format!(
            "n = 4, 6, 8 x {RANDOMIZED_TRIALS} trials x 4 schedulers, generated and tied starts: {failed} failed; {draws} tie-break rounds, {joint} with both nominees, {repeated} repeated draws"
        ),
    }
}

fn criterion_10() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 10);
    let (mut nom, mut rot, mut mr) = (0usize, 0usize, 0usize);
    let mut nominee_cases = 0;
    while nominee_cases < ORACLE_INSTANCES {
        let n = rng.random_range(3..=10);
        let c = Configuration::new(random_positions(&mut rng, n, 48)).unwrap();
        if c.fold() > 1 {
            continue;
        }
        nominee_cases += 1;
        nom += (nominees(&c).unwrap() != brute_nominees(&c)) as usize;
    }
    for _ in 0..ORACLE_INSTANCES {
        let n = rng.random_range(1..=10);
        let gaps: Vec<TurnAngle> = {
            let w: Vec<i64> = (0..n).map(|_| rng.random_range(1..4)).collect();
            let total: i64 = w.iter().sum();
            w.into_iter().map(|x| TurnAngle::new(x, total)).collect()
        };
        let (m, off) = GapSequence::new(gaps.clone()).unwrap().min_rotation();
        let (bm, boff) = brute_min_rotation(&gaps);
        rot += (m.gaps() != &bm[..] || off != boff) as usize;
    }
    let mut ready_found = 0;
    for _ in 0..ORACLE_INSTANCES {
        let n = rng.random_range(4..=10);
        let (c, _, emb) = random_rfc(&mut rng, n);
        let got = move_ready(&c, &emb).unwrap();
        ready_found += got.is_some() as usize;
        mr += (got != brute_move_ready(&c, &emb)) as usize;
    }
    Line {
        id: 10,
        name: "oracle equivalence",
        pass: nom + rot + mr == 0,
        detail: format!(
            "{ORACLE_INSTANCES} instances each: nominees {nom}, min_rotation {rot}, move_ready {mr} mismatches ({ready_found} RFCs with a Move-Ready robot)"
        ),
    }
}

#[test]
fn acceptance() {
    let mut lines = Vec::new();
    criteria_from_batch(&mut lines);
    lines.push(criterion_6());
    lines.push(criterion_7());
    lines.push(criterion_8());
    lines.push(criterion_9());
    lines.push(criterion_10());
    lines.sort_by_key(|l| l.id);
    for l in &lines {
        println!("criterion {:>2} {}: {} ({})", l.id, if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.pass).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
