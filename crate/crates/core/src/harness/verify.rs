//! Offline replay of a recorded trace.

use serde::{Deserialize, Serialize};

use crate::algorithm::{compute, plan, Decision, Plan, Rules, TargetPattern};
use crate::circle_math::{angle_between, TurnAngle};
use crate::configuration::{classify, ConfigClass, Configuration};

use crate::simulator::{
    check_step, detect_collision, epoch_bound, to_global, view_of, Mode, RoundRecord, Violation, ViolationKind,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub rounds: usize,
    pub epochs: usize,
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

fn distinct(p: &[TurnAngle]) -> bool {
    Configuration::new(p.to_vec()).is_ok_and(|c| c.len() == p.len())
}

/// Does `d` fit the randomized tie break for nominee `id`?
fn valid_draw(
    before: &crate::simulator::View,
    nominees: &[crate::configuration::Nominee],
    id: usize,
    d: &Decision,
) -> bool {
    let Decision::MoveTo { destination, path_direction } = d else {
        return false;
    };
    let i = before.index_of_id(id);
    let alpha0 = before.config.gaps().into_iter().min().expect("nonempty");
    let eps = angle_between(before.config.position(i), destination, *path_direction);
    nominees.iter().any(|x| x.index == i && x.direction == *path_direction) && eps.is_positive() && eps < alpha0.half()
}

/// Replay `records` against `pattern`: classification, every decision, collisions,
/// epoch numbering and the epoch bound.
pub fn verify_trace(records: &[RoundRecord], pattern: &TargetPattern) -> Verdict {
    let mut violations = Vec::new();
    let mut flag =
        |round: usize, kind: ViolationKind, detail: String| violations.push(Violation { round, kind, detail });
    let Some(first) = records.first() else {
        return Verdict { rounds: 0, epochs: 0, violations };
    };
    let n = first.positions_before.len();
    let mode = if n.is_multiple_of(2) { Mode::Randomized } else { Mode::Deterministic };
    let mut seen = vec![false; n];
    let mut terminated = vec![false; n];
    let mut completed = 0usize;
    let mut anchor = None;
    let mut prev_after: Option<&Vec<TurnAngle>> = None;

    for (k, r) in records.iter().enumerate() {
        let round = r.round;
        if round != k + 1 {
            flag(round, ViolationKind::TraceInconsistent, format!("expected round {}", k + 1));
        }
        if r.positions_before.len() != n || r.positions_after.len() != n || !distinct(&r.positions_before) {
            flag(round, ViolationKind::TraceInconsistent, "bad position vector".into());
            break;
        }
        if prev_after.is_some_and(|p| p != &r.positions_before) {
            flag(round, ViolationKind::TraceInconsistent, "positions do not continue the previous round".into());
        }
        prev_after = Some(&r.positions_after);
        if r.epoch != completed + 1 {
            flag(
                round,
                ViolationKind::EpochMismatch,
                format!("recorded epoch {}, expected {}", r.epoch, completed + 1),
            );
        }

        let before = view_of(&r.positions_before);
        let global_plan = plan(&before.config, pattern, Rules::default());
        let mut applied = r.positions_before.clone();
        let mut by_id = vec![Decision::Stay; n];
        let mut moved = Vec::new();
        if r.decisions.keys().copied().collect::<Vec<_>>() != r.activated {
            flag(round, ViolationKind::TraceInconsistent, "decisions do not match the activated set".into());
        }
        for (&id, d) in &r.decisions {
            if id >= n {
                flag(round, ViolationKind::TraceInconsistent, format!("robot {id} out of range"));
                continue;
            }
            let i = before.index_of_id(id);
            let ok = if terminated[id] {
                *d == Decision::Terminate
            } else if let Ok(Plan::RandomTieBreak { nominees }) = &global_plan {
                if nominees.iter().any(|x| x.index == i) {
                    valid_draw(&before, nominees, id, d)
                } else {
                    *d == Decision::Stay
                }
            } else {
                [false, true].iter().any(|&flip| {
                    let s = before.config.snapshot_of(i, flip).expect("index in range");
                    compute(&s, pattern, None).is_ok_and(|x| to_global(before.config.position(i), flip, x) == *d)
                })
            };
            if !ok {
                flag(round, ViolationKind::DecisionMismatch, format!("robot {id}: {d:?}"));
            }
            match d {
                Decision::MoveTo { destination, .. } => {
                    applied[id] = destination.clone();
                    moved.push(id);
                }
                Decision::Terminate => terminated[id] = true,
                Decision::Stay => {}
            }
            by_id[id] = d.clone();
        }
        if applied != r.positions_after {
            flag(round, ViolationKind::TraceInconsistent, "positions_after disagree with the decisions".into());
        }
        if let Some(w) = detect_collision(&r.positions_before, &by_id) {
            flag(round, ViolationKind::Collision, format!("robots {} and {} at t = {}", w.first, w.second, w.time));
        }
        if !distinct(&r.positions_after) {
            continue;
        }
        let after = view_of(&r.positions_after);
        let class = classify(&after.config).unwrap_or(ConfigClass::Symmetric { fold: 0 });
        if class != r.class {
            flag(round, ViolationKind::Classification, format!("recorded {:?}, actual {class:?}", r.class));
        }
        if let Ok(p) = &global_plan {
            for (kind, msg) in check_step(&before, &after, p, &moved, pattern, &mut anchor) {
                flag(round, kind, msg);
            }
        }
        for &id in &r.activated {
            if id < n {
                seen[id] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            completed += 1;
            seen.iter_mut().for_each(|s| *s = false);
        }
    }
    let last = records.last().expect("nonempty");
    let epochs = last.epoch;
    let bound = epoch_bound(n, mode);
    if !terminated.iter().all(|&t| t) {
        flag(last.round, ViolationKind::NotFormed, "trace ends before every robot terminated".into());
    }
    if epochs > bound {
        flag(last.round, ViolationKind::BoundExceeded, format!("{epochs} epochs > {bound}"));
    }
    Verdict { rounds: records.len(), epochs, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::gen_instance;
    use crate::simulator::{run, ActivationPolicy, PolicyKind, RunOptions};

    fn recorded(n: usize, seed: u64) -> (Vec<RoundRecord>, TargetPattern) {
        let (c, p) = gen_instance(n, seed, 8 * n as u64).unwrap();
        let mode = if n.is_multiple_of(2) { Mode::Randomized } else { Mode::Deterministic };
        let policy = ActivationPolicy::new(PolicyKind::RandomSubset { p: 0.5, fairness: n }, seed);
        let mut o = RunOptions::new(policy, mode);
        o.record_trace = true;
        let (report, records) = run(&c, &p, o).unwrap();
        assert!(report.is_clean(), "{report:?}");
        (records, p)
    }

    #[test]
    fn honest_traces_verify() {
        for (n, seed) in [(3, 1), (5, 2), (4, 3), (6, 4)] {
            let (records, p) = recorded(n, seed);
            let v = verify_trace(&records, &p);
            assert!(v.is_clean(), "n = {n}: {:?}", v.violations);
        }
    }

    #[test]
    fn tampered_decision_is_reported() {
        let (mut records, p) = recorded(5, 9);
        let k = records.iter().position(|r| r.decisions.values().any(Decision::is_move)).unwrap();
        let (&id, _) = records[k].decisions.iter().find(|(_, d)| d.is_move()).unwrap();
        let here = records[k].positions_before[id].clone();
        records[k].decisions.insert(id, Decision::Stay);
        records[k].positions_after[id] = here;
        let v = verify_trace(&records, &p);
        let first = v.violations.first().expect("must fail");
        assert_eq!(first.kind, ViolationKind::DecisionMismatch);
        assert_eq!(first.round, records[k].round);
    }

    #[test]
    fn wrong_epoch_is_reported() {
        let (mut records, p) = recorded(3, 5);
        let last = records.len() - 1;
        records[last].epoch += 1;
        let v = verify_trace(&records, &p);
        assert!(v.violations.iter().any(|x| x.kind == ViolationKind::EpochMismatch));
    }

    #[test]
    fn empty_trace_is_vacuous() {
        let p = TargetPattern::from_gaps(vec![TurnAngle::new(1, 3); 3]).unwrap();
        assert!(verify_trace(&[], &p).is_clean());
    }
}
