use std::collections::{HashMap, VecDeque};

use crate::model::{BiolinkParams, MeterDef};
use crate::runtime::minigame::{biolink_update, BiolinkAction, BiolinkState, Outcome};
use crate::runtime::MiniState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    /// Success is reachable; the witness is a shortest winning sequence.
    Winnable(Vec<BiolinkAction>),
    /// Success is unreachable and every play ends in loss of control.
    LossyOnly,
    /// Success is unreachable but some plays can go on forever.
    Unwinnable,
}

type Key = (BiolinkState, i64);

fn initial(params: &BiolinkParams) -> BiolinkState {
    match MiniState::fresh(&crate::model::MiniGame::Biolink(params.clone())) {
        MiniState::Biolink(s) => s,
        _ => unreachable!("fresh biolink state"),
    }
}

/// Breadth-first search from a fresh board with the meter at `meter`.
/// Returns a shortest non-empty action sequence whose last action ends the
/// game with `goal`, if there is one.
pub fn biolink_shortest(params: &BiolinkParams, meter_def: &MeterDef, meter: i64, goal: Outcome) -> Option<Vec<BiolinkAction>> {
    let start: Key = (initial(params), meter_def.clamp(meter));
    let mut parent: HashMap<Key, Option<(Key, BiolinkAction)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let path = |parent: &HashMap<Key, Option<(Key, BiolinkAction)>>, mut k: Key, last: BiolinkAction| {
        let mut out = vec![last];
        while let Some(Some((p, a))) = parent.get(&k) {
            out.push(*a);
            k = p.clone();
        }
        out.reverse();
        out
    };
    while let Some(key) = queue.pop_front() {
        for a in BiolinkAction::ALL {
            let step = biolink_update(params, meter_def, &key.0, key.1, a);
            match step.outcome {
                o if o == goal => return Some(path(&parent, key, a)),
                Outcome::Continue => {
                    let next = (step.state, step.meter);
                    if !parent.contains_key(&next) {
                        parent.insert(next.clone(), Some((key.clone(), a)));
                        queue.push_back(next);
                    }
                }
                _ => {}
            }
        }
    }
    None
}

/// Classifies a bio-link board played from the meter's initial value.
pub fn biolink_feasible(params: &BiolinkParams, meter_def: &MeterDef) -> Feasibility {
    if params.required_trash == 0 {
        return Feasibility::Winnable(Vec::new());
    }
    if let Some(w) = biolink_shortest(params, meter_def, meter_def.init, Outcome::Success) {
        return Feasibility::Winnable(w);
    }
    if continue_graph_is_acyclic(params, meter_def) {
        Feasibility::LossyOnly
    } else {
        Feasibility::Unwinnable
    }
}

/// Whether the states reachable without ending the game form a DAG, so
/// every play is finite.
fn continue_graph_is_acyclic(params: &BiolinkParams, meter_def: &MeterDef) -> bool {
    let start: Key = (initial(params), meter_def.init);
    let mut succ: HashMap<Key, Vec<Key>> = HashMap::new();
    let mut queue = VecDeque::from([start.clone()]);
    succ.insert(start, Vec::new());
    while let Some(key) = queue.pop_front() {
        let mut out = Vec::new();
        for a in BiolinkAction::ALL {
            let step = biolink_update(params, meter_def, &key.0, key.1, a);
            if step.outcome == Outcome::Continue {
                let next = (step.state, step.meter);
                if !succ.contains_key(&next) {
                    succ.insert(next.clone(), Vec::new());
                    queue.push_back(next.clone());
                }
                out.push(next);
            }
        }
        succ.insert(key, out);
    }
    // Kahn's algorithm: acyclic iff every state gets removed.
    let mut indegree: HashMap<&Key, usize> = succ.keys().map(|k| (k, 0)).collect();
    for outs in succ.values() {
        for t in outs {
            *indegree.get_mut(t).expect("successor recorded") += 1;
        }
    }
    let mut ready: Vec<&Key> = indegree.iter().filter(|(_, d)| **d == 0).map(|(k, _)| *k).collect();
    let mut removed = 0;
    while let Some(k) = ready.pop() {
        removed += 1;
        for t in &succ[k] {
            let d = indegree.get_mut(t).expect("successor recorded");
            *d -= 1;
            if *d == 0 {
                ready.push(t);
            }
        }
    }
    removed == succ.len()
}
