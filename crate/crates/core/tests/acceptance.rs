//! Acceptance checks, one line per criterion. Runs as part of `cargo test`.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{random_graph, random_run, SMALL};
use fuselage::analysis::{biolink_feasible, exact_reachable, overapprox_reachable, replay, trace_to, Feasibility};
use fuselage::assets::MASK_STORY;
use fuselage::model::{
    self, BiolinkParams, Channel, Device, Effect, EndingKind, Guard, MeterDef, MiniGame, NodeBody, StoryGraph,
    KEYPAD_SUBMIT,
};
use fuselage::runtime::minigame::{biolink_update, BiolinkAction, BiolinkState, Outcome};
use fuselage::runtime::{Direction, EngineNote, Event, MiniAction, MiniState, Payload, SaveError, SaveState, Session};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const CHILD_ENV: &str = "FUSELAGE_ACCEPTANCE_CHILD";

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn mask() -> Arc<StoryGraph> {
    Arc::new(fuselage::compile(MASK_STORY).expect("mask compiles").graph)
}

fn mask_endings() -> Result<String, String> {
    let t0 = Instant::now();
    let compiled = fuselage::compile(MASK_STORY).map_err(|d| format!("{} diagnostics", d.len()))?;
    ensure(compiled.warnings.is_empty(), || format!("{} warnings", compiled.warnings.len()))?;
    let g = Arc::new(compiled.graph);
    let kinds: Vec<EndingKind> = g.endings().into_values().collect();
    let mains = kinds.iter().filter(|k| **k == EndingKind::Main).count();
    ensure(mains == 1 && kinds.len() == 3, || format!("{mains} main of {} endings", kinds.len()))?;
    for id in g.endings().into_keys() {
        let trace = trace_to(&g, id).map_err(|e| e.to_string())?;
        let mut s = replay(g.clone(), &trace)?;
        s.apply(&Event::touch(Payload::Ack)).map_err(|e| e.to_string())?;
        ensure(s.finished() == Some(id), || format!("{id}: replay finished at {:?}", s.finished()))?;
    }
    let took = t0.elapsed();
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("1 main + 2 sub endings, all 3 replayed to finish in {} ms", took.as_millis()))
}

fn determinism() -> Result<String, String> {
    let mut events_total = 0;
    for i in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(i);
        let g = random_graph(&mut rng, SMALL);
        let seed = rng.gen();
        let len = rng.gen_range(1..=200);
        let events = random_run(&mut rng, &Session::new(Arc::new(g.clone()), seed), len);
        events_total += events.len();
        let run = |graph: StoryGraph| {
            let mut s = Session::new(Arc::new(graph), seed);
            let mut notes = Vec::new();
            let mut accepted = 0;
            for e in &events {
                let before = s.event_count();
                notes.push(s.apply(e).expect("events were generated on this graph"));
                accepted += (s.event_count() > before) as u64;
            }
            (s, notes, accepted)
        };
        let (a, na, acc) = run(g.clone());
        let (b, nb, _) = run(g);
        ensure(a == b && na == nb, || format!("graph {i}: replays diverged"))?;
        ensure(a.event_count() == acc, || format!("graph {i}: event_count != accepted events"))?;
    }
    Ok(format!("1000 random runs ({events_total} events), 0 divergences"))
}

/// Brute-force reachability: walk every choice and both mini-game outcomes
/// with real item counts (capped to keep the search finite) and meters
/// ignored.
fn brute_reachable(g: &StoryGraph) -> BTreeSet<String> {
    type State = (String, BTreeSet<String>, BTreeMap<String, u8>);
    let mut seen: HashSet<State> = HashSet::new();
    let mut stack: Vec<State> = vec![(g.start.clone(), BTreeSet::new(), BTreeMap::new())];
    let mut out = BTreeSet::new();
    let holds = |flags: &BTreeSet<String>, inv: &BTreeMap<String, u8>, guard: &Guard| match guard {
        Guard::FlagSet { flag } => flags.contains(flag),
        Guard::FlagClear { flag } => !flags.contains(flag),
        Guard::ItemHeld { item } => inv.get(item).copied().unwrap_or(0) > 0,
        Guard::Meter { .. } => true,
    };
    let apply = |flags: &BTreeSet<String>, inv: &BTreeMap<String, u8>, effects: &[Effect]| {
        let (mut f, mut i) = (flags.clone(), inv.clone());
        for e in effects {
            match e {
                Effect::SetFlag { flag } => {
                    f.insert(flag.clone());
                }
                Effect::ClearFlag { flag } => {
                    f.remove(flag);
                }
                Effect::GiveItem { item } => {
                    let c = i.entry(item.clone()).or_insert(0);
                    *c = (*c + 1).min(3);
                }
                Effect::TakeItem { item } => {
                    if let Some(c) = i.get_mut(item) {
                        *c = c.saturating_sub(1);
                    }
                }
                Effect::MeterDelta { .. } => {}
            }
        }
        i.retain(|_, c| *c > 0);
        (f, i)
    };
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let (id, flags, inv) = state;
        out.insert(id.clone());
        match &g.nodes[&id].body {
            NodeBody::Narration { next, effects, .. } => {
                let (f, i) = apply(&flags, &inv, effects);
                stack.push((next.clone(), f, i));
            }
            NodeBody::Choice { options, .. } => {
                for o in options.iter().filter(|o| o.guards.iter().all(|gd| holds(&flags, &inv, gd))) {
                    let (f, i) = apply(&flags, &inv, &o.effects);
                    stack.push((o.target.clone(), f, i));
                }
            }
            NodeBody::MiniGame { success, failure, .. } => {
                stack.push((success.clone(), flags.clone(), inv.clone()));
                stack.push((failure.clone(), flags, inv));
            }
            NodeBody::Ending { .. } => {}
        }
    }
    out
}

fn reachability_oracle() -> Result<String, String> {
    let t0 = Instant::now();
    let mut pruned = 0;
    for i in 0..500u64 {
        let mut rng = StdRng::seed_from_u64(10_000 + i);
        let g = random_graph(&mut rng, SMALL);
        let exact = exact_reachable(&g).map_err(|e| e.to_string())?;
        let brute = brute_reachable(&g);
        ensure(exact == brute, || format!("graph {i}: exact {exact:?} vs brute force {brute:?}"))?;
        let over = overapprox_reachable(&g);
        ensure(exact.is_subset(&over), || format!("graph {i}: exact not within over-approximation"))?;
        pruned += (exact != over) as usize;
    }
    let took = t0.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("500 graphs, 0 mismatches ({pruned} with guard-pruned nodes) in {} ms", took.as_millis()))
}

/// Shortest winning length up to `limit` by exhaustive enumeration of
/// action sequences, memoised on (state, meter, remaining length).
fn enumerate_win(p: &BiolinkParams, m: &MeterDef, limit: usize) -> Option<usize> {
    fn wins(
        p: &BiolinkParams,
        m: &MeterDef,
        s: &BiolinkState,
        meter: i64,
        k: usize,
        memo: &mut HashMap<(BiolinkState, i64, usize), bool>,
    ) -> bool {
        if k == 0 {
            return false;
        }
        if let Some(&r) = memo.get(&(s.clone(), meter, k)) {
            return r;
        }
        let r = BiolinkAction::ALL.iter().any(|&a| {
            let step = biolink_update(p, m, s, meter, a);
            match step.outcome {
                Outcome::Success => true,
                Outcome::Failure => false,
                Outcome::Continue => wins(p, m, &step.state, step.meter, k - 1, memo),
            }
        });
        memo.insert((s.clone(), meter, k), r);
        r
    }
    if p.required_trash == 0 {
        return Some(0);
    }
    let MiniState::Biolink(start) = MiniState::fresh(&MiniGame::Biolink(p.clone())) else { unreachable!() };
    let mut memo = HashMap::new();
    (1..=limit).find(|&k| wins(p, m, &start, m.init, k, &mut memo))
}

fn biolink_oracle() -> Result<String, String> {
    let mut winnable = 0;
    for i in 0..200u64 {
        let mut rng = StdRng::seed_from_u64(20_000 + i);
        let (w, h) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let required = rng.gen_range(0..=(w * h - 1).min(3));
        let max = rng.gen_range(5..=30);
        let m = MeterDef { name: "fw".into(), min: 0, max, init: rng.gen_range(0..=max) };
        let p = BiolinkParams {
            creature: "newt".into(),
            grid: common::grid(&mut rng, w, h, required),
            command_cost: rng.gen_range(0..=6),
            idle_regen: rng.gen_range(0..=4),
            loss_threshold: rng.gen_range(-2..=3),
            meter: "fw".into(),
            required_trash: required as u32,
            visibility: 2,
        };
        let oracle = enumerate_win(&p, &m, 12);
        match biolink_feasible(&p, &m) {
            Feasibility::Winnable(witness) => {
                winnable += 1;
                let expected = (witness.len() <= 12).then_some(witness.len());
                ensure(oracle == expected, || format!("grid {i}: witness {} vs enumeration {oracle:?}", witness.len()))?;
                let MiniState::Biolink(mut s) = MiniState::fresh(&MiniGame::Biolink(p.clone())) else { unreachable!() };
                let mut meter = m.init;
                for (k, a) in witness.iter().enumerate() {
                    let step = biolink_update(&p, &m, &s, meter, *a);
                    let want = if k + 1 == witness.len() { Outcome::Success } else { Outcome::Continue };
                    ensure(step.outcome == want, || format!("grid {i}: witness step {k} gave {:?}", step.outcome))?;
                    s = step.state;
                    meter = step.meter;
                }
            }
            _ => ensure(oracle.is_none(), || format!("grid {i}: enumeration wins in {oracle:?}, search says no"))?,
        }
    }
    Ok(format!("200 grids ({winnable} winnable), all agree with length-12 enumeration, witnesses replay"))
}

fn meter_clamping() -> Result<String, String> {
    let mut checked = 0usize;
    for i in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(30_000 + i);
        let g = Arc::new(random_graph(&mut rng, SMALL));
        let mut s = Session::new(g.clone(), i);
        for e in random_run(&mut rng, &s, 200) {
            s.apply(&e).map_err(|e| e.to_string())?;
            for def in &g.meters {
                let v = s.meter(&def.name).expect("declared meter present");
                ensure(def.min <= v && v <= def.max, || format!("graph {i}: {} = {v}", def.name))?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} meter readings across 1000 runs, all within bounds"))
}

fn save_restore() -> Result<String, String> {
    for i in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(40_000 + i);
        let g = random_graph(&mut rng, SMALL);
        let arc = Arc::new(g.clone());
        let mut s = Session::new(arc.clone(), rng.gen());
        let len = rng.gen_range(0..=200);
        for e in random_run(&mut rng, &s, len) {
            s.apply(&e).map_err(|e| e.to_string())?;
        }
        let bytes = s.save().to_json();
        let back = SaveState::from_json(bytes.as_bytes()).map_err(|e| format!("prefix {i}: {e}"))?;
        let restored = Session::restore(Arc::new(g.clone()), &back).map_err(|e| format!("prefix {i}: {e}"))?;
        ensure(restored == s, || format!("prefix {i}: restored session differs"))?;
        let mut edited = g;
        if i % 2 == 0 {
            edited.title.push('*');
        } else {
            edited.flags.push("extra".into());
        }
        let err = Session::restore(Arc::new(edited), &back);
        ensure(matches!(err, Err(SaveError::HashMismatch { .. })), || format!("prefix {i}: edited story accepted"))?;
    }
    Ok("1000 prefixes round-trip, 1000/1000 edited stories rejected".into())
}

fn payloads_for(s: &Session) -> Vec<Payload> {
    let mut out = vec![
        Payload::Advance,
        Payload::Ack,
        Payload::Choose(0),
        Payload::Choose(1),
        Payload::Key('1'),
        Payload::Key(KEYPAD_SUBMIT),
        Payload::Mini(MiniAction::Grab),
        Payload::Mini(MiniAction::Wait),
        Payload::Mini(MiniAction::Submit),
        Payload::Mini(MiniAction::Backspace),
        Payload::Mini(MiniAction::Scan { x: 0, y: 0 }),
    ];
    out.extend(Direction::ALL.map(|d| Payload::Mini(MiniAction::Move(d))));
    if let NodeBody::MiniGame { game: MiniGame::Sequence(p), .. } = &s.node().body {
        out.extend(p.steps.iter().map(|st| Payload::Mini(MiniAction::Do(st.id.clone()))));
    }
    out
}

fn channel_gating() -> Result<String, String> {
    let g = mask();
    let mut sessions = Vec::new();
    for id in exact_reachable(&g).map_err(|e| e.to_string())? {
        let trace = trace_to(&g, &id).map_err(|e| e.to_string())?;
        let mut s = Session::new(g.clone(), 0);
        sessions.push(s.clone());
        for step in &trace {
            s.apply(&step.event).map_err(|e| e.to_string())?;
            sessions.push(s.clone());
        }
    }
    let (mut touch_only, mut handset_only, mut probes) = (BTreeSet::new(), BTreeSet::new(), 0);
    for s in &sessions {
        let wrong = match s.node().channel {
            Channel::Touch => Device::Handset,
            Channel::Handset => Device::Touch,
            Channel::Any => continue,
        };
        let set = if wrong == Device::Handset { &mut touch_only } else { &mut handset_only };
        set.insert(s.current().to_string());
        for p in payloads_for(s) {
            let (after, notes) = s.apply_event(&Event::new(wrong, p.clone())).map_err(|e| e.to_string())?;
            ensure(notes == [EngineNote::WrongChannel] && after == *s, || format!("{}: {wrong} {p:?} got through", s.current()))?;
            probes += 1;
        }
    }
    ensure(!touch_only.is_empty() && !handset_only.is_empty(), || "no gated nodes visited".into())?;
    Ok(format!(
        "{} touch-only and {} handset-only nodes, {probes} wrong-device probes all rejected",
        touch_only.len(),
        handset_only.len()
    ))
}

fn canonical_encoding() -> Result<String, String> {
    let local = model::encode(&mask()).map_err(|e| e.to_string())?;
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for _ in 0..2 {
        let out = Command::new(&exe).env(CHILD_ENV, "encode").output().map_err(|e| e.to_string())?;
        ensure(out.status.success(), || "child process failed".into())?;
        outputs.push(out.stdout);
    }
    ensure(outputs[0] == outputs[1], || "two processes disagree".into())?;
    ensure(outputs[0] == local, || "child bytes differ from in-process bytes".into())?;

    let corpus = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut graphs = Vec::new();
    for (dir, is_source) in [("decode_graph", false), ("compile_story", true)] {
        let entries = std::fs::read_dir(corpus.join(dir)).map_err(|e| format!("{dir}: {e}"))?;
        for entry in entries {
            let bytes = std::fs::read(entry.map_err(|e| e.to_string())?.path()).map_err(|e| e.to_string())?;
            let g = if is_source {
                std::str::from_utf8(&bytes).ok().and_then(|s| fuselage::compile(s).ok()).map(|c| c.graph)
            } else {
                model::decode(&bytes).ok()
            };
            graphs.extend(g);
        }
    }
    ensure(!graphs.is_empty(), || "fuzz corpus holds no valid graphs".into())?;
    for g in &graphs {
        let bytes = model::encode(g).map_err(|e| e.to_string())?;
        let back = model::decode(&bytes).map_err(|e| e.to_string())?;
        ensure(&back == g, || format!("`{}` does not survive decode(encode)", g.title))?;
        ensure(model::encode(&back).ok() == Some(bytes), || "re-encoding changed bytes".into())?;
    }
    Ok(format!("{} bytes identical across 2 processes; {} corpus graphs round-trip", local.len(), graphs.len()))
}

fn main() -> ExitCode {
    if std::env::var(CHILD_ENV).as_deref() == Ok("encode") {
        let bytes = model::encode(&mask()).expect("mask encodes");
        std::io::stdout().write_all(&bytes).expect("stdout");
        return ExitCode::SUCCESS;
    }
    // `cargo test -- --list` and friends: nothing to enumerate.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let checks: [(&str, Check); 8] = [
        ("mask-endings", mask_endings),
        ("determinism", determinism),
        ("reachability-oracle", reachability_oracle),
        ("biolink-oracle", biolink_oracle),
        ("meter-clamping", meter_clamping),
        ("save-restore", save_restore),
        ("channel-gating", channel_gating),
        ("canonical-encoding", canonical_encoding),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let t0 = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let ms = t0.elapsed().as_millis();
        match result {
            Ok(detail) => println!("PASS {name:<20} {detail} [{ms} ms]"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name:<20} {why} [{ms} ms]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
