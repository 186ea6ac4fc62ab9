//! Text-mode play loop.
//!
//! One command per input line. Input goes out on the emulated device shown
//! in the prompt; `tab` (or a bare tab character) switches between the
//! seat-back touch screen and the handset.

use std::io::BufRead;
use std::path::Path;
use std::sync::Arc;

use fuselage::model::{Device, StoryGraph, KEYPAD_SUBMIT};
use fuselage::runtime::{Direction, Event, MiniAction, MiniView, Payload, SaveState, Session, View};

use super::{Fail, Out, EXIT_CONTENT, EXIT_USAGE};

pub const HELP: &str = "\
commands:
  <enter>          next page, or acknowledge an ending
  <n>              pick option n
  tab              switch between touch and handset
  n s e w          move (also north, south, east, west)
  grab, wait       biolink actions
  scan <x> <y>     scan a cell
  key <c>          press one keypad key (`key space` for a space)
  type <text>      press each key of <text>
  submit, back     keypad enter and backspace
  do <step>        perform a sequence step
  look             show the screen again
  save             write the save file
  quit             leave
";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    Toggle,
    Send(Payload),
    Type(String),
    Look,
    Save,
    Help,
    Quit,
}

/// Parses one input line. `at_ending` decides what an empty line means.
pub fn parse_command(line: &str, at_ending: bool) -> Result<Command, String> {
    if line.contains('\t') && line.trim().is_empty() {
        return Ok(Command::Toggle);
    }
    let line = line.trim_end_matches(['\r', '\n']);
    let trimmed = line.trim();
    if trimmed.is_empty() {
        return Ok(Command::Send(if at_ending { Payload::Ack } else { Payload::Advance }));
    }
    if let Ok(n) = trimmed.parse::<usize>() {
        return match n.checked_sub(1) {
            Some(i) => Ok(Command::Send(Payload::Choose(i))),
            None => Err("options are numbered from 1".into()),
        };
    }
    let (word, rest) = trimmed.split_once(char::is_whitespace).map_or((trimmed, ""), |(w, r)| (w, r.trim()));
    let mini = |a| Ok(Command::Send(Payload::Mini(a)));
    match (word.to_ascii_lowercase().as_str(), rest) {
        ("tab", "") => Ok(Command::Toggle),
        ("advance" | "next", "") => Ok(Command::Send(Payload::Advance)),
        ("ack", "") => Ok(Command::Send(Payload::Ack)),
        ("n" | "north", "") => mini(MiniAction::Move(Direction::North)),
        ("s" | "south", "") => mini(MiniAction::Move(Direction::South)),
        ("e" | "east", "") => mini(MiniAction::Move(Direction::East)),
        ("w" | "west", "") => mini(MiniAction::Move(Direction::West)),
        ("grab", "") => mini(MiniAction::Grab),
        ("wait", "") => mini(MiniAction::Wait),
        ("submit", "") => Ok(Command::Send(Payload::Key(KEYPAD_SUBMIT))),
        ("back" | "backspace", "") => mini(MiniAction::Backspace),
        ("look", "") => Ok(Command::Look),
        ("save", "") => Ok(Command::Save),
        ("help" | "?", "") => Ok(Command::Help),
        ("quit" | "exit", "") => Ok(Command::Quit),
        ("scan", xy) => {
            let parts: Vec<&str> = xy.split_whitespace().collect();
            match parts.as_slice() {
                [x, y] => match (x.parse(), y.parse()) {
                    (Ok(x), Ok(y)) => mini(MiniAction::Scan { x, y }),
                    _ => Err("scan takes two integers".into()),
                },
                _ => Err("usage: scan <x> <y>".into()),
            }
        }
        ("key", "space") => Ok(Command::Send(Payload::Key(' '))),
        ("key", k) if k.chars().count() == 1 => Ok(Command::Send(Payload::Key(k.chars().next().unwrap()))),
        ("key", _) => Err("usage: key <c>".into()),
        // Keep inner spaces as typed.
        ("type", t) if !t.is_empty() => Ok(Command::Type(line.trim_start()[4..].trim_start().to_string())),
        ("do", step) if !step.is_empty() && !step.contains(char::is_whitespace) => mini(MiniAction::Do(step.to_string())),
        _ => Err(format!("unknown command `{trimmed}` (try `help`)")),
    }
}

/// The input line that replays `payload`, the inverse of [`parse_command`].
pub fn command_line(payload: &Payload) -> String {
    match payload {
        Payload::Advance => "advance".into(),
        Payload::Ack => "ack".into(),
        Payload::Choose(i) => (i + 1).to_string(),
        Payload::Key(' ') => "key space".into(),
        Payload::Key(KEYPAD_SUBMIT) => "submit".into(),
        Payload::Key(c) => format!("key {c}"),
        Payload::Mini(a) => match a {
            MiniAction::Move(d) => format!("{d:?}").to_lowercase(),
            MiniAction::Grab => "grab".into(),
            MiniAction::Wait => "wait".into(),
            MiniAction::Scan { x, y } => format!("scan {x} {y}"),
            MiniAction::Submit => "submit".into(),
            MiniAction::Backspace => "back".into(),
            MiniAction::Do(step) => format!("do {step}"),
        },
    }
}

/// Renders a view as plain text.
pub fn render(view: &View) -> String {
    let mut out = String::new();
    let channels: Vec<&str> = view.channels.iter().map(|d| d.as_str()).collect();
    out.push_str(&format!("== {} [{}] ({}) ==\n", view.node, view.kind, channels.join("/")));
    if let Some(text) = &view.text {
        out.push_str(text);
        out.push('\n');
        if view.page_count > 1 {
            out.push_str(&format!("  (page {}/{})\n", view.page + 1, view.page_count));
        }
    }
    if let Some(p) = &view.prompt {
        out.push_str(p);
        out.push('\n');
    }
    for o in &view.options {
        out.push_str(&format!("  {}. {}\n", o.index + 1, o.label));
    }
    if let Some(mini) = &view.mini {
        out.push_str(&render_mini(mini));
    }
    let meters: Vec<String> = view.meters.iter().map(|(k, m)| format!("{k} {}/{}", m.value, m.max)).collect();
    let items: Vec<String> = view
        .inventory
        .iter()
        .map(|i| {
            let name = i.label.clone().unwrap_or_else(|| i.item.clone());
            if i.count > 1 { format!("{name} x{}", i.count) } else { name }
        })
        .collect();
    if !meters.is_empty() || !items.is_empty() {
        out.push_str(&format!("  [{}] [{}]\n", meters.join(", "), items.join(", ")));
    }
    if let Some(kind) = &view.ending {
        out.push_str(&format!("  -- {kind} ending --\n"));
    }
    out
}

fn render_mini(mini: &MiniView) -> String {
    match mini {
        MiniView::Biolink { creature, meter, position, width, height, cells, collected, required, .. } => {
            let mut rows = vec![vec![' '; *width as usize]; *height as usize];
            for c in cells {
                rows[c.y as usize][c.x as usize] = c.tile.chars().next().unwrap_or('?');
            }
            rows[position.y as usize][position.x as usize] = '@';
            let mut s = format!("  biolink: {creature}, trash {collected}/{required}, meter {meter}\n");
            for r in rows {
                s.push_str(&format!("  |{}|\n", r.into_iter().collect::<String>()));
            }
            s
        }
        MiniView::Scan { width, height, revealed, scans_used, budget } => {
            let mut rows = vec![vec!['?'; *width as usize]; *height as usize];
            for c in revealed {
                rows[c.y as usize][c.x as usize] = if c.marker == "decoy" { 'x' } else { '.' };
            }
            let budget = budget.map_or("unlimited".to_string(), |b| b.to_string());
            let mut s = format!("  scan: {scans_used} used of {budget}\n");
            for r in rows {
                s.push_str(&format!("  |{}|\n", r.into_iter().collect::<String>()));
            }
            s
        }
        MiniView::Coord { masked, attempts_used, max_attempts } => {
            let max = max_attempts.map_or("-".to_string(), |m| m.to_string());
            format!("  keypad: [{masked}] attempts {attempts_used}/{max}\n")
        }
        MiniView::Sequence { progress, total, next_channel, steps } => {
            let next = next_channel.map_or("-", |d| d.as_str());
            format!("  sequence: {progress}/{total} done, next on {next}; steps: {}\n", steps.join(", "))
        }
    }
}

fn write_save(session: &Session, path: &Path, stderr: Out) -> bool {
    match std::fs::write(path, session.save().to_json()) {
        Ok(()) => true,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            false
        }
    }
}

pub(crate) fn play(
    graph: Arc<StoryGraph>,
    seed: u64,
    save: Option<&Path>,
    load: Option<&Path>,
    stdin: &mut dyn BufRead,
    stdout: Out,
    stderr: Out,
) -> Result<(), Fail> {
    let mut session = match load {
        None => Session::new(graph, seed),
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| {
                let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
                Fail(EXIT_USAGE)
            })?;
            SaveState::from_json(&bytes).and_then(|s| Session::restore(graph, &s)).map_err(|e| {
                let _ = writeln!(stderr, "{}: {e}", path.display());
                Fail(EXIT_CONTENT)
            })?
        }
    };
    let mut device = Device::Touch;
    let _ = write!(stdout, "{}", render(&session.view()));
    let mut line = String::new();
    loop {
        if session.is_finished() {
            let _ = writeln!(stdout, "finished: {}", session.current());
            break;
        }
        let _ = write!(stdout, "[{}] > ", device.as_str());
        let _ = stdout.flush();
        line.clear();
        match stdin.read_line(&mut line) {
            Ok(0) => {
                let _ = writeln!(stdout);
                break;
            }
            Ok(_) => {}
            Err(e) => {
                let _ = writeln!(stderr, "error: {e}");
                break;
            }
        }
        if line.trim_start().starts_with('#') {
            continue;
        }
        let at_ending = session.view().ending.is_some();
        let payloads = match parse_command(&line, at_ending) {
            Err(msg) => {
                let _ = writeln!(stdout, "{msg}");
                continue;
            }
            Ok(Command::Toggle) => {
                device = device.other();
                let _ = writeln!(stdout, "now using the {}", device.as_str());
                continue;
            }
            Ok(Command::Look) => {
                let _ = write!(stdout, "{}", render(&session.view()));
                continue;
            }
            Ok(Command::Help) => {
                let _ = write!(stdout, "{HELP}");
                continue;
            }
            Ok(Command::Save) => {
                match save {
                    Some(p) if write_save(&session, p, stderr) => {
                        let _ = writeln!(stdout, "saved to {}", p.display());
                    }
                    Some(_) => {}
                    None => {
                        let _ = writeln!(stdout, "no save file given (use --save)");
                    }
                }
                continue;
            }
            Ok(Command::Quit) => break,
            Ok(Command::Send(p)) => vec![p],
            Ok(Command::Type(text)) => text.chars().map(Payload::Key).collect(),
        };
        for p in payloads {
            match session.apply(&Event::new(device, p)) {
                Ok(notes) => {
                    for n in notes {
                        let _ = writeln!(stdout, "  ({})", n.code());
                    }
                }
                Err(e) => {
                    let _ = writeln!(stdout, "{e}");
                    break;
                }
            }
        }
        if !session.is_finished() {
            let _ = write!(stdout, "{}", render(&session.view()));
        }
    }
    if let Some(p) = save {
        if !write_save(&session, p, stderr) {
            return Err(Fail(EXIT_CONTENT));
        }
    }
    Ok(())
}
