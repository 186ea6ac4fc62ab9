//! Mini-game `params { ... }` schemas.
//!
//! | kind     | key            | type   | notes                         |
//! |----------|----------------|--------|-------------------------------|
//! | all      | prompt         | string | optional on-screen brief      |
//! | biolink  | creature       | string | required                      |
//! |          | row            | string | repeated, one per grid row    |
//! |          | meter          | ident  | required, a declared meter    |
//! |          | required-trash | int    | required                      |
//! |          | command-cost   | int    | default 5                     |
//! |          | idle-regen     | int    | default 2                     |
//! |          | loss-threshold | int    | default 0                     |
//! |          | visibility     | int    | default 2                     |
//! | scan     | width, height  | int    | required                      |
//! |          | target         | string | required, `"x,y"`             |
//! |          | decoy          | string | repeated, `"x,y"`             |
//! |          | budget         | int    | optional                      |
//! | coord    | expected       | string | required                      |
//! |          | max-attempts   | int    | optional                      |
//! | sequence | step           | string | repeated, `"step-id:channel"` |

use std::collections::BTreeMap;

use crate::diag::{Diagnostic, SourceSpan};
use crate::dsl::ast::{Param, ParamValue, Spanned};
use crate::model::validate::minigame_problems;
use crate::model::{
    BiolinkParams, Cell, CoordParams, Device, MiniGame, MiniGameKind, ScanParams, SequenceParams, SequenceStep,
};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ty {
    Str,
    Int,
    Ident,
}

impl Ty {
    fn name(self) -> &'static str {
        match self {
            Ty::Str => "string",
            Ty::Int => "integer",
            Ty::Ident => "identifier",
        }
    }
}

struct Key {
    name: &'static str,
    ty: Ty,
    required: bool,
    repeated: bool,
}

const fn key(name: &'static str, ty: Ty, required: bool, repeated: bool) -> Key {
    Key { name, ty, required, repeated }
}

const PROMPT: Key = key("prompt", Ty::Str, false, false);

fn schema(kind: MiniGameKind) -> Vec<Key> {
    let mut keys = match kind {
        MiniGameKind::Biolink => vec![
            key("creature", Ty::Str, true, false),
            key("row", Ty::Str, true, true),
            key("meter", Ty::Ident, true, false),
            key("required-trash", Ty::Int, true, false),
            key("command-cost", Ty::Int, false, false),
            key("idle-regen", Ty::Int, false, false),
            key("loss-threshold", Ty::Int, false, false),
            key("visibility", Ty::Int, false, false),
        ],
        MiniGameKind::Scan => vec![
            key("width", Ty::Int, true, false),
            key("height", Ty::Int, true, false),
            key("target", Ty::Str, true, false),
            key("decoy", Ty::Str, false, true),
            key("budget", Ty::Int, false, false),
        ],
        MiniGameKind::Coord => vec![key("expected", Ty::Str, true, false), key("max-attempts", Ty::Int, false, false)],
        MiniGameKind::Sequence => vec![key("step", Ty::Str, true, true)],
    };
    keys.push(PROMPT);
    keys
}

/// Type-checked parameter table, grouped by key.
struct Table<'a> {
    values: BTreeMap<&'static str, Vec<&'a Spanned<ParamValue>>>,
    diags: Vec<Diagnostic>,
}

impl<'a> Table<'a> {
    fn strs(&self, k: &str) -> Vec<&'a Spanned<ParamValue>> {
        self.values.get(k).cloned().unwrap_or_default()
    }

    fn str(&self, k: &str) -> Option<(&'a str, &'a SourceSpan)> {
        self.values.get(k).and_then(|v| v.first()).map(|v| match &v.value {
            ParamValue::Str(s) | ParamValue::Ident(s) => (s.as_str(), &v.span),
            ParamValue::Int(_) => unreachable!("type-checked"),
        })
    }

    fn int(&self, k: &str) -> Option<(i64, &'a SourceSpan)> {
        self.values.get(k).and_then(|v| v.first()).map(|v| match &v.value {
            ParamValue::Int(n) => (*n, &v.span),
            _ => unreachable!("type-checked"),
        })
    }

    fn u32(&mut self, k: &str, default: u32) -> u32 {
        match self.int(k) {
            None => default,
            Some((n, span)) => match u32::try_from(n) {
                Ok(v) => v,
                Err(_) => {
                    self.diags.push(
                        Diagnostic::error("param-range", format!("`{k}` must be a non-negative integer, got {n}")).at(span.clone()),
                    );
                    default
                }
            },
        }
    }
}

fn check_table<'a>(kind: MiniGameKind, params: &'a [Param]) -> Table<'a> {
    let schema = schema(kind);
    let mut values: BTreeMap<&'static str, Vec<&'a Spanned<ParamValue>>> = BTreeMap::new();
    let mut diags = Vec::new();
    for p in params {
        let Some(k) = schema.iter().find(|k| k.name == p.key.value) else {
            diags.push(
                Diagnostic::error("unknown-param", format!("`{}` is not a {} parameter", p.key.value, kind.as_str()))
                    .at(p.key.span.clone()),
            );
            continue;
        };
        let ok = matches!(
            (k.ty, &p.value.value),
            (Ty::Str, ParamValue::Str(_)) | (Ty::Int, ParamValue::Int(_)) | (Ty::Ident, ParamValue::Ident(_))
        );
        if !ok {
            diags.push(
                Diagnostic::error(
                    "param-type",
                    format!("`{}` expects a {}, found {}", k.name, k.ty.name(), p.value.value.type_name()),
                )
                .at(p.value.span.clone()),
            );
            continue;
        }
        let slot = values.entry(k.name).or_default();
        if !slot.is_empty() && !k.repeated {
            diags.push(Diagnostic::error("duplicate-param", format!("`{}` given more than once", k.name)).at(p.key.span.clone()));
            continue;
        }
        slot.push(&p.value);
    }
    Table { values, diags }
}

fn parse_cell(text: &str) -> Option<Cell> {
    let (x, y) = text.split_once(',')?;
    Some(Cell::new(x.trim().parse().ok()?, y.trim().parse().ok()?))
}

fn parse_step(text: &str) -> Option<SequenceStep> {
    let (id, ch) = text.rsplit_once(':')?;
    Some(SequenceStep { id: id.trim().to_string(), channel: Device::parse(ch.trim())? })
}

/// Lowers a `params` block into typed mini-game parameters, filling defaults.
///
/// `anchor` is the span used for findings that concern the table as a whole
/// (missing keys, grid shape). Returns the optional prompt with the game on
/// success; otherwise every problem found.
pub fn lower_params(
    kind: MiniGameKind,
    params: &[Param],
    anchor: &SourceSpan,
) -> Result<(Option<String>, MiniGame), Vec<Diagnostic>> {
    let mut t = check_table(kind, params);
    for k in schema(kind) {
        if k.required && !t.values.contains_key(k.name) {
            t.diags.push(
                Diagnostic::error("missing-param", format!("{} needs a `{}` parameter", kind.as_str(), k.name)).at(anchor.clone()),
            );
        }
    }
    if !t.diags.is_empty() {
        return Err(t.diags);
    }
    let prompt = t.str("prompt").map(|(s, _)| s.to_string());
    let strings = |t: &Table, k: &str| -> Vec<(String, SourceSpan)> {
        t.strs(k)
            .into_iter()
            .map(|v| match &v.value {
                ParamValue::Str(s) => (s.clone(), v.span.clone()),
                _ => unreachable!("type-checked"),
            })
            .collect()
    };
    let game = match kind {
        MiniGameKind::Biolink => {
            let grid_anchor = t.strs("row").first().map_or_else(|| anchor.clone(), |v| v.span.clone());
            let p = BiolinkParams {
                creature: t.str("creature").map(|(s, _)| s.to_string()).unwrap_or_default(),
                grid: strings(&t, "row").into_iter().map(|(s, _)| s).collect(),
                command_cost: t.u32("command-cost", BiolinkParams::DEFAULT_COMMAND_COST),
                idle_regen: t.u32("idle-regen", BiolinkParams::DEFAULT_IDLE_REGEN),
                loss_threshold: t.int("loss-threshold").map_or(BiolinkParams::DEFAULT_LOSS_THRESHOLD, |(n, _)| n),
                meter: t.str("meter").map(|(s, _)| s.to_string()).unwrap_or_default(),
                required_trash: t.u32("required-trash", 0),
                visibility: t.u32("visibility", BiolinkParams::DEFAULT_VISIBILITY),
            };
            let game = MiniGame::Biolink(p);
            for (code, msg) in minigame_problems(&game) {
                t.diags.push(Diagnostic::error(code, msg).at(grid_anchor.clone()));
            }
            game
        }
        MiniGameKind::Scan => {
            let cell = |t: &mut Table, text: &str, span: &SourceSpan| {
                parse_cell(text).unwrap_or_else(|| {
                    t.diags.push(
                        Diagnostic::error("param-format", format!("`{text}` is not a cell; write \"x,y\"")).at(span.clone()),
                    );
                    Cell::new(0, 0)
                })
            };
            let (target_text, target_span) = t.str("target").map(|(s, sp)| (s.to_string(), sp.clone())).expect("required");
            let target = cell(&mut t, &target_text, &target_span);
            let decoys = strings(&t, "decoy").into_iter().map(|(s, sp)| cell(&mut t, &s, &sp)).collect();
            let budget = t.int("budget").map(|_| t.u32("budget", 0));
            let game = MiniGame::Scan(ScanParams {
                width: t.u32("width", 0),
                height: t.u32("height", 0),
                target,
                decoys,
                budget,
            });
            if t.diags.is_empty() {
                for (code, msg) in minigame_problems(&game) {
                    t.diags.push(Diagnostic::error(code, msg).at(anchor.clone()));
                }
            }
            game
        }
        MiniGameKind::Coord => {
            let (expected, span) = t.str("expected").map(|(s, sp)| (s.to_string(), sp.clone())).expect("required");
            let max_attempts = t.int("max-attempts").map(|_| t.u32("max-attempts", 0));
            let game = MiniGame::Coord(CoordParams { expected, max_attempts });
            for (code, msg) in minigame_problems(&game) {
                t.diags.push(Diagnostic::error(code, msg).at(span.clone()));
            }
            game
        }
        MiniGameKind::Sequence => {
            let mut steps = Vec::new();
            for (text, span) in strings(&t, "step") {
                match parse_step(&text) {
                    Some(s) => steps.push(s),
                    None => t.diags.push(
                        Diagnostic::error("param-format", format!("`{text}` is not a step; write \"step-id:touch\" or \"step-id:handset\""))
                            .at(span),
                    ),
                }
            }
            let game = MiniGame::Sequence(SequenceParams { steps });
            if t.diags.is_empty() {
                for (code, msg) in minigame_problems(&game) {
                    t.diags.push(Diagnostic::error(code, msg).at(anchor.clone()));
                }
            }
            game
        }
    };
    if t.diags.is_empty() {
        Ok((prompt, game))
    } else {
        Err(t.diags)
    }
}
