use fuselage::model::*;

fn ending(id: &str) -> Node {
    Node {
        id: id.into(),
        channel: Channel::Touch,
        body: NodeBody::Ending { ending: EndingKind::Main, text: "fin".into() },
    }
}

fn graph(start: &str, nodes: Vec<Node>) -> StoryGraph {
    StoryGraph {
        version: 1,
        title: "t".into(),
        start: start.into(),
        meters: vec![],
        items: vec![],
        flags: vec![],
        nodes: nodes.into_iter().map(|n| (n.id.clone(), n)).collect(),
    }
}

fn codes(g: &StoryGraph) -> Vec<&'static str> {
    validate(g).iter().map(|d| d.code).collect()
}

#[test]
fn single_ending_is_valid() {
    assert!(validate(&graph("A", vec![ending("A")])).is_empty());
}

#[test]
fn unknown_start() {
    let d = validate(&graph("Z", vec![ending("A")]));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].code, "unknown-start");
    assert!(d[0].message.contains("unknown start node"));
    assert_eq!(d[0].subject.as_deref(), Some("Z"));
}

#[test]
fn choice_with_one_option() {
    let choice = Node {
        id: "A".into(),
        channel: Channel::Touch,
        body: NodeBody::Choice {
            prompt: "?".into(),
            options: vec![ChoiceOption { label: "x".into(), guards: vec![], target: "E".into(), effects: vec![] }],
        },
    };
    let d = validate(&graph("A", vec![choice, ending("E")]));
    assert_eq!(d.len(), 1);
    assert_eq!(d[0].code, "choice-options");
    assert_eq!(d[0].message, "choice requires ≥ 2 options");
    assert_eq!(d[0].subject.as_deref(), Some("A"));
}

#[test]
fn dangling_target_and_missing_ending() {
    let n = Node {
        id: "A".into(),
        channel: Channel::Touch,
        body: NodeBody::Narration { pages: vec!["p".into()], next: "Q".into(), effects: vec![] },
    };
    assert_eq!(codes(&graph("A", vec![n])), vec!["no-ending", "unknown-target"]);
}

#[test]
fn undeclared_names_are_reported_per_namespace() {
    let n = Node {
        id: "A".into(),
        channel: Channel::Touch,
        body: NodeBody::Narration {
            pages: vec!["p".into()],
            next: "E".into(),
            effects: vec![
                Effect::SetFlag { flag: "f".into() },
                Effect::GiveItem { item: "i".into() },
                Effect::MeterDelta { meter: "m".into(), delta: 1 },
            ],
        },
    };
    assert_eq!(codes(&graph("A", vec![n, ending("E")])), vec!["unknown-flag", "unknown-item", "unknown-meter"]);
}

#[test]
fn diagnostics_sorted_by_subject_then_code() {
    let bad = |id: &str| Node {
        id: id.into(),
        channel: Channel::Touch,
        body: NodeBody::Narration { pages: vec![], next: "nowhere".into(), effects: vec![] },
    };
    let d = validate(&graph("B", vec![bad("B"), bad("A"), ending("E")]));
    let pairs: Vec<_> = d.iter().map(|d| (d.subject.clone().unwrap(), d.code)).collect();
    assert_eq!(
        pairs,
        vec![
            ("A".into(), "empty-narration"),
            ("A".into(), "unknown-target"),
            ("B".into(), "empty-narration"),
            ("B".into(), "unknown-target"),
        ]
    );
}

#[test]
fn meter_range_rules() {
    let mut g = graph("A", vec![ending("A")]);
    g.meters.push(MeterDef { name: "m".into(), min: 0, max: 0, init: 0 });
    g.meters.push(MeterDef { name: "n".into(), min: 0, max: 10, init: 11 });
    assert_eq!(codes(&g), vec!["meter-range", "meter-range"]);
}

#[test]
fn item_taken_and_given_in_a_loop_is_rejected() {
    let mut g = graph(
        "A",
        vec![
            Node {
                id: "A".into(),
                channel: Channel::Touch,
                body: NodeBody::Choice {
                    prompt: "?".into(),
                    options: vec![
                        ChoiceOption {
                            label: "again".into(),
                            guards: vec![],
                            target: "A".into(),
                            effects: vec![Effect::GiveItem { item: "usb".into() }],
                        },
                        ChoiceOption {
                            label: "use".into(),
                            guards: vec![],
                            target: "E".into(),
                            effects: vec![Effect::TakeItem { item: "usb".into() }],
                        },
                    ],
                },
            },
            ending("E"),
        ],
    );
    g.items.push(ItemDef { name: "usb".into(), label: None });
    assert_eq!(codes(&g), vec!["item-multiplicity"]);
}

#[test]
fn ragged_biolink_grid() {
    let p = BiolinkParams {
        creature: "toad".into(),
        grid: vec!["S.T".into(), "..".into()],
        command_cost: 5,
        idle_regen: 2,
        loss_threshold: 0,
        meter: "m".into(),
        required_trash: 1,
        visibility: 2,
    };
    let codes: Vec<_> = minigame_problems(&MiniGame::Biolink(p)).into_iter().map(|(c, _)| c).collect();
    assert_eq!(codes, vec!["biolink-grid-ragged"]);
}
