use proptest::prelude::*;

use super::*;
use crate::inventory::CharacterInventory;

fn qwerty_toml() -> String {
    let mut s = String::from(
        "format = 1\nlayout_id = \"en-qwerty\"\nlanguage_tag = \"en\"\nscript = \"Latn\"\n\
         base_grid = \"qwerty\"\nversion = 1\n\n[[pages]]\n",
    );
    for (r, row) in ["qwertyuiop", "asdfghjkl", "zxcvbnm"].iter().enumerate() {
        for (c, ch) in row.chars().enumerate() {
            s.push_str(&format!(
                "[[pages.keys]]\nkey_id = \"{ch}\"\nrow = {r}\ncol = {c}\nwidth = 0.1\n\
                 base_output = \"{ch}\"\nshift_output = \"{}\"\nface = \"{ch}\"\n",
                ch.to_ascii_uppercase()
            ));
        }
    }
    s
}

fn qwerty() -> Layout {
    Layout::load(qwerty_toml().as_bytes()).unwrap()
}

/// Tiny abugida fragment: two consonants, a blank vowel-sign key and a
/// virama key that only lights up after a consonant.
fn abugida() -> Layout {
    let mut l = Layout::new("hi-test", "hi", "Deva", BaseGrid::ScriptNative);
    l.classes.insert("consonant".into(), vec!["क".into(), "ख".into()]);
    l.classes.insert("sign".into(), vec!["ा".into(), "्".into()]);
    l.pages[0].keys = vec![
        Key::letter("ka", 0, 0, 0.25, "क"),
        Key::letter("kha", 0, 1, 0.25, "ख"),
        Key {
            face: String::new(),
            ..Key::letter("aa", 0, 2, 0.25, "ा")
        },
        Key {
            face: String::new(),
            base_output: String::new(),
            ..Key::letter("virama", 0, 3, 0.25, "्")
        },
    ];
    l.dynamic_rules = vec![
        DynamicRule {
            context_pattern: vec![ContextElement::Class("consonant".into())],
            target_key_id: "aa".into(),
            new_output: "ा".into(),
            new_face: "{context}ा".into(),
        },
        DynamicRule {
            context_pattern: vec![ContextElement::Class("consonant".into())],
            target_key_id: "virama".into(),
            new_output: "्".into(),
            new_face: "{context}्".into(),
        },
    ];
    l.validate().unwrap();
    l
}

#[test]
fn loads_plain_qwerty() {
    let l = qwerty();
    assert_eq!(l.pages.len(), 1);
    assert_eq!(l.pages[0].keys.len(), 26);
}

#[test]
fn dangling_rule_target_is_named() {
    let mut s = qwerty_toml();
    s.push_str(
        "\n[[dynamic_rules]]\ncontext_pattern = [{ literal = \"a\" }]\n\
         target_key_id = \"q99\"\nnew_output = \"a\"\nnew_face = \"a\"\n",
    );
    assert_eq!(
        Layout::load(s.as_bytes()),
        Err(LayoutError::DanglingRuleTarget("q99".into()))
    );
}

#[test]
fn duplicate_key_ids_are_rejected() {
    let s = qwerty_toml().replacen("key_id = \"w\"", "key_id = \"q\"", 1);
    assert_eq!(
        Layout::load(s.as_bytes()),
        Err(LayoutError::DuplicateKeyId {
            page: 0,
            key_id: "q".into()
        })
    );
}

#[test]
fn non_nfc_output_is_rejected() {
    let s = qwerty_toml().replacen("base_output = \"e\"", "base_output = \"e\u{301}\"", 1);
    match Layout::load(s.as_bytes()) {
        Err(LayoutError::NonNfcOutput { element, .. }) => assert_eq!(element, "key e"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn malformed_file_is_schema_error() {
    assert!(matches!(
        Layout::load(b"format = 1\nlayout_id = 3"),
        Err(LayoutError::Schema(_))
    ));
    let s = qwerty_toml().replacen("width = 0.1", "widht = 0.1", 1);
    assert!(matches!(Layout::load(s.as_bytes()), Err(LayoutError::Schema(_))));
}

#[test]
fn rule_output_outside_inventory_is_rejected() {
    let mut l = abugida();
    l.dynamic_rules[0].new_output = "ि".into();
    assert_eq!(
        l.validate(),
        Err(LayoutError::RuleOutsideInventory {
            index: 0,
            output: "ि".into()
        })
    );
}

#[test]
fn swiss_german_extra_keys_are_top_level() {
    let l = Layout::load(include_bytes!("../../../../data/layouts/de-CH.toml")).unwrap();
    assert_eq!(l.base_grid, BaseGrid::Qwertz);
    for umlaut in ["ä", "ö", "ü"] {
        let key = l.pages[0]
            .keys
            .iter()
            .find(|k| k.base_output == umlaut)
            .unwrap_or_else(|| panic!("no standalone key for {umlaut}"));
        assert_eq!(key.face, umlaut);
        assert!(l.pages[0].keys.iter().all(|k| !k.long_press.contains(&umlaut.to_string())));
    }
    // the extra keys sit right of the letter grid
    let geom = l.geometry(0).unwrap();
    let p = geom.keys.iter().find(|k| k.key_id == "p").unwrap();
    let ue = geom.keys.iter().find(|k| k.key_id == "ue").unwrap();
    assert_eq!(ue.row, p.row);
    assert!(ue.center_x > p.center_x);
}

#[test]
fn consonant_context_lights_up_vowel_signs() {
    let l = abugida();
    let before = l.key_state("", false);
    assert_eq!(before.get(0, "aa").unwrap().output, None);
    assert_eq!(before.get(0, "aa").unwrap().face, "");

    let after = l.key_state("क", false);
    let aa = after.get(0, "aa").unwrap();
    assert_eq!(aa.output.as_deref(), Some("ा"));
    assert_eq!(aa.face, "का");
    assert_eq!(after.get(0, "virama").unwrap().face, "क्");
    let delta = after.delta(&before);
    let ids: Vec<_> = delta.iter().map(|k| k.key_id.as_str()).collect();
    assert_eq!(ids, ["aa", "virama"]);
}

#[test]
fn empty_context_gives_static_faces() {
    let l = qwerty();
    let state = l.key_state("", false);
    for (view, key) in state.pages[0].iter().zip(&l.pages[0].keys) {
        assert_eq!(view.face, key.face);
        assert_eq!(view.output.as_ref(), Some(&key.base_output));
    }
    let shifted = l.key_state("", true);
    assert_eq!(shifted.get(0, "q").unwrap().output.as_deref(), Some("Q"));
}

fn rule(ctx: &[&str], target: &str, out: &str) -> DynamicRule {
    DynamicRule {
        context_pattern: ctx.iter().map(|c| ContextElement::Literal(c.to_string())).collect(),
        target_key_id: target.into(),
        new_output: out.into(),
        new_face: out.into(),
    }
}

/// Linear scan: earliest rule among those with the longest match.
fn oracle_winner(l: &Layout, text: &str, target: &str) -> Option<usize> {
    let mut best: Option<(usize, usize)> = None;
    for (i, r) in l.dynamic_rules.iter().enumerate() {
        if r.target_key_id != target {
            continue;
        }
        let joined: String = r
            .context_pattern
            .iter()
            .map(|e| match e {
                ContextElement::Literal(s) => s.clone(),
                ContextElement::Class(_) => unreachable!(),
            })
            .collect();
        if text.ends_with(&joined) && best.is_none_or(|(_, len)| joined.len() > len) {
            best = Some((i, joined.len()));
        }
    }
    best.map(|(i, _)| i)
}

#[test]
fn earlier_rule_wins_on_equal_match() {
    let mut l = qwerty();
    l.dynamic_rules = vec![rule(&["a"], "q", "b"), rule(&["a"], "q", "c")];
    l.validate().unwrap();
    let view = l.key_state("ba", false);
    assert_eq!(view.get(0, "q").unwrap().output.as_deref(), Some("b"));
    assert_eq!(oracle_winner(&l, "ba", "q"), Some(0));
}

#[test]
fn longer_context_beats_list_order() {
    let mut l = qwerty();
    l.dynamic_rules = vec![rule(&["a"], "q", "b"), rule(&["b", "a"], "q", "c")];
    l.validate().unwrap();
    assert_eq!(l.key_state("ba", false).get(0, "q").unwrap().rule, Some(1));
    assert_eq!(l.key_state("ca", false).get(0, "q").unwrap().rule, Some(0));
}

#[test]
fn tap_on_center_hits_with_zero_distance() {
    let l = qwerty();
    let geom = l.geometry(0).unwrap();
    let a = geom.keys.iter().position(|k| k.key_id == "a").unwrap();
    let (x, y) = geom.center_normalized(a);
    let (id, d) = l.hit_test(0, x, y).unwrap();
    assert_eq!(id, "a");
    assert!(d.abs() < 1e-24);
}

#[test]
fn equidistant_tap_goes_to_lower_key_id() {
    let l = qwerty();
    let geom = l.geometry(0).unwrap();
    let a = geom.keys.iter().position(|k| k.key_id == "a").unwrap();
    let s = geom.keys.iter().position(|k| k.key_id == "s").unwrap();
    let (ax, ay) = geom.center_normalized(a);
    let (sx, _) = geom.center_normalized(s);
    assert_eq!(l.hit_test(0, (ax + sx) / 2.0, ay).unwrap().0, "a");
}

#[test]
fn corner_tap_matches_exhaustive_scan() {
    let l = qwerty();
    let geom = l.geometry(0).unwrap();
    for (x, y) in [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
        let (px, py) = (x, y * geom.rows as f64 * l.row_height);
        let mut scan: Vec<(f64, &str)> = geom
            .keys
            .iter()
            .map(|k| ((px - k.center_x).powi(2) + (py - k.center_y).powi(2), k.key_id.as_str()))
            .collect();
        scan.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(l.hit_test(0, x, y).unwrap().0, scan[0].1);
    }
    assert_eq!(l.hit_test(0, 0.0, 0.0).unwrap().0, "q");
    assert_eq!(l.hit_test(0, 1.0, 1.0).unwrap().0, "m");
}

#[test]
fn fully_blank_page_has_no_active_keys() {
    let mut l = abugida();
    l.pages[0].keys.retain(|k| k.is_blank());
    l.dynamic_rules.clear();
    assert_eq!(l.hit_test(0, 0.5, 0.5), Err(LayoutError::NoActiveKeys(0)));
}

#[test]
fn blank_key_is_hit_once_rule_fires() {
    let l = abugida();
    let geom = l.geometry(0).unwrap();
    let (x, y) = geom.center_normalized(2);
    assert_ne!(l.hit_test(0, x, y).unwrap().0, "aa");
    let state = l.key_state("ख", false);
    assert_eq!(l.hit_test_state(0, x, y, &state).unwrap().0, "aa");
}

#[test]
fn empty_inventory_is_vacuously_covered() {
    let report = coverage_report(&qwerty(), &CharacterInventory::empty("xx"));
    assert!(report.complete);
    assert!(report.reachable.is_empty());
}

#[test]
fn coverage_reports_paths() {
    let mut l = qwerty();
    l.pages[0].keys[2].long_press = vec!["é".into()];
    l.pages.push(Page {
        keys: vec![Key::letter("eth", 0, 0, 0.1, "ð")],
    });
    l.pages[0].keys.push(Key {
        switch_to_page: Some(1),
        base_output: String::new(),
        shift_output: None,
        ..Key::letter("more", 3, 0, 0.2, "⇄")
    });
    l.validate().unwrap();
    let inv = CharacterInventory::new("xx", ["a", "A", "é", "ð", "ə"], Vec::<String>::new()).unwrap();
    let r = coverage_report(&l, &inv);
    assert_eq!(r.reachable["a"], ReachPath::Base);
    assert_eq!(r.reachable["A"], ReachPath::Shift);
    assert_eq!(r.reachable["é"], ReachPath::LongPress);
    assert_eq!(r.reachable["ð"], ReachPath::Page(1));
    assert_eq!(r.missing.iter().collect::<Vec<_>>(), ["ə"]);
    assert!(!r.complete);

    let abu = abugida();
    let inv = CharacterInventory::new("hi", ["क", "ा"], Vec::<String>::new()).unwrap();
    assert_eq!(coverage_report(&abu, &inv).reachable["ा"], ReachPath::Dynamic);
}

#[test]
fn unreachable_page_does_not_count() {
    let mut l = qwerty();
    l.pages.push(Page {
        keys: vec![Key::letter("eth", 0, 0, 0.1, "ð")],
    });
    let inv = CharacterInventory::new("xx", ["ð"], Vec::<String>::new()).unwrap();
    assert!(!coverage_report(&l, &inv).complete);
}

#[test]
fn render_marks_blank_and_long_press_keys() {
    let mut l = abugida();
    l.pages[0].keys[0].long_press = vec!["क़".into()];
    let chart = render_layout(&l);
    assert!(chart.contains("[क]{क़}"));
    assert!(chart.contains("[ ]"));
}

proptest! {
    #[test]
    fn key_state_is_pure_and_stateless(text in "[कखा्ab]{0,6}", extra in "[कखा्ab]") {
        let l = abugida();
        prop_assert_eq!(l.key_state(&text, false), l.key_state(&text, false));
        let appended = format!("{text}{extra}");
        let first = l.key_state(&text, false);
        let _ = first;
        prop_assert_eq!(l.key_state(&appended, false), abugida().key_state(&appended, false));
    }

    #[test]
    fn serialization_round_trips(width in 0.01f64..0.1, lp in proptest::collection::vec("[à-ÿ]", 0..4), version in 1u32..50) {
        let mut l = abugida();
        l.version = version;
        let mut lp: Vec<String> = lp;
        lp.sort();
        lp.dedup();
        l.pages[0].keys[0].width = width;
        l.pages[0].keys[0].long_press = lp;
        let back = Layout::load(l.serialize().as_bytes()).unwrap();
        prop_assert_eq!(back, l);
    }
}

#[test]
fn digraphs_are_covered_by_their_letters() {
    let inv = CharacterInventory::new("xx", ["ny", "sh", "ŋ"], Vec::<String>::new()).unwrap();
    let r = coverage_report(&qwerty(), &inv);
    assert_eq!(r.reachable["ny"], ReachPath::Base);
    assert_eq!(r.missing.iter().collect::<Vec<_>>(), ["ŋ"]);
}
