use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::decode::SuggestionKind;

fn data_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data"))
}

fn engine() -> Engine {
    let tags: Vec<String> = ["en", "ru", "hi", "id", "nl", "fy"].map(String::from).to_vec();
    Engine::load(data_dir(), Some(&tags), crate::decode::DecodeConfig::default()).unwrap()
}

fn shared_engine() -> Arc<Engine> {
    static E: OnceLock<Arc<Engine>> = OnceLock::new();
    E.get_or_init(|| Arc::new(engine())).clone()
}

fn session(langs: &[&str]) -> Session {
    let langs: Vec<String> = langs.iter().map(|s| s.to_string()).collect();
    Session::open(shared_engine(), "t", &langs, Arc::default()).unwrap()
}

/// Tap at the centre of the key typing `output` on page 0.
fn tap_on(layout: &crate::layout::Layout, output: &str) -> SessionEvent {
    let page = &layout.pages[0];
    let i = page
        .keys
        .iter()
        .position(|k| k.base_output == output)
        .unwrap_or_else(|| panic!("no key for {output}"));
    let (x, y) = layout.geometry(0).unwrap().center_normalized(i);
    SessionEvent::Tap {
        x,
        y,
        page: 0,
        timestamp: 0,
    }
}

fn type_word(s: &mut Session, word: &str) {
    let layout = s.layout().clone();
    for c in word.chars() {
        s.handle(tap_on(&layout, &c.to_string())).unwrap();
    }
}

fn request(service: &Service, json: &str) -> Response {
    serde_json::from_str(&service.handle_line(json)).unwrap()
}

#[test]
fn handshake_lists_languages() {
    let service = Service::new(engine());
    match request(&service, r#"{"op":"handshake","protocol":"v1"}"#) {
        Response::Handshake { protocol, languages } => {
            assert_eq!(protocol, "v1");
            assert_eq!(languages, ["en", "fy", "hi", "id", "nl", "ru"]);
        }
        other => panic!("{other:?}"),
    }
    match request(&service, r#"{"op":"handshake","protocol":"v0"}"#) {
        Response::Error { code, .. } => assert_eq!(code, "UnsupportedProtocol"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn cross_script_session_is_rejected() {
    let service = Service::new(engine());
    match request(&service, r#"{"op":"open_session","languages":["en","ru"]}"#) {
        Response::Error { code, message } => {
            assert_eq!(code, "CrossScriptMix");
            assert!(message.contains("Latn") && message.contains("Cyrl"));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn unknown_session_and_language() {
    let service = Service::new(engine());
    let r = request(&service, r#"{"op":"event","session_id":"nope","event":{"type":"space"}}"#);
    assert!(matches!(r, Response::Error { code, .. } if code == "UnknownSession"));
    let r = request(&service, r#"{"op":"open_session","languages":["xx"]}"#);
    assert!(matches!(r, Response::Error { code, .. } if code == "UnknownLanguage"));
}

#[test]
fn malformed_message_leaves_session_alone() {
    let service = Service::new(engine());
    let Response::SessionOpened { session_id, .. } = request(&service, r#"{"op":"open_session","languages":["en"]}"#)
    else {
        panic!()
    };
    let ev = |e: &str| format!(r#"{{"op":"event","session_id":"{session_id}","event":{e}}}"#);
    let first = request(&service, &ev(r#"{"type":"tap","x":0.05,"y":0.07}"#));
    for bad in [
        "not json",
        r#"{"op":"event"}"#,
        &ev(r#"{"type":"warp"}"#),
        &ev(r#"{"type":"tap","x":"left","y":0}"#),
    ] {
        let r = request(&service, bad);
        assert!(matches!(r, Response::Error { ref code, .. } if code == "Malformed"), "{bad}: {r:?}");
    }
    let second = request(&service, &ev(r#"{"type":"request_suggestions"}"#));
    let (Response::Event(a), Response::Event(b)) = (first, second) else {
        panic!()
    };
    assert_eq!(b.seq, a.seq + 1);
    assert_eq!(b.pending, a.pending);
    assert_eq!(b.strip, a.strip);
}

#[test]
fn space_commits_word() {
    let mut s = session(&["en"]);
    type_word(&mut s, "cat");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert_eq!(r.committed_text, "cat ");
    assert_eq!(r.committed_delta, TextDelta { delete: 0, insert: "cat ".into() });
    assert!(r.strip.iter().all(|x| x.kind == SuggestionKind::Prediction));
    assert_eq!(r.strip.len(), STRIP_SIZE);
}

#[test]
fn revert_restores_literal_and_sticks() {
    let mut s = session(&["en"]);
    type_word(&mut s, "teh");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert_eq!(r.committed_text, "the ");
    let c = r.commit.unwrap();
    assert_eq!((c.literal.as_str(), c.correction.as_deref()), ("teh", Some("the")));

    let r = s.handle(SessionEvent::Revert).unwrap();
    assert_eq!(r.committed_text, "teh ");
    assert_eq!(r.committed_delta, TextDelta { delete: 3, insert: "eh ".into() });
    assert!(s.handle(SessionEvent::Revert).is_err());

    type_word(&mut s, "teh");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert_eq!(r.committed_text, "teh teh ");
    assert_eq!(r.commit.unwrap().correction, None);
}

#[test]
fn abugida_consonant_updates_sign_keys() {
    let mut s = session(&["hi"]);
    let layout = s.layout().clone();
    let before = layout.key_state("", false);
    let r = s.handle(tap_on(&layout, "क")).unwrap();
    assert_eq!(r.pending, "क");
    let direct = layout.key_state("क", false);
    assert_eq!(r.key_state_delta, direct.delta(&before));
    assert_eq!(r.key_state_delta.len(), 11);
    assert!(r.key_state_delta.iter().any(|v| v.face == "कि" && v.output.as_deref() == Some("ि")));

    // The activated sign key can now be hit.
    let i = layout.pages[0].keys.iter().position(|k| k.key_id == "sign_i").unwrap();
    let (x, y) = layout.geometry(0).unwrap().center_normalized(i);
    let r = s.handle(SessionEvent::Tap { x, y, page: 0, timestamp: 1 }).unwrap();
    assert_eq!(r.pending, "कि");
    // After a sign the sign keys go blank again.
    assert!(r.key_state_delta.iter().all(|v| v.face.is_empty()));
}

#[test]
fn shift_capitalizes_commit() {
    let mut s = session(&["en"]);
    s.handle(SessionEvent::Shift).unwrap();
    type_word(&mut s, "cat");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert_eq!(r.committed_text, "Cat ");
}

#[test]
fn backspace_edits_pending_then_text() {
    let mut s = session(&["en"]);
    type_word(&mut s, "ca");
    assert_eq!(s.handle(SessionEvent::Backspace).unwrap().pending, "c");
    s.handle(SessionEvent::Backspace).unwrap();
    s.handle(SessionEvent::Space).unwrap();
    let r = s.handle(SessionEvent::Backspace).unwrap();
    assert_eq!(r.committed_text, "");
    assert_eq!(r.committed_delta.delete, 1);
}

#[test]
fn pick_appends_prediction() {
    let mut s = session(&["en"]);
    type_word(&mut s, "the");
    let r = s.handle(SessionEvent::Space).unwrap();
    let first = r.strip[0].surface.clone();
    let r = s.handle(SessionEvent::Pick { index: 0 }).unwrap();
    assert_eq!(r.committed_text, format!("the {first} "));
    assert!(s.handle(SessionEvent::Pick { index: 9 }).is_err());
}

#[test]
fn reduplication_in_session() {
    let mut s = session(&["id"]);
    type_word(&mut s, "makan");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert!(r.strip.iter().any(|x| x.surface == "makan-makan"), "{:?}", r.strip);
    // The digit row types the shorthand directly.
    type_word(&mut s, "makan2");
    assert_eq!(s.handle(SessionEvent::RequestSuggestions).unwrap().strip[0].surface, "makan-makan");
    let r = s.handle(SessionEvent::Space).unwrap();
    assert_eq!(r.committed_text, "makan makan-makan ");
}

#[test]
fn set_languages_switches_and_rejects_mixed_scripts() {
    let mut s = session(&["nl"]);
    let r = s.handle(SessionEvent::SetLanguages { languages: vec!["en".into(), "ru".into()] });
    assert!(matches!(r, Err(ServiceError::Mix(_))));
    assert_eq!(s.languages(), ["nl"]);
    s.handle(SessionEvent::SetLanguages { languages: vec!["nl".into(), "fy".into()] }).unwrap();
    assert_eq!(s.mixture_weights(), [0.5, 0.5]);
    type_word(&mut s, "hûs".replace('û', "u").as_str());
    s.handle(SessionEvent::Space).unwrap();
    let w = s.mixture_weights();
    assert!((w[0] + w[1] - 1.0).abs() < 1e-12);
    s.handle(SessionEvent::SetLanguages { languages: vec!["ru".into()] }).unwrap();
    assert_eq!(s.layout().layout_id, "ru-jcuken");
}

fn random_log(seed: u64, n: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![r#"{"op":"open_session","languages":["en"]}"#.to_string()];
    for i in 0..n {
        let event = match rng.random_range(0..20) {
            0..=13 => format!(
                r#"{{"type":"tap","x":{},"y":{},"timestamp":{i}}}"#,
                rng.random_range(0.0..1.0),
                rng.random_range(0.0..0.42)
            ),
            14..=16 => r#"{"type":"space"}"#.into(),
            17 => r#"{"type":"backspace"}"#.into(),
            18 => r#"{"type":"revert"}"#.into(),
            _ => r#"{"type":"pick","index":1}"#.into(),
        };
        out.push(format!(r#"{{"op":"event","session_id":"s1","event":{event}}}"#));
    }
    out
}

#[test]
fn replay_is_deterministic() {
    let log = random_log(11, 200);
    let run = || {
        let service = Service::new(engine());
        log.iter().map(|l| service.handle_line(l)).collect::<Vec<_>>()
    };
    let a = run();
    assert_eq!(a, run());
    assert!(a.iter().filter(|l| l.contains("\"commit\"")).count() > 5);
}

#[test]
fn responses_round_trip() {
    let service = Service::new(engine());
    let mut lines: Vec<String> = random_log(3, 60).iter().map(|l| service.handle_line(l)).collect();
    lines.push(service.handle_line(r#"{"op":"layout","session_id":"s1"}"#));
    lines.push(service.handle_line(r#"{"op":"key_state","session_id":"s1"}"#));
    lines.push(service.handle_line(r#"{"op":"close","session_id":"s1"}"#));
    for line in lines {
        let parsed: Response = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed.to_line(), line);
    }
}

#[test]
fn personal_dictionary_persists_per_user() {
    let dir = tempfile::tempdir().unwrap();
    let mut e = engine();
    e.personal_dir = Some(dir.path().to_path_buf());
    let service = Service::new(e);
    let Response::SessionOpened { session_id, .. } =
        request(&service, r#"{"op":"open_session","languages":["en"],"user":"ana"}"#)
    else {
        panic!()
    };
    let layout = service.engine().pack("en").unwrap().layout.clone();
    for c in "dog".chars() {
        let SessionEvent::Tap { x, y, .. } = tap_on(&layout, &c.to_string()) else {
            unreachable!()
        };
        service.handle_line(&format!(
            r#"{{"op":"event","session_id":"{session_id}","event":{{"type":"tap","x":{x},"y":{y}}}}}"#
        ));
    }
    service.handle_line(&format!(r#"{{"op":"event","session_id":"{session_id}","event":{{"type":"space"}}}}"#));
    service.handle_line(&format!(r#"{{"op":"close","session_id":"{session_id}"}}"#));
    let saved = crate::personal::PersonalDict::load(&dir.path().join("ana.txt")).unwrap();
    assert_eq!(saved.total(), 1);
    let r = request(&service, r#"{"op":"open_session","languages":["en"],"user":"../x"}"#);
    assert!(matches!(r, Response::Error { .. }));
}

#[test]
fn missing_asset_is_named() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::create_dir_all(dir.path().join("profiles")).unwrap();
    std::fs::copy(data_dir().join("profiles/en.toml"), dir.path().join("profiles/en.toml")).unwrap();
    let err = Engine::load(dir.path(), None, Default::default()).err().unwrap();
    assert_eq!(err.code(), "MissingAsset");
    assert!(err.to_string().contains("layouts/en.toml"), "{err}");
}

#[test]
fn serves_over_tcp() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let service = Arc::new(Service::new(engine()));
    std::thread::spawn(move || serve_tcp(service, listener));
    let stream = std::net::TcpStream::connect(addr).unwrap();
    let mut writer = stream.try_clone().unwrap();
    let mut reader = BufReader::new(stream);
    let mut exchange = |msg: &str| {
        writeln!(writer, "{msg}").unwrap();
        let mut line = String::new();
        reader.read_line(&mut line).unwrap();
        serde_json::from_str::<Response>(&line).unwrap()
    };
    assert!(matches!(exchange(r#"{"op":"handshake","protocol":"v1"}"#), Response::Handshake { .. }));
    assert!(matches!(exchange(r#"{"op":"open_session","languages":["en"]}"#), Response::SessionOpened { .. }));
}
