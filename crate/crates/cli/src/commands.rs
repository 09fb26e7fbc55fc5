use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use polykey_core::autogen::{char_frequencies, generate_layout, AutogenOptions};
use polykey_core::decode::{next_words, DecodeConfig, SpellChecker};
use polykey_core::layout::{coverage_report, render_layout, BaseGrid};
use polykey_core::mixer::mix;
use polykey_core::personal::PersonalDict;
use polykey_core::registry::{infer_status, Registry, StatusRecord, Subtask};
use polykey_core::service::{serve_lines, serve_tcp, Engine, LanguagePack, Service, Session, SessionEvent};
use polykey_core::text::{build_wordlist, normalize_corpus, NGramModel, TrainParams, Wordlist};
use polykey_core::{CharacterInventory, LanguageModel, LanguageProfile, Layout};

use crate::{Cli, Command, CorpusCmd, DecodeCmd, Invalid, LangArgs, LayoutCmd, PersonalCmd, RegistryCmd, UserArgs};

pub fn run(cli: Cli) -> Result<()> {
    let data = cli.data;
    match cli.command {
        Command::Layout(cmd) => layout(cmd),
        Command::Corpus(cmd) => corpus(cmd),
        Command::Decode(DecodeCmd::Simulate { layout, lang, taps }) => simulate(&data, layout, &lang, &taps),
        Command::Suggest { context, lang, count } => suggest(&data, &lang, &context, count),
        Command::Spellcheck {
            word,
            lang,
            wordlist,
            personal,
        } => spellcheck(&data, &lang, &word, wordlist, personal),
        Command::Mix {
            models,
            weights,
            context,
            adapt,
            count,
        } => mix_cmd(&models, weights, &context, &adapt, count),
        Command::Personal(cmd) => personal(&data, cmd),
        Command::Registry(cmd) => registry(&data, cmd),
        Command::Serve {
            port,
            languages,
            personal_dir,
        } => serve(&data, port, languages, personal_dir),
    }
}

fn invalid(e: impl std::fmt::Display) -> anyhow::Error {
    anyhow::Error::new(Invalid(e.to_string()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_layout(path: &Path) -> Result<Layout> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Layout::load(&bytes).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Accepts a profile, or a bare inventory typed in Latin script.
fn load_profile_like(path: &Path) -> Result<LanguageProfile> {
    let text = read(path)?;
    if let Ok(p) = LanguageProfile::from_toml(&text) {
        return Ok(p);
    }
    let inv = CharacterInventory::from_toml(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    Ok(LanguageProfile::new(inv.language_tag.clone(), "Latn", inv))
}

fn load_model(path: &Path) -> Result<NGramModel> {
    NGramModel::from_arpa(&read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn lang_files(data: &Path, lang: &LangArgs) -> (PathBuf, PathBuf) {
    let profile = lang
        .profile
        .clone()
        .unwrap_or_else(|| data.join("profiles").join(format!("{}.toml", lang.lang)));
    let model = lang
        .model
        .clone()
        .unwrap_or_else(|| data.join("models").join(format!("{}.arpa", lang.lang)));
    (profile, model)
}

fn context_tokens(context: &str, profile: &LanguageProfile) -> Vec<String> {
    let mut ctx = vec![polykey_core::text::BOS.to_string()];
    ctx.extend(
        polykey_core::text::normalize(context, profile)
            .0
            .into_iter()
            .map(|t| t.text),
    );
    ctx
}

fn layout(cmd: LayoutCmd) -> Result<()> {
    match cmd {
        LayoutCmd::Validate { file } => {
            let layout = load_layout(&file)?;
            println!(
                "ok: {} ({} keys on {} pages, {} dynamic rules)",
                layout.layout_id,
                layout.key_count(),
                layout.pages.len(),
                layout.dynamic_rules.len()
            );
        }
        LayoutCmd::Coverage { file, inventory } => {
            let layout = load_layout(&file)?;
            let profile = load_profile_like(&inventory)?;
            let report = coverage_report(&layout, &profile.inventory);
            print!("{report}");
            if !report.complete {
                return Err(invalid(format!("{} graphemes unreachable", report.missing.len())));
            }
        }
        LayoutCmd::Render { file } => print!("{}", render_layout(&load_layout(&file)?)),
        LayoutCmd::Generate {
            grid,
            inventory,
            corpus,
            threshold,
            fallback_host,
            max_long_press,
            output,
        } => {
            let base_grid: BaseGrid = grid.parse().map_err(|e: String| anyhow!(e))?;
            let profile = load_profile_like(&inventory)?;
            let (sentences, _) = normalize_corpus(&read(&corpus)?, &profile);
            let freqs = char_frequencies(
                sentences.iter().flatten().map(|t| t.surface.as_str()),
                &profile.inventory,
            )
            .map_err(invalid)?;
            let options = AutogenOptions {
                base_grid,
                standalone_threshold: threshold,
                fallback_host_key: fallback_host,
                max_long_press_per_key: max_long_press,
            };
            let layout = generate_layout(&options, &profile.inventory, &freqs).map_err(invalid)?;
            let report = coverage_report(&layout, &profile.inventory);
            eprintln!(
                "generated {}: {} keys, coverage {}",
                layout.layout_id,
                layout.key_count(),
                if report.complete { "complete" } else { "INCOMPLETE" }
            );
            write_out(output.as_deref(), &layout.serialize())?;
        }
    }
    Ok(())
}

fn corpus(cmd: CorpusCmd) -> Result<()> {
    match cmd {
        CorpusCmd::Normalize {
            corpus,
            profile,
            output,
        } => {
            let profile = load_profile_like(&profile)?;
            let (sentences, report) = normalize_corpus(&read(&corpus)?, &profile);
            let mut text = String::new();
            for s in &sentences {
                let words: Vec<&str> = s.iter().map(|t| t.text.as_str()).collect();
                text.push_str(&words.join(" "));
                text.push('\n');
            }
            write_out(output.as_deref(), &text)?;
            eprint!("{report}");
        }
        CorpusCmd::Train {
            corpus,
            profile,
            order,
            discount,
            output,
            wordlist,
        } => {
            let profile = load_profile_like(&profile)?;
            let (sentences, report) = normalize_corpus(&read(&corpus)?, &profile);
            let words: Vec<Vec<String>> = sentences
                .iter()
                .map(|s| s.iter().map(|t| t.text.clone()).collect())
                .collect();
            let params = TrainParams {
                discount,
                ..TrainParams::default()
            };
            let model = NGramModel::train(&words, order, &params)
                .map_err(invalid)?
                .with_meta(profile.language_tag.clone(), profile.primary_script().to_string());
            std::fs::write(&output, model.to_arpa()).with_context(|| format!("cannot write {}", output.display()))?;
            let source = corpus.file_name().map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let list = build_wordlist(words.iter().flatten().map(String::as_str)).with_source(source);
            let list_path = wordlist.unwrap_or_else(|| output.with_extension("words"));
            std::fs::write(&list_path, list.to_text())
                .with_context(|| format!("cannot write {}", list_path.display()))?;
            println!(
                "trained order-{order} model on {} sentences, {} tokens, {} words; {} rejected tokens",
                words.len(),
                model.training_tokens(),
                model.vocab_size(),
                report.total()
            );
        }
    }
    Ok(())
}

fn parse_tap_line(line: &str, n: usize) -> Result<SessionEvent> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let bad = || invalid(format!("tap file line {n}: expected `x y kind [page]`"));
    let (x, y, kind) = match fields.as_slice() {
        [kind] => (0.0, 0.0, *kind),
        [x, y, kind] | [x, y, kind, _] => (
            x.parse::<f64>().map_err(|_| bad())?,
            y.parse::<f64>().map_err(|_| bad())?,
            *kind,
        ),
        _ => return Err(bad()),
    };
    let page = match fields.get(3) {
        Some(p) => p.parse().map_err(|_| bad())?,
        None => 0,
    };
    Ok(match kind {
        "tap" => SessionEvent::Tap {
            x,
            y,
            page,
            timestamp: n as u64,
        },
        "backspace" => SessionEvent::Backspace,
        "space" => SessionEvent::Space,
        "commit" => SessionEvent::Commit,
        "revert" => SessionEvent::Revert,
        "shift" => SessionEvent::Shift,
        other => {
            let index = other
                .strip_prefix("long_press:")
                .and_then(|i| i.parse().ok())
                .ok_or_else(bad)?;
            SessionEvent::LongPressSelect {
                x,
                y,
                page,
                index,
                timestamp: n as u64,
            }
        }
    })
}

fn simulate(data: &Path, layout: Option<PathBuf>, lang: &LangArgs, taps: &Path) -> Result<()> {
    let (profile_path, model_path) = lang_files(data, lang);
    let layout_path = layout.unwrap_or_else(|| data.join("layouts").join(format!("{}.toml", lang.lang)));
    let profile = load_profile_like(&profile_path)?;
    let tag = profile.language_tag.clone();
    let pack = LanguagePack::new(
        profile,
        load_layout(&layout_path)?,
        load_model(&model_path)?,
        &DecodeConfig::default(),
    )
    .map_err(invalid)?;
    let mut engine = Engine::new(DecodeConfig::default());
    engine.add(pack);
    let mut session = Session::open(Arc::new(engine), "simulate", &[tag], Arc::default()).map_err(invalid)?;
    for (i, line) in read(taps)?.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let event = parse_tap_line(line, i + 1)?;
        let r = session.handle(event).map_err(|e| invalid(format!("line {}: {e}", i + 1)))?;
        let strip: Vec<String> = r
            .strip
            .iter()
            .map(|s| format!("{} ({:.2})", s.surface, s.score))
            .collect();
        let committed = r
            .commit
            .as_ref()
            .map(|c| match &c.correction {
                Some(fix) => format!("  commit {} -> {fix}", c.literal),
                None => format!("  commit {}", c.text),
            })
            .unwrap_or_default();
        println!("{:>4} {:<14} [{}] {}{committed}", r.seq, line, r.pending, strip.join(" | "));
    }
    println!("committed: {}", session.committed_text());
    Ok(())
}

fn suggest(data: &Path, lang: &LangArgs, context: &str, k: usize) -> Result<()> {
    let (profile_path, model_path) = lang_files(data, lang);
    let profile = load_profile_like(&profile_path)?;
    let model = load_model(&model_path)?;
    let ctx = context_tokens(context, &profile);
    for s in next_words(&ctx, &model, &profile, k) {
        println!("{}\t{:.4}", s.surface, s.score);
    }
    if let Some(last) = context.split_whitespace().last() {
        if let Some(expansion) = polykey_core::decode::expand_shorthand(last, &profile) {
            println!("{}\t(shorthand)", expansion.surface);
        }
    }
    Ok(())
}

fn spellcheck(
    data: &Path,
    lang: &LangArgs,
    word: &str,
    wordlist: Option<PathBuf>,
    personal: Option<PathBuf>,
) -> Result<()> {
    let (profile_path, _) = lang_files(data, lang);
    let profile = load_profile_like(&profile_path)?;
    let list_path = wordlist.unwrap_or_else(|| data.join("models").join(format!("{}.words", lang.lang)));
    let list = Wordlist::from_text(&read(&list_path)?).map_err(|e| invalid(format!("{}: {e}", list_path.display())))?;
    let dict = match personal {
        Some(p) => Some(PersonalDict::load(&p).map_err(invalid)?),
        None => None,
    };
    let result = SpellChecker::new(&list).check(word, dict.as_ref(), &profile);
    if result.flagged {
        println!("{word}: not found; suggestions: {}", result.suggestions.join(", "));
    } else {
        println!("{word}: ok");
    }
    Ok(())
}

fn mix_cmd(paths: &[PathBuf], weights: Option<Vec<f64>>, context: &str, adapt: &[String], k: usize) -> Result<()> {
    let models = paths
        .iter()
        .map(|p| load_model(p).map(|m| Arc::new(m) as Arc<dyn LanguageModel>))
        .collect::<Result<Vec<_>>>()?;
    let mut mixed = mix(models, weights).map_err(invalid)?;
    for word in adapt {
        mixed = mixed.adapt_weights(word);
    }
    for (m, w) in mixed.components().iter().zip(mixed.weights()) {
        println!("{}\t{w:.6}", m.language_tag());
    }
    let profile = LanguageProfile::new(mixed.language_tag(), mixed.script(), CharacterInventory::empty(""));
    let mut ctx = vec![polykey_core::text::BOS.to_string()];
    ctx.extend(context.split_whitespace().map(str::to_lowercase));
    for s in next_words(&ctx, &mixed, &profile, k) {
        println!("  {}\t{:.4}", s.surface, s.score);
    }
    Ok(())
}

fn personal_path(data: &Path, user: &UserArgs) -> Result<PathBuf> {
    if user.user.is_empty() || !user.user.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_') {
        bail!("invalid user name {:?}", user.user);
    }
    let dir = user.personal_dir.clone().unwrap_or_else(|| data.join("personal"));
    Ok(dir.join(format!("{}.txt", user.user)))
}

fn personal(data: &Path, cmd: PersonalCmd) -> Result<()> {
    match cmd {
        PersonalCmd::Export { user, output } => {
            let path = personal_path(data, &user)?;
            let dict = if path.exists() {
                PersonalDict::load(&path).map_err(invalid)?
            } else {
                PersonalDict::new()
            };
            write_out(output.as_deref(), &dict.to_text())?;
        }
        PersonalCmd::Import { file, user } => {
            let incoming = PersonalDict::from_text(&read(&file)?).map_err(|e| invalid(format!("{}: {e}", file.display())))?;
            let path = personal_path(data, &user)?;
            let mut dict = if path.exists() {
                PersonalDict::load(&path).map_err(invalid)?
            } else {
                PersonalDict::new()
            };
            dict.merge(&incoming);
            if let Some(dir) = path.parent() {
                std::fs::create_dir_all(dir)?;
            }
            dict.save(&path).map_err(|e| anyhow!(e))?;
            println!("{}: {} words", path.display(), dict.words().count());
        }
        PersonalCmd::Clear { user } => {
            let path = personal_path(data, &user)?;
            if path.exists() {
                std::fs::remove_file(&path).with_context(|| format!("cannot remove {}", path.display()))?;
            }
            println!("cleared {}", user.user);
        }
    }
    Ok(())
}

fn registry(data: &Path, cmd: RegistryCmd) -> Result<()> {
    let reg = Registry::load(&data.join("registry")).map_err(invalid)?;
    match cmd {
        RegistryCmd::Score { tag } => {
            let mut rows = Vec::new();
            for r in &reg.records {
                if tag.as_ref().is_some_and(|t| t != &r.language_tag) {
                    continue;
                }
                let (score, bucket) = polykey_core::registry::priority_score(r).map_err(invalid)?;
                rows.push((bucket, score, r.language_tag.clone()));
            }
            if let Some(t) = &tag {
                if rows.is_empty() {
                    return Err(invalid(format!("no registry record for {t}")));
                }
            }
            rows.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)).then(a.2.cmp(&b.2)));
            for (bucket, score, tag) in rows {
                println!("{tag}\t{score:.4}\tbucket {bucket}");
            }
        }
        RegistryCmd::Dashboard { subtask, json, infer } => {
            let statuses: Vec<StatusRecord> = if infer {
                reg.records
                    .iter()
                    .map(|r| {
                        let s = reg
                            .statuses
                            .iter()
                            .find(|s| s.language_tag == r.language_tag)
                            .cloned()
                            .unwrap_or_else(|| StatusRecord::new(r.language_tag.clone()));
                        infer_status(&s, data)
                    })
                    .collect()
            } else {
                reg.statuses.clone()
            };
            let mut dash = polykey_core::registry::dashboard_report(&reg.records, &statuses).map_err(invalid)?;
            if let Some(s) = subtask {
                dash = dash.only(s.parse::<Subtask>().map_err(|e| anyhow!(e))?);
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&dash)?);
            } else {
                print!("{dash}");
            }
        }
    }
    Ok(())
}

fn serve(data: &Path, port: Option<u16>, languages: Option<Vec<String>>, personal_dir: Option<PathBuf>) -> Result<()> {
    let mut engine = Engine::load(data, languages.as_deref(), DecodeConfig::default()).map_err(invalid)?;
    engine.personal_dir = personal_dir;
    let service = Arc::new(Service::new(engine));
    match port {
        None => {
            let stdin = std::io::stdin();
            serve_lines(&service, stdin.lock(), std::io::stdout())?;
        }
        Some(port) => {
            let listener = std::net::TcpListener::bind(("127.0.0.1", port))?;
            eprintln!("listening on {}", listener.local_addr()?);
            std::io::stderr().flush()?;
            serve_tcp(service, listener)?;
        }
    }
    Ok(())
}
