//! `polykey` command-line front end.
//!
//! Exit codes: 0 on success, 1 when the input fails validation, 2 for
//! usage errors such as bad arguments or unreadable files.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "polykey", version, about = "Multilingual input-method engine")]
struct Cli {
    /// Data directory with profiles/, layouts/, models/, corpora/ and registry/.
    #[arg(long, global = true, env = "POLYKEY_DATA", default_value = "data")]
    data: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Keyboard layout tools.
    #[command(subcommand)]
    Layout(LayoutCmd),
    /// Corpus normalization and model training.
    #[command(subcommand)]
    Corpus(CorpusCmd),
    /// Tap decoding.
    #[command(subcommand)]
    Decode(DecodeCmd),
    /// Next-word predictions for a context.
    Suggest {
        #[arg(long, default_value = "")]
        context: String,
        #[command(flatten)]
        lang: LangArgs,
        #[arg(short = 'k', long, default_value_t = 3)]
        count: usize,
    },
    /// Checks one word against a wordlist.
    Spellcheck {
        #[arg(long)]
        word: String,
        #[command(flatten)]
        lang: LangArgs,
        /// Wordlist file; defaults to models/<lang>.words.
        #[arg(long)]
        wordlist: Option<PathBuf>,
        /// Personal dictionary consulted before flagging.
        #[arg(long)]
        personal: Option<PathBuf>,
    },
    /// Mixes same-script models and shows predictions.
    Mix {
        #[arg(long, num_args = 1.., required = true)]
        models: Vec<PathBuf>,
        /// Comma-separated weights summing to 1; uniform by default.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
        #[arg(long, default_value = "")]
        context: String,
        /// Words committed before predicting, adapting the weights.
        #[arg(long, value_delimiter = ',')]
        adapt: Vec<String>,
        #[arg(short = 'k', long, default_value_t = 5)]
        count: usize,
    },
    /// Personal dictionary management.
    #[command(subcommand)]
    Personal(PersonalCmd),
    /// Language prioritization and rollout status.
    #[command(subcommand)]
    Registry(RegistryCmd),
    /// Runs the session service on stdio, or on a local TCP port.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        /// Languages to load; all profiles by default.
        #[arg(long, value_delimiter = ',')]
        languages: Option<Vec<String>>,
        /// Directory for per-user personal dictionaries.
        #[arg(long, env = "POLYKEY_PERSONAL")]
        personal_dir: Option<PathBuf>,
    },
}

#[derive(Args, Clone)]
struct LangArgs {
    /// Language tag resolved in the data directory.
    #[arg(long, default_value = "en")]
    lang: String,
    /// Profile file overriding profiles/<lang>.toml.
    #[arg(long)]
    profile: Option<PathBuf>,
    /// Model file overriding models/<lang>.arpa.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Subcommand)]
enum LayoutCmd {
    /// Parses and validates a layout file.
    Validate { file: PathBuf },
    /// Checks that a layout can type every grapheme of an inventory.
    Coverage {
        file: PathBuf,
        /// Inventory or profile file.
        #[arg(long)]
        inventory: PathBuf,
    },
    /// Prints a text chart of a layout.
    Render { file: PathBuf },
    /// Generates a Latin-script layout from an inventory and a corpus.
    Generate {
        #[arg(long, default_value = "qwerty")]
        grid: String,
        /// Inventory or profile file.
        #[arg(long)]
        inventory: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value_t = 0.02)]
        threshold: f64,
        #[arg(long, default_value = "e")]
        fallback_host: String,
        #[arg(long, default_value_t = 8)]
        max_long_press: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusCmd {
    /// Tokenizes a corpus (one sentence per line) and reports rejections.
    Normalize {
        corpus: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Trains an n-gram model and a wordlist.
    Train {
        corpus: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, default_value_t = 3)]
        order: usize,
        #[arg(long, default_value_t = 0.75)]
        discount: f64,
        #[arg(short, long)]
        output: PathBuf,
        /// Wordlist path; defaults to the model path with a .words extension.
        #[arg(long)]
        wordlist: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DecodeCmd {
    /// Replays a tap file and prints committed text and suggestions.
    Simulate {
        #[arg(long)]
        layout: Option<PathBuf>,
        #[command(flatten)]
        lang: LangArgs,
        /// Lines of `x y kind [page]`, kind one of tap, long_press:N,
        /// backspace, space, commit, revert.
        #[arg(long)]
        taps: PathBuf,
    },
}

#[derive(Subcommand)]
enum PersonalCmd {
    /// Prints a user's dictionary.
    Export {
        #[command(flatten)]
        user: UserArgs,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Merges a dictionary file into a user's dictionary.
    Import {
        file: PathBuf,
        #[command(flatten)]
        user: UserArgs,
    },
    /// Deletes a user's dictionary.
    Clear {
        #[command(flatten)]
        user: UserArgs,
    },
}

#[derive(Args)]
struct UserArgs {
    #[arg(long, default_value = "default")]
    user: String,
    /// Defaults to <data>/personal.
    #[arg(long, env = "POLYKEY_PERSONAL")]
    personal_dir: Option<PathBuf>,
}

#[derive(Subcommand)]
enum RegistryCmd {
    /// Priority score and bucket of one language, or all.
    Score { tag: Option<String> },
    /// Per-subtask rollout dashboard.
    Dashboard {
        #[arg(long)]
        subtask: Option<String>,
        #[arg(long)]
        json: bool,
        /// Mark subtasks done when their assets exist in the data directory.
        #[arg(long)]
        infer: bool,
    },
}

/// An input that parsed but is not acceptable: exit code 1.
#[derive(Debug)]
pub struct Invalid(pub String);

impl std::fmt::Display for Invalid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Invalid {}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Invalid>().is_some() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
