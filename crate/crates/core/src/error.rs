use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InventoryError {
    #[error("inventory contains an empty grapheme")]
    EmptyGrapheme,
    #[error("inventory entry {0:?} is not NFC")]
    NonNfc(String),
    #[error("grapheme {0:?} is both required and loanword-optional")]
    Overlap(String),
    #[error("inventory parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("profile {0} has no everyday script")]
    NoEverydayScript(String),
    #[error("leniency {0} outside [0, 1]")]
    Leniency(f64),
    #[error("profile parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Inventory(#[from] InventoryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LayoutError {
    #[error("layout schema error: {0}")]
    Schema(String),
    #[error("duplicate key id {key_id:?} on page {page}")]
    DuplicateKeyId { page: usize, key_id: String },
    #[error("dynamic rule targets unknown key {0:?}")]
    DanglingRuleTarget(String),
    #[error("{element} has non-NFC or empty output {text:?}")]
    NonNfcOutput { element: String, text: String },
    #[error("dynamic rule {index} produces {output:?} outside the layout inventory")]
    RuleOutsideInventory { index: usize, output: String },
    #[error("dynamic rule {index} references unknown grapheme class {class:?}")]
    UnknownClass { index: usize, class: String },
    #[error("invalid geometry for {element}: {reason}")]
    Geometry { element: String, reason: String },
    #[error("page {0} has no active keys")]
    NoActiveKeys(usize),
    #[error("page {0} does not exist")]
    UnknownPage(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutogenError {
    #[error("grapheme {0:?} is not Latin script")]
    NonLatinScript(String),
    #[error("no room left for {grapheme:?}: host {host:?} and page 1 are full")]
    HostOverflowUnresolvable { grapheme: String, host: String },
    #[error("corpus contains no tokens")]
    EmptyCorpus,
    #[error("invalid autogen options: {0}")]
    InvalidOptions(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("corpus contains no sentences")]
    EmptyCorpus,
    #[error("n-gram order {0} is not supported (1..=5)")]
    OrderTooLarge(usize),
    #[error("invalid training parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

impl FormatError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("tap sequence is empty")]
    EmptyTapSequence,
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

#[derive(Debug, Error)]
pub enum PersonalError {
    #[error("{word:?} contains {ch:?}, which is outside the inventory")]
    InventoryViolation { word: String, ch: char },
    #[error("word must be non-empty")]
    EmptyWord,
    #[error("personal dictionary {0}")]
    Format(FormatError),
    #[error("personal dictionary io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MixError {
    #[error("cannot mix {first_tag} ({first_script}) with {second_tag} ({second_script}): scripts differ")]
    CrossScriptMix {
        first_tag: String,
        first_script: String,
        second_tag: String,
        second_script: String,
    },
    #[error("no models to mix")]
    EmptyModelList,
    #[error("invalid mixture weights: {0}")]
    InvalidWeights(String),
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("{language}: factor {field} = {value} out of range")]
    InvalidFactorRange {
        language: String,
        field: &'static str,
        value: String,
    },
    #[error("status for {0} has no language record")]
    OrphanStatus(String),
    #[error("{0}: released requires all other subtasks done")]
    PrematureRelease(String),
    #[error("unknown subtask {0:?}")]
    UnknownSubtask(String),
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("registry io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error("missing {kind} for {language}: {path}")]
    MissingAsset {
        language: String,
        kind: &'static str,
        path: String,
    },
    #[error("{path}: {message}")]
    Asset { path: String, message: String },
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("language {0:?} is not loaded")]
    UnknownLanguage(String),
    #[error("malformed message: {0}")]
    Malformed(String),
    #[error("unsupported protocol {0:?}, expected v1")]
    UnsupportedProtocol(String),
    #[error(transparent)]
    Mix(#[from] MixError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

impl ServiceError {
    /// Stable code sent to clients.
    pub fn code(&self) -> &'static str {
        match self {
            ServiceError::MissingAsset { .. } => "MissingAsset",
            ServiceError::Asset { .. } => "InvalidAsset",
            ServiceError::UnknownSession(_) => "UnknownSession",
            ServiceError::InvalidEvent(_) | ServiceError::Decode(_) | ServiceError::Layout(_) => "InvalidEvent",
            ServiceError::UnknownLanguage(_) => "UnknownLanguage",
            ServiceError::Malformed(_) => "Malformed",
            ServiceError::UnsupportedProtocol(_) => "UnsupportedProtocol",
            ServiceError::Mix(MixError::CrossScriptMix { .. }) => "CrossScriptMix",
            ServiceError::Mix(MixError::EmptyModelList) => "EmptyModelList",
            ServiceError::Mix(MixError::InvalidWeights(_)) => "InvalidWeights",
        }
    }
}
