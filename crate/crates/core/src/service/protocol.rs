//! Wire messages. Each request and response is one JSON object per line.

use serde::{Deserialize, Serialize};

use super::session::{EventResponse, SessionEvent};
use crate::layout::{KeyStates, Layout};

pub const PROTOCOL_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "op")]
pub enum Request {
    Handshake {
        protocol: String,
    },
    OpenSession {
        languages: Vec<String>,
        /// Personal dictionary owner; anonymous sessions learn in memory only.
        #[serde(default)]
        user: Option<String>,
    },
    Event {
        session_id: String,
        event: SessionEvent,
    },
    Layout {
        session_id: String,
    },
    KeyState {
        session_id: String,
    },
    Close {
        session_id: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum Response {
    Handshake {
        protocol: String,
        languages: Vec<String>,
    },
    SessionOpened {
        session_id: String,
        languages: Vec<String>,
        layout_id: String,
    },
    Event(EventResponse),
    Layout {
        session_id: String,
        layout: Layout,
        key_state: KeyStates,
    },
    KeyState {
        session_id: String,
        key_state: KeyStates,
        page: usize,
    },
    Closed {
        session_id: String,
    },
    Error {
        code: String,
        message: String,
    },
}

impl Response {
    pub fn error(e: &crate::error::ServiceError) -> Self {
        Response::Error {
            code: e.code().to_string(),
            message: e.to_string(),
        }
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("responses contain only finite numbers")
    }
}
