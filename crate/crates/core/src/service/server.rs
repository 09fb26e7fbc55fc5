use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use super::protocol::{Request, Response, PROTOCOL_VERSION};
use super::session::Session;
use super::Engine;
use crate::error::ServiceError;
use crate::personal::PersonalDict;

/// Sessions and user dictionaries over a shared engine. Each session has
/// its own lock, so one session's decoding never waits on another's.
pub struct Service {
    engine: Arc<Engine>,
    sessions: Mutex<HashMap<String, Arc<Mutex<Session>>>>,
    users: Mutex<HashMap<String, Arc<Mutex<PersonalDict>>>>,
    owners: Mutex<HashMap<String, String>>,
    next_id: AtomicU64,
}

impl Service {
    pub fn new(engine: Engine) -> Self {
        Self {
            engine: Arc::new(engine),
            sessions: Mutex::default(),
            users: Mutex::default(),
            owners: Mutex::default(),
            next_id: AtomicU64::new(1),
        }
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    /// Handles one request line and returns one response line.
    pub fn handle_line(&self, line: &str) -> String {
        let response = match serde_json::from_str::<Request>(line) {
            Ok(request) => self.handle(request),
            Err(e) => Response::error(&ServiceError::Malformed(e.to_string())),
        };
        response.to_line()
    }

    pub fn handle(&self, request: Request) -> Response {
        self.dispatch(request).unwrap_or_else(|e| Response::error(&e))
    }

    fn dispatch(&self, request: Request) -> Result<Response, ServiceError> {
        match request {
            Request::Handshake { protocol } => {
                if protocol != PROTOCOL_VERSION {
                    return Err(ServiceError::UnsupportedProtocol(protocol));
                }
                Ok(Response::Handshake {
                    protocol: PROTOCOL_VERSION.into(),
                    languages: self.engine.languages(),
                })
            }
            Request::OpenSession { languages, user } => {
                let dict = match &user {
                    Some(u) => self.user_dict(u)?,
                    None => Arc::default(),
                };
                let id = format!("s{}", self.next_id.fetch_add(1, Ordering::SeqCst));
                let session = Session::open(self.engine.clone(), id.clone(), &languages, dict)?;
                let layout_id = session.layout().layout_id.clone();
                lock(&self.sessions).insert(id.clone(), Arc::new(Mutex::new(session)));
                if let Some(u) = user {
                    lock(&self.owners).insert(id.clone(), u);
                }
                Ok(Response::SessionOpened {
                    session_id: id,
                    languages,
                    layout_id,
                })
            }
            Request::Event { session_id, event } => {
                let session = self.session(&session_id)?;
                let response = lock(&session).handle(event)?;
                Ok(Response::Event(response))
            }
            Request::Layout { session_id } => {
                let session = self.session(&session_id)?;
                let s = lock(&session);
                Ok(Response::Layout {
                    session_id,
                    layout: s.layout().as_ref().clone(),
                    key_state: s.key_state().clone(),
                })
            }
            Request::KeyState { session_id } => {
                let session = self.session(&session_id)?;
                let s = lock(&session);
                Ok(Response::KeyState {
                    session_id,
                    key_state: s.key_state().clone(),
                    page: s.page(),
                })
            }
            Request::Close { session_id } => {
                lock(&self.sessions)
                    .remove(&session_id)
                    .ok_or_else(|| ServiceError::UnknownSession(session_id.clone()))?;
                if let Some(user) = lock(&self.owners).remove(&session_id) {
                    self.save_user(&user)?;
                }
                Ok(Response::Closed { session_id })
            }
        }
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<Session>>, ServiceError> {
        lock(&self.sessions)
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    fn user_path(&self, user: &str) -> Result<Option<PathBuf>, ServiceError> {
        if user.is_empty() || !user.chars().all(|c| c.is_alphanumeric() || c == '-' || c == '_') {
            return Err(ServiceError::Malformed(format!("invalid user name {user:?}")));
        }
        Ok(self.engine.personal_dir.as_ref().map(|d| d.join(format!("{user}.txt"))))
    }

    fn user_dict(&self, user: &str) -> Result<Arc<Mutex<PersonalDict>>, ServiceError> {
        let path = self.user_path(user)?;
        let mut users = lock(&self.users);
        if let Some(d) = users.get(user) {
            return Ok(d.clone());
        }
        let dict = match path {
            Some(p) if p.exists() => PersonalDict::load(&p).map_err(|e| ServiceError::Asset {
                path: p.display().to_string(),
                message: e.to_string(),
            })?,
            _ => PersonalDict::new(),
        };
        let dict = Arc::new(Mutex::new(dict));
        users.insert(user.to_string(), dict.clone());
        Ok(dict)
    }

    fn save_user(&self, user: &str) -> Result<(), ServiceError> {
        let Some(path) = self.user_path(user)? else {
            return Ok(());
        };
        let Some(dict) = lock(&self.users).get(user).cloned() else {
            return Ok(());
        };
        let d = lock(&dict);
        d.save(&path).map_err(|e| ServiceError::Asset {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// Serves requests line by line until the reader is exhausted.
pub fn serve_lines<R: BufRead, W: Write>(service: &Service, reader: R, mut writer: W) -> std::io::Result<()> {
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        writeln!(writer, "{}", service.handle_line(&line))?;
        writer.flush()?;
    }
    Ok(())
}

/// Accepts connections forever, one thread per connection.
pub fn serve_tcp(service: Arc<Service>, listener: TcpListener) -> std::io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let service = service.clone();
        std::thread::spawn(move || {
            let Ok(reader) = stream.try_clone() else {
                return;
            };
            let _ = serve_lines(&service, BufReader::new(reader), stream);
        });
    }
    Ok(())
}

fn lock<T>(m: &Mutex<T>) -> std::sync::MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}
