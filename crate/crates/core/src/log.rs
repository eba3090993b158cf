//! Line-oriented, append-only event log backing the graph store.
//!
//! Statement events follow
//! `<event> <statementId> <subjKind:key> <predKey> <objKind:key[^^datatype]> <userId> <timestamp>`.
//! Entity and account records precede the statements that use them:
//!
//! ```text
//! entity Resource:R100000 "Scholarly Knowledge Graphs"
//! entity Literal:L100000^^xsd:string "T"
//! account U100000 3f5a... "Ada"
//! add S100000 Resource:R100000 P30 Resource:R278 U100000 2026-10-19T09:30:00.000Z
//! remove S100000 Resource:R100000 P30 Resource:R278 U100001 2026-10-19T09:31:12.345Z
//! ```
//!
//! For `remove` the trailing user and timestamp are the removal provenance.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::DateTime;

use crate::error::{Error, Result};
use crate::model::{Entity, EntityId, EntityKind, Literal, Provenance, Statement, StatementId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccountRecord {
    pub user_id: String,
    /// Hex digest of the API token; `None` for accounts that cannot log in.
    pub token_hash: Option<String>,
    pub display_name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Event {
    Entity(Entity),
    Account(AccountRecord),
    Add(Statement),
    Remove { statement: Statement, removal: Provenance },
}

fn object_token(object: &EntityId, literal: Option<&Literal>) -> String {
    match literal {
        Some(lit) => format!("{object}^^{}", lit.datatype),
        None => object.to_string(),
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Encodes an event as one log line, without the trailing newline. `literal`
/// supplies the datatype for literal objects of statement events.
pub fn encode(event: &Event, literal: Option<&Literal>) -> String {
    match event {
        Event::Entity(e) => match &e.literal {
            Some(lit) => format!("entity {}^^{} {}", e.id, lit.datatype, quote(&lit.value)),
            None => format!("entity {} {}", e.id, quote(&e.label)),
        },
        Event::Account(a) => format!(
            "account {} {} {}",
            a.user_id,
            a.token_hash.as_deref().unwrap_or("-"),
            quote(&a.display_name)
        ),
        Event::Add(s) => statement_line("add", s, &s.provenance, literal),
        Event::Remove { statement, removal } => statement_line("remove", statement, removal, literal),
    }
}

fn statement_line(tag: &str, s: &Statement, prov: &Provenance, literal: Option<&Literal>) -> String {
    format!(
        "{tag} {} {} {} {} {} {}",
        s.id,
        s.subject,
        s.predicate.key,
        object_token(&s.object, literal),
        prov.user_id,
        prov.timestamp_string()
    )
}

fn split_entity_token(token: &str) -> std::result::Result<(EntityId, Option<&str>), String> {
    match token.split_once("^^") {
        Some((id, datatype)) => Ok((id.parse()?, Some(datatype))),
        None => Ok((token.parse()?, None)),
    }
}

pub fn decode(line: &str) -> std::result::Result<Event, String> {
    let (tag, rest) = line.split_once(' ').ok_or("missing fields")?;
    match tag {
        "entity" => {
            let (token, label) = rest.split_once(' ').ok_or("missing label")?;
            let (id, datatype) = split_entity_token(token)?;
            let text: String = serde_json::from_str(label).map_err(|e| e.to_string())?;
            match (id.kind, datatype) {
                (EntityKind::Literal, Some(dt)) => Ok(Event::Entity(Entity {
                    id,
                    label: text.clone(),
                    literal: Some(Literal::new(text, dt)),
                })),
                (EntityKind::Literal, None) => Err("literal without datatype".into()),
                (_, Some(_)) => Err("datatype on non-literal".into()),
                (_, None) => Ok(Event::Entity(Entity {
                    id,
                    label: text,
                    literal: None,
                })),
            }
        }
        "account" => {
            let mut parts = rest.splitn(3, ' ');
            let user_id = parts.next().ok_or("missing user id")?.to_owned();
            let hash = parts.next().ok_or("missing token hash")?;
            let name: String = serde_json::from_str(parts.next().ok_or("missing name")?).map_err(|e| e.to_string())?;
            Ok(Event::Account(AccountRecord {
                user_id,
                token_hash: (hash != "-").then(|| hash.to_owned()),
                display_name: name,
            }))
        }
        "add" | "remove" => {
            let fields: Vec<&str> = rest.split(' ').collect();
            if fields.len() != 6 {
                return Err(format!("expected 6 fields, found {}", fields.len()));
            }
            let id: StatementId = fields[0].parse()?;
            let subject: EntityId = fields[1].parse()?;
            let predicate = EntityId::predicate(fields[2]);
            let (object, _) = split_entity_token(fields[3])?;
            let timestamp = DateTime::parse_from_rfc3339(fields[5])
                .map_err(|e| e.to_string())?
                .to_utc();
            let prov = Provenance::at(fields[4], timestamp);
            let statement = Statement {
                id,
                subject,
                predicate,
                object,
                provenance: prov.clone(),
            };
            if tag == "add" {
                Ok(Event::Add(statement))
            } else {
                Ok(Event::Remove {
                    statement,
                    removal: prov,
                })
            }
        }
        other => Err(format!("unknown event `{other}`")),
    }
}

/// Reads every event from a log file. A missing file is an empty log.
pub fn read_all(path: &Path) -> Result<Vec<Event>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(e.into()),
    };
    let mut events = Vec::new();
    for (index, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = decode(&line).map_err(|message| Error::CorruptLog {
            line: index + 1,
            message,
        })?;
        events.push(event);
    }
    Ok(events)
}

#[derive(Debug)]
pub struct LogWriter {
    path: PathBuf,
    file: File,
}

impl LogWriter {
    pub fn open(path: &Path) -> Result<Self> {
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            path: path.to_owned(),
            file,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Appends the lines as a single write and syncs them to the OS.
    pub fn append(&mut self, lines: &[String]) -> Result<()> {
        if lines.is_empty() {
            return Ok(());
        }
        let mut buf = String::new();
        for line in lines {
            buf.push_str(line);
            buf.push('\n');
        }
        self.file.write_all(buf.as_bytes())?;
        self.file.flush()?;
        Ok(())
    }
}
