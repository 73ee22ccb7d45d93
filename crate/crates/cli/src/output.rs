use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ProvedEmpty,
    Regression,
    InvalidInput,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InvalidInput => 1,
            Status::ProvedEmpty => 2,
            Status::Regression => 3,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Envelope {
    pub command: String,
    pub inputs_digest: String,
    pub status: Status,
    pub payload: Value,
}

impl Envelope {
    /// `inputs` is hashed in its serialized form; serde_json keeps map keys
    /// sorted, so equal inputs give equal digests.
    pub fn new(command: &str, inputs: &Value, status: Status, payload: Value) -> Self {
        let bytes = serde_json::to_vec(&(command, inputs)).expect("JSON values serialize");
        Envelope {
            command: command.to_string(),
            inputs_digest: hex::encode(Sha256::digest(&bytes)),
            status,
            payload,
        }
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("JSON values serialize");
        s.push('\n');
        s
    }
}

/// Left-aligned text table with a header rule.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(header.to_vec());
    out.push('\n');
    out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
    out.push('\n');
    for r in rows {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
        out.push('\n');
    }
    out
}
