//! Trace files: one JSON event per line, in canonical order. Blank lines
//! and lines starting with `#` are ignored on input.

use super::LoadError;
use crate::event::{Event, Trace};

pub fn parse_trace(text: &str) -> Result<Trace, LoadError> {
    let mut trace = Trace::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let event: Event = serde_json::from_str(line)
            .map_err(|e| LoadError::parse(Some(i + 1), None, format!("column {}: {e}", e.column())))?;
        event
            .well_formed()
            .map_err(|reason| LoadError::validation(Some(i + 1), "event".into(), reason))?;
        trace.insert(event);
    }
    Ok(trace)
}

pub fn write_trace(trace: &Trace) -> String {
    let mut out = String::new();
    for e in trace {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}
