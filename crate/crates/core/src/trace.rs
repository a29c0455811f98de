//! Step records emitted by the pipeline in trace mode (one JSON object per line).

use std::io::Write;
use std::sync::Mutex;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum TraceEvent {
    /// One crossing smoothed into two children.
    Resolve {
        crossing: u32,
        /// `C`/`R` within one component, `F`/`B` across two.
        ops: [char; 2],
        components: Vec<usize>,
        positions: [usize; 2],
        /// Exponent shifts of the coefficients of the two children.
        shifts: [i32; 2],
    },
    /// Crossings induced on a strand to remove one height inversion.
    Induce {
        strand: u8,
        under: u32,
        over: u32,
        /// `R1` or `R2`.
        kind: &'static str,
        crossings: usize,
    },
    /// Equal terms merged.
    Dedup { before: usize, after: usize },
    /// One sorting round finished.
    SortRound { round: usize, terms: usize, unsorted: usize },
}

pub trait TraceSink: Sync {
    fn emit(&self, event: TraceEvent);
}

/// Discards every event.
pub struct NoTrace;

impl TraceSink for NoTrace {
    fn emit(&self, _: TraceEvent) {}
}

/// Writes events as JSON lines. Write errors are kept and reported by [`JsonLines::finish`].
pub struct JsonLines<W: Write + Send> {
    inner: Mutex<(W, Option<std::io::Error>)>,
}

impl<W: Write + Send> JsonLines<W> {
    pub fn new(w: W) -> Self {
        Self { inner: Mutex::new((w, None)) }
    }

    pub fn finish(self) -> std::io::Result<W> {
        let (mut w, err) = self.inner.into_inner().unwrap_or_else(|p| p.into_inner());
        if let Some(e) = err {
            return Err(e);
        }
        w.flush()?;
        Ok(w)
    }
}

impl<W: Write + Send> TraceSink for JsonLines<W> {
    fn emit(&self, event: TraceEvent) {
        let mut guard = self.inner.lock().unwrap_or_else(|p| p.into_inner());
        if guard.1.is_some() {
            return;
        }
        let line = serde_json::to_string(&event).expect("trace events serialize");
        if let Err(e) = writeln!(guard.0, "{line}") {
            guard.1 = Some(e);
        }
    }
}

/// Collects events in memory.
#[derive(Default)]
pub struct Recorder {
    events: Mutex<Vec<TraceEvent>>,
}

impl Recorder {
    pub fn events(&self) -> Vec<TraceEvent> {
        self.events.lock().unwrap_or_else(|p| p.into_inner()).clone()
    }
}

impl TraceSink for Recorder {
    fn emit(&self, event: TraceEvent) {
        self.events.lock().unwrap_or_else(|p| p.into_inner()).push(event);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_lines_format() {
        let sink = JsonLines::new(Vec::new());
        sink.emit(TraceEvent::Dedup { before: 4, after: 3 });
        sink.emit(TraceEvent::Induce { strand: 1, under: 1, over: 2, kind: "R1", crossings: 1 });
        let out = String::from_utf8(sink.finish().unwrap()).unwrap();
        assert_eq!(
            out,
            "{\"step\":\"dedup\",\"before\":4,\"after\":3}\n\
             {\"step\":\"induce\",\"strand\":1,\"under\":1,\"over\":2,\"kind\":\"R1\",\"crossings\":1}\n"
        );
    }
}
