use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// What produced a ledger entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyCause {
    EventReading,
    EnergyEventReading,
    /// A reading with only one possible outcome; σ is zero.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub system_label: String,
    pub sigma_nats: f64,
    pub cause: EntropyCause,
    /// Readings are recorded as pairs sharing this index.
    pub event: usize,
}

/// Entropy production per system, in nats.
///
/// Every reading adds two entries: `+σ` for the reader and `-σ` for the system
/// that was read.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyLedger {
    entries: Vec<LedgerEntry>,
    events: usize,
}

impl EntropyLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_reading(&mut self, reader: &str, measured: &str, sigma: f64, cause: EntropyCause) {
        let event = self.events;
        self.events += 1;
        self.entries.push(LedgerEntry {
            system_label: reader.to_string(),
            sigma_nats: sigma,
            cause,
            event,
        });
        self.entries.push(LedgerEntry {
            system_label: measured.to_string(),
            sigma_nats: 0.0 - sigma,
            cause,
            event,
        });
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn event_count(&self) -> usize {
        self.events
    }

    pub fn total(&self, label: &str) -> f64 {
        self.entries
            .iter()
            .filter(|e| e.system_label == label)
            .map(|e| e.sigma_nats)
            .sum()
    }

    pub fn totals(&self) -> BTreeMap<String, f64> {
        let mut out = BTreeMap::new();
        for e in &self.entries {
            *out.entry(e.system_label.clone()).or_insert(0.0) += e.sigma_nats;
        }
        out
    }

    pub fn global_total(&self) -> f64 {
        self.entries.iter().map(|e| e.sigma_nats).sum()
    }

    /// Every pair sums to exactly zero.
    pub fn is_balanced(&self) -> bool {
        let mut per_event = vec![0.0; self.events];
        for e in &self.entries {
            per_event[e.event] += e.sigma_nats;
        }
        per_event.iter().all(|s| *s == 0.0)
    }

    /// Appends another ledger, renumbering its events.
    pub fn merge(&mut self, other: &EntropyLedger) {
        let offset = self.events;
        self.entries.extend(other.entries.iter().map(|e| LedgerEntry {
            event: e.event + offset,
            ..e.clone()
        }));
        self.events += other.events;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_cancel() {
        let mut l = EntropyLedger::new();
        l.record_reading("M", "S", 1.0, EntropyCause::EventReading);
        l.record_reading("experimenter", "S", 1.0, EntropyCause::EnergyEventReading);
        assert_eq!(l.total("S"), -2.0);
        assert_eq!(l.total("M"), 1.0);
        assert_eq!(l.global_total(), 0.0);
        assert!(l.is_balanced());
        let mut m = l.clone();
        m.merge(&l);
        assert_eq!(m.event_count(), 4);
        assert_eq!(m.totals()["S"], -4.0);
    }
}
