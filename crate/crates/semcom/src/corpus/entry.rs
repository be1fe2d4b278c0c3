//! The entry wire format: one lowercase ASCII line of comma-separated
//! attribute tokens, the compact representation every scheme ultimately
//! tries to move across the channel.

use serde::{Deserialize, Serialize};

use super::vocab::{is_valid_time, AttributeVocab, Slot, PERSON_SLOTS};
use super::CorpusError;

/// One transmitted entry: time and location attached by the transmitter,
/// followed by the six person attributes.
///
/// Fields are plain strings so that damaged tokens coming off a noisy
/// channel (or a sloppy backend) can be carried verbatim until repair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EntryRecord {
    pub time: String,
    pub location: String,
    pub gender: String,
    pub shirt_color: String,
    pub shirt_length: String,
    pub pants_color: String,
    pub pants_length: String,
    pub shoe_color: String,
}

impl EntryRecord {
    /// Field values in wire order.
    pub fn fields(&self) -> [&str; 8] {
        [
            &self.time,
            &self.location,
            &self.gender,
            &self.shirt_color,
            &self.shirt_length,
            &self.pants_color,
            &self.pants_length,
            &self.shoe_color,
        ]
    }

    pub fn person_token(&self, slot: Slot) -> &str {
        match slot {
            Slot::Gender => &self.gender,
            Slot::ShirtColor => &self.shirt_color,
            Slot::ShirtLength => &self.shirt_length,
            Slot::PantsColor => &self.pants_color,
            Slot::PantsLength => &self.pants_length,
            Slot::ShoeColor => &self.shoe_color,
        }
    }

    pub fn person_token_mut(&mut self, slot: Slot) -> &mut String {
        match slot {
            Slot::Gender => &mut self.gender,
            Slot::ShirtColor => &mut self.shirt_color,
            Slot::ShirtLength => &mut self.shirt_length,
            Slot::PantsColor => &mut self.pants_color,
            Slot::PantsLength => &mut self.pants_length,
            Slot::ShoeColor => &mut self.shoe_color,
        }
    }

    /// True when every field is in vocabulary and the time is well-formed.
    pub fn is_valid(&self) -> bool {
        is_valid_time(&self.time)
            && AttributeVocab::is_location(&self.location)
            && PERSON_SLOTS
                .iter()
                .all(|s| AttributeVocab::contains(*s, self.person_token(*s)))
    }
}

/// Per-field validity report for a structurally intact but damaged entry.
/// Out-of-vocabulary tokens are kept verbatim so repair can work on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryReport {
    pub entry: EntryRecord,
    /// `false` marks a field whose token is out of vocabulary (or, for the
    /// time field, not shaped `HH:MM:SS`). Indexed in wire order.
    pub field_ok: [bool; 8],
}

/// Outcome of parsing an entry line with the right field count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EntryParse {
    /// All eight fields valid.
    Valid(EntryRecord),
    /// Structure intact, one or more tokens damaged.
    Damaged(EntryReport),
}

impl EntryParse {
    /// The carried entry regardless of token validity.
    pub fn entry(&self) -> &EntryRecord {
        match self {
            EntryParse::Valid(e) => e,
            EntryParse::Damaged(r) => &r.entry,
        }
    }

    pub fn into_entry(self) -> EntryRecord {
        match self {
            EntryParse::Valid(e) => e,
            EntryParse::Damaged(r) => r.entry,
        }
    }
}

/// Canonical wire encoding: fields joined by `", "`, terminated by `\n`.
pub fn serialize_entry(entry: &EntryRecord) -> Vec<u8> {
    let mut line = entry.fields().join(", ");
    line.push('\n');
    line.into_bytes()
}

/// Parses an entry line.
///
/// Accepts the bytes up to the first newline, splits on commas and trims
/// surrounding spaces. Exactly eight fields are required; anything else is
/// a structural error. Damaged tokens are reported, never dropped.
pub fn parse_entry(bytes: &[u8]) -> Result<EntryParse, CorpusError> {
    let line_end = bytes
        .iter()
        .position(|&b| b == b'\n')
        .unwrap_or(bytes.len());
    let line = std::str::from_utf8(&bytes[..line_end]).map_err(|_| CorpusError::NotAscii)?;
    if !line.is_ascii() {
        return Err(CorpusError::NotAscii);
    }

    let fields: Vec<&str> = line.split(',').map(str::trim).collect();
    if fields.len() != 8 {
        return Err(CorpusError::FieldCount {
            found: fields.len(),
        });
    }

    let entry = EntryRecord {
        time: fields[0].to_string(),
        location: fields[1].to_string(),
        gender: fields[2].to_string(),
        shirt_color: fields[3].to_string(),
        shirt_length: fields[4].to_string(),
        pants_color: fields[5].to_string(),
        pants_length: fields[6].to_string(),
        shoe_color: fields[7].to_string(),
    };

    let mut field_ok = [true; 8];
    field_ok[0] = is_valid_time(&entry.time);
    field_ok[1] = AttributeVocab::is_location(&entry.location);
    for (i, slot) in PERSON_SLOTS.iter().enumerate() {
        field_ok[i + 2] = AttributeVocab::contains(*slot, entry.person_token(*slot));
    }

    if field_ok.iter().all(|ok| *ok) {
        Ok(EntryParse::Valid(entry))
    } else {
        Ok(EntryParse::Damaged(EntryReport { entry, field_ok }))
    }
}

/// Retrieval target: one token per person slot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub gender: String,
    pub shirt_color: String,
    pub shirt_length: String,
    pub pants_color: String,
    pub pants_length: String,
    pub shoe_color: String,
}

impl Query {
    pub fn token(&self, slot: Slot) -> &str {
        match slot {
            Slot::Gender => &self.gender,
            Slot::ShirtColor => &self.shirt_color,
            Slot::ShirtLength => &self.shirt_length,
            Slot::PantsColor => &self.pants_color,
            Slot::PantsLength => &self.pants_length,
            Slot::ShoeColor => &self.shoe_color,
        }
    }

    pub fn is_valid(&self) -> bool {
        PERSON_SLOTS
            .iter()
            .all(|s| AttributeVocab::contains(*s, self.token(*s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample_entry() -> EntryRecord {
        EntryRecord {
            time: "12:00:05".into(),
            location: "gate-3".into(),
            gender: "male".into(),
            shirt_color: "white".into(),
            shirt_length: "long".into(),
            pants_color: "black".into(),
            pants_length: "long".into(),
            shoe_color: "black".into(),
        }
    }

    #[test]
    fn canonical_line_is_56_bytes() {
        let bytes = serialize_entry(&sample_entry());
        assert_eq!(
            bytes,
            b"12:00:05, gate-3, male, white, long, black, long, black\n"
        );
        assert_eq!(bytes.len(), 56);
    }

    #[test]
    fn parse_inverts_serialize() {
        let entry = sample_entry();
        let parsed = parse_entry(&serialize_entry(&entry)).unwrap();
        assert_eq!(parsed, EntryParse::Valid(entry));
    }

    #[test]
    fn single_token_corruption_is_reported() {
        let line = b"12:00:05, gate-3, malw, white, long, black, long, black\n";
        match parse_entry(line).unwrap() {
            EntryParse::Damaged(report) => {
                assert_eq!(report.entry.gender, "malw");
                let mut expected = [true; 8];
                expected[2] = false;
                assert_eq!(report.field_ok, expected);
            }
            other => panic!("expected damaged parse, got {other:?}"),
        }
    }

    #[test]
    fn wrong_field_count_is_structural() {
        assert!(matches!(
            parse_entry(b"garbage"),
            Err(CorpusError::FieldCount { found: 1 })
        ));
        assert!(matches!(
            parse_entry(b"a, b, c, d, e, f, g, h, i\n"),
            Err(CorpusError::FieldCount { found: 9 })
        ));
    }
}
