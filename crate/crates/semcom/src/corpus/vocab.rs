//! Attribute vocabularies for the six person slots and the location set.

/// The six person-attribute slots, in wire order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Slot {
    Gender,
    ShirtColor,
    ShirtLength,
    PantsColor,
    PantsLength,
    ShoeColor,
}

/// Person slots in the order they appear in entries and one-hot groups.
pub const PERSON_SLOTS: [Slot; 6] = [
    Slot::Gender,
    Slot::ShirtColor,
    Slot::ShirtLength,
    Slot::PantsColor,
    Slot::PantsLength,
    Slot::ShoeColor,
];

const GENDERS: [&str; 2] = ["male", "female"];
const COLORS: [&str; 8] = [
    "white", "black", "red", "blue", "green", "gray", "yellow", "brown",
];
const LENGTHS: [&str; 2] = ["long", "short"];
const LOCATIONS: [&str; 8] = [
    "gate-1", "gate-2", "gate-3", "gate-4", "gate-5", "gate-6", "gate-7", "gate-8",
];

/// Token tables for every attribute slot plus the location labels.
///
/// All tokens are lowercase ASCII and duplicate-free; the one-hot layout
/// over the six person slots has total dimension 2+8+2+8+2+8 = 30.
#[derive(Debug, Clone, Copy)]
pub struct AttributeVocab;

impl AttributeVocab {
    /// Tokens for one person slot.
    pub fn slot_tokens(slot: Slot) -> &'static [&'static str] {
        match slot {
            Slot::Gender => &GENDERS,
            Slot::ShirtColor | Slot::PantsColor | Slot::ShoeColor => &COLORS,
            Slot::ShirtLength | Slot::PantsLength => &LENGTHS,
        }
    }

    pub fn locations() -> &'static [&'static str] {
        &LOCATIONS
    }

    pub fn contains(slot: Slot, token: &str) -> bool {
        Self::slot_tokens(slot).contains(&token)
    }

    pub fn is_location(token: &str) -> bool {
        LOCATIONS.contains(&token)
    }

    /// Index of `token` within its slot group, if in vocabulary.
    pub fn token_index(slot: Slot, token: &str) -> Option<usize> {
        Self::slot_tokens(slot).iter().position(|t| *t == token)
    }
}

/// A time string is well-formed when it matches `HH:MM:SS` with in-range
/// fields.
pub(crate) fn is_valid_time(s: &str) -> bool {
    let b = s.as_bytes();
    if b.len() != 8 || b[2] != b':' || b[5] != b':' {
        return false;
    }
    let digits = [b[0], b[1], b[3], b[4], b[6], b[7]];
    if !digits.iter().all(u8::is_ascii_digit) {
        return false;
    }
    let field = |hi: u8, lo: u8| (hi - b'0') * 10 + (lo - b'0');
    field(b[0], b[1]) < 24 && field(b[3], b[4]) < 60 && field(b[6], b[7]) < 60
}
