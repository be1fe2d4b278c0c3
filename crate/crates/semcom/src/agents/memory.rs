//! Agent memory: a bounded least-recently-used cache of generated
//! sentences (short term) alongside the attribute vocabularies used for
//! token repair (long term).

use indexmap::IndexMap;

use crate::corpus::AttributeVocab;

pub const DEFAULT_SHORT_TERM_CAPACITY: usize = 1024;

/// Cache hits must be byte-identical to recomputation; the cache can only
/// ever change latency, never output.
#[derive(Debug, Clone)]
pub struct MemorySystem {
    short_term: IndexMap<String, String>,
    capacity: usize,
    long_term: AttributeVocab,
}

impl MemorySystem {
    pub fn new(capacity: usize) -> Self {
        Self {
            short_term: IndexMap::new(),
            capacity: capacity.max(1),
            long_term: AttributeVocab,
        }
    }

    /// The vocabulary tables backing token repair.
    pub fn long_term(&self) -> &AttributeVocab {
        &self.long_term
    }

    pub fn short_term_len(&self) -> usize {
        self.short_term.len()
    }

    /// Looks up a cached sentence and marks it most recently used.
    pub fn short_term_get(&mut self, key: &str) -> Option<String> {
        let value = self.short_term.shift_remove(key)?;
        self.short_term.insert(key.to_string(), value.clone());
        Some(value)
    }

    /// Inserts a sentence, evicting the least recently used entry at
    /// capacity.
    pub fn short_term_insert(&mut self, key: String, value: String) {
        if self.short_term.len() >= self.capacity && !self.short_term.contains_key(&key) {
            self.short_term.shift_remove_index(0);
        }
        self.short_term.shift_remove(&key);
        self.short_term.insert(key, value);
    }
}

impl Default for MemorySystem {
    fn default() -> Self {
        Self::new(DEFAULT_SHORT_TERM_CAPACITY)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn capacity_is_enforced_with_lru_eviction() {
        let mut memory = MemorySystem::new(2);
        memory.short_term_insert("a".into(), "1".into());
        memory.short_term_insert("b".into(), "2".into());
        // Touch `a` so `b` becomes the eviction victim.
        assert_eq!(memory.short_term_get("a").as_deref(), Some("1"));
        memory.short_term_insert("c".into(), "3".into());
        assert_eq!(memory.short_term_len(), 2);
        assert!(memory.short_term_get("b").is_none());
        assert_eq!(memory.short_term_get("a").as_deref(), Some("1"));
        assert_eq!(memory.short_term_get("c").as_deref(), Some("3"));
    }

    #[test]
    fn reinserting_a_key_updates_in_place() {
        let mut memory = MemorySystem::new(2);
        memory.short_term_insert("a".into(), "1".into());
        memory.short_term_insert("a".into(), "2".into());
        assert_eq!(memory.short_term_len(), 1);
        assert_eq!(memory.short_term_get("a").as_deref(), Some("2"));
    }
}
