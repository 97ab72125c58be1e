//! Name-keyed registries of interchangeable strategies.

use crate::error::{LabError, Result};

pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named + 'static> {
    family: &'static str,
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named + 'static> Registry<T> {
    pub fn new(family: &'static str) -> Self {
        Self {
            family,
            entries: Vec::new(),
        }
    }

    /// Adds a strategy. Later registrations do not shadow earlier ones.
    pub fn with(mut self, entry: Box<T>) -> Self {
        assert!(
            self.entries.iter().all(|e| e.name() != entry.name()),
            "duplicate {} `{}`",
            self.family,
            entry.name()
        );
        self.entries.push(entry);
        self
    }

    pub fn get(&self, name: &str) -> Result<&T> {
        self.entries
            .iter()
            .find(|e| e.name() == name)
            .map(|b| b.as_ref())
            .ok_or_else(|| LabError::UnknownStrategy {
                family: self.family,
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|b| b.as_ref())
    }
}
