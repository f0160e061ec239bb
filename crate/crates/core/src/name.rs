use std::fmt;
use std::sync::Arc;

/// An identifier with a freshness index.
///
/// Names written by the user carry index 0. Renaming during substitution
/// keeps the base and bumps the index, so `y` becomes `y_1`, `y_2`, ...
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Name {
    base: Arc<str>,
    index: u32,
}

impl Name {
    pub fn new(base: &str) -> Self {
        Name {
            base: Arc::from(base),
            index: 0,
        }
    }

    pub fn with_index(&self, index: u32) -> Self {
        Name {
            base: self.base.clone(),
            index,
        }
    }

    pub fn base(&self) -> &str {
        &self.base
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Smallest renaming of `self` (same base, index ≥ 1) rejected by `taken`.
    /// Returns `self` unchanged if it is not taken.
    pub fn fresh(&self, taken: impl Fn(&Name) -> bool) -> Name {
        if !taken(self) {
            return self.clone();
        }
        let mut i = self.index.max(1);
        loop {
            let candidate = self.with_index(i);
            if !taken(&candidate) {
                return candidate;
            }
            i += 1;
        }
    }

    pub fn starts_uppercase(&self) -> bool {
        self.base.chars().next().is_some_and(|c| c.is_uppercase())
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == 0 {
            f.write_str(&self.base)
        } else {
            write!(f, "{}_{}", self.base, self.index)
        }
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}
