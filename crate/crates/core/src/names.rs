use std::collections::BTreeSet;

use crate::formula::Formula;

/// Fresh-identifier supply for one elimination request.
///
/// Fresh names are the base name with a numeric suffix (`x`, `x_1`, `x_2`,
/// ...), skipping any name already in use.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<String>,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    pub fn from_formulas<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> NameSupply {
        let mut supply = NameSupply::new();
        for f in formulas {
            supply.reserve_formula(f);
        }
        supply
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn reserve_formula(&mut self, f: &Formula) {
        self.used.extend(f.names());
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    pub fn fresh(&mut self, base: &str) -> String {
        let stem = strip_suffix(base);
        let mut k = 1usize;
        loop {
            let candidate = format!("{stem}_{k}");
            if !self.used.contains(&candidate) {
                self.used.insert(candidate.clone());
                return candidate;
            }
            k += 1;
        }
    }
}

fn strip_suffix(name: &str) -> &str {
    match name.rsplit_once('_') {
        Some((stem, digits))
            if !stem.is_empty() && !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) =>
        {
            stem
        }
        _ => name,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_skip_used_ones() {
        let mut s = NameSupply::new();
        s.reserve("x");
        s.reserve("x_1");
        assert_eq!(s.fresh("x"), "x_2");
        assert_eq!(s.fresh("x_2"), "x_3");
        assert_eq!(s.fresh("y"), "y_1");
    }
}
