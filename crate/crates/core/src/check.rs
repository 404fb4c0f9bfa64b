use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// passes when `value <= limit`
    AtMost,
    /// passes when `value >= limit`
    AtLeast,
}

/// One named numerical check: a measured value compared against a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub params: BTreeMap<String, String>,
    pub value: f64,
    pub limit: f64,
    pub relation: Relation,
    pub passed: bool,
    /// Computed in exact rational arithmetic; `value` is then exactly 0 or not.
    pub exact: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, limit, Relation::AtMost)
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self::new(name, value, limit, Relation::AtLeast)
    }

    /// Exact check: passes iff the rational residual is zero.
    pub fn exact_zero(name: impl Into<String>, is_zero: bool, approx: f64) -> Self {
        let mut c = Self::new(name, approx, 0.0, Relation::AtMost);
        c.passed = is_zero;
        c.exact = true;
        c
    }

    fn new(name: impl Into<String>, value: f64, limit: f64, relation: Relation) -> Self {
        let passed = match relation {
            Relation::AtMost => value <= limit,
            Relation::AtLeast => value >= limit,
        };
        Check {
            name: name.into(),
            params: BTreeMap::new(),
            value,
            limit,
            relation,
            passed: passed && value.is_finite(),
            exact: false,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relation_and_nan() {
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_most("a", f64::NAN, 1.0).passed);
        assert!(Check::at_least("b", -1e-9, -1e-8).passed);
        assert!(!Check::exact_zero("c", false, 0.0).passed);
    }
}
