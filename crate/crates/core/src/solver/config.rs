use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`: {message}")]
    BadValue {
        key: String,
        value: String,
        message: String,
    },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Profile {
    /// the working limits of the original experiments
    Paper,
    /// scaled down for quick runs
    Desk,
}

impl std::str::FromStr for Profile {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "paper" => Ok(Profile::Paper),
            "desk" => Ok(Profile::Desk),
            other => Err(ConfigError::BadValue {
                key: "profile".into(),
                value: other.into(),
                message: "expected `paper` or `desk`".into(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    /// one verification call during enumeration
    pub enumeration_call_limit: Duration,
    /// after this, enumeration runs only the cheap checks
    pub enumeration_budget: Duration,
    /// one escalated verification call inside the column generation loop
    pub verification_call_limit: Duration,
    pub verification_budget: Duration,
    /// one exact pricing call
    pub pricing_limit: Duration,
    pub total_time_limit: Duration,
    pub ip_node_limit: u64,
    /// node limit of one geometric branch-and-bound
    pub geometry_node_limit: u64,
    pub tolerance: f64,
    pub deterministic: bool,
    pub threads: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self::paper()
    }
}

impl SolveConfig {
    pub fn paper() -> Self {
        Self {
            enumeration_call_limit: Duration::from_secs(10),
            enumeration_budget: Duration::from_secs(1200),
            verification_call_limit: Duration::from_secs(120),
            verification_budget: Duration::from_secs(2400),
            pricing_limit: Duration::from_secs(300),
            total_time_limit: Duration::from_secs(7200),
            ip_node_limit: 100_000,
            geometry_node_limit: 5_000_000,
            tolerance: crate::model::DEFAULT_TOLERANCE,
            deterministic: true,
            threads: 1,
        }
    }

    pub fn desk() -> Self {
        Self {
            enumeration_call_limit: Duration::from_secs(1),
            enumeration_budget: Duration::from_secs(60),
            verification_call_limit: Duration::from_secs(5),
            verification_budget: Duration::from_secs(120),
            pricing_limit: Duration::from_secs(30),
            total_time_limit: Duration::from_secs(600),
            ip_node_limit: 20_000,
            geometry_node_limit: 1_000_000,
            ..Self::paper()
        }
    }

    pub fn from_profile(profile: Profile) -> Self {
        match profile {
            Profile::Paper => Self::paper(),
            Profile::Desk => Self::desk(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |key: &str, value: String, message: &str| ConfigError::BadValue {
            key: key.into(),
            value,
            message: message.into(),
        };
        if self.total_time_limit.is_zero() {
            return Err(bad("total_time_limit", "0".into(), "must be positive"));
        }
        if self.ip_node_limit == 0 {
            return Err(bad("ip_node_limit", "0".into(), "must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1e-3) {
            return Err(bad("tolerance", self.tolerance.to_string(), "must lie in (0, 1e-3)"));
        }
        if self.threads == 0 {
            return Err(bad("threads", "0".into(), "must be at least 1"));
        }
        Ok(())
    }

    /// Sets one field from its textual form. Time limits are in seconds.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |message: &str| ConfigError::BadValue {
            key: key.into(),
            value: value.into(),
            message: message.into(),
        };
        let secs = || -> Result<Duration, ConfigError> {
            let v: f64 = value.parse().map_err(|_| bad("expected seconds"))?;
            Duration::try_from_secs_f64(v).map_err(|_| bad("expected nonnegative seconds"))
        };
        match key {
            "enumeration_call_limit" => self.enumeration_call_limit = secs()?,
            "enumeration_budget" => self.enumeration_budget = secs()?,
            "verification_call_limit" => self.verification_call_limit = secs()?,
            "verification_budget" => self.verification_budget = secs()?,
            "pricing_limit" => self.pricing_limit = secs()?,
            "total_time_limit" => self.total_time_limit = secs()?,
            "ip_node_limit" => self.ip_node_limit = value.parse().map_err(|_| bad("expected an integer"))?,
            "geometry_node_limit" => {
                self.geometry_node_limit = value.parse().map_err(|_| bad("expected an integer"))?
            }
            "tolerance" => self.tolerance = value.parse().map_err(|_| bad("expected a number"))?,
            "deterministic" => {
                self.deterministic = value.parse().map_err(|_| bad("expected true or false"))?
            }
            "threads" => self.threads = value.parse().map_err(|_| bad("expected an integer"))?,
            "profile" => {
                let p: Profile = value.parse()?;
                *self = Self {
                    deterministic: self.deterministic,
                    threads: self.threads,
                    ..Self::from_profile(p)
                };
            }
            other => return Err(ConfigError::UnknownKey(other.into())),
        }
        Ok(())
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), ConfigError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_carry_working_limits() {
        let p = SolveConfig::paper();
        assert_eq!(p.enumeration_call_limit, Duration::from_secs(10));
        assert_eq!(p.enumeration_budget, Duration::from_secs(1200));
        assert_eq!(p.verification_call_limit, Duration::from_secs(120));
        assert_eq!(p.verification_budget, Duration::from_secs(2400));
        assert_eq!(p.pricing_limit, Duration::from_secs(300));
        let d = SolveConfig::desk();
        assert_eq!(
            [
                d.enumeration_call_limit,
                d.enumeration_budget,
                d.verification_call_limit,
                d.verification_budget,
                d.pricing_limit
            ],
            [1, 60, 5, 120, 30].map(Duration::from_secs)
        );
        assert!(p.deterministic && d.deterministic);
    }

    #[test]
    fn key_value_file() {
        let mut c = SolveConfig::paper();
        c.apply_file("# limits\npricing_limit = 2.5\nip_node_limit=7\n\ndeterministic = false\n")
            .unwrap();
        assert_eq!(c.pricing_limit, Duration::from_millis(2500));
        assert_eq!(c.ip_node_limit, 7);
        assert!(!c.deterministic);
        assert!(matches!(c.apply_file("nope = 1"), Err(ConfigError::UnknownKey(_))));
        assert!(matches!(c.apply_file("pricing_limit"), Err(ConfigError::Syntax { line: 1 })));
        assert!(c.set("pricing_limit", "-1").is_err());
    }

    #[test]
    fn validation() {
        assert!(SolveConfig::desk().validate().is_ok());
        let mut c = SolveConfig::desk();
        c.ip_node_limit = 0;
        assert!(c.validate().is_err());
    }
}
