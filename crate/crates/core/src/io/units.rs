//! Durations with unit suffixes: `s`, `d`, `mo` (30 d), `y` (365 d).

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const SECOND: f64 = 1.0;
pub const DAY: f64 = 86_400.0;
pub const MONTH: f64 = 30.0 * DAY;
pub const YEAR: f64 = 365.0 * DAY;

/// Parses `"1.5d"`, `"1mo"`, `"3600"` (bare numbers are seconds).
pub fn parse_duration(text: &str) -> Result<f64> {
    let t = text.trim();
    let num = t.trim_end_matches(|c: char| c.is_ascii_alphabetic());
    let unit = &t[num.len()..];
    let scale = match unit {
        "" | "s" => SECOND,
        "d" => DAY,
        "mo" => MONTH,
        "y" => YEAR,
        other => return Err(Error::config(format!("unknown time unit '{other}' in '{text}' (use s, d, mo or y)"))),
    };
    let value: f64 = num.trim().parse().map_err(|_| Error::config(format!("cannot read a duration from '{text}'")))?;
    let secs = value * scale;
    if !secs.is_finite() {
        return Err(Error::config(format!("duration '{text}' is not finite")));
    }
    Ok(secs)
}

/// Seconds, written back as `"<seconds>s"` with a round-trip exact mantissa.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Duration(pub f64);

impl Duration {
    pub fn seconds(self) -> f64 {
        self.0
    }
}

impl std::str::FromStr for Duration {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_duration(s).map(Duration)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

impl Serialize for Duration {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Duration {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Duration;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("seconds or a string such as \"1d\", \"1mo\", \"5y\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Duration, E> {
                Ok(Duration(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Duration, E> {
                Ok(Duration(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Duration, E> {
                Ok(Duration(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Duration, E> {
                parse_duration(v).map(Duration).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suffixes() {
        assert_eq!(parse_duration("1d").unwrap(), 86_400.0);
        assert_eq!(parse_duration("0.01d").unwrap(), 864.0);
        assert_eq!(parse_duration("1mo").unwrap(), 30.0 * 86_400.0);
        assert_eq!(parse_duration("5y").unwrap(), 5.0 * 365.0 * 86_400.0);
        assert_eq!(parse_duration(" 12 s").unwrap(), 12.0);
        assert_eq!(parse_duration("7").unwrap(), 7.0);
        assert_eq!(parse_duration("1e3s").unwrap(), 1000.0);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_duration("1w").is_err());
        assert!(parse_duration("d").is_err());
        assert!(parse_duration("").is_err());
    }

    #[test]
    fn display_round_trips() {
        for v in [864.0, 0.1 * 86_400.0, 1.0 / 3.0, 9.46728e8] {
            let d = Duration(v);
            assert_eq!(d.to_string().parse::<Duration>().unwrap(), d);
        }
    }
}
