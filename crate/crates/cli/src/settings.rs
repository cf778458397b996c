//! Flat `key=value` settings merged from a config file, the environment
//! and command-line flags (flags win).

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use boem::harness::presets;

pub const KEYS: [&str; 18] = [
    "name",
    "model",
    "algo",
    "a",
    "c",
    "gamma-exp",
    "n",
    "seed",
    "runs",
    "threads",
    "out",
    "chi",
    "input",
    "checkpoints",
    "burn-in",
    "avg-start",
    "fix",
    "params",
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(boem::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "UsageError",
            CliError::Core(e) => e.code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<boem::Error> for CliError {
    fn from(e: boem::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Resolved settings. Every value is kept as text and parsed on access so
/// file entries and flags share one validation path.
#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse_file(text: &str, origin: &str) -> CliResult<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("{origin}:{}: expected key=value, got {line:?}", i + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(usage(format!("{origin}:{}: unknown key {key:?}", i + 1)));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("--config: cannot read {}: {e}", path.display())))?;
        Self::parse_file(&text, &path.display().to_string())
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.values.insert(key.to_string(), value.into());
    }

    pub fn set_default(&mut self, key: &str, value: impl Into<String>) {
        self.values.entry(key.to_string()).or_insert_with(|| value.into());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn require(&self, key: &str, why: &str) -> CliResult<&str> {
        self.raw(key).ok_or_else(|| usage(format!("--{key} is required {why}")))
    }

    pub fn parse<T: std::str::FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| usage(format!("--{key}: invalid value {v:?}: {e}"))))
            .transpose()
    }

    pub fn parse_or<T: std::str::FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn list(&self, key: &str) -> Option<Vec<String>> {
        self.raw(key).map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty() && *s != "none")
                .map(String::from)
                .collect()
        })
    }

    /// Checkpoints: `10,100,1000`, `log:LO:HI:COUNT` or `lin:COUNT`
    /// (evenly spaced up to `budget`).
    pub fn checkpoints(&self, budget: usize) -> CliResult<Option<Vec<usize>>> {
        let Some(spec) = self.raw("checkpoints") else { return Ok(None) };
        let bad = || usage(format!("--checkpoints: invalid spec {spec:?} (list, log:LO:HI:COUNT or lin:COUNT)"));
        let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        let parts: Vec<&str> = spec.split(':').collect();
        let ck = match parts.as_slice() {
            ["log", lo, hi, count] => {
                let (lo, hi, count) = (num(lo)?, num(hi)?, num(count)?);
                if lo < 1 || hi <= lo || count < 2 {
                    return Err(bad());
                }
                presets::log_checkpoints(lo, hi, count)
            }
            ["lin", count] => {
                let count = num(count)?;
                if count < 1 {
                    return Err(bad());
                }
                presets::linear_checkpoints(budget, count)
            }
            [list] => list.split(',').map(num).collect::<CliResult<_>>()?,
            _ => return Err(bad()),
        };
        if ck.windows(2).any(|w| w[0] >= w[1]) {
            return Err(usage("--checkpoints must be strictly ascending"));
        }
        if ck.last().is_some_and(|&k| k > budget) {
            return Err(usage(format!("--checkpoints: last checkpoint exceeds --n {budget}")));
        }
        Ok(Some(ck))
    }

    /// `key=value` lines for every resolved setting, sorted by key.
    pub fn to_lines(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_parsing() {
        let s = Settings::parse_file("# comment\n\nseed = 7\nmodel=lgssm\n", "f").unwrap();
        assert_eq!(s.raw("seed"), Some("7"));
        assert_eq!(s.parse::<u64>("seed").unwrap(), Some(7));
        assert!(matches!(Settings::parse_file("colour=blue\n", "f"), Err(CliError::Usage(m)) if m.contains("colour")));
        assert!(Settings::parse_file("seed\n", "f").is_err());
    }

    #[test]
    fn checkpoint_specs() {
        let mut s = Settings::default();
        s.set("checkpoints", "10,20,30");
        assert_eq!(s.checkpoints(100).unwrap(), Some(vec![10, 20, 30]));
        s.set("checkpoints", "lin:4");
        assert_eq!(s.checkpoints(100).unwrap(), Some(vec![25, 50, 75, 100]));
        s.set("checkpoints", "log:10:1000:3");
        assert_eq!(s.checkpoints(1000).unwrap(), Some(vec![10, 100, 1000]));
        s.set("checkpoints", "30,20");
        assert!(s.checkpoints(100).is_err());
        s.set("checkpoints", "10,200");
        assert!(s.checkpoints(100).is_err());
    }

    #[test]
    fn bad_numbers_name_the_flag() {
        let mut s = Settings::default();
        s.set("a", "abc");
        let err = s.parse::<f64>("a").unwrap_err();
        assert!(err.to_string().contains("--a"));
    }
}
