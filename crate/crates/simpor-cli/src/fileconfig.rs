//! key=value settings files with flag override.
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! skipped. Command-line flags take precedence over file values, which take
//! precedence over built-in defaults. Unknown keys are an error so typos
//! don't silently fall back to defaults.

use std::cell::RefCell;
use std::collections::{HashMap, HashSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use simpor::{Error, Result};

pub struct FileConfig {
    values: HashMap<String, String>,
    origin: String,
    used: RefCell<HashSet<String>>,
}

impl FileConfig {
    pub fn empty() -> FileConfig {
        FileConfig {
            values: HashMap::new(),
            origin: String::new(),
            used: RefCell::new(HashSet::new()),
        }
    }

    /// Load `path` if given, otherwise an empty config.
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let Some(path) = path else {
            return Ok(FileConfig::empty());
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        let mut values = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                )));
            };
            let key = key.trim().to_string();
            if values.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::config(format!(
                    "{}:{}: duplicate key '{key}'",
                    path.display(),
                    lineno + 1
                )));
            }
        }
        Ok(FileConfig {
            values,
            origin: path.display().to_string(),
            used: RefCell::new(HashSet::new()),
        })
    }

    /// Parsed value for `key`, or `None` when absent. Marks the key as
    /// recognized for [`FileConfig::finish`].
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.used.borrow_mut().insert(key.to_string());
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|e| {
                Error::config(format!("config key '{key}': invalid value '{raw}': {e}"))
            }),
        }
    }

    /// Error out if the file contained keys no command option ever read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let mut unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !used.contains(*k))
            .map(String::as_str)
            .collect();
        if unknown.is_empty() {
            return Ok(());
        }
        unknown.sort_unstable();
        Err(Error::config(format!(
            "config file {}: unknown key(s): {}",
            self.origin,
            unknown.join(", ")
        )))
    }
}

/// Flag value, else config-file value, else default.
pub fn resolve<T: FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str, default: T) -> Result<T>
where
    T::Err: Display,
{
    let from_file = cfg.get(key)?;
    Ok(flag.or(from_file).unwrap_or(default))
}

/// Flag value, else config-file value, else nothing.
pub fn resolve_opt<T: FromStr>(flag: Option<T>, cfg: &FileConfig, key: &str) -> Result<Option<T>>
where
    T::Err: Display,
{
    let from_file = cfg.get(key)?;
    Ok(flag.or(from_file))
}
