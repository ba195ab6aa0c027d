//! Flat `key = value` run configuration.
//!
//! ```text
//! # comment
//! lattice.beta = 2.3
//! [run]
//! n_sweeps = 100      # keys below a [section] header get the `run.` prefix
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::lattice::Dims;

/// Where a value came from, for diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Entry {
    value: String,
    origin: Origin,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, Entry>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Config(format!("line {lineno}: unterminated section header")))?
                    .trim();
                if !valid_key(name) {
                    return Err(Error::Config(format!("line {lineno}: bad section name '{name}'")));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {lineno}: expected key = value, got '{line}'")))?;
            let k = k.trim();
            if !valid_key(k) {
                return Err(Error::Config(format!("line {lineno}: bad key '{k}'")));
            }
            let key = if section.is_empty() { k.to_string() } else { format!("{section}.{k}") };
            let entry = Entry { value: v.trim().to_string(), origin: Origin::Line(lineno) };
            if let Some(prev) = entries.insert(key.clone(), entry) {
                if let Origin::Line(p) = prev.origin {
                    return Err(Error::Config(format!("line {lineno}: key '{key}' already set on line {p}")));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Overrides or adds a value, as a command-line flag does.
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), Entry { value: value.to_string(), origin: Origin::Flag });
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Rejects keys outside `known`, naming the line of the first offender.
    pub fn check_known(&self, known: &[&str]) -> Result<()> {
        for (k, e) in &self.entries {
            if !known.contains(&k.as_str()) {
                return Err(Error::Config(format!("{}unknown key '{k}'", where_(&e.origin))));
            }
        }
        Ok(())
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e.value.parse::<T>().map(Some).map_err(|_| {
                Error::Config(format!("{}cannot parse value '{}' for key '{key}'", where_(&e.origin), e.value))
            }),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.get(key)?.ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    /// Comma-separated list of values.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(',')
                .map(|s| {
                    s.trim().parse::<T>().map_err(|_| {
                        Error::Config(format!("{}cannot parse '{}' in list for key '{key}'", where_(&e.origin), s.trim()))
                    })
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Lattice extents as `L` (hypercubic), `Lx,Ly,Lz,Lt` or `LxxLyxLzxLt`.
    pub fn get_dims(&self, key: &str) -> Result<Option<Dims>> {
        let Some(e) = self.entries.get(key) else { return Ok(None) };
        let bad = || Error::Config(format!("{}bad lattice dims '{}' for key '{key}'", where_(&e.origin), e.value));
        let parts: Vec<usize> = e
            .value
            .split([',', 'x'])
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad()))
            .collect::<Result<_>>()?;
        match parts.as_slice() {
            [l] => Ok(Some([*l; 4])),
            [a, b, c, d] => Ok(Some([*a, *b, *c, *d])),
            _ => Err(bad()),
        }
    }

    /// Every key with its current value, for the run manifest.
    pub fn snapshot(&self) -> BTreeMap<String, String> {
        self.entries.iter().map(|(k, e)| (k.clone(), e.value.clone())).collect()
    }
}

fn where_(o: &Origin) -> String {
    match o {
        Origin::Line(n) => format!("line {n}: "),
        Origin::Flag => "command line: ".to_string(),
    }
}

fn valid_key(k: &str) -> bool {
    !k.is_empty()
        && k.split('.').all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let c = Config::parse("# top\nlattice.beta = 2.3  # inline\n\n[run]\nn_sweeps=10\nlattice.dims = 4\n").unwrap();
        assert_eq!(c.get::<f64>("lattice.beta").unwrap(), Some(2.3));
        assert_eq!(c.require::<usize>("run.n_sweeps").unwrap(), 10);
        assert_eq!(c.get_dims("run.lattice.dims").unwrap(), Some([4; 4]));
        assert!(c.get::<f64>("beta").unwrap().is_none());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let e = Config::parse("a = 1\nnot a pair\n").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = Config::parse("a = 1\na = 2\n").unwrap_err();
        assert!(e.to_string().contains("line 2") && e.to_string().contains("line 1"));
        let c = Config::parse("x = 1\n\ny = abc\n").unwrap();
        let e = c.get::<f64>("y").unwrap_err();
        assert!(e.to_string().contains("line 3"), "{e}");
        let e = c.check_known(&["x"]).unwrap_err();
        assert!(e.to_string().contains("'y'"));
        assert!(Config::parse("[open\n").is_err());
        assert!(Config::parse("bad key = 1\n").is_err());
    }

    #[test]
    fn missing_key_is_named() {
        let c = Config::parse("lattice.dims = 4\n").unwrap();
        let e = c.require::<f64>("lattice.beta").unwrap_err();
        assert!(matches!(e, Error::Config(_)));
        assert!(e.to_string().contains("lattice.beta"));
    }

    #[test]
    fn flags_override() {
        let mut c = Config::parse("lattice.beta = 2.0\n").unwrap();
        c.set("lattice.beta", 2.5);
        assert_eq!(c.require::<f64>("lattice.beta").unwrap(), 2.5);
        c.set("g", "1,2, 3");
        assert_eq!(c.get_list::<f64>("g").unwrap(), Some(vec![1.0, 2.0, 3.0]));
        c.set("d", "8x8x8x16");
        assert_eq!(c.get_dims("d").unwrap(), Some([8, 8, 8, 16]));
        c.set("d", "8,8");
        assert!(c.get_dims("d").is_err());
    }

    proptest::proptest! {
        #[test]
        fn rendered_entries_parse_back(
            entries in proptest::collection::btree_map("[a-z][a-z0-9_]{0,6}\\.[a-z][a-z0-9_]{0,6}", "[A-Za-z0-9.,+-][A-Za-z0-9.,+ -]{0,10}[A-Za-z0-9.,+-]", 0..8),
        ) {
            let text: String = entries.iter().map(|(k, v)| format!("{k} = {v}  # note\n")).collect();
            let c = Config::parse(&text).unwrap();
            proptest::prop_assert_eq!(c.snapshot(), entries);
        }
    }
}
