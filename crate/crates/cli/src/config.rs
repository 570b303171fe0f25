//! Flag/config-file merging.
//!
//! A config file holds `key = value` lines; `#` starts a comment. Keys are the
//! long flag names with `-` replaced by `_`. An explicit flag beats the file,
//! the file beats the built-in default. Every resolved value is recorded so
//! the run can be echoed as a config file that reproduces it.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    echo: Vec<(String, String)>,
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!("config line {}: expected key=value, got {raw:?}", i + 1)));
        };
        let key = k.trim().replace('-', "_");
        if map.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(map)
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self { file, echo: Vec::new() })
    }

    fn from_file<T: FromStr>(&mut self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.file.remove(key) {
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key}: cannot parse {s:?}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let file = self.from_file(key)?;
        let v = flag.or(file).unwrap_or(default);
        self.echo.push((key.into(), v.to_string()));
        Ok(v)
    }

    /// A value without a default; absent values are echoed as a comment.
    pub fn optional<T: FromStr + Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let file = self.from_file(key)?;
        let v = flag.or(file);
        if let Some(v) = &v {
            self.echo.push((key.into(), v.to_string()));
        }
        Ok(v)
    }

    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let file: Option<bool> = self.from_file(key)?;
        let v = flag || file.unwrap_or(false);
        self.echo.push((key.into(), v.to_string()));
        Ok(v)
    }

    /// `kappa` may appear only with the value 3.
    pub fn kappa(&mut self) -> Result<(), CliError> {
        let k: f64 = self.get("kappa", None, 3.0)?;
        if k != 3.0 {
            return Err(CliError::Usage(format!("kappa = {k} is not supported; only kappa = 3 (c = 1/2)")));
        }
        Ok(())
    }

    /// Rejects keys that no option of the subcommand consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        if let Some(k) = self.file.keys().next() {
            return Err(CliError::Usage(format!("unknown config key {k:?} for this subcommand")));
        }
        Ok(())
    }

    pub fn echo(&self, subcommand: &str) -> String {
        let mut s = format!("# isingff {subcommand}\n");
        for (k, v) in &self.echo {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

/// Comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| p.trim().parse::<T>().map_err(|e| format!("{p:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()
            .map(List)
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// A level given as an integer or half-integer, stored doubled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level(pub u32);

impl FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let x: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
        let t = 2.0 * x;
        if !(0.0..=200.0).contains(&t) || t.fract() != 0.0 {
            return Err(format!("level {s} must be a non-negative multiple of 1/2"));
        }
        Ok(Level(t as u32))
    }
}

impl Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 % 2 == 0 {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}.5", self.0 / 2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let m = parse_config("# header\npaths = 10 # trailing\n\nt-max=0.5\n").unwrap();
        assert_eq!(m.get("paths").unwrap(), "10");
        assert_eq!(m.get("t_max").unwrap(), "0.5");
        assert!(parse_config("nonsense").is_err());
        assert!(parse_config("a=1\na=2").is_err());
    }

    #[test]
    fn flags_beat_file() {
        let mut s = Settings { file: parse_config("paths=10\nseed=3").unwrap(), echo: vec![] };
        assert_eq!(s.get("paths", Some(20usize), 1).unwrap(), 20);
        assert_eq!(s.get("seed", None, 1u64).unwrap(), 3);
        assert_eq!(s.get("dt", None, 0.5).unwrap(), 0.5);
        s.finish().unwrap();
        assert_eq!(s.echo("x"), "# isingff x\npaths = 20\nseed = 3\ndt = 0.5\n");
    }

    #[test]
    fn lists_and_levels() {
        let l: List<f64> = "0, 1.5,-2".parse().unwrap();
        assert_eq!(l.0, vec![0.0, 1.5, -2.0]);
        assert_eq!(l.to_string(), "0,1.5,-2");
        assert_eq!("4.5".parse::<Level>().unwrap(), Level(9));
        assert_eq!(Level(9).to_string(), "4.5");
        assert!("4.2".parse::<Level>().is_err());
    }
}
