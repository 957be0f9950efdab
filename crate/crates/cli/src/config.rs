//! Flat `key = value` configuration and flag resolution (CLI > file > default).

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct Config {
    file: BTreeMap<String, String>,
    path: Option<PathBuf>,
    effective: BTreeMap<String, String>,
}

impl Config {
    /// Lines are `key = value`; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Format(format!("config line {}: expected `key = value`", n + 1)))?;
            let k = k.trim().trim_start_matches("--").to_string();
            if file.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(CliError::Format(format!("config line {}: duplicate key `{k}`", n + 1)));
            }
        }
        Ok(Self {
            file,
            ..Self::default()
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("--config {}: {e}", path.display())))?;
        let mut c = Self::parse(&text)?;
        c.path = Some(path.to_path_buf());
        Ok(c)
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    fn from_file<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        match self.file.get(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("--{key}: invalid value `{s}` in config file: {e}"))),
        }
    }

    /// Value if given on the command line or in the file; recorded when present.
    pub fn opt<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        let v = match cli {
            Some(v) => Some(v),
            None => self.from_file(key)?,
        };
        if let Some(v) = &v {
            self.effective.insert(key.to_string(), v.to_string());
        }
        Ok(v)
    }

    pub fn get<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        let v = self.opt(key, cli)?.unwrap_or(default);
        self.effective.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    pub fn require<T: FromStr + Display>(&mut self, key: &str, cli: Option<T>) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        self.opt(key, cli)?
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{key}")))
    }

    /// Resolved settings of the command, keyed by flag name.
    pub fn effective(&self) -> &BTreeMap<String, String> {
        &self.effective
    }

    /// Drops a key from the effective set (runtime-only settings such as the thread cap).
    pub fn forget(&mut self, key: &str) {
        self.effective.remove(key);
    }
}

/// Comma-separated list of numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: Display,
{
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let v = s
            .split(',')
            .map(|x| x.trim().parse::<T>().map_err(|e| format!("`{x}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() {
            return Err("empty list".into());
        }
        Ok(Self(v))
    }
}

impl<T: Display> Display for List<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Either `start:stop:step` (inclusive) or a comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaSpec {
    text: String,
    pub values: Vec<f64>,
}

impl FromStr for AlphaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let values = match parts.as_slice() {
            [_] => List::<f64>::from_str(s)?.0,
            [a, b, h] => {
                let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}"));
                let (a, b, h) = (p(a)?, p(b)?, p(h)?);
                if !(h > 0.0) || !(b >= a) {
                    return Err("range needs start <= stop and step > 0".into());
                }
                let n = ((b - a) / h + 1e-9).floor() as usize;
                (0..=n).map(|k| a + k as f64 * h).collect()
            }
            _ => return Err("expected start:stop:step or a comma-separated list".into()),
        };
        Ok(Self {
            text: s.to_string(),
            values,
        })
    }
}

impl Display for AlphaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrialSpec {
    Gaussian,
    File(PathBuf),
}

impl FromStr for TrialSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(Self::File(PathBuf::from(p))),
                _ => Err(format!("expected `gaussian` or `file:PATH`, got `{s}`")),
            },
        }
    }
}

impl Display for TrialSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Gaussian => f.write_str("gaussian"),
            Self::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

/// Radial profile for the convolution pipeline: `gaussian`, `exp-power` or `annulus:R0,W`.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSpec {
    Gaussian,
    ExpPower,
    Annulus(f64, f64),
}

impl FromStr for ProfileSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "exp-power" => Ok(Self::ExpPower),
            _ => {
                let rest = s
                    .strip_prefix("annulus:")
                    .ok_or_else(|| format!("expected gaussian, exp-power or annulus:R0,W, got `{s}`"))?;
                match List::<f64>::from_str(rest)?.0.as_slice() {
                    [r0, w] => Ok(Self::Annulus(*r0, *w)),
                    _ => Err("annulus needs two numbers: R0,W".into()),
                }
            }
        }
    }
}

impl Display for ProfileSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Gaussian => f.write_str("gaussian"),
            Self::ExpPower => f.write_str("exp-power"),
            Self::Annulus(r, w) => write!(f, "annulus:{r},{w}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_cli_file_default() {
        let mut c = Config::parse("# comment\nalpha = 3\n--dim=2\n").unwrap();
        assert_eq!(c.get("alpha", Some(4.0), 2.0).unwrap(), 4.0);
        assert_eq!(c.get::<usize>("dim", None, 1).unwrap(), 2);
        assert_eq!(c.get::<usize>("times", None, 513).unwrap(), 513);
        assert_eq!(c.effective()["alpha"], "4");
        assert_eq!(c.effective()["times"], "513");
        let err = c.require::<f64>("sigma", None).unwrap_err();
        assert!(err.to_string().contains("--sigma"));
    }

    #[test]
    fn malformed_config() {
        assert!(matches!(Config::parse("alpha 3"), Err(CliError::Format(_))));
        assert!(matches!(Config::parse("a=1\na=2"), Err(CliError::Format(_))));
        let mut c = Config::parse("alpha = x").unwrap();
        assert!(matches!(c.get("alpha", None, 2.0), Err(CliError::Usage(_))));
    }

    #[test]
    fn alpha_ranges() {
        let a: AlphaSpec = "2.5:5:0.5".parse().unwrap();
        assert_eq!(a.values, vec![2.5, 3.0, 3.5, 4.0, 4.5, 5.0]);
        assert_eq!(a.to_string(), "2.5:5:0.5");
        let b: AlphaSpec = "2.5,3".parse().unwrap();
        assert_eq!(b.values, vec![2.5, 3.0]);
        assert!("3:2:0.5".parse::<AlphaSpec>().is_err());
    }

    #[test]
    fn specs_round_trip() {
        for s in ["gaussian", "file:a/b.tf"] {
            assert_eq!(s.parse::<TrialSpec>().unwrap().to_string(), s);
        }
        assert!("file:".parse::<TrialSpec>().is_err());
        for s in ["gaussian", "exp-power", "annulus:2,0.5"] {
            assert_eq!(s.parse::<ProfileSpec>().unwrap().to_string(), s);
        }
        assert_eq!("8,16".parse::<List<f64>>().unwrap().0, vec![8.0, 16.0]);
    }
}
