use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::expr::ParseError;

use super::CliError;

pub const DEFAULT_ORDER: u32 = 24;
pub const DEFAULT_HORIZON: u32 = 24;
pub const DEFAULT_NMAX: u32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    CheckStrong,
    Nf,
    InvertSeries,
    R0Routes,
    HalfTorus,
    Fredholm,
    Findom,
    VerifyCert,
    LeavittExample,
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

fn default_order() -> u32 {
    DEFAULT_ORDER
}

fn default_horizon() -> u32 {
    DEFAULT_HORIZON
}

fn default_nmax() -> u32 {
    DEFAULT_NMAX
}

/// One invocation: a task, its payload and options.  Relative paths are
/// resolved against the directory of the job file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobDescription {
    pub task: Task,
    #[serde(default)]
    pub ring: Option<String>,
    #[serde(default)]
    pub expr: Option<String>,
    #[serde(default)]
    pub matrix: Option<String>,
    /// Complex in the complex-file format, inline.
    #[serde(default)]
    pub complex: Option<String>,
    #[serde(default)]
    pub complex_file: Option<PathBuf>,
    #[serde(default = "default_order")]
    pub order: u32,
    #[serde(default = "default_horizon")]
    pub horizon: u32,
    #[serde(default = "default_nmax")]
    pub nmax: u32,
    /// Certificate to write, or for `verify-cert` the one to read.
    #[serde(default)]
    pub cert: Option<PathBuf>,
    /// `nonneg` or `conegative` for `invert-series`.
    #[serde(default)]
    pub mode: Option<String>,
}

impl JobDescription {
    pub fn new(task: Task) -> Self {
        JobDescription {
            task,
            ring: None,
            expr: None,
            matrix: None,
            complex: None,
            complex_file: None,
            order: DEFAULT_ORDER,
            horizon: DEFAULT_HORIZON,
            nmax: DEFAULT_NMAX,
            cert: None,
            mode: None,
        }
    }

    pub fn from_toml(src: &str) -> Result<Self, CliError> {
        let job: JobDescription = toml::from_str(src).map_err(|e| {
            let (line, col) = e.span().map_or((1, 1), |s| line_col(src, s.start));
            CliError::Parse(ParseError { line, col, message: e.message().to_string() })
        })?;
        job.validate()?;
        Ok(job)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (name, v) in [("order", self.order), ("horizon", self.horizon), ("nmax", self.nmax)] {
            if v == 0 {
                return Err(CliError::Option(format!("{name} must be positive")));
            }
        }
        if self.complex.is_some() && self.complex_file.is_some() {
            return Err(CliError::Option("give either complex or complex_file, not both".into()));
        }
        if let Some(m) = &self.mode {
            if m != "nonneg" && m != "conegative" {
                return Err(CliError::Option(format!("mode must be nonneg or conegative, got `{m}`")));
            }
        }
        Ok(())
    }
}

fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_jobs() {
        let j = JobDescription::from_toml("task = \"fredholm\"\nring = \"laurent\"\nmatrix = \"[[t]]\"\n").unwrap();
        assert_eq!(j.task, Task::Fredholm);
        assert_eq!(j.order, 24);
        assert_eq!(Task::R0Routes.to_string(), "r0-routes");
        let err = JobDescription::from_toml("task = \"fredholm\"\nhorizon = 0\n").unwrap_err();
        assert_eq!(err, CliError::Option("horizon must be positive".into()));
        match JobDescription::from_toml("task = \"fredholm\"\nbogus = 1\n").unwrap_err() {
            CliError::Parse(p) => assert_eq!(p.line, 2),
            e => panic!("{e:?}"),
        }
    }
}
