//! Project files: which class to analyse, against which interfaces, with
//! which scheduler and which queries.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum StrategyName {
    Edf,
    Fps,
    Fcfs,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Abstraction {
    /// Integer variables to keep, with their domains.
    #[serde(default)]
    pub ranges: BTreeMap<String, [i64; 2]>,
    /// Variables to drop; conditions on them become `true`.
    #[serde(default)]
    pub drop: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scheduler {
    #[serde(default = "default_strategy")]
    pub strategy: StrategyName,
    /// Queue capacity; by default the timing bound, capped at `queue_cap`.
    pub max_queue: Option<usize>,
    pub queue_cap: Option<usize>,
    /// Fixed priorities per task name, smaller is more urgent (FPS only).
    #[serde(default)]
    pub priorities: BTreeMap<String, u32>,
}

fn default_strategy() -> StrategyName {
    StrategyName::Edf
}

impl Default for Scheduler {
    fn default() -> Scheduler {
        Scheduler {
            strategy: StrategyName::Edf,
            max_queue: None,
            queue_cap: None,
            priorities: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Deadlines {
    pub min: u32,
    pub max: u32,
    pub initial: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub text: String,
    /// Whether the query is expected to hold.
    #[serde(default = "yes")]
    pub expect: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectConfig {
    /// Creol source, relative to the project file.
    pub source: PathBuf,
    pub class: String,
    /// Interface automata files, relative to the project file.
    pub interfaces: Vec<PathBuf>,
    /// Object ids of `self` and the class parameters.
    pub objects: Option<Vec<i64>>,
    pub budget: Option<usize>,
    #[serde(default = "yes")]
    pub expect_schedulable: bool,
    #[serde(default)]
    pub abstraction: Abstraction,
    #[serde(default)]
    pub scheduler: Scheduler,
    pub deadlines: Option<Deadlines>,
    /// Overrides for `const int` declarations of the interface files.
    #[serde(default)]
    pub constants: BTreeMap<String, i64>,
    #[serde(default, rename = "query")]
    pub queries: Vec<QuerySpec>,
}

/// A project file together with the directory its paths are relative to.
#[derive(Debug, Clone)]
pub struct Project {
    pub config: ProjectConfig,
    pub dir: PathBuf,
}

pub fn read(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl Project {
    pub fn load(path: &Path) -> Result<Project, ConfigError> {
        let text = read(path)?;
        let config: ProjectConfig = toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let project = Project { config, dir };
        project.validate()?;
        Ok(project)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.dir.join(p)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        for p in std::iter::once(&c.source).chain(&c.interfaces) {
            let full = self.resolve(p);
            if !full.is_file() {
                return Err(ConfigError::Invalid(format!(
                    "file {} does not exist",
                    full.display()
                )));
            }
        }
        if c.interfaces.is_empty() {
            return Err(ConfigError::Invalid("no interface files given".into()));
        }
        if c.scheduler.strategy != StrategyName::Fps && !c.scheduler.priorities.is_empty() {
            return Err(ConfigError::Invalid(
                "priorities are only used with the fps strategy".into(),
            ));
        }
        for (name, [lo, hi]) in &c.abstraction.ranges {
            if lo > hi {
                return Err(ConfigError::Invalid(format!(
                    "empty range [{lo}, {hi}] for `{name}`"
                )));
            }
        }
        if c.scheduler.max_queue == Some(0) {
            return Err(ConfigError::Invalid("max_queue must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_project_gets_defaults() {
        let c: ProjectConfig = toml::from_str(
            r#"
            source = "a.creol"
            class = "A"
            interfaces = ["a.xta"]
            "#,
        )
        .unwrap();
        assert_eq!(c.scheduler.strategy, StrategyName::Edf);
        assert!(c.expect_schedulable);
        assert!(c.queries.is_empty());
    }

    #[test]
    fn full_project_parses() {
        let c: ProjectConfig = toml::from_str(
            r#"
            source = "a.creol"
            class = "A"
            interfaces = ["a.xta", "b.xta"]
            objects = [0, 3]
            budget = 1000
            expect_schedulable = false

            [abstraction]
            ranges = { n = [0, 3] }
            drop = ["m"]

            [scheduler]
            strategy = "fps"
            max_queue = 4
            priorities = { run = 2, m = 1 }

            [deadlines]
            min = 0
            max = 60
            initial = 60

            [constants]
            SPEED = 20

            [[query]]
            text = "reach line m1:26"

            [[query]]
            text = "reach Error"
            expect = false
            "#,
        )
        .unwrap();
        assert_eq!(c.scheduler.priorities["m"], 1);
        assert_eq!(c.abstraction.ranges["n"], [0, 3]);
        assert_eq!(c.queries.len(), 2);
        assert!(!c.queries[1].expect);
        assert_eq!(c.constants["SPEED"], 20);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<ProjectConfig, _> = toml::from_str(
            r#"
            source = "a.creol"
            class = "A"
            interfaces = ["a.xta"]
            strategy = "edf"
            "#,
        );
        assert!(r.is_err());
    }
}
