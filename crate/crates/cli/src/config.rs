//! Flat `key=value` configuration with defaults, file values and flag
//! overrides (flags win).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// One configuration key.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Key {
    pub name: &'static str,
    pub flag: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

const fn key(
    name: &'static str,
    flag: &'static str,
    default: &'static str,
    help: &'static str,
) -> Key {
    Key {
        name,
        flag,
        default,
        help,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommandSpec {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [Key],
}

/// Keys shared by every command. An empty `out` means `<command>.csv`.
pub const COMMON: &[Key] = &[
    key("seed", "seed", "0", "Master seed"),
    key(
        "out",
        "out",
        "",
        "Output CSV path; the manifest goes next to it",
    ),
    key("threads", "threads", "0", "Worker threads (0 = all cores)"),
];

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        name: "assoc",
        about: "Three-track association study: quantiles of eta, energy and accuracy per n",
        keys: &[
            key("n", "n", "300,600,1200", "Comma-separated dataset sizes"),
            key("trials", "trials", "50", "Trials per dataset size"),
            key("starts", "starts", "10", "Lloyd multistarts per trial"),
            key("lambda", "lambda", "1", "Spline regularization"),
            key("max_iter", "max-iter", "100", "Lloyd iteration cap"),
            key("t_max", "t-max", "10", "Observation horizon"),
            key("noise_variance", "noise-variance", "5", "Noise variance"),
            key(
                "noise_bound",
                "noise-bound",
                "100",
                "Noise truncation bound",
            ),
            key("eta_nodes", "eta-nodes", "2001", "Simpson nodes for eta"),
        ],
    },
    CommandSpec {
        name: "crossing",
        about: "Crossing-tracks study: mean energy gap and crossing rate per window",
        keys: &[
            key("n", "n", "220", "Observations over the full horizon"),
            key("trials", "trials", "200", "Trials per window"),
            key(
                "adaptive_target",
                "adaptive-target",
                "0",
                "If positive, size trials by a pre-run",
            ),
            key("adaptive_max", "adaptive-max", "2000", "Pre-run trial cap"),
            key("t_fit_min", "t-fit-min", "9.6", "First window end"),
            key("t_fit_max", "t-fit-max", "11", "Last window end"),
            key("t_fit_step", "t-fit-step", "0.1", "Window grid step"),
            key(
                "starts",
                "starts",
                "1",
                "Lloyd multistarts deciding the found hypothesis",
            ),
            key("lambda", "lambda", "1", "Spline regularization"),
            key("max_iter", "max-iter", "100", "Lloyd iteration cap"),
            key("t_max", "t-max", "11", "Generation horizon"),
            key("noise_variance", "noise-variance", "5", "Noise variance"),
            key(
                "noise_bound",
                "noise-bound",
                "inf",
                "Noise truncation bound",
            ),
        ],
    },
    CommandSpec {
        name: "fourier",
        about: "Periodic toy problem: closed-form and Monte Carlo expected penalty",
        keys: &[
            key("n", "n", "101,1001", "Comma-separated odd sample sizes"),
            key(
                "lambda",
                "lambda",
                "1",
                "Comma-separated regularization weights",
            ),
            key(
                "p",
                "p",
                "-1,-0.8,0,0.5",
                "Comma-separated scaling exponents",
            ),
            key("sigma2", "sigma2", "1", "Noise variance"),
            key("trials", "trials", "500", "Monte Carlo trials per cell"),
            key("signal", "signal", "zero", "True signal: zero or cosine"),
        ],
    },
    CommandSpec {
        name: "tracking",
        about: "Pulse tracking study: subsampled fits of two targets",
        keys: &[
            key("t_max", "t-max", "200", "Observation horizon"),
            key(
                "fractions",
                "fractions",
                "0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
                "Subsample fractions",
            ),
            key("trials", "trials", "20", "Trials per fraction"),
            key("starts", "starts", "5", "Lloyd multistarts"),
            key("fit_starts", "fit-starts", "5", "Track fit initializations"),
            key("max_iter", "max-iter", "100", "Lloyd iteration cap"),
            key("eta_nodes", "eta-nodes", "2001", "Simpson nodes for eta"),
            key("sigma", "sigma", "0.03", "Arrival-time noise sd"),
            key("nu", "nu", "0.05", "Log-amplitude noise sd"),
            key("c", "c", "100", "Signal speed"),
            key("tau", "tau", "1", "Frame period"),
            key("alpha", "alpha", "1e8", "Amplitude scale"),
            key("beta", "beta", "5", "Amplitude offset"),
        ],
    },
    CommandSpec {
        name: "spline-check",
        about: "Smoothing spline self-check against a dense solve and quadrature",
        keys: &[
            key("instances", "instances", "25", "Random instances"),
            key("max_points", "max-points", "12", "Largest instance size"),
            key(
                "lambda",
                "lambda",
                "0.001,1,1000",
                "Regularization weights, cycled",
            ),
            key(
                "perturbations",
                "perturbations",
                "100",
                "Random perturbations per instance",
            ),
        ],
    },
];

pub fn command_spec(name: &str) -> Option<&'static CommandSpec> {
    COMMANDS.iter().find(|c| c.name == name)
}

/// Where a resolved value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Origin {
    Default,
    File { line: usize },
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Default => write!(f, "default"),
            Origin::File { line } => write!(f, "config line {line}"),
            Origin::Flag => write!(f, "command line"),
        }
    }
}

/// A fully resolved configuration for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: &'static CommandSpec,
    values: Vec<(&'static str, String, Origin)>,
}

impl ExperimentConfig {
    /// Every key at its default.
    pub fn defaults(command: &'static CommandSpec) -> Self {
        let values = COMMON
            .iter()
            .chain(command.keys)
            .map(|k| (k.name, k.default.to_string(), Origin::Default))
            .collect();
        Self { command, values }
    }

    pub fn set(
        &mut self,
        key: &str,
        value: impl Into<String>,
        origin: Origin,
    ) -> Result<(), CliError> {
        let slot = self
            .values
            .iter_mut()
            .find(|(k, _, _)| *k == key)
            .ok_or_else(|| CliError::Config {
                origin: origin.clone(),
                key: key.to_string(),
                reason: format!("unknown key for command `{}`", self.command.name),
            })?;
        slot.1 = value.into();
        slot.2 = origin;
        Ok(())
    }

    /// Apply a `key=value` file. Blank lines and lines starting with `#`
    /// are skipped; `command` must name this command.
    pub fn apply_file_contents(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen: Vec<&str> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let origin = Origin::File { line: i + 1 };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(CliError::Config {
                    origin,
                    key: line.to_string(),
                    reason: "expected key=value".into(),
                });
            };
            let (k, v) = (k.trim(), v.trim());
            if seen.contains(&k) {
                return Err(CliError::Config {
                    origin,
                    key: k.to_string(),
                    reason: "duplicate key".into(),
                });
            }
            seen.push(k);
            if k == "command" {
                if v != self.command.name {
                    return Err(CliError::Config {
                        origin,
                        key: k.to_string(),
                        reason: format!("file is for `{v}`, not `{}`", self.command.name),
                    });
                }
                continue;
            }
            self.set(k, v, origin)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
            origin: Origin::Flag,
            key: "config".into(),
            reason: format!("cannot read `{}`: {e}", path.display()),
        })?;
        self.apply_file_contents(&text)
    }

    fn entry(&self, key: &str) -> &(&'static str, String, Origin) {
        self.values
            .iter()
            .find(|(k, _, _)| *k == key)
            .unwrap_or_else(|| panic!("`{key}` is not a key of `{}`", self.command.name))
    }

    pub fn raw(&self, key: &str) -> &str {
        &self.entry(key).1
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, CliError>
    where
        T::Err: fmt::Display,
    {
        let (k, v, origin) = self.entry(key);
        v.parse().map_err(|e: T::Err| CliError::Config {
            origin: origin.clone(),
            key: k.to_string(),
            reason: format!("cannot parse `{v}`: {e}"),
        })
    }

    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, CliError>
    where
        T::Err: fmt::Display,
    {
        let (k, v, origin) = self.entry(key);
        let items = v
            .split(',')
            .map(|s| {
                s.trim().parse().map_err(|e: T::Err| CliError::Config {
                    origin: origin.clone(),
                    key: k.to_string(),
                    reason: format!("cannot parse `{}`: {e}", s.trim()),
                })
            })
            .collect::<Result<Vec<T>, _>>()?;
        if items.is_empty() {
            return Err(CliError::Config {
                origin: origin.clone(),
                key: k.to_string(),
                reason: "empty list".into(),
            });
        }
        Ok(items)
    }

    /// A check on an already parsed value, reported against its origin.
    pub fn require(&self, key: &str, ok: bool, reason: &str) -> Result<(), CliError> {
        if ok {
            return Ok(());
        }
        let (k, _, origin) = self.entry(key);
        Err(CliError::Config {
            origin: origin.clone(),
            key: k.to_string(),
            reason: reason.into(),
        })
    }

    /// The output path, defaulting to `<command>.csv`.
    pub fn out_path(&self) -> String {
        match self.raw("out") {
            "" => format!("{}.csv", self.command.name),
            p => p.to_string(),
        }
    }

    /// The manifest text: a version comment, then every key resolved.
    pub fn manifest(&self) -> String {
        let mut s = format!(
            "# funkmeans {}\ncommand={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command.name
        );
        for (k, v, _) in &self.values {
            let v = if *k == "out" {
                self.out_path()
            } else {
                v.clone()
            };
            s.push_str(&format!("{k}={v}\n"));
        }
        s
    }
}
