//! Flat key=value run configuration (UTF-8, `#` comments).
//!
//! Unknown keys are rejected so a config file always means what it says;
//! the canonical serialization (sorted keys) is written next to every
//! command's outputs for reproducibility.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mwt_core::pdedata::{Equation, GenConfig, InputRule};
use mwt_core::{Activation, BasisKind, ConvSpec, Error, ModelConfig, Result, TrainConfig};

const KNOWN_KEYS: &[&str] = &[
    "equation",
    "basis",
    "k",
    "layers",
    "coarsest",
    "n_train",
    "n_test",
    "resolution",
    "epochs",
    "lr",
    "gamma",
    "step",
    "seed",
    "batch_size",
    "conv",
    "width",
    "modes",
    "activation",
    "data_path",
    "out_dir",
    "nu",
    "omega",
    "t_end",
    "solver_factor",
    "input_rule",
    "lambda",
    "sqexp_l",
    "sqexp_p",
    "darcy_high",
    "darcy_low",
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Format(format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(Error::Format(format!(
                    "line {}: unknown key `{key}`",
                    lineno + 1
                )));
            }
            values.insert(key.to_string(), value.to_string());
        }
        Ok(RunConfig { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::parse(&text)?;
        // resolve relative paths against the config file location
        if let Some(dir) = path.parent() {
            for key in ["data_path", "out_dir"] {
                if let Some(v) = cfg.values.get(key) {
                    let p = PathBuf::from(v);
                    if p.is_relative() {
                        cfg.values
                            .insert(key.into(), dir.join(p).to_string_lossy().into_owned());
                    }
                }
            }
        }
        Ok(cfg)
    }

    /// canonical serialization: sorted key=value lines
    pub fn canonical(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(k);
            out.push('=');
            out.push_str(v);
            out.push('\n');
        }
        out
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|s| s.as_str())
    }

    fn parse_num<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| Error::Format(format!("key `{key}`: bad value `{v}`"))),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        // MWT_SEED overrides the config for scripted sweeps
        if let Ok(env) = std::env::var("MWT_SEED") {
            return env
                .parse()
                .map_err(|_| Error::Format(format!("MWT_SEED: bad value `{env}`")));
        }
        self.parse_num("seed", 0u64)
    }

    pub fn equation(&self) -> Result<Equation> {
        Equation::parse(self.get("equation").unwrap_or("burgers"))
    }

    pub fn basis(&self) -> Result<BasisKind> {
        BasisKind::parse(self.get("basis").unwrap_or("legendre"))
    }

    pub fn k(&self) -> Result<usize> {
        self.parse_num("k", 4)
    }

    pub fn n_train(&self) -> Result<usize> {
        self.parse_num("n_train", 1000)
    }

    pub fn n_test(&self) -> Result<usize> {
        self.parse_num("n_test", 200)
    }

    pub fn resolution(&self) -> Result<usize> {
        self.parse_num("resolution", 256)
    }

    pub fn data_path(&self) -> Option<PathBuf> {
        self.get("data_path").map(PathBuf::from)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.get("out_dir").map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn model_config(&self, two_d: bool) -> Result<ModelConfig> {
        let conv = match self.get("conv").unwrap_or("conv") {
            "conv" => ConvSpec::Conv {
                width: self.parse_num("width", 3)?,
            },
            "spectral" => ConvSpec::Spectral {
                modes: self.parse_num("modes", 8)?,
            },
            other => {
                return Err(Error::Format(format!(
                    "key `conv`: expected conv|spectral, got `{other}`"
                )))
            }
        };
        let activation = match self.get("activation").unwrap_or("relu") {
            "relu" => Activation::Relu,
            "none" => Activation::None,
            other => {
                return Err(Error::Format(format!(
                    "key `activation`: expected relu|none, got `{other}`"
                )))
            }
        };
        let default_layers = if two_d { 4 } else { 2 };
        Ok(ModelConfig {
            kind: self.basis()?,
            k: self.k()?,
            layers: self.parse_num("layers", default_layers)?,
            coarsest: self.parse_num("coarsest", 0)?,
            conv,
            activation,
            two_d,
        })
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        Ok(TrainConfig {
            epochs: self.parse_num("epochs", 500)?,
            batch_size: self.parse_num("batch_size", 20)?,
            lr: self.parse_num("lr", 1e-3)?,
            gamma: self.parse_num("gamma", 0.5)?,
            step: self.parse_num("step", 100)?,
            seed: self.seed()?,
        })
    }

    pub fn gen_config(&self) -> Result<GenConfig> {
        let input_rule = match self.get("input_rule").unwrap_or("grf") {
            "grf" => InputRule::Grf,
            "sqexp" => InputRule::SqExp {
                smoothing: self.parse_num("sqexp_l", 0.5)?,
                period: self.parse_num("sqexp_p", 1.0)?,
            },
            "smooth" => InputRule::Smooth {
                lambda: self.parse_num("lambda", 0.5)?,
            },
            other => {
                return Err(Error::Format(format!(
                    "key `input_rule`: expected grf|sqexp|smooth, got `{other}`"
                )))
            }
        };
        Ok(GenConfig {
            equation: self.equation()?,
            n_samples: self.n_train()? + self.n_test()?,
            resolution: self.resolution()?,
            seed: self.seed()?,
            input_rule,
            nu: self.parse_num("nu", 0.1)?,
            omega: self.parse_num("omega", 215.0)?,
            t_end: self.parse_num("t_end", 1.0)?,
            solver_factor: self.parse_num("solver_factor", 4)?,
            darcy_high: self.parse_num("darcy_high", 12.0)?,
            darcy_low: self.parse_num("darcy_low", 3.0)?,
        })
    }
}
