//! Training hyperparameters and the `key = value` config file format.
//!
//! Keys are `lim_unigram`, `hidden_size`, `train_keep_prob`, `l2_alpha`,
//! `learn_rate`, `clip_ratio`, `batch_size`, `epochs`, `seed` and
//! `dropout_logits`. Lines starting with `#` are comments.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lim_unigram: usize,
    pub hidden_size: usize,
    pub train_keep_prob: f64,
    pub l2_alpha: f64,
    pub learn_rate: f64,
    pub clip_ratio: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
    /// Apply dropout to the output logits as well as the hidden layer.
    pub dropout_logits: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lim_unigram: 5_000,
            hidden_size: 100,
            train_keep_prob: 0.6,
            l2_alpha: 0.0001,
            learn_rate: 0.01,
            clip_ratio: 5.0,
            batch_size: 500,
            epochs: 90,
            seed: 0,
            dropout_logits: true,
        }
    }
}

pub const KEYS: [&str; 10] = [
    "lim_unigram",
    "hidden_size",
    "train_keep_prob",
    "l2_alpha",
    "learn_rate",
    "clip_ratio",
    "batch_size",
    "epochs",
    "seed",
    "dropout_logits",
];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("invalid value `{value}` for `{key}`")))
}

impl TrainConfig {
    /// Sets one field by its key name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim() {
            "lim_unigram" => self.lim_unigram = parse(key, value)?,
            "hidden_size" => self.hidden_size = parse(key, value)?,
            "train_keep_prob" => self.train_keep_prob = parse(key, value)?,
            "l2_alpha" => self.l2_alpha = parse(key, value)?,
            "learn_rate" => self.learn_rate = parse(key, value)?,
            "clip_ratio" => self.clip_ratio = parse(key, value)?,
            "batch_size" => self.batch_size = parse(key, value)?,
            "epochs" => self.epochs = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "dropout_logits" => self.dropout_logits = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "lim_unigram" => self.lim_unigram.to_string(),
            "hidden_size" => self.hidden_size.to_string(),
            "train_keep_prob" => fmt_f64(self.train_keep_prob),
            "l2_alpha" => fmt_f64(self.l2_alpha),
            "learn_rate" => fmt_f64(self.learn_rate),
            "clip_ratio" => fmt_f64(self.clip_ratio),
            "batch_size" => self.batch_size.to_string(),
            "epochs" => self.epochs.to_string(),
            "seed" => self.seed.to_string(),
            "dropout_logits" => self.dropout_logits.to_string(),
            _ => return None,
        })
    }

    /// Applies `key = value` lines on top of `self`. Returns the keys seen.
    pub fn apply_text(&mut self, text: &str) -> Result<Vec<String>> {
        let mut seen = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(k, v)?;
            seen.push(k.trim().to_string());
        }
        Ok(seen)
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<Vec<String>> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.apply_text(&text)
    }

    /// Hard constraints; violating any is an error.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.epochs < 1 {
            return fail("epochs must be at least 1");
        }
        if self.batch_size < 1 {
            return fail("batch_size must be at least 1");
        }
        if self.lim_unigram < 1 {
            return fail("lim_unigram must be at least 1");
        }
        if self.hidden_size < 1 {
            return fail("hidden_size must be at least 1");
        }
        if !(self.train_keep_prob > 0.0 && self.train_keep_prob <= 1.0) {
            return fail("train_keep_prob must lie in (0, 1]");
        }
        if !(self.l2_alpha >= 0.0 && self.l2_alpha.is_finite()) {
            return fail("l2_alpha must be finite and non-negative");
        }
        if !(self.learn_rate > 0.0 && self.learn_rate.is_finite()) {
            return fail("learn_rate must be positive");
        }
        if !(self.clip_ratio > 0.0 && self.clip_ratio.is_finite()) {
            return fail("clip_ratio must be positive");
        }
        Ok(())
    }

    /// Values outside the tuning ranges considered for this system. These
    /// are warnings only.
    pub fn range_warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let mut check = |key: &str, v: f64, lo: f64, hi: f64| {
            if v < lo || v > hi {
                w.push(format!("{key} = {v} is outside the tuned range [{lo}, {hi}]"));
            }
        };
        check("lim_unigram", self.lim_unigram as f64, 1_000.0, 10_000.0);
        check("hidden_size", self.hidden_size as f64, 50.0, 600.0);
        check("train_keep_prob", self.train_keep_prob, 0.5, 1.0);
        check("l2_alpha", self.l2_alpha, 1e-7, 0.1);
        check("learn_rate", self.learn_rate, 0.001, 0.1);
        check("clip_ratio", self.clip_ratio, 1.0, 10.0);
        check("batch_size", self.batch_size as f64, 250.0, 1_000.0);
        check("epochs", self.epochs as f64, 1.0, 1_000.0);
        w
    }
}

/// Shortest representation that parses back to the same `f64`.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

impl fmt::Display for TrainConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in KEYS {
            writeln!(f, "{k} = {}", self.get(k).expect("known key"))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_the_optimised_values() {
        let c = TrainConfig::default();
        assert_eq!((c.lim_unigram, c.hidden_size, c.batch_size, c.epochs), (5_000, 100, 500, 90));
        assert_eq!((c.train_keep_prob, c.l2_alpha, c.learn_rate, c.clip_ratio), (0.6, 0.0001, 0.01, 5.0));
        assert!(c.validate().is_ok());
        assert!(c.range_warnings().is_empty());
    }

    #[test]
    fn display_round_trips_through_apply_text() {
        let c = TrainConfig { l2_alpha: 1e-7, seed: 42, dropout_logits: false, ..Default::default() };
        let mut back = TrainConfig::default();
        back.apply_text(&c.to_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = TrainConfig::default();
        assert!(c.apply_text("epochs = ten").is_err());
        assert!(c.apply_text("unknown = 1").is_err());
        assert!(c.apply_text("just words").is_err());
        c.epochs = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn out_of_range_is_a_warning() {
        let c = TrainConfig { hidden_size: 8, learn_rate: 0.5, ..Default::default() };
        assert!(c.validate().is_ok());
        assert_eq!(c.range_warnings().len(), 2);
    }
}
