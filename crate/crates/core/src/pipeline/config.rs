use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::cover::CoverStrategy;
use super::PipelineError;
use crate::model::{PatternF, PatternKind};

/// Reference degree thresholds for a pattern, as fractions of `C(n-d, k-d)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Thresholds {
    pub abs: Option<f64>,
    pub cov: Option<f64>,
    pub kd: Option<f64>,
}

impl Thresholds {
    /// Explicit values, else the classical single-graph thresholds.
    pub fn resolve(&self, pattern: &PatternF) -> (f64, f64) {
        let fallback = match pattern.kind() {
            PatternKind::SingleEdge(_) => 0.5,
            _ if pattern.is_partite() => 1.0 - 1.0 / pattern.k() as f64,
            _ => 1.0 - 1.0 / pattern.b() as f64,
        };
        (self.abs.unwrap_or(fallback), self.cov.unwrap_or(fallback))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub epsilon: f64,
    pub epsilon_prime: f64,
    pub gamma1: f64,
    pub phi: f64,
    /// Vertices are sampled at rate `n^-p_sample`.
    pub p_sample: f64,
    /// `n^rounds` sampling rounds.
    pub rounds: f64,
    /// `n^reserve` host vertices are held back for balancing.
    pub reserve: f64,
    pub retries: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
    /// Number of absorbing members; `None` derives it from `gamma1`.
    pub absorbers: Option<usize>,
    pub cover: CoverStrategy,
    pub cover_passes: usize,
    /// Edges sampled per block for the rounding LP.
    pub lp_edge_cap: usize,
    /// Multiplier on the allowed deviation in the sampling checks.
    pub slack: f64,
    pub spot_checks: usize,
    /// Re-partitions of the leftover tried before giving up on absorption.
    pub absorb_shuffles: usize,
    /// Node budget for the exact search.
    pub budget: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            epsilon: 0.08,
            epsilon_prime: 0.07,
            gamma1: 0.0003,
            phi: 1e-6,
            p_sample: 0.9,
            rounds: 1.1,
            reserve: 0.99,
            retries: 30,
            seed: 0,
            thresholds: Thresholds::default(),
            absorbers: None,
            cover: CoverStrategy::Greedy,
            cover_passes: 8,
            lp_edge_cap: 120,
            slack: 3.0,
            spot_checks: 20,
            absorb_shuffles: 20,
            budget: 20_000_000,
        }
    }
}

impl PipelineConfig {
    /// Checks `0 < phi < gamma1 eps' / 8`, `gamma1 < eps'^3`, `eps' < eps < 1`
    /// and the ranges of the sampling exponents.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::Config(msg));
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon = {} must lie in (0, 1)", self.epsilon));
        }
        if !(self.epsilon_prime > 0.0 && self.epsilon_prime < self.epsilon) {
            return bad(format!(
                "epsilon_prime = {} must lie in (0, epsilon)",
                self.epsilon_prime
            ));
        }
        if !(self.gamma1 > 0.0 && self.gamma1 < self.epsilon_prime.powi(3)) {
            return bad(format!("gamma1 = {} must lie in (0, epsilon_prime^3)", self.gamma1));
        }
        if !(self.phi > 0.0 && self.phi < self.gamma1 * self.epsilon_prime / 8.0) {
            return bad(format!("phi = {} must lie in (0, gamma1 epsilon_prime / 8)", self.phi));
        }
        if !(self.p_sample > 0.0 && self.p_sample <= 1.0) {
            return bad(format!("p_sample = {} must lie in (0, 1]", self.p_sample));
        }
        if !(self.rounds >= 0.0 && self.rounds <= 2.0) {
            return bad(format!("rounds = {} must lie in [0, 2]", self.rounds));
        }
        if !(self.reserve >= 0.0 && self.reserve <= 1.0) {
            return bad(format!("reserve = {} must lie in [0, 1]", self.reserve));
        }
        if self.slack.is_nan() || self.slack <= 0.0 {
            return bad(format!("slack = {} must be positive", self.slack));
        }
        for (name, v) in [
            ("c_abs", self.thresholds.abs),
            ("c_cov", self.thresholds.cov),
            ("c_kd", self.thresholds.kd),
        ] {
            if v.is_some_and(|x| !(0.0..=1.0).contains(&x)) {
                return bad(format!("{name} must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Number of absorbing members for `n` vertices. Below the scale where
    /// `gamma1 n >= 1` it falls back to about `n / 15`, capped so that a
    /// member plus one target fits.
    pub fn absorber_count(&self, n: usize, member_size: usize, target: usize) -> usize {
        if self.gamma1 == 0.0 {
            return 0;
        }
        let fit = n.saturating_sub(target) / member_size.max(1);
        let want = match self.absorbers {
            Some(a) => a,
            None if self.gamma1 * n as f64 >= 1.0 => (self.gamma1 * n as f64).floor() as usize,
            None => (n / 15).max(1),
        };
        want.min(fit)
    }

    /// Sets one `key = value` field.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T, PipelineError> {
            v.parse()
                .map_err(|_| PipelineError::Config(format!("bad value '{v}' for {key}")))
        }
        match key {
            "epsilon" | "eps" => self.epsilon = num(key, value)?,
            "epsilon_prime" | "eps_prime" => self.epsilon_prime = num(key, value)?,
            "gamma1" => self.gamma1 = num(key, value)?,
            "phi" => self.phi = num(key, value)?,
            "p_sample" => self.p_sample = num(key, value)?,
            "rounds" => self.rounds = num(key, value)?,
            "reserve" => self.reserve = num(key, value)?,
            "retries" => self.retries = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "c_abs" => self.thresholds.abs = Some(num(key, value)?),
            "c_cov" => self.thresholds.cov = Some(num(key, value)?),
            "c_kd" => self.thresholds.kd = Some(num(key, value)?),
            "absorbers" => self.absorbers = Some(num(key, value)?),
            "cover" => self.cover = num(key, value)?,
            "cover_passes" => self.cover_passes = num(key, value)?,
            "lp_edge_cap" => self.lp_edge_cap = num(key, value)?,
            "slack" => self.slack = num(key, value)?,
            "spot_checks" => self.spot_checks = num(key, value)?,
            "absorb_shuffles" => self.absorb_shuffles = num(key, value)?,
            "budget" => self.budget = num(key, value)?,
            _ => return Err(PipelineError::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines (`#` comments) on top of `self`.
    pub fn merge_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v.trim())
                .map_err(|e| PipelineError::Config(format!("line {}: {e}", i + 1)))?;
        }
        Ok(())
    }
}

impl FromStr for PipelineConfig {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cfg = PipelineConfig::default();
        cfg.merge_text(s)?;
        Ok(cfg)
    }
}

impl fmt::Display for PipelineConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "epsilon = {}", self.epsilon)?;
        writeln!(f, "epsilon_prime = {}", self.epsilon_prime)?;
        writeln!(f, "gamma1 = {}", self.gamma1)?;
        writeln!(f, "phi = {}", self.phi)?;
        writeln!(f, "p_sample = {}", self.p_sample)?;
        writeln!(f, "rounds = {}", self.rounds)?;
        writeln!(f, "reserve = {}", self.reserve)?;
        writeln!(f, "retries = {}", self.retries)?;
        writeln!(f, "seed = {}", self.seed)?;
        for (name, v) in [
            ("c_abs", self.thresholds.abs),
            ("c_cov", self.thresholds.cov),
            ("c_kd", self.thresholds.kd),
        ] {
            if let Some(v) = v {
                writeln!(f, "{name} = {v}")?;
            }
        }
        if let Some(a) = self.absorbers {
            writeln!(f, "absorbers = {a}")?;
        }
        writeln!(f, "cover = {}", self.cover)?;
        writeln!(f, "cover_passes = {}", self.cover_passes)?;
        writeln!(f, "lp_edge_cap = {}", self.lp_edge_cap)?;
        writeln!(f, "slack = {}", self.slack)?;
        writeln!(f, "spot_checks = {}", self.spot_checks)?;
        writeln!(f, "absorb_shuffles = {}", self.absorb_shuffles)?;
        writeln!(f, "budget = {}", self.budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        PipelineConfig::default().validate().unwrap();
    }

    #[test]
    fn ordering_is_enforced() {
        let cfg = PipelineConfig {
            epsilon_prime: 0.1,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            phi: 0.01,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = PipelineConfig {
            gamma1: 0.01,
            ..PipelineConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn text_round_trip() {
        let mut cfg = PipelineConfig {
            seed: 17,
            absorbers: Some(4),
            cover: CoverStrategy::Nibble,
            ..PipelineConfig::default()
        };
        cfg.thresholds.abs = Some(0.5);
        let back: PipelineConfig = cfg.to_string().parse().unwrap();
        assert_eq!(back, cfg);
        assert!("nonsense = 1".parse::<PipelineConfig>().is_err());
        assert!("seed 4".parse::<PipelineConfig>().is_err());
    }

    #[test]
    fn absorber_count_fits() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.absorber_count(12, 9, 3), 1);
        assert_eq!(cfg.absorber_count(30, 9, 3), 2);
        assert_eq!(cfg.absorber_count(60, 9, 3), 4);
        let none = PipelineConfig {
            gamma1: 0.0,
            ..PipelineConfig::default()
        };
        assert_eq!(none.absorber_count(60, 9, 3), 0);
    }
}
