//! Simulation scenarios: system configuration (including the flat key-value
//! config file format), Rayleigh channel draws, and the two primary-link
//! transmit designs.

use crate::numerics::{self, CMat, C64};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("config line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("config line {line}: cannot parse value for `{key}`: {value}")]
    BadValue {
        line: usize,
        key: String,
        value: String,
    },
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
}

/// Full parameter set of one simulated system.
///
/// Antenna counts: `m_t` at the cognitive transmitter, `m_r` at the cognitive
/// receiver, `m_1`/`m_2` at the two primary terminals. `d_j` primary data
/// streams flow in each direction, each direction active with probability
/// `alpha_j` per slot. Powers and noise levels are linear; `t_block` and
/// `tau_min` are in symbol periods.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub m_t: usize,
    pub m_r: usize,
    pub m_1: usize,
    pub m_2: usize,
    pub d_1: usize,
    pub d_2: usize,
    pub alpha_1: f64,
    pub alpha_2: f64,
    pub p_1: f64,
    pub p_2: f64,
    pub p_cr: f64,
    pub rho_0: f64,
    pub rho_1: f64,
    pub t_block: f64,
    pub tau_min: f64,
}

const CONFIG_KEYS: [&str; 15] = [
    "m_t", "m_r", "m_1", "m_2", "d_1", "d_2", "alpha_1", "alpha_2", "p_1", "p_2", "p_cr",
    "rho_0", "rho_1", "t_block", "tau_min",
];

impl SystemConfig {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let fail = |msg: String| Err(ScenarioError::InvalidConfig(msg));
        if self.m_t <= 1 {
            return fail(format!("m_t must exceed 1, got {}", self.m_t));
        }
        if self.m_r < 1 {
            return fail("m_r must be at least 1".into());
        }
        for (name, m, d) in [("1", self.m_1, self.d_1), ("2", self.m_2, self.d_2)] {
            if m < 1 {
                return fail(format!("m_{name} must be at least 1"));
            }
            if d < 1 || d > m {
                return fail(format!("d_{name} must lie in 1..=m_{name}, got {d}"));
            }
        }
        for (name, a) in [("alpha_1", self.alpha_1), ("alpha_2", self.alpha_2)] {
            if !(0.0..=1.0).contains(&a) {
                return fail(format!("{name} must lie in [0, 1], got {a}"));
            }
        }
        if self.alpha_1 + self.alpha_2 > 1.0 + 1e-12 {
            return fail(format!(
                "alpha_1 + alpha_2 must not exceed 1, got {}",
                self.alpha_1 + self.alpha_2
            ));
        }
        for (name, v) in [
            ("p_1", self.p_1),
            ("p_2", self.p_2),
            ("p_cr", self.p_cr),
            ("rho_0", self.rho_0),
            ("rho_1", self.rho_1),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return fail(format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !(self.tau_min >= 1.0) {
            return fail(format!("tau_min must be at least 1, got {}", self.tau_min));
        }
        if !(self.tau_min < self.t_block) {
            return fail(format!(
                "tau_min ({}) must be below t_block ({})",
                self.tau_min, self.t_block
            ));
        }
        Ok(())
    }

    /// Parses the flat `key = value` config format: one assignment per line,
    /// `#` starts a comment, blank lines ignored, unknown and duplicate keys
    /// rejected. Every key must be present.
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let mut seen: Vec<(String, f64)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ScenarioError::Malformed {
                line: line_no,
                text: line.to_string(),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !CONFIG_KEYS.contains(&key) {
                return Err(ScenarioError::UnknownKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
            if seen.iter().any(|(k, _)| k == key) {
                return Err(ScenarioError::DuplicateKey {
                    line: line_no,
                    key: key.to_string(),
                });
            }
            let parsed: f64 = value.parse().map_err(|_| ScenarioError::BadValue {
                line: line_no,
                key: key.to_string(),
                value: value.to_string(),
            })?;
            seen.push((key.to_string(), parsed));
        }
        let get = |key: &str| -> Result<f64, ScenarioError> {
            seen.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| ScenarioError::InvalidConfig(format!("missing key `{key}`")))
        };
        let get_count = |key: &str| -> Result<usize, ScenarioError> {
            let v = get(key)?;
            if v.fract() != 0.0 || v < 0.0 || v > u32::MAX as f64 {
                return Err(ScenarioError::InvalidConfig(format!(
                    "`{key}` must be a nonnegative integer, got {v}"
                )));
            }
            Ok(v as usize)
        };
        let cfg = SystemConfig {
            m_t: get_count("m_t")?,
            m_r: get_count("m_r")?,
            m_1: get_count("m_1")?,
            m_2: get_count("m_2")?,
            d_1: get_count("d_1")?,
            d_2: get_count("d_2")?,
            alpha_1: get("alpha_1")?,
            alpha_2: get("alpha_2")?,
            p_1: get("p_1")?,
            p_2: get("p_2")?,
            p_cr: get("p_cr")?,
            rho_0: get("rho_0")?,
            rho_1: get("rho_1")?,
            t_block: get("t_block")?,
            tau_min: get("tau_min")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self, ScenarioError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes back to the flat config format, keys in canonical order.
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for key in CONFIG_KEYS {
            let value = match key {
                "m_t" => self.m_t as f64,
                "m_r" => self.m_r as f64,
                "m_1" => self.m_1 as f64,
                "m_2" => self.m_2 as f64,
                "d_1" => self.d_1 as f64,
                "d_2" => self.d_2 as f64,
                "alpha_1" => self.alpha_1,
                "alpha_2" => self.alpha_2,
                "p_1" => self.p_1,
                "p_2" => self.p_2,
                "p_cr" => self.p_cr,
                "rho_0" => self.rho_0,
                "rho_1" => self.rho_1,
                "t_block" => self.t_block,
                "tau_min" => self.tau_min,
                _ => unreachable!(),
            };
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

/// One draw of all four channels. The reverse primary channel is `fᴴ` by
/// reciprocity and is never stored separately.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    /// Cognitive link, `m_r × m_t`.
    pub h: CMat,
    /// Cognitive-transmitter-to-primary-1 link, `m_1 × m_t`.
    pub g1: CMat,
    /// Cognitive-transmitter-to-primary-2 link, `m_2 × m_t`.
    pub g2: CMat,
    /// Primary forward link, `m_2 × m_1`.
    pub f: CMat,
}

/// Unit-variance circularly-symmetric complex Gaussian matrix; real and
/// imaginary parts each have variance 1/2. Entries are drawn column by
/// column, so a fixed seed reproduces the same matrix.
pub fn sample_cscg_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    let scale = 0.5f64.sqrt();
    let mut m = CMat::zeros(rows, cols);
    for j in 0..cols {
        for i in 0..rows {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            m[(i, j)] = C64::new(re * scale, im * scale);
        }
    }
    m
}

/// Draws all four channels of a scenario from i.i.d. Rayleigh fading.
pub fn sample_channel_set<R: Rng>(cfg: &SystemConfig, rng: &mut R) -> ChannelSet {
    ChannelSet {
        h: sample_cscg_matrix(cfg.m_r, cfg.m_t, rng),
        g1: sample_cscg_matrix(cfg.m_1, cfg.m_t, rng),
        g2: sample_cscg_matrix(cfg.m_2, cfg.m_t, rng),
        f: sample_cscg_matrix(cfg.m_2, cfg.m_1, rng),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrMode {
    /// Independent equal-power streams over every antenna, identity receive
    /// processing.
    SpatialMux,
    /// Transmit/receive beamformers from the SVD of the forward channel.
    Eigenmode,
}

/// Transmit beamformers `a_j`, receive beamformers `b_j`, and transmit
/// covariances `s_j = a_j·a_jᴴ` for both primary directions. `b_1` processes
/// what primary terminal 1 receives (the `d_2` streams sent by terminal 2)
/// and vice versa.
#[derive(Debug, Clone)]
pub struct PrLinkDesign {
    pub a1: CMat,
    pub a2: CMat,
    pub b1: CMat,
    pub b2: CMat,
    pub s1: CMat,
    pub s2: CMat,
    pub d_1: usize,
    pub d_2: usize,
}

/// Builds the primary-link design for the requested mode.
///
/// Spatial multiplexing: `s_j = (p_j/m_j)·I`, all antennas carry a stream
/// (`d_j = m_j`), identity receive processing. Eigenmode: with the forward
/// channel SVD `f = U_F·Σ_F·V_Fᴴ`, terminal 1 transmits on the first `d_1`
/// right singular vectors and receives through the first `d_2` of them,
/// terminal 2 mirrors this with the left singular vectors. `power_split`
/// overrides the default equal per-stream power `p_j/d_j`; entries must be
/// positive and sum to `p_j`.
pub fn design_pr_link(
    cfg: &SystemConfig,
    f: &CMat,
    mode: PrMode,
    power_split: Option<[&[f64]; 2]>,
) -> Result<PrLinkDesign, ScenarioError> {
    match mode {
        PrMode::SpatialMux => {
            let id = |m: usize| CMat::identity(m, m);
            let scale = |m: usize, p: f64| id(m).map(|c| c * (p / m as f64).sqrt());
            Ok(PrLinkDesign {
                a1: scale(cfg.m_1, cfg.p_1),
                a2: scale(cfg.m_2, cfg.p_2),
                b1: id(cfg.m_1),
                b2: id(cfg.m_2),
                s1: id(cfg.m_1).map(|c| c * (cfg.p_1 / cfg.m_1 as f64)),
                s2: id(cfg.m_2).map(|c| c * (cfg.p_2 / cfg.m_2 as f64)),
                d_1: cfg.m_1,
                d_2: cfg.m_2,
            })
        }
        PrMode::Eigenmode => {
            let max_d = cfg.m_1.min(cfg.m_2);
            for (name, d) in [("d_1", cfg.d_1), ("d_2", cfg.d_2)] {
                if d > max_d {
                    return Err(ScenarioError::InvalidConfig(format!(
                        "eigenmode requires {name} <= min(m_1, m_2) = {max_d}, got {d}"
                    )));
                }
            }
            let split = |slot: usize, d: usize, p: f64| -> Result<Vec<f64>, ScenarioError> {
                match power_split {
                    None => Ok(vec![p / d as f64; d]),
                    Some(splits) => {
                        let s = splits[slot];
                        if s.len() != d {
                            return Err(ScenarioError::InvalidConfig(format!(
                                "power split {} must have d_{} = {d} entries, got {}",
                                slot + 1,
                                slot + 1,
                                s.len()
                            )));
                        }
                        if s.iter().any(|&x| !(x > 0.0)) {
                            return Err(ScenarioError::InvalidConfig(format!(
                                "power split {} entries must be positive",
                                slot + 1
                            )));
                        }
                        let sum: f64 = s.iter().sum();
                        if (sum - p).abs() > 1e-9 * p.max(1.0) {
                            return Err(ScenarioError::InvalidConfig(format!(
                                "power split {} sums to {sum}, expected p = {p}",
                                slot + 1
                            )));
                        }
                        Ok(s.to_vec())
                    }
                }
            };
            let split1 = split(0, cfg.d_1, cfg.p_1)?;
            let split2 = split(1, cfg.d_2, cfg.p_2)?;

            let svd = f.clone().svd(true, true);
            let u_f = svd.u.as_ref().expect("svd computed with u");
            let v_f = svd.v_t.as_ref().expect("svd computed with v_t").adjoint();

            let weighted = |basis: &CMat, d: usize, split: &[f64]| {
                let mut a = CMat::zeros(basis.nrows(), d);
                for (k, &p_k) in split.iter().enumerate().take(d) {
                    a.set_column(k, &(basis.column(k) * C64::from(p_k.sqrt())));
                }
                a
            };
            let leading = |basis: &CMat, d: usize| -> CMat { basis.columns(0, d).into_owned() };

            let a1 = weighted(&v_f, cfg.d_1, &split1);
            let a2 = weighted(u_f, cfg.d_2, &split2);
            let b1 = leading(&v_f, cfg.d_2).adjoint();
            let b2 = leading(u_f, cfg.d_1).adjoint();
            let s1 = numerics::hermitize(&(&a1 * a1.adjoint()));
            let s2 = numerics::hermitize(&(&a2 * a2.adjoint()));
            Ok(PrLinkDesign {
                a1,
                a2,
                b1,
                b2,
                s1,
                s2,
                d_1: cfg.d_1,
                d_2: cfg.d_2,
            })
        }
    }
}

/// Tests whether the row space of `bg = b·g` is contained in the row space of
/// `aᴴ·g`: stacking the two must not raise the numerical rank. This is the
/// condition under which zero interference at the cognitive transmitter
/// implies zero interference after the primary's receive processing.
pub fn check_subsume_condition(a: &CMat, b: &CMat, g: &CMat) -> bool {
    let x = a.adjoint() * g;
    let y = b * g;
    let rank_x = numerics::numerical_rank(&x, numerics::tol::RANK_REL);
    let stacked = numerics::vstack(&x, &y);
    let rank_stacked = numerics::numerical_rank(&stacked, numerics::tol::RANK_REL);
    rank_stacked == rank_x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn test_config() -> SystemConfig {
        SystemConfig {
            m_t: 6,
            m_r: 3,
            m_1: 4,
            m_2: 2,
            d_1: 2,
            d_2: 2,
            alpha_1: 0.45,
            alpha_2: 0.45,
            p_1: 100.0,
            p_2: 100.0,
            p_cr: 100.0,
            rho_0: 1.0,
            rho_1: 1.0,
            t_block: 1000.0,
            tau_min: 10.0,
        }
    }

    #[test]
    fn cscg_deterministic_given_seed() {
        let a = sample_cscg_matrix(4, 3, &mut ChaCha8Rng::seed_from_u64(99));
        let b = sample_cscg_matrix(4, 3, &mut ChaCha8Rng::seed_from_u64(99));
        assert_eq!(a, b);
    }

    #[test]
    fn cscg_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 100_000;
        let m = sample_cscg_matrix(1, n, &mut rng);
        let mean: C64 = m.iter().sum::<C64>() / n as f64;
        assert!(mean.norm() < 0.02);
        let var: f64 = m.iter().map(|c| c.norm_sqr()).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 0.02);
        let real_sq: f64 = m.iter().map(|c| c.re * c.re).sum::<f64>() / n as f64;
        assert!((real_sq - 0.5).abs() < 0.02);
    }

    #[test]
    fn channel_set_reproducible() {
        let cfg = test_config();
        let a = sample_channel_set(&cfg, &mut ChaCha8Rng::seed_from_u64(5));
        let b = sample_channel_set(&cfg, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(a.h, b.h);
        assert_eq!(a.g1, b.g1);
        assert_eq!(a.g2, b.g2);
        assert_eq!(a.f, b.f);
        assert_eq!((a.h.nrows(), a.h.ncols()), (3, 6));
        assert_eq!((a.f.nrows(), a.f.ncols()), (2, 4));
    }

    #[test]
    fn spatial_mux_design() {
        let mut cfg = test_config();
        cfg.m_1 = 2;
        cfg.m_2 = 2;
        cfg.d_1 = 2;
        cfg.d_2 = 2;
        cfg.p_1 = 4.0;
        cfg.p_2 = 4.0;
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = sample_cscg_matrix(2, 2, &mut rng);
        let design = design_pr_link(&cfg, &f, PrMode::SpatialMux, None).unwrap();
        let expected_s = CMat::identity(2, 2).map(|c| c * 2.0);
        assert!((&design.s1 - &expected_s).norm() < 1e-12);
        let expected_a = CMat::identity(2, 2).map(|c| c * 2.0f64.sqrt());
        assert!((&design.a1 - &expected_a).norm() < 1e-12);
        assert_eq!(design.d_1, 2);
    }

    #[test]
    fn eigenmode_diagonalizes_forward_link() {
        let cfg = test_config();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let channels = sample_channel_set(&cfg, &mut rng);
        let design = design_pr_link(&cfg, &channels.f, PrMode::Eigenmode, None).unwrap();

        // Terminal 2 receives terminal 1's streams through f; after its
        // beamformer the effective matrix is diagonal with entries
        // sigma_i * sqrt(p_1/d_1).
        let eff = &design.b2 * &channels.f * &design.a1;
        let sv = channels.f.clone().singular_values();
        let per_stream = (cfg.p_1 / cfg.d_1 as f64).sqrt();
        for i in 0..cfg.d_1 {
            for j in 0..cfg.d_1 {
                if i == j {
                    assert!((eff[(i, j)].norm() - sv[i] * per_stream).abs() < 1e-9);
                } else {
                    assert!(eff[(i, j)].norm() < 1e-9);
                }
            }
        }
        // Power budget respected.
        let tr: f64 = design.s1.diagonal().iter().map(|c| c.re).sum();
        assert!((tr - cfg.p_1).abs() < 1e-9 * cfg.p_1);
        // Full stream rank.
        assert_eq!(
            numerics::numerical_rank(&design.a1, numerics::tol::RANK_REL),
            cfg.d_1
        );
    }

    #[test]
    fn eigenmode_rejects_oversized_streams() {
        let mut cfg = test_config();
        cfg.d_1 = 3; // exceeds min(m_1, m_2) = 2
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = sample_cscg_matrix(cfg.m_2, cfg.m_1, &mut rng);
        assert!(design_pr_link(&cfg, &f, PrMode::Eigenmode, None).is_err());
    }

    #[test]
    fn power_split_validation() {
        let cfg = test_config();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let f = sample_cscg_matrix(cfg.m_2, cfg.m_1, &mut rng);
        let split1 = [30.0, 70.0];
        let split2 = [50.0, 50.0];
        let design =
            design_pr_link(&cfg, &f, PrMode::Eigenmode, Some([&split1, &split2])).unwrap();
        let tr: f64 = design.s1.diagonal().iter().map(|c| c.re).sum();
        assert!((tr - 100.0).abs() < 1e-9 * 100.0);

        let bad = [30.0, 60.0];
        assert!(design_pr_link(&cfg, &f, PrMode::Eigenmode, Some([&bad, &split2])).is_err());
    }

    #[test]
    fn subsume_holds_for_spatial_mux_and_balanced_eigenmode() {
        let mut cfg = test_config();
        cfg.m_1 = 2;
        cfg.m_2 = 2;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let channels = sample_channel_set(&cfg, &mut rng);
            let mux = design_pr_link(&cfg, &channels.f, PrMode::SpatialMux, None).unwrap();
            assert!(check_subsume_condition(&mux.a1, &mux.b1, &channels.g1));
            assert!(check_subsume_condition(&mux.a2, &mux.b2, &channels.g2));
            let eig = design_pr_link(&cfg, &channels.f, PrMode::Eigenmode, None).unwrap();
            assert!(check_subsume_condition(&eig.a1, &eig.b1, &channels.g1));
            assert!(check_subsume_condition(&eig.a2, &eig.b2, &channels.g2));
        }
    }

    #[test]
    fn subsume_fails_for_asymmetric_streams() {
        let mut cfg = test_config();
        cfg.m_1 = 2;
        cfg.m_2 = 2;
        cfg.d_1 = 2;
        cfg.d_2 = 1;
        let mut failures = 0;
        for seed in 0..20u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let channels = sample_channel_set(&cfg, &mut rng);
            let eig = design_pr_link(&cfg, &channels.f, PrMode::Eigenmode, None).unwrap();
            // Direction 2 transmits d_2 = 1 streams but terminal 2 listens
            // for d_1 = 2, so the one-dimensional transmit row space cannot
            // cover the two-dimensional receive row space.
            if !check_subsume_condition(&eig.a2, &eig.b2, &channels.g2) {
                failures += 1;
            }
        }
        assert_eq!(failures, 20);
    }

    #[test]
    fn config_parse_roundtrip() {
        let cfg = test_config();
        let text = cfg.to_config_string();
        let parsed = SystemConfig::parse(&text).unwrap();
        assert_eq!(parsed, cfg);
    }

    #[test]
    fn config_parse_rejects_unknown_and_duplicate_keys() {
        let mut text = test_config().to_config_string();
        text.push_str("bogus_key = 3\n");
        match SystemConfig::parse(&text) {
            Err(ScenarioError::UnknownKey { key, .. }) => assert_eq!(key, "bogus_key"),
            other => panic!("expected unknown-key error, got {other:?}"),
        }

        let mut dup = test_config().to_config_string();
        dup.push_str("m_t = 6\n");
        assert!(matches!(
            SystemConfig::parse(&dup),
            Err(ScenarioError::DuplicateKey { .. })
        ));
    }

    #[test]
    fn config_parse_comments_and_errors() {
        let text = "# leading comment\n".to_string()
            + &test_config().to_config_string().replace(
                "m_t = 6",
                "m_t = 6  # trailing comment",
            );
        assert!(SystemConfig::parse(&text).is_ok());

        assert!(matches!(
            SystemConfig::parse("m_t 6\n"),
            Err(ScenarioError::Malformed { .. })
        ));
        let bad_value = test_config()
            .to_config_string()
            .replace("p_cr = 100", "p_cr = lots");
        assert!(matches!(
            SystemConfig::parse(&bad_value),
            Err(ScenarioError::BadValue { .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_parameters() {
        let mut cfg = test_config();
        cfg.m_t = 1;
        assert!(cfg.validate().is_err());

        let mut cfg = test_config();
        cfg.alpha_1 = 0.7;
        cfg.alpha_2 = 0.4;
        assert!(cfg.validate().is_err());

        let mut cfg = test_config();
        cfg.d_1 = 5; // exceeds m_1 = 4
        assert!(cfg.validate().is_err());

        let mut cfg = test_config();
        cfg.tau_min = 1000.0; // equals t_block
        assert!(cfg.validate().is_err());

        assert!(test_config().validate().is_ok());
    }
}
