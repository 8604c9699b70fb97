//! SINR model with fixed power schemes, expressed through affectance.
//!
//! The affectance of link `w` on link `v` is
//! `a_w(v) = min(1, c_v · (P_w / P_v) · (d_vv / d_wv)^α)` with
//! `c_v = β / (1 − βN / (P_v / d_vv^α))`, where `d_wv` is the distance from
//! the sender of `w` to the receiver of `v`.

use serde::{Deserialize, Serialize};

use super::GeoLink;
use crate::conflict::ConflictGraph;
use crate::error::{Error, Result};
use crate::graph::LinkId;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SinrParams {
    /// Path-loss exponent, in `(1, 6]`.
    pub alpha: f64,
    /// Success threshold, at least 1.
    pub beta: f64,
    /// Ambient noise, nonnegative.
    pub noise: f64,
}

impl SinrParams {
    pub fn new(alpha: f64, beta: f64, noise: f64) -> Result<Self> {
        if !(alpha > 1.0 && alpha <= 6.0) {
            return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (1, 6]")));
        }
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!("beta = {beta} must be at least 1")));
        }
        if !(noise >= 0.0 && noise.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise = {noise} must be nonnegative")));
        }
        Ok(SinrParams { alpha, beta, noise })
    }
}

/// Oblivious power: a function of the link's own length only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PowerScheme {
    Uniform,
    /// `P = d^(τ·α)`; τ = 1 is linear power, τ = 1/2 mean power.
    LengthExponent { tau: f64 },
}

impl PowerScheme {
    /// τ in `[0, 1]` keeps the scheme monotone: power grows with length while
    /// received signal strength does not.
    pub fn validate(&self) -> Result<()> {
        match *self {
            PowerScheme::Uniform => Ok(()),
            PowerScheme::LengthExponent { tau } if (0.0..=1.0).contains(&tau) => Ok(()),
            PowerScheme::LengthExponent { tau } => Err(Error::InvalidParameter(format!(
                "power exponent tau = {tau} must lie in [0, 1] for a monotone scheme"
            ))),
        }
    }

    pub fn power(&self, length: f64, alpha: f64) -> f64 {
        match *self {
            PowerScheme::Uniform => 1.0,
            PowerScheme::LengthExponent { tau } => length.powf(tau * alpha),
        }
    }
}

/// A fixed set of geometric links under one parameter and power choice.
#[derive(Clone, Debug)]
pub struct SinrModel {
    links: Vec<GeoLink>,
    params: SinrParams,
    power: PowerScheme,
    powers: Vec<f64>,
    noise_factor: Vec<f64>,
}

impl SinrModel {
    /// Fails if some link cannot meet the threshold even without interference.
    pub fn new(links: Vec<GeoLink>, params: SinrParams, power: PowerScheme) -> Result<Self> {
        power.validate()?;
        let mut powers = Vec::with_capacity(links.len());
        let mut noise_factor = Vec::with_capacity(links.len());
        for (i, link) in links.iter().enumerate() {
            let len = link.length();
            if len.is_nan() || len <= 0.0 {
                return Err(Error::Input(format!("link {} has zero length", LinkId(i))));
            }
            let p = power.power(len, params.alpha);
            let signal = p / len.powf(params.alpha);
            let required = params.beta * params.noise;
            if required >= signal {
                return Err(Error::NoiseTooHigh {
                    link: LinkId(i),
                    required,
                    signal,
                });
            }
            powers.push(p);
            noise_factor.push(params.beta / (1.0 - required / signal));
        }
        Ok(SinrModel {
            links,
            params,
            power,
            powers,
            noise_factor,
        })
    }

    pub fn links(&self) -> &[GeoLink] {
        &self.links
    }

    pub fn params(&self) -> SinrParams {
        self.params
    }

    pub fn power_scheme(&self) -> PowerScheme {
        self.power
    }

    pub fn power(&self, v: usize) -> f64 {
        self.powers[v]
    }

    /// `c_v`, the noise-adjusted threshold of link `v`.
    pub fn noise_factor(&self, v: usize) -> f64 {
        self.noise_factor[v]
    }

    /// `a_w(v)`; zero for `w == v`, one when the sender of `w` sits on the receiver of `v`.
    pub fn affectance(&self, w: usize, v: usize) -> f64 {
        if w == v {
            return 0.0;
        }
        let d_vv = self.links[v].length();
        let d_wv = self.links[w].sender.distance(self.links[v].receiver);
        if d_wv == 0.0 {
            return 1.0;
        }
        let raw = self.noise_factor[v] * (self.powers[w] / self.powers[v]) * (d_vv / d_wv).powf(self.params.alpha);
        raw.min(1.0)
    }

    /// Affectance before clipping at 1.
    pub fn raw_affectance(&self, w: usize, v: usize) -> f64 {
        if w == v {
            return 0.0;
        }
        let d_vv = self.links[v].length();
        let d_wv = self.links[w].sender.distance(self.links[v].receiver);
        self.noise_factor[v] * (self.powers[w] / self.powers[v]) * (d_vv / d_wv).powf(self.params.alpha)
    }

    /// Signal to interference-plus-noise ratio at the receiver of `v` when the
    /// links of `set` transmit, computed from powers and distances directly.
    pub fn sinr(&self, v: usize, set: &[usize]) -> f64 {
        let alpha = self.params.alpha;
        let signal = self.powers[v] / self.links[v].length().powf(alpha);
        let interference: f64 = set
            .iter()
            .filter(|&&u| u != v)
            .map(|&u| self.powers[u] / self.links[u].sender.distance(self.links[v].receiver).powf(alpha))
            .sum();
        signal / (self.params.noise + interference)
    }

    /// Whether `v` decodes successfully while `set` transmits.
    pub fn succeeds(&self, v: usize, set: &[usize]) -> bool {
        self.sinr(v, set) >= self.params.beta
    }

    /// Conflict graph with affectance weights, ordered by link length.
    pub fn conflict_graph(&self) -> Result<ConflictGraph> {
        self.conflict_graph_for(&(0..self.links.len()).map(LinkId).collect::<Vec<_>>())
    }

    /// Conflict graph restricted to `ids` (indices into the model's links).
    pub fn conflict_graph_for(&self, ids: &[LinkId]) -> Result<ConflictGraph> {
        let keys = ids.iter().map(|&id| (id, self.links[id.0].length())).collect();
        let mut weights = Vec::new();
        for &w in ids {
            for &v in ids {
                if w != v {
                    let a = self.affectance(w.0, v.0);
                    if a > 0.0 {
                        weights.push((w, v, a));
                    }
                }
            }
        }
        ConflictGraph::new(keys, weights)
    }
}

/// Affectance-weighted conflict graph over `links`, link `i` having id `i`.
pub fn sinr_conflict_graph(links: &[GeoLink], params: SinrParams, power: PowerScheme) -> Result<ConflictGraph> {
    SinrModel::new(links.to_vec(), params, power)?.conflict_graph()
}
