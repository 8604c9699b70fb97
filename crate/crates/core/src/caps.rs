//! Size caps for the exponential-time measurements and oracles.

use crate::error::{Error, Result};

/// Environment variable that overrides the caps, e.g.
/// `CONFLICT_FOREST_CAPS="tree_links=14,forest_links=22"`. Meant for tests.
pub const CAPS_ENV: &str = "CONFLICT_FOREST_CAPS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    /// Universe size for exact inductive-independence measurement.
    pub rho_links: usize,
    /// Post-neighborhood size for exact clique-cover measurement.
    pub eta_neighborhood: usize,
    /// Link count for the maximum feasible forest search.
    pub forest_links: usize,
    /// Node and link counts for the optimal tree schedule search.
    pub tree_nodes: usize,
    pub tree_links: usize,
    /// Node and link counts for the optimal Steiner load search.
    pub steiner_nodes: usize,
    pub steiner_links: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            rho_links: 18,
            eta_neighborhood: 12,
            forest_links: 20,
            tree_nodes: 9,
            tree_links: 12,
            steiner_nodes: 9,
            steiner_links: 20,
        }
    }
}

impl Caps {
    pub fn from_env() -> Result<Caps> {
        match std::env::var(CAPS_ENV) {
            Ok(spec) => Caps::parse(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }

    /// Parses `key=value` pairs separated by commas on top of the defaults.
    pub fn parse(spec: &str) -> Result<Caps> {
        let mut caps = Caps::default();
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("cap `{item}` is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("cap `{item}` has a non-integer value")))?;
            let slot = match key.trim() {
                "rho_links" => &mut caps.rho_links,
                "eta_neighborhood" => &mut caps.eta_neighborhood,
                "forest_links" => &mut caps.forest_links,
                "tree_nodes" => &mut caps.tree_nodes,
                "tree_links" => &mut caps.tree_links,
                "steiner_nodes" => &mut caps.steiner_nodes,
                "steiner_links" => &mut caps.steiner_links,
                other => return Err(Error::InvalidParameter(format!("unknown cap `{other}`"))),
            };
            *slot = value;
        }
        Ok(caps)
    }
}

pub(crate) fn check_cap(what: &'static str, size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what, size, cap })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_overrides_defaults() {
        let caps = Caps::parse("tree_links=14, rho_links=20").unwrap();
        assert_eq!(caps.tree_links, 14);
        assert_eq!(caps.rho_links, 20);
        assert_eq!(caps.forest_links, Caps::default().forest_links);
        assert!(Caps::parse("bogus=1").is_err());
        assert!(Caps::parse("tree_links").is_err());
    }
}
