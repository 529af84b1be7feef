//! RSS fingerprinting: radio map and the NN / KNN / WKNN position estimator.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Scalar;

/// Transmitter id to received signal strength in dBm.
pub type RssMap<T> = BTreeMap<String, T>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fingerprint<T> {
    pub position: Point2<T>,
    pub rss: RssMap<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadioMap<T> {
    entries: Vec<Fingerprint<T>>,
    transmitters: BTreeSet<String>,
}

impl<T: Scalar> RadioMap<T> {
    /// Validates every entry. The transmitter registry is the union of ids
    /// seen in the entries plus any listed in `extra_transmitters`.
    pub fn new(entries: Vec<Fingerprint<T>>, extra_transmitters: impl IntoIterator<Item = String>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::invariant("radiomap.non_empty", "radio map needs at least one reference point"));
        }
        let lo = T::lit(-120.0);
        for (i, e) in entries.iter().enumerate() {
            if !e.position.is_finite() {
                return Err(Error::invariant("fingerprint.finite_position", format!("entry {i}")));
            }
            if e.rss.is_empty() {
                return Err(Error::invariant("fingerprint.non_empty_rss", format!("entry {i}")));
            }
            if let Some((id, v)) = e.rss.iter().find(|(_, v)| !(**v >= lo && **v <= T::zero())) {
                return Err(Error::invariant(
                    "fingerprint.rss_range",
                    format!("entry {i}, transmitter `{id}`: {v} dBm outside [-120, 0]"),
                ));
            }
        }
        let mut transmitters: BTreeSet<String> = extra_transmitters.into_iter().collect();
        transmitters.extend(entries.iter().flat_map(|e| e.rss.keys().cloned()));
        Ok(RadioMap { entries, transmitters })
    }

    pub fn entries(&self) -> &[Fingerprint<T>] {
        &self.entries
    }

    pub fn transmitters(&self) -> &BTreeSet<String> {
        &self.transmitters
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorMode {
    Nn,
    Knn,
    #[default]
    Wknn,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WknnConfig<T> {
    pub k: usize,
    pub mode: EstimatorMode,
    /// Substituted for a transmitter missing on either side, dBm.
    pub missing_rss_floor: T,
}

impl<T: Scalar> Default for WknnConfig<T> {
    fn default() -> Self {
        WknnConfig {
            k: 3,
            mode: EstimatorMode::Wknn,
            missing_rss_floor: T::lit(-100.0),
        }
    }
}

/// Euclidean distance over the union of transmitter ids.
pub fn rss_distance<T: Scalar>(observed: &RssMap<T>, reference: &RssMap<T>, floor: T) -> Result<T> {
    if observed.is_empty() && reference.is_empty() {
        return Err(Error::InvalidInput("both RSS vectors are empty".into()));
    }
    let ids: BTreeSet<&String> = observed.keys().chain(reference.keys()).collect();
    let sum = ids.into_iter().fold(T::zero(), |acc, id| {
        let a = observed.get(id).copied().unwrap_or(floor);
        let b = reference.get(id).copied().unwrap_or(floor);
        acc + (a - b) * (a - b)
    });
    Ok(sum.sqrt())
}

/// Indices and distances of the `k` nearest entries, ties broken by
/// insertion order.
pub fn nearest<T: Scalar>(observed: &RssMap<T>, map: &RadioMap<T>, k: usize, floor: T) -> Result<Vec<(usize, T)>> {
    let mut scored = map
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| Ok((i, rss_distance(observed, &e.rss, floor)?)))
        .collect::<Result<Vec<_>>>()?;
    // Stable sort keeps insertion order among equal distances.
    scored.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    scored.truncate(k);
    Ok(scored)
}

pub fn estimate_position<T: Scalar>(observed: &RssMap<T>, map: &RadioMap<T>, cfg: &WknnConfig<T>) -> Result<Point2<T>> {
    let k = match cfg.mode {
        EstimatorMode::Nn => 1,
        _ => cfg.k,
    };
    if k == 0 || k > map.len() {
        return Err(Error::invalid_parameter(
            "k",
            format!("need 1 <= K <= M, got K = {k}, M = {}", map.len()),
        ));
    }
    let selected = nearest(observed, map, k, cfg.missing_rss_floor)?;

    if cfg.mode != EstimatorMode::Knn {
        // Limit of 1/d weighting as d -> 0.
        if let Some(&(i, _)) = selected.iter().find(|(_, d)| *d == T::zero()) {
            return Ok(map.entries[i].position);
        }
    }

    let mut num = Point2::origin();
    let mut den = T::zero();
    for &(i, d) in &selected {
        let w = match cfg.mode {
            EstimatorMode::Knn => T::one(),
            EstimatorMode::Nn | EstimatorMode::Wknn => T::one() / d,
        };
        num = num + map.entries[i].position * w;
        den = den + w;
    }
    Ok(num * (T::one() / den))
}
