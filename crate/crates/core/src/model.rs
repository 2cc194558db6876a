//! Domain types shared by every stage: series, datasets, hyperparameters,
//! segmentations, the shapelet alphabet and the label codec.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// One real-valued series keyed by its region id (`"Province/State|Country/Region"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    pub id: String,
    pub values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let id = id.into();
        if values.len() < 2 {
            return Err(Error::TooShort {
                len: values.len(),
                min: 2,
            });
        }
        if let Some(t) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "series {id:?} has a non-finite value at t = {t}"
            )));
        }
        Ok(Self { id, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The last observation, `x(T-1)`.
    pub fn last(&self) -> f64 {
        *self.values.last().expect("series has at least two values")
    }
}

/// A set of equal-length series with unique ids.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    series: Vec<TimeSeries>,
    len: usize,
}

impl Dataset {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self> {
        let first = series.first().ok_or(Error::EmptyDataset)?;
        let len = first.len();
        let mut seen = HashSet::with_capacity(series.len());
        for s in &series {
            if s.len() != len {
                return Err(Error::Shape(format!(
                    "series {:?} has length {}, expected {len}",
                    s.id,
                    s.len()
                )));
            }
            if !seen.insert(s.id.as_str()) {
                return Err(Error::Shape(format!("duplicate series id {:?}", s.id)));
            }
        }
        Ok(Self { series, len })
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    /// Number of series, `N`.
    pub fn n(&self) -> usize {
        self.series.len()
    }

    /// Common series length, `T`.
    pub fn t(&self) -> usize {
        self.len
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.id == id)
    }

    /// Hex SHA-256 over ids and little-endian value bytes, in order.
    pub fn checksum(&self) -> String {
        let mut hasher = Sha256::new();
        for s in &self.series {
            hasher.update((s.id.len() as u64).to_le_bytes());
            hasher.update(s.id.as_bytes());
            for v in &s.values {
                hasher.update(v.to_le_bytes());
            }
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Defaults: `s_max = 10`, `dtau_min = 5`, `d_epsilon = 0.01`, no
/// dataset-level z-normalization. `k_max` defaults to the dataset size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperparameters {
    pub k_max: usize,
    pub s_max: usize,
    pub dtau_min: usize,
    pub d_epsilon: f64,
    pub z_normalize: bool,
    pub rng_seed: u64,
    pub max_iters: usize,
}

pub const DEFAULT_S_MAX: usize = 10;
pub const DEFAULT_DTAU_MIN: usize = 5;
pub const DEFAULT_D_EPSILON: f64 = 0.01;
pub const DEFAULT_MAX_ITERS: usize = 100;
pub const DEFAULT_SEED: u64 = 2020;

impl Hyperparameters {
    pub fn for_dataset_size(n: usize) -> Self {
        Self {
            k_max: n,
            s_max: DEFAULT_S_MAX,
            dtau_min: DEFAULT_DTAU_MIN,
            d_epsilon: DEFAULT_D_EPSILON,
            z_normalize: false,
            rng_seed: DEFAULT_SEED,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(Error::param("k_max must be at least 1"));
        }
        if self.s_max <= 2 {
            return Err(Error::param(format!(
                "s_max must exceed 2, got {}",
                self.s_max
            )));
        }
        if self.dtau_min < 1 {
            return Err(Error::param("dtau_min must be at least 1"));
        }
        if !(self.d_epsilon > 0.0 && self.d_epsilon.is_finite()) {
            return Err(Error::param(format!(
                "d_epsilon must be positive, got {}",
                self.d_epsilon
            )));
        }
        if self.max_iters < 1 {
            return Err(Error::param("max_iters must be at least 1"));
        }
        Ok(())
    }
}

/// Strictly increasing boundary indices from `0` to `T-1`. Segment `p` spans
/// `boundaries[p]..=boundaries[p+1]`, so neighbours share one sample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Segmentation {
    boundaries: Vec<usize>,
}

impl Segmentation {
    pub fn new(boundaries: Vec<usize>) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::domain("a segmentation needs at least two boundaries"));
        }
        if boundaries[0] != 0 {
            return Err(Error::domain("first boundary must be 0"));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(format!(
                "boundaries must be strictly increasing: {boundaries:?}"
            )));
        }
        Ok(Self { boundaries })
    }

    /// Full invariant check against a series length and the segmentation
    /// hyperparameters.
    pub fn check(&self, t: usize, s_max: usize, dtau_min: usize) -> Result<()> {
        let last = *self.boundaries.last().unwrap();
        if last + 1 != t {
            return Err(Error::domain(format!(
                "last boundary {last} does not close a series of length {t}"
            )));
        }
        let p = self.num_segments();
        if p >= s_max {
            return Err(Error::domain(format!(
                "{p} segments is not below s_max = {s_max}"
            )));
        }
        let final_len = last - self.boundaries[p - 1];
        if final_len < dtau_min {
            return Err(Error::domain(format!(
                "final segment length {final_len} is below dtau_min = {dtau_min}"
            )));
        }
        Ok(())
    }

    pub fn boundaries(&self) -> &[usize] {
        &self.boundaries
    }

    pub fn num_segments(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Inclusive `(start, end)` pairs.
    pub fn segments(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.boundaries.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn segment(&self, p: usize) -> (usize, usize) {
        (self.boundaries[p], self.boundaries[p + 1])
    }
}

/// Shapelet label `k * s_max + q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub usize);

pub fn encode_label(k: usize, q: usize, s_max: usize) -> Result<Label> {
    if q >= s_max {
        return Err(Error::InvalidIndex { q, s_max });
    }
    Ok(Label(k * s_max + q))
}

pub fn decode_label(label: Label, s_max: usize) -> (usize, usize) {
    let k = label.0 / s_max;
    (k, label.0 - k * s_max)
}

/// Centroids and their segmentations; shapelet `(k, q)` is centroid `k`
/// restricted to its `q`-th segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Alphabet {
    pub s_max: usize,
    pub centroids: Vec<Vec<f64>>,
    pub segmentations: Vec<Segmentation>,
}

impl Alphabet {
    pub fn new(
        s_max: usize,
        centroids: Vec<Vec<f64>>,
        segmentations: Vec<Segmentation>,
    ) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::domain("alphabet has no centroids"));
        }
        if centroids.len() != segmentations.len() {
            return Err(Error::Shape(format!(
                "{} centroids but {} segmentations",
                centroids.len(),
                segmentations.len()
            )));
        }
        let t = centroids[0].len();
        for (k, (c, seg)) in centroids.iter().zip(&segmentations).enumerate() {
            if c.len() != t {
                return Err(Error::Shape(format!("centroid {k} has length {}", c.len())));
            }
            if *seg.boundaries().last().unwrap() + 1 != t || seg.num_segments() >= s_max {
                return Err(Error::Shape(format!(
                    "segmentation of centroid {k} does not fit the alphabet"
                )));
            }
        }
        Ok(Self {
            s_max,
            centroids,
            segmentations,
        })
    }

    /// Number of clusters, `K`.
    pub fn k(&self) -> usize {
        self.centroids.len()
    }

    /// Number of segments of centroid `k`, `Q_k`.
    pub fn q_count(&self, k: usize) -> usize {
        self.segmentations[k].num_segments()
    }

    pub fn shapelet(&self, k: usize, q: usize) -> &[f64] {
        let (start, end) = self.segmentations[k].segment(q);
        &self.centroids[k][start..=end]
    }

    /// All shapelets in ascending `(k, q)` order.
    pub fn shapelets(&self) -> impl Iterator<Item = (usize, usize, &[f64])> + '_ {
        (0..self.k()).flat_map(move |k| (0..self.q_count(k)).map(move |q| (k, q, self.shapelet(k, q))))
    }

    pub fn len_t(&self) -> usize {
        self.centroids[0].len()
    }
}

/// A segment-level forecast anchored at the last observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// `horizon + 1` values; `values[0]` is `x(T-1)`.
    pub values: Vec<f64>,
    pub horizon: usize,
    pub label: Option<Label>,
    pub clamped: bool,
}

/// Everything the run records for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesSummary {
    pub id: String,
    pub observed: Vec<f64>,
    pub cluster: usize,
    pub boundaries: Segmentation,
    pub labels: Vec<Label>,
    pub predicted_label: Label,
    pub horizon: usize,
    pub clamped: bool,
    pub prediction: Vec<f64>,
}

/// Run metadata carried alongside the result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub hyperparameters: Hyperparameters,
    pub rng: String,
    pub dataset_checksum: String,
    pub n: usize,
    pub t: usize,
    pub k: usize,
    pub cluster_cost: f64,
    pub lloyd_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummarizationResult {
    pub manifest: RunManifest,
    pub alphabet: Alphabet,
    pub series: Vec<SeriesSummary>,
}

impl SummarizationResult {
    pub fn get(&self, id: &str) -> Option<&SeriesSummary> {
        self.series.iter().find(|s| s.id == id)
    }
}
