//! The three-phase summarization run.
//!
//! 1. Cluster the dataset and segment every centroid; centroid segments are
//!    the shapelet alphabet.
//! 2. Segment every series and label each segment with its nearest shapelet
//!    under DTW.
//! 3. Extend every series by the centroid segment that follows its last
//!    matched shapelet, attached at the last observation.

use std::borrow::Cow;

use rayon::prelude::*;

use crate::clustering::{cluster, ClusterModel, RNG_NAME};
use crate::error::{Error, Result};
use crate::model::{
    decode_label, encode_label, Alphabet, Dataset, Hyperparameters, Label, Prediction,
    RunManifest, Segmentation, SeriesSummary, SummarizationResult, TimeSeries,
};
use crate::preprocess::z_normalize;
use crate::segmentation::apts_segment;
use crate::similarity::dtw_distance_bounded;

pub const DEFAULT_MARTINGALE_HORIZON: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeletMatch {
    pub k: usize,
    pub q: usize,
    pub distance: f64,
}

/// Clusters `dataset` and segments every centroid.
pub fn build_alphabet(dataset: &Dataset, hyper: &Hyperparameters) -> Result<(Alphabet, ClusterModel)> {
    hyper.validate()?;
    let model = cluster(dataset, hyper)?;
    let segmentations = model
        .centroids
        .par_iter()
        .map(|c| apts_segment(c, hyper.s_max, hyper.dtau_min, hyper.d_epsilon))
        .collect::<Result<Vec<_>>>()?;
    let alphabet = Alphabet::new(hyper.s_max, model.centroids.clone(), segmentations)?;
    Ok((alphabet, model))
}

/// Lowest-distance shapelet in ascending `(k, q)` order; the first one wins
/// ties. The running best distance bounds each DTW evaluation.
pub fn nearest_shapelet(segment: &[f64], alphabet: &Alphabet) -> Result<ShapeletMatch> {
    if segment.is_empty() {
        return Err(Error::domain("segment is empty"));
    }
    let mut best: Option<ShapeletMatch> = None;
    for (k, q, shapelet) in alphabet.shapelets() {
        let bound = best.map_or(f64::INFINITY, |b| b.distance);
        if let Some(distance) = dtw_distance_bounded(segment, shapelet, bound)? {
            if best.is_none_or(|b| distance < b.distance) {
                best = Some(ShapeletMatch { k, q, distance });
            }
        }
    }
    best.ok_or_else(|| Error::domain("alphabet has no shapelets"))
}

/// Segments one series and labels every segment.
pub fn label_series(
    values: &[f64],
    alphabet: &Alphabet,
    hyper: &Hyperparameters,
) -> Result<(Segmentation, Vec<Label>)> {
    if values.len() != alphabet.len_t() {
        return Err(Error::Shape(format!(
            "series length {} does not match alphabet length {}",
            values.len(),
            alphabet.len_t()
        )));
    }
    let seg = apts_segment(values, hyper.s_max, hyper.dtau_min, hyper.d_epsilon)?;
    let labels = seg
        .segments()
        .map(|(start, end)| {
            let m = nearest_shapelet(&values[start..=end], alphabet)?;
            encode_label(m.k, m.q, alphabet.s_max)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((seg, labels))
}

/// Forecast from the segment following the last label's shapelet.
///
/// When that shapelet is already its centroid's final segment there is no
/// successor; the matched segment itself is reused, the predicted label stays
/// the last label and `clamped` is set.
pub fn predict_series(values: &[f64], labels: &[Label], alphabet: &Alphabet) -> Result<Prediction> {
    predict_scaled(values, labels, alphabet, 1.0)
}

/// As [`predict_series`], with centroid increments multiplied by `scale`
/// (the series' stddev when the run works in z-normalized units).
fn predict_scaled(
    values: &[f64],
    labels: &[Label],
    alphabet: &Alphabet,
    scale: f64,
) -> Result<Prediction> {
    let last_label = *labels.last().ok_or_else(|| Error::domain("no labels to extend"))?;
    let last = *values.last().ok_or_else(|| Error::domain("series is empty"))?;
    let (k, q_star) = decode_label(last_label, alphabet.s_max);
    if k >= alphabet.k() || q_star >= alphabet.q_count(k) {
        return Err(Error::domain(format!(
            "label {} does not address a shapelet",
            last_label.0
        )));
    }
    let next = q_star + 1;
    let (q, label, clamped) = if next < alphabet.q_count(k) {
        (next, Label(last_label.0 + 1), false)
    } else {
        (q_star, last_label, true)
    };
    let (start, end) = alphabet.segmentations[k].segment(q);
    let centroid = &alphabet.centroids[k];
    let base = centroid[start];
    let prediction = centroid[start..=end]
        .iter()
        .map(|&c| last + scale * (c - base))
        .collect();
    Ok(Prediction {
        values: prediction,
        horizon: end - start,
        label: Some(label),
        clamped,
    })
}

/// Constant forecast at the last observation.
pub fn martingale_predict(values: &[f64], horizon: usize) -> Result<Prediction> {
    if horizon < 1 {
        return Err(Error::param("horizon must be at least 1"));
    }
    let last = *values.last().ok_or_else(|| Error::domain("series is empty"))?;
    Ok(Prediction {
        values: vec![last; horizon + 1],
        horizon,
        label: None,
        clamped: false,
    })
}

/// Runs all three phases. Deterministic given `(dataset, hyper)`.
pub fn summarize(dataset: &Dataset, hyper: &Hyperparameters) -> Result<SummarizationResult> {
    hyper.validate()?;
    let (working, scales): (Cow<Dataset>, Vec<f64>) = if hyper.z_normalize {
        let mut scales = Vec::with_capacity(dataset.n());
        let series = dataset
            .series()
            .iter()
            .map(|s| {
                let z = z_normalize(&s.values);
                scales.push(z.stddev);
                TimeSeries::new(s.id.clone(), z.values)
            })
            .collect::<Result<Vec<_>>>()?;
        (Cow::Owned(Dataset::new(series)?), scales)
    } else {
        (Cow::Borrowed(dataset), vec![1.0; dataset.n()])
    };

    let (alphabet, model) = build_alphabet(&working, hyper)?;

    let series = dataset
        .series()
        .par_iter()
        .zip(working.series().par_iter())
        .zip(scales.par_iter())
        .zip(model.assignments.par_iter())
        .map(|(((raw, work), &scale), &cluster)| {
            let (boundaries, labels) = label_series(&work.values, &alphabet, hyper)?;
            let pred = predict_scaled(&raw.values, &labels, &alphabet, scale)?;
            Ok(SeriesSummary {
                id: raw.id.clone(),
                observed: raw.values.clone(),
                cluster,
                boundaries,
                labels,
                predicted_label: pred.label.expect("shapelet forecasts carry a label"),
                horizon: pred.horizon,
                clamped: pred.clamped,
                prediction: pred.values,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SummarizationResult {
        manifest: RunManifest {
            hyperparameters: hyper.clone(),
            rng: RNG_NAME.to_string(),
            dataset_checksum: dataset.checksum(),
            n: dataset.n(),
            t: dataset.t(),
            k: alphabet.k(),
            cluster_cost: model.cost,
            lloyd_iterations: model.iterations,
        },
        alphabet,
        series,
    })
}
