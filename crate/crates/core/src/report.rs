//! Accumulated-infection arithmetic plus JSON and CSV export of run results.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Alphabet, RunManifest, Segmentation, SeriesSummary, SummarizationResult};
use crate::pipeline::martingale_predict;

pub const SCHEMA_VERSION: u32 = 1;

/// The JSON schema the summary document conforms to.
pub const SUMMARY_SCHEMA: &str = include_str!("../schema/summary.schema.json");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpiParams {
    pub r0: f64,
    /// Days between successive infections.
    pub serial_interval: f64,
    pub horizon_days: usize,
}

impl EpiParams {
    pub fn new(r0: f64, serial_interval: f64, horizon_days: usize) -> Result<Self> {
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::param(format!("r0 must be positive, got {r0}")));
        }
        if !(serial_interval > 0.0 && serial_interval.is_finite()) {
            return Err(Error::param(format!(
                "serial interval must be positive, got {serial_interval}"
            )));
        }
        if horizon_days < 1 {
            return Err(Error::param("horizon must be at least one day"));
        }
        Ok(Self {
            r0,
            serial_interval,
            horizon_days,
        })
    }
}

/// `sum_{t=0}^{T-1} r0^(t / serial_interval)` with `T = horizon_days`.
///
/// The upper bound is exclusive: with `r0 = 2.25` and a 4.25-day serial
/// interval this gives 628.4 million at 98 days and 18 750.7 billion at
/// 152 days.
pub fn accumulated_infections(p: &EpiParams) -> f64 {
    (0..p.horizon_days)
        .map(|t| p.r0.powf(t as f64 / p.serial_interval))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct AlphabetBlock {
    k: usize,
    s_max: usize,
    centroids: Vec<Vec<f64>>,
    boundaries: Vec<Segmentation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SummaryDocument {
    schema_version: u32,
    manifest: RunManifest,
    alphabet: AlphabetBlock,
    series: Vec<SeriesSummary>,
}

/// Writes the summary document (pretty-printed JSON, trailing newline).
pub fn export_summary<W: Write>(result: &SummarizationResult, mut writer: W) -> Result<()> {
    let doc = SummaryDocument {
        schema_version: SCHEMA_VERSION,
        manifest: result.manifest.clone(),
        alphabet: AlphabetBlock {
            k: result.alphabet.k(),
            s_max: result.alphabet.s_max,
            centroids: result.alphabet.centroids.clone(),
            boundaries: result.alphabet.segmentations.clone(),
        },
        series: result.series.clone(),
    };
    serde_json::to_writer_pretty(&mut writer, &doc)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn export_summary_string(result: &SummarizationResult) -> Result<String> {
    let mut buf = Vec::new();
    export_summary(result, &mut buf)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn import_summary<R: Read>(reader: R) -> Result<SummarizationResult> {
    let doc: SummaryDocument = serde_json::from_reader(reader)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::domain(format!(
            "unsupported schema version {}",
            doc.schema_version
        )));
    }
    let alphabet = Alphabet::new(doc.alphabet.s_max, doc.alphabet.centroids, doc.alphabet.boundaries)?;
    if alphabet.k() != doc.alphabet.k {
        return Err(Error::Shape(format!(
            "alphabet declares K = {} but holds {} centroids",
            doc.alphabet.k,
            alphabet.k()
        )));
    }
    Ok(SummarizationResult {
        manifest: doc.manifest,
        alphabet,
        series: doc.series,
    })
}

/// Plot-ready CSV for one series: `t, observed, ispa_prediction,
/// martingale_prediction, boundary`.
///
/// Observations fill `t < T`; both forecasts start at the anchor `t = T-1`.
/// The Martingale forecast spans `martingale_horizon` steps, or the shapelet
/// forecast's horizon when `None`. `boundary` is 1 on segmentation instants.
pub fn export_plot_series(
    result: &SummarizationResult,
    id: &str,
    martingale_horizon: Option<usize>,
) -> Result<String> {
    let s = result
        .get(id)
        .ok_or_else(|| Error::UnknownId(id.to_string()))?;
    let t_len = s.observed.len();
    let anchor = t_len - 1;
    let martingale = martingale_predict(&s.observed, martingale_horizon.unwrap_or(s.horizon))?;
    let rows = t_len + s.horizon.max(martingale.horizon);

    let cell = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "observed", "ispa_prediction", "martingale_prediction", "boundary"])
        .map_err(csv_io)?;
    for t in 0..rows {
        let observed = s.observed.get(t).copied();
        let ahead = t.checked_sub(anchor);
        let ispa = ahead.and_then(|j| s.prediction.get(j).copied());
        let mart = ahead.and_then(|j| martingale.values.get(j).copied());
        let boundary = s.boundaries.boundaries().contains(&t);
        w.write_record([
            t.to_string(),
            cell(observed),
            cell(ispa),
            cell(mart),
            u8::from(boundary).to_string(),
        ])
        .map_err(csv_io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV of numbers is UTF-8"))
}

fn csv_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}
