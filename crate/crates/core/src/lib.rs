//! Summarize a set of related equal-length time series as words over a
//! learned shapelet alphabet and extend each series by one predicted segment.
//!
//! The pipeline clusters the series (K-means++ with Lloyd iteration),
//! segments every centroid with a trading-inspired changepoint detector to
//! obtain shapelets, labels each series' own segments by nearest shapelet
//! under unconstrained DTW, and forecasts from the centroid segment that
//! follows the last label. See [`pipeline::summarize`].

pub mod clustering;
pub mod error;
pub mod ingest;
pub mod model;
pub mod pipeline;
pub mod preprocess;
pub mod report;
pub mod segmentation;
pub mod similarity;

pub use error::{Error, Result};
pub use model::{
    decode_label, encode_label, Alphabet, Dataset, Hyperparameters, Label, Prediction,
    Segmentation, SeriesSummary, SummarizationResult, TimeSeries,
};
pub use pipeline::summarize;
