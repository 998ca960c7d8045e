//! Trouble-report inflow analytics over software-change corpora.
//!
//! The library covers a three-stage analysis of a development corpus
//! (commits, trouble reports, software features, releases):
//!
//! 1. **Inflow prediction** - aggregate the corpus into a monthly (or
//!    per-release) time series, cut a lag-4 supervised dataset out of
//!    it, and fit LASSO, Random Forest (classifier + regressor), and an
//!    SVC on the inflow and its delta categories.
//! 2. **Footprint clustering** - describe every software feature by its
//!    change footprint (files or LOC per system/subsystem), scale with
//!    MinMax / Robust / Quantile transformers, and search k-means and a
//!    240-cell DBSCAN grid for the clustering that balances silhouette
//!    against cluster count (capped at 30).
//! 3. **Cluster-augmented prediction** - add per-cluster delivery counts
//!    to the time series, refit the stage-1 learners, rank feature
//!    importance three ways (correlation, LASSO, forest), and measure
//!    each cluster's contribution by ablation.
//!
//! A seeded synthetic-corpus generator with planted ground truth stands
//! in for proprietary data, and everything is deterministic from one
//! 64-bit seed.
//!
//! ## Modules
//!
//! - [`corpus`] - the four data subsets, CSV ingest/emit, release
//!   linking, subsystem consolidation, footprints, inflow curves
//! - [`dataset`] - period aggregation, lagged design matrices, delta
//!   categorization, chronological splits, cluster augmentation
//! - [`preprocess`] - MinMax, Robust (two windows), and quantile
//!   scalers with fit/transform/inverse contracts
//! - [`cluster`] - k-means, DBSCAN, silhouette, the parameter grid, and
//!   the selection policy
//! - [`learn`] - LASSO coordinate descent, Random Forest, SMO-trained
//!   SVC, and the pair-error measure
//! - [`evaluate`] - MAE/MSE/R2/weighted-f1, importance rankings,
//!   ablation trials
//! - [`synth`] - the seeded corpus generator and its ground truth
//! - [`pipeline`] - stage orchestration, run configuration, and report
//!   emission (JSON, CSV tables, SVG charts)
//!
//! ## Examples
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run -p inflow --example generate_corpus     # seeded corpus + ground truth
//! cargo run -p inflow --example validate_corpus     # ingest, link, consolidate
//! cargo run -p inflow --example cumulative_inflow   # per-release detection curve
//! cargo run -p inflow --example lagged_dataset      # period table -> design matrix
//! cargo run -p inflow --example scaler_tour         # the five scalers side by side
//! cargo run -p inflow --example cluster_footprints  # k-means vs DBSCAN on footprints
//! cargo run -p inflow --example dbscan_grid         # 240-cell grid + selection policy
//! cargo run -p inflow --example lasso_path          # L1 path and sparsity
//! cargo run -p inflow --example random_forest       # both forest modes + importances
//! cargo run -p inflow --example svc_blobs           # one-vs-one SVC on blobs
//! cargo run -p inflow --example importance_analysis # three-way importance + ablation
//! cargo run --release -p inflow --example run_all   # the whole pipeline end to end
//! ```
//!
//! ## Command line
//!
//! The `inflow` binary wraps the pipeline module:
//!
//! ```bash
//! inflow synth --out-dir corpus --seed 42
//! inflow validate --corpus-dir corpus
//! inflow all --corpus-dir corpus --out-dir out --seed 42
//! ```
//!
//! Given the same corpus bytes and configuration, every emitted byte is
//! identical across reruns and `--threads` values.

pub mod cluster;
pub mod corpus;
pub mod dataset;
pub mod evaluate;
pub mod learn;
pub mod matrix;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod synth;
