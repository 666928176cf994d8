//! Facial coding-scheme extraction and diversity statistics for face datasets.
//!
//! The crate ingests detected faces (box, 68 keypoints, pose class and
//! optional annotations), computes craniofacial, symmetry, contrast, skin
//! color, annotation and pose/resolution features, and summarizes each
//! feature dimension with Shannon and Simpson diversity and evenness.

pub mod annotation;
pub mod color;
pub mod config;
pub mod contrast;
pub mod craniofacial;
pub mod diversity;
pub mod error;
pub mod features;
pub mod geometry;
pub mod manifest;
pub mod pipeline;
pub mod pose;
pub mod preprocess;
pub mod raster;
pub mod skin;
pub mod symmetry;
pub mod synth;
pub mod transform;

pub use error::{Error, Result};
