//! Object-level semantic SLAM backend.
//!
//! The pipeline tracks instance detections across frames, associates them
//! with persistent object landmarks by solving a rectangular linear
//! assignment problem, detects loop closures by spectral matching of 3D
//! semantic graphs, estimates the accumulated drift by aligning matched
//! objects, and corrects the trajectory with an object-level pose graph
//! optimization. A synthetic-scene simulator and an evaluation harness
//! drive the experiments end to end.

pub mod align;
pub mod assign;
pub mod assoc;
pub mod config;
pub mod eval;
pub mod geom;
pub mod objmap;
pub mod pipeline;
pub mod posegraph;
pub mod raster;
pub mod semgraph;
pub mod sim;

pub use geom::{Pose, Twist};
