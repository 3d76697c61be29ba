//! Janossy densities and gap probabilities of finite-rank determinantal
//! ensembles, exact and hard-edge laws for the smallest Wishart
//! eigenvalues, and Monte Carlo checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biortho;
pub mod error;
pub mod hardedge;
pub mod janossy;
pub mod measure;
pub mod montecarlo;
pub mod orthopoly;
pub mod special;
pub mod verify;

pub use biortho::{BiorthoSystem, FunctionFamily, RankNKernel};
pub use error::{Error, Result};
pub use hardedge::{BesselForm, BesselKernel};
pub use janossy::CountDistribution;
pub use measure::{Interval, Measure, QuadratureRule, Region, TailDecay, Weight};
pub use montecarlo::{EnsembleSample, RngStream, SurvivalPoint};
pub use orthopoly::OPSequence;
pub use verify::CriterionReport;
