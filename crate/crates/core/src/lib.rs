// Copyright 2026 The annealnet Authors
// SPDX-License-Identifier: Apache-2.0

//! Differentiable simulation of neural networks that program a diabatic
//! quantum annealer, trained to separate classes in Hilbert space.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix it to `f64`, with `*32` variants for `f32`.

pub mod data;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod learning;
pub mod objective;
pub mod qcore;
pub mod scalar;
pub mod schedule;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type StateVector = qcore::StateVector<f64>;
pub type StateVector32 = qcore::StateVector<f32>;
pub type DenseOperator = qcore::DenseOperator<f64>;
pub type ControlSchedule = schedule::ControlSchedule<f64>;
pub type ControlSchedule32 = schedule::ControlSchedule<f32>;
pub type EvolutionTape = evolution::EvolutionTape<f64>;
pub type DensityMatrix = objective::DensityMatrix<f64>;
pub type DensityMatrix32 = objective::DensityMatrix<f32>;
pub type ClassStats = objective::ClassStats<f64>;
pub type Network = learning::Network<f64>;
pub type Network32 = learning::Network<f32>;
pub type Tensor = learning::Tensor<f64>;
pub type Optimizer = learning::Optimizer<f64>;
