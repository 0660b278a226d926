// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors produced anywhere in the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("resonance key {0} has no amplitude in the reduced system")]
    NoResonance(String),

    #[error("no gate time exists: {0}")]
    NoGate(String),

    #[error("step size underflow at t = {t:.6e} (h = {step:.3e})")]
    Stiffness { t: f64, step: f64 },

    #[error("unitarity drift {drift:.3e} exceeds bound {bound:.3e} at t = {t:.6e}")]
    Accuracy { t: f64, drift: f64, bound: f64 },

    #[error("gate deviates from target by {distance:.3e} (tolerance {tolerance:.3e})")]
    Infidelity { distance: f64, tolerance: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
