// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closed_form;
pub mod error;
pub mod linalg;
pub mod model;
pub mod frame;
pub mod propagator;
pub mod rwa;
pub mod gates;
pub mod classical_drive;
pub mod pipeline;
pub mod cli;
