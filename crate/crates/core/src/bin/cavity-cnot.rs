// Copyright 2026 The cavity-cnot Developers
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(cavity_cnot::cli::main_with_args(std::env::args_os()));
}
