// Copyright 2026 The symchar Developers
// SPDX-License-Identifier: Apache-2.0

fn main() {
    std::process::exit(symchar::cli::run(std::env::args_os()));
}
