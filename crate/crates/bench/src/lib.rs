// SPDX-License-Identifier: Apache-2.0

//! Benchmarks for the switch model live under `benches/`.
