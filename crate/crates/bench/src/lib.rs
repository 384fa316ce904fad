// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for `dapb-core` live under `benches/`.
