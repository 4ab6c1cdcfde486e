//! Criterion benchmarks for `chargesite` live in `benches/`.
