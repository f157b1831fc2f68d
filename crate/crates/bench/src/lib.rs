//! Holds the criterion benchmarks in `benches/`.
