//! Criterion benchmarks of the exact kernels; see `benches/kernels.rs`.
