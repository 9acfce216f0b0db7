//! Criterion benchmarks of the hot numerical kernels; run with `cargo bench -p h2ion-bench`.
