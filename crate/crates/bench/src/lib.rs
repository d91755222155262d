//! Benchmarks only; see `benches/kernels.rs`. Run with `cargo bench -p holescan-bench`.
