//! Benchmark-only crate; see the `benches/` directory. The library target
//! exists solely so Cargo accepts the package.
