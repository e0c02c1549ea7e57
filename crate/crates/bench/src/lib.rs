//! Benchmark-only crate; see benches/interpolation.rs.
