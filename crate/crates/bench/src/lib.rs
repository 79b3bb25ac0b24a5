//! Benchmarks live under `benches/`; this target exists so the bench
//! crate builds like any other workspace member.
