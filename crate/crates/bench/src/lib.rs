//! Bench-only crate; see benches/planning.rs.
