//! Acceptance suite for `prg-core`. The checks live in `tests/acceptance.rs`
//! and run with `cargo test -p prg-validation --test acceptance`.
