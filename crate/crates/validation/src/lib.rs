//! Acceptance checks for the squeezecav workspace live in
//! `tests/acceptance.rs`; run them with `cargo test -p squeezecav-validation`.
