//! Home of the `acceptance` harness; see `tests/acceptance.rs`.
