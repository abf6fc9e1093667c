//! SVC optimization.
