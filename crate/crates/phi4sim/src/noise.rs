//! Noisy emulation and mitigation.
