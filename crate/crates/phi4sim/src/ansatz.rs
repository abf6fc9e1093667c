//! Variational circuit families.
