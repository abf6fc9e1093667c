//! Weighted Pauli-string sums used for operator encodings and observables.

use num_complex::Complex64;
use std::fmt;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    pub fn as_char(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }
}

/// A sum of real-weighted Pauli strings over a fixed qubit count.
///
/// Character position in a string corresponds to the qubit index, so the
/// label "ZI" acts with Z on qubit 0. Hermitian observables keep all
/// coefficients real by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, Vec<PauliOp>)>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, Vec<PauliOp>)] {
        &self.terms
    }

    /// Add `coeff` times the string that is `op` on each qubit of `supports`
    /// and identity elsewhere. Panics if a support index repeats or is out of
    /// range.
    pub fn add_term(&mut self, coeff: f64, supports: &[(usize, PauliOp)]) {
        let mut string = vec![PauliOp::I; self.n_qubits];
        for &(q, op) in supports {
            assert!(q < self.n_qubits, "qubit {q} out of range");
            assert_eq!(string[q], PauliOp::I, "duplicate qubit {q} in term");
            string[q] = op;
        }
        self.push(coeff, string);
    }

    /// Add a fully spelled-out string, merging with an existing equal string.
    pub fn push(&mut self, coeff: f64, string: Vec<PauliOp>) {
        assert_eq!(string.len(), self.n_qubits);
        if let Some(entry) = self.terms.iter_mut().find(|(_, s)| *s == string) {
            entry.0 += coeff;
        } else {
            self.terms.push((coeff, string));
        }
    }

    /// Identity coefficient (zero when no identity term is present).
    pub fn identity_coeff(&self) -> f64 {
        self.terms
            .iter()
            .find(|(_, s)| s.iter().all(|&p| p == PauliOp::I))
            .map(|(c, _)| *c)
            .unwrap_or(0.0)
    }

    /// Drop terms with |coeff| below `tol`.
    pub fn prune(&mut self, tol: f64) {
        self.terms.retain(|(c, _)| c.abs() > tol);
    }

    pub fn scale(&mut self, factor: f64) {
        for (c, _) in &mut self.terms {
            *c *= factor;
        }
    }

    pub fn add_assign(&mut self, other: &PauliSum) {
        assert_eq!(self.n_qubits, other.n_qubits);
        for (c, s) in &other.terms {
            self.push(*c, s.clone());
        }
    }

    /// True when every term is a product of I and Z only.
    pub fn is_diagonal(&self) -> bool {
        self.terms
            .iter()
            .all(|(_, s)| s.iter().all(|&p| p == PauliOp::I || p == PauliOp::Z))
    }

    /// Product of two sums of diagonal (I/Z) strings; Z*Z = I keeps the
    /// result diagonal. Used to square field operators symbolically.
    pub fn mul_diagonal(&self, other: &PauliSum) -> PauliSum {
        assert_eq!(self.n_qubits, other.n_qubits);
        assert!(self.is_diagonal() && other.is_diagonal());
        let mut out = PauliSum::new(self.n_qubits);
        for (ca, sa) in &self.terms {
            for (cb, sb) in &other.terms {
                let string: Vec<PauliOp> = sa
                    .iter()
                    .zip(sb.iter())
                    .map(|(&a, &b)| match (a, b) {
                        (PauliOp::I, p) | (p, PauliOp::I) => p,
                        (PauliOp::Z, PauliOp::Z) => PauliOp::I,
                        _ => unreachable!(),
                    })
                    .collect();
                out.push(ca * cb, string);
            }
        }
        out.prune(0.0);
        out
    }

    /// Eigenvalue of a diagonal sum on the computational basis state `index`
    /// (qubit q holds bit q of `index`).
    pub fn diagonal_value(&self, index: usize) -> f64 {
        debug_assert!(self.is_diagonal());
        let mut total = 0.0;
        for (c, s) in &self.terms {
            let mut sign = 1.0;
            for (q, &p) in s.iter().enumerate() {
                if p == PauliOp::Z && (index >> q) & 1 == 1 {
                    sign = -sign;
                }
            }
            total += c * sign;
        }
        total
    }

    /// Action of a single string on a basis index: returns the target index
    /// and accumulated phase.
    pub fn apply_string(string: &[PauliOp], index: usize) -> (usize, Complex64) {
        let mut target = index;
        let mut phase = Complex64::new(1.0, 0.0);
        for (q, &p) in string.iter().enumerate() {
            let bit = (index >> q) & 1;
            match p {
                PauliOp::I => {}
                PauliOp::X => target ^= 1 << q,
                PauliOp::Y => {
                    target ^= 1 << q;
                    phase *= if bit == 0 {
                        Complex64::new(0.0, 1.0)
                    } else {
                        Complex64::new(0.0, -1.0)
                    };
                }
                PauliOp::Z => {
                    if bit == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (target, phase)
    }

    /// Dense matrix form. Guarded to 14 qubits; intended for oracles and tests.
    pub fn to_dense(&self) -> nalgebra::DMatrix<Complex64> {
        assert!(self.n_qubits <= 14, "dense form limited to 14 qubits");
        let dim = 1usize << self.n_qubits;
        let mut m = nalgebra::DMatrix::zeros(dim, dim);
        for (c, s) in &self.terms {
            for col in 0..dim {
                let (row, phase) = Self::apply_string(s, col);
                m[(row, col)] += phase * Complex64::new(*c, 0.0);
            }
        }
        m
    }

    /// Text export, one term per line: `coeff label-string`.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.terms {
            let label: String = s.iter().map(|p| p.as_char()).collect();
            out.push_str(&format!("{c:+.16e} {label}\n"));
        }
        out
    }

    /// Parse the `export_text` format.
    pub fn parse_text(text: &str) -> Result<PauliSum, String> {
        let mut terms: Vec<(f64, Vec<PauliOp>)> = Vec::new();
        let mut n_qubits = None;
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (coeff, label) = line
                .split_once(' ')
                .ok_or_else(|| format!("malformed term line: {line}"))?;
            let coeff: f64 = coeff
                .parse()
                .map_err(|e| format!("bad coefficient {coeff}: {e}"))?;
            let string: Option<Vec<PauliOp>> = label.chars().map(PauliOp::from_char).collect();
            let string = string.ok_or_else(|| format!("bad Pauli label {label}"))?;
            match n_qubits {
                None => n_qubits = Some(string.len()),
                Some(n) if n != string.len() => {
                    return Err("inconsistent string lengths".into());
                }
                _ => {}
            }
            terms.push((coeff, string));
        }
        let n_qubits = n_qubits.ok_or("empty Pauli sum text")?;
        let mut sum = PauliSum::new(n_qubits);
        for (c, s) in terms {
            sum.push(c, s);
        }
        Ok(sum)
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.export_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_values_match_dense() {
        let mut sum = PauliSum::new(2);
        sum.add_term(1.25, &[]);
        sum.add_term(1.0, &[(0, PauliOp::Z), (1, PauliOp::Z)]);
        let dense = sum.to_dense();
        for i in 0..4 {
            assert!((dense[(i, i)].re - sum.diagonal_value(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn dense_is_hermitian_for_real_coeffs() {
        let mut sum = PauliSum::new(3);
        sum.add_term(0.7, &[(0, PauliOp::X), (2, PauliOp::Y)]);
        sum.add_term(-0.3, &[(1, PauliOp::Z)]);
        let m = sum.to_dense();
        let diff = (&m - m.adjoint()).norm();
        assert!(diff < 1e-12);
    }

    #[test]
    fn text_round_trip() {
        let mut sum = PauliSum::new(2);
        sum.add_term(-0.5, &[(0, PauliOp::Z)]);
        sum.add_term(-1.0, &[(1, PauliOp::Z)]);
        let parsed = PauliSum::parse_text(&sum.export_text()).unwrap();
        assert_eq!(parsed, sum);
    }

    #[test]
    fn diagonal_product_squares_z() {
        let mut phi = PauliSum::new(2);
        phi.add_term(-0.5, &[(0, PauliOp::Z)]);
        phi.add_term(-1.0, &[(1, PauliOp::Z)]);
        let sq = phi.mul_diagonal(&phi);
        assert!((sq.identity_coeff() - 1.25).abs() < 1e-14);
        let zz = sq
            .terms()
            .iter()
            .find(|(_, s)| s.iter().filter(|&&p| p == PauliOp::Z).count() == 2)
            .unwrap();
        assert!((zz.0 - 1.0).abs() < 1e-14);
    }
}
