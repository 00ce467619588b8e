use num_complex::Complex64;

use super::TOL;
use crate::error::{Error, Result};

/// A state vector over a finite-dimensional Hilbert space.
///
/// Amplitudes are stored in the computational basis. A `Ket` is not required
/// to be normalized; operations that need a normalized state either
/// normalize explicitly or reject with [`Error::NotNormalized`].
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
    labels: Option<Vec<String>>,
}

impl Ket {
    /// Wraps raw amplitudes. Rejects empty or non-finite input.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        for (i, a) in amps.iter().enumerate() {
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        Ok(Self { amps, labels: None })
    }

    /// Wraps real amplitudes.
    pub fn from_reals(amps: &[f64]) -> Result<Self> {
        Self::new(amps.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Attaches one basis label per amplitude.
    pub fn with_labels(amps: Vec<Complex64>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != amps.len() {
            return Err(Error::DimensionMismatch {
                expected: amps.len(),
                got: labels.len(),
            });
        }
        let mut ket = Self::new(amps)?;
        ket.labels = Some(labels);
        Ok(ket)
    }

    /// The computational basis state |index⟩ in `dim` dimensions.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { amps, labels: None }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amp(&self, i: usize) -> Complex64 {
        self.amps[i]
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// True when the norm is within [`TOL`] of 1.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() <= TOL
    }

    /// Returns a unit-norm copy, or [`Error::ZeroNorm`] for the zero vector.
    pub fn normalize(&self) -> Result<Ket> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(Ket {
            amps: self.amps.iter().map(|a| a / n).collect(),
            labels: self.labels.clone(),
        })
    }

    /// Errors unless the norm is within [`TOL`] of 1.
    pub fn require_normalized(&self) -> Result<()> {
        let dev = (self.norm() - 1.0).abs();
        if dev > TOL {
            return Err(Error::NotNormalized(dev));
        }
        Ok(())
    }

    pub fn scale(&self, z: Complex64) -> Ket {
        Ket {
            amps: self.amps.iter().map(|a| a * z).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn add(&self, other: &Ket) -> Result<Ket> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(Ket {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
            labels: None,
        })
    }

    /// ⟨self|other⟩, conjugating the left argument.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |self⟩⊗|other⟩ with the left factor most significant. Labels are
    /// concatenated pairwise when both factors carry them.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let labels = match (&self.labels, &other.labels) {
            (Some(la), Some(lb)) => {
                let mut combined = Vec::with_capacity(la.len() * lb.len());
                for a in la {
                    for b in lb {
                        combined.push(format!("{a}{b}"));
                    }
                }
                Some(combined)
            }
            _ => None,
        };
        Ket { amps, labels }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_is_normalized() {
        let k = Ket::basis_state(4, 2);
        assert!(k.is_normalized());
        assert_eq!(k.amp(2), c(1.0, 0.0));
        assert_eq!(k.amp(0), c(0.0, 0.0));
    }

    #[test]
    fn rejects_non_finite_amplitudes() {
        let bad = Ket::new(vec![c(f64::NAN, 0.0)]);
        assert!(matches!(bad, Err(Error::NonFiniteEntry(0))));
        let bad = Ket::new(vec![c(0.0, 0.0), c(0.0, f64::INFINITY)]);
        assert!(matches!(bad, Err(Error::NonFiniteEntry(1))));
    }

    #[test]
    fn normalize_rejects_zero_vector() {
        let z = Ket::new(vec![c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(z.normalize(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn inner_product_conjugates_left() {
        let a = Ket::new(vec![c(0.0, 1.0), c(0.0, 0.0)]).unwrap();
        let b = Ket::new(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        // ⟨a|b⟩ = conj(i) * 1 = -i
        assert_eq!(a.inner(&b).unwrap(), c(0.0, -1.0));
    }

    #[test]
    fn tensor_index_order_puts_first_factor_most_significant() {
        let h = Ket::basis_state(2, 0);
        let v = Ket::basis_state(2, 1);
        let hv = h.tensor(&v);
        // |H⟩⊗|V⟩ = flat index 0*2 + 1 = 1.
        assert_eq!(hv.amp(1), c(1.0, 0.0));
        assert_eq!(hv.amp(0), c(0.0, 0.0));
        let vh = v.tensor(&h);
        assert_eq!(vh.amp(2), c(1.0, 0.0));
    }

    #[test]
    fn tensor_combines_labels() {
        let q = |idx: usize| {
            Ket::with_labels(
                Ket::basis_state(2, idx).amps().to_vec(),
                vec!["H".into(), "V".into()],
            )
            .unwrap()
        };
        let joint = q(0).tensor(&q(1));
        assert_eq!(
            joint.labels().unwrap(),
            ["HH", "HV", "VH", "VV"]
                .map(String::from)
                .as_slice()
        );
    }

    #[test]
    fn tensor_norm_is_product_of_norms() {
        let a = Ket::new(vec![c(1.0, 1.0), c(2.0, 0.0)]).unwrap();
        let b = Ket::new(vec![c(0.0, 3.0), c(1.0, -1.0)]).unwrap();
        let t = a.tensor(&b);
        assert!((t.norm() - a.norm() * b.norm()).abs() < 1e-12);
    }
}
