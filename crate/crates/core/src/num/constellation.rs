use num_complex::Complex64;

use crate::{Error, Result};

/// A finite unit-average-energy symbol alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    label: String,
}

impl Constellation {
    /// Validates that the points are pairwise distinct with unit average energy.
    pub fn new(points: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("constellation has no points".into()));
        }
        if points.iter().any(|p| !p.re.is_finite() || !p.im.is_finite()) {
            return Err(Error::InvalidParameter("constellation point is not finite".into()));
        }
        let energy = points.iter().map(|p| p.norm_sqr()).sum::<f64>() / points.len() as f64;
        if (energy - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "constellation average energy is {energy}, expected 1"
            )));
        }
        for (i, a) in points.iter().enumerate() {
            if points[i + 1..].iter().any(|b| b == a) {
                return Err(Error::InvalidParameter(format!("duplicate constellation point {a}")));
            }
        }
        Ok(Self { points, label: label.into() })
    }

    /// Square QAM with `side * side` points on the odd-integer grid, normalized.
    ///
    /// Index `i * side + j` holds real level `i` and imaginary level `j`,
    /// both in ascending order.
    pub fn square_qam(side: usize) -> Self {
        let levels: Vec<f64> = (0..side).map(|i| 2.0 * i as f64 - (side as f64 - 1.0)).collect();
        let energy = 2.0 * levels.iter().map(|l| l * l).sum::<f64>() / side as f64;
        let scale = 1.0 / energy.sqrt();
        let points = levels
            .iter()
            .flat_map(|&re| levels.iter().map(move |&im| Complex64::new(re * scale, im * scale)))
            .collect();
        Self::new(points, format!("{}QAM", side * side)).expect("square QAM is well formed")
    }

    pub fn qam16() -> Self {
        Self::square_qam(4)
    }

    pub fn qpsk() -> Self {
        let mut c = Self::square_qam(2);
        c.label = "QPSK".into();
        c
    }

    pub fn bpsk() -> Self {
        Self::new(vec![Complex64::new(-1.0, 0.0), Complex64::new(1.0, 0.0)], "BPSK").unwrap()
    }

    /// Single-point alphabet; only useful as a degenerate test case.
    pub fn single() -> Self {
        Self::new(vec![Complex64::new(1.0, 0.0)], "SINGLE").unwrap()
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "16qam" | "qam16" => Ok(Self::qam16()),
            "64qam" | "qam64" => Ok(Self::square_qam(8)),
            "qpsk" | "4qam" => Ok(Self::qpsk()),
            "bpsk" => Ok(Self::bpsk()),
            "single" => Ok(Self::single()),
            other => Err(Error::Config(format!("unknown constellation '{other}'"))),
        }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn point(&self, index: usize) -> Complex64 {
        self.points[index]
    }

    /// Index of the nearest point; ties go to the lowest index.
    pub fn nearest(&self, z: Complex64) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, p) in self.points.iter().enumerate() {
            let d = (z - p).norm_sqr();
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }
}
