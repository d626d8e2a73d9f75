//! Matrix interchange format: `{"n": int, "re": [[...]], "im": [[...]]}`.

use serde::{Deserialize, Serialize};

use super::{ComplexMatrix, UnitaryMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.n();
        let re = (0..n).map(|i| (0..n).map(|j| m[(i, j)].re).collect()).collect();
        let im = (0..n).map(|i| (0..n).map(|j| m[(i, j)].im).collect()).collect();
        Self { n, re, im }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.n;
        let square = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if n == 0 || !square(&self.re) || !square(&self.im) {
            return Err(Error::Shape(format!("expected {n}x{n} arrays")));
        }
        let data: Vec<C64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| C64::new(self.re[i][j], self.im[i][j]))
            .collect();
        ComplexMatrix::from_vec(n, data)
    }

    pub fn to_unitary(&self) -> Result<UnitaryMatrix> {
        UnitaryMatrix::new(self.to_matrix()?)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixJson::from_matrix(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        j.to_matrix().map_err(serde::de::Error::custom)
    }
}

impl Serialize for UnitaryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for UnitaryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        UnitaryMatrix::new(m).map_err(serde::de::Error::custom)
    }
}
