//! Finite point clouds standing in for (discretized) closed sets.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::space::Space;
use crate::vector::canonical_bits;

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CloudDoc {
    points: Vec<Vec<f64>>,
}

/// A finite set of points of `ℝⁿ`, stored in input order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CloudDoc", into = "CloudDoc")]
pub struct PointCloud {
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<CloudDoc> for PointCloud {
    type Error = Error;
    fn try_from(doc: CloudDoc) -> Result<Self> {
        PointCloud::new(doc.points)
    }
}

impl From<PointCloud> for CloudDoc {
    fn from(c: PointCloud) -> Self {
        CloudDoc { points: c.points }
    }
}

impl PointCloud {
    /// Checks uniform dimension and finiteness. Duplicates are allowed here;
    /// operations that need a set call [`PointCloud::check_distinct`].
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyCloud)?.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("points must have positive dimension".into()));
        }
        for p in &points {
            check_dim(dim, p)?;
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidParameter(format!("non-finite coordinate in {p:?}")));
            }
        }
        Ok(PointCloud { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn into_points(self) -> Vec<Vec<f64>> {
        self.points
    }

    pub fn check_space(&self, s: &Space) -> Result<()> {
        if self.dim != s.dim() {
            return Err(Error::DimensionMismatch {
                expected: s.dim(),
                found: self.dim,
            });
        }
        Ok(())
    }

    /// Fails with the first pair of bitwise-equal points (`-0.0 == +0.0`).
    pub fn check_distinct(&self) -> Result<()> {
        let mut seen: HashMap<Vec<u64>, usize> = HashMap::with_capacity(self.len());
        for (i, p) in self.points.iter().enumerate() {
            if let Some(&first) = seen.get(&canonical_bits(p)) {
                return Err(Error::DuplicatePoints { first, second: i });
            }
            seen.insert(canonical_bits(p), i);
        }
        Ok(())
    }

    /// Index of a point equal (bitwise, up to signed zero) to `x`.
    pub fn position(&self, x: &[f64]) -> Option<usize> {
        let key = canonical_bits(x);
        self.points.iter().position(|p| canonical_bits(p) == key)
    }

    /// Sampling step of the cloud: the smallest pairwise distance when the
    /// cloud has at least three points, and `0` otherwise. A pair of points
    /// carries no information about the scale it was sampled at.
    pub fn sampling_step(&self, s: &Space) -> f64 {
        if self.len() < 3 {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                best = best.min(s.distance_unchecked(&self.points[i], &self.points[j]));
            }
        }
        best
    }

    /// Reads `{"points": [[...], ...]}` JSON, or CSV with one point per row
    /// when the extension is `.csv`.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
        {
            Self::from_csv(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Parses headerless CSV; blank lines and lines starting with `#` are
    /// skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut points = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line() as usize);
                Error::Parse {
                    line,
                    column: 0,
                    message: e.to_string(),
                }
            })?;
            let line = record.position().map_or(0, |p| p.line() as usize);
            let mut p = Vec::with_capacity(record.len());
            for (col, field) in record.iter().enumerate() {
                let x = field.parse::<f64>().map_err(|e| Error::Parse {
                    line,
                    column: col + 1,
                    message: format!("`{field}`: {e}"),
                })?;
                p.push(x);
            }
            if !p.is_empty() {
                points.push(p);
            }
        }
        Self::new(points)
    }
}

pub(crate) fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_and_csv_agree() {
        let a = PointCloud::from_json(r#"{"points": [[0, 0], [1, 0.5]]}"#).unwrap();
        let b = PointCloud::from_csv("# header comment\n0,0\n1, 0.5\n").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn csv_reports_position() {
        match PointCloud::from_csv("0,0\n1,x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn json_reports_position() {
        match PointCloud::from_json("{\"points\": [[0, 0],\n [1, ]]}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_rejected() {
        assert!(matches!(
            PointCloud::new(vec![vec![0.0, 0.0], vec![1.0]]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(PointCloud::new(vec![]), Err(Error::EmptyCloud)));
    }

    #[test]
    fn duplicates_detected() {
        let c = PointCloud::new(vec![vec![0.0, 1.0], vec![2.0, 0.0], vec![-0.0, 1.0]]).unwrap();
        assert!(matches!(c.check_distinct(), Err(Error::DuplicatePoints { first: 0, second: 2 })));
        assert_eq!(c.position(&[2.0, 0.0]), Some(1));
    }

    #[test]
    fn sampling_step_needs_three_points() {
        let s = Space::linf(2).unwrap();
        let two = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(two.sampling_step(&s), 0.0);
        let three = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).unwrap();
        assert_eq!(three.sampling_step(&s), 1.0);
    }
}
