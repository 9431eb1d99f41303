//! Points, datasets and the plain-text dataset format.
//!
//! The file format is one point per line, coordinates as decimal floats
//! separated by commas. There is no header and blank lines are ignored.

use std::fmt::Write as _;
use std::io::Read;
use std::ops::Index;
use std::path::Path;

use crate::error::{Error, Result};

/// A point in R^d with finite coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::invalid("a point needs at least one coordinate"));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::invalid(format!("non-finite coordinate {bad}")));
        }
        Ok(Point(coords))
    }

    /// Shorthand for a point on the real line.
    pub fn scalar(x: f64) -> Result<Self> {
        Point::new(vec![x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// An indexed, non-empty collection of equal-dimension points.
///
/// Indices are identities: two equal-valued points at different indices are
/// different points.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    points: Vec<Point>,
    dim: usize,
}

impl Dataset {
    pub fn new(points: Vec<Point>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::invalid("a dataset needs at least one point"))?;
        let dim = first.dim();
        if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.dim() != dim) {
            return Err(Error::invalid(format!(
                "point {i} has dimension {}, expected {dim}",
                p.dim()
            )));
        }
        Ok(Dataset { points, dim })
    }

    /// Builds a one-dimensional dataset from scalars.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        let points = values.iter().map(|&v| Point::scalar(v)).collect::<Result<Vec<_>>>()?;
        Dataset::new(points)
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let points = rows.into_iter().map(Point::new).collect::<Result<Vec<_>>>()?;
        Dataset::new(points)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.points.iter()
    }

    /// Returns the sub-dataset at `indices` (in that order).
    pub fn select(&self, indices: &[usize]) -> Result<Dataset> {
        let points = indices
            .iter()
            .map(|&i| {
                self.points
                    .get(i)
                    .cloned()
                    .ok_or_else(|| Error::invalid(format!("index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(points)
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// Parses the plain-text dataset format.
    pub fn parse(text: &str) -> Result<Dataset> {
        let mut points = Vec::new();
        let mut dim = None;
        for (lineno, line) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            let coords = trimmed
                .split(',')
                .map(|field| {
                    let field = field.trim();
                    let value: f64 = field.parse().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("`{field}` is not a number"),
                    })?;
                    if !value.is_finite() {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!("`{field}` is not finite"),
                        });
                    }
                    Ok(value)
                })
                .collect::<Result<Vec<f64>>>()?;
            match dim {
                None => dim = Some(coords.len()),
                Some(d) if d != coords.len() => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("expected {d} coordinates, found {}", coords.len()),
                    })
                }
                Some(_) => {}
            }
            points.push(Point(coords));
        }
        if points.is_empty() {
            return Err(Error::Parse {
                line: 0,
                message: "no points in input".into(),
            });
        }
        Dataset::new(points)
    }

    pub fn read_from(mut reader: impl Read) -> Result<Dataset> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Dataset::parse(&text)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Dataset> {
        Dataset::parse(&std::fs::read_to_string(path)?)
    }

    /// Serializes to the plain-text format. Floats use the shortest
    /// representation that parses back to the same value.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.points.len() * 8 * self.dim);
        for p in &self.points {
            for (j, c) in p.coords().iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                write!(out, "{c}").expect("writing to a String cannot fail");
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

impl Index<usize> for Dataset {
    type Output = Point;

    fn index(&self, i: usize) -> &Point {
        &self.points[i]
    }
}

impl<'a> IntoIterator for &'a Dataset {
    type Item = &'a Point;
    type IntoIter = std::slice::Iter<'a, Point>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}
