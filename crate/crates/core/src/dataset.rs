//! Ordered datasets and the prefix / delete-one / replace-one views used by
//! every stability definition.

use std::ops::Deref;

/// An ordered sequence of data points `z_1, ..., z_m`.
///
/// Views never mutate the source: `prefix` borrows, `without` and
/// `with_replaced` allocate a new dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset<Z> {
    points: Vec<Z>,
}

impl<Z: Clone> Dataset<Z> {
    pub fn new(points: Vec<Z>) -> Self {
        Self { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Z] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Z> {
        self.points
    }

    /// `S_i`: the first `i` points. Panics if `i > m`.
    pub fn prefix(&self, i: usize) -> &[Z] {
        &self.points[..i]
    }

    /// `S^{\i}` with a zero-based index.
    pub fn without(&self, index: usize) -> Dataset<Z> {
        Dataset::new(without(&self.points, index))
    }

    /// `S^{(i)}`: the dataset with the point at `index` replaced by `z`.
    pub fn with_replaced(&self, index: usize, z: Z) -> Dataset<Z> {
        let mut points = self.points.clone();
        points[index] = z;
        Dataset::new(points)
    }

    /// Inverse of [`Dataset::without`].
    pub fn with_inserted(&self, index: usize, z: Z) -> Dataset<Z> {
        let mut points = self.points.clone();
        points.insert(index, z);
        Dataset::new(points)
    }

    pub fn push(&mut self, z: Z) {
        self.points.push(z);
    }
}

impl<Z> Deref for Dataset<Z> {
    type Target = [Z];

    fn deref(&self) -> &[Z] {
        &self.points
    }
}

impl<Z> FromIterator<Z> for Dataset<Z> {
    fn from_iter<I: IntoIterator<Item = Z>>(iter: I) -> Self {
        Self {
            points: iter.into_iter().collect(),
        }
    }
}

impl<Z> From<Vec<Z>> for Dataset<Z> {
    fn from(points: Vec<Z>) -> Self {
        Self { points }
    }
}

/// Copy of `points` with the element at `index` removed.
pub fn without<Z: Clone>(points: &[Z], index: usize) -> Vec<Z> {
    let mut out = Vec::with_capacity(points.len().saturating_sub(1));
    out.extend_from_slice(&points[..index]);
    out.extend_from_slice(&points[index + 1..]);
    out
}
