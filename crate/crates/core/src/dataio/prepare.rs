use crate::error::{Error, Result};
use crate::types::{make_dataset, DataSet};

/// Unweighted, unnormalized rows as they come off disk.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    d: usize,
    values: Vec<f64>,
    labels: Option<Vec<u32>>,
}

impl RawDataset {
    pub fn new(values: Vec<f64>, d: usize, labels: Option<Vec<u32>>) -> Result<Self> {
        if d == 0 || values.len() % d != 0 {
            return Err(Error::Shape(format!(
                "{} values do not form rows of dimension {d}",
                values.len()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != values.len() / d {
                return Err(Error::Shape(format!(
                    "{} labels for {} rows",
                    l.len(),
                    values.len() / d
                )));
            }
        }
        Ok(RawDataset { d, values, labels })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    /// All rows as a dataset, unnormalized.
    pub fn into_dataset(self, weights: Option<Vec<f64>>) -> Result<DataSet> {
        make_dataset(self.values, self.d, weights, self.labels)
    }
}

/// Keeps the first `counts[j]` rows of class `classes[j]` (in file order)
/// and divides every coordinate by the maximum over the whole raw set.
/// Weights are uniform.
pub fn prepare(raw: &RawDataset, classes: &[u32], counts: &[usize]) -> Result<DataSet> {
    if classes.is_empty() || classes.len() != counts.len() {
        return Err(Error::InsufficientData(
            "need one count per requested class and at least one class".into(),
        ));
    }
    if let Some(j) = counts.iter().position(|&c| c == 0) {
        return Err(Error::InsufficientData(format!(
            "class {} requested with count 0",
            classes[j]
        )));
    }
    let labels = raw.labels().ok_or(Error::MissingLabels)?;
    let max = raw.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max.is_finite() && max > 0.0) {
        return Err(Error::DegenerateData(format!(
            "cannot normalize by maximum value {max}"
        )));
    }

    let mut taken = vec![0usize; classes.len()];
    let mut values = Vec::new();
    let mut out_labels = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        if let Some(j) = classes.iter().position(|&c| c == label) {
            if taken[j] < counts[j] {
                taken[j] += 1;
                values.extend(raw.row(i).iter().map(|v| v / max));
                out_labels.push(label);
            }
        }
    }
    if let Some(j) = (0..classes.len()).find(|&j| taken[j] < counts[j]) {
        return Err(Error::InsufficientData(format!(
            "class {} has {} samples, {} requested",
            classes[j], taken[j], counts[j]
        )));
    }
    make_dataset(values, raw.d, None, Some(out_labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw() -> RawDataset {
        RawDataset::new(
            vec![0.0, 255.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0],
            2,
            Some(vec![1, 2, 1, 3, 2]),
        )
        .unwrap()
    }

    #[test]
    fn selects_first_per_class_and_normalizes_by_global_max() {
        let d = prepare(&raw(), &[1, 2], &[1, 2]).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.labels().unwrap(), &[1, 2, 2]);
        assert_eq!(d.point(0), &[0.0, 1.0]);
        assert_eq!(d.point(1), &[10.0 / 255.0, 20.0 / 255.0]);
        assert_eq!(d.point(2), &[70.0 / 255.0, 80.0 / 255.0]);
        assert!(d.raw_points().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn insufficient_samples() {
        assert!(matches!(prepare(&raw(), &[1, 2], &[3, 1]).unwrap_err(), Error::InsufficientData(_)));
        assert!(matches!(prepare(&raw(), &[1, 2], &[0, 1]).unwrap_err(), Error::InsufficientData(_)));
        assert!(matches!(prepare(&raw(), &[], &[]).unwrap_err(), Error::InsufficientData(_)));
    }

    #[test]
    fn needs_labels() {
        let r = RawDataset::new(vec![1.0, 2.0], 1, None).unwrap();
        assert!(matches!(prepare(&r, &[1], &[1]).unwrap_err(), Error::MissingLabels));
    }
}
