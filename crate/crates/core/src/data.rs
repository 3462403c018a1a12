//! Labelled datasets: CSV loading, standardization, class balancing and
//! train/test splitting.

use std::path::Path;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, RngSeed};

/// Feature matrix with ±1 labels and a log of the transforms applied.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DenseMatrix,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub provenance: Vec<String>,
}

impl Dataset {
    pub fn new(x: DenseMatrix, y: Vec<f64>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::dims("dataset labels", x.rows(), y.len()));
        }
        if y.iter().any(|&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidConfig("labels must be +1 or -1".into()));
        }
        let feature_names = (0..x.cols()).map(|j| format!("x{j}")).collect();
        Ok(Self {
            x,
            y,
            feature_names,
            provenance: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn features(&self) -> usize {
        self.x.cols()
    }

    /// `(positives, negatives)`
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.y.iter().filter(|&&v| v > 0.0).count();
        (pos, self.len() - pos)
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        Self {
            x: self.x.select_rows(indices),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            feature_names: self.feature_names.clone(),
            provenance: self.provenance.clone(),
        }
    }

    fn with_step(mut self, step: String) -> Self {
        self.provenance.push(step);
        self
    }
}

fn label_matches(cell: &str, positive: &str) -> bool {
    let (cell, positive) = (cell.trim(), positive.trim());
    if cell == positive {
        return true;
    }
    matches!((cell.parse::<f64>(), positive.parse::<f64>()), (Ok(a), Ok(b)) if a == b)
}

/// Reads a headed, comma-separated file. Rows whose `label_column` cell
/// equals `positive` (as text, or numerically) become +1, all others −1.
/// Every other column is a numeric feature.
pub fn load_csv(path: &Path, label_column: &str, positive: &str) -> Result<Dataset> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers()?.clone();
    let label_idx = headers
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| Error::MissingColumn {
            path: path.to_path_buf(),
            column: label_column.to_string(),
        })?;
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != label_idx)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // 1-based line number in the file, counting the header
        let row = i + 2;
        for (j, cell) in record.iter().enumerate() {
            if j == label_idx {
                labels.push(if label_matches(cell, positive) { 1.0 } else { -1.0 });
                continue;
            }
            let parse_error = |message: String| Error::Parse {
                path: path.to_path_buf(),
                row,
                column: headers.get(j).unwrap_or_default().to_string(),
                message,
            };
            let v: f64 = cell
                .parse()
                .map_err(|_| parse_error(format!("'{cell}' is not a number")))?;
            if !v.is_finite() {
                return Err(parse_error(format!("'{cell}' is not finite")));
            }
            values.push(v);
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptyInput("csv dataset"));
    }
    let x = DenseMatrix::new(labels.len(), feature_names.len(), values)?;
    let mut data = Dataset::new(x, labels)?;
    data.feature_names = feature_names;
    let note = format!(
        "loaded {} ({} rows); label '{label_column}' == '{positive}' -> +1, else -1",
        path.display(),
        data.len()
    );
    Ok(data.with_step(note))
}

/// Per-feature mean and population standard deviation.
pub fn column_stats(x: &DenseMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = x.rows() as f64;
    let mut mean = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        for (m, v) in mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; x.cols()];
    for i in 0..x.rows() {
        for ((s, v), m) in var.iter_mut().zip(x.row(i)).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    (mean, var.into_iter().map(|s| (s / n).sqrt()).collect())
}

/// Z-scores both sets with the training mean and population standard
/// deviation. Zero-variance features become 0.
pub fn standardize(train: &Dataset, test: &Dataset) -> Result<(Dataset, Dataset)> {
    if train.is_empty() {
        return Err(Error::EmptyInput("standardize"));
    }
    if test.features() != train.features() {
        return Err(Error::dims("standardize test features", train.features(), test.features()));
    }
    let (mean, std) = column_stats(&train.x);
    let apply = |d: &Dataset| {
        let x = DenseMatrix::from_fn(d.x.rows(), d.x.cols(), |i, j| {
            if std[j] > 0.0 {
                (d.x.get(i, j) - mean[j]) / std[j]
            } else {
                0.0
            }
        });
        Dataset { x, ..d.clone() }.with_step("standardized with training mean and population std".into())
    };
    Ok((apply(train), apply(test)))
}

/// Keeps every minority row and a seeded sample without replacement of the
/// majority class of the same size. Rows keep their original order.
pub fn undersample_majority(data: &Dataset, seed: RngSeed) -> Result<Dataset> {
    let (pos, neg) = data.class_counts();
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let minority_label = if pos <= neg { 1.0 } else { -1.0 };
    let (minority, majority): (Vec<usize>, Vec<usize>) =
        (0..data.len()).partition(|&i| data.y[i] == minority_label);
    let mut rng = seed.rng();
    let picked = index::sample(&mut rng, majority.len(), minority.len());
    let mut keep: Vec<usize> = minority;
    keep.extend(picked.iter().map(|k| majority[k]));
    keep.sort_unstable();
    let n = keep.len() / 2;
    Ok(data
        .subset(&keep)
        .with_step(format!("undersampled majority class to {n} rows per class (seed {})", seed.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub seed: RngSeed,
    pub shuffle: bool,
}

impl SplitSpec {
    pub fn new(test_fraction: f64, seed: RngSeed) -> Self {
        Self {
            test_fraction,
            seed,
            shuffle: true,
        }
    }

    /// `round(n · fraction)` with halves rounded up.
    pub fn test_size(&self, n: usize) -> usize {
        // the small offset keeps products like 25 · 0.3 from rounding down
        ((n as f64 * self.test_fraction + 0.5 + 1e-9).floor() as usize).min(n)
    }
}

/// `(train, test)` row indices. With shuffling, the test rows are the first
/// `test_size` entries of a seeded permutation; without, the last rows.
pub fn split_indices(n: usize, spec: &SplitSpec) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "test fraction must be in (0, 1), got {}",
            spec.test_fraction
        )));
    }
    if n < 2 {
        return Err(Error::EmptyInput("train/test split (needs >= 2 rows)"));
    }
    let k = spec.test_size(n);
    let mut order: Vec<usize> = (0..n).collect();
    if spec.shuffle {
        order.shuffle(&mut spec.seed.rng());
        let train = order.split_off(k);
        Ok((train, order))
    } else {
        let test = order.split_off(n - k);
        Ok((order, test))
    }
}

pub fn train_test_split(data: &Dataset, spec: &SplitSpec) -> Result<(Dataset, Dataset)> {
    let (train_idx, test_idx) = split_indices(data.len(), spec)?;
    let note = format!(
        "split {} train / {} test (fraction {}, seed {})",
        train_idx.len(),
        test_idx.len(),
        spec.test_fraction,
        spec.seed.0
    );
    Ok((
        data.subset(&train_idx).with_step(format!("{note}: train part")),
        data.subset(&test_idx).with_step(format!("{note}: test part")),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(x: &[f64], y: &[f64]) -> Dataset {
        Dataset::new(DenseMatrix::new(x.len(), 1, x.to_vec()).unwrap(), y.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_labels() {
        assert!(Dataset::new(DenseMatrix::zeros(2, 1), vec![1.0, 0.0]).is_err());
        assert!(Dataset::new(DenseMatrix::zeros(2, 1), vec![1.0]).is_err());
    }

    #[test]
    fn standardize_examples() {
        let train = toy(&[0.0, 2.0], &[1.0, -1.0]);
        let (t, _) = standardize(&train, &train).unwrap();
        assert_eq!(t.x.as_slice(), &[-1.0, 1.0]);
        let constant = toy(&[3.0, 3.0, 3.0], &[1.0, -1.0, 1.0]);
        let (t, s) = standardize(&constant, &toy(&[5.0], &[1.0])).unwrap();
        assert!(t.x.as_slice().iter().chain(s.x.as_slice()).all(|&v| v == 0.0));
    }

    #[test]
    fn split_rounding() {
        let spec = SplitSpec::new(0.3, RngSeed(1));
        assert_eq!(spec.test_size(10), 3);
        assert_eq!(spec.test_size(25), 8);
        assert_eq!(SplitSpec::new(0.5, RngSeed(1)).test_size(5), 3);
        let (train, test) = split_indices(10, &spec).unwrap();
        assert_eq!((train.len(), test.len()), (7, 3));
    }

    #[test]
    fn undersample_needs_two_classes() {
        assert!(matches!(
            undersample_majority(&toy(&[1.0, 2.0], &[1.0, 1.0]), RngSeed(0)),
            Err(Error::SingleClass)
        ));
    }
}
