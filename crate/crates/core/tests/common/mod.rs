#![allow(dead_code)]

use std::fs::File;
use std::path::PathBuf;

use glc_core::{binarize, load_csv, normalize_minmax, BinarizationSpec, Dataset, LabelColumn};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

pub fn raw(name: &str, label: &str) -> Dataset {
    load_csv(File::open(data_path(name)).unwrap(), &LabelColumn::parse(label)).unwrap()
}

pub fn wbc() -> Dataset {
    normalize_minmax(&raw("wbc.csv", "class"))
}

pub fn ionosphere() -> Dataset {
    normalize_minmax(&raw("ionosphere.csv", "class"))
}

pub fn iris() -> Dataset {
    normalize_minmax(&raw("iris.csv", "species"))
}

/// Versicolor against setosa and virginica combined.
pub fn iris2() -> Dataset {
    binarize(&iris(), &BinarizationSpec::new("versicolor", "combined")).unwrap()
}

pub fn dataset(points: Vec<Vec<f64>>, labels: Vec<String>) -> Dataset {
    let n = points[0].len();
    Dataset::new("t", (1..=n).map(|i| format!("x{i}")).collect(), points, labels).unwrap()
}
