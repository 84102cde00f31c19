//! Ingestion, validation, and synthesis of recording-level datasets grouped
//! by subject.
//!
//! A dataset is a list of voice-recording rows. Each row carries a subject
//! identifier, 26 acoustic features, and a binary class label (1 = PWP,
//! 0 = healthy). All recordings of a subject share one label; evaluation
//! later aggregates per subject, so subject identity is the grouping key
//! for every train/validation split.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Number of acoustic features per recording.
pub const FEATURE_COUNT: usize = 26;

/// Reference statistics for one feature: canonical column name, display
/// label, and the mean / standard deviation / min / max of the reference
/// corpus the ranges were taken from.
#[derive(Debug, Clone, Copy)]
pub struct FeatureInfo {
    pub name: &'static str,
    pub label: &'static str,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// The 26 features in canonical order, with reference-corpus statistics.
pub const FEATURES: [FeatureInfo; FEATURE_COUNT] = [
    FeatureInfo { name: "jitter_local", label: "Jitter (local)", mean: 2.68, std: 1.78, min: 0.19, max: 14.38 },
    FeatureInfo { name: "jitter_local_absolute", label: "Jitter (local, absolute)", mean: 0.0002, std: 0.0001, min: 0.000006, max: 0.0008 },
    FeatureInfo { name: "jitter_rap", label: "Jitter (rap)", mean: 1.25, std: 0.98, min: 0.06, max: 8.02 },
    FeatureInfo { name: "jitter_ppq5", label: "Jitter (ppq5)", mean: 1.35, std: 1.14, min: 0.08, max: 13.54 },
    FeatureInfo { name: "jitter_ddp", label: "Jitter (ddp)", mean: 3.74, std: 2.94, min: 0.19, max: 24.05 },
    FeatureInfo { name: "shimmer_local", label: "Shimmer (local)", mean: 12.92, std: 5.45, min: 1.19, max: 41.14 },
    FeatureInfo { name: "shimmer_local_db", label: "Shimmer (local, dB)", mean: 1.19, std: 0.42, min: 0.10, max: 2.72 },
    FeatureInfo { name: "shimmer_apq3", label: "Shimmer (apq3)", mean: 5.70, std: 3.02, min: 0.50, max: 25.82 },
    FeatureInfo { name: "shimmer_apq5", label: "Shimmer (apq5)", mean: 7.98, std: 4.84, min: 0.71, max: 72.86 },
    FeatureInfo { name: "shimmer_apq11", label: "Shimmer (apq11)", mean: 12.21, std: 6.02, min: 0.52, max: 44.76 },
    FeatureInfo { name: "shimmer_dda", label: "Shimmer (dda)", mean: 17.10, std: 9.05, min: 1.49, max: 77.46 },
    FeatureInfo { name: "autocorrelation", label: "Autocorrelation", mean: 0.85, std: 0.09, min: 0.54, max: 0.99 },
    FeatureInfo { name: "noise_to_harmonic", label: "Noise-to-Harmonic", mean: 0.23, std: 0.15, min: 0.002, max: 0.87 },
    FeatureInfo { name: "harmonic_to_noise", label: "Harmonic-to-Noise", mean: 9.99, std: 4.29, min: 0.70, max: 28.42 },
    FeatureInfo { name: "median_pitch", label: "Median pitch", mean: 163.37, std: 56.02, min: 81.46, max: 468.62 },
    FeatureInfo { name: "mean_pitch", label: "Mean pitch", mean: 168.73, std: 55.97, min: 82.36, max: 470.46 },
    FeatureInfo { name: "std_dev_pitch", label: "Standard dev. of pitch", mean: 27.55, std: 36.67, min: 0.53, max: 293.88 },
    FeatureInfo { name: "min_pitch", label: "Minimum pitch", mean: 134.54, std: 47.06, min: 67.96, max: 452.08 },
    FeatureInfo { name: "max_pitch", label: "Maximum pitch", mean: 234.86, std: 121.54, min: 85.54, max: 597.97 },
    FeatureInfo { name: "number_of_pulses", label: "Number of pulses", mean: 109.74, std: 150.03, min: 0.0, max: 1490.0 },
    FeatureInfo { name: "number_of_periods", label: "Number of periods", mean: 105.97, std: 149.42, min: 0.0, max: 1489.0 },
    FeatureInfo { name: "mean_period", label: "Mean period", mean: 0.007, std: 0.002, min: 0.002, max: 0.01 },
    FeatureInfo { name: "std_dev_period", label: "Standard dev. of period", mean: 0.001, std: 0.001, min: 0.0001, max: 0.01 },
    FeatureInfo { name: "fraction_unvoiced_frames", label: "Fraction of unvoiced frames", mean: 27.68, std: 20.98, min: 0.0, max: 88.16 },
    FeatureInfo { name: "number_of_voice_breaks", label: "Number of voice breaks", mean: 1.13, std: 1.61, min: 0.0, max: 12.0 },
    FeatureInfo { name: "degree_voice_breaks", label: "Degree of voice breaks", mean: 12.37, std: 15.16, min: 0.0, max: 69.12 },
];

/// Canonical feature names in order.
pub fn feature_names() -> Vec<String> {
    FEATURES.iter().map(|f| f.name.to_string()).collect()
}

/// Index of a feature by canonical name.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURES.iter().position(|f| f.name == name)
}

/// Opaque subject identifier. Compares and hashes by value; the original
/// file spelling is preserved for reports.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubjectId(String);

impl SubjectId {
    pub fn new(id: impl Into<String>) -> Self {
        SubjectId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SubjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SubjectId {
    fn from(s: &str) -> Self {
        SubjectId(s.to_string())
    }
}

/// One voice recording: subject, per-subject recording index, 26 features,
/// binary label (1 = PWP).
#[derive(Debug, Clone)]
pub struct RecordingRow {
    pub subject_id: SubjectId,
    pub recording_index: usize,
    pub features: Vec<f64>,
    pub label: u8,
}

/// An immutable recording-level dataset.
///
/// Construction validates that every row has exactly [`FEATURE_COUNT`]
/// finite features, labels are binary, and each subject carries a single
/// label across all of its rows. Row order is preserved from the source.
#[derive(Debug, Clone)]
pub struct Dataset {
    rows: Vec<RecordingRow>,
    feature_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset, enforcing the structural invariants.
    pub fn new(rows: Vec<RecordingRow>, feature_names: Vec<String>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Integrity("dataset has no rows".into()));
        }
        if feature_names.len() != FEATURE_COUNT {
            return Err(Error::Schema(format!(
                "expected {} feature names, got {}",
                FEATURE_COUNT,
                feature_names.len()
            )));
        }
        let mut label_of: HashMap<&SubjectId, u8> = HashMap::new();
        for (i, row) in rows.iter().enumerate() {
            if row.features.len() != FEATURE_COUNT {
                return Err(Error::Integrity(format!(
                    "row {} has {} features, expected {}",
                    i,
                    row.features.len(),
                    FEATURE_COUNT
                )));
            }
            if let Some(bad) = row.features.iter().position(|v| !v.is_finite()) {
                return Err(Error::Integrity(format!(
                    "row {} feature {} is not finite",
                    i, bad
                )));
            }
            if row.label > 1 {
                return Err(Error::Integrity(format!(
                    "row {} label {} is not binary",
                    i, row.label
                )));
            }
            match label_of.get(&row.subject_id) {
                Some(&l) if l != row.label => {
                    return Err(Error::Integrity(format!(
                        "subject {} appears with labels {} and {}",
                        row.subject_id, l, row.label
                    )));
                }
                Some(_) => {}
                None => {
                    label_of.insert(&row.subject_id, row.label);
                }
            }
        }
        Ok(Dataset {
            rows,
            feature_names,
        })
    }

    pub fn rows(&self) -> &[RecordingRow] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_features(&self) -> usize {
        FEATURE_COUNT
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Distinct subjects with their labels, in first-appearance order.
    pub fn subjects(&self) -> Vec<(SubjectId, u8)> {
        let mut seen: HashMap<&SubjectId, ()> = HashMap::new();
        let mut out = Vec::new();
        for row in &self.rows {
            if seen.insert(&row.subject_id, ()).is_none() {
                out.push((row.subject_id.clone(), row.label));
            }
        }
        out
    }

    /// Subject count per class: (healthy, pwp).
    pub fn class_counts(&self) -> (usize, usize) {
        let subjects = self.subjects();
        let pwp = subjects.iter().filter(|(_, l)| *l == 1).count();
        (subjects.len() - pwp, pwp)
    }

    /// N×26 feature matrix in row order.
    pub fn feature_matrix(&self) -> Array2<f64> {
        let mut m = Array2::zeros((self.rows.len(), FEATURE_COUNT));
        for (i, row) in self.rows.iter().enumerate() {
            for (j, &v) in row.features.iter().enumerate() {
                m[[i, j]] = v;
            }
        }
        m
    }

    /// Row labels as 0.0/1.0, aligned with the feature matrix.
    pub fn label_vector(&self) -> Array1<f64> {
        Array1::from_iter(self.rows.iter().map(|r| r.label as f64))
    }

    /// Row labels as integers.
    pub fn labels(&self) -> Vec<u8> {
        self.rows.iter().map(|r| r.label).collect()
    }

    /// Per-row subject ids, aligned with the feature matrix.
    pub fn row_subjects(&self) -> Vec<SubjectId> {
        self.rows.iter().map(|r| r.subject_id.clone()).collect()
    }

    /// Writes the canonical layout: header `subject_id,class,<feature names>`,
    /// one row per recording, full-precision floats.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        write!(w, "subject_id,class")?;
        for name in &self.feature_names {
            write!(w, ",{}", name)?;
        }
        writeln!(w)?;
        for row in &self.rows {
            write!(w, "{},{}", row.subject_id, row.label)?;
            for v in &row.features {
                // {:?} prints the shortest representation that round-trips f64.
                write!(w, ",{:?}", v)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Canonical CSV as a string.
    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}

/// Column layout of a delimited text file.
///
/// Columns are referenced by 0-based position. Any column not referenced is
/// ignored, which is how incidental columns (such as a clinical score next
/// to the class label) are dropped. Subject identity comes either from an
/// explicit id column or, for id-less files, from fixed-size row blocks via
/// `rows_per_subject`.
#[derive(Debug, Clone)]
pub struct ColumnSchema {
    pub delimiter: u8,
    pub has_header: bool,
    pub subject_col: Option<usize>,
    pub rows_per_subject: Option<usize>,
    pub feature_cols: Vec<usize>,
    pub class_col: usize,
}

impl ColumnSchema {
    /// Layout of the UCI Parkinson speech training file: subject id in
    /// column 0, features in columns 1–26, UPDRS in column 27 (ignored),
    /// class in column 28, no header.
    pub fn uci() -> Self {
        ColumnSchema {
            delimiter: b',',
            has_header: false,
            subject_col: Some(0),
            rows_per_subject: None,
            feature_cols: (1..=FEATURE_COUNT).collect(),
            class_col: 28,
        }
    }

    /// Layout produced by [`Dataset::write_csv`]: header row, subject id in
    /// column 0, class in column 1, features in columns 2–27.
    pub fn canonical() -> Self {
        ColumnSchema {
            delimiter: b',',
            has_header: true,
            subject_col: Some(0),
            rows_per_subject: None,
            feature_cols: (2..2 + FEATURE_COUNT).collect(),
            class_col: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.feature_cols.len() != FEATURE_COUNT {
            return Err(Error::Schema(format!(
                "schema lists {} feature columns, expected {}",
                self.feature_cols.len(),
                FEATURE_COUNT
            )));
        }
        if self.subject_col.is_none() && self.rows_per_subject.is_none() {
            return Err(Error::Schema(
                "schema needs a subject id column or rows_per_subject".into(),
            ));
        }
        if let Some(0) = self.rows_per_subject {
            return Err(Error::Schema("rows_per_subject must be positive".into()));
        }
        Ok(())
    }

    fn max_col(&self) -> usize {
        let mut m = self.class_col;
        if let Some(c) = self.subject_col {
            m = m.max(c);
        }
        for &c in &self.feature_cols {
            m = m.max(c);
        }
        m
    }
}

/// Loads a dataset from a delimited text file.
pub fn load_csv(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| {
        Error::Schema(format!("cannot open {}: {}", path.display(), e))
    })?;
    read_csv(file, schema)
}

/// Loads a dataset from any reader (used for in-memory CSV text).
pub fn read_csv<R: Read>(reader: R, schema: &ColumnSchema) -> Result<Dataset> {
    schema.validate()?;
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let header: Option<Vec<String>> = if schema.has_header {
        Some(
            rdr.headers()
                .map_err(|e| Error::Schema(format!("cannot read header: {}", e)))?
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
    } else {
        None
    };

    let need = schema.max_col();
    let mut rows: Vec<RecordingRow> = Vec::new();
    let mut recording_counter: HashMap<SubjectId, usize> = HashMap::new();

    for (data_row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Parse {
            row: data_row,
            col: 0,
            msg: e.to_string(),
        })?;
        if record.len() == 1 && record[0].is_empty() {
            continue; // blank line
        }
        if record.len() <= need {
            let missing = describe_column(need, schema, header.as_deref());
            return Err(Error::Schema(format!(
                "row {} has {} columns but the schema references column {}",
                data_row,
                record.len(),
                missing
            )));
        }

        let parse_cell = |col: usize| -> Result<f64> {
            let cell = &record[col];
            cell.parse::<f64>().map_err(|_| Error::Parse {
                row: data_row,
                col,
                msg: format!("not a number: {:?}", cell),
            })
        };

        let subject_id = match (schema.subject_col, schema.rows_per_subject) {
            (Some(c), _) => SubjectId::new(record[c].to_string()),
            (None, Some(m)) => SubjectId::new(format!("s{:03}", data_row / m + 1)),
            (None, None) => unreachable!("validated above"),
        };

        let mut features = Vec::with_capacity(FEATURE_COUNT);
        for &c in &schema.feature_cols {
            let v = parse_cell(c)?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    row: data_row,
                    col: c,
                    msg: "non-finite value".into(),
                });
            }
            features.push(v);
        }

        let class_val = parse_cell(schema.class_col)?;
        let label = if class_val == 0.0 {
            0
        } else if class_val == 1.0 {
            1
        } else {
            return Err(Error::Parse {
                row: data_row,
                col: schema.class_col,
                msg: format!("class must be 0 or 1, got {}", class_val),
            });
        };

        let idx = recording_counter.entry(subject_id.clone()).or_insert(0);
        let recording_index = *idx;
        *idx += 1;

        rows.push(RecordingRow {
            subject_id,
            recording_index,
            features,
            label,
        });
    }

    if rows.is_empty() {
        return Err(Error::Parse {
            row: 0,
            col: 0,
            msg: "file contains no data rows".into(),
        });
    }

    let names = match &header {
        Some(h) => schema
            .feature_cols
            .iter()
            .map(|&c| h.get(c).cloned().unwrap_or_else(|| format!("col{}", c)))
            .collect(),
        None => feature_names(),
    };

    Dataset::new(rows, names)
}

fn describe_column(col: usize, schema: &ColumnSchema, header: Option<&[String]>) -> String {
    let role = if Some(col) == schema.subject_col {
        "subject id"
    } else if col == schema.class_col {
        "class"
    } else if schema.feature_cols.contains(&col) {
        "feature"
    } else {
        "referenced"
    };
    match header.and_then(|h| h.get(col)) {
        Some(name) => format!("{} ({} {:?})", col, role, name),
        None => format!("{} ({})", col, role),
    }
}

/// Observed statistics and range warnings for one feature.
#[derive(Debug, Clone)]
pub struct FeatureReport {
    pub index: usize,
    pub name: String,
    pub observed_mean: f64,
    pub observed_std: f64,
    pub observed_min: f64,
    pub observed_max: f64,
    pub reference: FeatureInfo,
    /// Count of values below the reference minimum.
    pub below_min: usize,
    /// Count of values above the reference maximum.
    pub above_max: usize,
}

impl FeatureReport {
    pub fn warning_count(&self) -> usize {
        self.below_min + self.above_max
    }
}

/// Per-feature range check against the reference statistics table.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub per_feature: Vec<FeatureReport>,
}

impl ValidationReport {
    pub fn warning_count(&self) -> usize {
        self.per_feature.iter().map(|f| f.warning_count()).sum()
    }

    /// Human-readable table: one line per feature with observed vs reference
    /// statistics and out-of-range counts.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "{:<26} {:>12} {:>12} {:>12} {:>12} {:>7} {:>7}\n",
            "feature", "mean", "std", "ref_mean", "ref_std", "below", "above"
        ));
        for f in &self.per_feature {
            s.push_str(&format!(
                "{:<26} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>7} {:>7}\n",
                f.name,
                f.observed_mean,
                f.observed_std,
                f.reference.mean,
                f.reference.std,
                f.below_min,
                f.above_max
            ));
        }
        s.push_str(&format!("total range warnings: {}\n", self.warning_count()));
        s
    }
}

/// Checks every feature against the reference [MIN, MAX] ranges and reports
/// observed mean/std for comparison. Values outside the range are warnings,
/// not errors: the reference statistics describe one specific corpus.
pub fn validate_ranges(d: &Dataset) -> ValidationReport {
    let n = d.n_rows() as f64;
    let per_feature = (0..FEATURE_COUNT)
        .map(|j| {
            let mut sum = 0.0;
            let mut min = f64::INFINITY;
            let mut max = f64::NEG_INFINITY;
            let mut below = 0;
            let mut above = 0;
            let info = FEATURES[j];
            for row in d.rows() {
                let v = row.features[j];
                sum += v;
                min = min.min(v);
                max = max.max(v);
                if v < info.min {
                    below += 1;
                }
                if v > info.max {
                    above += 1;
                }
            }
            let mean = sum / n;
            let var = d
                .rows()
                .iter()
                .map(|r| (r.features[j] - mean).powi(2))
                .sum::<f64>()
                / n;
            FeatureReport {
                index: j,
                name: d.feature_names()[j].clone(),
                observed_mean: mean,
                observed_std: var.sqrt(),
                observed_min: min,
                observed_max: max,
                reference: info,
                below_min: below,
                above_max: above,
            }
        })
        .collect();
    ValidationReport { per_feature }
}

/// Parameters for synthetic dataset generation.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub seed: u64,
    pub n_subjects_per_class: usize,
    pub n_recordings: usize,
    /// Features whose class means differ.
    pub informative: Vec<usize>,
    /// Mean shift between classes on informative features.
    pub effect_size: f64,
}

/// Standard deviation of the per-subject random intercept; recordings within
/// a subject share it, so they correlate.
const SUBJECT_SD: f64 = 0.7;

/// Generates a deterministic synthetic dataset.
///
/// Informative features get a mean shift of `effect_size` between classes
/// (healthy centered at 0, PWP at `effect_size`); all other features are
/// class-independent noise. Every (subject, feature) pair draws a shared
/// random intercept so a subject's recordings correlate. Identical arguments
/// produce byte-identical datasets.
pub fn synthesize(spec: &SynthSpec) -> Result<Dataset> {
    if spec.n_subjects_per_class < 2 {
        return Err(Error::Invalid(
            "n_subjects_per_class must be at least 2".into(),
        ));
    }
    if spec.n_recordings == 0 {
        return Err(Error::Invalid("n_recordings must be positive".into()));
    }
    if let Some(&bad) = spec.informative.iter().find(|&&j| j >= FEATURE_COUNT) {
        return Err(Error::Invalid(format!(
            "informative feature index {} out of range",
            bad
        )));
    }
    if !(spec.effect_size >= 0.0) {
        return Err(Error::Invalid("effect_size must be non-negative".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut rows = Vec::with_capacity(2 * spec.n_subjects_per_class * spec.n_recordings);
    let mut informative = [false; FEATURE_COUNT];
    for &j in &spec.informative {
        informative[j] = true;
    }

    for class in 0..2u8 {
        for s in 0..spec.n_subjects_per_class {
            let subject_id = SubjectId::new(format!("c{}s{:03}", class, s + 1));
            let mut intercepts = [0.0f64; FEATURE_COUNT];
            for it in intercepts.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                *it = SUBJECT_SD * z;
            }
            for r in 0..spec.n_recordings {
                let mut features = Vec::with_capacity(FEATURE_COUNT);
                for j in 0..FEATURE_COUNT {
                    let shift = if informative[j] && class == 1 {
                        spec.effect_size
                    } else {
                        0.0
                    };
                    let noise: f64 = rng.sample(StandardNormal);
                    features.push(shift + intercepts[j] + noise);
                }
                rows.push(RecordingRow {
                    subject_id: subject_id.clone(),
                    recording_index: r,
                    features,
                    label: class,
                });
            }
        }
    }

    Dataset::new(rows, feature_names())
}
