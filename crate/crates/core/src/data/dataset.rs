use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::variable::{SpecSet, Variable, N_VARIABLES};
use crate::error::{Error, Result};
use crate::rng::{rng_for, Stream};

pub const CSV_HEADER: &str =
    "dyad_id,year,democracy,allies,contingency,distance,capability,dependency,majorpower,label";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Peace,
    Conflict,
}

impl Label {
    pub fn is_conflict(self) -> bool {
        self == Label::Conflict
    }

    /// +1 for conflict, -1 for peace.
    pub fn sign(self) -> f64 {
        match self {
            Label::Conflict => 1.0,
            Label::Peace => -1.0,
        }
    }

    /// 1 for conflict, 0 for peace.
    pub fn target(self) -> f64 {
        match self {
            Label::Conflict => 1.0,
            Label::Peace => 0.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Conflict => "conflict",
            Label::Peace => "peace",
        }
    }

    pub fn parse(s: &str) -> Option<Label> {
        match s {
            "conflict" => Some(Label::Conflict),
            "peace" => Some(Label::Peace),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One dyad-year.
#[derive(Debug, Clone, PartialEq)]
pub struct DyadRecord {
    pub dyad_id: String,
    pub year: i32,
    pub values: [f64; N_VARIABLES],
    pub label: Label,
}

impl DyadRecord {
    pub fn value(&self, variable: Variable) -> f64 {
        self.values[variable.index()]
    }

    fn key(&self) -> (&str, i32) {
        (&self.dyad_id, self.year)
    }
}

/// Min-max scaling fitted on a training set.
///
/// Canonically bounded variables scale by their fixed bounds; data-derived
/// ones by the training min/max, with out-of-range values clamped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub specs: SpecSet,
}

impl Normalizer {
    pub fn new(specs: SpecSet) -> Result<Self> {
        for s in specs.iter() {
            if !s.is_resolved() {
                return Err(Error::UnresolvedBounds {
                    variable: s.variable.column(),
                });
            }
            if s.canonical_max == s.canonical_min {
                return Err(Error::DegenerateRange {
                    variable: s.variable.column(),
                    value: s.canonical_min,
                });
            }
        }
        Ok(Normalizer { specs })
    }

    pub fn scale(&self, variable: Variable, raw: f64) -> f64 {
        let s = self.specs.get(variable);
        let u = (raw - s.canonical_min) / (s.canonical_max - s.canonical_min);
        if s.is_data_derived() {
            u.clamp(0.0, 1.0)
        } else {
            u
        }
    }

    pub fn unscale(&self, variable: Variable, scaled: f64) -> f64 {
        let s = self.specs.get(variable);
        s.canonical_min + scaled * (s.canonical_max - s.canonical_min)
    }

    pub fn transform(&self, raw: &[f64; N_VARIABLES]) -> [f64; N_VARIABLES] {
        let mut out = [0.0; N_VARIABLES];
        for v in Variable::ALL {
            out[v.index()] = self.scale(v, raw[v.index()]);
        }
        out
    }

    pub fn inverse(&self, scaled: &[f64; N_VARIABLES]) -> [f64; N_VARIABLES] {
        let mut out = [0.0; N_VARIABLES];
        for v in Variable::ALL {
            out[v.index()] = self.unscale(v, scaled[v.index()]);
        }
        out
    }

    /// Applies the fitted transform to a raw dataset (e.g. the test split).
    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        if ds.is_normalized() {
            return Err(Error::AlreadyNormalized);
        }
        let records = ds
            .records
            .iter()
            .map(|r| DyadRecord {
                values: self.transform(&r.values),
                ..r.clone()
            })
            .collect();
        Ok(Dataset {
            records,
            specs: self.specs,
            normalizer: Some(*self),
        })
    }

    pub fn revert(&self, ds: &Dataset) -> Dataset {
        let records = ds
            .records
            .iter()
            .map(|r| DyadRecord {
                values: self.inverse(&r.values),
                ..r.clone()
            })
            .collect();
        Dataset {
            records,
            specs: self.specs,
            normalizer: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    records: Vec<DyadRecord>,
    specs: SpecSet,
    normalizer: Option<Normalizer>,
}

impl Dataset {
    /// Builds a raw (unnormalized) dataset, validating every record.
    pub fn new(records: Vec<DyadRecord>, specs: SpecSet) -> Result<Self> {
        for (i, r) in records.iter().enumerate() {
            validate(r, &specs, i as u64 + 2)?;
        }
        Ok(Dataset {
            records,
            specs,
            normalizer: None,
        })
    }

    pub fn records(&self) -> &[DyadRecord] {
        &self.records
    }

    pub fn specs(&self) -> &SpecSet {
        &self.specs
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalizer.is_some()
    }

    pub fn normalizer(&self) -> Option<&Normalizer> {
        self.normalizer.as_ref()
    }

    /// (conflict, peace) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let conflict = self
            .records
            .iter()
            .filter(|r| r.label.is_conflict())
            .count();
        (conflict, self.records.len() - conflict)
    }

    pub fn labels(&self) -> Vec<Label> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn features(&self) -> Vec<Vec<f64>> {
        self.records.iter().map(|r| r.values.to_vec()).collect()
    }

    /// Single-column design matrix for one variable.
    pub fn feature_column(&self, variable: Variable) -> Vec<Vec<f64>> {
        self.records
            .iter()
            .map(|r| vec![r.value(variable)])
            .collect()
    }

    /// Resolves data-derived bounds from this dataset's own values.
    pub fn with_data_bounds(&self) -> Result<Dataset> {
        if self.is_normalized() {
            return Err(Error::AlreadyNormalized);
        }
        let specs = self
            .specs
            .with_data_bounds(self.records.iter().map(|r| &r.values))?;
        Ok(Dataset {
            records: self.records.clone(),
            specs,
            normalizer: None,
        })
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            specs: self.specs,
            normalizer: self.normalizer,
        }
    }

    /// Serializes to the canonical CSV form.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(64 * (self.records.len() + 1));
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = write!(out, "{},{}", r.dyad_id, r.year);
            for v in r.values {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{}", r.label);
        }
        out
    }
}

fn validate(r: &DyadRecord, specs: &SpecSet, line: u64) -> Result<()> {
    for spec in specs.iter() {
        let value = r.value(spec.variable);
        spec.check(value).map_err(|reason| Error::Validation {
            record: format!("{}/{}", r.dyad_id, r.year),
            line,
            variable: spec.variable.column(),
            value,
            reason,
        })?;
    }
    Ok(())
}

/// Reads a dataset CSV. Record order follows the file.
pub fn load_dataset(path: impl AsRef<Path>, specs: SpecSet) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file), specs)
}

pub fn read_dataset<R: Read>(reader: R, specs: SpecSet) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut rows = rdr.records();

    let header = match rows.next() {
        None => return Err(Error::EmptyDataset),
        Some(h) => h.map_err(|e| csv_error(e, 1))?,
    };
    let header_line = header.iter().collect::<Vec<_>>().join(",");
    if header_line != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header `{CSV_HEADER}`"),
        });
    }

    let mut records = Vec::new();
    for row in rows {
        let row = row.map_err(|e| csv_error(e, 0))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        if row.len() != 10 {
            return Err(Error::Parse {
                line,
                message: format!("expected 10 columns, found {}", row.len()),
            });
        }
        let year = row[1].parse::<i32>().map_err(|_| Error::Parse {
            line,
            message: format!("year `{}` is not an integer", &row[1]),
        })?;
        let mut values = [0.0; N_VARIABLES];
        for (j, v) in values.iter_mut().enumerate() {
            let field = &row[2 + j];
            *v = field.parse::<f64>().map_err(|_| Error::Parse {
                line,
                message: format!("{} `{field}` is not numeric", Variable::ALL[j].column()),
            })?;
        }
        let label = Label::parse(&row[9]).ok_or_else(|| Error::Parse {
            line,
            message: format!("label `{}` is neither peace nor conflict", &row[9]),
        })?;
        let record = DyadRecord {
            dyad_id: row[0].to_string(),
            year,
            values,
            label,
        };
        validate(&record, &specs, line)?;
        records.push(record);
    }
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    Ok(Dataset {
        records,
        specs,
        normalizer: None,
    })
}

fn csv_error(e: csv::Error, fallback_line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

pub fn write_dataset(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, ds.to_csv_string()).map_err(|e| Error::io(path, e))
}

/// Fits min-max scaling on `ds` (bounds must already be resolved) and returns
/// the scaled copy, which retains the transform.
pub fn normalize(ds: &Dataset) -> Result<Dataset> {
    if ds.is_normalized() {
        return Err(Error::AlreadyNormalized);
    }
    Normalizer::new(ds.specs)?.apply(ds)
}

/// Resolves data-derived bounds from `train` and normalizes it.
pub fn fit_normalize(train: &Dataset) -> Result<Dataset> {
    normalize(&train.with_data_bounds()?)
}

/// Draws `n_per_class` records of each class without replacement. The test
/// split is everything else; both keep the original record order.
pub fn balanced_sample(ds: &Dataset, n_per_class: usize, seed: u64) -> Result<(Dataset, Dataset)> {
    let (conflict_idx, peace_idx): (Vec<usize>, Vec<usize>) =
        (0..ds.len()).partition(|&i| ds.records[i].label.is_conflict());
    if conflict_idx.len() < n_per_class || peace_idx.len() < n_per_class {
        return Err(Error::InsufficientClass {
            requested: n_per_class,
            conflict: conflict_idx.len(),
            peace: peace_idx.len(),
        });
    }
    let mut rng = rng_for(seed, Stream::Sample);
    let mut chosen = vec![false; ds.len()];
    for pool in [&conflict_idx, &peace_idx] {
        for k in index::sample(&mut rng, pool.len(), n_per_class) {
            chosen[pool[k]] = true;
        }
    }
    let (train, test): (Vec<usize>, Vec<usize>) = (0..ds.len()).partition(|&i| chosen[i]);
    Ok((ds.subset(&train), ds.subset(&test)))
}

/// Checks that no (dyad_id, year) key occurs in both datasets.
pub fn disjoint(a: &Dataset, b: &Dataset) -> bool {
    let keys: HashSet<_> = a.records.iter().map(DyadRecord::key).collect();
    b.records.iter().all(|r| !keys.contains(&r.key()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROW: &str = "ABC-XYZ,1950,6,1,0,3.2,1.1,0.02,1,peace";

    fn parse(body: &str) -> Result<Dataset> {
        let text = format!("{CSV_HEADER}\n{body}");
        read_dataset(text.as_bytes(), SpecSet::default())
    }

    fn record(id: &str, dem: f64, dist: f64, label: Label) -> DyadRecord {
        DyadRecord {
            dyad_id: id.into(),
            year: 1960,
            values: [dem, 0.0, 1.0, dist, 2.0 * dist, dist / 10.0, 0.0],
            label,
        }
    }

    #[test]
    fn parses_example_row() {
        let ds = parse(&format!("{ROW}\n")).unwrap();
        let r = &ds.records()[0];
        assert_eq!(r.dyad_id, "ABC-XYZ");
        assert_eq!(r.year, 1950);
        assert_eq!(r.value(Variable::Democracy), 6.0);
        assert_eq!(r.value(Variable::Dependency), 0.02);
        assert_eq!(r.label, Label::Peace);
        assert!(!ds.is_normalized());
    }

    #[test]
    fn canonical_file_round_trips_byte_identically() {
        let text = format!("{CSV_HEADER}\n{ROW}\nDEF-GHI,1951,-10,0,1,0.5,0,0.125,0,conflict\n");
        let ds = read_dataset(text.as_bytes(), SpecSet::default()).unwrap();
        assert_eq!(ds.to_csv_string(), text);
    }

    #[test]
    fn democracy_out_of_bounds_is_rejected() {
        match parse("A-B,1950,11,1,0,3.2,1.1,0.02,1,peace\n") {
            Err(Error::Validation {
                variable,
                record,
                line,
                ..
            }) => {
                assert_eq!(variable, "democracy");
                assert_eq!(record, "A-B/1950");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn malformed_rows_name_their_line() {
        let err = parse(&format!("{ROW}\nA-B,1950,6,1,0,3.2\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
        let err = parse("A-B,1950,six,1,0,3.2,1.1,0.02,1,peace\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
        let err = parse("A-B,1950,6,0.5,0,3.2,1.1,0.02,1,peace\n").unwrap_err();
        assert!(matches!(
            err,
            Error::Validation {
                variable: "allies",
                ..
            }
        ));
    }

    #[test]
    fn empty_inputs_are_errors() {
        assert!(matches!(parse(""), Err(Error::EmptyDataset)));
        assert!(matches!(
            read_dataset(&b""[..], SpecSet::default()),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn normalize_maps_endpoints() {
        let ds = Dataset::new(
            vec![
                record("a", -10.0, 0.5, Label::Peace),
                record("b", 10.0, 4.5, Label::Conflict),
                record("c", 0.0, 2.5, Label::Peace),
            ],
            SpecSet::default(),
        )
        .unwrap();
        let n = fit_normalize(&ds).unwrap();
        assert!(n.is_normalized());
        let rs = n.records();
        assert_eq!(rs[0].value(Variable::Democracy), 0.0);
        assert_eq!(rs[1].value(Variable::Democracy), 1.0);
        assert_eq!(rs[0].value(Variable::Contingency), 1.0);
        assert_eq!(rs[2].value(Variable::Distance), 0.5);
        assert!(matches!(normalize(&n), Err(Error::AlreadyNormalized)));
    }

    #[test]
    fn normalize_requires_resolved_nondegenerate_bounds() {
        let ds = Dataset::new(
            vec![
                record("a", 0.0, 1.0, Label::Peace),
                record("b", 1.0, 1.0, Label::Peace),
            ],
            SpecSet::default(),
        )
        .unwrap();
        assert!(matches!(
            normalize(&ds),
            Err(Error::UnresolvedBounds { .. })
        ));
        assert!(matches!(
            fit_normalize(&ds),
            Err(Error::DegenerateRange {
                variable: "distance",
                ..
            })
        ));
    }

    #[test]
    fn test_values_outside_training_bounds_are_clamped() {
        let train = Dataset::new(
            vec![
                record("a", 0.0, 1.0, Label::Peace),
                record("b", 1.0, 3.0, Label::Peace),
            ],
            SpecSet::default(),
        )
        .unwrap();
        let norm = *fit_normalize(&train).unwrap().normalizer().unwrap();
        assert_eq!(norm.scale(Variable::Distance, 5.0), 1.0);
        assert_eq!(norm.scale(Variable::Distance, -5.0), 0.0);
        assert_eq!(norm.scale(Variable::Democracy, 5.0), 0.75);
    }

    #[test]
    fn balanced_sample_errors_on_short_class() {
        let ds = Dataset::new(
            (0..3)
                .map(|i| record(&format!("c{i}"), 0.0, 1.0, Label::Conflict))
                .chain((0..10).map(|i| record(&format!("p{i}"), 0.0, 1.0, Label::Peace)))
                .collect(),
            SpecSet::default(),
        )
        .unwrap();
        assert!(matches!(
            balanced_sample(&ds, 5, 1),
            Err(Error::InsufficientClass {
                conflict: 3,
                peace: 10,
                ..
            })
        ));
        let (train, test) = balanced_sample(&ds, 0, 1).unwrap();
        assert!(train.is_empty());
        assert_eq!(test, ds);
    }
}
