//! Loading, validating, and subsampling bivariate data from delimited files.

use std::path::Path;

use crate::error::{Error, Result};
use crate::models::rng::SplitMix64;

/// Paired raw observations (x_k, y_k), the analysis input.
///
/// Immutable after construction; every value is finite and the axes have
/// equal length n >= 2.
#[derive(Debug, Clone)]
pub struct BivariateSample {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub n: usize,
    pub labels: Option<(String, String)>,
}

impl BivariateSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>, labels: Option<(String, String)>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Internal(format!(
                "axis lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        let n = x.len();
        if n < 2 {
            return Err(Error::TooFewRows { min: 2, got: n });
        }
        for (row, &v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    row,
                    column: "x".to_string(),
                });
            }
        }
        for (row, &v) in y.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue {
                    row,
                    column: "y".to_string(),
                });
            }
        }
        Ok(BivariateSample { x, y, n, labels })
    }

    pub fn x_label(&self) -> &str {
        self.labels.as_ref().map(|(x, _)| x.as_str()).unwrap_or("x")
    }

    pub fn y_label(&self) -> &str {
        self.labels.as_ref().map(|(_, y)| y.as_str()).unwrap_or("y")
    }
}

/// Column selector: by header name or by zero-based position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSel {
    Name(String),
    Index(usize),
}

impl ColumnSel {
    /// Accepts a bare integer as an index, anything else as a name.
    pub fn parse(s: &str) -> ColumnSel {
        match s.parse::<usize>() {
            Ok(i) => ColumnSel::Index(i),
            Err(_) => ColumnSel::Name(s.to_string()),
        }
    }

    fn display(&self) -> String {
        match self {
            ColumnSel::Name(n) => n.clone(),
            ColumnSel::Index(i) => format!("#{i}"),
        }
    }
}

/// What to do with rows whose selected cells are missing or non-numeric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NaPolicy {
    DropRow,
    Error,
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub delimiter: u8,
    pub has_header: bool,
    pub x_column: ColumnSel,
    pub y_column: ColumnSel,
    pub na_policy: NaPolicy,
    /// Cap on sample size; larger files are subsampled with `seed`.
    pub max_n: Option<usize>,
    pub seed: u64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            delimiter: b',',
            has_header: true,
            x_column: ColumnSel::Index(0),
            y_column: ColumnSel::Index(1),
            na_policy: NaPolicy::DropRow,
            max_n: None,
            seed: 0,
        }
    }
}

/// Resolve a selector against the header row. Duplicate names resolve to
/// the first match.
fn resolve_column(sel: &ColumnSel, headers: Option<&csv::StringRecord>) -> Result<usize> {
    match sel {
        ColumnSel::Index(i) => Ok(*i),
        ColumnSel::Name(name) => {
            let headers = headers.ok_or_else(|| Error::ColumnNotFound(name.clone()))?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ColumnNotFound(name.clone()))
        }
    }
}

fn parse_cell(raw: &str) -> Option<f64> {
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return None;
    }
    trimmed.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Load a two-column sample from a delimited file.
///
/// Row order is preserved; rows failing to parse are dropped or rejected
/// per `opts.na_policy`; when `opts.max_n` is hit the rows are subsampled
/// uniformly without replacement using `opts.seed`.
pub fn load_csv(path: impl AsRef<Path>, opts: &IngestOptions) -> Result<BivariateSample> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(opts.delimiter)
        .has_headers(opts.has_header)
        .flexible(true)
        .from_reader(file);

    let headers = if opts.has_header {
        Some(reader.headers()?.clone())
    } else {
        None
    };
    let xi = resolve_column(&opts.x_column, headers.as_ref())?;
    let yi = resolve_column(&opts.y_column, headers.as_ref())?;

    let labels = headers.as_ref().map(|h| {
        (
            h.get(xi).unwrap_or("x").to_string(),
            h.get(yi).unwrap_or("y").to_string(),
        )
    });

    let mut x = Vec::new();
    let mut y = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        let cx = record.get(xi);
        let cy = record.get(yi);
        let (px, py) = (cx.and_then(parse_cell), cy.and_then(parse_cell));
        match (px, py) {
            (Some(vx), Some(vy)) => {
                x.push(vx);
                y.push(vy);
            }
            _ => match opts.na_policy {
                NaPolicy::DropRow => continue,
                NaPolicy::Error => {
                    let (column, value) = if px.is_none() {
                        (opts.x_column.display(), cx.unwrap_or("").to_string())
                    } else {
                        (opts.y_column.display(), cy.unwrap_or("").to_string())
                    };
                    return Err(Error::NonNumericCell {
                        row: row_idx,
                        column,
                        value,
                    });
                }
            },
        }
    }

    if x.len() < 2 {
        return Err(Error::TooFewRows { min: 2, got: x.len() });
    }

    let sample = BivariateSample::new(x, y, labels)?;
    match opts.max_n {
        Some(cap) if sample.n > cap => subsample(&sample, cap, opts.seed),
        _ => Ok(sample),
    }
}

/// Uniform without-replacement subsample of size `n`, deterministic in
/// `seed`. Selected pairs keep their original relative order.
pub fn subsample(s: &BivariateSample, n: usize, seed: u64) -> Result<BivariateSample> {
    if n < 2 || n > s.n {
        return Err(Error::SubsampleOutOfRange {
            requested: n,
            available: s.n,
        });
    }
    // Fisher-Yates prefix on the index array, then sort the chosen
    // indices so output order follows input order.
    let mut rng = SplitMix64::new(seed);
    let mut idx: Vec<usize> = (0..s.n).collect();
    for i in 0..n {
        let j = i + rng.below((s.n - i) as u64) as usize;
        idx.swap(i, j);
    }
    let mut chosen = idx[..n].to_vec();
    chosen.sort_unstable();
    let x = chosen.iter().map(|&k| s.x[k]).collect();
    let y = chosen.iter().map(|&k| s.y[k]).collect();
    BivariateSample::new(x, y, s.labels.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(contents: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir();
        let name = format!(
            "dplot-ingest-{}-{}.csv",
            std::process::id(),
            contents.len() as u64 ^ contents.as_bytes().iter().map(|&b| b as u64).sum::<u64>()
        );
        let path = dir.join(name);
        let mut f = std::fs::File::create(&path).unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        path
    }

    #[test]
    fn two_row_parse() {
        let path = write_temp("x,y\n1,2\n3,4\n");
        let s = load_csv(&path, &IngestOptions::default()).unwrap();
        assert_eq!(s.x, vec![1.0, 3.0]);
        assert_eq!(s.y, vec![2.0, 4.0]);
        assert_eq!(s.n, 2);
        assert_eq!(s.labels, Some(("x".to_string(), "y".to_string())));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn drop_row_policy() {
        let path = write_temp("x,y\n1,2\na,5\n3,4\n");
        let s = load_csv(&path, &IngestOptions::default()).unwrap();
        assert_eq!(s.x, vec![1.0, 3.0]);
        assert_eq!(s.y, vec![2.0, 4.0]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn error_policy_names_the_cell() {
        let path = write_temp("x,y\n1,2\na,5\n3,4\n");
        let opts = IngestOptions {
            na_policy: NaPolicy::Error,
            ..IngestOptions::default()
        };
        let err = load_csv(&path, &opts).unwrap_err();
        match err {
            Error::NonNumericCell { row, value, .. } => {
                assert_eq!(row, 1);
                assert_eq!(value, "a");
            }
            other => panic!("unexpected error {other:?}"),
        }
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn columns_by_name_first_match_wins() {
        let path = write_temp("a,b,a\n1,2,9\n3,4,9\n");
        let opts = IngestOptions {
            x_column: ColumnSel::Name("a".to_string()),
            y_column: ColumnSel::Name("b".to_string()),
            ..IngestOptions::default()
        };
        let s = load_csv(&path, &opts).unwrap();
        assert_eq!(s.x, vec![1.0, 3.0]);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn missing_column_errors() {
        let path = write_temp("x,y\n1,2\n3,4\n");
        let opts = IngestOptions {
            x_column: ColumnSel::Name("nope".to_string()),
            ..IngestOptions::default()
        };
        assert!(matches!(
            load_csv(&path, &opts),
            Err(Error::ColumnNotFound(_))
        ));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn too_few_rows() {
        let path = write_temp("x,y\n1,2\n");
        assert!(matches!(
            load_csv(&path, &IngestOptions::default()),
            Err(Error::TooFewRows { .. })
        ));
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn file_not_found() {
        assert!(matches!(
            load_csv("/definitely/not/here.csv", &IngestOptions::default()),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn rejects_inf_and_nan_cells_via_drop() {
        let path = write_temp("x,y\n1,2\ninf,3\nNaN,4\n5,6\n");
        let s = load_csv(&path, &IngestOptions::default()).unwrap();
        assert_eq!(s.x, vec![1.0, 5.0]);
        std::fs::remove_file(path).ok();
    }

    fn big_sample(n: usize) -> BivariateSample {
        let mut rng = SplitMix64::new(99);
        let x: Vec<f64> = (0..n).map(|_| rng.next_f64()).collect();
        let y: Vec<f64> = x.iter().map(|&v| v * 2.0 + rng.next_f64()).collect();
        BivariateSample::new(x, y, None).unwrap()
    }

    #[test]
    fn subsample_identity() {
        let s = big_sample(50);
        let t = subsample(&s, 50, 7).unwrap();
        assert_eq!(t.x, s.x);
        assert_eq!(t.y, s.y);
    }

    #[test]
    fn subsample_is_deterministic_and_paired() {
        let s = big_sample(10_000);
        let a = subsample(&s, 1000, 42).unwrap();
        let b = subsample(&s, 1000, 42).unwrap();
        assert_eq!(a.x, b.x);
        assert_eq!(a.y, b.y);
        // every output pair appears as a pair in the input
        use std::collections::HashSet;
        let pairs: HashSet<(u64, u64)> = s
            .x
            .iter()
            .zip(&s.y)
            .map(|(&x, &y)| (x.to_bits(), y.to_bits()))
            .collect();
        for (&x, &y) in a.x.iter().zip(&a.y) {
            assert!(pairs.contains(&(x.to_bits(), y.to_bits())));
        }
    }

    #[test]
    fn different_seeds_differ() {
        let s = big_sample(10_000);
        let a = subsample(&s, 1000, 1).unwrap();
        let b = subsample(&s, 1000, 2).unwrap();
        assert_ne!(a.x, b.x);
    }

    #[test]
    fn subsample_range_checks() {
        let s = big_sample(10);
        assert!(subsample(&s, 1, 0).is_err());
        assert!(subsample(&s, 11, 0).is_err());
    }
}
