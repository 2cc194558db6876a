//! Cumulative-count CSV ingestion in the CSSE global time-series layout:
//! `Province/State,Country/Region,Lat,Long,<M/D/YY>...`.

use std::collections::HashMap;
use std::io::Read;

use crate::error::{Error, Result};
use crate::model::{Dataset, TimeSeries};

const FIXED_COLUMNS: [&str; 4] = ["Province/State", "Country/Region", "Lat", "Long"];

#[derive(Debug, Clone, PartialEq)]
pub struct RegionRow {
    /// `province|country`, both trimmed; the province may be empty.
    pub key: String,
    pub cumulative: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeTable {
    pub dates: Vec<String>,
    pub rows: Vec<RegionRow>,
}

pub fn region_key(province: &str, country: &str) -> String {
    format!("{}|{}", province.trim(), country.trim())
}

pub fn parse_cumulative_csv<R: Read>(reader: R) -> Result<CumulativeTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(|e| csv_error(1, e))?,
        None => {
            return Err(Error::Parse {
                line: 1,
                message: "missing header".into(),
            })
        }
    };
    let fixed_ok = header.len() >= FIXED_COLUMNS.len()
        && header
            .iter()
            .zip(FIXED_COLUMNS)
            .all(|(got, want)| got.trim().trim_start_matches('\u{feff}') == want);
    if !fixed_ok {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "missing header: expected columns starting with {}",
                FIXED_COLUMNS.join(",")
            ),
        });
    }
    let dates: Vec<String> = header.iter().skip(4).map(|d| d.trim().to_string()).collect();
    let width = header.len();

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| csv_error(0, e))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(Error::Parse {
                line,
                message: format!("ragged row: {} fields, header has {width}", rec.len()),
            });
        }
        let cumulative = rec
            .iter()
            .skip(4)
            .enumerate()
            .map(|(j, cell)| parse_count(cell).ok_or_else(|| Error::Parse {
                line,
                message: format!("non-numeric value {cell:?} in column {:?}", dates[j]),
            }))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(RegionRow {
            key: region_key(&rec[0], &rec[1]),
            cumulative,
        });
    }
    Ok(CumulativeTable { dates, rows })
}

fn parse_count(cell: &str) -> Option<f64> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Some(0.0);
    }
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn csv_error(line: u64, e: csv::Error) -> Error {
    let line = e.position().map_or(line, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

impl CumulativeTable {
    /// Keep only the date columns from `start` to `end` inclusive (by label).
    pub fn crop(&self, start: Option<&str>, end: Option<&str>) -> Result<Self> {
        let find = |label: &str| {
            self.dates
                .iter()
                .position(|d| d == label)
                .ok_or_else(|| Error::param(format!("date {label:?} not in table")))
        };
        let lo = start.map(find).transpose()?.unwrap_or(0);
        let hi = match end {
            Some(label) => find(label)?,
            None => self.dates.len().saturating_sub(1),
        };
        if lo > hi {
            return Err(Error::param("crop start is after crop end"));
        }
        Ok(Self {
            dates: self.dates[lo..=hi].to_vec(),
            rows: self
                .rows
                .iter()
                .map(|r| RegionRow {
                    key: r.key.clone(),
                    cumulative: r.cumulative[lo..=hi].to_vec(),
                })
                .collect(),
        })
    }
}

/// `out[t] = cumulative[t+1] - cumulative[t]`; negative values are kept.
pub fn daily_diff(cumulative: &[f64]) -> Result<Vec<f64>> {
    if cumulative.len() < 2 {
        return Err(Error::TooShort {
            len: cumulative.len(),
            min: 2,
        });
    }
    Ok(cumulative.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Inner join on region key in the order of `a`. For duplicate keys in `b`
/// the first occurrence wins.
pub fn synchronize<'a>(
    a: &'a CumulativeTable,
    b: &'a CumulativeTable,
) -> Vec<(&'a RegionRow, &'a RegionRow)> {
    let mut index: HashMap<&str, &RegionRow> = HashMap::with_capacity(b.rows.len());
    for row in &b.rows {
        index.entry(row.key.as_str()).or_insert(row);
    }
    a.rows
        .iter()
        .filter_map(|row| index.get(row.key.as_str()).map(|other| (row, *other)))
        .collect()
}

/// Daily new confirmed minus daily new recovered, per synchronized region.
pub fn build_net_infections(
    confirmed: &CumulativeTable,
    recovered: &CumulativeTable,
) -> Result<Dataset> {
    if confirmed.dates.len() != recovered.dates.len() {
        return Err(Error::Shape(format!(
            "confirmed has {} date columns, recovered has {}",
            confirmed.dates.len(),
            recovered.dates.len()
        )));
    }
    let pairs = synchronize(confirmed, recovered);
    if pairs.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let series = pairs
        .into_iter()
        .map(|(c, r)| {
            let dc = daily_diff(&c.cumulative)?;
            let dr = daily_diff(&r.cumulative)?;
            let net = dc.iter().zip(&dr).map(|(a, b)| a - b).collect();
            TimeSeries::new(c.key.clone(), net)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

pub fn build_daily_deaths(deaths: &CumulativeTable) -> Result<Dataset> {
    build_differenced(deaths)
}

/// Differences every row of a cumulative table.
pub fn build_differenced(table: &CumulativeTable) -> Result<Dataset> {
    if table.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let series = table
        .rows
        .iter()
        .map(|r| TimeSeries::new(r.key.clone(), daily_diff(&r.cumulative)?))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

/// Uses the date columns as already-daily values, without differencing.
pub fn build_raw_daily(table: &CumulativeTable) -> Result<Dataset> {
    if table.rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let series = table
        .rows
        .iter()
        .map(|r| TimeSeries::new(r.key.clone(), r.cumulative.clone()))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const HEADER: &str = "Province/State,Country/Region,Lat,Long,1/22/20,1/23/20,1/24/20\n";

    fn table(rows: &[(&str, &[f64])]) -> CumulativeTable {
        CumulativeTable {
            dates: (0..rows.first().map_or(0, |r| r.1.len()))
                .map(|i| format!("d{i}"))
                .collect(),
            rows: rows
                .iter()
                .map(|(k, v)| RegionRow {
                    key: k.to_string(),
                    cumulative: v.to_vec(),
                })
                .collect(),
        }
    }

    #[test]
    fn parses_minimal_file() {
        let csv = format!("{HEADER},Sweden,60,18,0,1,3\n");
        let t = parse_cumulative_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.dates, vec!["1/22/20", "1/23/20", "1/24/20"]);
        assert_eq!(t.rows.len(), 1);
        assert_eq!(t.rows[0].key, "|Sweden");
        assert_eq!(t.rows[0].cumulative, vec![0.0, 1.0, 3.0]);
    }

    #[test]
    fn quoted_country_with_comma() {
        let csv = format!("{HEADER},\"Korea, South\",36,128,1,1,2\n");
        let t = parse_cumulative_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.rows[0].key, "|Korea, South");
    }

    #[test]
    fn empty_cell_is_zero_and_keys_are_trimmed() {
        let csv = format!("{HEADER} Queensland , Australia ,0,0,1,,4\n");
        let t = parse_cumulative_csv(csv.as_bytes()).unwrap();
        assert_eq!(t.rows[0].key, "Queensland|Australia");
        assert_eq!(t.rows[0].cumulative, vec![1.0, 0.0, 4.0]);
    }

    #[test]
    fn ragged_row_reports_line() {
        let csv = format!("{HEADER},A,0,0,1,2,3\n,B,0,0,1,2\n");
        match parse_cumulative_csv(csv.as_bytes()) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 3);
                assert!(message.contains("ragged"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn non_numeric_cell_reports_line() {
        let csv = format!("{HEADER},A,0,0,1,x,3\n");
        assert!(matches!(
            parse_cumulative_csv(csv.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn missing_header() {
        assert!(matches!(
            parse_cumulative_csv("".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_cumulative_csv(",Sweden,60,18,0,1,3\n".as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn daily_diff_examples() {
        assert_eq!(daily_diff(&[0.0, 1.0, 3.0, 3.0]).unwrap(), vec![1.0, 2.0, 0.0]);
        assert_eq!(daily_diff(&[5.0, 5.0, 5.0]).unwrap(), vec![0.0, 0.0]);
        assert_eq!(daily_diff(&[10.0, 8.0]).unwrap(), vec![-2.0]);
        assert!(matches!(daily_diff(&[1.0]), Err(Error::TooShort { .. })));
    }

    #[test]
    fn synchronize_intersects_in_order_of_a() {
        let a = table(&[("X", &[0.0, 1.0]), ("Y", &[0.0, 2.0])]);
        let b = table(&[("Y", &[0.0, 1.0]), ("Z", &[0.0, 1.0])]);
        let keys: Vec<_> = synchronize(&a, &b).iter().map(|(r, _)| r.key.clone()).collect();
        assert_eq!(keys, vec!["Y"]);

        let pairs = synchronize(&a, &a);
        let keys: Vec<_> = pairs.iter().map(|(r, s)| (r.key.as_str(), s.key.as_str())).collect();
        assert_eq!(keys, vec![("X", "X"), ("Y", "Y")]);
    }

    #[test]
    fn net_infections_examples() {
        let c = table(&[("|A", &[0.0, 2.0, 5.0])]);
        let r = table(&[("|A", &[0.0, 1.0, 1.0])]);
        let d = build_net_infections(&c, &r).unwrap();
        assert_eq!(d.series()[0].values, vec![1.0, 3.0]);

        let zero = table(&[("|A", &[0.0, 0.0, 0.0])]);
        let d = build_net_infections(&c, &zero).unwrap();
        assert_eq!(d.series()[0].values, vec![2.0, 3.0]);

        let other = table(&[("|B", &[0.0, 0.0, 0.0])]);
        assert!(matches!(build_net_infections(&c, &other), Err(Error::EmptyDataset)));
    }

    #[test]
    fn daily_deaths_examples() {
        let d = build_daily_deaths(&table(&[("|A", &[0.0, 0.0, 1.0])])).unwrap();
        assert_eq!(d.n(), 1);
        assert_eq!(d.series()[0].values, vec![0.0, 1.0]);
        assert!(matches!(
            build_daily_deaths(&CumulativeTable { dates: vec![], rows: vec![] }),
            Err(Error::EmptyDataset)
        ));
    }

    #[test]
    fn crop_by_date_label() {
        let csv = format!("{HEADER},A,0,0,1,2,3\n");
        let t = parse_cumulative_csv(csv.as_bytes()).unwrap();
        let c = t.crop(Some("1/23/20"), None).unwrap();
        assert_eq!(c.dates, vec!["1/23/20", "1/24/20"]);
        assert_eq!(c.rows[0].cumulative, vec![2.0, 3.0]);
        assert!(t.crop(Some("2/1/20"), None).is_err());
        assert!(t.crop(Some("1/24/20"), Some("1/22/20")).is_err());
    }

    proptest! {
        #[test]
        fn diff_is_left_inverse_of_cumsum(
            x in prop::collection::vec(-1.0e6f64..1.0e6, 2..60)
        ) {
            // integer-valued counts keep the sums exact
            let x: Vec<f64> = x.iter().map(|v| v.round()).collect();
            let d = daily_diff(&x).unwrap();
            let mut acc = x[0];
            let mut rebuilt = vec![acc];
            for v in d {
                acc += v;
                rebuilt.push(acc);
            }
            prop_assert_eq!(rebuilt, x);
        }
    }
}
