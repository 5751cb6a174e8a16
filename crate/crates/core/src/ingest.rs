//! Count-table CSV parsing and the built-in fixture datasets.
//!
//! The count format is UTF-8 with LF or CRLF line endings and the exact
//! header `year,u,i,g,ui,ug,ig,uig,total`, followed by one row of
//! nonnegative integers per year.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::contingency::{validate_counts, AxisLabels, CountRecord};
use crate::error::{Error, Result};
use crate::infotheory::Unit;

pub const COUNT_HEADER: &str = "year,u,i,g,ui,ug,ig,uig,total";
pub const SERIES_HEADER: &str = "year,value,unit";
pub const PERCENT_HEADER: &str = "year,percent";

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    let text = text.strip_prefix('\u{feff}').unwrap_or(text);
    text.split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate()
        .map(|(n, l)| (n + 1, l))
}

fn check_header(first: Option<(usize, &str)>, expected: &str) -> Result<()> {
    match first {
        Some((_, h)) if h == expected => Ok(()),
        Some((_, h)) => Err(Error::Format {
            line: 1,
            column: None,
            message: format!("expected header '{expected}', found '{h}'"),
        }),
        None => Err(Error::Format {
            line: 1,
            column: None,
            message: format!("missing header '{expected}'"),
        }),
    }
}

pub fn parse_count_csv(text: &str) -> Result<Vec<CountRecord>> {
    let mut it = lines(text);
    check_header(it.next(), COUNT_HEADER)?;

    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (line, row) in it {
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Format {
                line,
                column: None,
                message: format!("expected 9 fields, found {}", fields.len()),
            });
        }
        let mut values = [0u64; 9];
        for (col, (slot, raw)) in values.iter_mut().zip(&fields).enumerate() {
            *slot = raw.trim().parse::<u64>().map_err(|_| Error::Format {
                line,
                column: Some(col + 1),
                message: format!("'{raw}' is not a nonnegative integer"),
            })?;
        }
        let year = i32::try_from(values[0]).map_err(|_| Error::Format {
            line,
            column: Some(1),
            message: format!("year {} out of range", values[0]),
        })?;
        if !seen.insert(year) {
            return Err(Error::DuplicateYear {
                year,
                line: Some(line),
            });
        }
        let mut counts = [0u64; 8];
        counts.copy_from_slice(&values[1..]);
        records.push(CountRecord::from_counts(year, counts));
    }
    Ok(records)
}

pub fn render_csv(records: &[CountRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(COUNT_HEADER);
    out.push('\n');
    for r in records {
        let _ = write!(out, "{}", r.year);
        for c in r.counts() {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
    }
    out
}

/// `year,value,unit` rows. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn render_series_csv(points: &[(i32, f64)], unit: Unit) -> String {
    let mut out = String::from(SERIES_HEADER);
    out.push('\n');
    for (year, value) in points {
        let _ = writeln!(out, "{year},{value:?},{unit}");
    }
    out
}

/// Points plus the unit named in the rows, if there were any rows.
pub type ParsedSeries = (Vec<(i32, f64)>, Option<Unit>);

pub fn parse_series_csv(text: &str) -> Result<ParsedSeries> {
    let mut it = lines(text);
    check_header(it.next(), SERIES_HEADER)?;
    let mut points = Vec::new();
    let mut unit = None;
    for (line, row) in it {
        if row.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Format {
                line,
                column: None,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let year = fields[0].trim().parse::<i32>().map_err(|_| Error::Format {
            line,
            column: Some(1),
            message: format!("'{}' is not a year", fields[0]),
        })?;
        let value = fields[1].trim().parse::<f64>().map_err(|_| Error::Format {
            line,
            column: Some(2),
            message: format!("'{}' is not a number", fields[1]),
        })?;
        let row_unit = fields[2]
            .trim()
            .parse::<Unit>()
            .map_err(|message| Error::Format {
                line,
                column: Some(3),
                message,
            })?;
        match unit {
            None => unit = Some(row_unit),
            Some(u) if u != row_unit => {
                return Err(Error::Format {
                    line,
                    column: Some(3),
                    message: format!("mixed units {u} and {row_unit}"),
                })
            }
            _ => {}
        }
        points.push((year, value));
    }
    Ok((points, unit))
}

pub fn render_percent_csv(points: &[(i32, f64)]) -> String {
    let mut out = String::from(PERCENT_HEADER);
    out.push('\n');
    for (year, value) in points {
        let _ = writeln!(out, "{year},{value:?}");
    }
    out
}

pub fn parse_percent_csv(text: &str) -> Result<Vec<(i32, f64)>> {
    let mut it = lines(text);
    check_header(it.next(), PERCENT_HEADER)?;
    let mut points = Vec::new();
    for (line, row) in it {
        if row.trim().is_empty() {
            continue;
        }
        let Some((year, value)) = row.split_once(',') else {
            return Err(Error::Format {
                line,
                column: None,
                message: "expected 2 fields".into(),
            });
        };
        let year = year.trim().parse::<i32>().map_err(|_| Error::Format {
            line,
            column: Some(1),
            message: format!("'{year}' is not a year"),
        })?;
        let value = value.trim().parse::<f64>().map_err(|_| Error::Format {
            line,
            column: Some(2),
            message: format!("'{value}' is not a number"),
        })?;
        points.push((year, value));
    }
    Ok(points)
}

/// A named table of yearly counts with provenance notes.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetDescriptor {
    pub name: String,
    pub labels: AxisLabels,
    pub source: String,
    /// Known limitations of the data that reports must carry along.
    pub caveats: Vec<String>,
    pub records: Vec<CountRecord>,
}

struct Fixture {
    name: &'static str,
    labels: [&'static str; 3],
    source: &'static str,
    caveats: &'static [&'static str],
    rows: &'static [[u64; 9]],
}

const USPTO_ROWS: [[u64; 9]; 10] = [
    [1993, 3063, 9716, 2619, 401, 588, 334, 63, 110540],
    [1994, 3359, 10568, 2855, 479, 684, 390, 89, 114564],
    [1995, 3710, 10800, 2828, 529, 771, 410, 93, 114864],
    [1996, 4552, 12147, 3149, 703, 963, 488, 114, 122953],
    [1997, 5406, 12699, 3604, 814, 1199, 583, 168, 125884],
    [1998, 7623, 17068, 4708, 1254, 1658, 807, 266, 166801],
    [1999, 8326, 18553, 4856, 1352, 1735, 844, 235, 170265],
    [2000, 8488, 19368, 4831, 1399, 1776, 865, 267, 176350],
    [2001, 9190, 20812, 5136, 1591, 1868, 996, 296, 184172],
    [2002, 9228, 21089, 5242, 1619, 1928, 1047, 352, 184531],
];

const WEB_TEXT_ROWS: [[u64; 9]; 10] = [
    [1993, 2205, 441, 1041, 49, 49, 46, 25, 18437],
    [1994, 12722, 2178, 3579, 1007, 1174, 719, 391, 135265],
    [1995, 66719, 13190, 21187, 5140, 6861, 4541, 2036, 640967],
    [
        1996, 216548, 45938, 66839, 16257, 21729, 15894, 6945, 2308162,
    ],
    [
        1997, 478164, 110434, 166550, 37122, 51259, 35230, 16224, 5740624,
    ],
    [
        1998, 842665, 243611, 343066, 71306, 95478, 78922, 32318, 14379504,
    ],
    [
        1999, 1415659, 471387, 669844, 131979, 178892, 157446, 61899, 33053057,
    ],
    [
        2000, 3005285, 975976, 1385296, 245470, 342218, 298731, 117318, 86537251,
    ],
    [
        2001, 5381142, 2419632, 3014141, 523922, 724722, 679407, 247734, 186175482,
    ],
    [
        2002, 10408179, 7779754, 7301276, 1216090, 1646210, 1567669, 550263, 492815972,
    ],
];

const WEB_LINKS_ROWS: [[u64; 9]; 10] = [
    [1993, 721, 753, 26, 32, 16, 21, 13, 140631],
    [1994, 10653, 5969, 5070, 1281, 454, 1657, 264, 155429],
    [1995, 58559, 85344, 63208, 16060, 4168, 30666, 2707, 971806],
    [
        1996, 185571, 213755, 40505, 52853, 13816, 15191, 9713, 4215445,
    ],
    [
        1997, 383999, 586804, 76767, 118249, 25447, 29842, 18723, 8410235,
    ],
    [
        1998, 714592, 1512795, 206683, 177352, 49238, 59734, 33695, 21190676,
    ],
    [
        1999, 1410789, 3372441, 341635, 346610, 92354, 126961, 63192, 42521722,
    ],
    [
        2000, 2212642, 10057844, 577433, 622780, 194573, 244278, 151641, 92177426,
    ],
    [
        2001, 3722856, 30497559, 1328142, 1344270, 373437, 599161, 305180, 196204140,
    ],
    [
        2002, 8564790, 81698935, 4035084, 3058198, 1159347, 1758589, 757120, 501734312,
    ],
];

const FIXTURES: [Fixture; 3] = [
    Fixture {
        name: "uspto_1993_2002",
        labels: ["university", "industry", "government"],
        source: "USPTO full-text patent search: yearly hits for 'university', 'industry', \
                 'government' and their Boolean AND combinations; total = patents granted",
        caveats: &[
            "the 1976-1992 segment of this indicator (reported as -0.190 +/- 0.008) is not \
             reproducible: yearly counts for 1976-1992 are not part of this dataset",
            "'industry' as a search term reaches only 10-20% of patents, while more than half \
             carry an industrial address; the term is used as-is",
            "hit counts cover the whole patent text; they do not indicate ownership or \
             institutional relationships",
        ],
        rows: &USPTO_ROWS,
    },
    Fixture {
        name: "web_text_1993_2002",
        labels: ["university", "industry", "government"],
        source: "AltaVista Advanced Search (retrieved 2003-05-15): yearly free-text hits for \
                 'university', 'industry', 'government' and their AND combinations; \
                 total = \"url:*\" hits per year",
        caveats: &[
            "web counts are a snapshot: the index overwrites earlier representations, so the \
             series cannot be re-queried",
            "the all-years \"url:*\" total of 1,504,185,772 hits exceeds the sum of the yearly \
             totals; yearly totals are used as populations",
        ],
        rows: &WEB_TEXT_ROWS,
    },
    Fixture {
        name: "web_links_1993_2002",
        labels: [".edu", ".com", ".gov"],
        source: "AltaVista Advanced Search (retrieved 2003-05-15): yearly counts of pages \
                 linking to .edu, .com, .gov domains and their AND combinations; \
                 total = \"link:*\" hits per year",
        caveats: &[
            ".edu and .gov are U.S.-only proxies while .com is used worldwide",
            "links to .com are an order of magnitude more frequent than free-text 'industry' hits",
            "web counts are a snapshot: the index overwrites earlier representations",
        ],
        rows: &WEB_LINKS_ROWS,
    },
];

pub fn dataset_names() -> Vec<&'static str> {
    FIXTURES.iter().map(|f| f.name).collect()
}

pub fn builtin_dataset(name: &str) -> Result<DatasetDescriptor> {
    let fx = FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| Error::UnknownDataset(name.to_string()))?;
    let labels = AxisLabels::new(fx.labels[0], fx.labels[1], fx.labels[2]);
    let records = fx
        .rows
        .iter()
        .map(|row| {
            let mut counts = [0u64; 8];
            counts.copy_from_slice(&row[1..]);
            CountRecord::from_counts(row[0] as i32, counts).with_labels(labels.clone())
        })
        .collect();
    Ok(DatasetDescriptor {
        name: fx.name.to_string(),
        labels,
        source: fx.source.to_string(),
        caveats: fx.caveats.iter().map(|c| c.to_string()).collect(),
        records,
    })
}

/// Wraps parsed records as an ad-hoc dataset, rejecting rows that fail
/// validation.
pub fn dataset_from_records(name: &str, records: Vec<CountRecord>) -> Result<DatasetDescriptor> {
    for r in &records {
        let report = validate_counts(r);
        if let Some(v) = report.violations.first() {
            return Err(Error::InvalidRecord {
                year: r.year,
                reason: v.to_string(),
            });
        }
    }
    Ok(DatasetDescriptor {
        name: name.to_string(),
        labels: AxisLabels::default(),
        source: format!("user-supplied counts ({name})"),
        caveats: Vec::new(),
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_table1_row() {
        let text = format!("{COUNT_HEADER}\n1993,3063,9716,2619,401,588,334,63,110540\n");
        let recs = parse_count_csv(&text).unwrap();
        assert_eq!(
            recs,
            vec![CountRecord::from_counts(
                1993,
                [3063, 9716, 2619, 401, 588, 334, 63, 110540]
            )]
        );
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_count_csv(COUNT_HEADER).unwrap().is_empty());
        assert!(parse_count_csv(&format!("{COUNT_HEADER}\r\n"))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn crlf_accepted() {
        let text = format!("{COUNT_HEADER}\r\n1,1,0,0,0,0,0,0,1\r\n2,0,0,0,0,0,0,0,3\r\n");
        assert_eq!(parse_count_csv(&text).unwrap().len(), 2);
    }

    #[test]
    fn duplicate_year_rejected() {
        let row = "1993,3063,9716,2619,401,588,334,63,110540";
        let text = format!("{COUNT_HEADER}\n{row}\n{row}\n");
        assert_eq!(
            parse_count_csv(&text),
            Err(Error::DuplicateYear {
                year: 1993,
                line: Some(3)
            })
        );
    }

    #[test]
    fn format_errors_locate_the_field() {
        assert!(matches!(
            parse_count_csv("year,U,I,G,UI,UG,IG,UIG,total\n"),
            Err(Error::Format { line: 1, .. })
        ));
        assert!(matches!(
            parse_count_csv(""),
            Err(Error::Format { line: 1, .. })
        ));
        let text = format!("{COUNT_HEADER}\n1993,1,2,x,0,0,0,0,9\n");
        assert!(matches!(
            parse_count_csv(&text),
            Err(Error::Format {
                line: 2,
                column: Some(4),
                ..
            })
        ));
        let text = format!("{COUNT_HEADER}\n1993,1,2,3,0,0,0,0,9\n1994,-1,0,0,0,0,0,0,9\n");
        assert!(matches!(
            parse_count_csv(&text),
            Err(Error::Format {
                line: 3,
                column: Some(2),
                ..
            })
        ));
        let text = format!("{COUNT_HEADER}\n1993,1,2\n");
        assert!(matches!(
            parse_count_csv(&text),
            Err(Error::Format {
                line: 2,
                column: None,
                ..
            })
        ));
    }

    #[test]
    fn fixture_rows() {
        let uspto = builtin_dataset("uspto_1993_2002").unwrap();
        assert_eq!(uspto.records.len(), 10);
        assert_eq!(
            uspto.records[9].counts(),
            [9228, 21089, 5242, 1619, 1928, 1047, 352, 184531]
        );
        assert_eq!(uspto.records[9].year, 2002);

        let text = builtin_dataset("web_text_1993_2002").unwrap();
        assert_eq!(text.records[0].year, 1993);
        assert_eq!(
            text.records[0].counts(),
            [2205, 441, 1041, 49, 49, 46, 25, 18437]
        );

        let links = builtin_dataset("web_links_1993_2002").unwrap();
        assert_eq!(
            links.records[9].counts(),
            [8564790, 81698935, 4035084, 3058198, 1159347, 1758589, 757120, 501734312]
        );
        assert_eq!(links.labels, AxisLabels::new(".edu", ".com", ".gov"));
        assert_eq!(links.records[0].labels.get(2), ".gov");

        assert_eq!(
            builtin_dataset("altavista"),
            Err(Error::UnknownDataset("altavista".into()))
        );
    }

    #[test]
    fn all_fixture_rows_validate() {
        for name in dataset_names() {
            let ds = builtin_dataset(name).unwrap();
            let years: Vec<i32> = ds.records.iter().map(|r| r.year).collect();
            assert_eq!(years, (1993..=2002).collect::<Vec<_>>());
            for r in &ds.records {
                let report = validate_counts(r);
                assert!(report.is_valid(), "{name} {report}");
            }
        }
    }

    #[test]
    fn uspto_carries_unreproducible_segment_caveat() {
        let ds = builtin_dataset("uspto_1993_2002").unwrap();
        assert!(ds
            .caveats
            .iter()
            .any(|c| c.contains("1976-1992") && c.contains("not reproducible")));
    }

    #[test]
    fn series_csv_round_trip() {
        let pts = vec![
            (1993, -0.183_087_264_982_164_96),
            (1994, 1e-300),
            (1995, 0.0),
        ];
        let text = render_series_csv(&pts, Unit::Millibit);
        let (back, unit) = parse_series_csv(&text).unwrap();
        assert_eq!(back, pts);
        assert_eq!(unit, Some(Unit::Millibit));
    }

    #[test]
    fn percent_csv_round_trip() {
        let pts = vec![(1993, 2.770941016826488), (2002, 5.000785775398713)];
        assert_eq!(parse_percent_csv(&render_percent_csv(&pts)).unwrap(), pts);
        assert!(matches!(
            parse_percent_csv("year,percent\n1993,x\n"),
            Err(Error::Format {
                line: 2,
                column: Some(2),
                ..
            })
        ));
    }

    #[test]
    fn series_csv_rejects_mixed_units() {
        let text = format!("{SERIES_HEADER}\n1,0.5,bit\n2,0.5,nat\n");
        assert!(matches!(
            parse_series_csv(&text),
            Err(Error::Format {
                line: 3,
                column: Some(3),
                ..
            })
        ));
    }

    #[test]
    fn dataset_from_records_validates() {
        let bad = CountRecord::from_counts(1, [5, 0, 0, 10, 0, 0, 0, 20]);
        assert!(dataset_from_records("x", vec![bad]).is_err());
        let ok = CountRecord::from_counts(1, [5, 1, 0, 1, 0, 0, 0, 20]);
        assert_eq!(
            dataset_from_records("x", vec![ok]).unwrap().records.len(),
            1
        );
    }
}
