//! `afl-showmap` text output: one `edge:count` line per covered edge.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::model::{CoverageTrace, EdgeTuple};

const MAX_EDGE_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShowmapRecord {
    pub edge_id: u32,
    pub hit_count: u32,
}

/// Parses showmap text. Blank lines are skipped; line numbers in errors are
/// 1-based.
pub fn parse_showmap(text: &[u8]) -> Result<Vec<ShowmapRecord>> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in text.split(|&b| b == b'\n').enumerate() {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let malformed = || Error::MalformedLine {
            line: lineno,
            text: String::from_utf8_lossy(line).into_owned(),
        };
        let colon = line.iter().position(|&b| b == b':').ok_or_else(malformed)?;
        let (edge, count) = (&line[..colon], &line[colon + 1..]);
        if edge.len() > MAX_EDGE_DIGITS {
            return Err(malformed());
        }
        let edge_id: u32 = parse_decimal(edge).ok_or_else(malformed)?;
        let hit_count: u32 = parse_decimal(count).ok_or_else(malformed)?;
        if hit_count == 0 {
            return Err(Error::ZeroHitCount {
                line: lineno,
                edge: edge_id,
            });
        }
        if !seen.insert(edge_id) {
            return Err(Error::DuplicateEdge {
                line: lineno,
                edge: edge_id,
            });
        }
        records.push(ShowmapRecord { edge_id, hit_count });
    }
    Ok(records)
}

fn parse_decimal(digits: &[u8]) -> Option<u32> {
    if digits.is_empty() || !digits.iter().all(u8::is_ascii_digit) {
        return None;
    }
    std::str::from_utf8(digits).ok()?.parse().ok()
}

/// Canonical rendering: 6-digit zero-padded edge ids, LF-terminated.
pub fn render_showmap(records: &[ShowmapRecord]) -> String {
    let mut out = String::with_capacity(records.len() * 10);
    for r in records {
        let _ = writeln!(out, "{:06}:{}", r.edge_id, r.hit_count);
    }
    out
}

/// AFL's 8-class hit-count quantization.
pub fn bucket(hit_count: u32) -> u8 {
    match hit_count {
        0 | 1 => 0,
        2 => 1,
        3 => 2,
        4..=7 => 3,
        8..=15 => 4,
        16..=31 => 5,
        32..=127 => 6,
        _ => 7,
    }
}

pub fn to_trace(records: &[ShowmapRecord], map_size: usize) -> Result<CoverageTrace> {
    let mut bits = BitSet::new(map_size);
    let mut tuples = BTreeSet::new();
    for r in records {
        let edge = r.edge_id as usize;
        if edge >= map_size {
            return Err(Error::EdgeOutOfRange {
                edge: r.edge_id,
                map_size,
            });
        }
        bits.insert(edge);
        tuples.insert(EdgeTuple {
            edge: r.edge_id,
            bucket: bucket(r.hit_count),
        });
    }
    Ok(CoverageTrace {
        bits,
        tuples: Some(tuples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(edge_id: u32, hit_count: u32) -> ShowmapRecord {
        ShowmapRecord { edge_id, hit_count }
    }

    #[test]
    fn parses_padded_and_unpadded() {
        let recs = parse_showmap(b"001234:1\n005678:42\n").unwrap();
        assert_eq!(recs, vec![rec(1234, 1), rec(5678, 42)]);
        let recs = parse_showmap(b"7:3\n12:1").unwrap();
        assert_eq!(recs, vec![rec(7, 3), rec(12, 1)]);
        assert!(parse_showmap(b"").unwrap().is_empty());
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_showmap(b"000001:1\n\nfoo\n").unwrap_err();
        assert!(matches!(err, Error::MalformedLine { line: 3, .. }), "{err}");
        for bad in [
            &b"1:"[..],
            b":1",
            b"1234567:1",
            b"12 :1",
            b"1:-1",
            b"1:2:3",
            b"1:1\r",
        ] {
            assert!(
                matches!(
                    parse_showmap(bad),
                    Err(Error::MalformedLine { line: 1, .. })
                ),
                "{:?}",
                String::from_utf8_lossy(bad)
            );
        }
    }

    #[test]
    fn rejects_zero_and_duplicates() {
        assert!(matches!(
            parse_showmap(b"5:0\n"),
            Err(Error::ZeroHitCount { line: 1, edge: 5 })
        ));
        assert!(matches!(
            parse_showmap(b"5:1\n000005:2\n"),
            Err(Error::DuplicateEdge { line: 2, edge: 5 })
        ));
    }

    #[test]
    fn bucket_table() {
        let expect = [
            (1, 0),
            (2, 1),
            (3, 2),
            (4, 3),
            (7, 3),
            (8, 4),
            (15, 4),
            (16, 5),
            (31, 5),
            (32, 6),
            (42, 6),
            (127, 6),
            (128, 7),
            (u32::MAX, 7),
        ];
        for (count, class) in expect {
            assert_eq!(bucket(count), class, "count {count}");
        }
    }

    #[test]
    fn trace_conversion() {
        let t = to_trace(&[rec(3, 1)], 8).unwrap();
        assert_eq!(t.bits.words(), &[0b0000_1000]);
        assert_eq!(
            t.tuples.unwrap().into_iter().collect::<Vec<_>>(),
            vec![EdgeTuple { edge: 3, bucket: 0 }]
        );

        let t = to_trace(&[rec(1234, 1), rec(5678, 42)], 65536).unwrap();
        assert_eq!(t.popcount(), 2);
        assert_eq!(
            t.tuples.unwrap().into_iter().collect::<Vec<_>>(),
            vec![
                EdgeTuple {
                    edge: 1234,
                    bucket: 0
                },
                EdgeTuple {
                    edge: 5678,
                    bucket: 6
                }
            ]
        );

        let t = to_trace(&[], 16).unwrap();
        assert!(t.bits.none());
    }

    #[test]
    fn edge_at_map_size_is_out_of_range() {
        let recs = parse_showmap(b"65536:1\n").unwrap();
        assert!(matches!(
            to_trace(&recs, 65536),
            Err(Error::EdgeOutOfRange { edge: 65536, .. })
        ));
    }

    #[test]
    fn render_is_canonical() {
        let recs = vec![rec(3, 1), rec(123456, 9)];
        let text = render_showmap(&recs);
        assert_eq!(text, "000003:1\n123456:9\n");
        assert_eq!(parse_showmap(text.as_bytes()).unwrap(), recs);
    }
}
