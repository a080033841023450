use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

/// Bytes per ATIS record.
pub const RECORD_LEN: usize = 5;
/// Timestamps are 23-bit microsecond counts.
pub const MAX_TIMESTAMP: u64 = (1 << 23) - 1;

const POLARITY_BIT: u8 = 0x80;

/// Diagnostics collected while decoding; none of these are fatal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub records: usize,
    /// Records whose timestamp is smaller than the preceding record's.
    pub non_monotonic: usize,
}

/// Decodes a buffer of 5-byte records.
///
/// Layout per record: `x`, `y`, then a 24-bit big-endian word whose top bit is the
/// polarity and whose low 23 bits are the timestamp in microseconds.
pub fn parse_bin(bytes: &[u8], width: u32, height: u32) -> Result<(EventStream, ParseReport)> {
    let tail = bytes.len() % RECORD_LEN;
    if tail != 0 {
        return Err(Error::PartialRecord(tail));
    }
    let mut report = ParseReport::default();
    let mut events = Vec::with_capacity(bytes.len() / RECORD_LEN);
    let mut prev = 0u64;
    for (index, rec) in bytes.chunks_exact(RECORD_LEN).enumerate() {
        let (x, y) = (rec[0], rec[1]);
        if u32::from(x) >= width || u32::from(y) >= height {
            return Err(Error::OutOfBounds {
                index,
                x: x.into(),
                y: y.into(),
                width,
                height,
            });
        }
        let p = if rec[2] & POLARITY_BIT != 0 {
            Polarity::On
        } else {
            Polarity::Off
        };
        let t = (u64::from(rec[2] & !POLARITY_BIT) << 16) | (u64::from(rec[3]) << 8) | u64::from(rec[4]);
        if t < prev {
            report.non_monotonic += 1;
        }
        prev = t;
        events.push(Event::new(t, x.into(), y.into(), p));
    }
    report.records = events.len();
    Ok((EventStream::new(events, width, height)?, report))
}

/// Encodes a stream as 5-byte records in stream order.
pub fn write_bin(stream: &EventStream) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(stream.len() * RECORD_LEN);
    for e in stream.events() {
        if e.t > MAX_TIMESTAMP {
            return Err(Error::Overflow {
                field: "timestamp",
                value: e.t,
                max: MAX_TIMESTAMP,
            });
        }
        for (field, v) in [("x", e.x), ("y", e.y)] {
            if v > 255 {
                return Err(Error::Overflow {
                    field,
                    value: v.into(),
                    max: 255,
                });
            }
        }
        let pol = if e.p == Polarity::On { POLARITY_BIT } else { 0 };
        out.extend_from_slice(&[
            e.x as u8,
            e.y as u8,
            pol | (e.t >> 16) as u8,
            (e.t >> 8) as u8,
            e.t as u8,
        ]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hand_decoded_record() {
        let (s, report) = parse_bin(&[0x03, 0x02, 0x80, 0x00, 0x0A], 34, 34).unwrap();
        assert_eq!(s.events(), &[Event::new(10, 3, 2, Polarity::On)]);
        assert_eq!(report.non_monotonic, 0);

        let (s, _) = parse_bin(&[0x03, 0x02, 0x00, 0x00, 0x0A], 34, 34).unwrap();
        assert_eq!(s.events()[0].p, Polarity::Off);
    }

    #[test]
    fn writes_hand_decoded_record() {
        let s = EventStream::new(vec![Event::new(10, 3, 2, Polarity::On)], 34, 34).unwrap();
        assert_eq!(write_bin(&s).unwrap(), vec![0x03, 0x02, 0x80, 0x00, 0x0A]);
    }

    #[test]
    fn high_timestamp_bits() {
        // 0x7F_FF_FF is the largest representable timestamp
        let (s, _) = parse_bin(&[0, 0, 0xFF, 0xFF, 0xFF], 1, 1).unwrap();
        assert_eq!(s.events()[0], Event::new(MAX_TIMESTAMP, 0, 0, Polarity::On));
        let (s, _) = parse_bin(&[0, 0, 0x01, 0x02, 0x03], 1, 1).unwrap();
        assert_eq!(s.events()[0].t, 0x01_02_03);
    }

    #[test]
    fn partial_record() {
        assert_eq!(parse_bin(&[0; 6], 34, 34).unwrap_err(), Error::PartialRecord(1));
    }

    #[test]
    fn out_of_bounds_record() {
        let err = parse_bin(&[40, 0, 0, 0, 0], 34, 34).unwrap_err();
        assert!(matches!(err, Error::OutOfBounds { index: 0, x: 40, .. }));
    }

    #[test]
    fn non_monotonic_reported_and_sorted() {
        let bytes = [0, 0, 0, 0, 9, 1, 0, 0, 0, 3, 2, 0, 0, 0, 5];
        let (s, report) = parse_bin(&bytes, 4, 4).unwrap();
        assert_eq!(report.non_monotonic, 1);
        let ts: Vec<u64> = s.events().iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![3, 5, 9]);
    }

    #[test]
    fn timestamp_overflow() {
        let s = EventStream::new(vec![Event::new(1 << 23, 0, 0, Polarity::On)], 1, 1).unwrap();
        assert!(matches!(
            write_bin(&s).unwrap_err(),
            Error::Overflow { field: "timestamp", .. }
        ));
        let s = EventStream::new(vec![Event::new(0, 300, 0, Polarity::On)], 400, 1).unwrap();
        assert!(matches!(write_bin(&s).unwrap_err(), Error::Overflow { field: "x", .. }));
    }

    proptest! {
        #[test]
        fn round_trip(raw in proptest::collection::vec(
            (0..=MAX_TIMESTAMP, 0u16..200, 0u16..120, any::<bool>()), 0..200)
        ) {
            let evs = raw.into_iter()
                .map(|(t, x, y, p)| Event::new(t, x, y, if p { Polarity::On } else { Polarity::Off }))
                .collect();
            let s = EventStream::new(evs, 200, 120).unwrap();
            let bytes = write_bin(&s).unwrap();
            let (back, report) = parse_bin(&bytes, 200, 120).unwrap();
            prop_assert_eq!(report.non_monotonic, 0);
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(write_bin(&back).unwrap(), bytes);
        }
    }
}
