use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};

fn text_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Text {
        line,
        msg: msg.into(),
    }
}

fn parse_field<T: std::str::FromStr>(tok: &str, name: &str, line: usize) -> Result<T> {
    tok.parse()
        .map_err(|_| text_err(line, format!("malformed {name} field `{tok}`")))
}

/// Parses `t x y p` lines.
///
/// The first `#` line carrying exactly three integers is the `width height duration`
/// header; any other `#` line and blank lines are ignored.
pub fn parse_text_events(text: &str) -> Result<EventStream> {
    let mut header: Option<(u32, u32, u64)> = None;
    let mut events = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            if header.is_none() {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() == 3 && toks.iter().all(|t| t.bytes().all(|b| b.is_ascii_digit())) {
                    header = Some((
                        parse_field(toks[0], "width", line)?,
                        parse_field(toks[1], "height", line)?,
                        parse_field(toks[2], "duration", line)?,
                    ));
                }
            }
            continue;
        }
        if header.is_none() {
            return Err(text_err(line, "event before `# width height duration` header"));
        }
        let toks: Vec<&str> = trimmed.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(text_err(line, format!("expected 4 fields, found {}", toks.len())));
        }
        let t = parse_field(toks[0], "t", line)?;
        let x = parse_field(toks[1], "x", line)?;
        let y = parse_field(toks[2], "y", line)?;
        let p: u32 = parse_field(toks[3], "p", line)?;
        let p = Polarity::try_from(p).map_err(|e| text_err(line, e.to_string()))?;
        events.push(Event::new(t, x, y, p));
    }

    let (width, height, duration) =
        header.ok_or_else(|| text_err(0, "missing `# width height duration` header"))?;
    EventStream::with_duration(events, width, height, duration)
}

/// Canonical text form: header line, then one single-space separated event per line.
pub fn write_text_events(stream: &EventStream) -> String {
    let mut out = String::with_capacity(16 + stream.len() * 16);
    let _ = writeln!(out, "# {} {} {}", stream.width(), stream.height(), stream.duration());
    for e in stream.events() {
        let _ = writeln!(out, "{} {} {} {}", e.t, e.x, e.y, e.p as u8);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_event() {
        let s = parse_text_events("# 4 4 100\n10 3 2 1\n").unwrap();
        assert_eq!(s.events(), &[Event::new(10, 3, 2, Polarity::On)]);
        assert_eq!((s.width(), s.height(), s.duration()), (4, 4, 100));
    }

    #[test]
    fn polarity_error() {
        let err = parse_text_events("# 4 4 100\n10 3 2 7\n").unwrap_err();
        assert!(matches!(err, Error::Text { line: 2, .. }), "{err}");
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# produced by hand\n\n#   4  4   100 \n  10   3 2 1\n# trailing\n\n11 0 0 0";
        let s = parse_text_events(text).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(
            write_text_events(&s),
            "# 4 4 100\n10 3 2 1\n11 0 0 0\n"
        );
    }

    #[test]
    fn malformed_fields() {
        assert!(parse_text_events("# 4 4 100\n10 3 x 1\n").is_err());
        assert!(parse_text_events("# 4 4 100\n10 3 2\n").is_err());
        assert!(parse_text_events("10 3 2 1\n").is_err());
        assert!(parse_text_events("# 4 4 100\n10 9 2 1\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(
            raw in proptest::collection::vec((0u64..1_000_000, 0u16..64, 0u16..48, any::<bool>()), 0..100),
            slack in 0u64..1000,
        ) {
            let evs: Vec<Event> = raw.into_iter()
                .map(|(t, x, y, p)| Event::new(t, x, y, if p { Polarity::On } else { Polarity::Off }))
                .collect();
            let duration = evs.iter().map(|e| e.t + 1).max().unwrap_or(0) + slack;
            let s = EventStream::with_duration(evs, 64, 48, duration).unwrap();
            let text = write_text_events(&s);
            let back = parse_text_events(&text).unwrap();
            prop_assert_eq!(&back, &s);
            prop_assert_eq!(write_text_events(&back), text);
        }
    }
}
