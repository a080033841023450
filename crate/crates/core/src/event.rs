//! Raw camera events and time-ordered event streams.

use crate::error::{Error, Result};

/// Sign of a brightness change. Maps onto tensor channel 0 (off) and 1 (on).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    Off = 0,
    On = 1,
}

impl Polarity {
    pub fn channel(self) -> usize {
        self as usize
    }
}

impl TryFrom<u32> for Polarity {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        match v {
            0 => Ok(Polarity::Off),
            1 => Ok(Polarity::On),
            other => Err(Error::Polarity(other)),
        }
    }
}

/// A single event: timestamp in microseconds, pixel column `x`, pixel row `y`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: u64,
    pub x: u16,
    pub y: u16,
    pub p: Polarity,
}

impl Event {
    pub fn new(t: u64, x: u16, y: u16, p: Polarity) -> Self {
        Self { t, x, y, p }
    }
}

/// Events sorted by timestamp together with the sensor geometry.
///
/// Sorting is stable, so events sharing a timestamp keep their insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    events: Vec<Event>,
    width: u32,
    height: u32,
    duration: u64,
}

impl EventStream {
    /// Builds a stream whose duration is `max(t) + 1` (zero when empty).
    pub fn new(events: Vec<Event>, width: u32, height: u32) -> Result<Self> {
        let duration = events.iter().map(|e| e.t + 1).max().unwrap_or(0);
        Self::with_duration(events, width, height, duration)
    }

    /// Builds a stream with an explicitly declared duration, which must cover every event.
    pub fn with_duration(
        mut events: Vec<Event>,
        width: u32,
        height: u32,
        duration: u64,
    ) -> Result<Self> {
        for (index, e) in events.iter().enumerate() {
            if u32::from(e.x) >= width || u32::from(e.y) >= height {
                return Err(Error::OutOfBounds {
                    index,
                    x: e.x.into(),
                    y: e.y.into(),
                    width,
                    height,
                });
            }
            if e.t >= duration {
                return Err(Error::Config(format!(
                    "event {index} at t={} is not inside declared duration {duration}",
                    e.t
                )));
            }
        }
        events.sort_by_key(|e| e.t);
        Ok(Self {
            events,
            width,
            height,
            duration,
        })
    }

    pub fn empty(width: u32, height: u32) -> Self {
        Self {
            events: Vec::new(),
            width,
            height,
            duration: 0,
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn duration(&self) -> u64 {
        self.duration
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn into_events(self) -> Vec<Event> {
        self.events
    }
}
