//! Time source injected into the platform so tests control timestamps.

use std::sync::Mutex;

use chrono::{DateTime, Duration, DurationRound, Utc};

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

/// Wall clock, truncated to microseconds so timestamps survive a JSON round trip
/// in every consumer.
#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        let now = Utc::now();
        now.duration_trunc(Duration::microseconds(1)).unwrap_or(now)
    }
}

/// Starts at a fixed instant and advances by `step` on every reading.
#[derive(Debug)]
pub struct ManualClock {
    current: Mutex<DateTime<Utc>>,
    step: Duration,
}

impl ManualClock {
    pub fn new(start: DateTime<Utc>, step: Duration) -> Self {
        ManualClock { current: Mutex::new(start), step }
    }

    /// Fixed start at 2024-01-01T00:00:00Z, one second per reading.
    pub fn ticking() -> Self {
        let start = DateTime::parse_from_rfc3339("2024-01-01T00:00:00Z")
            .expect("valid literal")
            .with_timezone(&Utc);
        ManualClock::new(start, Duration::seconds(1))
    }

    pub fn advance(&self, by: Duration) {
        *self.current.lock().expect("clock poisoned") += by;
    }
}

impl Clock for ManualClock {
    fn now(&self) -> DateTime<Utc> {
        let mut cur = self.current.lock().expect("clock poisoned");
        let t = *cur;
        *cur += self.step;
        t
    }
}
