use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// Seconds since midnight of the service day.
///
/// `u32::MAX` is reserved for [`TimePoint::INFINITE`], which compares greater
/// than every finite time. Arithmetic saturates into the sentinel.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct TimePoint(u32);

/// Non-negative span of seconds, or [`Duration::INFINITE`] for a disallowed
/// move (e.g. no foot link).
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Duration(u32);

/// Exclusive upper bound of times accepted from input files.
pub const MAX_INPUT_SECS: u32 = 1 << 31;

impl TimePoint {
    pub const INFINITE: TimePoint = TimePoint(u32::MAX);
    pub const ZERO: TimePoint = TimePoint(0);

    #[inline]
    pub const fn new(secs: u32) -> Self {
        TimePoint(secs)
    }

    pub const fn hms(h: u32, m: u32, s: u32) -> Self {
        TimePoint(h * 3600 + m * 60 + s)
    }

    #[inline]
    pub const fn secs(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }

    /// `self - d`, or `None` if it would go below zero or either side is infinite.
    #[inline]
    pub fn checked_sub(self, d: Duration) -> Option<TimePoint> {
        if !self.is_finite() || !d.is_finite() {
            return None;
        }
        self.0.checked_sub(d.0).map(TimePoint)
    }

    /// Duration from `earlier` to `self`; infinite if `self` is.
    pub fn since(self, earlier: TimePoint) -> Duration {
        if !self.is_finite() {
            return Duration::INFINITE;
        }
        Duration(self.0.saturating_sub(earlier.0))
    }
}

impl Duration {
    pub const INFINITE: Duration = Duration(u32::MAX);
    pub const ZERO: Duration = Duration(0);

    #[inline]
    pub const fn new(secs: u32) -> Self {
        Duration(secs)
    }

    pub const fn minutes(m: u32) -> Self {
        Duration(m * 60)
    }

    #[inline]
    pub const fn secs(self) -> u32 {
        self.0
    }

    #[inline]
    pub const fn is_finite(self) -> bool {
        self.0 != u32::MAX
    }
}

impl Add<Duration> for TimePoint {
    type Output = TimePoint;

    #[inline]
    fn add(self, rhs: Duration) -> TimePoint {
        TimePoint(self.0.saturating_add(rhs.0))
    }
}

impl Add for Duration {
    type Output = Duration;

    #[inline]
    fn add(self, rhs: Duration) -> Duration {
        Duration(self.0.saturating_add(rhs.0))
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.is_finite() {
            return f.write_str("inf");
        }
        let s = self.0;
        write!(f, "{:02}:{:02}:{:02}", s / 3600, (s / 60) % 60, s % 60)
    }
}

impl fmt::Debug for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_finite() {
            write!(f, "{}s", self.0)
        } else {
            f.write_str("inf")
        }
    }
}

impl fmt::Debug for Duration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses `HH:MM`, `HH:MM:SS` or a plain number of seconds. Hours may exceed 23.
impl FromStr for TimePoint {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("invalid time `{s}`, expected HH:MM[:SS] or seconds");
        let parts: Vec<&str> = s.trim().split(':').collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let secs = match nums.as_slice() {
            [secs] => *secs,
            [h, m] if *m < 60 => h * 3600 + m * 60,
            [h, m, sec] if *m < 60 && *sec < 60 => h * 3600 + m * 60 + sec,
            _ => return Err(bad()),
        };
        if secs >= MAX_INPUT_SECS as u64 {
            return Err(bad());
        }
        Ok(TimePoint(secs as u32))
    }
}
