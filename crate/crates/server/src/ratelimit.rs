//! Optional per-account cap on mutations. Off unless configured.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Fixed-window counter keyed by user id.
#[derive(Debug)]
pub struct Limiter {
    limit: u32,
    window: Duration,
    seen: Mutex<HashMap<String, (Instant, u32)>>,
}

impl Limiter {
    pub fn per_minute(limit: u32) -> Self {
        Self::new(limit, Duration::from_secs(60))
    }

    pub fn new(limit: u32, window: Duration) -> Self {
        Self {
            limit,
            window,
            seen: Mutex::new(HashMap::new()),
        }
    }

    /// Counts one request for `user`; false once the window's budget is spent.
    pub fn admit(&self, user: &str) -> bool {
        self.admit_at(user, Instant::now())
    }

    fn admit_at(&self, user: &str, now: Instant) -> bool {
        let mut seen = self.seen.lock().unwrap_or_else(|e| e.into_inner());
        let (start, count) = seen.entry(user.to_owned()).or_insert((now, 0));
        if now.duration_since(*start) >= self.window {
            *start = now;
            *count = 0;
        }
        if *count >= self.limit {
            return false;
        }
        *count += 1;
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_resets_per_window() {
        let limiter = Limiter::new(2, Duration::from_secs(10));
        let t0 = Instant::now();
        assert!(limiter.admit_at("a", t0));
        assert!(limiter.admit_at("a", t0));
        assert!(!limiter.admit_at("a", t0 + Duration::from_secs(9)));
        assert!(limiter.admit_at("b", t0));
        assert!(limiter.admit_at("a", t0 + Duration::from_secs(10)));
    }
}
