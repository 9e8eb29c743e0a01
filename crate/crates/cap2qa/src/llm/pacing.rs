use std::collections::VecDeque;
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use rand::Rng;

/// Monotonic time source and sleeper.
pub trait Timer: Send + Sync {
    /// Time since an arbitrary fixed origin.
    fn now(&self) -> Duration;
    fn sleep(&self, d: Duration);
}

#[derive(Debug)]
pub struct SystemTimer {
    origin: Instant,
}

impl Default for SystemTimer {
    fn default() -> Self {
        SystemTimer { origin: Instant::now() }
    }
}

impl Timer for SystemTimer {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
    fn sleep(&self, d: Duration) {
        thread::sleep(d);
    }
}

/// A timer that only moves when slept on. Records every sleep.
#[derive(Debug, Default)]
pub struct ManualTimer {
    state: Mutex<(Duration, Vec<Duration>)>,
}

impl ManualTimer {
    pub fn advance(&self, d: Duration) {
        self.state.lock().unwrap().0 += d;
    }
    pub fn sleeps(&self) -> Vec<Duration> {
        self.state.lock().unwrap().1.clone()
    }
}

impl Timer for ManualTimer {
    fn now(&self) -> Duration {
        self.state.lock().unwrap().0
    }
    fn sleep(&self, d: Duration) {
        let mut s = self.state.lock().unwrap();
        s.0 += d;
        s.1.push(d);
    }
}

/// Sliding-window limit: at most `per_minute` calls in any 60 s window.
#[derive(Debug)]
pub struct RateLimiter {
    per_minute: usize,
    issued: Mutex<VecDeque<Duration>>,
}

const WINDOW: Duration = Duration::from_secs(60);

impl RateLimiter {
    /// `per_minute` must be positive.
    pub fn new(per_minute: u32) -> Self {
        assert!(per_minute > 0, "rate limit must be positive");
        RateLimiter { per_minute: per_minute as usize, issued: Mutex::new(VecDeque::new()) }
    }

    /// Block until a call may be issued, then record it.
    pub fn acquire(&self, timer: &dyn Timer) {
        loop {
            let wait = {
                let mut issued = self.issued.lock().unwrap();
                let now = timer.now();
                while issued.front().is_some_and(|&t| now.saturating_sub(t) >= WINDOW) {
                    issued.pop_front();
                }
                if issued.len() < self.per_minute {
                    issued.push_back(now);
                    return;
                }
                (issued[0] + WINDOW).saturating_sub(now)
            };
            timer.sleep(wait.max(Duration::from_millis(1)));
        }
    }
}

/// Exponential backoff with jitter for transient network failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    /// Retries after the first call.
    pub retries: u32,
    pub base: Duration,
    pub cap: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { retries: 5, base: Duration::from_secs(1), cap: Duration::from_secs(60) }
    }
}

impl RetryPolicy {
    /// Delay before retry number `retry` (0-based): uniform in `[d/2, d]`
    /// with `d = min(cap, base * 2^retry)`. A server-provided delay wins
    /// when longer, still capped.
    pub fn delay<R: Rng + ?Sized>(&self, retry: u32, server_hint: Option<Duration>, rng: &mut R) -> Duration {
        let factor = 1u32.checked_shl(retry.min(31)).unwrap_or(u32::MAX);
        let d = self.base.saturating_mul(factor).min(self.cap);
        let jittered = if d.is_zero() { d } else { rng.gen_range(d / 2..=d) };
        match server_hint {
            Some(h) => jittered.max(h).min(self.cap),
            None => jittered,
        }
    }
}
