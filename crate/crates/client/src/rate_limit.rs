//! Request pacing.
//!
//! The limiter spaces requests at fixed `1/limit` intervals with no burst
//! allowance, which keeps any 1-second sliding window at or under the limit.

use std::sync::Mutex;
use std::time::{Duration, Instant};

pub struct RateLimiter {
    min_interval: Duration,
    next_free: Mutex<Option<Instant>>,
}

impl RateLimiter {
    pub fn new(limit_per_second: f64) -> Self {
        assert!(limit_per_second > 0.0, "rate limit must be positive");
        Self {
            min_interval: Duration::from_secs_f64(1.0 / limit_per_second),
            next_free: Mutex::new(None),
        }
    }

    /// Blocks until a request slot is available and claims it.
    pub fn acquire(&self) {
        let slot = {
            let mut next = self.next_free.lock().expect("limiter lock poisoned");
            let now = Instant::now();
            let slot = match *next {
                Some(at) if at > now => at,
                _ => now,
            };
            *next = Some(slot + self.min_interval);
            slot
        };
        let now = Instant::now();
        if slot > now {
            std::thread::sleep(slot - now);
        }
    }
}

/// Runs `op` over the requests under the rate limit, returning results keyed
/// by request id. Completion order is unspecified by contract even though
/// this implementation is sequential.
pub fn rate_limited_execute<T, R>(
    requests: Vec<(u64, T)>,
    limit_per_second: f64,
    mut op: impl FnMut(&T) -> R,
) -> Vec<(u64, R)> {
    let limiter = RateLimiter::new(limit_per_second);
    requests
        .into_iter()
        .map(|(id, request)| {
            limiter.acquire();
            (id, op(&request))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_requests_at_five_per_second_take_at_least_1_8s() {
        let requests: Vec<(u64, ())> = (0..10).map(|i| (i, ())).collect();
        let start = Instant::now();
        let timestamps: Vec<(u64, Instant)> =
            rate_limited_execute(requests, 5.0, |_| Instant::now());
        let elapsed = start.elapsed();
        assert!(elapsed >= Duration::from_millis(1800), "elapsed {elapsed:?}");
        assert!(elapsed < Duration::from_secs(10), "elapsed {elapsed:?}");

        // Sliding-window check over the recorded instants.
        let instants: Vec<Instant> = timestamps.iter().map(|&(_, t)| t).collect();
        for (i, &t) in instants.iter().enumerate() {
            let in_window = instants
                .iter()
                .filter(|&&u| u >= t && u < t + Duration::from_secs(1))
                .count();
            assert!(in_window <= 5, "window starting at request {i} holds {in_window}");
        }
    }

    #[test]
    fn single_request_is_immediate() {
        let start = Instant::now();
        rate_limited_execute(vec![(0u64, ())], 5.0, |_| ());
        assert!(start.elapsed() < Duration::from_millis(100));
    }

    #[test]
    fn high_limit_is_fast() {
        let requests: Vec<(u64, ())> = (0..10).map(|i| (i, ())).collect();
        let start = Instant::now();
        rate_limited_execute(requests, 1000.0, |_| ());
        assert!(start.elapsed() < Duration::from_millis(500));
    }

    #[test]
    fn results_are_keyed_by_request_id() {
        let requests: Vec<(u64, u64)> = (0..5).map(|i| (i, i * 10)).collect();
        let results = rate_limited_execute(requests, 1000.0, |&v| v + 1);
        for (id, r) in results {
            assert_eq!(r, id * 10 + 1);
        }
    }
}
