//! Post-processing of a policy's actions: jitter correction by expert
//! takeover, and a one-step lethality veto.

mod action;
mod jitter;

pub use action::{apply_action_filter, is_unsafe, FilterOutcome, DANGER_LIFE};
pub use jitter::{detect_jitter, JitterCorrector, JitterVerdict, PositionHistory};

use rand::Rng;

/// Independent per-trajectory draws of (jitter armed, action filter armed).
pub fn probabilistic_arming<R: Rng + ?Sized>(
    rng: &mut R,
    p_jitter: f64,
    p_action: f64,
) -> (bool, bool) {
    let jitter = rng.gen_bool(p_jitter.clamp(0.0, 1.0));
    let action = rng.gen_bool(p_action.clamp(0.0, 1.0));
    (jitter, action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn degenerate_arming() {
        let mut r = rng::seeded(0);
        for _ in 0..100 {
            assert_eq!(probabilistic_arming(&mut r, 1.0, 1.0), (true, true));
            assert_eq!(probabilistic_arming(&mut r, 0.0, 0.0), (false, false));
        }
    }

    #[test]
    fn arming_fractions_concentrate() {
        let mut r = rng::seeded(3);
        let n = 100_000;
        let (mut j, mut a) = (0, 0);
        for _ in 0..n {
            let (x, y) = probabilistic_arming(&mut r, 0.10, 0.30);
            j += x as usize;
            a += y as usize;
        }
        assert!((j as f64 / n as f64 - 0.10).abs() < 0.01);
        assert!((a as f64 / n as f64 - 0.30).abs() < 0.01);
    }
}
