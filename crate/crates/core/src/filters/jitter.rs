use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::Position;

const STATIC_WINDOW: usize = 15;
const ODD_WINDOW: usize = 10;
const EVEN_WINDOW: usize = 11;
const LONG_WINDOW: usize = 35;

/// Row (`xs`) and column (`ys`) coordinates, one entry per tick.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PositionHistory {
    pub xs: Vec<u8>,
    pub ys: Vec<u8>,
    pub takeover_remaining: u8,
}

impl PositionHistory {
    pub fn push(&mut self, p: Position) {
        self.xs.push(p.row);
        self.ys.push(p.col);
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn clear(&mut self) {
        self.xs.clear();
        self.ys.clear();
        self.takeover_remaining = 0;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum JitterVerdict {
    None,
    Static,
    OscillateX,
    OscillateY,
}

impl JitterVerdict {
    /// Ticks handed to the expert, counting the current one.
    pub fn expert_steps(self) -> u8 {
        match self {
            JitterVerdict::None => 0,
            JitterVerdict::Static => 3,
            JitterVerdict::OscillateX | JitterVerdict::OscillateY => 2,
        }
    }
}

/// Distinct values of `v[len-window ..]` taken every `step`; `None` when
/// the history is shorter than the window.
fn tail_set(v: &[u8], window: usize, step: usize) -> Option<BTreeSet<u8>> {
    if v.len() < window {
        return None;
    }
    Some(
        v[v.len() - window..]
            .iter()
            .step_by(step)
            .copied()
            .collect(),
    )
}

fn oscillates(a: &[u8], other: &[u8]) -> bool {
    let odd = tail_set(a, ODD_WINDOW, 2);
    let even = tail_set(a, EVEN_WINDOW, 2);
    let alternating = match (&odd, &even) {
        (Some(odd), Some(even)) => {
            odd.len() == 1 && even.len() == 1 && even.difference(odd).next().is_some()
        }
        _ => false,
    };
    let long = tail_set(a, LONG_WINDOW, 1).is_some_and(|s| s.len() == 2)
        && tail_set(other, LONG_WINDOW, 1).is_some_and(|s| s.len() == 1);
    alternating || long
}

/// Classifies the recent trajectory: standing still for 15 ticks, or
/// bouncing between two values along one axis.
pub fn detect_jitter(h: &PositionHistory) -> JitterVerdict {
    let still = |v: &[u8]| tail_set(v, STATIC_WINDOW, 1).is_some_and(|s| s.len() == 1);
    if still(&h.xs) && still(&h.ys) {
        JitterVerdict::Static
    } else if oscillates(&h.xs, &h.ys) {
        JitterVerdict::OscillateX
    } else if oscillates(&h.ys, &h.xs) {
        JitterVerdict::OscillateY
    } else {
        JitterVerdict::None
    }
}

/// Per-agent jitter state: records one position per tick and decides
/// whether the expert acts.
#[derive(Clone, Debug, Default)]
pub struct JitterCorrector {
    pub history: PositionHistory,
    pub takeovers: u32,
}

impl JitterCorrector {
    pub fn reset(&mut self) {
        self.history.clear();
        self.takeovers = 0;
    }

    /// Appends this tick's position; returns true when the expert should
    /// choose this tick's action. Detection is skipped while a takeover runs.
    pub fn expert_turn(&mut self, p: Position) -> bool {
        self.history.push(p);
        if self.history.takeover_remaining > 0 {
            self.history.takeover_remaining -= 1;
            return true;
        }
        let verdict = detect_jitter(&self.history);
        match verdict.expert_steps() {
            0 => false,
            n => {
                self.takeovers += 1;
                self.history.takeover_remaining = n - 1;
                true
            }
        }
    }
}
