//! Space-reduction preprocessing: rounding weights to powers of `1 + eps`,
//! the running-maximum threshold filter, and a compact potential store.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A weight rounded down to `(1 + eps)^exponent`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QuantizedWeight {
    pub exponent: i32,
}

impl QuantizedWeight {
    pub fn value(self, epsilon: f64) -> f64 {
        (1.0 + epsilon).powi(self.exponent)
    }
}

/// Largest `k` with `(1 + eps)^k <= w`.
///
/// The logarithm gives a first guess; the loop settles rounding at exact
/// powers so that `decoded <= w < decoded * (1 + eps)` holds for the same
/// `powi` used everywhere else.
pub fn quantize(w: f64, epsilon: f64) -> QuantizedWeight {
    debug_assert!(w > 0.0 && epsilon > 0.0);
    let ratio = 1.0 + epsilon;
    let mut k = (w.ln() / ratio.ln()).floor() as i32;
    while ratio.powi(k) > w {
        k -= 1;
    }
    while ratio.powi(k + 1) <= w {
        k += 1;
    }
    QuantizedWeight { exponent: k }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterDecision {
    Keep,
    Drop,
}

/// Drops edges lighter than `eps * W_max / (2 (1 + eps) n^2)`, where `W_max`
/// is the heaviest weight seen so far (including the edge being tested).
///
/// Without a vertex bound the filter keeps everything.
#[derive(Clone, Debug)]
pub struct ThresholdFilter {
    epsilon: f64,
    n_bound: Option<u64>,
    w_max: f64,
    dropped: u64,
}

impl ThresholdFilter {
    pub fn new(epsilon: f64, n_bound: Option<u64>) -> Self {
        ThresholdFilter {
            epsilon,
            n_bound,
            w_max: 0.0,
            dropped: 0,
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.n_bound.is_some()
    }

    pub fn w_max(&self) -> f64 {
        self.w_max
    }

    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    /// Current threshold; zero when disabled.
    pub fn delta(&self) -> f64 {
        match self.n_bound {
            Some(n) => {
                let n = n.max(1) as f64;
                self.epsilon * self.w_max / (2.0 * (1.0 + self.epsilon) * n * n)
            }
            None => 0.0,
        }
    }

    pub fn admit(&mut self, w: f64) -> FilterDecision {
        if w > self.w_max {
            self.w_max = w;
        }
        if self.is_enabled() && w < self.delta() {
            self.dropped += 1;
            FilterDecision::Drop
        } else {
            FilterDecision::Keep
        }
    }
}

/// Per-vertex digits over a sliding window of exponents.
#[derive(Clone, Debug, Default)]
struct VertexDigits {
    /// Exponent represented by `digits[0]`.
    base: i32,
    digits: Vec<u8>,
    /// Mass below `base`, rounded up to whole units of `(1+eps)^base`.
    floor_units: u64,
    value: f64,
    /// How far `value` overstates the exact sum of added amounts.
    slack: f64,
}

/// Space summary of a [`CompactPhi`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactFootprint {
    pub vertices: usize,
    pub window: u32,
    pub digit_bits: u32,
    pub floor_unit_bits: u32,
    pub w_max_exponent_bits: u32,
    pub bits_total: u64,
    pub bytes_per_vertex: f64,
}

/// Potentials stored as small digits at exponent positions
/// `[w_max_exponent - L, w_max_exponent]`, `L = ceil(log_{1+eps}(n^2/eps))`.
///
/// A vertex value decodes to `sum digit_i (1+eps)^i + floor_units * (1+eps)^base`.
/// Amounts added are powers of `1 + eps`. An amount can recur at one vertex
/// only a bounded number of times because each push multiplies the potential
/// by at least `1 + eps/(1+eps)`; exceeding `max_digit` is reported as a
/// [`Error::Distinctness`] violation.
///
/// Mass that falls below the window is folded into `floor_units`, rounded up,
/// so the decoded value never understates the exact sum. The overstatement
/// is tracked per vertex as `small_mass_bound`.
#[derive(Clone, Debug)]
pub struct CompactPhi {
    epsilon: f64,
    ratio: f64,
    n_bound: u64,
    window: u32,
    max_digit: u8,
    w_max_exponent: Option<i32>,
    vertices: Vec<VertexDigits>,
    folds: u64,
}

impl CompactPhi {
    pub fn new(epsilon: f64, n_bound: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::EpsilonOutOfRange(epsilon, "(0, 1]"));
        }
        let ratio = 1.0 + epsilon;
        let n = n_bound.max(2) as f64;
        let window = ((n * n / epsilon).ln() / ratio.ln()).ceil().max(1.0) as u32;
        let max_digit = (2.0 + 1.0 / epsilon).ceil() - 1.0;
        if max_digit > u8::MAX as f64 {
            return Err(Error::Config(format!(
                "epsilon {epsilon} is too small for the compact potential store"
            )));
        }
        Ok(CompactPhi {
            epsilon,
            ratio,
            n_bound,
            window,
            max_digit: max_digit as u8,
            w_max_exponent: None,
            vertices: Vec::new(),
            folds: 0,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn window(&self) -> u32 {
        self.window
    }

    pub fn max_digit(&self) -> u8 {
        self.max_digit
    }

    pub fn w_max_exponent(&self) -> Option<i32> {
        self.w_max_exponent
    }

    pub fn folds(&self) -> u64 {
        self.folds
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Records a (quantized) stream weight; may slide the window upwards.
    pub fn observe_weight(&mut self, w: crate::compaction::QuantizedWeight) {
        self.w_max_exponent = Some(match self.w_max_exponent {
            Some(k) => k.max(w.exponent),
            None => w.exponent,
        });
    }

    fn bottom(&self) -> i32 {
        self.w_max_exponent.unwrap_or(0) - self.window as i32
    }

    fn ensure(&mut self, v: usize) {
        if v >= self.vertices.len() {
            self.vertices.resize_with(v + 1, VertexDigits::default);
        }
    }

    fn normalize(&mut self, v: usize) {
        self.ensure(v);
        let bottom = self.bottom();
        let ratio = self.ratio;
        let width = self.window as usize + 1;
        let slot = &mut self.vertices[v];
        if slot.digits.is_empty() {
            slot.digits = vec![0; width];
            slot.base = bottom;
            return;
        }
        if slot.base >= bottom {
            return;
        }
        let shift = (bottom - slot.base) as usize;
        let expired = shift.min(width);
        let mut folded = slot.floor_units as f64 * ratio.powi(slot.base);
        for (i, &d) in slot.digits[..expired].iter().enumerate() {
            folded += d as f64 * ratio.powi(slot.base + i as i32);
        }
        let unit = ratio.powi(bottom);
        let units = if folded > 0.0 { (folded / unit).ceil() } else { 0.0 };
        slot.slack += (units * unit - folded).max(0.0);
        slot.floor_units = units as u64;
        slot.digits.drain(..expired);
        slot.digits.resize(width, 0);
        slot.base = bottom;
        let mut value = slot.floor_units as f64 * unit;
        for (i, &d) in slot.digits.iter().enumerate() {
            if d > 0 {
                value += d as f64 * ratio.powi(bottom + i as i32);
            }
        }
        slot.value = value;
        self.folds += 1;
    }

    /// Decoded potential of `v`.
    pub fn get(&mut self, v: usize) -> f64 {
        if v >= self.vertices.len() {
            return 0.0;
        }
        self.normalize(v);
        self.vertices[v].value
    }

    /// Adds `(1+eps)^amount.exponent` to the potential of `v`.
    pub fn add(&mut self, v: usize, amount: QuantizedWeight) -> Result<()> {
        let k = amount.exponent;
        if self.w_max_exponent.is_none_or(|m| k > m) {
            self.observe_weight(amount);
        }
        self.normalize(v);
        let ratio = self.ratio;
        let max_digit = self.max_digit;
        let slot = &mut self.vertices[v];
        if k >= slot.base {
            let digit = &mut slot.digits[(k - slot.base) as usize];
            if *digit >= max_digit {
                return Err(Error::Distinctness {
                    vertex: v as u32,
                    position: k,
                    max: max_digit,
                });
            }
            *digit += 1;
            slot.value += ratio.powi(k);
        } else {
            let unit = ratio.powi(slot.base);
            slot.floor_units += 1;
            slot.slack += unit - ratio.powi(k);
            slot.value += unit;
        }
        Ok(())
    }

    /// Tracked overstatement of the decoded value of `v`.
    pub fn small_mass_bound(&self, v: usize) -> f64 {
        self.vertices.get(v).map_or(0.0, |s| s.slack)
    }

    /// The analytic per-vertex allowance `eps * W_max / n`.
    pub fn small_mass_cap(&self) -> f64 {
        match self.w_max_exponent {
            Some(k) => self.epsilon * self.ratio.powi(k) / self.n_bound.max(1) as f64,
            None => 0.0,
        }
    }

    /// Number of set digit positions at `v` (for tests and reports).
    pub fn occupied_positions(&self, v: usize) -> usize {
        self.vertices
            .get(v)
            .map_or(0, |s| s.digits.iter().filter(|&&d| d > 0).count())
    }

    /// Normalizes every vertex and returns decoded values.
    pub fn decode_all(&mut self) -> Vec<f64> {
        (0..self.vertices.len()).map(|v| self.get(v)).collect()
    }

    pub fn footprint(&self) -> CompactFootprint {
        let digit_bits = 8 - self.max_digit.leading_zeros();
        let max_units = self.vertices.iter().map(|s| s.floor_units).max().unwrap_or(0);
        let floor_unit_bits = (64 - max_units.leading_zeros()).max(1);
        let w_max_exponent_bits = 32 - self.w_max_exponent.unwrap_or(0).unsigned_abs().leading_zeros() + 1;
        let per_vertex = (self.window as u64 + 1) * digit_bits as u64 + floor_unit_bits as u64;
        let vertices = self.vertices.len();
        let bits_total = per_vertex * vertices as u64 + w_max_exponent_bits as u64;
        CompactFootprint {
            vertices,
            window: self.window,
            digit_bits,
            floor_unit_bits,
            w_max_exponent_bits,
            bits_total,
            bytes_per_vertex: if vertices == 0 {
                0.0
            } else {
                bits_total as f64 / 8.0 / vertices as f64
            },
        }
    }
}
