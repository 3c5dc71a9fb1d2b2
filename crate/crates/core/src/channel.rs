//! Discrete memoryless channels with two senders, a cooperating destination
//! input `x3`, and two outputs.
//!
//! A [`ChannelSpec`] stores the single-letter transition law
//! `w(y1, y2 | x1, x2, x3)` as a dense row-major tensor with index order
//! `(x1, x2, x3, y1, y2)`. A [`ZChannelSpec`] stores the factored form
//! `p(y2 | x1, x2, x3) * p(y1 | y2, x3)`, which makes the degradedness chain
//! `(X1, X2) - (Y2, X3) - Y1` hold structurally for every input distribution.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pmf::TOL_PMF;

/// Validated transition law of a two-sender channel with destination input.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub card_x1: usize,
    pub card_x2: usize,
    pub card_x3: usize,
    pub card_y1: usize,
    pub card_y2: usize,
    w: Vec<f64>,
    /// Set when the channel was lifted from a factored Z form, so the
    /// degradedness chain holds structurally.
    structurally_degraded: bool,
}

/// Which input to disable when degrading the channel to a sub-model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegradeMode {
    /// Disable the destination's transmission (`x3` pinned): plain cognitive
    /// interference channel.
    Cifc,
    /// Silence sender 1 (`x1` pinned): partially cooperative relay broadcast
    /// channel.
    Pcrbc,
    /// Silence sender 2 (`x2` pinned): single-relay channel.
    Relay,
}

impl ChannelSpec {
    /// Validates alphabet sizes and a flat transition array in index order
    /// `(x1, x2, x3, y1, y2)`.
    pub fn validate_channel(cards: [usize; 5], w: Vec<f64>) -> Result<Self> {
        let [card_x1, card_x2, card_x3, card_y1, card_y2] = cards;
        if cards.contains(&0) {
            return Err(Error::InvalidInput("all cardinalities must be >= 1".into()));
        }
        let expected = card_x1 * card_x2 * card_x3 * card_y1 * card_y2;
        if w.len() != expected {
            return Err(Error::LengthMismatch { expected, got: w.len() });
        }
        for (i, &p) in w.iter().enumerate() {
            if p < 0.0 || p > 1.0 + TOL_PMF {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        let out = card_y1 * card_y2;
        for x1 in 0..card_x1 {
            for x2 in 0..card_x2 {
                for x3 in 0..card_x3 {
                    let base = ((x1 * card_x2 + x2) * card_x3 + x3) * out;
                    let sum: f64 = w[base..base + out].iter().sum();
                    if (sum - 1.0).abs() > TOL_PMF {
                        return Err(Error::RowSumMismatch { x1, x2, x3, sum });
                    }
                }
            }
        }
        Ok(Self {
            card_x1,
            card_x2,
            card_x3,
            card_y1,
            card_y2,
            w,
            structurally_degraded: false,
        })
    }

    pub fn cards(&self) -> [usize; 5] {
        [self.card_x1, self.card_x2, self.card_x3, self.card_y1, self.card_y2]
    }

    pub fn raw(&self) -> &[f64] {
        &self.w
    }

    pub fn is_structurally_degraded(&self) -> bool {
        self.structurally_degraded
    }

    /// Transition probability `w(y1, y2 | x1, x2, x3)`.
    #[inline]
    pub fn w(&self, x1: usize, x2: usize, x3: usize, y1: usize, y2: usize) -> f64 {
        let idx = (((x1 * self.card_x2 + x2) * self.card_x3 + x3) * self.card_y1 + y1)
            * self.card_y2
            + y2;
        self.w[idx]
    }

    /// Pins the removed input to symbol 0 and drops its axis.
    pub fn degrade_channel(&self, mode: DegradeMode) -> ChannelSpec {
        let keep = |x1: usize, x2: usize, x3: usize| -> (usize, usize, usize) {
            match mode {
                DegradeMode::Cifc => (x1, x2, 0),
                DegradeMode::Pcrbc => (0, x2, x3),
                DegradeMode::Relay => (x1, 0, x3),
            }
        };
        let (c1, c2, c3) = match mode {
            DegradeMode::Cifc => (self.card_x1, self.card_x2, 1),
            DegradeMode::Pcrbc => (1, self.card_x2, self.card_x3),
            DegradeMode::Relay => (self.card_x1, 1, self.card_x3),
        };
        let mut w = Vec::with_capacity(c1 * c2 * c3 * self.card_y1 * self.card_y2);
        for x1 in 0..c1 {
            for x2 in 0..c2 {
                for x3 in 0..c3 {
                    let (s1, s2, s3) = keep(x1, x2, x3);
                    for y1 in 0..self.card_y1 {
                        for y2 in 0..self.card_y2 {
                            w.push(self.w(s1, s2, s3, y1, y2));
                        }
                    }
                }
            }
        }
        ChannelSpec {
            card_x1: c1,
            card_x2: c2,
            card_x3: c3,
            card_y1: self.card_y1,
            card_y2: self.card_y2,
            w,
            structurally_degraded: self.structurally_degraded,
        }
    }

    /// Draws a fully random channel with the given alphabet sizes.
    pub fn sample_random(cards: [usize; 5], seed: u64) -> ChannelSpec {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let [c1, c2, c3, cy1, cy2] = cards;
        let out = cy1 * cy2;
        let mut w = Vec::with_capacity(c1 * c2 * c3 * out);
        for _ in 0..c1 * c2 * c3 {
            let mut row: Vec<f64> = (0..out).map(|_| -f64::ln(rng.gen::<f64>())).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
            w.extend(row);
        }
        ChannelSpec::validate_channel(cards, w).expect("random rows are stochastic")
    }
}

/// Factored Z-channel: `w2 = p(y2 | x1, x2, x3)` and `w1 = p(y1 | y2, x3)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ZChannelSpec {
    pub card_x1: usize,
    pub card_x2: usize,
    pub card_x3: usize,
    pub card_y1: usize,
    pub card_y2: usize,
    /// Row-major `(x1, x2, x3, y2)`.
    pub w2: Vec<f64>,
    /// Row-major `(y2, x3, y1)`.
    pub w1: Vec<f64>,
}

impl ZChannelSpec {
    pub fn new(
        cards: [usize; 5],
        w2: Vec<f64>,
        w1: Vec<f64>,
    ) -> Result<Self> {
        let [card_x1, card_x2, card_x3, card_y1, card_y2] = cards;
        let expect2 = card_x1 * card_x2 * card_x3 * card_y2;
        if w2.len() != expect2 {
            return Err(Error::LengthMismatch { expected: expect2, got: w2.len() });
        }
        let expect1 = card_y2 * card_x3 * card_y1;
        if w1.len() != expect1 {
            return Err(Error::LengthMismatch { expected: expect1, got: w1.len() });
        }
        for (i, &p) in w2.iter().chain(w1.iter()).enumerate() {
            if p < 0.0 || p > 1.0 + TOL_PMF {
                return Err(Error::NegativeEntry { index: i, value: p });
            }
        }
        for x1 in 0..card_x1 {
            for x2 in 0..card_x2 {
                for x3 in 0..card_x3 {
                    let base = ((x1 * card_x2 + x2) * card_x3 + x3) * card_y2;
                    let sum: f64 = w2[base..base + card_y2].iter().sum();
                    if (sum - 1.0).abs() > TOL_PMF {
                        return Err(Error::RowSumMismatch { x1, x2, x3, sum });
                    }
                }
            }
        }
        for y2 in 0..card_y2 {
            for x3 in 0..card_x3 {
                let base = (y2 * card_x3 + x3) * card_y1;
                let sum: f64 = w1[base..base + card_y1].iter().sum();
                if (sum - 1.0).abs() > TOL_PMF {
                    return Err(Error::RowSumMismatch { x1: y2, x2: 0, x3, sum });
                }
            }
        }
        Ok(Self { card_x1, card_x2, card_x3, card_y1, card_y2, w2, w1 })
    }

    #[inline]
    pub fn w2(&self, x1: usize, x2: usize, x3: usize, y2: usize) -> f64 {
        self.w2[((x1 * self.card_x2 + x2) * self.card_x3 + x3) * self.card_y2 + y2]
    }

    #[inline]
    pub fn w1(&self, y2: usize, x3: usize, y1: usize) -> f64 {
        self.w1[(y2 * self.card_x3 + x3) * self.card_y1 + y1]
    }

    /// Expands the factored form into a full [`ChannelSpec`] and marks the
    /// result as structurally degraded.
    pub fn lift_z_channel(&self) -> Result<ChannelSpec> {
        let cards = [self.card_x1, self.card_x2, self.card_x3, self.card_y1, self.card_y2];
        let mut w = Vec::with_capacity(cards.iter().product());
        for x1 in 0..self.card_x1 {
            for x2 in 0..self.card_x2 {
                for x3 in 0..self.card_x3 {
                    for y1 in 0..self.card_y1 {
                        for y2 in 0..self.card_y2 {
                            w.push(self.w2(x1, x2, x3, y2) * self.w1(y2, x3, y1));
                        }
                    }
                }
            }
        }
        let mut ch = ChannelSpec::validate_channel(cards, w)?;
        ch.structurally_degraded = true;
        Ok(ch)
    }

    /// Random Z channel on which the capacity result is expected to be tight:
    /// `w2` has full support and `w1` ignores `y2`, so both the degradedness
    /// chain and `X2 - (X1, X3) - Y1` hold structurally.
    pub fn sample_capacity_class(cards: [usize; 5], seed: u64) -> ZChannelSpec {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let [c1, c2, c3, cy1, cy2] = cards;
        let mut draw_row = |n: usize| {
            let mut row: Vec<f64> = (0..n).map(|_| -f64::ln(rng.gen::<f64>())).collect();
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= s);
            row
        };
        let mut w2 = Vec::with_capacity(c1 * c2 * c3 * cy2);
        for _ in 0..c1 * c2 * c3 {
            w2.extend(draw_row(cy2));
        }
        // One y1 row per x3, replicated across y2.
        let per_x3: Vec<Vec<f64>> = (0..c3).map(|_| draw_row(cy1)).collect();
        let mut w1 = Vec::with_capacity(cy2 * c3 * cy1);
        for _y2 in 0..cy2 {
            for x3 in 0..c3 {
                w1.extend(per_x3[x3].iter().copied());
            }
        }
        ZChannelSpec::new(cards, w2, w1).expect("rows are stochastic")
    }

    /// Binary Z channel with `y2 = x1 XOR x2` and `y1 = x3`.
    pub fn xor_example() -> ZChannelSpec {
        let mut w2 = vec![0.0; 2 * 2 * 2 * 2];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    let y2 = x1 ^ x2;
                    w2[((x1 * 2 + x2) * 2 + x3) * 2 + y2] = 1.0;
                }
            }
        }
        let mut w1 = vec![0.0; 2 * 2 * 2];
        for y2 in 0..2usize {
            for x3 in 0..2usize {
                w1[(y2 * 2 + x3) * 2 + x3] = 1.0;
            }
        }
        ZChannelSpec::new([2, 2, 2, 2, 2], w2, w1).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y1 = x1, y2 = x2, binary everywhere.
    fn identity_channel() -> ChannelSpec {
        let mut w = vec![0.0; 32];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    w[(((x1 * 2 + x2) * 2 + x3) * 2 + x1) * 2 + x2] = 1.0;
                }
            }
        }
        ChannelSpec::validate_channel([2, 2, 2, 2, 2], w).unwrap()
    }

    #[test]
    fn deterministic_indicator_tensor_is_valid() {
        identity_channel();
    }

    #[test]
    fn negative_entry_rejected() {
        let mut w = identity_channel().raw().to_vec();
        w[3] = -0.1;
        assert!(matches!(
            ChannelSpec::validate_channel([2, 2, 2, 2, 2], w),
            Err(Error::NegativeEntry { .. })
        ));
    }

    #[test]
    fn short_rows_name_first_bad_triple() {
        let mut w = identity_channel().raw().to_vec();
        // Scale down the (0,1,0) row.
        let (x1, x2, x3) = (0usize, 1usize, 0usize);
        let base = ((x1 * 2 + x2) * 2 + x3) * 4;
        for e in &mut w[base..base + 4] {
            *e *= 0.9;
        }
        match ChannelSpec::validate_channel([2, 2, 2, 2, 2], w) {
            Err(Error::RowSumMismatch { x1, x2, x3, .. }) => {
                assert_eq!((x1, x2, x3), (0, 1, 0));
            }
            other => panic!("expected RowSumMismatch, got {other:?}"),
        }
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            ChannelSpec::validate_channel([2, 2, 2, 2, 2], vec![0.5; 31]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn xor_lift_y1_depends_only_on_x3() {
        let ch = ZChannelSpec::xor_example().lift_z_channel().unwrap();
        assert!(ch.is_structurally_degraded());
        for x1 in 0..2 {
            for x2 in 0..2 {
                for x3 in 0..2 {
                    for y1 in 0..2 {
                        let p: f64 = (0..2).map(|y2| ch.w(x1, x2, x3, y1, y2)).sum();
                        assert_eq!(p, if y1 == x3 { 1.0 } else { 0.0 });
                    }
                }
            }
        }
    }

    #[test]
    fn copy_lift_forces_y1_equals_y2() {
        // w2: y2 = x2; w1: y1 = y2.
        let mut w2 = vec![0.0; 16];
        for x1 in 0..2usize {
            for x2 in 0..2usize {
                for x3 in 0..2usize {
                    w2[((x1 * 2 + x2) * 2 + x3) * 2 + x2] = 1.0;
                }
            }
        }
        let mut w1 = vec![0.0; 8];
        for y2 in 0..2usize {
            for x3 in 0..2usize {
                w1[(y2 * 2 + x3) * 2 + y2] = 1.0;
            }
        }
        let z = ZChannelSpec::new([2, 2, 2, 2, 2], w2, w1).unwrap();
        let ch = z.lift_z_channel().unwrap();
        for x1 in 0..2 {
            for x2 in 0..2 {
                for x3 in 0..2 {
                    let agree: f64 = (0..2).map(|y| ch.w(x1, x2, x3, y, y)).sum();
                    assert!((agree - 1.0).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn random_lift_rows_sum_to_one() {
        for seed in 0..10 {
            let z = ZChannelSpec::sample_capacity_class([2, 2, 2, 2, 2], seed);
            let ch = z.lift_z_channel().unwrap();
            for x1 in 0..2 {
                for x2 in 0..2 {
                    for x3 in 0..2 {
                        let mut sum = 0.0;
                        for y1 in 0..2 {
                            for y2 in 0..2 {
                                sum += ch.w(x1, x2, x3, y1, y2);
                            }
                        }
                        assert!((sum - 1.0).abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn degrade_cifc_slices_x3_zero() {
        let ch = ChannelSpec::sample_random([2, 2, 2, 2, 2], 9);
        let d = ch.degrade_channel(DegradeMode::Cifc);
        assert_eq!(d.card_x3, 1);
        for x1 in 0..2 {
            for x2 in 0..2 {
                for y1 in 0..2 {
                    for y2 in 0..2 {
                        assert_eq!(d.w(x1, x2, 0, y1, y2), ch.w(x1, x2, 0, y1, y2));
                    }
                }
            }
        }
    }

    #[test]
    fn degrade_composes() {
        let ch = ChannelSpec::sample_random([2, 2, 2, 2, 2], 10);
        let d = ch.degrade_channel(DegradeMode::Pcrbc).degrade_channel(DegradeMode::Cifc);
        assert_eq!(d.card_x1, 1);
        assert_eq!(d.card_x3, 1);
    }

    #[test]
    fn relay_mode_on_xor_z() {
        let ch = ZChannelSpec::xor_example().lift_z_channel().unwrap();
        let d = ch.degrade_channel(DegradeMode::Relay);
        // With x2 pinned to 0, y2 = x1.
        for x1 in 0..2 {
            for x3 in 0..2 {
                let p: f64 = (0..2).map(|y1| d.w(x1, 0, x3, y1, x1)).sum();
                assert!((p - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn degrade_is_idempotent() {
        let ch = ChannelSpec::sample_random([2, 3, 2, 2, 3], 11);
        for mode in [DegradeMode::Cifc, DegradeMode::Pcrbc, DegradeMode::Relay] {
            let once = ch.degrade_channel(mode);
            let twice = once.degrade_channel(mode);
            assert_eq!(once.cards(), twice.cards());
            assert_eq!(once.raw(), twice.raw());
        }
    }
}
