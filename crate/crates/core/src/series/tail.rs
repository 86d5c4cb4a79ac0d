use serde::{Deserialize, Serialize};

use crate::valuation::{exp_threshold, factorial_valuation};

/// Shape of a tail bound `v(a_j) >= offset + growth(j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Growth {
    /// `growth(j) = 0`.
    Flat,
    /// `growth(j) = -v_p((j + shift)!)`, the exact exponential profile.
    Legendre { p: u64, shift: u64 },
    /// `growth(j) = -floor(max(j + shift - 1, 0) / (p - 1))`, which bounds the
    /// Legendre profile from below and is nonincreasing.
    Sharpened { p: u64, shift: u64 },
}

/// Certified lower bound on the valuations of the coefficients a series does
/// not store.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TailProfile {
    pub offset: i64,
    pub growth: Growth,
}

fn sharpened(p: u64, n: u64) -> i64 {
    (n.saturating_sub(1) / (p - 1)) as i64
}

impl TailProfile {
    pub fn flat(offset: i64) -> Self {
        TailProfile { offset, growth: Growth::Flat }
    }

    /// The profile of `1/j!` over `Q_p`.
    pub fn exponential(p: u64) -> Self {
        TailProfile { offset: 0, growth: Growth::Legendre { p, shift: 0 } }
    }

    pub fn legendre(p: u64, offset: i64, shift: u64) -> Self {
        TailProfile { offset, growth: Growth::Legendre { p, shift } }
    }

    pub fn sharpened(p: u64, offset: i64, shift: u64) -> Self {
        TailProfile { offset, growth: Growth::Sharpened { p, shift } }
    }

    /// The growth term alone, without the offset.
    pub fn growth_at(&self, j: u64) -> i64 {
        match self.growth {
            Growth::Flat => 0,
            Growth::Legendre { p, shift } => -(factorial_valuation(p, j + shift) as i64),
            Growth::Sharpened { p, shift } => -sharpened(p, j + shift),
        }
    }

    /// Lower bound for `v(a_j)`.
    pub fn lower_bound(&self, j: u64) -> i64 {
        self.offset + self.growth_at(j)
    }

    /// A nonincreasing bound below `lower_bound`, used to stop scans.
    fn envelope(&self, j: u64) -> i64 {
        match self.growth {
            Growth::Flat => self.offset,
            Growth::Legendre { p, shift } | Growth::Sharpened { p, shift } => {
                self.offset - sharpened(p, j + shift)
            }
        }
    }

    /// Whether `lower_bound(j) + j*m` tends to infinity.
    pub fn admits(&self, m: i64) -> bool {
        m >= self.threshold()
    }

    /// Least admissible radius exponent.
    pub fn threshold(&self) -> i64 {
        match self.growth {
            Growth::Flat => 1,
            Growth::Legendre { p, .. } | Growth::Sharpened { p, .. } => exp_threshold(p),
        }
    }

    /// Exact `min_{j >= start} lower_bound(j) + j*m`; requires `admits(m)`.
    pub fn min_term(&self, start: u64, m: i64) -> i64 {
        debug_assert!(self.admits(m));
        let mut best = self.lower_bound(start) + start as i64 * m;
        let mut j = start + 1;
        // envelope(j) + j*m is nondecreasing for admissible m
        while self.envelope(j) + j as i64 * m < best {
            best = best.min(self.lower_bound(j) + j as i64 * m);
            j += 1;
        }
        best
    }

    /// Smallest `n` such that every `j >= n` has `lower_bound(j) + j*m >= target`.
    pub fn terms_needed(&self, m: i64, target: i64) -> u64 {
        debug_assert!(self.admits(m));
        let mut needed = 0;
        let mut j = 0u64;
        while self.envelope(j) + j as i64 * m < target {
            if self.lower_bound(j) + j as i64 * m < target {
                needed = j + 1;
            }
            j += 1;
        }
        needed
    }

    /// Bound for the index-shifted sequence `b_j = c * a_(j + by)`, `v(c) >= 0`.
    pub(crate) fn shifted(&self, by: u64) -> Self {
        let growth = match self.growth {
            Growth::Flat => Growth::Flat,
            Growth::Legendre { p, shift } => Growth::Legendre { p, shift: shift + by },
            Growth::Sharpened { p, shift } => Growth::Sharpened { p, shift: shift + by },
        };
        TailProfile { growth, ..*self }
    }

    /// Monotone version of this profile: bounds `min_{l >= j} v(a_l) + (l - j) w`
    /// for any `w >= 1`.
    pub(crate) fn monotone(&self) -> Self {
        let growth = match self.growth {
            Growth::Flat => Growth::Flat,
            Growth::Legendre { p, shift } | Growth::Sharpened { p, shift } => {
                Growth::Sharpened { p, shift }
            }
        };
        TailProfile { growth, ..*self }
    }

    /// Same growth with the offset lowered so the bound also holds for the
    /// given `(index, valuation bound)` pairs.
    pub(crate) fn covering(&self, stored: impl Iterator<Item = (u64, i64)>) -> Self {
        let offset = stored.fold(self.offset, |acc, (j, v)| acc.min(v - self.growth_at(j)));
        TailProfile { offset, ..*self }
    }

    /// Bound on `Σ_{j} a_j b_(n-j)` given covering bounds for both sequences.
    pub(crate) fn convolve(&self, other: &Self) -> Self {
        let offset = self.offset + other.offset;
        let growth = match (self.growth, other.growth) {
            (Growth::Flat, g) | (g, Growth::Flat) => g,
            (Growth::Legendre { p, shift: a }, Growth::Legendre { shift: b, .. }) => {
                Growth::Legendre { p, shift: a + b }
            }
            (Growth::Legendre { p, shift: a } | Growth::Sharpened { p, shift: a }, other) => {
                let b = match other {
                    Growth::Legendre { shift, .. } | Growth::Sharpened { shift, .. } => shift,
                    Growth::Flat => 0,
                };
                Growth::Sharpened { p, shift: a + b }
            }
        };
        TailProfile { offset, growth }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_min(t: &TailProfile, start: u64, m: i64) -> i64 {
        (start..start + 400).map(|j| t.lower_bound(j) + j as i64 * m).min().unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(TailProfile::exponential(5).threshold(), 1);
        assert_eq!(TailProfile::exponential(2).threshold(), 2);
        assert_eq!(TailProfile::flat(0).threshold(), 1);
        assert!(!TailProfile::exponential(2).admits(1));
    }

    #[test]
    fn exponential_terms_needed() {
        // j*1 - v_5(j!) >= 3 first holds for good at j = 3
        let t = TailProfile::exponential(5);
        assert_eq!(t.terms_needed(1, 3), 3);
        assert_eq!(t.min_term(3, 1), 3);
    }

    #[test]
    fn envelope_is_below_lower_bound() {
        for p in [2u64, 3, 5, 7] {
            let t = TailProfile::legendre(p, 0, 1);
            for j in 0..300 {
                assert!(t.envelope(j) <= t.lower_bound(j));
            }
        }
    }

    proptest! {
        #[test]
        fn min_term_is_exact(pi in 0usize..4, shift in 0u64..5, start in 0u64..60, extra in 0i64..3, sharp: bool) {
            let p = [2u64, 3, 5, 7][pi];
            let t = if sharp { TailProfile::sharpened(p, 2, shift) } else { TailProfile::legendre(p, 2, shift) };
            let m = t.threshold() + extra;
            prop_assert_eq!(t.min_term(start, m), brute_min(&t, start, m));
        }

        #[test]
        fn terms_needed_is_tight(pi in 0usize..4, extra in 0i64..3, target in 0i64..40) {
            let p = [2u64, 3, 5, 7][pi];
            let t = TailProfile::exponential(p);
            let m = t.threshold() + extra;
            let n = t.terms_needed(m, target);
            prop_assert!(brute_min(&t, n, m) >= target);
            if n > 0 {
                prop_assert!(t.lower_bound(n - 1) + (n as i64 - 1) * m < target);
            }
        }

        #[test]
        fn convolution_covers_products(pi in 0usize..3, s1 in 0u64..4, s2 in 0u64..4, n in 0u64..80, kinds in 0usize..9) {
            let p = [2u64, 3, 5][pi];
            let make = |k: usize, s: u64| match k {
                0 => TailProfile::flat(1),
                1 => TailProfile::legendre(p, -1, s),
                _ => TailProfile::sharpened(p, 0, s),
            };
            let a = make(kinds / 3, s1);
            let b = make(kinds % 3, s2);
            let c = a.convolve(&b);
            let direct = (0..=n).map(|j| a.lower_bound(j) + b.lower_bound(n - j)).min().unwrap();
            prop_assert!(c.lower_bound(n) <= direct);
        }
    }
}
