//! Half-integer quantum numbers and the `-j..=j` index ranges built from them.
//!
//! Every index in the two-mode bookkeeping (`j`, `mu`, `k = (j + mu) / 2`,
//! `m`, ...) is a multiple of one half. Values are stored doubled so that
//! sums, differences and equality tests are exact.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Largest photon number accepted anywhere in the crate.
pub const MAX_PHOTONS: u32 = 4096;

/// A half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt {
    twice: i32,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { twice: 0 };
    pub const HALF: HalfInt = HalfInt { twice: 1 };
    pub const ONE: HalfInt = HalfInt { twice: 2 };

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt { twice }
    }

    pub const fn from_int(value: i32) -> Self {
        HalfInt { twice: 2 * value }
    }

    /// `j = N / 2` for an `N`-photon two-mode state.
    pub const fn from_photon_number(n: u32) -> Self {
        HalfInt { twice: n as i32 }
    }

    pub const fn twice(self) -> i32 {
        self.twice
    }

    pub const fn is_integral(self) -> bool {
        self.twice % 2 == 0
    }

    /// The integer value, if this half-integer is integral.
    pub const fn to_int(self) -> Option<i32> {
        if self.is_integral() {
            Some(self.twice / 2)
        } else {
            None
        }
    }

    pub fn to_f64(self) -> f64 {
        f64::from(self.twice) / 2.0
    }

    pub const fn abs(self) -> Self {
        HalfInt {
            twice: self.twice.abs(),
        }
    }

    /// Halves the value. Only defined when the result is itself a half-integer,
    /// i.e. when `self` is integral.
    pub const fn half(self) -> Option<Self> {
        if self.is_integral() {
            Some(HalfInt {
                twice: self.twice / 2,
            })
        } else {
            None
        }
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice + rhs.twice,
        }
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt {
            twice: self.twice - rhs.twice,
        }
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt { twice: -self.twice }
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integral() {
            write!(f, "{}", self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

/// The ordered values `-j, -j + 1, ..., j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpinRange {
    j: HalfInt,
}

impl SpinRange {
    pub fn new(j: HalfInt) -> Result<Self> {
        if j.twice() < 0 {
            return Err(Error::NegativeSpin(j));
        }
        Ok(SpinRange { j })
    }

    pub fn j(&self) -> HalfInt {
        self.j
    }

    pub fn len(&self) -> usize {
        self.j.twice() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = HalfInt> + ExactSizeIterator {
        let j = self.j.twice();
        (0..j as usize + 1).map(move |i| HalfInt::from_twice(2 * i as i32 - j))
    }

    /// Checks that `m` is one of the values in the range.
    pub fn check(&self, m: HalfInt) -> Result<()> {
        if m.abs() > self.j {
            return Err(Error::IndexOutOfRange { index: m, j: self.j });
        }
        if !(self.j - m).is_integral() {
            return Err(Error::IndexParity { index: m, j: self.j });
        }
        Ok(())
    }

    /// Dense position of `m`, counting from `-j`.
    pub fn index_of(&self, m: HalfInt) -> Option<usize> {
        self.check(m).ok()?;
        Some(((m + self.j).twice() / 2) as usize)
    }

    pub fn value_at(&self, index: usize) -> Option<HalfInt> {
        (index < self.len()).then(|| HalfInt::from_twice(2 * index as i32 - self.j.twice()))
    }
}

/// `k = (j + mu) / 2`: the spin of the (signal, vacuum) pair entering the
/// loss beam splitter when mode `a` carries `j + mu` photons.
pub fn k_of(j: HalfInt, mu: HalfInt) -> Result<HalfInt> {
    SpinRange::new(j)?.check(mu)?;
    // j + mu is the photon count of mode a, an integer.
    Ok(HalfInt::from_twice((j + mu).twice() / 2))
}
