use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use super::gf::Gf;

/// Exact commutative ring element.
///
/// Elements carry whatever context they need (field tables, moduli), so the
/// trait methods that create new elements take `&self` as a template.
/// Equality is decidable and `inv` decides whether an element is a unit.
pub trait Ring:
    Clone
    + PartialEq
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    /// Zero with no precision loss attached; differs from `is_zero` only
    /// for truncated series, where O(x^n) is not an exact zero.
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }

    /// Multiplicative inverse, or `None` when `self` is not a unit.
    fn inv(&self) -> Option<Self>;

    /// Image of an element of the base field F_q under the structure map.
    fn from_base(&self, c: &Gf) -> Self;

    fn is_one(&self) -> bool {
        *self == self.one_like()
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// The q-power map `x -> x^q`, where q is the size of the base field.
    /// Implementations override this when a cheaper route exists.
    fn frob(&self, q: u64) -> Self {
        self.pow(q)
    }

    fn frob_n(&self, q: u64, n: u32) -> Self {
        let mut x = self.clone();
        for _ in 0..n {
            x = x.frob(q);
        }
        x
    }
}
