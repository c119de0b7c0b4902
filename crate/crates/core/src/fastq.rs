//! Rational numbers with an allocation-free `i64` representation and a
//! `BigRational` fallback on overflow. Used as the pivoting scalar behind
//! exact LP solves; values are converted from and back to [`Q`] at the edges.

use crate::rational::Q;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Debug)]
pub enum FastQ {
    /// Reduced, denominator strictly positive.
    Small(i64, i64),
    Big(Box<Q>),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl FastQ {
    fn from_i128(num: i128, den: i128) -> FastQ {
        debug_assert!(den != 0);
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        if num == 0 {
            return FastQ::Small(0, 1);
        }
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        let (n, d) = (num / g, den / g);
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => FastQ::Small(n, d),
            _ => FastQ::Big(Box::new(Q::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(q: Q) -> FastQ {
        match (q.numer().to_i64(), q.denom().to_i64()) {
            (Some(n), Some(d)) => FastQ::Small(n, d),
            _ => FastQ::Big(Box::new(q)),
        }
    }

    pub fn to_q(&self) -> Q {
        match self {
            FastQ::Small(n, d) => Q::new_raw(BigInt::from(*n), BigInt::from(*d)),
            FastQ::Big(b) => (**b).clone(),
        }
    }

    pub fn from_q(q: &Q) -> FastQ {
        FastQ::from_big(q.clone())
    }

    fn signum(&self) -> i32 {
        match self {
            FastQ::Small(n, _) => n.signum() as i32,
            FastQ::Big(b) => {
                if b.is_positive() {
                    1
                } else if b.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    fn big_op(a: &FastQ, b: &FastQ, op: impl Fn(Q, Q) -> Q) -> FastQ {
        FastQ::from_big(op(a.to_q(), b.to_q()))
    }
}

impl PartialEq for FastQ {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for FastQ {}

impl PartialOrd for FastQ {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FastQ {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (FastQ::Small(a, b), FastQ::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_q().cmp(&other.to_q()),
        }
    }
}

impl Zero for FastQ {
    fn zero() -> Self {
        FastQ::Small(0, 1)
    }
    fn is_zero(&self) -> bool {
        self.signum() == 0
    }
}

impl One for FastQ {
    fn one() -> Self {
        FastQ::Small(1, 1)
    }
    fn is_one(&self) -> bool {
        matches!(self, FastQ::Small(1, 1))
    }
}

impl Neg for FastQ {
    type Output = FastQ;
    fn neg(self) -> FastQ {
        match self {
            FastQ::Small(n, d) if n != i64::MIN => FastQ::Small(-n, d),
            other => FastQ::from_big(-other.to_q()),
        }
    }
}

impl<'a> Add<&'a FastQ> for &'a FastQ {
    type Output = FastQ;
    fn add(self, o: &FastQ) -> FastQ {
        match (self, o) {
            (FastQ::Small(a, b), FastQ::Small(c, d)) => {
                if b == d {
                    FastQ::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    FastQ::from_i128(*a as i128 * *d as i128 + *c as i128 * *b as i128, *b as i128 * *d as i128)
                }
            }
            _ => FastQ::big_op(self, o, |x, y| x + y),
        }
    }
}

impl<'a> Sub<&'a FastQ> for &'a FastQ {
    type Output = FastQ;
    fn sub(self, o: &FastQ) -> FastQ {
        match (self, o) {
            (FastQ::Small(a, b), FastQ::Small(c, d)) => {
                if b == d {
                    FastQ::from_i128(*a as i128 - *c as i128, *b as i128)
                } else {
                    FastQ::from_i128(*a as i128 * *d as i128 - *c as i128 * *b as i128, *b as i128 * *d as i128)
                }
            }
            _ => FastQ::big_op(self, o, |x, y| x - y),
        }
    }
}

impl<'a> Mul<&'a FastQ> for &'a FastQ {
    type Output = FastQ;
    fn mul(self, o: &FastQ) -> FastQ {
        match (self, o) {
            (FastQ::Small(a, b), FastQ::Small(c, d)) => {
                FastQ::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => FastQ::big_op(self, o, |x, y| x * y),
        }
    }
}

impl<'a> Div<&'a FastQ> for &'a FastQ {
    type Output = FastQ;
    fn div(self, o: &FastQ) -> FastQ {
        assert!(!o.is_zero(), "division by zero");
        match (self, o) {
            (FastQ::Small(a, b), FastQ::Small(c, d)) => {
                FastQ::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128)
            }
            _ => FastQ::big_op(self, o, |x, y| x / y),
        }
    }
}

macro_rules! owned_op {
    ($tr:ident, $m:ident) => {
        impl $tr for FastQ {
            type Output = FastQ;
            fn $m(self, o: FastQ) -> FastQ {
                (&self).$m(&o)
            }
        }
    };
}
owned_op!(Add, add);
owned_op!(Sub, sub);
owned_op!(Mul, mul);
owned_op!(Div, div);

impl crate::lp::Field for FastQ {
    const EXACT: bool = true;

    fn is_pos(&self) -> bool {
        self.signum() > 0
    }
    fn is_neg(&self) -> bool {
        self.signum() < 0
    }
    fn sub_mul(&mut self, factor: &Self, x: &Self) {
        let prod = factor * x;
        *self = &*self - &prod;
    }
    fn from_q(q: &Q) -> Self {
        FastQ::from_q(q)
    }
    fn as_f64(&self) -> f64 {
        match self {
            FastQ::Small(n, d) => *n as f64 / *d as f64,
            FastQ::Big(b) => crate::rational::to_f64(b),
        }
    }
}
