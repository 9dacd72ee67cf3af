//! Arithmetic of the definite quaternion algebra B = (-1, -7 / Q).
//!
//! B = Q + Qi + Qj + Qk with i^2 = -1, j^2 = -7, ij = -ji = k, ramified
//! exactly at 7 and infinity.  Its maximal order is
//!
//! ```text
//! O_B = Z[1, i, (i+j)/2, (1+k)/2],
//! ```
//!
//! with unit group {+-1, +-i}.  An element with basis coordinates
//! (a, b, c, d) is (a + d/2) + (b + c/2) i + (c/2) j + (d/2) k, so the
//! reduced norm and trace are
//!
//! ```text
//! Nrd = (a + d/2)^2 + (b + c/2)^2 + 7 (c^2 + d^2)/4,    Trd = 2a + d,
//! ```
//!
//! both integers.  Internally elements are handled through doubled
//! "half-coordinates" (w, x, y, z) = (2a + d, 2b + c, c, d) representing
//! (w + x i + y j + z k)/2, subject to w = z and x = y mod 2.
//!
//! Reduction modulo the two-sided ideal (j) maps O_B onto F_49 = F_7[ibar]
//! with ibar^2 = -1 (a field, -1 being a non-residue mod 7):
//! (a, b, c, d) maps to (a + 4d) + (b + 4c) ibar, since 1/2 = 4 in F_7.
//! The unit classes F_49^x / F_7^x form a cyclic group of order 8; its
//! quotient by the image of i is the four-element set Lambda = Z/4 carrying
//! the Gross-Prasad test vectors.

use thiserror::Error;

use crate::arith::kronecker;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QuaternionError {
    #[error("half-coordinates ({0}, {1}, {2}, {3}) violate the parity constraints")]
    BadHalfCoords(i64, i64, i64, i64),
    #[error("reduced norm {0} is divisible by 7; no unit image in F_49")]
    NormDivisibleBySeven(i64),
}

/// An element of the maximal order O_B in basis coordinates
/// (a, b, c, d) w.r.t. {1, i, (i+j)/2, (1+k)/2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
}

pub const ONE: OrderElement = OrderElement::new(1, 0, 0, 0);
pub const I: OrderElement = OrderElement::new(0, 1, 0, 0);
/// j = 2 (i+j)/2 - i.
pub const J: OrderElement = OrderElement::new(0, -1, 2, 0);
/// k = 2 (1+k)/2 - 1.
pub const K: OrderElement = OrderElement::new(-1, 0, 0, 2);

impl OrderElement {
    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> OrderElement {
        OrderElement { a, b, c, d }
    }

    pub const fn zero() -> OrderElement {
        OrderElement::new(0, 0, 0, 0)
    }

    pub fn scalar(n: i64) -> OrderElement {
        OrderElement::new(n, 0, 0, 0)
    }

    /// Doubled coordinates (w, x, y, z) with the element equal to
    /// (w + x i + y j + z k)/2.
    pub fn half_coords(&self) -> (i64, i64, i64, i64) {
        (2 * self.a + self.d, 2 * self.b + self.c, self.c, self.d)
    }

    pub fn from_half_coords(w: i64, x: i64, y: i64, z: i64) -> Result<OrderElement, QuaternionError> {
        if (w - z) % 2 != 0 || (x - y) % 2 != 0 {
            return Err(QuaternionError::BadHalfCoords(w, x, y, z));
        }
        Ok(OrderElement::new((w - z) / 2, (x - y) / 2, y, z))
    }

    pub fn trd(&self) -> i64 {
        2 * self.a + self.d
    }

    pub fn nrd(&self) -> i64 {
        let (w, x, y, z) = self.half_coords();
        (w * w + x * x + 7 * y * y + 7 * z * z) / 4
    }

    pub fn conj(&self) -> OrderElement {
        let (w, x, y, z) = self.half_coords();
        OrderElement::from_half_coords(w, -x, -y, -z).expect("conjugation preserves parity")
    }

    pub fn add(&self, other: &OrderElement) -> OrderElement {
        OrderElement::new(
            self.a + other.a,
            self.b + other.b,
            self.c + other.c,
            self.d + other.d,
        )
    }

    pub fn sub(&self, other: &OrderElement) -> OrderElement {
        OrderElement::new(
            self.a - other.a,
            self.b - other.b,
            self.c - other.c,
            self.d - other.d,
        )
    }

    pub fn neg(&self) -> OrderElement {
        OrderElement::new(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn scale(&self, n: i64) -> OrderElement {
        OrderElement::new(n * self.a, n * self.b, n * self.c, n * self.d)
    }

    /// Quaternion product, using ij = k, jk = 7i, ki = j.
    pub fn mul(&self, other: &OrderElement) -> OrderElement {
        let (w1, x1, y1, z1) = self.half_coords();
        let (w2, x2, y2, z2) = other.half_coords();
        let w = w1 * w2 - x1 * x2 - 7 * y1 * y2 - 7 * z1 * z2;
        let x = w1 * x2 + x1 * w2 + 7 * (y1 * z2 - z1 * y2);
        let y = w1 * y2 + y1 * w2 - (x1 * z2 - z1 * x2);
        let z = w1 * z2 + z1 * w2 + (x1 * y2 - y1 * x2);
        debug_assert!(w % 2 == 0 && x % 2 == 0 && y % 2 == 0 && z % 2 == 0);
        OrderElement::from_half_coords(w / 2, x / 2, y / 2, z / 2)
            .expect("the order is closed under multiplication")
    }

    /// Divide every half-coordinate by n, when exact.
    pub fn div_exact(&self, n: i64) -> Option<OrderElement> {
        let (w, x, y, z) = self.half_coords();
        if w % n != 0 || x % n != 0 || y % n != 0 || z % n != 0 {
            return None;
        }
        OrderElement::from_half_coords(w / n, x / n, y / n, z / n).ok()
    }

    pub fn sup_norm(&self) -> i64 {
        self.a.abs().max(self.b.abs()).max(self.c.abs()).max(self.d.abs())
    }

    /// Image in F_49 under reduction mod the two-sided ideal (j).
    pub fn reduce_mod_j(&self) -> Fq49 {
        Fq49::new(self.a + 4 * self.d, self.b + 4 * self.c)
    }
}

/// F_49 = F_7[ibar], ibar^2 = -1, stored as u + v ibar with 0 <= u, v < 7.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fq49 {
    pub u: i64,
    pub v: i64,
}

impl Fq49 {
    pub fn new(u: i64, v: i64) -> Fq49 {
        Fq49 {
            u: u.rem_euclid(7),
            v: v.rem_euclid(7),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.u == 0 && self.v == 0
    }

    /// Lies in the prime field (zero ibar-part).
    pub fn in_f7(&self) -> bool {
        self.v == 0
    }

    pub fn mul(&self, other: &Fq49) -> Fq49 {
        Fq49::new(
            self.u * other.u - self.v * other.v,
            self.u * other.v + self.v * other.u,
        )
    }

    pub fn pow(&self, mut e: u32) -> Fq49 {
        let mut base = *self;
        let mut acc = Fq49::new(1, 0);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Field norm to F_7: x * x^7 = u^2 + v^2.
    pub fn norm(&self) -> i64 {
        (self.u * self.u + self.v * self.v).rem_euclid(7)
    }

    pub fn inverse(&self) -> Fq49 {
        assert!(!self.is_zero());
        // x^{-1} = x^47 in F_49, but conj/norm is cheaper: (u - v ibar)/(u^2+v^2).
        let n = self.norm();
        // inverse of n mod 7
        let ninv = (1..7).find(|t| (t * n) % 7 == 1).unwrap();
        Fq49::new(self.u * ninv, -self.v * ninv)
    }
}

/// The fixed generator of F_49^x / F_7^x: the first element x + y ibar in
/// lexicographic order (x, then y) whose class has order 8 in the quotient.
pub fn quotient_generator() -> Fq49 {
    for u in 0..7 {
        for v in 0..7 {
            let g = Fq49::new(u, v);
            if g.is_zero() {
                continue;
            }
            // class order 8 iff g^4 has nonzero ibar-part
            if !g.pow(4).in_f7() {
                return g;
            }
        }
    }
    unreachable!("F_49^x / F_7^x is cyclic of order 8")
}

/// Discrete log of the class of `x` in F_49^x / F_7^x w.r.t. the fixed
/// generator: the unique e in 0..8 with x = g^e mod F_7^x.
pub fn dlog8(x: &Fq49) -> u8 {
    assert!(!x.is_zero());
    let g = quotient_generator();
    let ginv = g.inverse();
    let mut t = *x;
    for e in 0..8u8 {
        if t.in_f7() {
            return e;
        }
        t = t.mul(&ginv);
    }
    unreachable!("the quotient has order 8")
}

/// One of the four classes of Lambda = (F_49^x / F_7^x) / <image of i>,
/// labeled by Z/4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LambdaClass {
    pub label: u8,
}

impl LambdaClass {
    pub fn new(label: u8) -> LambdaClass {
        LambdaClass { label: label % 4 }
    }

    /// Order of the class in Z/4: 1, 2 or 4.
    pub fn order(&self) -> u8 {
        match self.label {
            0 => 1,
            2 => 2,
            _ => 4,
        }
    }
}

/// Lambda class of an order element of reduced norm coprime to 7.
///
/// The image of i is ibar = g^4 mod F_7^x, so the subgroup it generates is
/// {0, 4} in Z/8 and the quotient is the dlog mod 4.
pub fn lambda_of(t: &OrderElement) -> Result<LambdaClass, QuaternionError> {
    let n = t.nrd();
    if n % 7 == 0 {
        return Err(QuaternionError::NormDivisibleBySeven(n));
    }
    Ok(LambdaClass::new(dlog8(&t.reduce_mod_j()) % 4))
}

/// All elements of O_B of reduced norm exactly `n`, in deterministic
/// lexicographic order on half-coordinates.
pub fn norm_elements(n: i64) -> Vec<OrderElement> {
    assert!(n > 0);
    let mut out = Vec::new();
    let target = 4 * n;
    let mut z = -isqrt(target / 7);
    while 7 * z * z <= target {
        let rz = target - 7 * z * z;
        let mut y = -isqrt(rz / 7);
        while 7 * y * y <= rz {
            let rxy = rz - 7 * y * y;
            let mut x = -isqrt(rxy);
            while x * x <= rxy {
                if (x - y) % 2 == 0 {
                    let r = rxy - x * x;
                    let w = isqrt(r);
                    if w * w == r && (w - z) % 2 == 0 {
                        for wv in if w == 0 { vec![0] } else { vec![-w, w] } {
                            out.push(
                                OrderElement::from_half_coords(wv, x, y, z)
                                    .expect("parity checked"),
                            );
                        }
                    }
                }
                x += 1;
            }
            y += 1;
        }
        z += 1;
    }
    out.sort_by_key(|t| t.half_coords());
    out
}

fn isqrt(n: i64) -> i64 {
    if n <= 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// The character chi_0 attached to Q(sqrt(-7)): the Legendre symbol mod 7 of
/// the prime-to-7 part of a nonzero integer.
pub fn chi0(x: i64) -> i32 {
    assert!(x != 0);
    let mut u = x.abs();
    while u % 7 == 0 {
        u /= 7;
    }
    kronecker(u, 7)
}
