//! Quad-double arithmetic (~212 significant bits).
//!
//! Four non-overlapping `f64` limbs in decreasing magnitude. Algorithms follow
//! the classic QD library: sloppy addition, sloppy multiplication including
//! the O(eps^3) cross terms, and long division with a five-term renormalize.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::eft::{quick_two_sum, three_sum, three_sum2, two_prod, two_sum};

#[derive(Clone, Copy, Debug, Default)]
pub struct Qd(pub [f64; 4]);

impl Qd {
    pub const ZERO: Qd = Qd([0.0; 4]);
    pub const ONE: Qd = Qd([1.0, 0.0, 0.0, 0.0]);
    pub const PI: Qd = Qd([
        3.141592653589793,
        1.2246467991473532e-16,
        -2.9947698097183397e-33,
        1.1124542208633653e-49,
    ]);
    pub const HALF_PI: Qd = Qd([
        1.5707963267948966,
        6.123233995736766e-17,
        -1.4973849048591698e-33,
        5.562271104316826e-50,
    ]);
    pub const LN2: Qd = Qd([
        0.6931471805599453,
        2.3190468138462996e-17,
        5.707708438416212e-34,
        -3.5824322106018114e-50,
    ]);
    /// 2^-209
    pub const EPS: f64 = 1.2154326714572542e-63;

    #[inline]
    pub const fn from_f64(x: f64) -> Qd {
        Qd([x, 0.0, 0.0, 0.0])
    }

    #[inline]
    pub fn hi(self) -> f64 {
        self.0[0]
    }

    pub fn from_limbs(l: [f64; 4]) -> Qd {
        let [mut c0, mut c1, mut c2, mut c3] = l;
        renorm4(&mut c0, &mut c1, &mut c2, &mut c3);
        Qd([c0, c1, c2, c3])
    }

    pub fn add_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (c0, e) = two_sum(a[0], b);
        let (c1, e) = two_sum(a[1], e);
        let (c2, e) = two_sum(a[2], e);
        let (c3, mut e) = two_sum(a[3], e);
        let (mut c0, mut c1, mut c2, mut c3) = (c0, c1, c2, c3);
        renorm5(&mut c0, &mut c1, &mut c2, &mut c3, &mut e);
        Qd([c0, c1, c2, c3])
    }

    pub fn mul_f64(self, b: f64) -> Qd {
        let a = self.0;
        let (p0, q0) = two_prod(a[0], b);
        let (p1, mut q1) = two_prod(a[1], b);
        let (mut p2, mut q2) = two_prod(a[2], b);
        let p3 = a[3] * b;

        let mut s0 = p0;
        let (mut s1, mut s2) = two_sum(q0, p1);
        three_sum(&mut s2, &mut q1, &mut p2);
        three_sum2(&mut q1, &mut q2, p3);
        let mut s3 = q1;
        let mut s4 = q2 + p2;
        renorm5(&mut s0, &mut s1, &mut s2, &mut s3, &mut s4);
        Qd([s0, s1, s2, s3])
    }

    #[inline]
    pub fn mul_pow2(self, k: i32) -> Qd {
        let s = 2f64.powi(k);
        Qd([self.0[0] * s, self.0[1] * s, self.0[2] * s, self.0[3] * s])
    }

    pub fn sqr(self) -> Qd {
        self * self
    }

    pub fn sqrt(self) -> Qd {
        let a0 = self.0[0];
        if a0 <= 0.0 {
            return if a0 == 0.0 {
                Qd::ZERO
            } else {
                Qd::from_f64(f64::NAN)
            };
        }
        if !a0.is_finite() {
            return self;
        }
        // Newton on 1/sqrt(a), then one multiply.
        let mut r = Qd::from_f64(1.0 / a0.sqrt());
        let h = self.mul_pow2(-1);
        for _ in 0..3 {
            let corr = (Qd::from_f64(0.5) - h * r.sqr()) * r;
            r = r + corr;
        }
        r * self
    }

    pub fn floor(self) -> Qd {
        let a = self.0;
        let mut x = [a[0].floor(), 0.0, 0.0, 0.0];
        if x[0] == a[0] {
            x[1] = a[1].floor();
            if x[1] == a[1] {
                x[2] = a[2].floor();
                if x[2] == a[2] {
                    x[3] = a[3].floor();
                }
            }
            let [mut c0, mut c1, mut c2, mut c3] = x;
            renorm4(&mut c0, &mut c1, &mut c2, &mut c3);
            return Qd([c0, c1, c2, c3]);
        }
        Qd(x)
    }
}

fn renorm4(c0: &mut f64, c1: &mut f64, c2: &mut f64, c3: &mut f64) {
    if c0.is_infinite() {
        return;
    }
    let (s0, t) = quick_two_sum(*c2, *c3);
    *c3 = t;
    let (s0, t) = quick_two_sum(*c1, s0);
    *c2 = t;
    let (h, t) = quick_two_sum(*c0, s0);
    *c0 = h;
    *c1 = t;

    let mut s0 = *c0;
    let mut s1 = *c1;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, *c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, *c3);
        } else {
            (s1, s2) = quick_two_sum(s1, *c3);
        }
    } else {
        (s0, s1) = quick_two_sum(s0, *c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, *c3);
        } else {
            (s0, s1) = quick_two_sum(s0, *c3);
        }
    }
    *c0 = s0;
    *c1 = s1;
    *c2 = s2;
    *c3 = s3;
}

fn renorm5(c0: &mut f64, c1: &mut f64, c2: &mut f64, c3: &mut f64, c4: &mut f64) {
    if c0.is_infinite() {
        return;
    }
    let (s0, t) = quick_two_sum(*c3, *c4);
    *c4 = t;
    let (s0, t) = quick_two_sum(*c2, s0);
    *c3 = t;
    let (s0, t) = quick_two_sum(*c1, s0);
    *c2 = t;
    let (h, t) = quick_two_sum(*c0, s0);
    *c0 = h;
    *c1 = t;

    let (mut s0, mut s1) = quick_two_sum(*c0, *c1);
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    if s1 != 0.0 {
        (s1, s2) = quick_two_sum(s1, *c2);
        if s2 != 0.0 {
            (s2, s3) = quick_two_sum(s2, *c3);
            if s3 != 0.0 {
                s3 += *c4;
            } else {
                (s2, s3) = quick_two_sum(s2, *c4);
            }
        } else {
            (s1, s2) = quick_two_sum(s1, *c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, *c4);
            } else {
                (s1, s2) = quick_two_sum(s1, *c4);
            }
        }
    } else {
        (s0, s1) = quick_two_sum(s0, *c2);
        if s1 != 0.0 {
            (s1, s2) = quick_two_sum(s1, *c3);
            if s2 != 0.0 {
                (s2, s3) = quick_two_sum(s2, *c4);
            } else {
                (s1, s2) = quick_two_sum(s1, *c4);
            }
        } else {
            (s0, s1) = quick_two_sum(s0, *c3);
            if s1 != 0.0 {
                (s1, s2) = quick_two_sum(s1, *c4);
            } else {
                (s0, s1) = quick_two_sum(s0, *c4);
            }
        }
    }
    *c0 = s0;
    *c1 = s1;
    *c2 = s2;
    *c3 = s3;
}

impl Add for Qd {
    type Output = Qd;
    fn add(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (s0, t0) = two_sum(a[0], b[0]);
        let (s1, t1) = two_sum(a[1], b[1]);
        let (s2, t2) = two_sum(a[2], b[2]);
        let (s3, t3) = two_sum(a[3], b[3]);

        let (mut s0, mut s1, mut s2, mut s3) = (s0, s1, s2, s3);
        let (mut t0, mut t1) = (t0, t1);
        let (u, v) = two_sum(s1, t0);
        s1 = u;
        t0 = v;
        three_sum(&mut s2, &mut t0, &mut t1);
        three_sum2(&mut s3, &mut t0, t2);
        t0 = t0 + t1 + t3;
        renorm5(&mut s0, &mut s1, &mut s2, &mut s3, &mut t0);
        Qd([s0, s1, s2, s3])
    }
}

impl Sub for Qd {
    type Output = Qd;
    #[inline]
    fn sub(self, b: Qd) -> Qd {
        self + (-b)
    }
}

impl Neg for Qd {
    type Output = Qd;
    #[inline]
    fn neg(self) -> Qd {
        Qd([-self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }
}

impl Mul for Qd {
    type Output = Qd;
    fn mul(self, b: Qd) -> Qd {
        let (a, b) = (self.0, b.0);
        let (mut p0, q0) = two_prod(a[0], b[0]);
        let (mut p1, mut q1) = two_prod(a[0], b[1]);
        let (mut p2, mut q2) = two_prod(a[1], b[0]);
        let (mut p3, q3) = two_prod(a[0], b[2]);
        let (mut p4, q4) = two_prod(a[1], b[1]);
        let (mut p5, q5) = two_prod(a[2], b[0]);

        let mut q0m = q0;
        three_sum(&mut p1, &mut p2, &mut q0m);

        three_sum(&mut p2, &mut q1, &mut q2);
        three_sum(&mut p3, &mut p4, &mut p5);
        let (mut s0, t0) = two_sum(p2, p3);
        let (s1, t1) = two_sum(q1, p4);
        let mut s2 = q2 + p5;
        let (mut s1, t0) = two_sum(s1, t0);
        s2 += t0 + t1;

        s1 += a[0] * b[3] + a[1] * b[2] + a[2] * b[1] + a[3] * b[0] + q0m + q3 + q4 + q5;
        renorm5(&mut p0, &mut p1, &mut s0, &mut s1, &mut s2);
        Qd([p0, p1, s0, s1])
    }
}

impl Div for Qd {
    type Output = Qd;
    fn div(self, b: Qd) -> Qd {
        let b0 = b.0[0];
        let mut q0 = self.0[0] / b0;
        let mut r = self - b.mul_f64(q0);
        let mut q1 = r.0[0] / b0;
        r = r - b.mul_f64(q1);
        let mut q2 = r.0[0] / b0;
        r = r - b.mul_f64(q2);
        let mut q3 = r.0[0] / b0;
        r = r - b.mul_f64(q3);
        let mut q4 = r.0[0] / b0;
        renorm5(&mut q0, &mut q1, &mut q2, &mut q3, &mut q4);
        Qd([q0, q1, q2, q3])
    }
}

impl PartialEq for Qd {
    fn eq(&self, other: &Qd) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Qd {
    fn partial_cmp(&self, other: &Qd) -> Option<std::cmp::Ordering> {
        for i in 0..4 {
            match self.0[i].partial_cmp(&other.0[i]) {
                Some(std::cmp::Ordering::Equal) => continue,
                ord => return ord,
            }
        }
        Some(std::cmp::Ordering::Equal)
    }
}

impl From<f64> for Qd {
    fn from(x: f64) -> Qd {
        Qd::from_f64(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventh_round_trips() {
        let x = Qd::ONE / Qd::from(7.0);
        let back = x * Qd::from(7.0) - Qd::ONE;
        assert!(back.hi().abs() < 1e-62);
    }

    #[test]
    fn sqrt_of_two() {
        let r = Qd::from(2.0).sqrt();
        let d = r * r - Qd::from(2.0);
        assert!(d.hi().abs() < 1e-62);
    }

    #[test]
    fn limbs_are_nonoverlapping_after_ops() {
        let x = Qd::PI * Qd::LN2 + Qd::from(1e-20);
        for i in 0..3 {
            assert!(x.0[i + 1].abs() <= x.0[i].abs() * 2f64.powi(-52));
        }
    }
}
