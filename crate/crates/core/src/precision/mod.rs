//! Working-precision scalars: `f64`, double-double and quad-double.
//!
//! Everything numeric in the crate is generic over [`Real`]; `Complex<T>`
//! arithmetic comes from `num-complex` once `T: Num`.

pub mod dd;
pub mod eft;
pub mod qd;

use std::fmt::{self, Debug, Display};
use std::ops::{AddAssign, DivAssign, MulAssign, Neg, Rem, RemAssign, SubAssign};

use num_complex::Complex;
use num_traits::{Num, NumAssign, One, Zero};
use serde::{Deserialize, Serialize};

pub use dd::Dd;
pub use qd::Qd;

pub trait Real:
    Copy + Debug + Default + PartialOrd + Send + Sync + 'static + Num + NumAssign + Neg<Output = Self>
{
    /// Significand bits of the format.
    const BITS: u32;
    /// Number of `f64` limbs used for storage.
    const LIMBS: usize;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn limbs(self) -> [f64; 4];
    fn from_limbs(l: &[f64]) -> Self;
    fn epsilon() -> Self;
    fn pi() -> Self;
    fn ln2() -> Self;
    fn sqrt(self) -> Self;
    fn mul_pow2(self, k: i32) -> Self;
    fn floor(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin_cos(self) -> (Self, Self);
    fn atan2(self, x: Self) -> Self;

    fn abs(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }
    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }
    fn from_i64(n: i64) -> Self {
        let hi = n as f64;
        let lo = (n - hi as i64) as f64;
        Self::from_f64(hi) + Self::from_f64(lo)
    }
    fn from_usize(n: usize) -> Self {
        Self::from_i64(n as i64)
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        let mut base = if n < 0 { self.recip() } else { self };
        let mut e = n.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn powf(self, e: Self) -> Self {
        if self == Self::zero() {
            return Self::zero();
        }
        (e * self.ln()).exp()
    }
    fn max(self, o: Self) -> Self {
        if o > self {
            o
        } else {
            self
        }
    }
    fn min(self, o: Self) -> Self {
        if o < self {
            o
        } else {
            self
        }
    }
}

impl Real for f64 {
    const BITS: u32 = 53;
    const LIMBS: usize = 1;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn limbs(self) -> [f64; 4] {
        [self, 0.0, 0.0, 0.0]
    }
    fn from_limbs(l: &[f64]) -> Self {
        l[0]
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn ln2() -> Self {
        std::f64::consts::LN_2
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn mul_pow2(self, k: i32) -> Self {
        self * 2f64.powi(k)
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn atan2(self, x: Self) -> Self {
        f64::atan2(self, x)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn powf(self, e: Self) -> Self {
        f64::powf(self, e)
    }
}

macro_rules! impl_extended {
    ($t:ty, $bits:expr, $limbs:expr, $eps:expr, $newton:expr) => {
        impl Zero for $t {
            fn zero() -> Self {
                <$t>::from(0.0)
            }
            fn is_zero(&self) -> bool {
                self.to_f64() == 0.0
            }
        }

        impl One for $t {
            fn one() -> Self {
                <$t>::from(1.0)
            }
        }

        impl Rem for $t {
            type Output = $t;
            fn rem(self, b: $t) -> $t {
                let q = self / b;
                let q = if q < <$t>::zero() {
                    -(-q).floor()
                } else {
                    q.floor()
                };
                self - q * b
            }
        }

        impl Num for $t {
            type FromStrRadixErr = std::num::ParseFloatError;
            fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
                if radix != 10 {
                    // Only decimal text is supported; surface it as a parse failure.
                    return "".parse::<f64>().map(<$t>::from);
                }
                s.parse::<f64>().map(<$t>::from)
            }
        }

        impl AddAssign for $t {
            fn add_assign(&mut self, b: $t) {
                *self = *self + b;
            }
        }
        impl SubAssign for $t {
            fn sub_assign(&mut self, b: $t) {
                *self = *self - b;
            }
        }
        impl MulAssign for $t {
            fn mul_assign(&mut self, b: $t) {
                *self = *self * b;
            }
        }
        impl DivAssign for $t {
            fn div_assign(&mut self, b: $t) {
                *self = *self / b;
            }
        }
        impl RemAssign for $t {
            fn rem_assign(&mut self, b: $t) {
                *self = *self % b;
            }
        }

        impl Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:e}", self.to_f64())
            }
        }

        impl Real for $t {
            const BITS: u32 = $bits;
            const LIMBS: usize = $limbs;

            fn from_f64(x: f64) -> Self {
                <$t>::from(x)
            }
            fn to_f64(self) -> f64 {
                let l = self.limbs();
                l.iter().rev().sum()
            }
            fn limbs(self) -> [f64; 4] {
                limbs_of(&self)
            }
            fn from_limbs(l: &[f64]) -> Self {
                from_limbs_of(l)
            }
            fn epsilon() -> Self {
                <$t>::from($eps)
            }
            fn pi() -> Self {
                <$t>::PI
            }
            fn ln2() -> Self {
                <$t>::LN2
            }
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            fn mul_pow2(self, k: i32) -> Self {
                <$t>::mul_pow2(self, k)
            }
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            fn exp(self) -> Self {
                generic_exp(self)
            }
            fn ln(self) -> Self {
                generic_ln(self, $newton)
            }
            fn sin_cos(self) -> (Self, Self) {
                generic_sin_cos(self)
            }
            fn atan2(self, x: Self) -> Self {
                generic_atan2(self, x, $newton)
            }
        }
    };
}

impl_extended!(Dd, 106, 2, Dd::EPS, 2);
impl_extended!(Qd, 212, 4, Qd::EPS, 3);

trait LimbStore: Sized {
    fn store(&self) -> [f64; 4];
    fn load(l: &[f64]) -> Self;
}

impl LimbStore for Dd {
    fn store(&self) -> [f64; 4] {
        [self.hi, self.lo, 0.0, 0.0]
    }
    fn load(l: &[f64]) -> Self {
        let raw = Dd {
            hi: l[0],
            lo: l.get(1).copied().unwrap_or(0.0),
        };
        let r = Dd::from_sum(raw.hi, raw.lo);
        // Keep already-normalized limbs verbatim so signed zeros survive.
        if r.hi == raw.hi && r.lo == raw.lo {
            raw
        } else {
            r
        }
    }
}

impl LimbStore for Qd {
    fn store(&self) -> [f64; 4] {
        self.0
    }
    fn load(l: &[f64]) -> Self {
        let mut a = [0.0; 4];
        for (d, s) in a.iter_mut().zip(l) {
            *d = *s;
        }
        let r = Qd::from_limbs(a);
        if r.0 == a {
            Qd(a)
        } else {
            r
        }
    }
}

fn limbs_of<T: LimbStore>(x: &T) -> [f64; 4] {
    x.store()
}

fn from_limbs_of<T: LimbStore>(l: &[f64]) -> T {
    T::load(l)
}

fn generic_exp<T: Real>(x: T) -> T {
    let xf = x.to_f64();
    if xf.is_nan() {
        return x;
    }
    if xf > 709.78 {
        return T::from_f64(f64::INFINITY);
    }
    if xf < -745.2 {
        return T::zero();
    }
    let k = (xf / std::f64::consts::LN_2).round();
    let r = (x - T::ln2() * T::from_f64(k)).mul_pow2(-10);

    // expm1(r) by Taylor; |r| < 3.4e-4.
    let tol = T::epsilon().to_f64() * 1e-3;
    let mut term = r;
    let mut sum = r;
    let mut i = 2.0;
    while term.to_f64().abs() > tol * sum.to_f64().abs() {
        term = term * r / T::from_f64(i);
        sum += term;
        i += 1.0;
    }
    // expm1(2u) = 2 expm1(u) + expm1(u)^2
    for _ in 0..10 {
        sum = sum.mul_pow2(1) + sum * sum;
    }
    let e = sum + T::one();
    let k = k as i32;
    if k > 1000 {
        e.mul_pow2(1000).mul_pow2(k - 1000)
    } else if k < -1000 {
        e.mul_pow2(-1000).mul_pow2(k + 1000)
    } else {
        e.mul_pow2(k)
    }
}

fn generic_ln<T: Real>(x: T, steps: usize) -> T {
    let xf = x.to_f64();
    if xf < 0.0 || xf.is_nan() {
        return T::from_f64(f64::NAN);
    }
    if xf == 0.0 {
        return T::from_f64(f64::NEG_INFINITY);
    }
    if xf.is_infinite() {
        return x;
    }
    let mut y = T::from_f64(xf.ln());
    for _ in 0..steps {
        y = y + x * (-y).exp() - T::one();
    }
    y
}

fn generic_sin_cos<T: Real>(x: T) -> (T, T) {
    let xf = x.to_f64();
    if !xf.is_finite() {
        let nan = T::from_f64(f64::NAN);
        return (nan, nan);
    }
    let half_pi = T::pi().mul_pow2(-1);
    let k = (xf / std::f64::consts::FRAC_PI_2).round();
    let r = x - half_pi * T::from_f64(k);
    let r2 = r * r;
    let tol = T::epsilon().to_f64() * 1e-3;

    let mut s = r;
    let mut term = r;
    let mut i = 2.0;
    while term.to_f64().abs() > tol {
        term = -term * r2 / T::from_f64(i * (i + 1.0));
        s += term;
        i += 2.0;
    }
    let mut c = T::one();
    let mut term = T::one();
    let mut i = 1.0;
    while term.to_f64().abs() > tol {
        term = -term * r2 / T::from_f64(i * (i + 1.0));
        c += term;
        i += 2.0;
    }
    match (k as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

fn generic_atan2<T: Real>(y: T, x: T, steps: usize) -> T {
    let (yf, xf) = (y.to_f64(), x.to_f64());
    if yf == 0.0 && xf == 0.0 {
        return T::zero();
    }
    let mut t = T::from_f64(yf.atan2(xf));
    for _ in 0..steps {
        let (s, c) = t.sin_cos();
        let num = y * c - x * s;
        let den = x * c + y * s;
        t += num / den;
    }
    t
}

/// Complex exponential.
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let m = z.re.exp();
    let (s, c) = z.im.sin_cos();
    Complex::new(m * c, m * s)
}

/// Principal complex logarithm.
pub fn cln<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(cabs(z).ln(), z.im.atan2(z.re))
}

/// Principal power `z^a`.
pub fn cpow<T: Real>(z: Complex<T>, a: Complex<T>) -> Complex<T> {
    if z.re == T::zero() && z.im == T::zero() {
        return Complex::new(T::zero(), T::zero());
    }
    cexp(a * cln(z))
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = cabs(z);
    if r == T::zero() {
        return z;
    }
    let half = T::from_f64(0.5);
    let a = ((r + z.re.abs()) * half).sqrt();
    if z.re >= T::zero() {
        Complex::new(a, z.im / (a + a))
    } else {
        let b = if z.im < T::zero() { -a } else { a };
        Complex::new(z.im.abs() / (a + a), b)
    }
}

/// Modulus with scaling against overflow.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let m = a.max(b);
    if m == T::zero() || !m.is_finite() {
        return m;
    }
    let (a, b) = (a / m, b / m);
    m * (a * a + b * b).sqrt()
}

pub fn cnorm_sqr<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub fn to_c64<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn from_c64<T: Real>(z: Complex<f64>) -> Complex<T> {
    Complex::new(T::from_f64(z.re), T::from_f64(z.im))
}

/// Selectable working precision, in significand bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "u32", try_from = "u32")]
pub enum Precision {
    Double,
    DoubleDouble,
    QuadDouble,
}

impl Precision {
    pub fn bits(self) -> u32 {
        match self {
            Precision::Double => 53,
            Precision::DoubleDouble => 106,
            Precision::QuadDouble => 212,
        }
    }

    pub fn from_bits(bits: u32) -> Option<Precision> {
        match bits {
            53 => Some(Precision::Double),
            106 => Some(Precision::DoubleDouble),
            212 => Some(Precision::QuadDouble),
            _ => None,
        }
    }
}

impl From<Precision> for u32 {
    fn from(p: Precision) -> u32 {
        p.bits()
    }
}

impl TryFrom<u32> for Precision {
    type Error = String;
    fn try_from(b: u32) -> Result<Self, String> {
        Precision::from_bits(b)
            .ok_or_else(|| format!("unsupported precision {b}; use 53, 106 or 212"))
    }
}

impl Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "double" | "f64" => Ok(Precision::Double),
            "dd" | "double-double" => Ok(Precision::DoubleDouble),
            "qd" | "quad-double" => Ok(Precision::QuadDouble),
            _ => s
                .parse::<u32>()
                .map_err(|e| e.to_string())
                .and_then(Precision::try_from),
        }
    }
}

/// Run `$body` with `$T` bound to the scalar type selected by `$p`.
#[macro_export]
macro_rules! with_precision {
    ($p:expr, $T:ident => $body:expr) => {
        match $p {
            $crate::precision::Precision::Double => {
                #[allow(dead_code)]
                type $T = f64;
                $body
            }
            $crate::precision::Precision::DoubleDouble => {
                #[allow(dead_code)]
                type $T = $crate::precision::Dd;
                $body
            }
            $crate::precision::Precision::QuadDouble => {
                #[allow(dead_code)]
                type $T = $crate::precision::Qd;
                $body
            }
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn transcendentals_agree_with_f64() {
        for &x in &[-3.7, -0.4, 0.0, 0.3, 1.0, 2.5, 10.0] {
            let d = Dd::from(x);
            let q = Qd::from(x);
            assert!(rel(d.exp().to_f64(), x.exp()) < 1e-15);
            assert!(rel(q.exp().to_f64(), x.exp()) < 1e-15);
            let (s, c) = q.sin_cos();
            assert!((s.to_f64() - x.sin()).abs() < 1e-15);
            assert!((c.to_f64() - x.cos()).abs() < 1e-15);
        }
        for &x in &[0.01, 0.5, 1.0, 7.0, 1e10] {
            assert!((Qd::from(x).ln().to_f64() - x.ln()).abs() < 1e-15 * (1.0 + x.ln().abs()));
        }
    }

    #[test]
    fn exp_ln_round_trip_qd() {
        let x = Qd::from(1.234567);
        let back = x.ln().exp() - x;
        assert!(back.to_f64().abs() < 1e-60);
    }

    #[test]
    fn pythagoras_qd() {
        let (s, c) = Qd::from(0.7).sin_cos();
        let one = s * s + c * c - Qd::ONE;
        assert!(one.to_f64().abs() < 1e-62);
    }

    #[test]
    fn atan2_inverts_sin_cos() {
        let t = Qd::from(2.2);
        let (s, c) = t.sin_cos();
        let back = s.atan2(c) - t;
        assert!(back.to_f64().abs() < 1e-60);
    }

    #[test]
    fn dispatch_macro_selects_type() {
        let bits = with_precision!(Precision::DoubleDouble, T => <T as Real>::BITS);
        assert_eq!(bits, 106);
    }

    #[test]
    fn complex_sqrt_squares_back() {
        let z = Complex::new(Dd::from(-3.0), Dd::from(-4.0));
        let r = csqrt(z);
        let d = r * r - z;
        assert!(cabs(d).to_f64() < 1e-30);
    }
}
