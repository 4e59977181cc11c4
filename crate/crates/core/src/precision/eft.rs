//! Error-free transformations on `f64`.

/// `s + e == a + b` exactly, assuming `|a| >= |b|` (or `a == 0`).
#[inline(always)]
pub fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let e = b - (s - a);
    (s, e)
}

/// Knuth's branch-free TwoSum.
#[inline(always)]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[cfg(target_feature = "fma")]
#[inline(always)]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Dekker's product; used when the target has no hardware FMA, where
/// `f64::mul_add` would fall back to a libm call.
#[cfg(not(target_feature = "fma"))]
#[inline(always)]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    let e = ((ah * bh - p) + ah * bl + al * bh) + al * bl;
    (p, e)
}

#[cfg(not(target_feature = "fma"))]
#[inline(always)]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    const THRESH: f64 = 6.696_928_794_914_17e299; // 2^996
    if a.abs() > THRESH {
        let a = a * 3.725_290_298_461_914e-9; // 2^-28
        let t = SPLITTER * a;
        let hi = t - (t - a);
        let lo = a - hi;
        (hi * 268_435_456.0, lo * 268_435_456.0)
    } else {
        let t = SPLITTER * a;
        let hi = t - (t - a);
        (hi, a - hi)
    }
}

#[inline(always)]
pub fn two_sqr(a: f64) -> (f64, f64) {
    two_prod(a, a)
}

/// In-place three-term sum: on return `a` holds the sum and `b`, `c` the
/// two error terms.
#[inline(always)]
pub fn three_sum(a: &mut f64, b: &mut f64, c: &mut f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(*c, t1);
    *a = s;
    let (u, v) = two_sum(t2, t3);
    *b = u;
    *c = v;
}

/// Like [`three_sum`] but folds the two error terms into `b`.
#[inline(always)]
pub fn three_sum2(a: &mut f64, b: &mut f64, c: f64) {
    let (t1, t2) = two_sum(*a, *b);
    let (s, t3) = two_sum(c, t1);
    *a = s;
    *b = t2 + t3;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_prod_is_exact_on_representable_case() {
        let a = 1.0 + f64::EPSILON;
        let (p, e) = two_prod(a, a);
        assert_eq!(p, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(e, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn two_sum_recovers_lost_bits() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }
}
