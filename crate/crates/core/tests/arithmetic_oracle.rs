//! Extended-precision arithmetic against exact rational arithmetic.

use bieberbach::{Dd, Qd, Real};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn exact(limbs: [f64; 4]) -> BigRational {
    limbs
        .iter()
        .filter(|l| **l != 0.0)
        .map(|l| BigRational::from_float(*l).expect("finite limb"))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `|got - want| <= 2^-bits |want|`.
fn within(got: &BigRational, want: &BigRational, bits: u32) -> bool {
    let tol = want.abs() / BigRational::from_integer(BigInt::from(2).pow(bits));
    (got - want).abs() <= tol
}

fn value<T: Real>(hi: f64, lo_scale: f64) -> T {
    // A second limb far below the first exercises the multi-limb paths.
    T::from_f64(hi) + T::from_f64(hi * lo_scale * 1e-20)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn dd_field_ops(a in 1e-3f64..1e3, b in 1e-3f64..1e3, s in -1.0f64..1.0, sa in prop::bool::ANY) {
        let a = if sa { -a } else { a };
        let x: Dd = value(a, s);
        let y: Dd = value(b, -s);
        let (ex, ey) = (exact(x.limbs()), exact(y.limbs()));
        prop_assert!(within(&exact((x * y).limbs()), &(&ex * &ey), 102));
        prop_assert!(within(&exact((x / y).limbs()), &(&ex / &ey), 101));
        let sum = &ex + &ey;
        if !sum.is_zero() {
            // Addition error is relative to the operands under cancellation.
            let scale = ex.abs() + ey.abs();
            let tol = scale / BigRational::from_integer(BigInt::from(2).pow(103));
            prop_assert!((exact((x + y).limbs()) - sum).abs() <= tol);
        }
    }

    #[test]
    fn qd_field_ops(a in 1e-3f64..1e3, b in 1e-3f64..1e3, s in -1.0f64..1.0) {
        let x: Qd = value(a, s);
        let y: Qd = value(b, s * 0.5);
        let (ex, ey) = (exact(x.limbs()), exact(y.limbs()));
        prop_assert!(within(&exact((x * y).limbs()), &(&ex * &ey), 205));
        prop_assert!(within(&exact((x / y).limbs()), &(&ex / &ey), 204));
        prop_assert!(within(&exact((x + y).limbs()), &(&ex + &ey), 206));
    }

    #[test]
    fn qd_sqrt_squares_back(a in 1e-6f64..1e6) {
        let x = Qd::from_f64(a);
        let r = x.sqrt();
        let er = exact(r.limbs());
        prop_assert!(within(&(&er * &er), &exact(x.limbs()), 204));
    }
}

#[test]
fn dd_sqrt_two_exact_digits() {
    // floor(sqrt(2) * 2^100) from integer square root.
    let two = BigInt::from(2);
    let target = (two.pow(201)).sqrt();
    let r = Dd::from_f64(2.0).sqrt();
    let scaled = exact(r.limbs()) * BigRational::from_integer(BigInt::from(2).pow(100));
    let diff = (scaled - BigRational::from_integer(target)).abs();
    assert!(diff < BigRational::from_integer(BigInt::from(64)));
}
