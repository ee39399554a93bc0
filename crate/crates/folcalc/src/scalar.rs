//! Gaussian rationals: complex numbers with exact rational real and
//! imaginary parts. Every computation in this crate runs over this field;
//! there is no floating point anywhere.

use num::{BigInt, BigRational, Complex, One, Zero};

pub type Rational = BigRational;

/// The coefficient field
pub type Scalar = Complex<BigRational>;

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// The imaginary unit.
pub fn i() -> Scalar {
    Scalar::new(BigRational::zero(), BigRational::one())
}

pub fn int(v: i64) -> Scalar {
    Scalar::from(BigRational::from_integer(BigInt::from(v)))
}

pub fn from_bigint(v: &BigInt) -> Scalar {
    Scalar::from(BigRational::from_integer(v.clone()))
}

/// num/den as a real scalar; den must be nonzero.
pub fn rat(num: i64, den: i64) -> Scalar {
    assert!(den != 0, "zero denominator");
    Scalar::from(BigRational::new(BigInt::from(num), BigInt::from(den)))
}

/// re_num/re_den + (im_num/im_den) i
pub fn complex(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Scalar {
    assert!(re_den != 0 && im_den != 0, "zero denominator");
    Scalar::new(
        BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
        BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
    )
}

pub fn is_zero(s: &Scalar) -> bool {
    s.is_zero()
}

/// Compact display used in diagnostics: "a", "bi", or "a+bi".
pub fn fmt(s: &Scalar) -> String {
    if s.im.is_zero() {
        format!("{}", s.re)
    } else if s.re.is_zero() {
        format!("{}i", s.im)
    } else if s.im < BigRational::zero() {
        format!("{}{}i", s.re, s.im)
    } else {
        format!("{}+{}i", s.re, s.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic_is_exact() {
        let a = rat(1, 3);
        let b = rat(1, 6);
        assert_eq!(a.clone() + b.clone(), rat(1, 2));
        assert_eq!(a - b, rat(1, 6));
        let c = complex(0, 1, 1, 2); // i/2
        assert_eq!(c.clone() * c, rat(-1, 4));
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(i() * i(), int(-1));
    }

    #[test]
    fn conjugate_flips_imaginary_part() {
        let c = complex(2, 3, -1, 5);
        assert_eq!(c.conj(), complex(2, 3, 1, 5));
    }

    #[test]
    fn division_round_trips() {
        let a = complex(3, 4, 5, 7);
        let b = complex(-2, 1, 1, 3);
        let q = a.clone() / b.clone();
        assert_eq!(q * b, a);
    }

    #[test]
    fn display_forms() {
        assert_eq!(fmt(&rat(-3, 4)), "-3/4");
        assert_eq!(fmt(&i()), "1i");
        assert_eq!(fmt(&complex(1, 2, -1, 2)), "1/2-1/2i");
    }
}
