//! Exact rational arithmetic helpers: parsing, formatting, gcd, and
//! controlled conversion to floating point.
//!
//! Roof values, Birkhoff sums, flow heights, and lattice constants are all
//! kept as exact rationals; floats enter only at the metric/thermodynamic
//! boundary.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used throughout the crate.
pub type Rational = BigRational;

/// Build a rational from a pair of machine integers.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Build a rational from an integer.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parse `"p/q"`, `"p"`, or a signed decimal-free integer literal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>()
            .map_err(|_| Error::Parse(format!("bad integer literal: {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let num = parse_int(p.trim())?;
            let den = parse_int(q.trim())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(s)?)),
    }
}

/// Format as `"p"` for integers and `"p/q"` otherwise.
pub fn format_rational(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Positive gcd of two rationals: the largest rational dividing both with
/// integer quotients. `gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d)` reduced.
pub fn rational_gcd(x: &Rational, y: &Rational) -> Rational {
    if x.is_zero() {
        return y.abs();
    }
    if y.is_zero() {
        return x.abs();
    }
    let num = (x.numer() * y.denom()).gcd(&(y.numer() * x.denom()));
    Rational::new(num, x.denom() * y.denom())
}

/// Floor of a rational as a big integer.
pub fn rational_floor(x: &Rational) -> BigInt {
    x.floor().to_integer()
}

/// Convert to `f64`; exact for dyadics and small integers, nearest otherwise.
pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// `exp(-h * w)` evaluated through `exp2` so that integer multiples of
/// `ln 2` stay exact powers of two. `s_of_t` depends on this to report
/// lattice sums without float drift.
pub fn exp_neg(h: f64, w: &Rational) -> f64 {
    ((-h / std::f64::consts::LN_2) * to_f64(w)).exp2()
}

/// Nonnegative residue `x mod m` in `[0, m)` for positive modulus `m`.
pub fn rational_mod(x: &Rational, m: &Rational) -> Rational {
    debug_assert!(m.is_positive());
    let q = (x / m).floor();
    x - q * m
}

/// True when `x / m` is an integer.
pub fn divides(m: &Rational, x: &Rational) -> bool {
    (x / m).is_integer()
}

/// Little-endian big-unsigned matrix power, used as an exact oracle for
/// periodic-point and loop counts.
pub fn matrix_power(adj: &[Vec<u8>], n: usize) -> Vec<Vec<BigUint>> {
    let dim = adj.len();
    let mut base: Vec<Vec<BigUint>> = adj
        .iter()
        .map(|row| row.iter().map(|&e| BigUint::from(e)).collect())
        .collect();
    let mut result: Vec<Vec<BigUint>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { BigUint::one() } else { BigUint::zero() })
                .collect()
        })
        .collect();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            result = mat_mul(&result, &base);
        }
        base = mat_mul(&base, &base);
        n >>= 1;
    }
    result
}

fn mat_mul(a: &[Vec<BigUint>], b: &[Vec<BigUint>]) -> Vec<Vec<BigUint>> {
    let dim = a.len();
    (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| (0..dim).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Render a float with 12 significant digits in plain decimal notation.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{:.*e}", 11, x);
    // "d.dddddddddddem" -> plain decimal
    let (mantissa, exp) = s.split_once('e').expect("exp format");
    let exp: i32 = exp.parse().expect("exp digits");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let point = 1 + exp; // digits before the decimal point
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat(-point as usize), digits)
    } else if (point as usize) >= digits.len() {
        format!("{}{}", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!("{}.{}", &digits[..point as usize], &digits[point as usize..])
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/4", "-7/2", "5", "0", "12/8"] {
            let x = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&x)).unwrap();
            assert_eq!(x, back);
        }
        assert_eq!(format_rational(&parse_rational("12/8").unwrap()), "3/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("a/b").is_err());
    }

    #[test]
    fn gcd_of_rationals() {
        assert_eq!(rational_gcd(&int(4), &int(6)), int(2));
        assert_eq!(rational_gcd(&ratio(1, 2), &ratio(1, 3)), ratio(1, 6));
        assert_eq!(rational_gcd(&ratio(3, 2), &ratio(5, 2)), ratio(1, 2));
        assert_eq!(rational_gcd(&int(0), &ratio(7, 3)), ratio(7, 3));
    }

    #[test]
    fn modulo_lands_in_range() {
        let m = int(4);
        assert_eq!(rational_mod(&int(-1), &m), int(3));
        assert_eq!(rational_mod(&int(9), &m), int(1));
        assert_eq!(rational_mod(&ratio(-1, 2), &m), ratio(7, 2));
    }

    #[test]
    fn exp_neg_is_exact_on_the_log2_lattice() {
        let h = std::f64::consts::LN_2;
        for t in 1..=24 {
            assert_eq!(exp_neg(h, &int(t)), 0.5f64.powi(t as i32));
        }
    }

    #[test]
    fn matrix_power_traces() {
        // golden mean adjacency [[1,1],[1,0]]: trace(A^3) = 4
        let a = vec![vec![1, 1], vec![1, 0]];
        let p3 = matrix_power(&a, 3);
        let trace = &p3[0][0] + &p3[1][1];
        assert_eq!(trace, BigUint::from(4u32));
    }

    #[test]
    fn sig12_formatting() {
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(2.0_f64.ln()), "0.693147180560");
        assert_eq!(format_sig12(123456.0), "123456.000000");
        assert_eq!(format_sig12(-0.25), "-0.250000000000");
    }
}
