//! Exact scalars: arbitrary-precision rationals and prime fields.
//!
//! Every value carries its field so that mixed-field arithmetic is caught
//! immediately instead of producing garbage. Rationals are kept in lowest
//! terms with a positive denominator (the [`num`] crate maintains this
//! invariant); prime-field residues live in `[0, p)`.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The base field a computation runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FieldSpec {
    /// The rationals.
    Q,
    /// The prime field with `p` elements.
    Fp(u64),
}

impl FieldSpec {
    pub fn is_prime_field(self) -> bool {
        matches!(self, FieldSpec::Fp(_))
    }

    /// Checks that `p` is actually prime; rejects composite moduli early.
    pub fn validate(self) -> Result<(), String> {
        match self {
            FieldSpec::Q => Ok(()),
            FieldSpec::Fp(p) => {
                if p < 2 {
                    return Err(format!("modulus {p} is not prime"));
                }
                let mut d = 2u64;
                while d * d <= p {
                    if p % d == 0 {
                        return Err(format!("modulus {p} is not prime"));
                    }
                    d += 1;
                }
                Ok(())
            }
        }
    }

    pub fn zero(self) -> Scalar {
        Scalar::from_i64(0, self)
    }

    pub fn one(self) -> Scalar {
        Scalar::from_i64(1, self)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Q => write!(f, "Q"),
            FieldSpec::Fp(p) => write!(f, "Fp:{p}"),
        }
    }
}

/// An exact field element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Scalar {
    Rat(BigRational),
    Fp { p: u64, v: u64 },
}

impl Scalar {
    pub fn field(&self) -> FieldSpec {
        match self {
            Scalar::Rat(_) => FieldSpec::Q,
            Scalar::Fp { p, .. } => FieldSpec::Fp(*p),
        }
    }

    pub fn from_i64(n: i64, field: FieldSpec) -> Scalar {
        match field {
            FieldSpec::Q => Scalar::Rat(BigRational::from_integer(BigInt::from(n))),
            FieldSpec::Fp(p) => {
                let r = n.rem_euclid(p as i64) as u64;
                Scalar::Fp { p, v: r }
            }
        }
    }

    /// Builds `num/den` in the given field. `den` must be invertible.
    pub fn from_ratio(num: i64, den: i64, field: FieldSpec) -> Result<Scalar, String> {
        if den == 0 {
            return Err("zero denominator".into());
        }
        match field {
            FieldSpec::Q => Ok(Scalar::Rat(BigRational::new(
                BigInt::from(num),
                BigInt::from(den),
            ))),
            FieldSpec::Fp(_) => {
                let d = Scalar::from_i64(den, field);
                if d.is_zero() {
                    return Err(format!("denominator {den} vanishes in {field}"));
                }
                Ok(&Scalar::from_i64(num, field) * &d.inverse().unwrap())
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Fp { v, .. } => *v == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_one(),
            Scalar::Fp { v, .. } => *v == 1,
        }
    }

    pub fn inverse(&self) -> Option<Scalar> {
        match self {
            Scalar::Rat(r) => {
                if r.is_zero() {
                    None
                } else {
                    Some(Scalar::Rat(r.recip()))
                }
            }
            Scalar::Fp { p, v } => {
                if *v == 0 {
                    None
                } else {
                    Some(Scalar::Fp {
                        p: *p,
                        v: mod_pow(*v, *p - 2, *p),
                    })
                }
            }
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r.clone()),
            Scalar::Fp { p, v } => Scalar::Fp {
                p: *p,
                v: if *v == 0 { 0 } else { p - v },
            },
        }
    }

    fn assert_same(&self, other: &Scalar) {
        debug_assert_eq!(
            self.field(),
            other.field(),
            "mixed-field scalar arithmetic"
        );
    }
}

fn mod_pow(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut base: u128 = (b % p) as u128;
    b = 0;
    let _ = b;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

impl std::ops::Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.assert_same(rhs);
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a + b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                p: *p,
                v: ((*a as u128 + *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl std::ops::Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &rhs.neg()
    }
}

impl std::ops::Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.assert_same(rhs);
        match (self, rhs) {
            (Scalar::Rat(a), Scalar::Rat(b)) => Scalar::Rat(a * b),
            (Scalar::Fp { p, v: a }, Scalar::Fp { v: b, .. }) => Scalar::Fp {
                p: *p,
                v: ((*a as u128 * *b as u128) % *p as u128) as u64,
            },
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Fp { v, .. } => write!(f, "{v}"),
        }
    }
}

/// Parses `"-3/4"`, `"12"`, etc. into the given field.
pub fn parse_scalar(s: &str, field: FieldSpec) -> Result<Scalar, String> {
    let s = s.trim();
    let (num_s, den_s) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (s, "1"),
    };
    match field {
        FieldSpec::Q => {
            let num: BigInt = num_s.parse().map_err(|_| format!("bad numerator {num_s:?}"))?;
            let den: BigInt = den_s.parse().map_err(|_| format!("bad denominator {den_s:?}"))?;
            if den.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Scalar::Rat(BigRational::new(num, den)))
        }
        FieldSpec::Fp(_) => {
            let num: i64 = num_s.parse().map_err(|_| format!("bad numerator {num_s:?}"))?;
            let den: i64 = den_s.parse().map_err(|_| format!("bad denominator {den_s:?}"))?;
            Scalar::from_ratio(num, den, field)
        }
    }
}

impl Scalar {
    /// Signed magnitude hint used only for pretty-printing pivots first.
    pub fn is_negative(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_negative(),
            Scalar::Fp { .. } => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_reduce_to_lowest_terms() {
        let a = Scalar::from_ratio(2, 4, FieldSpec::Q).unwrap();
        let b = Scalar::from_ratio(1, 2, FieldSpec::Q).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "1/2");
        let c = Scalar::from_ratio(1, -2, FieldSpec::Q).unwrap();
        assert_eq!(c.to_string(), "-1/2");
    }

    #[test]
    fn prime_field_inverse() {
        let f = FieldSpec::Fp(5);
        for v in 1..5 {
            let x = Scalar::from_i64(v, f);
            let i = x.inverse().unwrap();
            assert!((&x * &i).is_one());
        }
        assert!(Scalar::from_i64(0, f).inverse().is_none());
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(FieldSpec::Fp(6).validate().is_err());
        assert!(FieldSpec::Fp(5).validate().is_ok());
        assert!(FieldSpec::Q.validate().is_ok());
    }

    #[test]
    fn parse_round_trip() {
        let s = parse_scalar("-7/3", FieldSpec::Q).unwrap();
        assert_eq!(s.to_string(), "-7/3");
        let t = parse_scalar("3/2", FieldSpec::Fp(5)).unwrap();
        // 3 * inverse(2) = 3 * 3 = 9 = 4 mod 5
        assert_eq!(t.to_string(), "4");
    }
}
