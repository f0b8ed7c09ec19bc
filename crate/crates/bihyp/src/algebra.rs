//! The commutative ring of bihyperbolic numbers.
//!
//! An element is `x + y j1 + z j2 + w j3` where the units satisfy
//! `j1^2 = j2^2 = j3^2 = 1`, `j1 j2 = j3`, `j2 j3 = j1`, `j3 j1 = j2`.
//! The ring splits through four orthogonal idempotents `e1..e4` summing to
//! one, and in that basis every operation acts componentwise on four real
//! coordinates. [`Bihyperbolic`] stores exactly those coordinates; the
//! canonical coefficients are a linear change of basis away.
//!
//! Componentwise structure drives everything downstream: zero divisors are
//! the elements with some coordinate zero, the partial order compares
//! coordinates pointwise, and the modulus takes componentwise absolute
//! values.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tol;

/// Coefficients with respect to the canonical basis `1, j1, j2, j3`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CanonicalCoords<T = f64> {
    pub x: T,
    pub y: T,
    pub z: T,
    pub w: T,
}

impl<T: Scalar> CanonicalCoords<T> {
    pub fn new(x: T, y: T, z: T, w: T) -> Self {
        CanonicalCoords { x, y, z, w }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite() && self.w.is_finite()
    }
}

impl CanonicalCoords<f64> {
    /// Parses the text form `x + y j1 + z j2 + w j3`.
    ///
    /// Terms may appear in any order, each at most once; missing terms are
    /// zero. Accepted term shapes: `2.5`, `j1`, `-j2`, `3 j3`, `3j3`.
    pub fn from_text(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(Error::InvalidInput("empty number literal".into()));
        }
        let mut coords = [0.0f64; 4];
        let mut seen = [false; 4];
        let bytes = compact.as_bytes();
        let mut pos = 0;
        while pos < bytes.len() {
            let mut sign = 1.0;
            while pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
                if bytes[pos] == b'-' {
                    sign = -sign;
                }
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() {
                let c = bytes[pos] as char;
                let exp_sign = (c == '+' || c == '-')
                    && pos > start
                    && matches!(bytes[pos - 1], b'e' | b'E');
                if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                    pos += 1;
                } else {
                    break;
                }
            }
            let digits = &compact[start..pos];
            if pos < bytes.len() && bytes[pos] == b'*' {
                pos += 1; // tolerate "2*j1"
            }
            let idx = if pos + 1 < bytes.len() && bytes[pos] == b'j' {
                let d = bytes[pos + 1];
                if !(b'1'..=b'3').contains(&d) {
                    return Err(Error::InvalidInput(format!("unknown unit in '{s}'")));
                }
                pos += 2;
                (d - b'0') as usize
            } else {
                0
            };
            let magnitude = if digits.is_empty() {
                if idx == 0 {
                    return Err(Error::InvalidInput(format!("dangling sign in '{s}'")));
                }
                1.0
            } else {
                digits
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad coefficient '{digits}'")))?
            };
            if seen[idx] {
                return Err(Error::InvalidInput(format!("repeated term in '{s}'")));
            }
            seen[idx] = true;
            coords[idx] = sign * magnitude;
        }
        Ok(CanonicalCoords::new(coords[0], coords[1], coords[2], coords[3]))
    }
}

impl<T: Scalar> fmt::Display for CanonicalCoords<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ", self.x)?;
        for (coeff, unit) in [(self.y, "j1"), (self.z, "j2"), (self.w, "j3")] {
            if coeff < T::zero() {
                write!(f, "- {} {unit}", coeff.neg())?;
            } else {
                write!(f, "+ {} {unit}", coeff)?;
            }
            if unit != "j3" {
                write!(f, " ")?;
            }
        }
        Ok(())
    }
}

/// Outcome of comparing two elements under the componentwise partial order.
///
/// `strict` records whether the inequality is strict in all four coordinates
/// at once; a plain `Less` means pointwise `<=` with at least one strict
/// coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "relation", rename_all = "snake_case")]
pub enum OrderRelation {
    Equal,
    Less { strict: bool },
    Greater { strict: bool },
    Incomparable,
}

/// A bihyperbolic number in idempotent coordinates.
///
/// The four fields are the coefficients on the orthogonal idempotents; all
/// ring operations act on them componentwise. Construction through
/// [`Bihyperbolic::new`] or [`Bihyperbolic::from_canonical`] guarantees
/// finite coordinates. Arithmetic does not re-validate, so overflowing to
/// infinity is the caller's concern, as with plain floats.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bihyperbolic<T = f64> {
    c: [T; 4],
}

impl<T: Scalar> Bihyperbolic<T> {
    pub fn new(c: [T; 4]) -> Result<Self> {
        if c.iter().all(|v| v.is_finite()) {
            Ok(Bihyperbolic { c })
        } else {
            Err(Error::InvalidInput("non-finite idempotent coordinate".into()))
        }
    }

    pub(crate) fn from_parts(c: [T; 4]) -> Self {
        Bihyperbolic { c }
    }

    pub fn zero() -> Self {
        Bihyperbolic { c: [T::zero(); 4] }
    }

    pub fn one() -> Self {
        Bihyperbolic { c: [T::one(); 4] }
    }

    /// Embeds a real number on the diagonal.
    pub fn from_real(t: T) -> Self {
        Bihyperbolic { c: [t; 4] }
    }

    /// The idempotent `e1`, `e2`, `e3` or `e4` for `i` in `0..4`.
    ///
    /// Panics on an out-of-range index; this is a programmer error, not a
    /// data error.
    pub fn idempotent(i: usize) -> Self {
        assert!(i < 4, "idempotent index {i} out of range");
        let mut c = [T::zero(); 4];
        c[i] = T::one();
        Bihyperbolic { c }
    }

    pub fn j1() -> Self {
        let one = T::one();
        Bihyperbolic { c: [one, -one, one, -one] }
    }

    pub fn j2() -> Self {
        let one = T::one();
        Bihyperbolic { c: [one, one, -one, -one] }
    }

    pub fn j3() -> Self {
        let one = T::one();
        Bihyperbolic { c: [one, -one, -one, one] }
    }

    /// Change of basis from canonical coefficients.
    pub fn from_canonical(cc: CanonicalCoords<T>) -> Result<Self> {
        if !cc.is_finite() {
            return Err(Error::InvalidInput("non-finite canonical coefficient".into()));
        }
        let CanonicalCoords { x, y, z, w } = cc;
        Ok(Bihyperbolic {
            c: [x + y + z + w, x - y + z - w, x + y - z - w, x - y - z + w],
        })
    }

    /// Change of basis back to canonical coefficients.
    pub fn to_canonical(self) -> CanonicalCoords<T> {
        let [l1, l2, l3, l4] = self.c;
        let quarter = T::from_config(0.25);
        CanonicalCoords {
            x: (l1 + l2 + l3 + l4) * quarter,
            y: (l1 - l2 + l3 - l4) * quarter,
            z: (l1 + l2 - l3 - l4) * quarter,
            w: (l1 - l2 - l3 + l4) * quarter,
        }
    }

    pub fn components(self) -> [T; 4] {
        self.c
    }

    pub fn component(self, i: usize) -> Result<T> {
        self.c.get(i).copied().ok_or(Error::BadIndex(i))
    }

    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Bihyperbolic { c: self.c.map(f) }
    }

    /// Componentwise absolute value. Always lies in the nonnegative cone.
    pub fn modulus(self) -> Self {
        self.map(|v| v.abs())
    }

    /// True when some coordinate vanishes within `tol`, i.e. the element is
    /// zero or a zero divisor.
    pub fn is_in_null_cone(self, tol: T) -> bool {
        self.c.iter().any(|v| v.abs() <= tol)
    }

    pub fn is_zero(self, tol: T) -> bool {
        self.c.iter().all(|v| v.abs() <= tol)
    }

    /// A nonzero element of the null cone annihilates some nonzero element.
    pub fn is_zero_divisor(self, tol: T) -> bool {
        self.is_in_null_cone(tol) && !self.is_zero(tol)
    }

    /// Componentwise reciprocal, defined off the null cone.
    pub fn inverse_with_tol(self, tol: T) -> Result<Self> {
        if self.is_in_null_cone(tol) {
            return Err(Error::NotInvertible);
        }
        Ok(self.map(|v| v.recip()))
    }

    /// [`Bihyperbolic::inverse_with_tol`] at the default null cone tolerance.
    pub fn inverse(self) -> Result<Self> {
        self.inverse_with_tol(T::from_config(tol::NULL_CONE))
    }

    /// Componentwise comparison. See [`OrderRelation`] for strictness.
    pub fn compare(self, rhs: Self) -> OrderRelation {
        let mut all_le = true;
        let mut all_ge = true;
        let mut all_lt = true;
        let mut all_gt = true;
        let mut all_eq = true;
        for (a, b) in self.c.iter().zip(rhs.c.iter()) {
            all_le &= a <= b;
            all_ge &= a >= b;
            all_lt &= a < b;
            all_gt &= a > b;
            all_eq &= a == b;
        }
        if all_eq {
            OrderRelation::Equal
        } else if all_le {
            OrderRelation::Less { strict: all_lt }
        } else if all_ge {
            OrderRelation::Greater { strict: all_gt }
        } else {
            OrderRelation::Incomparable
        }
    }

    /// Pointwise `<=` in all coordinates.
    pub fn le(self, rhs: Self) -> bool {
        self.c.iter().zip(rhs.c.iter()).all(|(a, b)| a <= b)
    }

    /// Strict `<` in all four coordinates at once.
    pub fn lt(self, rhs: Self) -> bool {
        self.c.iter().zip(rhs.c.iter()).all(|(a, b)| a < b)
    }

    pub fn ge(self, rhs: Self) -> bool {
        rhs.le(self)
    }

    pub fn gt(self, rhs: Self) -> bool {
        rhs.lt(self)
    }

    /// Membership in the nonnegative cone.
    pub fn is_nonnegative(self) -> bool {
        self.c.iter().all(|v| *v >= T::zero())
    }

    /// Componentwise maximum over a nonempty collection.
    pub fn sup_h2(items: &[Self]) -> Result<Self> {
        Self::fold_components(items, T::max)
    }

    /// Componentwise minimum over a nonempty collection.
    pub fn inf_h2(items: &[Self]) -> Result<Self> {
        Self::fold_components(items, T::min)
    }

    fn fold_components(items: &[Self], pick: impl Fn(T, T) -> T) -> Result<Self> {
        let (first, rest) = items.split_first().ok_or(Error::EmptySet)?;
        let mut acc = first.c;
        for item in rest {
            for (a, b) in acc.iter_mut().zip(item.c.iter()) {
                *a = pick(*a, *b);
            }
        }
        Ok(Bihyperbolic { c: acc })
    }

    /// Largest coordinate magnitude; convenient as a scale estimate.
    pub fn sup_abs(self) -> T {
        self.c.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

impl<T: Scalar> Add for Bihyperbolic<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a = *a + *b;
        }
        Bihyperbolic { c }
    }
}

impl<T: Scalar> Sub for Bihyperbolic<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a = *a - *b;
        }
        Bihyperbolic { c }
    }
}

impl<T: Scalar> Neg for Bihyperbolic<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.map(|v| -v)
    }
}

impl<T: Scalar> Mul for Bihyperbolic<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c.iter()) {
            *a = *a * *b;
        }
        Bihyperbolic { c }
    }
}

impl<T: Scalar> Mul<T> for Bihyperbolic<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        self.map(|v| v * rhs)
    }
}

impl<T: Scalar> fmt::Display for Bihyperbolic<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_canonical().fmt(f)
    }
}

mod serde_impl {
    use super::*;
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum NumberRepr {
        Canonical { canonical: [f64; 4] },
        Idempotent { idempotent: [f64; 4] },
        Components([f64; 4]),
        Real(f64),
        Text(String),
    }

    impl Serialize for Bihyperbolic<f64> {
        fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
            use serde::ser::SerializeStruct;
            let mut s = serializer.serialize_struct("Bihyperbolic", 1)?;
            s.serialize_field("idempotent", &self.components())?;
            s.end()
        }
    }

    impl<'de> Deserialize<'de> for Bihyperbolic<f64> {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
            let repr = NumberRepr::deserialize(deserializer)?;
            let number = match repr {
                NumberRepr::Canonical { canonical: [x, y, z, w] } => {
                    Bihyperbolic::from_canonical(CanonicalCoords::new(x, y, z, w))
                }
                NumberRepr::Idempotent { idempotent } => Bihyperbolic::new(idempotent),
                NumberRepr::Components(c) => Bihyperbolic::new(c),
                NumberRepr::Real(t) if t.is_finite() => Ok(Bihyperbolic::from_real(t)),
                NumberRepr::Real(_) => Err(Error::InvalidInput("non-finite number".into())),
                NumberRepr::Text(s) => {
                    CanonicalCoords::from_text(&s).and_then(Bihyperbolic::from_canonical)
                }
            };
            number.map_err(|e| D::Error::custom(e.to_string()))
        }
    }
}
