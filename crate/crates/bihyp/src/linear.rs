//! Finite free modules over the bihyperbolic ring.
//!
//! An element of the rank `n` module is stored as four real `n`-vectors,
//! the coefficients on the idempotents. Scalar action multiplies the i-th
//! real vector by the i-th coordinate of the scalar, so module structure is
//! again componentwise. The ring-valued norm evaluates one real vector norm
//! per component and reassembles the results into a nonnegative ring element.

use serde::{Deserialize, Serialize};

use crate::algebra::Bihyperbolic;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Element of the rank `dim` free module, split along the idempotents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HVectorRepr<T>", into = "HVectorRepr<T>")]
#[serde(bound(
    serialize = "T: Scalar + Serialize",
    deserialize = "T: Scalar + Deserialize<'de>"
))]
pub struct HVector<T = f64> {
    dim: usize,
    comps: [Vec<T>; 4],
}

/// Wire shape: `{"dim":n,"comps":[[..],[..],[..],[..]]}`.
#[derive(Serialize, Deserialize)]
struct HVectorRepr<T> {
    dim: usize,
    comps: [Vec<T>; 4],
}

impl<T: Scalar> TryFrom<HVectorRepr<T>> for HVector<T> {
    type Error = Error;
    fn try_from(repr: HVectorRepr<T>) -> Result<Self> {
        let v = HVector::new(repr.comps)?;
        if v.dim != repr.dim {
            return Err(Error::DimensionMismatch { expected: repr.dim, found: v.dim });
        }
        Ok(v)
    }
}

impl<T: Scalar> From<HVector<T>> for HVectorRepr<T> {
    fn from(v: HVector<T>) -> Self {
        HVectorRepr { dim: v.dim, comps: v.comps }
    }
}

impl<T: Scalar> HVector<T> {
    /// Builds an element from its four real coefficient vectors, which must
    /// share a length and be finite throughout.
    pub fn new(comps: [Vec<T>; 4]) -> Result<Self> {
        let dim = comps[0].len();
        for c in &comps {
            if c.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: c.len() });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("non-finite vector entry".into()));
            }
        }
        Ok(HVector { dim, comps })
    }

    pub fn zeros(dim: usize) -> Self {
        HVector { dim, comps: std::array::from_fn(|_| vec![T::zero(); dim]) }
    }

    /// Embeds a real vector diagonally.
    pub fn from_real_vec(v: &[T]) -> Self {
        HVector { dim: v.len(), comps: std::array::from_fn(|_| v.to_vec()) }
    }

    /// Builds an element from ring-valued entries.
    pub fn from_entries(entries: &[Bihyperbolic<T>]) -> Self {
        let mut comps: [Vec<T>; 4] = std::array::from_fn(|_| Vec::with_capacity(entries.len()));
        for e in entries {
            let c = e.components();
            for i in 0..4 {
                comps[i].push(c[i]);
            }
        }
        HVector { dim: entries.len(), comps }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The i-th real coefficient vector.
    pub fn comp(&self, i: usize) -> Result<&[T]> {
        self.comps.get(i).map(|v| v.as_slice()).ok_or(Error::BadIndex(i))
    }

    pub fn comps(&self) -> &[Vec<T>; 4] {
        &self.comps
    }

    /// The k-th ring-valued entry.
    pub fn entry(&self, k: usize) -> Result<Bihyperbolic<T>> {
        if k >= self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: k });
        }
        Ok(Bihyperbolic::from_parts(std::array::from_fn(|i| self.comps[i][k])))
    }

    pub fn entries(&self) -> Vec<Bihyperbolic<T>> {
        (0..self.dim).map(|k| self.entry(k).expect("k < dim")).collect()
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a + b)
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let comps = std::array::from_fn(|i| {
            self.comps[i]
                .iter()
                .zip(rhs.comps[i].iter())
                .map(|(a, b)| f(*a, *b))
                .collect()
        });
        Ok(HVector { dim: self.dim, comps })
    }

    pub fn neg(&self) -> Self {
        HVector {
            dim: self.dim,
            comps: std::array::from_fn(|i| self.comps[i].iter().map(|v| -*v).collect()),
        }
    }

    /// Ring scalar action: the i-th coefficient vector scales by the i-th
    /// coordinate of `lambda`.
    pub fn scale(&self, lambda: Bihyperbolic<T>) -> Self {
        let l = lambda.components();
        HVector {
            dim: self.dim,
            comps: std::array::from_fn(|i| self.comps[i].iter().map(|v| *v * l[i]).collect()),
        }
    }

    pub fn scale_real(&self, t: T) -> Self {
        self.scale(Bihyperbolic::from_real(t))
    }

    /// Multiplication by the i-th idempotent: keeps one coefficient vector,
    /// zeroes the rest.
    pub fn project(&self, i: usize) -> Result<Self> {
        if i >= 4 {
            return Err(Error::BadIndex(i));
        }
        let mut out = Self::zeros(self.dim);
        out.comps[i] = self.comps[i].clone();
        Ok(out)
    }

    /// Largest entry magnitude across all components.
    pub fn sup_abs(&self) -> T {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.sup_abs() <= tol
    }
}

/// Real vector norm applied within one idempotent component.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentNorm {
    P1,
    P2,
    PInf,
}

impl ComponentNorm {
    pub fn eval<T: Scalar>(self, v: &[T]) -> T {
        match self {
            ComponentNorm::P1 => v.iter().fold(T::zero(), |s, x| s + x.abs()),
            ComponentNorm::P2 => v.iter().fold(T::zero(), |s, x| s + *x * *x).sqrt(),
            ComponentNorm::PInf => v.iter().fold(T::zero(), |m, x| m.max(x.abs())),
        }
    }
}

mod component_norm_serde {
    use super::ComponentNorm;
    use serde::de::Error as DeError;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(u8),
        Text(String),
    }

    impl Serialize for ComponentNorm {
        fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
            match self {
                ComponentNorm::P1 => serializer.serialize_u8(1),
                ComponentNorm::P2 => serializer.serialize_u8(2),
                ComponentNorm::PInf => serializer.serialize_str("inf"),
            }
        }
    }

    impl<'de> Deserialize<'de> for ComponentNorm {
        fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
            match Repr::deserialize(deserializer)? {
                Repr::Num(1) => Ok(ComponentNorm::P1),
                Repr::Num(2) => Ok(ComponentNorm::P2),
                Repr::Num(p) => Err(D::Error::custom(format!("unsupported norm exponent {p}"))),
                Repr::Text(s) if s == "inf" || s == "max" => Ok(ComponentNorm::PInf),
                Repr::Text(s) => Err(D::Error::custom(format!("unsupported norm '{s}'"))),
            }
        }
    }
}

/// Ring-valued norm: one real norm per idempotent component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalNorm {
    pub norms: [ComponentNorm; 4],
}

impl CanonicalNorm {
    pub fn uniform(p: ComponentNorm) -> Self {
        CanonicalNorm { norms: [p; 4] }
    }

    /// Evaluates to a ring element in the nonnegative cone.
    pub fn eval<T: Scalar>(&self, v: &HVector<T>) -> Bihyperbolic<T> {
        Bihyperbolic::from_parts(std::array::from_fn(|i| self.norms[i].eval(&v.comps[i])))
    }
}

impl Default for CanonicalNorm {
    fn default() -> Self {
        CanonicalNorm::uniform(ComponentNorm::P2)
    }
}
