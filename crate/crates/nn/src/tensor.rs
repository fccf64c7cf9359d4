//! Minimal dense tensors, generic over the scalar type.
//!
//! Training runs in `f32`; gradient verification instantiates the same
//! kernels with `f64`.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive};

/// Scalar bound shared by every kernel in this crate.
pub trait Scalar:
    Float + FromPrimitive + AddAssign + SubAssign + MulAssign + Sum + Send + Sync + Debug + Display + 'static
{
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Shorthand for lifting literals into the generic scalar type.
#[inline]
pub(crate) fn lit<S: Scalar>(x: f64) -> S {
    S::from_f64(x).expect("finite literal")
}

/// `a * b + acc` as a single fused operation where the target supports it.
/// Without hardware FMA the fused intrinsic would fall back to a libm call,
/// so use the plain two-op form there.
#[inline(always)]
pub(crate) fn fmadd<S: Scalar>(a: S, b: S, acc: S) -> S {
    #[cfg(target_feature = "fma")]
    {
        a.mul_add(b, acc)
    }
    #[cfg(not(target_feature = "fma"))]
    {
        acc + a * b
    }
}

/// A dense row-major tensor: shape plus flat data.
#[derive(Clone, PartialEq, Debug)]
pub struct Tensor<S> {
    shape: Vec<usize>,
    data: Vec<S>,
}

impl<S: Scalar> Tensor<S> {
    pub fn zeros(shape: &[usize]) -> Tensor<S> {
        Tensor { shape: shape.to_vec(), data: vec![S::zero(); shape.iter().product()] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<S>) -> Tensor<S> {
        assert_eq!(data.len(), shape.iter().product::<usize>(), "shape/data mismatch");
        Tensor { shape: shape.to_vec(), data }
    }

    pub fn filled(shape: &[usize], value: S) -> Tensor<S> {
        Tensor { shape: shape.to_vec(), data: vec![value; shape.iter().product()] }
    }

    #[inline]
    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn data(&self) -> &[S] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [S] {
        &mut self.data
    }

    /// Reinterprets the flat data under a new shape of equal volume.
    pub fn reshaped(mut self, shape: &[usize]) -> Tensor<S> {
        assert_eq!(self.len(), shape.iter().product::<usize>(), "reshape changes volume");
        self.shape = shape.to_vec();
        self
    }

    pub fn map_to<T: Scalar>(&self) -> Tensor<T> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| T::from_f64(v.to_f64().unwrap()).unwrap()).collect(),
        }
    }
}

/// Runs `f` over disjoint mutable chunks, in parallel when the `parallel`
/// feature is on. Each chunk is written by exactly one worker and every
/// reduction inside `f` runs in a fixed order, so results are identical for
/// any thread count.
pub(crate) fn for_each_chunk_mut<S, F>(data: &mut [S], chunk: usize, f: F)
where
    S: Send,
    F: Fn(usize, &mut [S]) + Send + Sync,
{
    debug_assert_eq!(data.len() % chunk.max(1), 0);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
    }
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
}

/// Order-preserving indexed map, parallel when the feature is on.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    (0..n).map(f).collect()
}
