//! The operator `g` of a variational inequality.

use crate::Result;

/// An operator `g: Q → E*`, monotone by contract.
///
/// Evaluation takes `&mut self` so wrappers may carry per-run state (the
/// noisy oracle advances a query counter); an oracle therefore belongs to one
/// solver run at a time.
pub trait Oracle {
    fn dim(&self) -> usize;

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()>;
}

impl<O: Oracle + ?Sized> Oracle for &mut O {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        (**self).eval(u, out)
    }
}

/// Adapts a closure `|u, out| { ... }` into an [`Oracle`].
pub struct FnOracle<F> {
    dim: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: FnMut(&[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        FnOracle { dim, f }
    }
}

impl<F> Oracle for FnOracle<F>
where
    F: FnMut(&[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&mut self, u: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(u, out);
        Ok(())
    }
}

impl<F> core::fmt::Debug for FnOracle<F> {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("FnOracle").field("dim", &self.dim).finish()
    }
}
