//! Spectrum, level crossings and isolated exact (Juddian) solutions of the
//! two-photon Rabi Hamiltonian
//! `H = (ω0/2) σz + ω b†b + g (b†² + b²)(σ+ + σ−)`.

pub mod crossings;
mod dense;
pub mod eigen;
pub mod error;
pub mod hamiltonian;
pub mod juddian;
pub mod params;
pub mod reference;
pub mod squeezed;
pub mod su11;

pub use error::{Error, Result};
pub use params::ModelParams;

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
/// Output order always matches input order.
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
