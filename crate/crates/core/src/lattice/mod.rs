//! Lattice spectral oracle.
//!
//! All quantizations are dense Hermitian matrices on a periodic grid built on the
//! nearest-neighbour Laplacian `-Delta_h`.  The free kernel `K` of
//! `sqrt(-Delta_h + m^2)` comes from its Fourier multiplier, and magnetic phases are
//! attached to the unwrapped chord between sites:
//!
//! * `H1[x, y] = K(x - y) exp(i A((x + y)/2) . (x - y))`
//! * `H2[x, y] = K(x - y) exp(i int_y^x A . dl)`
//! * `H3 = sqrt(-Delta_A + m^2)` with Peierls link phases on the 5-point (3-point in
//!   one dimension) stencil.
//!
//! At `A = 0` all three reduce to `H0` (`H3` up to eigensolver round-off), and for
//! `A = grad(phi)` both `H2` and `H3` equal `U H0 U*` with `U = e^{i phi}`.  The
//! off-diagonal entries of `K` are negative, so the lattice semigroups preserve
//! positivity.

mod checks;
mod covariant;
mod grid;
mod operator;

pub use checks::*;
pub use covariant::{chebyshev_coefficients, CovariantLaplacian};
pub use grid::{Lattice, DENSE_SITE_BUDGET};
pub use operator::{
    build, build_h0, build_h1, build_h2, build_h3, build_nr, heat_kernel, laplacian_symbol, relativistic_kernel, Eigen,
    LatticeOperator, Variant,
};
