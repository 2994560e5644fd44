//! Exact and certified computations for zero sets of power series with restricted
//! coefficients, and for the connectedness loci `M_n` of fractal n-gons.

pub mod coeffsets;
pub mod cyclotomic;
pub mod star;
pub mod polyseries;
pub mod join;
pub mod chain;
pub mod locus;
pub mod cli;
