//! Exact rational computer algebra: polynomials, Groebner bases, syzygies.

pub mod groebner;
pub mod modgb;
pub mod poly;

pub use groebner::{
    dimension, eliminate_first, exact_div, groebner_basis, ideal_contains, normal_form,
    principal_generator,
};
pub use modgb::{matrix_columns, module_groebner, submodule_contains, syzygies, VecPoly};
pub use poly::{parse_poly, QPoly, TermOrder};
