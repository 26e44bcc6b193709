//! Exact machinery for bounding discriminants with one class per genus:
//! binary quadratic forms and class groups, rational interval arithmetic
//! with certified enclosures, Dirichlet L(1, chi) evaluation, and a cutoff
//! engine that emits independently checkable inequality certificates.

pub mod cutoff;
pub mod forms;
pub mod interval;
pub mod lfunc;

pub use cutoff::{
    ci_exponent, find_cutoff, min_genus_bound, nth_prime, primorial, verify_certificate,
    CutoffCertificate, CutoffError, PrimorialTable,
};
pub use forms::{
    class_number, compose, enumerate_reduced, genus_report, principal_form, reduce, search_ocpg,
    validate_discriminant, Discriminant, FormsError, GenusReport, QuadraticForm, SearchMode,
};
pub use interval::{Interval, IntervalError, Precision, Rational, Verdict};
pub use lfunc::{
    analytic_class_number, bound_check, character_sum, kronecker, l_one, BoundHypothesis,
    BoundVerdict, LFuncError,
};
