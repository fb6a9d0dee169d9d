//! Smoothed divergences between discrete count distributions, and their
//! three-way extensions.
//!
//! The crate computes Kullback-Leibler and Jensen-Shannon divergences between
//! labeled count distributions (bags of tokens, n-grams, or arbitrary items),
//! using an elementary smoothing rule that assigns `1/|T|` to unseen items so
//! every logarithm stays finite. On top of the pairwise measures it provides
//! two trivergence constructions over triplets of distributions:
//!
//! - **product form**: the product of the three pairwise divergences, and
//! - **compound form**: a divergence between one distribution and a scalar
//!   pseudo-probability derived from the divergence of the other two.
//!
//! All logarithms are base 2; pairwise values are reported in bits, product
//! trivergences in bits³.
//!
//! ## Normalization modes
//!
//! Three [`NormalizationMode`]s control how counts become probabilities:
//!
//! - [`PaperLiteral`](NormalizationMode::PaperLiteral) divides each count by
//!   the number of *distinct* items. Values may exceed 1 and need not sum
//!   to 1; no sign guarantee is made for KL.
//! - [`TokenNormalized`](NormalizationMode::TokenNormalized) divides by the
//!   token total, so in-support probabilities sum to 1 before smoothing.
//! - [`Strict`](NormalizationMode::Strict) jointly renormalizes probabilities
//!   and smoothing mass over the evaluation support. This is the mode under
//!   which the classical guarantees hold and are tested: KL ≥ 0 with equality
//!   iff the distributions agree, 0 ≤ JS ≤ 1, and √JS is a metric.
//!
//! ## Verification oracle
//!
//! The [`oracle`] module ships deliberately naive reference implementations
//! that evaluate the same formulas by direct summation in 192-bit arithmetic.
//! They share smoothing policy with the main kernels but nothing else, so a
//! disagreement isolates a kernel bug rather than a policy difference.
//!
//! ```
//! use triverge::{CountDistribution, NormalizationMode, SmoothingContext};
//!
//! let p = CountDistribution::from_counts("p", [("a", 2), ("b", 1), ("c", 1)]).unwrap();
//! let q = CountDistribution::from_counts("q", [("a", 1), ("b", 1)]).unwrap();
//! let ctx = SmoothingContext::pair_sum(NormalizationMode::PaperLiteral, &p, &q);
//!
//! let report = triverge::kl(&p, &q, &ctx).unwrap();
//! assert!((report.value - 0.32735936400091254).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod distribution;
pub mod divergence;
mod error;
pub mod ingest;
mod numeric;
pub mod oracle;
pub mod trivergence;

pub use distribution::{
    canonical_order, pair_regions, smoothed_value, triplet_regions, Canonicalization,
    CountDistribution, DenominatorPolicy, ItemId, NormalizationMode, PairRegions, SmoothingContext,
    TripletRegion, TripletRegions, ZeroPattern,
};
pub use divergence::{
    js, kl, metric_axiom_check, pairwise, sqrt_js, AxiomOutcome, AxiomReport, AxiomWitness,
    DivergenceKind, DivergenceReport, PairRegion,
};
pub use error::{Error, Result};
pub use trivergence::{
    enumerate_variants, evaluate_variant, scalar_takes_zero_branch, triv_compound_js,
    triv_compound_js_with, triv_compound_kl, triv_product, CompoundNormalizer,
    JsCompoundNormalizer, Role, TrivergenceComponents, TrivergenceForm, TrivergenceResult,
    VariantDescriptor, VariantRoles,
};
