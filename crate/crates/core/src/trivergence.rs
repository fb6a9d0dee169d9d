//! Three-way divergence constructions over a canonically ordered triple:
//! the product of the three pairwise divergences, and the compound form that
//! measures one distribution against a scalar pseudo-probability derived
//! from the divergence of the other two.

use std::collections::BTreeSet;

use crate::distribution::{
    canonical_order, Canonicalization, CountDistribution, ItemId, NormalizationMode,
    SmoothingContext,
};
use crate::divergence::{js_item_term, pairwise, DivergenceKind, DivergenceReport};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TrivergenceForm {
    /// `D(p||q) · D(q||r) · D(p||r)`; bits³.
    Product,
    /// `D[p || D(q||r)/normalizer]`; bits.
    Compound,
}

impl TrivergenceForm {
    pub fn as_str(self) -> &'static str {
        match self {
            TrivergenceForm::Product => "product",
            TrivergenceForm::Compound => "compound",
        }
    }
}

/// What the compound scalar was divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompoundNormalizer {
    /// Distinct-item count of the inner pair's first distribution (`|q|`);
    /// the KL rule.
    InnerFirstDistinct,
    /// Cardinality of the inner pair's union support (`|q ∪ r|`); the JS
    /// default.
    InnerUnion,
    /// Sum of the inner pair's distinct counts (`|q| + |r|`); the alternative
    /// JS normalizer.
    InnerDistinctSum,
}

impl CompoundNormalizer {
    pub fn as_str(self) -> &'static str {
        match self {
            CompoundNormalizer::InnerFirstDistinct => "inner-first-distinct",
            CompoundNormalizer::InnerUnion => "inner-union",
            CompoundNormalizer::InnerDistinctSum => "inner-distinct-sum",
        }
    }
}

/// Which cardinality divides the inner JS value in the compound form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum JsCompoundNormalizer {
    /// `|q ∪ r|`; the default.
    #[default]
    UnionCardinality,
    /// `|q| + |r|`.
    DistinctSum,
}

/// Scalars at or below this take the zero branch. A genuinely nonzero inner
/// divergence over integer counts is orders of magnitude larger, while a
/// true zero lands within rounding noise of 0 whose sign is arbitrary; the
/// threshold makes the branch decision stable across evaluators.
const SCALAR_ZERO_EPS: f64 = 1e-12;

/// Whether a compound scalar is treated as zero, forcing the `1/|T|`
/// substitution. Shared with the verification oracle so both sides branch
/// identically.
pub fn scalar_takes_zero_branch(scalar: f64) -> bool {
    scalar <= SCALAR_ZERO_EPS
}

/// Component values backing a trivergence result.
#[derive(Debug, Clone, PartialEq)]
pub enum TrivergenceComponents {
    Product {
        /// `D(p||q)`, `D(q||r)`, `D(p||r)` over the canonical roles.
        factors: Box<[DivergenceReport; 3]>,
    },
    Compound {
        inner: DivergenceReport,
        /// Inner value / normalizer, recorded before any zero-branch
        /// substitution; may be non-positive.
        scalar: f64,
        normalizer: u64,
        normalizer_kind: CompoundNormalizer,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrivergenceResult {
    pub form: TrivergenceForm,
    pub base: DivergenceKind,
    /// Bits for the compound form, bits³ for the product form.
    pub value: f64,
    pub components: TrivergenceComponents,
    pub canonicalization: Canonicalization,
    pub context: SmoothingContext,
    /// Whether a non-positive inner divergence forced the `1/|T|`
    /// substitution. Always false for the product form.
    pub zero_branch: bool,
}

impl TrivergenceResult {
    pub fn units(&self) -> &'static str {
        match self.form {
            TrivergenceForm::Product => "bits^3",
            TrivergenceForm::Compound => "bits",
        }
    }
}

/// Product-form trivergence: canonically orders the triple, then multiplies
/// `D(p||q)`, `D(q||r)`, and `D(p||r)` under the triplet-union denominator.
pub fn triv_product(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    base: DivergenceKind,
    mode: NormalizationMode,
) -> Result<TrivergenceResult> {
    let ([cp, cq, cr], canonicalization) = canonical_order(p, q, r);
    let ctx = SmoothingContext::triplet_union(mode, cp, cq, cr);
    let (value, factors) = product_value(base, cp, cq, cr, &ctx)?;
    Ok(TrivergenceResult {
        form: TrivergenceForm::Product,
        base,
        value,
        components: TrivergenceComponents::Product { factors },
        canonicalization,
        context: ctx,
        zero_branch: false,
    })
}

fn product_value(
    base: DivergenceKind,
    first: &CountDistribution,
    second: &CountDistribution,
    third: &CountDistribution,
    ctx: &SmoothingContext,
) -> Result<(f64, Box<[DivergenceReport; 3]>)> {
    let d_12 = pairwise(base, first, second, ctx)?;
    let d_23 = pairwise(base, second, third, ctx)?;
    let d_13 = pairwise(base, first, third, ctx)?;
    let value = d_12.value * d_23.value * d_13.value;
    Ok((value, Box::new([d_12, d_23, d_13])))
}

/// Compound KL trivergence: the scalar `D_KL(q||r) / |q|` replaces the
/// second side's probability on `p ∩ q`, items outside `q` take the `1/|T|`
/// smoothing, and a scalar that is zero within rounding (or negative)
/// forces the smoothing substitution everywhere (the zero branch).
pub fn triv_compound_kl(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    mode: NormalizationMode,
) -> Result<TrivergenceResult> {
    let ([cp, cq, cr], canonicalization) = canonical_order(p, q, r);
    let ctx = SmoothingContext::triplet_union(mode, cp, cq, cr);
    compound_eval(
        DivergenceKind::Kl,
        cp,
        cq,
        cr,
        &ctx,
        canonicalization,
        JsCompoundNormalizer::default(),
    )
}

/// Compound JS trivergence with the default `|q ∪ r|` normalizer.
pub fn triv_compound_js(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    mode: NormalizationMode,
) -> Result<TrivergenceResult> {
    triv_compound_js_with(p, q, r, mode, JsCompoundNormalizer::default())
}

/// Compound JS trivergence with an explicit choice of inner normalizer.
pub fn triv_compound_js_with(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    mode: NormalizationMode,
    normalizer: JsCompoundNormalizer,
) -> Result<TrivergenceResult> {
    let ([cp, cq, cr], canonicalization) = canonical_order(p, q, r);
    let ctx = SmoothingContext::triplet_union(mode, cp, cq, cr);
    compound_eval(
        DivergenceKind::Js,
        cp,
        cq,
        cr,
        &ctx,
        canonicalization,
        normalizer,
    )
}

/// Shared compound evaluation over fixed roles: `outer` against the scalar
/// derived from `D(inner_first || inner_second)`.
fn compound_eval(
    base: DivergenceKind,
    outer: &CountDistribution,
    inner_first: &CountDistribution,
    inner_second: &CountDistribution,
    ctx: &SmoothingContext,
    canonicalization: Canonicalization,
    js_normalizer: JsCompoundNormalizer,
) -> Result<TrivergenceResult> {
    let inner = pairwise(base, inner_first, inner_second, ctx)?;
    let (normalizer, normalizer_kind) = match base {
        DivergenceKind::Kl => (
            inner_first.distinct_count() as u64,
            CompoundNormalizer::InnerFirstDistinct,
        ),
        DivergenceKind::Js => match js_normalizer {
            JsCompoundNormalizer::UnionCardinality => {
                let union: BTreeSet<&ItemId> = inner_first
                    .support()
                    .chain(inner_second.support())
                    .collect();
                (union.len() as u64, CompoundNormalizer::InnerUnion)
            }
            JsCompoundNormalizer::DistinctSum => (
                (inner_first.distinct_count() + inner_second.distinct_count()) as u64,
                CompoundNormalizer::InnerDistinctSum,
            ),
        },
    };
    let scalar = inner.value / normalizer as f64;
    let zero_branch = scalar_takes_zero_branch(scalar);

    let value = match base {
        DivergenceKind::Kl => compound_kl_sum(outer, inner_first, ctx, scalar, zero_branch),
        DivergenceKind::Js => {
            compound_js_sum(outer, inner_first, inner_second, ctx, scalar, zero_branch)
        }
    };

    Ok(TrivergenceResult {
        form: TrivergenceForm::Compound,
        base,
        value,
        components: TrivergenceComponents::Compound {
            inner,
            scalar,
            normalizer,
            normalizer_kind,
        },
        canonicalization,
        context: *ctx,
        zero_branch,
    })
}

/// `Σ_{x∈p∩q} p_x log2(p_x/s) + Σ_{x∈p\q} p_x log2(|T| p_x)`, with every
/// item smoothed under the zero branch.
fn compound_kl_sum(
    outer: &CountDistribution,
    inner_first: &CountDistribution,
    ctx: &SmoothingContext,
    scalar: f64,
    zero_branch: bool,
) -> f64 {
    let t = ctx.denominator as f64;
    let mut acc = CompensatedSum::default();
    for (x, count) in outer.entries() {
        let px = outer.normalize(count, ctx.mode);
        let term = if zero_branch || !inner_first.contains(x) {
            px * (t * px).log2()
        } else {
            px * (px / scalar).log2()
        };
        acc.add(term);
    }
    acc.total()
}

/// The three-case JS sum between the outer distribution and the constant
/// pseudo-distribution `s` over the inner union support.
fn compound_js_sum(
    outer: &CountDistribution,
    inner_first: &CountDistribution,
    inner_second: &CountDistribution,
    ctx: &SmoothingContext,
    scalar: f64,
    zero_branch: bool,
) -> f64 {
    let fallback = ctx.fallback();
    let s_eff = if zero_branch { fallback } else { scalar };
    let inner_union: BTreeSet<&ItemId> = inner_first
        .support()
        .chain(inner_second.support())
        .collect();
    let support: BTreeSet<&ItemId> = outer.support().chain(inner_union.iter().copied()).collect();

    let mut acc = CompensatedSum::default();
    for x in support {
        let term = match (outer.count(x), inner_union.contains(x)) {
            (Some(c), true) => js_item_term(outer.normalize(c, ctx.mode), s_eff),
            (Some(c), false) => js_item_term(outer.normalize(c, ctx.mode), fallback),
            (None, true) => js_item_term(fallback, s_eff),
            (None, false) => unreachable!("item outside evaluation support"),
        };
        acc.add(term);
    }
    0.5 * acc.total()
}

/// Input role of a distribution in a variant composition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    P,
    Q,
    R,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::P => "p",
            Role::Q => "q",
            Role::R => "r",
        }
    }
}

/// Argument structure of one enumerated composition.
#[derive(Debug, Clone, PartialEq)]
pub enum VariantRoles {
    /// Three ordered pairwise divergences multiplied together.
    Product { pairs: [(Role, Role); 3] },
    /// One distribution against the scalar from an inner pair. When
    /// `scalar_first` the scalar occupies the first divergence argument,
    /// which has no defined evaluation rule.
    Compound {
        outer: Role,
        inner: (Role, Role),
        scalar_first: bool,
    },
}

/// One composition from the enumerated variant lists.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantDescriptor {
    pub form: TrivergenceForm,
    /// Position in the enumeration order.
    pub index: usize,
    /// Display notation, e.g. `D[p || D(q||r)]`.
    pub notation: String,
    pub roles: VariantRoles,
    pub evaluable: bool,
}

/// Enumerates the listed compositions: 2 for the product form, 12 for the
/// compound form of which exactly the 6 scalar-second ones are evaluable.
pub fn enumerate_variants(form: TrivergenceForm) -> Vec<VariantDescriptor> {
    use Role::{P, Q, R};
    match form {
        TrivergenceForm::Product => {
            let orderings: [[(Role, Role); 3]; 2] =
                [[(P, Q), (Q, R), (P, R)], [(Q, P), (R, Q), (R, P)]];
            orderings
                .into_iter()
                .enumerate()
                .map(|(index, pairs)| VariantDescriptor {
                    form,
                    index,
                    notation: pairs
                        .iter()
                        .map(|(a, b)| format!("D({}||{})", a.as_str(), b.as_str()))
                        .collect::<Vec<_>>()
                        .join(" * "),
                    roles: VariantRoles::Product { pairs },
                    evaluable: true,
                })
                .collect()
        }
        TrivergenceForm::Compound => {
            let scalar_second: [(Role, (Role, Role)); 6] = [
                (P, (Q, R)),
                (P, (R, Q)),
                (Q, (P, R)),
                (Q, (R, P)),
                (R, (P, Q)),
                (R, (Q, P)),
            ];
            let scalar_first: [(Role, (Role, Role)); 6] = [
                (P, (Q, R)),
                (P, (R, Q)),
                (Q, (P, R)),
                (Q, (R, P)),
                (R, (P, Q)),
                (R, (Q, P)),
            ];
            let mut variants = Vec::with_capacity(12);
            for (outer, inner) in scalar_second {
                variants.push(VariantDescriptor {
                    form,
                    index: variants.len(),
                    notation: format!(
                        "D[{} || D({}||{})]",
                        outer.as_str(),
                        inner.0.as_str(),
                        inner.1.as_str()
                    ),
                    roles: VariantRoles::Compound {
                        outer,
                        inner,
                        scalar_first: false,
                    },
                    evaluable: true,
                });
            }
            for (outer, inner) in scalar_first {
                variants.push(VariantDescriptor {
                    form,
                    index: variants.len(),
                    notation: format!(
                        "D[D({}||{}) || {}]",
                        inner.0.as_str(),
                        inner.1.as_str(),
                        outer.as_str()
                    ),
                    roles: VariantRoles::Compound {
                        outer,
                        inner,
                        scalar_first: true,
                    },
                    evaluable: false,
                });
            }
            variants
        }
    }
}

/// Evaluates a named composition with the roles exactly as listed (no
/// canonical reordering). Scalar-first compositions are rejected.
pub fn evaluate_variant(
    variant: &VariantDescriptor,
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    base: DivergenceKind,
    mode: NormalizationMode,
) -> Result<TrivergenceResult> {
    if !variant.evaluable {
        return Err(Error::NotEvaluable {
            notation: variant.notation.clone(),
        });
    }
    let pick = |role: Role| match role {
        Role::P => p,
        Role::Q => q,
        Role::R => r,
    };
    let ctx = SmoothingContext::triplet_union(mode, p, q, r);
    match &variant.roles {
        VariantRoles::Product { pairs } => {
            let [(a1, b1), (a2, b2), (a3, b3)] = *pairs;
            let d_1 = pairwise(base, pick(a1), pick(b1), &ctx)?;
            let d_2 = pairwise(base, pick(a2), pick(b2), &ctx)?;
            let d_3 = pairwise(base, pick(a3), pick(b3), &ctx)?;
            let value = d_1.value * d_2.value * d_3.value;
            Ok(TrivergenceResult {
                form: TrivergenceForm::Product,
                base,
                value,
                components: TrivergenceComponents::Product {
                    factors: Box::new([d_1, d_2, d_3]),
                },
                canonicalization: Canonicalization::identity(),
                context: ctx,
                zero_branch: false,
            })
        }
        VariantRoles::Compound { outer, inner, .. } => compound_eval(
            base,
            pick(*outer),
            pick(inner.0),
            pick(inner.1),
            &ctx,
            Canonicalization::identity(),
            JsCompoundNormalizer::default(),
        ),
    }
}
