//! Independent reference implementations of every measure in the crate.
//!
//! These are deliberately naive: direct summation of the defining formulas
//! over explicit supports, in 192-bit floating point, with no region
//! decomposition and no compensated summation. They share smoothing policy
//! (denominator choice, canonical ordering, zero-branch rule) with the main
//! kernels by construction, so a disagreement isolates a kernel bug rather
//! than a policy difference. Performance is a non-goal.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode};

use crate::distribution::{
    canonical_order, CountDistribution, ItemId, NormalizationMode, SmoothingContext,
};
use crate::divergence::DivergenceKind;
use crate::trivergence::TrivergenceForm;

/// Working precision in bits; about 57 decimal digits.
const PRECISION: usize = 192;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// A 192-bit real produced by the oracle.
#[derive(Debug, Clone)]
pub struct BigReal(BigFloat);

impl BigReal {
    fn from_u64(v: u64) -> Self {
        BigReal(BigFloat::from_u64(v, PRECISION))
    }

    fn zero() -> Self {
        BigReal(BigFloat::from_u64(0, PRECISION))
    }

    fn ratio(num: u64, den: u64) -> Self {
        BigReal(BigFloat::from_u64(num, PRECISION).div(
            &BigFloat::from_u64(den, PRECISION),
            PRECISION,
            RM,
        ))
    }

    fn recip(&self) -> Self {
        BigReal(BigFloat::from_u64(1, PRECISION).div(&self.0, PRECISION, RM))
    }

    fn add(&self, rhs: &Self) -> Self {
        BigReal(self.0.add(&rhs.0, PRECISION, RM))
    }

    fn mul(&self, rhs: &Self) -> Self {
        BigReal(self.0.mul(&rhs.0, PRECISION, RM))
    }

    fn div(&self, rhs: &Self) -> Self {
        BigReal(self.0.div(&rhs.0, PRECISION, RM))
    }

    fn log2(&self) -> Self {
        CONSTS.with(|cc| BigReal(self.0.log2(PRECISION, RM, &mut cc.borrow_mut())))
    }

    fn half(&self) -> Self {
        BigReal(self.0.div(&BigFloat::from_u64(2, PRECISION), PRECISION, RM))
    }

    /// Nearest double.
    pub fn to_f64(&self) -> f64 {
        format!("{}", self.0).parse().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An oracle result: the value plus the ordered terms that produced it.
///
/// For the summation oracles ([`kl_direct`], [`js_direct`], and the compound
/// forms of [`trivergence_direct`]) `value` is the plain sum of the trace.
/// For the product form the trace holds the three pairwise factors and
/// `value` is their product.
#[derive(Debug, Clone)]
pub struct OracleValue {
    pub value: BigReal,
    pub term_trace: Vec<(String, BigReal)>,
}

impl OracleValue {
    fn from_terms(terms: Vec<(String, BigReal)>) -> Self {
        let mut value = BigReal::zero();
        for (_, t) in &terms {
            value = value.add(t);
        }
        OracleValue {
            value,
            term_trace: terms,
        }
    }

    /// Plain left-to-right sum of the trace at working precision.
    pub fn trace_sum(&self) -> BigReal {
        let mut acc = BigReal::zero();
        for (_, t) in &self.term_trace {
            acc = acc.add(t);
        }
        acc
    }
}

/// The per-item value a side contributes at `w`: its probability when seen,
/// the `1/|T|` fallback otherwise.
fn raw_value(d: &CountDistribution, w: &ItemId, ctx: &SmoothingContext) -> BigReal {
    match d.count(w) {
        Some(c) => match ctx.mode {
            NormalizationMode::PaperLiteral => BigReal::ratio(c, d.distinct_count() as u64),
            NormalizationMode::TokenNormalized | NormalizationMode::Strict => {
                BigReal::ratio(c, d.token_total())
            }
        },
        None => BigReal::ratio(1, ctx.denominator),
    }
}

fn union_support(p: &CountDistribution, q: &CountDistribution) -> BTreeSet<ItemId> {
    p.support().chain(q.support()).cloned().collect()
}

/// Per-item values of one side over `support`, renormalized to unit mass in
/// strict mode.
fn side_values(
    d: &CountDistribution,
    support: &BTreeSet<ItemId>,
    ctx: &SmoothingContext,
) -> Vec<BigReal> {
    let mut values: Vec<BigReal> = support.iter().map(|w| raw_value(d, w, ctx)).collect();
    if ctx.mode == NormalizationMode::Strict {
        let mut mass = BigReal::zero();
        for v in &values {
            mass = mass.add(v);
        }
        for v in &mut values {
            *v = v.div(&mass);
        }
    }
    values
}

/// Literal relative-entropy sum `Σ p_w log2(p_w / q_w)` with smoothing
/// inline. In strict mode the sum runs over the union support, where the
/// renormalized smoothing mass makes both sides genuine distributions.
pub fn kl_direct(
    p: &CountDistribution,
    q: &CountDistribution,
    ctx: &SmoothingContext,
) -> OracleValue {
    let union = union_support(p, q);
    let strict = ctx.mode == NormalizationMode::Strict;
    let p_vals = side_values(p, &union, ctx);
    let q_vals = side_values(q, &union, ctx);

    let mut terms = Vec::new();
    for ((w, pw), qw) in union.iter().zip(&p_vals).zip(&q_vals) {
        if !strict && !p.contains(w) {
            continue;
        }
        let term = pw.mul(&pw.div(qw).log2());
        terms.push((w.as_str().to_string(), term));
    }
    OracleValue::from_terms(terms)
}

fn js_item_term(x: &BigReal, y: &BigReal) -> BigReal {
    let two = BigReal::from_u64(2);
    let mid = x.add(y);
    let tx = x.mul(&two.mul(x).div(&mid).log2());
    let ty = y.mul(&two.mul(y).div(&mid).log2());
    tx.add(&ty)
}

/// Literal symmetric-divergence sum over the union alphabet, with smoothing
/// supplying the side absent at each item. Trace terms carry the ½ factor so
/// the value is their plain sum.
pub fn js_direct(
    p: &CountDistribution,
    q: &CountDistribution,
    ctx: &SmoothingContext,
) -> OracleValue {
    let union = union_support(p, q);
    let p_vals = side_values(p, &union, ctx);
    let q_vals = side_values(q, &union, ctx);

    let mut terms = Vec::new();
    for ((w, pw), qw) in union.iter().zip(&p_vals).zip(&q_vals) {
        terms.push((w.as_str().to_string(), js_item_term(pw, qw).half()));
    }
    OracleValue::from_terms(terms)
}

fn pairwise_direct(
    base: DivergenceKind,
    p: &CountDistribution,
    q: &CountDistribution,
    ctx: &SmoothingContext,
) -> OracleValue {
    match base {
        DivergenceKind::Kl => kl_direct(p, q, ctx),
        DivergenceKind::Js => js_direct(p, q, ctx),
    }
}

/// Mode probability of an in-support item; strict uses the token-normalized
/// base value (the compound outer sum has no second distribution to
/// renormalize against).
fn mode_probability(d: &CountDistribution, w: &ItemId, mode: NormalizationMode) -> BigReal {
    let c = d.count(w).expect("item in support");
    match mode {
        NormalizationMode::PaperLiteral => BigReal::ratio(c, d.distinct_count() as u64),
        NormalizationMode::TokenNormalized | NormalizationMode::Strict => {
            BigReal::ratio(c, d.token_total())
        }
    }
}

fn compound_kl_direct(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    ctx: &SmoothingContext,
) -> OracleValue {
    let inner = kl_direct(q, r, ctx);
    let scalar = inner
        .value
        .div(&BigReal::from_u64(q.distinct_count() as u64));
    let zero_branch = crate::trivergence::scalar_takes_zero_branch(scalar.to_f64());
    let t = BigReal::from_u64(ctx.denominator);

    let mut terms = Vec::new();
    for w in p.support() {
        let px = mode_probability(p, w, ctx.mode);
        let term = if zero_branch || !q.contains(w) {
            px.mul(&t.mul(&px).log2())
        } else {
            px.mul(&px.div(&scalar).log2())
        };
        terms.push((w.as_str().to_string(), term));
    }
    OracleValue::from_terms(terms)
}

fn compound_js_direct(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    ctx: &SmoothingContext,
) -> OracleValue {
    let inner = js_direct(q, r, ctx);
    let qr: BTreeSet<ItemId> = union_support(q, r);
    let scalar = inner.value.div(&BigReal::from_u64(qr.len() as u64));
    let fallback = BigReal::from_u64(ctx.denominator).recip();
    let zero_branch = crate::trivergence::scalar_takes_zero_branch(scalar.to_f64());
    let s_eff = if zero_branch {
        fallback.clone()
    } else {
        scalar
    };

    let support: BTreeSet<ItemId> = p.support().cloned().chain(qr.iter().cloned()).collect();
    let mut terms = Vec::new();
    for w in &support {
        let term = match (p.contains(w), qr.contains(w)) {
            (true, true) => js_item_term(&mode_probability(p, w, ctx.mode), &s_eff),
            (true, false) => js_item_term(&mode_probability(p, w, ctx.mode), &fallback),
            (false, true) => js_item_term(&fallback, &s_eff),
            (false, false) => unreachable!("item outside evaluation support"),
        };
        terms.push((w.as_str().to_string(), term.half()));
    }
    OracleValue::from_terms(terms)
}

/// Direct evaluation of either trivergence form by composing the pairwise
/// oracles. Shares canonical ordering, the triplet-union denominator, and
/// the zero-branch rule with the kernels. For [`TrivergenceForm::Product`]
/// the trace holds the three factors and the value is their product.
pub fn trivergence_direct(
    form: TrivergenceForm,
    base: DivergenceKind,
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
    mode: NormalizationMode,
) -> OracleValue {
    let ([cp, cq, cr], _) = canonical_order(p, q, r);
    let ctx = SmoothingContext::triplet_union(mode, cp, cq, cr);
    match form {
        TrivergenceForm::Product => {
            let d_pq = pairwise_direct(base, cp, cq, &ctx);
            let d_qr = pairwise_direct(base, cq, cr, &ctx);
            let d_pr = pairwise_direct(base, cp, cr, &ctx);
            let value = d_pq.value.mul(&d_qr.value).mul(&d_pr.value);
            OracleValue {
                value,
                term_trace: vec![
                    ("D(p||q)".to_string(), d_pq.value),
                    ("D(q||r)".to_string(), d_qr.value),
                    ("D(p||r)".to_string(), d_pr.value),
                ],
            }
        }
        TrivergenceForm::Compound => match base {
            DivergenceKind::Kl => compound_kl_direct(cp, cq, cr, &ctx),
            DivergenceKind::Js => compound_js_direct(cp, cq, cr, &ctx),
        },
    }
}
