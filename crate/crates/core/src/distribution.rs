//! Count distributions, probability normalization, smoothing, and the
//! set-region decompositions used by the divergence kernels.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An interned text token. Two ids are equal iff their texts are byte-equal;
/// ordering is byte-wise, which fixes the deterministic iteration order used
/// throughout the crate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(Arc<str>);

impl ItemId {
    /// Interns `text` as an item. Panics on empty text, which the
    /// construction paths ([`CountDistribution::from_counts`], the ingest
    /// parsers) reject before reaching here.
    pub fn new(text: impl AsRef<str>) -> Self {
        let text = text.as_ref();
        assert!(!text.is_empty(), "item text must be non-empty");
        ItemId(Arc::from(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ItemId {
    fn from(s: &str) -> Self {
        ItemId::new(s)
    }
}

/// How counts are turned into probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormalizationMode {
    /// count / number of distinct items. Values may exceed 1 and need not
    /// sum to 1. The default.
    PaperLiteral,
    /// count / token total. In-support values sum to 1 before smoothing.
    TokenNormalized,
    /// Token-normalized values and smoothing mass jointly renormalized over
    /// the evaluation support, at divergence-evaluation level.
    Strict,
}

impl NormalizationMode {
    pub const ALL: [NormalizationMode; 3] = [
        NormalizationMode::PaperLiteral,
        NormalizationMode::TokenNormalized,
        NormalizationMode::Strict,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NormalizationMode::PaperLiteral => "paper-literal",
            NormalizationMode::TokenNormalized => "token",
            NormalizationMode::Strict => "strict",
        }
    }
}

/// A labeled association from item to positive occurrence count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountDistribution {
    label: String,
    counts: BTreeMap<ItemId, u64>,
    token_total: u64,
}

impl CountDistribution {
    /// Builds a distribution from `(item text, count)` entries. Duplicate
    /// item texts accumulate. Rejects empty entry lists, empty item texts,
    /// and counts that are zero or negative.
    pub fn from_counts<I, S>(label: impl Into<String>, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, i64)>,
        S: AsRef<str>,
    {
        let mut counts: BTreeMap<ItemId, u64> = BTreeMap::new();
        for (text, count) in entries {
            let text = text.as_ref();
            if text.is_empty() {
                return Err(Error::EmptyItem);
            }
            if count <= 0 {
                return Err(Error::InvalidCount {
                    item: text.to_string(),
                    line: None,
                });
            }
            *counts.entry(ItemId::new(text)).or_insert(0) += count as u64;
        }
        Self::from_count_map(label, counts)
    }

    pub(crate) fn from_count_map(
        label: impl Into<String>,
        counts: BTreeMap<ItemId, u64>,
    ) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        debug_assert!(counts.values().all(|&c| c >= 1));
        let token_total = counts.values().sum();
        Ok(CountDistribution {
            label: label.into(),
            counts,
            token_total,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of distinct items.
    pub fn distinct_count(&self) -> usize {
        self.counts.len()
    }

    /// Sum of all counts.
    pub fn token_total(&self) -> u64 {
        self.token_total
    }

    pub fn contains(&self, w: &ItemId) -> bool {
        self.counts.contains_key(w)
    }

    pub fn count(&self, w: &ItemId) -> Option<u64> {
        self.counts.get(w).copied()
    }

    /// Items in byte order.
    pub fn support(&self) -> impl Iterator<Item = &ItemId> {
        self.counts.keys()
    }

    /// `(item, count)` pairs in byte order.
    pub fn entries(&self) -> impl Iterator<Item = (&ItemId, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }

    /// Probability of `w` under `mode`. For [`NormalizationMode::Strict`]
    /// this is the token-normalized value before joint renormalization,
    /// which is applied at divergence-evaluation level.
    pub fn probability(&self, w: &ItemId, mode: NormalizationMode) -> Result<f64> {
        let count = self.count(w).ok_or_else(|| Error::NotInSupport {
            item: w.as_str().to_string(),
            label: self.label.clone(),
        })?;
        Ok(self.normalize(count, mode))
    }

    pub(crate) fn normalize(&self, count: u64, mode: NormalizationMode) -> f64 {
        match mode {
            NormalizationMode::PaperLiteral => count as f64 / self.distinct_count() as f64,
            NormalizationMode::TokenNormalized | NormalizationMode::Strict => {
                count as f64 / self.token_total as f64
            }
        }
    }

    /// Whether the two distributions have equal supports and proportional
    /// counts, i.e. identical normalized profiles. This is the equality
    /// notion under which strict-mode divergences vanish.
    pub fn same_profile(&self, other: &Self) -> bool {
        if self.counts.len() != other.counts.len() {
            return false;
        }
        self.entries()
            .zip(other.entries())
            .all(|((wa, ca), (wb, cb))| {
                wa == wb
                    && ca as u128 * other.token_total as u128
                        == cb as u128 * self.token_total as u128
            })
    }
}

/// How a smoothing denominator was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DenominatorPolicy {
    /// Sum of the two distinct-item cardinalities of a pair.
    PairSum,
    /// Cardinality of the union support of an enclosing triplet.
    TripletUnion,
    /// Caller-supplied value.
    Explicit,
}

impl DenominatorPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            DenominatorPolicy::PairSum => "pair-sum",
            DenominatorPolicy::TripletUnion => "triplet-union",
            DenominatorPolicy::Explicit => "explicit",
        }
    }
}

/// Normalization mode plus the `|T|` denominator of the `1/|T|` fallback for
/// unseen items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SmoothingContext {
    pub mode: NormalizationMode,
    pub denominator: u64,
    pub denominator_policy: DenominatorPolicy,
}

impl SmoothingContext {
    /// Pairwise context: denominator is `|p| + |q|` over distinct items.
    pub fn pair_sum(mode: NormalizationMode, p: &CountDistribution, q: &CountDistribution) -> Self {
        SmoothingContext {
            mode,
            denominator: (p.distinct_count() + q.distinct_count()) as u64,
            denominator_policy: DenominatorPolicy::PairSum,
        }
    }

    /// Triplet context: denominator is `|p ∪ q ∪ r|`.
    pub fn triplet_union(
        mode: NormalizationMode,
        p: &CountDistribution,
        q: &CountDistribution,
        r: &CountDistribution,
    ) -> Self {
        let union: BTreeSet<&ItemId> = p.support().chain(q.support()).chain(r.support()).collect();
        SmoothingContext {
            mode,
            denominator: union.len() as u64,
            denominator_policy: DenominatorPolicy::TripletUnion,
        }
    }

    /// Caller-chosen denominator; must be at least 1.
    pub fn explicit(mode: NormalizationMode, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::InvalidDenominator);
        }
        Ok(SmoothingContext {
            mode,
            denominator,
            denominator_policy: DenominatorPolicy::Explicit,
        })
    }

    /// The `1/|T|` fallback mass for unseen items.
    pub fn fallback(&self) -> f64 {
        1.0 / self.denominator as f64
    }
}

/// Probability of `w` in `d`, falling back to `1/|T|` when `w` is unseen.
/// Strictly positive for every item and every denominator ≥ 1.
pub fn smoothed_value(d: &CountDistribution, w: &ItemId, ctx: &SmoothingContext) -> f64 {
    match d.count(w) {
        Some(count) => d.normalize(count, ctx.mode),
        None => ctx.fallback(),
    }
}

/// Three-way split of the union support of a pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairRegions {
    pub only_first: BTreeSet<ItemId>,
    pub both: BTreeSet<ItemId>,
    pub only_second: BTreeSet<ItemId>,
}

impl PairRegions {
    /// Union of the two supports, in byte order.
    pub fn union(&self) -> impl Iterator<Item = &ItemId> {
        // The three sets are disjoint; a merge keeps global order.
        let mut items: Vec<&ItemId> = self
            .only_first
            .iter()
            .chain(self.both.iter())
            .chain(self.only_second.iter())
            .collect();
        items.sort_unstable();
        items.into_iter()
    }
}

/// Splits `support(p) ∪ support(q)` into `p\q`, `p∩q`, and `q\p`.
pub fn pair_regions(p: &CountDistribution, q: &CountDistribution) -> PairRegions {
    let mut regions = PairRegions {
        only_first: BTreeSet::new(),
        both: BTreeSet::new(),
        only_second: BTreeSet::new(),
    };
    for w in p.support() {
        if q.contains(w) {
            regions.both.insert(w.clone());
        } else {
            regions.only_first.insert(w.clone());
        }
    }
    for w in q.support() {
        if !p.contains(w) {
            regions.only_second.insert(w.clone());
        }
    }
    regions
}

/// The seven disjoint regions of `p ∪ q ∪ r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TripletRegion {
    POnly,
    PrNotQ,
    PqNotR,
    Pqr,
    QOnly,
    QrNotP,
    ROnly,
}

impl TripletRegion {
    pub const ALL: [TripletRegion; 7] = [
        TripletRegion::POnly,
        TripletRegion::PrNotQ,
        TripletRegion::PqNotR,
        TripletRegion::Pqr,
        TripletRegion::QOnly,
        TripletRegion::QrNotP,
        TripletRegion::ROnly,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TripletRegion::POnly => "p_only",
            TripletRegion::PrNotQ => "pr_not_q",
            TripletRegion::PqNotR => "pq_not_r",
            TripletRegion::Pqr => "pqr",
            TripletRegion::QOnly => "q_only",
            TripletRegion::QrNotP => "qr_not_p",
            TripletRegion::ROnly => "r_only",
        }
    }

    /// Which of `p_w`, `q_w`, `r_w` are zero (i.e. take the smoothing
    /// fallback) for items in this region.
    pub fn zero_pattern(self) -> ZeroPattern {
        match self {
            TripletRegion::POnly => ZeroPattern::new(false, true, true),
            TripletRegion::PrNotQ => ZeroPattern::new(false, true, false),
            TripletRegion::PqNotR => ZeroPattern::new(false, false, true),
            TripletRegion::Pqr => ZeroPattern::new(false, false, false),
            TripletRegion::QOnly => ZeroPattern::new(true, false, true),
            TripletRegion::QrNotP => ZeroPattern::new(true, false, false),
            TripletRegion::ROnly => ZeroPattern::new(true, true, false),
        }
    }
}

/// Zero-pattern of a triplet region: which of the three distributions miss
/// the region's items.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZeroPattern {
    pub p_zero: bool,
    pub q_zero: bool,
    pub r_zero: bool,
}

impl ZeroPattern {
    pub fn new(p_zero: bool, q_zero: bool, r_zero: bool) -> Self {
        ZeroPattern {
            p_zero,
            q_zero,
            r_zero,
        }
    }
}

/// The seven-region partition of `p ∪ q ∪ r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TripletRegions {
    pub p_only: BTreeSet<ItemId>,
    pub pr_not_q: BTreeSet<ItemId>,
    pub pq_not_r: BTreeSet<ItemId>,
    pub pqr: BTreeSet<ItemId>,
    pub q_only: BTreeSet<ItemId>,
    pub qr_not_p: BTreeSet<ItemId>,
    pub r_only: BTreeSet<ItemId>,
}

impl TripletRegions {
    pub fn region(&self, tag: TripletRegion) -> &BTreeSet<ItemId> {
        match tag {
            TripletRegion::POnly => &self.p_only,
            TripletRegion::PrNotQ => &self.pr_not_q,
            TripletRegion::PqNotR => &self.pq_not_r,
            TripletRegion::Pqr => &self.pqr,
            TripletRegion::QOnly => &self.q_only,
            TripletRegion::QrNotP => &self.qr_not_p,
            TripletRegion::ROnly => &self.r_only,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (TripletRegion, &BTreeSet<ItemId>)> {
        TripletRegion::ALL
            .iter()
            .map(move |&tag| (tag, self.region(tag)))
    }

    /// Total cardinality over all seven regions; equals `|p ∪ q ∪ r|`.
    pub fn union_len(&self) -> usize {
        self.iter().map(|(_, set)| set.len()).sum()
    }
}

/// Partitions `p ∪ q ∪ r` into the seven membership regions.
pub fn triplet_regions(
    p: &CountDistribution,
    q: &CountDistribution,
    r: &CountDistribution,
) -> TripletRegions {
    let mut regions = TripletRegions {
        p_only: BTreeSet::new(),
        pr_not_q: BTreeSet::new(),
        pq_not_r: BTreeSet::new(),
        pqr: BTreeSet::new(),
        q_only: BTreeSet::new(),
        qr_not_p: BTreeSet::new(),
        r_only: BTreeSet::new(),
    };
    let union: BTreeSet<&ItemId> = p.support().chain(q.support()).chain(r.support()).collect();
    for w in union {
        let set = match (p.contains(w), q.contains(w), r.contains(w)) {
            (true, false, false) => &mut regions.p_only,
            (true, false, true) => &mut regions.pr_not_q,
            (true, true, false) => &mut regions.pq_not_r,
            (true, true, true) => &mut regions.pqr,
            (false, true, false) => &mut regions.q_only,
            (false, true, true) => &mut regions.qr_not_p,
            (false, false, true) => &mut regions.r_only,
            (false, false, false) => unreachable!("item outside all three supports"),
        };
        set.insert(w.clone());
    }
    regions
}

/// Record of how a triple was reordered before trivergence evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Canonicalization {
    /// `source_indices[role]` is the 0-based input position of the
    /// distribution now serving role `p`, `q`, or `r`.
    pub source_indices: [usize; 3],
    /// Marks canonical positions whose distinct-count tied with a neighbor
    /// and were ordered by the tie-break rule instead.
    pub tie_flags: [bool; 3],
}

impl Canonicalization {
    pub fn identity() -> Self {
        Canonicalization {
            source_indices: [0, 1, 2],
            tie_flags: [false; 3],
        }
    }

    pub fn is_identity_permutation(&self) -> bool {
        self.source_indices == [0, 1, 2]
    }
}

/// Reorders a triple so distinct-count is non-increasing. Ties break by
/// token total descending, then label ascending; tied positions are flagged,
/// never rejected.
pub fn canonical_order<'a>(
    p: &'a CountDistribution,
    q: &'a CountDistribution,
    r: &'a CountDistribution,
) -> ([&'a CountDistribution; 3], Canonicalization) {
    let mut indexed: Vec<(usize, &CountDistribution)> = vec![(0, p), (1, q), (2, r)];
    indexed.sort_by(|(_, a), (_, b)| {
        b.distinct_count()
            .cmp(&a.distinct_count())
            .then(b.token_total().cmp(&a.token_total()))
            .then(a.label().cmp(b.label()))
    });

    let ordered = [indexed[0].1, indexed[1].1, indexed[2].1];
    let source_indices = [indexed[0].0, indexed[1].0, indexed[2].0];
    let mut tie_flags = [false; 3];
    for i in 0..2 {
        if ordered[i].distinct_count() == ordered[i + 1].distinct_count() {
            tie_flags[i] = true;
            tie_flags[i + 1] = true;
        }
    }
    (
        ordered,
        Canonicalization {
            source_indices,
            tie_flags,
        },
    )
}
