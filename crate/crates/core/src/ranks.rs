//! Rank transforms, empirical distribution functions, and empirical
//! quantiles.
//!
//! The rank transform maps a bivariate sample to pseudo-observations
//! (u_k, v_k) = (rank(x_k)/n, rank(y_k)/n) in the unit square. For
//! tie-free data the sorted u values are exactly the grid {1/n, ..., 1},
//! and the whole transform is invariant under strictly increasing
//! transformations of either axis.

use crate::error::{Error, Result};
use crate::ingest::BivariateSample;
use crate::models::rng::SplitMix64;

/// How tied values are ranked. Continuous data has no ties almost surely;
/// real files do, so the policy is explicit in every report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TiePolicy {
    /// Mid-ranks: every member of a tied group gets the group's average rank.
    Average,
    /// Every member gets the smallest rank of its group.
    Min,
    /// Ties broken uniformly at random with the given seed; output is tie-free.
    Random(u64),
    /// Refuse to rank tied data.
    Error,
}

impl TiePolicy {
    pub fn label(&self) -> String {
        match self {
            TiePolicy::Average => "average".to_string(),
            TiePolicy::Min => "min".to_string(),
            TiePolicy::Random(seed) => format!("random({seed})"),
            TiePolicy::Error => "error".to_string(),
        }
    }
}

/// Tie counts for one axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AxisTies {
    /// Number of groups of equal values with group size >= 2.
    pub groups: usize,
    /// Total number of values that belong to some tied group.
    pub tied_values: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TieReport {
    pub x: AxisTies,
    pub y: AxisTies,
}

impl TieReport {
    /// Largest fraction of tied values on either axis.
    pub fn tie_fraction(&self, n: usize) -> f64 {
        let worst = self.x.tied_values.max(self.y.tied_values);
        worst as f64 / n as f64
    }

    pub fn any(&self) -> bool {
        self.x.groups + self.y.groups > 0
    }
}

/// Rank-scaled pairs in the unit square: the rank-plot data.
#[derive(Debug, Clone)]
pub struct PseudoObservations {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub n: usize,
    pub tie_report: TieReport,
    pub policy: TiePolicy,
}

impl PseudoObservations {
    /// Fraction of values involved in ties, worst axis.
    pub fn tie_fraction(&self) -> f64 {
        self.tie_report.tie_fraction(self.n)
    }
}

/// Ranks for one axis under the given policy, scaled by 1/n.
fn rank_axis(
    values: &[f64],
    policy: TiePolicy,
    axis: &'static str,
    rng: Option<&mut SplitMix64>,
) -> Result<(Vec<f64>, AxisTies)> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));

    let mut ranks = vec![0.0; n];
    let mut ties = AxisTies::default();
    let mut local_rng = rng;

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            ties.groups += 1;
            ties.tied_values += size;
            match policy {
                TiePolicy::Average => {
                    // ranks start+1 ..= end, averaged
                    let avg = (start + 1 + end) as f64 / 2.0;
                    for &idx in &order[start..end] {
                        ranks[idx] = avg;
                    }
                }
                TiePolicy::Min => {
                    for &idx in &order[start..end] {
                        ranks[idx] = (start + 1) as f64;
                    }
                }
                TiePolicy::Random(_) => {
                    let rng = local_rng
                        .as_deref_mut()
                        .expect("random tie policy carries an rng");
                    let mut slots: Vec<usize> = (start + 1..=end).collect();
                    rng.shuffle(&mut slots);
                    for (&idx, &slot) in order[start..end].iter().zip(slots.iter()) {
                        ranks[idx] = slot as f64;
                    }
                }
                TiePolicy::Error => {
                    // counted below; error raised after the scan so the
                    // report can say how many groups there were
                }
            }
        } else {
            ranks[order[start]] = (start + 1) as f64;
        }
        start = end;
    }

    if ties.groups > 0 && policy == TiePolicy::Error {
        return Err(Error::TiesPresent {
            axis,
            groups: ties.groups,
        });
    }
    if ties.groups > 0 && matches!(policy, TiePolicy::Average | TiePolicy::Min) {
        // ranks already assigned in the scan above
    }

    let scaled = ranks.iter().map(|r| r / n as f64).collect();
    Ok((scaled, ties))
}

/// Rank-transform both axes independently and scale into (0, 1].
pub fn rank_transform(s: &BivariateSample, policy: TiePolicy) -> Result<PseudoObservations> {
    rank_pairs(&s.x, &s.y, policy)
}

/// Rank transform on raw coordinate slices. Used for whole samples and for
/// re-ranking subsets during gluing-point scans.
pub fn rank_pairs(x: &[f64], y: &[f64], policy: TiePolicy) -> Result<PseudoObservations> {
    assert_eq!(x.len(), y.len());
    let n = x.len();
    if n < 2 {
        return Err(Error::TooFewRows { min: 2, got: n });
    }
    let mut rng = match policy {
        TiePolicy::Random(seed) => Some(SplitMix64::new(seed)),
        _ => None,
    };
    let (u, tx) = rank_axis(x, policy, "x", rng.as_mut())?;
    let (v, ty) = rank_axis(y, policy, "y", rng.as_mut())?;
    Ok(PseudoObservations {
        u,
        v,
        n,
        tie_report: TieReport { x: tx, y: ty },
        policy,
    })
}

/// Empirical distribution function: (1/n) * #{k : values_k <= q}.
pub fn ecdf(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty());
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let count = sorted.partition_point(|&v| v <= q);
    count as f64 / values.len() as f64
}

/// Left-continuous empirical quantile: the smallest order statistic x_(k)
/// with k/n >= p. Defined for p in (0, 1].
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::TooFewRows { min: 1, got: 0 });
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::ArgumentOutOfRange {
            what: "quantile level p",
            value: p,
        });
    }
    let n = values.len();
    let mut k = (p * n as f64).ceil() as usize;
    k = k.clamp(1, n);
    // Float fuzz guard: enforce the definition k/n >= p exactly as the
    // caller would check it.
    while k > 1 && (k - 1) as f64 / n as f64 >= p {
        k -= 1;
    }
    while (k as f64) / n as f64 < p && k < n {
        k += 1;
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[k - 1])
}
