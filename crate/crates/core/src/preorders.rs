//! Vector preorders on parameter vectors.
//!
//! All five relations compare ascending rearrangements prefix by prefix:
//!
//! | kind                 | `a ⪰ b` iff, for every prefix length `i`            |
//! |----------------------|-----------------------------------------------------|
//! | `Majorize`           | `Σ a₍ⱼ₎ ≤ Σ b₍ⱼ₎` (i < n) and equal totals           |
//! | `WeakSuper`          | `Σ a₍ⱼ₎ ≤ Σ b₍ⱼ₎`                                    |
//! | `WeakSub`            | `Σ a₍ⱼ₎ ≥ Σ b₍ⱼ₎`                                    |
//! | `PLarger`            | `Π a₍ⱼ₎ ≤ Π b₍ⱼ₎` (positive vectors)                 |
//! | `ReciprocalMajorize` | `Σ 1/a₍ⱼ₎ ≥ Σ 1/b₍ⱼ₎` (positive vectors)             |
//!
//! `WeakSub` follows the ascending-order statement literally, which is not
//! the textbook (descending-order) weak sub-majorization.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

/// Absolute slack applied to every prefix inequality.
pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreorderKind {
    Majorize,
    WeakSuper,
    WeakSub,
    PLarger,
    ReciprocalMajorize,
}

impl PreorderKind {
    pub const ALL: [PreorderKind; 5] = [
        PreorderKind::Majorize,
        PreorderKind::WeakSuper,
        PreorderKind::WeakSub,
        PreorderKind::PLarger,
        PreorderKind::ReciprocalMajorize,
    ];

    /// Whether the relation is only defined on the positive orthant.
    pub fn needs_positive(self) -> bool {
        matches!(self, PreorderKind::PLarger | PreorderKind::ReciprocalMajorize)
    }
}

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

fn validate(kind: PreorderKind, a: &[f64], b: &[f64], tol: f64) -> Result<()> {
    if a.is_empty() {
        return Err(Error::Empty("parameter vector"));
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Error::param(format!("tolerance must be finite and ≥ 0, got {tol}")));
    }
    if kind.needs_positive() {
        ensure_positive(a)?;
        ensure_positive(b)?;
    } else {
        ensure_finite(a)?;
        ensure_finite(b)?;
    }
    Ok(())
}

/// Prefix inequalities on already-sorted inputs.
fn holds_sorted(kind: PreorderKind, a: &[f64], b: &[f64], tol: f64) -> bool {
    let n = a.len();
    match kind {
        PreorderKind::Majorize => {
            let (mut sa, mut sb) = (0.0, 0.0);
            for i in 0..n {
                sa += a[i];
                sb += b[i];
                if i + 1 < n && sa > sb + tol {
                    return false;
                }
            }
            (sa - sb).abs() <= tol
        }
        PreorderKind::WeakSuper => {
            let (mut sa, mut sb) = (0.0, 0.0);
            a.iter().zip(b).all(|(x, y)| {
                sa += x;
                sb += y;
                sa <= sb + tol
            })
        }
        PreorderKind::WeakSub => {
            let (mut sa, mut sb) = (0.0, 0.0);
            a.iter().zip(b).all(|(x, y)| {
                sa += x;
                sb += y;
                sa >= sb - tol
            })
        }
        PreorderKind::PLarger => {
            let (mut pa, mut pb) = (1.0, 1.0);
            a.iter().zip(b).all(|(x, y)| {
                pa *= x;
                pb *= y;
                pa <= pb + tol
            })
        }
        PreorderKind::ReciprocalMajorize => {
            let (mut ra, mut rb) = (0.0, 0.0);
            a.iter().zip(b).all(|(x, y)| {
                ra += 1.0 / x;
                rb += 1.0 / y;
                ra >= rb - tol
            })
        }
    }
}

/// Whether `a ⪰ b` under `kind`, each prefix inequality relaxed by `tol`.
///
/// The relations are invariant under permutations of either argument; the
/// ascending rearrangement is taken internally.
pub fn holds(kind: PreorderKind, a: &[f64], b: &[f64], tol: f64) -> Result<bool> {
    validate(kind, a, b, tol)?;
    Ok(holds_sorted(kind, &sorted(a), &sorted(b), tol))
}

/// Outcome of each relation in one direction. Relations restricted to the
/// positive orthant are `None` when either vector has a nonpositive entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relations {
    pub majorize: bool,
    pub weak_super: bool,
    pub weak_sub: bool,
    pub p_larger: Option<bool>,
    pub reciprocal_majorize: Option<bool>,
}

impl Relations {
    pub fn get(&self, kind: PreorderKind) -> Option<bool> {
        match kind {
            PreorderKind::Majorize => Some(self.majorize),
            PreorderKind::WeakSuper => Some(self.weak_super),
            PreorderKind::WeakSub => Some(self.weak_sub),
            PreorderKind::PLarger => self.p_larger,
            PreorderKind::ReciprocalMajorize => self.reciprocal_majorize,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderReport {
    pub a_sorted: Vec<f64>,
    pub b_sorted: Vec<f64>,
    /// Relations with `a` on the left: `a ⪰ b`.
    pub a_over_b: Relations,
    /// Relations with `b` on the left: `b ⪰ a`.
    pub b_over_a: Relations,
    /// Set when p-larger / reciprocal majorization were skipped for a
    /// nonpositive entry.
    pub positive_relations_skipped: bool,
    pub tol: f64,
}

fn relations(a: &[f64], b: &[f64], tol: f64, positive: bool) -> Relations {
    let positive_only = |kind| positive.then(|| holds_sorted(kind, a, b, tol));
    Relations {
        majorize: holds_sorted(PreorderKind::Majorize, a, b, tol),
        weak_super: holds_sorted(PreorderKind::WeakSuper, a, b, tol),
        weak_sub: holds_sorted(PreorderKind::WeakSub, a, b, tol),
        p_larger: positive_only(PreorderKind::PLarger),
        reciprocal_majorize: positive_only(PreorderKind::ReciprocalMajorize),
    }
}

/// Evaluates all five relations in both directions.
pub fn classify(a: &[f64], b: &[f64], tol: f64) -> Result<OrderReport> {
    validate(PreorderKind::Majorize, a, b, tol)?;
    let a_sorted = sorted(a);
    let b_sorted = sorted(b);
    let positive = a_sorted[0] > 0.0 && b_sorted[0] > 0.0;
    Ok(OrderReport {
        a_over_b: relations(&a_sorted, &b_sorted, tol, positive),
        b_over_a: relations(&b_sorted, &a_sorted, tol, positive),
        positive_relations_skipped: !positive,
        a_sorted,
        b_sorted,
        tol,
    })
}
