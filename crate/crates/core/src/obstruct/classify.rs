use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    InfiniteMultiplicityThm12,
    InfiniteMultiplicityThm13,
    Unknown,
    NoObstructionClaimed,
    InvalidInput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// Infinite multiplicity when `0 < k < n` and `l / k > 1 / (n − k)`.
    Thm12,
    /// Infinite multiplicity when `0 < k < n − 2`.
    Thm13,
}

/// The integers behind the verdict.
#[derive(Debug, Clone, Serialize)]
pub struct Evidence {
    /// `l · (n − k)`, the left side of the cross-multiplied ratio condition.
    pub ratio_lhs: Option<i64>,
    /// `k`, the right side of the cross-multiplied ratio condition.
    pub ratio_rhs: Option<i64>,
    pub condition_11: Option<bool>,
    /// `(n − k)(n − l − 1) − n(n − k − 1)`; negative iff the exponent condition holds.
    pub exponent_numerator: Option<i64>,
    pub exponent_condition: Option<bool>,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub n: i64,
    pub k: i64,
    pub l: i64,
    pub verdict: Verdict,
    pub applicable_theorems: Vec<Theorem>,
    /// Set in the `k = n − 2` gap, where weakening the ratio condition to
    /// `k ≤ n − 2` is conjectured.
    pub conjecture_gap: bool,
    pub evidence: Evidence,
    pub note: &'static str,
}

const NOTE: &str = "verdicts concern the group-level hypotheses only; whether a concrete map \
                    realizes finite multiplicity is not decided";

/// `l / k > 1 / (n − k)`, i.e. `l (n − k) > k`.
pub fn condition_11(n: i64, k: i64, l: i64) -> Result<bool> {
    if !(0 < k && k < n) {
        return Err(Error::InvalidArgument(format!("condition (1.1) needs 0 < k < n, got n={n}, k={k}")));
    }
    Ok(l * (n - k) > k)
}

fn exponent_numerator(n: i64, k: i64, l: i64) -> i64 {
    (n - k) * (n - l - 1) - n * (n - k - 1)
}

/// `n − k − n (n − k − 1)/(n − l − 1) < 0`, cleared of the positive
/// denominator `n − l − 1`.
pub fn exponent_condition(n: i64, k: i64, l: i64) -> Result<bool> {
    if !(0 < k && k <= n - 2) {
        return Err(Error::InvalidArgument(format!("exponent condition needs 0 < k <= n-2, got n={n}, k={k}")));
    }
    if !(0 <= l && l <= k && l < n - 1) {
        return Err(Error::InvalidArgument(format!("exponent condition needs 0 <= l <= k, got l={l}")));
    }
    Ok(exponent_numerator(n, k, l) < 0)
}

/// Whether `(n, k, l)` can be `(n, dim Γ, dim Γ_T)` at all.
pub fn is_admissible(n: i64, k: i64, l: i64) -> bool {
    0 <= l && l <= k && k <= n && !(k >= n - 1 && l < k)
}

pub fn classify(n: i64, k: i64, l: i64) -> ObstructionReport {
    let admissible = is_admissible(n, k, l);
    let cond = if admissible { condition_11(n, k, l).ok() } else { None };
    let expo = if admissible { exponent_condition(n, k, l).ok() } else { None };
    let ratio_defined = admissible && 0 < k && k < n;

    let mut applicable = Vec::new();
    if admissible && cond == Some(true) {
        applicable.push(Theorem::Thm12);
    }
    if admissible && 0 < k && k < n - 2 {
        applicable.push(Theorem::Thm13);
    }

    let (verdict, reason, gap) = if !admissible {
        let reason = if !(0 <= l && l <= k && k <= n) {
            "need 0 <= l <= k <= n".to_string()
        } else {
            format!("dim Γ = {k} >= n - 1 forces dim Γ_T = dim Γ")
        };
        (Verdict::InvalidInput, reason, false)
    } else if k == 0 || k == n - 1 || k == n {
        (Verdict::NoObstructionClaimed, format!("dim Γ = {k} lies in {{0, n-1, n}}"), false)
    } else if k < n - 2 {
        (Verdict::InfiniteMultiplicityThm13, format!("0 < dim Γ = {k} < n - 2 = {}", n - 2), false)
    } else if cond == Some(true) {
        (
            Verdict::InfiniteMultiplicityThm12,
            format!("dim Γ = n - 2 and l(n-k) = {} > k = {k}", l * (n - k)),
            false,
        )
    } else {
        (
            Verdict::Unknown,
            format!("dim Γ = n - 2 and dim Γ_T = {l} <= dim Γ / 2"),
            true,
        )
    };

    ObstructionReport {
        n,
        k,
        l,
        verdict,
        applicable_theorems: applicable,
        conjecture_gap: gap,
        evidence: Evidence {
            ratio_lhs: ratio_defined.then(|| l * (n - k)),
            ratio_rhs: ratio_defined.then_some(k),
            condition_11: cond,
            exponent_numerator: expo.map(|_| exponent_numerator(n, k, l)),
            exponent_condition: expo,
            reason,
        },
        note: NOTE,
    }
}
