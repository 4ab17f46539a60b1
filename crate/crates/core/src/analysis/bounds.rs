//! Per-phase envelope check against constant super- and sub-solutions.

use serde::Serialize;

use crate::pde::periodic::Snapshot;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundViolation<T> {
    pub domain: usize,
    pub t: T,
    pub node: usize,
    pub value: T,
    pub lower: T,
    pub upper: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport<T> {
    pub phases_checked: usize,
    /// Largest excursion outside the envelope (0 if none).
    pub max_excess: T,
    pub violations: Vec<BoundViolation<T>>,
}

/// For every phase interval, flags nodes leaving
/// `[inf P(phase start), sup P(phase start)]` by more than `slack`.
/// A phase interval starts at each snapshot whose domain or phase differs
/// from the previous one.
pub fn bounds_check<T: Scalar>(snapshots: &[Snapshot<T>], slack: T) -> BoundsReport<T> {
    let mut report = BoundsReport {
        phases_checked: 0,
        max_excess: T::zero(),
        violations: Vec::new(),
    };
    let mut domains: Vec<usize> = snapshots.iter().map(|s| s.domain).collect();
    domains.sort_unstable();
    domains.dedup();
    for dom in domains {
        let mut envelope: Option<(crate::model::Phase, T, T)> = None;
        for s in snapshots.iter().filter(|s| s.domain == dom) {
            let (lo, hi) = match envelope {
                Some((phase, lo, hi)) if phase == s.phase => (lo, hi),
                _ => {
                    let (lo, hi) = s
                        .p
                        .iter()
                        .fold((T::infinity(), T::neg_infinity()), |(a, b), &v| (a.min(v), b.max(v)));
                    envelope = Some((s.phase, lo, hi));
                    report.phases_checked += 1;
                    continue;
                }
            };
            for (node, &v) in s.p.iter().enumerate() {
                let excess = (v - hi).max(lo - v);
                if excess > T::zero() {
                    report.max_excess = report.max_excess.max(excess);
                }
                if excess > slack {
                    report.violations.push(BoundViolation {
                        domain: dom,
                        t: s.t,
                        node,
                        value: v,
                        lower: lo,
                        upper: hi,
                    });
                }
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Phase;

    fn snap(t: f64, phase: Phase, p: Vec<f64>) -> Snapshot<f64> {
        Snapshot { domain: 0, t, cycle: 0, phase, p }
    }

    #[test]
    fn constant_data_has_no_violations() {
        let s: Vec<_> = (0..5).map(|i| snap(i as f64, Phase::Diastole, vec![4.0; 6])).collect();
        let r = bounds_check(&s, 1e-6);
        assert!(r.violations.is_empty());
        assert_eq!(r.phases_checked, 1);
    }

    #[test]
    fn injected_overshoot_is_located() {
        let mut s: Vec<_> = (0..5).map(|i| snap(i as f64, Phase::Systole, vec![1.0, 2.0, 3.0])).collect();
        s[3].p[1] = 3.5;
        let r = bounds_check(&s, 1e-6);
        assert_eq!(r.violations.len(), 1);
        assert_eq!((r.violations[0].node, r.violations[0].t), (1, 3.0));
        assert!((r.max_excess - 0.5).abs() < 1e-15);
    }

    #[test]
    fn new_phase_resets_envelope() {
        let s = vec![
            snap(0.0, Phase::Diastole, vec![1.0, 2.0]),
            snap(1.0, Phase::Systole, vec![5.0, 9.0]),
            snap(2.0, Phase::Systole, vec![6.0, 8.0]),
        ];
        let r = bounds_check(&s, 1e-6);
        assert!(r.violations.is_empty());
        assert_eq!(r.phases_checked, 2);
    }
}
