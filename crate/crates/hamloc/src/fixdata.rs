//! Fixed point data: the finite combinatorial model of a Hamiltonian
//! circle action with isolated fixed points.
//!
//! A dataset records, for each fixed point, its isotropy weights and its
//! moment value. Everything downstream (Betti profiles, localization
//! identities, certificates) is computed from this finite table in exact
//! arithmetic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exactalg::Rational;

/// Errors raised by dataset construction and deserialization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataError {
    #[error("half_dim must be at least 1")]
    BadHalfDim,
    #[error("dataset has no fixed points")]
    EmptyPoints,
    #[error("fixed point id must be nonempty")]
    EmptyId,
    #[error("duplicate fixed point id `{0}`")]
    DuplicateId(String),
    #[error("fixed point `{id}` has {got} weights, expected {expected}")]
    WrongWeightCount { id: String, got: usize, expected: usize },
    #[error("fixed point `{id}` has a zero weight in slot {slot}")]
    ZeroWeight { id: String, slot: usize },
}

/// One isolated fixed point: an id, its `n` nonzero integer isotropy
/// weights, and its moment value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPoint {
    pub id: String,
    pub weights: Vec<i64>,
    pub moment: Rational,
}

impl FixedPoint {
    /// Morse index of the moment map at this point: twice the number of
    /// negative weights.
    pub fn morse_index(&self) -> usize {
        2 * self.weights.iter().filter(|&&w| w < 0).count()
    }

    /// Product of the weights, as an exact rational.
    pub fn weight_product(&self) -> Rational {
        self.weights.iter().map(|&w| Rational::from(w)).fold(Rational::one(), |a, b| &a * &b)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixedPointData {
    half_dim: usize,
    fixed_points: Vec<FixedPoint>,
}

/// A complete fixed point dataset for a `2n`-dimensional space.
///
/// Invariants enforced at construction: `half_dim >= 1`, at least one
/// point, unique nonempty ids, each point carrying exactly `half_dim`
/// nonzero weights.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawFixedPointData")]
pub struct FixedPointData {
    half_dim: usize,
    #[serde(rename = "fixed_points")]
    points: Vec<FixedPoint>,
}

impl TryFrom<RawFixedPointData> for FixedPointData {
    type Error = DataError;

    fn try_from(raw: RawFixedPointData) -> Result<Self, DataError> {
        FixedPointData::new(raw.half_dim, raw.fixed_points)
    }
}

impl FixedPointData {
    pub fn new(half_dim: usize, points: Vec<FixedPoint>) -> Result<Self, DataError> {
        if half_dim == 0 {
            return Err(DataError::BadHalfDim);
        }
        if points.is_empty() {
            return Err(DataError::EmptyPoints);
        }
        for (i, p) in points.iter().enumerate() {
            if p.id.is_empty() {
                return Err(DataError::EmptyId);
            }
            if points[..i].iter().any(|q| q.id == p.id) {
                return Err(DataError::DuplicateId(p.id.clone()));
            }
            if p.weights.len() != half_dim {
                return Err(DataError::WrongWeightCount {
                    id: p.id.clone(),
                    got: p.weights.len(),
                    expected: half_dim,
                });
            }
            if let Some(slot) = p.weights.iter().position(|&w| w == 0) {
                return Err(DataError::ZeroWeight { id: p.id.clone(), slot });
            }
        }
        Ok(FixedPointData { half_dim, points })
    }

    /// Half the real dimension of the underlying space.
    pub fn n(&self) -> usize {
        self.half_dim
    }

    /// Number of fixed points.
    pub fn m(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[FixedPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &FixedPoint {
        &self.points[i]
    }

    /// Position of the point with the given id, in dataset order.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p.id == id)
    }

    pub fn from_json_str(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn to_json_string(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("dataset serializes");
        out.push('\n');
        out
    }

    /// Even Betti numbers `b_0, b_2, ..., b_{2n}` read off as counts of
    /// fixed points per Morse index.
    pub fn betti_profile(&self) -> BettiProfile {
        let mut counts = vec![0usize; self.half_dim + 1];
        for p in &self.points {
            counts[p.morse_index() / 2] += 1;
        }
        BettiProfile(counts)
    }

    /// First pair of points breaking the index-increasing condition, in
    /// dataset order: returns `(p, q)` with `ind(p) < ind(q)` but
    /// `H(p) >= H(q)`. `None` means the moment map is index-increasing.
    pub fn index_violation(&self) -> Option<(String, String)> {
        for p in &self.points {
            for q in &self.points {
                if p.morse_index() < q.morse_index() && p.moment >= q.moment {
                    return Some((p.id.clone(), q.id.clone()));
                }
            }
        }
        None
    }

    /// Checks the localization identities that any genuine dataset must
    /// satisfy: the moment-power sums `sum_z H(z)^e / prod_w(z)` vanish for
    /// every `e < n`, and the volume `sum_z (-H(z))^n / prod_w(z)` is
    /// positive.
    pub fn localization_consistency(&self) -> LocalizationReport {
        let n = self.half_dim;
        let mut failed_moments = Vec::new();
        for e in 0..n {
            let residual: Rational = self
                .points
                .iter()
                .map(|p| &p.moment.pow(e) / &p.weight_product())
                .sum();
            if !residual.is_zero() {
                failed_moments.push((e, residual));
            }
        }
        let volume: Rational = self
            .points
            .iter()
            .map(|p| &(-&p.moment).pow(n) / &p.weight_product())
            .sum();
        LocalizationReport { failed_moments, volume }
    }
}

/// Outcome of [`FixedPointData::localization_consistency`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalizationReport {
    /// Failing moment-power identities as `(e, residual)` pairs, ascending
    /// in `e`. Empty when all `n` identities hold.
    pub failed_moments: Vec<(usize, Rational)>,
    /// The localized volume; must be strictly positive.
    pub volume: Rational,
}

impl LocalizationReport {
    pub fn pass(&self) -> bool {
        self.failed_moments.is_empty() && self.volume.is_positive()
    }
}

/// The even Betti numbers `b_0, b_2, ..., b_{2n}`, indexed by `k` for
/// degree `2k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiProfile(Vec<usize>);

impl BettiProfile {
    pub fn from_values(values: Vec<usize>) -> Self {
        assert!(!values.is_empty(), "profile needs at least b_0");
        BettiProfile(values)
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len() - 1
    }

    /// Total rank; for a dataset this equals the number of fixed points.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Smallest `k` with `b_{2k} != b_{2(n-k)}`, if Poincare duality fails.
    pub fn duality_violation(&self) -> Option<usize> {
        let n = self.n();
        (0..=n).find(|&k| self.0[k] != self.0[n - k])
    }

    /// All `k` with `2k < n` and `b_{2k} > b_{2k+2}`: the failures of the
    /// profile to be nondecreasing on its first half.
    pub fn violations(&self) -> Vec<usize> {
        let n = self.n();
        (0..n).filter(|&k| 2 * k < n && self.0[k] > self.0[k + 1]).collect()
    }

    /// Whether the profile rises to a peak and then falls.
    pub fn is_unimodal(&self) -> bool {
        self.unimodal_mode().is_some()
    }

    /// The smallest index of the maximum, when the profile is unimodal;
    /// `None` otherwise.
    pub fn unimodal_mode(&self) -> Option<usize> {
        let max = *self.0.iter().max().expect("profile is nonempty");
        let mode = self.0.iter().position(|&b| b == max).expect("max is attained");
        let rising = self.0[..=mode].windows(2).all(|w| w[0] <= w[1]);
        let falling = self.0[mode..].windows(2).all(|w| w[0] >= w[1]);
        (rising && falling).then_some(mode)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::str::FromStr;

    fn pt(id: &str, weights: &[i64], moment: i64) -> FixedPoint {
        FixedPoint { id: id.into(), weights: weights.to_vec(), moment: Rational::from(moment) }
    }

    /// CP^2 with generator moments 0, 1, 2.
    fn cp2() -> FixedPointData {
        FixedPointData::new(
            2,
            vec![pt("e0", &[1, 2], 0), pt("e1", &[-1, 1], 1), pt("e2", &[-2, -1], 2)],
        )
        .unwrap()
    }

    #[test]
    fn morse_index_counts_negative_weights() {
        assert_eq!(pt("a", &[1, 2], 0).morse_index(), 0);
        assert_eq!(pt("a", &[-1, 1], 0).morse_index(), 2);
        assert_eq!(pt("a", &[-2, -1], 0).morse_index(), 4);
    }

    #[test]
    fn cp2_profile_and_checks() {
        let d = cp2();
        let profile = d.betti_profile();
        assert_eq!(profile.values(), &[1, 1, 1]);
        assert_eq!(profile.total(), d.m());
        assert_eq!(profile.duality_violation(), None);
        assert_eq!(profile.unimodal_mode(), Some(0));
        assert!(profile.violations().is_empty());
        assert_eq!(d.index_violation(), None);
    }

    #[test]
    fn cp2_localization_passes() {
        let report = cp2().localization_consistency();
        assert!(report.failed_moments.is_empty());
        // Oracle: sum (-H)^2/prod_w = 0/2 + 1/(-1) + 4/2 = 1.
        assert_eq!(report.volume, Rational::one());
        assert!(report.pass());
    }

    #[test]
    fn corrupted_weight_breaks_degree_zero_identity() {
        // Corrupt e0's weights from (1, 2) to (1, 3): the e = 0 identity
        // picks up residual 1/3 - 1 + 1/2 = -1/6.
        let d = FixedPointData::new(
            2,
            vec![pt("e0", &[1, 3], 0), pt("e1", &[-1, 1], 1), pt("e2", &[-2, -1], 2)],
        )
        .unwrap();
        let report = d.localization_consistency();
        assert_eq!(report.failed_moments.first(), Some(&(0, Rational::new(-1, 6))));
        assert!(!report.pass());
    }

    #[test]
    fn negative_volume_fails() {
        // Reverse the moment map of CP^1: weights stay, H flips order.
        let d = FixedPointData::new(1, vec![pt("s", &[1], 1), pt("t", &[-1], 0)]).unwrap();
        let report = d.localization_consistency();
        assert!(report.failed_moments.is_empty());
        assert_eq!(report.volume, Rational::from(-1));
        assert!(!report.pass());
        // And the moment map is no longer index-increasing.
        assert_eq!(d.index_violation(), Some(("s".into(), "t".into())));
    }

    #[test]
    fn index_violation_reports_lower_index_point_first() {
        let d = FixedPointData::new(
            1,
            vec![pt("a", &[1], 2), pt("b", &[-1], 2), pt("c", &[-1], 3)],
        )
        .unwrap();
        assert_eq!(d.index_violation(), Some(("a".into(), "b".into())));
    }

    #[test]
    fn duality_violation_names_smallest_k() {
        let p = BettiProfile::from_values(vec![1, 2, 1, 1, 1]);
        assert_eq!(p.duality_violation(), Some(1));
        let q = BettiProfile::from_values(vec![1, 2, 1, 2, 1]);
        assert_eq!(q.duality_violation(), None);
    }

    #[test]
    fn unimodal_modes() {
        assert_eq!(BettiProfile::from_values(vec![1, 2, 1]).unimodal_mode(), Some(1));
        assert_eq!(BettiProfile::from_values(vec![1, 2, 2, 1]).unimodal_mode(), Some(1));
        assert_eq!(BettiProfile::from_values(vec![1, 1, 1]).unimodal_mode(), Some(0));
        assert_eq!(BettiProfile::from_values(vec![1, 2, 1, 2, 1]).unimodal_mode(), None);
        assert_eq!(BettiProfile::from_values(vec![1, 2, 1, 1, 2, 1]).unimodal_mode(), None);
    }

    #[test]
    fn violations_scan_first_half_only() {
        // n = 5: checks k = 0, 1, 2.
        let p = BettiProfile::from_values(vec![1, 2, 1, 1, 2, 1]);
        assert_eq!(p.violations(), vec![1]);
        // The final descent 2 -> 1 at k = 4 is not a violation.
        let q = BettiProfile::from_values(vec![1, 2, 2, 2, 2, 1]);
        assert!(q.violations().is_empty());
        let r = BettiProfile::from_values(vec![2, 1, 1, 1, 1, 2]);
        assert_eq!(r.violations(), vec![0]);
    }

    #[test]
    fn construction_rejects_malformed_data() {
        assert_eq!(FixedPointData::new(0, vec![pt("a", &[], 0)]), Err(DataError::BadHalfDim));
        assert_eq!(FixedPointData::new(2, vec![]), Err(DataError::EmptyPoints));
        assert_eq!(
            FixedPointData::new(1, vec![pt("", &[1], 0)]),
            Err(DataError::EmptyId)
        );
        assert_eq!(
            FixedPointData::new(1, vec![pt("a", &[1], 0), pt("a", &[-1], 1)]),
            Err(DataError::DuplicateId("a".into()))
        );
        assert_eq!(
            FixedPointData::new(2, vec![pt("a", &[1], 0)]),
            Err(DataError::WrongWeightCount { id: "a".into(), got: 1, expected: 2 })
        );
        assert_eq!(
            FixedPointData::new(2, vec![pt("a", &[1, 0], 0)]),
            Err(DataError::ZeroWeight { id: "a".into(), slot: 1 })
        );
    }

    #[test]
    fn json_round_trip() {
        let d = cp2();
        let s = d.to_json_string();
        let back = FixedPointData::from_json_str(&s).unwrap();
        assert_eq!(back, d);
        // Moments serialize as numbers when integral, strings otherwise.
        let h = FixedPointData::new(
            1,
            vec![
                FixedPoint { id: "a".into(), weights: vec![1], moment: Rational::new(1, 2) },
                FixedPoint { id: "b".into(), weights: vec![-1], moment: Rational::from(1) },
            ],
        )
        .unwrap();
        let s = h.to_json_string();
        assert!(s.contains("\"1/2\""));
        let back = FixedPointData::from_json_str(&s).unwrap();
        assert_eq!(back.point(0).moment, Rational::from_str("1/2").unwrap());
    }

    #[test]
    fn json_rejects_bad_input() {
        // Duplicate ids.
        let dup = r#"{"half_dim":1,"fixed_points":[
            {"id":"a","weights":[1],"moment":0},
            {"id":"a","weights":[-1],"moment":1}]}"#;
        assert!(FixedPointData::from_json_str(dup).is_err());
        // Floating point moment.
        let float = r#"{"half_dim":1,"fixed_points":[{"id":"a","weights":[1],"moment":0.5}]}"#;
        assert!(FixedPointData::from_json_str(float).is_err());
        // Unknown field.
        let unknown = r#"{"half_dim":1,"fixed_points":[{"id":"a","weights":[1],"moment":0,"x":1}]}"#;
        assert!(FixedPointData::from_json_str(unknown).is_err());
        // Zero weight.
        let zero = r#"{"half_dim":1,"fixed_points":[{"id":"a","weights":[0],"moment":0}]}"#;
        assert!(FixedPointData::from_json_str(zero).is_err());
    }

    fn arb_profile() -> impl Strategy<Value = Vec<usize>> {
        proptest::collection::vec(0usize..5, 1..9)
    }

    proptest! {
        #[test]
        fn profile_total_counts_points(weights in proptest::collection::vec(-3i64..=3, 1..6)) {
            prop_assume!(weights.iter().all(|&w| w != 0));
            let n = weights.len();
            let points: Vec<FixedPoint> = weights
                .iter()
                .enumerate()
                .map(|(i, _)| FixedPoint {
                    id: format!("p{i}"),
                    weights: weights.clone(),
                    moment: Rational::from(i as i64),
                })
                .collect();
            let d = FixedPointData::new(n, points).unwrap();
            prop_assert_eq!(d.betti_profile().total(), d.m());
        }

        #[test]
        fn duality_violation_iff_not_palindromic(values in arb_profile()) {
            let reversed: Vec<usize> = values.iter().rev().copied().collect();
            let palindromic = values == reversed;
            let p = BettiProfile::from_values(values);
            prop_assert_eq!(p.duality_violation().is_none(), palindromic);
        }

        #[test]
        fn unimodal_palindromic_profiles_have_no_first_half_violations(values in arb_profile()) {
            // The first-half scan detects non-unimodality only under
            // duality, which is how the proof uses it.
            let mut values = values;
            let mirror: Vec<usize> = values.iter().rev().skip(1).copied().collect();
            values.extend(mirror);
            let p = BettiProfile::from_values(values);
            if p.is_unimodal() {
                prop_assert!(p.violations().is_empty());
            }
        }

        #[test]
        fn palindromic_without_violations_is_unimodal(half in proptest::collection::vec(0usize..5, 1..5)) {
            // Build a palindromic profile whose first half is sorted.
            let mut first = half.clone();
            first.sort_unstable();
            let mut values = first.clone();
            values.extend(first.iter().rev());
            let p = BettiProfile::from_values(values);
            prop_assert!(p.violations().is_empty());
            prop_assert!(p.is_unimodal());
        }
    }
}
