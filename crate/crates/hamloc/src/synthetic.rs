//! Synthetic fixtures: datasets that look plausible pointwise but need not
//! come from any genuine action.
//!
//! The canonical n = 5 fixture has the non-unimodal Betti profile
//! [1, 2, 1, 1, 2, 1] with an index-increasing moment map, together with a
//! claimed cohomology model that passes every structural check; the
//! certification procedure refutes the pair exactly. The randomized
//! builders produce index-increasing datasets realizing random palindromic
//! profiles for property tests.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use rand::Rng;

use crate::eqcalc::{CohomologyModel, EquivariantClass};
use crate::exactalg::Rational;
use crate::fixdata::{FixedPoint, FixedPointData};

fn signed_unit_weights(n: usize, negatives: usize) -> Vec<i64> {
    (0..n).map(|s| if s < negatives { -1 } else { 1 }).collect()
}

fn class(degree: usize, restrictions: Vec<Rational>) -> EquivariantClass {
    EquivariantClass::new(degree, restrictions).expect("even degree")
}

fn unit_vector(m: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); m];
    v[i] = Rational::one();
    v
}

/// The canonical synthetic non-unimodal fixture: n = 5, profile
/// [1, 2, 1, 1, 2, 1], index-increasing moments, all weights of modulus 1
/// with exactly ind/2 of them negative. The claimed model is a structural
/// flag with the documented degree-2 basis {ones, H, unit at p1}; degrees
/// 4..8 extend it by powers of H and one more unit vector, which keeps
/// every basis independent (a polynomial of degree at most 4 cannot vanish
/// at six of the eight distinct moment values).
pub fn canonical_n5() -> (FixedPointData, CohomologyModel) {
    let spec: [(usize, Rational); 8] = [
        (0, Rational::from(0)),
        (1, Rational::from(1)),
        (1, Rational::new(3, 2)),
        (2, Rational::from(2)),
        (3, Rational::from(3)),
        (4, Rational::from(4)),
        (4, Rational::new(9, 2)),
        (5, Rational::from(5)),
    ];
    let points: Vec<FixedPoint> = spec
        .iter()
        .enumerate()
        .map(|(i, (negatives, moment))| FixedPoint {
            id: format!("p{i}"),
            weights: signed_unit_weights(5, *negatives),
            moment: moment.clone(),
        })
        .collect();
    let d = FixedPointData::new(5, points).expect("fixture is well formed");

    let m = d.m();
    let h_power =
        |e: usize| -> Vec<Rational> { d.points().iter().map(|p| p.moment.pow(e)).collect() };
    let chain = [
        h_power(0),
        h_power(1),
        unit_vector(m, 1),
        h_power(2),
        h_power(3),
        h_power(4),
        unit_vector(m, 2),
    ];
    // Dimension law for [1,2,1,1,2,1]: dims 1, 3, 4, 5, 7 in degrees 0..8.
    let mut bases = BTreeMap::new();
    for (k, dim) in [1usize, 3, 4, 5, 7].into_iter().enumerate() {
        bases.insert(2 * k, chain[..dim].iter().map(|v| class(2 * k, v.clone())).collect());
    }
    (d, CohomologyModel::new(bases))
}

/// A non-unimodal fixture whose only profile violation sits in the
/// unsupported regime n - 2k = 2: n = 4 with profile [1, 2, 1, 2, 1].
/// Certification must refuse it rather than guess.
pub fn degenerate_n4() -> (FixedPointData, CohomologyModel) {
    let spec: [(usize, Rational); 7] = [
        (0, Rational::from(0)),
        (1, Rational::from(1)),
        (1, Rational::new(3, 2)),
        (2, Rational::from(2)),
        (3, Rational::from(3)),
        (3, Rational::new(7, 2)),
        (4, Rational::from(4)),
    ];
    let points: Vec<FixedPoint> = spec
        .iter()
        .enumerate()
        .map(|(i, (negatives, moment))| FixedPoint {
            id: format!("q{i}"),
            weights: signed_unit_weights(4, *negatives),
            moment: moment.clone(),
        })
        .collect();
    let d = FixedPointData::new(4, points).expect("fixture is well formed");
    let model = claimed_flag_model(&d);
    (d, model)
}

/// A claimed model that passes every structural check for any dataset:
/// the flag spanned by the ones vector followed by unit vectors, truncated
/// per degree to the dimension law. It claims nothing about integrals.
pub fn claimed_flag_model(d: &FixedPointData) -> CohomologyModel {
    let m = d.m();
    let profile = d.betti_profile();
    let mut chain: Vec<Vec<Rational>> = vec![vec![Rational::one(); m]];
    chain.extend((0..m.saturating_sub(1)).map(|i| unit_vector(m, i)));
    let mut bases = BTreeMap::new();
    let mut dim = 0usize;
    for k in 0..d.n() {
        dim += profile.values()[k];
        bases.insert(2 * k, chain[..dim].iter().map(|v| class(2 * k, v.clone())).collect());
    }
    CohomologyModel::new(bases)
}

/// Random palindromic Betti half-profile, mirrored to full length `n + 1`.
/// `violation_at = Some(k)` forces the first first-half violation to sit
/// exactly at `k` (nondecreasing before it, a strict drop after it).
fn random_profile(rng: &mut impl Rng, n: usize, violation_at: Option<usize>) -> Vec<usize> {
    let half_len = n / 2 + 1;
    let mut half = vec![1usize; half_len];
    match violation_at {
        Some(k) => {
            assert!(k + 1 < half_len, "violation index fits in the first half");
            for i in 1..=k {
                half[i] = half[i - 1] + rng.random_range(0..=1);
            }
            half[k + 1] = rng.random_range(0..half[k]);
            for h in &mut half[k + 2..] {
                *h = rng.random_range(0..=4);
            }
        }
        None => {
            for h in &mut half[1..] {
                *h = rng.random_range(1..=3);
            }
        }
    }
    let mut full = half.clone();
    let mirrored = (n + 1) - half_len;
    full.extend(half[..mirrored].iter().rev());
    full
}

/// Realizes a Betti profile as an index-increasing dataset: for each index
/// level `k` it creates `profile[k]` points with exactly `k` negative
/// weights in random slots, random weight magnitudes, and moments inside
/// the interval [k, k+1) so that lower index means strictly lower moment.
fn realize_profile(rng: &mut impl Rng, n: usize, profile: &[usize]) -> FixedPointData {
    assert_eq!(profile.len(), n + 1);
    let mut points = Vec::new();
    for (k, &count) in profile.iter().enumerate() {
        for _ in 0..count {
            let mut weights: Vec<i64> = (0..n).map(|_| rng.random_range(1..=3)).collect();
            for slot in rand::seq::index::sample(rng, n, k) {
                weights[slot] = -weights[slot];
            }
            points.push(FixedPoint {
                id: format!("z{}", points.len()),
                weights,
                moment: &Rational::from(k as i64) + &Rational::new(rng.random_range(0..=7), 8),
            });
        }
    }
    FixedPointData::new(n, points).expect("realized dataset is well formed")
}

/// Random index-increasing dataset with a random palindromic profile.
pub fn random_palindromic_data(rng: &mut impl Rng, n: usize) -> FixedPointData {
    let profile = random_profile(rng, n, None);
    realize_profile(rng, n, &profile)
}

/// Random index-increasing dataset whose profile is palindromic and
/// non-unimodal, with the first violation at the returned `k` satisfying
/// `n - 2k >= 3`. Requires `n >= 3`.
pub fn random_nonunimodal_data(rng: &mut impl Rng, n: usize) -> (FixedPointData, usize) {
    assert!(n >= 3, "need n - 2k >= 3 for some k >= 0");
    let k = rng.random_range(0..=(n - 3) / 2);
    let profile = random_profile(rng, n, Some(k));
    (realize_profile(rng, n, &profile), k)
}

/// A random degree-`2k` class vanishing on `targets`, with small random
/// rational restrictions elsewhere (possibly zero, so the degenerate
/// equality cases get exercised too).
pub fn random_vanishing_alpha(
    rng: &mut impl Rng,
    d: &FixedPointData,
    k: usize,
    targets: &[String],
) -> EquivariantClass {
    let banned: BTreeSet<usize> = targets.iter().filter_map(|id| d.index_of(id)).collect();
    let restrictions = (0..d.m())
        .map(|i| {
            if banned.contains(&i) {
                Rational::zero()
            } else {
                Rational::new(rng.random_range(-5..=5), rng.random_range(1..=3))
            }
        })
        .collect();
    class(2 * k, restrictions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eqcalc::{validate_model, validate_model_structure, ModelFailure};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn canonical_fixture_matches_its_documentation() {
        let (d, model) = canonical_n5();
        assert_eq!(d.n(), 5);
        assert_eq!(d.m(), 8);
        assert_eq!(d.betti_profile().values(), &[1, 2, 1, 1, 2, 1]);
        assert_eq!(d.index_violation(), None);
        assert_eq!(d.betti_profile().duality_violation(), None);
        assert_eq!(d.betti_profile().unimodal_mode(), None);
        assert_eq!(d.betti_profile().violations(), vec![1]);
        for p in d.points() {
            assert!(p.weights.iter().all(|w| w.abs() == 1));
            assert_eq!(p.weights.iter().filter(|&&w| w < 0).count() * 2, p.morse_index());
        }
        // The documented degree-2 basis: ones, H, unit at p1.
        let basis2 = model.basis(2).unwrap();
        assert_eq!(basis2.len(), 3);
        assert!(basis2[0].restrictions().iter().all(Rational::is_one));
        assert_eq!(
            basis2[1].restrictions().to_vec(),
            d.points().iter().map(|p| p.moment.clone()).collect::<Vec<_>>()
        );
        assert!(basis2[2].at(1).is_one());
        assert_eq!(basis2[2].restrictions().iter().filter(|a| !a.is_zero()).count(), 1);
    }

    #[test]
    fn canonical_fixture_is_structural_but_not_genuine() {
        let (d, model) = canonical_n5();
        let structure = validate_model_structure(&d, &model);
        assert!(structure.pass(), "structural failures: {:?}", structure.failures);
        // The dataset itself already fails localization at e = 2.
        let report = d.localization_consistency();
        assert_eq!(report.failed_moments.first(), Some(&(2, Rational::from(3))));
        // And the full model validation sees the same obstruction.
        let full = validate_model(&d, &model);
        assert!(full
            .failures
            .iter()
            .any(|f| matches!(f, ModelFailure::MomentIdentity { .. })));
    }

    #[test]
    fn degenerate_fixture_has_only_the_narrow_violation() {
        let (d, model) = degenerate_n4();
        assert_eq!(d.betti_profile().values(), &[1, 2, 1, 2, 1]);
        assert_eq!(d.betti_profile().violations(), vec![1]);
        assert_eq!(d.index_violation(), None);
        assert!(validate_model_structure(&d, &model).pass());
    }

    #[test]
    fn flag_model_is_always_structural() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in 3..=7 {
            let d = random_palindromic_data(&mut rng, n);
            let model = claimed_flag_model(&d);
            let report = validate_model_structure(&d, &model);
            assert!(report.pass(), "n = {n}: {:?}", report.failures);
        }
    }

    #[test]
    fn random_nonunimodal_data_has_the_promised_violation() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for trial in 0..50 {
            let n = 5 + trial % 3;
            let (d, k) = random_nonunimodal_data(&mut rng, n);
            let profile = d.betti_profile();
            assert_eq!(profile.duality_violation(), None, "palindromic");
            assert_eq!(profile.values()[0], 1);
            assert_eq!(d.index_violation(), None);
            let violations = profile.violations();
            assert_eq!(violations.first(), Some(&k), "first violation at the promised k");
            assert!(n >= 2 * k + 3);
        }
    }

    #[test]
    fn random_alpha_vanishes_where_asked() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (d, _) = canonical_n5();
        let targets = vec!["p0".to_string(), "p4".to_string()];
        for _ in 0..20 {
            let alpha = random_vanishing_alpha(&mut rng, &d, 1, &targets);
            assert_eq!(alpha.degree(), 2);
            assert!(alpha.at(0).is_zero());
            assert!(alpha.at(4).is_zero());
        }
    }
}
