//! Generators for genuine fixed point data with validated cohomology
//! models, plus corruption mutators for negative tests.
//!
//! `gen_cpn` builds the standard weighted circle action on projective
//! space: its localization identities are the Lagrange interpolation
//! identities, which makes it an independent mathematical oracle for the
//! whole pipeline. `gen_product` combines two datasets by Kuenneth, and
//! `corrupt` produces controlled negative fixtures.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::eqcalc::{validate_model, CohomologyModel, EquivariantClass, FailureList};
use crate::exactalg::{Rational, SpanBasis};
use crate::fixdata::{DataError, FixedPoint, FixedPointData};

/// Errors from the generators.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("cpn needs at least 2 weights")]
    TooFewWeights,
    #[error("cpn weights must be pairwise distinct; {0} repeats")]
    RepeatedWeight(i64),
    #[error("product scale must be positive, got {0}")]
    NonPositiveScale(Rational),
    #[error("factor {which} model fails validation: {failures}")]
    InvalidFactorModel { which: u8, failures: FailureList },
    #[error("generated product model fails validation (internal error): {failures}")]
    ProductModelInvalid { failures: FailureList },
    #[error("generated product basis for degree {degree} has dimension {found}, Kuenneth expects {expected} (internal error)")]
    ProductDimension { degree: usize, expected: usize, found: usize },
    #[error("mutation targets unknown fixed point `{0}`")]
    UnknownPoint(String),
    #[error("mutation slot {slot} out of range for `{id}`")]
    SlotOutOfRange { id: String, slot: usize },
    #[error("mutation would set a zero weight on `{0}`")]
    ZeroWeightMutation(String),
    #[error(transparent)]
    Data(#[from] DataError),
}

/// The weighted circle action on CP^n fixed by `n+1` pairwise distinct
/// integers: fixed point `e_i` has weights `a_j - a_i` (ascending `j`,
/// skipping `i`) and moment `a_i`. The model basis for `R_{2k}` consists of
/// the restriction vectors `(a_i^e)_i` for `e = 0..k`: the powers of the
/// degree-2 class with restrictions `a_i * u`, padded by the `u`-action.
pub fn gen_cpn(a: &[i64]) -> Result<(FixedPointData, CohomologyModel), GenError> {
    if a.len() < 2 {
        return Err(GenError::TooFewWeights);
    }
    for (i, &x) in a.iter().enumerate() {
        if a[..i].contains(&x) {
            return Err(GenError::RepeatedWeight(x));
        }
    }
    let n = a.len() - 1;
    let points = a
        .iter()
        .enumerate()
        .map(|(i, &a_i)| FixedPoint {
            id: format!("e{i}"),
            weights: a
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &a_j)| a_j - a_i)
                .collect(),
            moment: Rational::from(a_i),
        })
        .collect();
    let d = FixedPointData::new(n, points)?;

    let mut bases = BTreeMap::new();
    for k in 0..n {
        let basis = (0..=k)
            .map(|e| {
                EquivariantClass::new(
                    2 * k,
                    a.iter().map(|&a_i| Rational::from(a_i).pow(e)).collect(),
                )
                .expect("even degree")
            })
            .collect();
        bases.insert(2 * k, basis);
    }
    Ok((d, CohomologyModel::new(bases)))
}

/// Kuenneth product of two validated datasets. Points are ordered pairs
/// (left-major) with concatenated weights and moment `H_1 + c * H_2`; the
/// model for `R_{2k}` is the reduced span of entrywise tensor products of
/// factor bases over `i + j = k`. The output model is re-validated and its
/// dimensions are checked against the profile convolution.
pub fn gen_product(
    d1: &FixedPointData,
    m1: &CohomologyModel,
    d2: &FixedPointData,
    m2: &CohomologyModel,
    scale: &Rational,
) -> Result<(FixedPointData, CohomologyModel), GenError> {
    if !scale.is_positive() {
        return Err(GenError::NonPositiveScale(scale.clone()));
    }
    let report = validate_model(d1, m1);
    if !report.pass() {
        return Err(GenError::InvalidFactorModel { which: 1, failures: FailureList(report.failures) });
    }
    let report = validate_model(d2, m2);
    if !report.pass() {
        return Err(GenError::InvalidFactorModel { which: 2, failures: FailureList(report.failures) });
    }

    let n = d1.n() + d2.n();
    let mut points = Vec::with_capacity(d1.m() * d2.m());
    for p in d1.points() {
        for q in d2.points() {
            let mut weights = p.weights.clone();
            weights.extend_from_slice(&q.weights);
            points.push(FixedPoint {
                id: format!("{}x{}", p.id, q.id),
                weights,
                moment: &p.moment + &(scale * &q.moment),
            });
        }
    }
    let d = FixedPointData::new(n, points)?;

    let b1 = d1.betti_profile();
    let b2 = d2.betti_profile();
    let convolution: Vec<usize> = (0..=n)
        .map(|k| {
            (0..=k)
                .filter(|&i| i <= d1.n() && k - i <= d2.n())
                .map(|i| b1.values()[i] * b2.values()[k - i])
                .sum()
        })
        .collect();

    let mut bases = BTreeMap::new();
    let mut expected = 0usize;
    for (k, &dim_k) in convolution.iter().enumerate().take(n) {
        expected += dim_k;
        let mut span = SpanBasis::new();
        let mut basis: Vec<EquivariantClass> = Vec::with_capacity(expected);
        for i in 0..=k {
            let j = k - i;
            let left = m1.basis_or_full(d1, i).expect("factor bases are complete");
            let right = m2.basis_or_full(d2, j).expect("factor bases are complete");
            for lc in &left {
                for rc in &right {
                    let mut tensor = Vec::with_capacity(d.m());
                    for la in lc.restrictions() {
                        for ra in rc.restrictions() {
                            tensor.push(la * ra);
                        }
                    }
                    if span.insert(&tensor) {
                        basis.push(EquivariantClass::new(2 * k, tensor).expect("even degree"));
                    }
                }
            }
        }
        if basis.len() != expected {
            return Err(GenError::ProductDimension {
                degree: 2 * k,
                expected,
                found: basis.len(),
            });
        }
        bases.insert(2 * k, basis);
    }
    let model = CohomologyModel::new(bases);

    let report = validate_model(&d, &model);
    if !report.pass() {
        return Err(GenError::ProductModelInvalid { failures: FailureList(report.failures) });
    }
    Ok((d, model))
}

/// A single controlled edit of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mutation {
    /// No change; the trivial control.
    Identity,
    /// Replace one weight slot of one point.
    Weight { id: String, slot: usize, value: i64 },
    /// Replace one moment value.
    Moment { id: String, value: Rational },
}

/// Applies a mutation to a copy of the dataset; the result is re-checked
/// against the construction invariants.
pub fn corrupt(d: &FixedPointData, mutation: &Mutation) -> Result<FixedPointData, GenError> {
    let mut points = d.points().to_vec();
    match mutation {
        Mutation::Identity => {}
        Mutation::Weight { id, slot, value } => {
            let i = d.index_of(id).ok_or_else(|| GenError::UnknownPoint(id.clone()))?;
            if *slot >= points[i].weights.len() {
                return Err(GenError::SlotOutOfRange { id: id.clone(), slot: *slot });
            }
            if *value == 0 {
                return Err(GenError::ZeroWeightMutation(id.clone()));
            }
            points[i].weights[*slot] = *value;
        }
        Mutation::Moment { id, value } => {
            let i = d.index_of(id).ok_or_else(|| GenError::UnknownPoint(id.clone()))?;
            points[i].moment = value.clone();
        }
    }
    Ok(FixedPointData::new(d.n(), points)?)
}
