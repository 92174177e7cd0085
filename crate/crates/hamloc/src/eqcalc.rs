//! Equivariant cohomology classes in the restriction (Kirwan) model.
//!
//! A class of pure even degree `2k` is stored as its vector of fixed-point
//! restriction coefficients: entry `a_z` means the restriction is
//! `a_z * u^k`. By Kirwan injectivity this representation is faithful, so
//! equality of classes is equality of degree and restriction vectors.
//!
//! Integration is exact ABBV localization: each restriction is divided by
//! the equivariant Euler class `prod_w(z) * u^n` and the terms are summed,
//! giving `S * u^{k-n}`. Whenever the degree is below `2n` the scalar `S`
//! is an obstruction: it must vanish for data coming from a genuine action.
//!
//! A [`CohomologyModel`] is a claimed basis of restriction vectors per even
//! degree `0..2(n-1)`. Nothing is stored for `k >= n`: there the dimension
//! law forces the restriction image to be the full `m`-dimensional space,
//! so the standard basis serves. Models are supplied by generators or by
//! the user and checked by [`validate_model`] against every identity the
//! theory imposes; the crate does not construct models from scratch.

use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::exactalg::{Rational, RationalMatrix, SpanBasis};
use crate::fixdata::FixedPointData;

/// Errors from class and model operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EqError {
    #[error("class degree {0} is odd")]
    OddDegree(usize),
    #[error("restriction vector has {got} entries, expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("unknown fixed point id `{0}`")]
    UnknownPoint(String),
    #[error("missing restriction for fixed point `{0}`")]
    MissingRestriction(String),
    #[error("no basis stored for degree {degree}")]
    MissingBasis { degree: usize },
    #[error("model basis key `{0}` is not an even nonnegative integer")]
    BadBasisKey(String),
    #[error("class {index} under model key {key} has degree {found}")]
    WrongKeyDegree { key: usize, index: usize, found: usize },
    #[error("{0}")]
    Json(String),
}

impl From<serde_json::Error> for EqError {
    fn from(e: serde_json::Error) -> Self {
        EqError::Json(e.to_string())
    }
}

/// A pure-degree equivariant class as its restriction vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivariantClass {
    degree: usize,
    restrictions: Vec<Rational>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    degree: usize,
    restrictions: BTreeMap<String, Rational>,
}

impl EquivariantClass {
    pub fn new(degree: usize, restrictions: Vec<Rational>) -> Result<Self, EqError> {
        if !degree.is_multiple_of(2) {
            return Err(EqError::OddDegree(degree));
        }
        Ok(EquivariantClass { degree, restrictions })
    }

    /// The degree-0 unit class: all restrictions 1.
    pub fn ones(m: usize) -> Self {
        EquivariantClass { degree: 0, restrictions: vec![Rational::one(); m] }
    }

    /// Standard basis vector: restriction 1 at position `i`, 0 elsewhere.
    pub fn unit(m: usize, i: usize, degree: usize) -> Result<Self, EqError> {
        let mut restrictions = vec![Rational::zero(); m];
        restrictions[i] = Rational::one();
        EquivariantClass::new(degree, restrictions)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The degree index `k` with `degree = 2k`.
    pub fn k(&self) -> usize {
        self.degree / 2
    }

    pub fn restrictions(&self) -> &[Rational] {
        &self.restrictions
    }

    pub fn at(&self, i: usize) -> &Rational {
        &self.restrictions[i]
    }

    pub fn is_zero(&self) -> bool {
        self.restrictions.iter().all(Rational::is_zero)
    }

    /// Sum of same-degree classes over the same dataset.
    pub fn add(&self, other: &Self) -> Result<Self, EqError> {
        if self.degree != other.degree {
            return Err(EqError::DegreeMismatch { left: self.degree, right: other.degree });
        }
        if self.restrictions.len() != other.restrictions.len() {
            return Err(EqError::LengthMismatch {
                got: other.restrictions.len(),
                expected: self.restrictions.len(),
            });
        }
        Ok(EquivariantClass {
            degree: self.degree,
            restrictions: self
                .restrictions
                .iter()
                .zip(&other.restrictions)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        EquivariantClass {
            degree: self.degree,
            restrictions: self.restrictions.iter().map(|a| a * c).collect(),
        }
    }

    /// Cup product: degrees add, restrictions multiply entrywise.
    pub fn multiply(&self, other: &Self) -> Result<Self, EqError> {
        if self.restrictions.len() != other.restrictions.len() {
            return Err(EqError::LengthMismatch {
                got: other.restrictions.len(),
                expected: self.restrictions.len(),
            });
        }
        Ok(EquivariantClass {
            degree: self.degree + other.degree,
            restrictions: self
                .restrictions
                .iter()
                .zip(&other.restrictions)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    /// The module action of `u^j`: degree rises by `2j`, restrictions are
    /// unchanged (each `a_z u^k` becomes `a_z u^{k+j}`).
    pub fn scale_u(&self, j: usize) -> Self {
        EquivariantClass { degree: self.degree + 2 * j, restrictions: self.restrictions.clone() }
    }

    /// `sum_j coeffs[j] * basis[j]`; all classes must share one degree.
    pub fn linear_combination(
        basis: &[EquivariantClass],
        coeffs: &[Rational],
    ) -> Result<Self, EqError> {
        assert_eq!(basis.len(), coeffs.len(), "one coefficient per basis class");
        let first = basis.first().expect("nonempty basis");
        let mut acc = EquivariantClass {
            degree: first.degree,
            restrictions: vec![Rational::zero(); first.restrictions.len()],
        };
        for (b, c) in basis.iter().zip(coeffs) {
            acc = acc.add(&b.scale(c))?;
        }
        Ok(acc)
    }

    pub fn to_json_value(&self, d: &FixedPointData) -> Result<Value, EqError> {
        if self.restrictions.len() != d.m() {
            return Err(EqError::LengthMismatch { got: self.restrictions.len(), expected: d.m() });
        }
        let mut restrictions = Map::new();
        for (p, a) in d.points().iter().zip(&self.restrictions) {
            restrictions.insert(p.id.clone(), serde_json::to_value(a)?);
        }
        Ok(serde_json::json!({ "degree": self.degree, "restrictions": restrictions }))
    }

    pub fn to_json_string(&self, d: &FixedPointData) -> Result<String, EqError> {
        let mut out = serde_json::to_string_pretty(&self.to_json_value(d)?)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json_value(d: &FixedPointData, v: Value) -> Result<Self, EqError> {
        let raw: RawClass = serde_json::from_value(v)?;
        Self::from_raw(d, raw)
    }

    pub fn from_json_str(d: &FixedPointData, s: &str) -> Result<Self, EqError> {
        let raw: RawClass = serde_json::from_str(s)?;
        Self::from_raw(d, raw)
    }

    fn from_raw(d: &FixedPointData, mut raw: RawClass) -> Result<Self, EqError> {
        let mut restrictions = Vec::with_capacity(d.m());
        for p in d.points() {
            let a = raw
                .restrictions
                .remove(&p.id)
                .ok_or_else(|| EqError::MissingRestriction(p.id.clone()))?;
            restrictions.push(a);
        }
        if let Some(extra) = raw.restrictions.into_keys().next() {
            return Err(EqError::UnknownPoint(extra));
        }
        EquivariantClass::new(raw.degree, restrictions)
    }
}

/// The exact value of a localized integral, `scalar * u^{u_exponent}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegrationResult {
    pub scalar: Rational,
    pub u_exponent: i64,
}

impl fmt::Display for IntegrationResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * u^{}", self.scalar, self.u_exponent)
    }
}

/// The shifted equivariant symplectic class for moment map `H - r`:
/// degree 2, restriction `r - H(z)` at each fixed point.
pub fn omega_class(d: &FixedPointData, shift: &Rational) -> EquivariantClass {
    EquivariantClass {
        degree: 2,
        restrictions: d.points().iter().map(|p| shift - &p.moment).collect(),
    }
}

/// ABBV localization: `integral = sum_z a_z / prod_w(z) * u^{k-n}`.
pub fn integrate(d: &FixedPointData, a: &EquivariantClass) -> Result<IntegrationResult, EqError> {
    if a.restrictions.len() != d.m() {
        return Err(EqError::LengthMismatch { got: a.restrictions.len(), expected: d.m() });
    }
    let scalar = d
        .points()
        .iter()
        .zip(&a.restrictions)
        .map(|(p, a_z)| a_z / &p.weight_product())
        .sum();
    Ok(IntegrationResult { scalar, u_exponent: a.k() as i64 - d.n() as i64 })
}

/// Restrictions of a basis to a set of target points: one row per target,
/// one column per class.
pub fn restriction_matrix(
    d: &FixedPointData,
    basis: &[EquivariantClass],
    targets: &[String],
) -> Result<RationalMatrix, EqError> {
    if let Some(first) = basis.first() {
        for b in basis {
            if b.degree != first.degree {
                return Err(EqError::DegreeMismatch { left: first.degree, right: b.degree });
            }
            if b.restrictions.len() != d.m() {
                return Err(EqError::LengthMismatch {
                    got: b.restrictions.len(),
                    expected: d.m(),
                });
            }
        }
    }
    let mut positions = Vec::with_capacity(targets.len());
    for t in targets {
        positions.push(d.index_of(t).ok_or_else(|| EqError::UnknownPoint(t.clone()))?);
    }
    Ok(RationalMatrix::from_fn(targets.len(), basis.len(), |r, c| {
        basis[c].restrictions[positions[r]].clone()
    }))
}

/// A claimed basis of restriction vectors per stored even degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CohomologyModel {
    bases: BTreeMap<usize, Vec<EquivariantClass>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    bases: BTreeMap<String, Vec<RawClass>>,
}

impl CohomologyModel {
    /// Wraps a degree-keyed basis map as given; all semantic checks live in
    /// [`validate_model`], so even a wrong model is representable.
    pub fn new(bases: BTreeMap<usize, Vec<EquivariantClass>>) -> Self {
        CohomologyModel { bases }
    }

    pub fn degrees(&self) -> impl Iterator<Item = usize> + '_ {
        self.bases.keys().copied()
    }

    pub fn basis(&self, degree: usize) -> Option<&[EquivariantClass]> {
        self.bases.get(&degree).map(Vec::as_slice)
    }

    /// The working basis for degree `2k`: the stored one for `k < n`, and
    /// the standard basis of the full `m`-dimensional space for `k >= n`,
    /// where injectivity plus the dimension law leave no room for less.
    pub fn basis_or_full(
        &self,
        d: &FixedPointData,
        k: usize,
    ) -> Result<Vec<EquivariantClass>, EqError> {
        if k < d.n() {
            self.basis(2 * k).map(<[_]>::to_vec).ok_or(EqError::MissingBasis { degree: 2 * k })
        } else {
            (0..d.m()).map(|i| EquivariantClass::unit(d.m(), i, 2 * k)).collect()
        }
    }

    pub fn to_json_value(&self, d: &FixedPointData) -> Result<Value, EqError> {
        let mut bases = Map::new();
        for (degree, classes) in &self.bases {
            let list = classes
                .iter()
                .map(|c| c.to_json_value(d))
                .collect::<Result<Vec<_>, _>>()?;
            bases.insert(degree.to_string(), Value::Array(list));
        }
        Ok(serde_json::json!({ "bases": bases }))
    }

    pub fn to_json_string(&self, d: &FixedPointData) -> Result<String, EqError> {
        let mut out = serde_json::to_string_pretty(&self.to_json_value(d)?)?;
        out.push('\n');
        Ok(out)
    }

    pub fn from_json_str(d: &FixedPointData, s: &str) -> Result<Self, EqError> {
        let raw: RawModel = serde_json::from_str(s)?;
        let mut bases = BTreeMap::new();
        for (key, raw_classes) in raw.bases {
            let degree: usize = key.parse().map_err(|_| EqError::BadBasisKey(key.clone()))?;
            if !degree.is_multiple_of(2) {
                return Err(EqError::BadBasisKey(key));
            }
            let mut classes = Vec::with_capacity(raw_classes.len());
            for (index, rc) in raw_classes.into_iter().enumerate() {
                if rc.degree != degree {
                    return Err(EqError::WrongKeyDegree { key: degree, index, found: rc.degree });
                }
                classes.push(EquivariantClass::from_raw(d, rc)?);
            }
            bases.insert(degree, classes);
        }
        Ok(CohomologyModel::new(bases))
    }
}

/// Kernel search behind the certifier: the canonical nonzero degree-`2k`
/// class vanishing on every point of `targets`, as a combination of the
/// model basis, or `None` when restriction to the targets is injective.
pub fn vanishing_class(
    d: &FixedPointData,
    model: &CohomologyModel,
    k: usize,
    targets: &[String],
) -> Result<Option<EquivariantClass>, EqError> {
    let basis = model.basis_or_full(d, k)?;
    if basis.is_empty() {
        return Ok(None);
    }
    let matrix = restriction_matrix(d, &basis, targets)?;
    let kernel = matrix.kernel_basis();
    match kernel.first() {
        None => Ok(None),
        Some(coeffs) => Ok(Some(EquivariantClass::linear_combination(&basis, coeffs)?)),
    }
}

/// One failed model check, with exact residuals where applicable.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelFailure {
    #[error("no basis stored for degree {degree}")]
    MissingBasis { degree: usize },
    #[error("basis stored for degree {degree}, outside 0..2(n-1)")]
    UnexpectedDegree { degree: usize },
    #[error("degree-{degree} basis: class {index} has {got} restrictions, expected {expected}")]
    WrongLength { degree: usize, index: usize, got: usize, expected: usize },
    #[error("degree-{degree} basis: class {index} has degree {found}")]
    WrongClassDegree { degree: usize, index: usize, found: usize },
    #[error("dim R_{degree} is {found}; the dimension law b_0 + ... + b_{degree} requires {expected}")]
    WrongDimension { degree: usize, expected: usize, found: usize },
    #[error("degree-{degree} basis is linearly dependent: rank {rank} < {dim}")]
    DependentBasis { degree: usize, rank: usize, dim: usize },
    #[error("degree-0 basis does not span exactly the constants")]
    DegreeZeroSpan,
    #[error("span(R_{lower}) is not contained in span(R_{upper}): u-module nesting fails")]
    NotNested { lower: usize, upper: usize },
    #[error("moment identity fails for degree-{degree} class {index}: sum_z a_z H(z)^{exponent}/prod_w(z) = {residual}, expected 0")]
    MomentIdentity { degree: usize, index: usize, exponent: usize, residual: Rational },
    #[error("product of degree-{deg_a} class {idx_a} and degree-{deg_b} class {idx_b} is outside the stored span of degree {}", deg_a + deg_b)]
    ProductNotInSpan { deg_a: usize, idx_a: usize, deg_b: usize, idx_b: usize },
    #[error("product of degree-{deg_a} class {idx_a} and degree-{deg_b} class {idx_b} integrates to {residual} * u^{}, expected 0", ((deg_a + deg_b) / 2) as i64 - *n as i64)]
    ProductIntegral {
        deg_a: usize,
        idx_a: usize,
        deg_b: usize,
        idx_b: usize,
        n: usize,
        residual: Rational,
    },
}

/// Outcome of model validation: empty failure list means pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelReport {
    pub failures: Vec<ModelFailure>,
}

impl ModelReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A list of model failures rendered as one line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureList(pub Vec<ModelFailure>);

impl fmt::Display for FailureList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for failure in &self.0 {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{failure}")?;
            first = false;
        }
        Ok(())
    }
}

/// Shape of one stored basis after structural checks, reused by the
/// integral checks.
struct CheckedBasis<'a> {
    degree: usize,
    classes: &'a [EquivariantClass],
}

fn structural_scan<'a>(
    d: &FixedPointData,
    model: &'a CohomologyModel,
    failures: &mut Vec<ModelFailure>,
) -> Vec<CheckedBasis<'a>> {
    let n = d.n();
    let m = d.m();
    let profile = d.betti_profile();
    let mut cumulative = 0usize;

    for degree in model.degrees() {
        if degree % 2 != 0 || degree > 2 * (n - 1) {
            failures.push(ModelFailure::UnexpectedDegree { degree });
        }
    }

    let mut checked = Vec::new();
    for k in 0..n {
        let degree = 2 * k;
        cumulative += profile.values()[k];
        let Some(classes) = model.basis(degree) else {
            failures.push(ModelFailure::MissingBasis { degree });
            continue;
        };
        let mut shape_ok = true;
        for (index, c) in classes.iter().enumerate() {
            if c.degree() != degree {
                failures.push(ModelFailure::WrongClassDegree { degree, index, found: c.degree() });
                shape_ok = false;
            }
            if c.restrictions().len() != m {
                failures.push(ModelFailure::WrongLength {
                    degree,
                    index,
                    got: c.restrictions().len(),
                    expected: m,
                });
                shape_ok = false;
            }
        }
        if !shape_ok {
            continue;
        }
        if classes.len() != cumulative {
            failures.push(ModelFailure::WrongDimension {
                degree,
                expected: cumulative,
                found: classes.len(),
            });
        }
        let mut span = SpanBasis::new();
        for c in classes {
            span.insert(c.restrictions());
        }
        if span.rank() < classes.len() {
            failures.push(ModelFailure::DependentBasis {
                degree,
                rank: span.rank(),
                dim: classes.len(),
            });
        }
        checked.push(CheckedBasis { degree, classes });
    }

    // Degree 0 must span exactly the constants: every class a multiple of
    // the ones vector, and at least one of them nonzero.
    if let Some(b0) = checked.iter().find(|b| b.degree == 0) {
        let constant = b0.classes.iter().all(|c| {
            let r = c.restrictions();
            r.iter().all(|a| a == &r[0])
        });
        let nonzero = b0.classes.iter().any(|c| !c.is_zero());
        if !(constant && nonzero) {
            failures.push(ModelFailure::DegreeZeroSpan);
        }
    }

    // u-module nesting between consecutive stored degrees.
    for pair in checked.windows(2) {
        let (lower, upper) = (&pair[0], &pair[1]);
        if upper.degree != lower.degree + 2 {
            continue;
        }
        let mut span = SpanBasis::new();
        for c in upper.classes {
            span.insert(c.restrictions());
        }
        if !lower.classes.iter().all(|c| span.contains(c.restrictions())) {
            failures.push(ModelFailure::NotNested { lower: lower.degree, upper: upper.degree });
        }
    }

    checked
}

/// Structural model validation: required degrees present and nothing else,
/// class shapes, the dimension law, basis independence, degree-0 constants,
/// and u-module nesting. This is the gate certification requires; it does
/// not presuppose the localization identities, which are exactly what a
/// certificate may refute.
pub fn validate_model_structure(d: &FixedPointData, model: &CohomologyModel) -> ModelReport {
    let mut failures = Vec::new();
    structural_scan(d, model, &mut failures);
    ModelReport { failures }
}

/// Full model validation: the structural checks plus the integral
/// identities. Every basis class of degree `2k` must satisfy the moment
/// identities `sum_z a_z H(z)^e / prod_w(z) = 0` for all `e` with
/// `k + e < n` (equivalently, its integrals against all shifted omega
/// classes vanish), and every pairwise basis product of total degree
/// below `2n` must land in the stored span and integrate to 0.
pub fn validate_model(d: &FixedPointData, model: &CohomologyModel) -> ModelReport {
    let mut failures = Vec::new();
    let checked = structural_scan(d, model, &mut failures);
    let n = d.n();

    for basis in &checked {
        let k = basis.degree / 2;
        for (index, c) in basis.classes.iter().enumerate() {
            for e in 0..n - k {
                let residual: Rational = d
                    .points()
                    .iter()
                    .zip(c.restrictions())
                    .map(|(p, a_z)| &(a_z * &p.moment.pow(e)) / &p.weight_product())
                    .sum();
                if !residual.is_zero() {
                    failures.push(ModelFailure::MomentIdentity {
                        degree: basis.degree,
                        index,
                        exponent: e,
                        residual,
                    });
                }
            }
        }
    }

    let spans: BTreeMap<usize, SpanBasis> = checked
        .iter()
        .map(|b| {
            let mut span = SpanBasis::new();
            for c in b.classes {
                span.insert(c.restrictions());
            }
            (b.degree, span)
        })
        .collect();

    for (i, a) in checked.iter().enumerate() {
        for b in &checked[i..] {
            let total = a.degree + b.degree;
            if total >= 2 * n {
                continue;
            }
            for (idx_a, ca) in a.classes.iter().enumerate() {
                for (idx_b, cb) in b.classes.iter().enumerate() {
                    if a.degree == b.degree && idx_b < idx_a {
                        continue;
                    }
                    let product = ca.multiply(cb).expect("checked shapes");
                    if let Some(span) = spans.get(&total) {
                        if !span.contains(product.restrictions()) {
                            failures.push(ModelFailure::ProductNotInSpan {
                                deg_a: a.degree,
                                idx_a,
                                deg_b: b.degree,
                                idx_b,
                            });
                        }
                    }
                    let result = integrate(d, &product).expect("checked shapes");
                    if !result.scalar.is_zero() {
                        failures.push(ModelFailure::ProductIntegral {
                            deg_a: a.degree,
                            idx_a,
                            deg_b: b.degree,
                            idx_b,
                            n,
                            residual: result.scalar,
                        });
                    }
                }
            }
        }
    }

    ModelReport { failures }
}
