//! The unimodality argument as an executable procedure.
//!
//! For index-increasing fixed point data whose Betti profile satisfies
//! Poincare duality, a violation b_{2k} > b_{2k+2} in the first half of
//! the profile contradicts the localization identities: a dimension count
//! yields a nonzero class alpha of degree 2k vanishing on a prescribed
//! target set, and the integral of beta = alpha^2 * prod_j omega_{r_j}
//! is then a sum of terms that all carry the sign (-1)^k, at least one of
//! them nonzero, even though deg beta = 2n-2 < 2n forces the integral to
//! vanish. This module builds the target, the index partition, the
//! separating values r_j, and the signed ledger, and packages the outcome
//! as a [`Certificate`].

use serde_json::{json, Value};
use thiserror::Error;

use crate::eqcalc::{
    integrate, omega_class, validate_model_structure, vanishing_class, CohomologyModel, EqError,
    EquivariantClass, FailureList,
};
use crate::exactalg::Rational;
use crate::fixdata::{BettiProfile, FixedPointData};

/// Everything that can stop a certification run.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("k = {k} is out of range: need 0 <= 2k < n = {n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("the partition at k = {k} is degenerate: n - 2k = {width} < 3")]
    DegeneratePartition { k: usize, width: usize },
    #[error("not index-increasing: H({lower}) >= H({upper}) although ind({lower}) < ind({upper})")]
    NotIndexIncreasing { lower: String, upper: String },
    #[error("Poincare duality fails: b_{{2k}} differs from b_{{2(n-k)}} at k = {k}")]
    DualityViolation { k: usize },
    #[error(
        "vanishing target at k = {k} has {found} points, \
         expected b_0 + ... + b_{{2k-2}} + b_{{2k+2}} = {expected}"
    )]
    TargetCardinality { k: usize, expected: usize, found: usize },
    #[error("alpha has degree {found}, expected {expected}")]
    AlphaDegree { expected: usize, found: usize },
    #[error("alpha does not vanish on the target: restriction at {id} is {value}")]
    AlphaNotVanishing { id: String, value: Rational },
    #[error("partition has {found} groups, expected n - 2k = {expected}")]
    GroupCount { expected: usize, found: usize },
    #[error("partition has {found} separators, expected {expected}")]
    SeparatorCount { expected: usize, found: usize },
    #[error("partition does not cover {id} exactly once")]
    PartitionCoverage { id: String },
    #[error("separator r_{boundary} does not strictly separate the moment value of {id}")]
    SeparatorPlacement { boundary: usize, id: String },
    #[error("unknown fixed point id {id}")]
    UnknownPoint { id: String },
    #[error("model rejected: {0}")]
    ModelRejected(FailureList),
    #[error(transparent)]
    Eq(#[from] EqError),
}

/// The point set a violating class must vanish on, split into its three
/// defining families: P1 collects the indices 2k-4i+2, P2 the indices
/// 2n-2k+4i (i >= 1 in both), and P3 the single level 2n-2k-2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingTarget {
    pub k: usize,
    pub p1: Vec<String>,
    pub p2: Vec<String>,
    pub p3: Vec<String>,
}

impl VanishingTarget {
    /// The union P1 ∪ P2 ∪ P3 in dataset order within each family.
    pub fn all(&self) -> Vec<String> {
        let mut all = self.p1.clone();
        all.extend(self.p2.iter().cloned());
        all.extend(self.p3.iter().cloned());
        all
    }
}

/// Builds the vanishing target for degree 2k and checks its cardinality
/// against the Betti profile: under duality the three families together
/// hold exactly b_0 + ... + b_{2k-2} + b_{2k+2} points, one less than
/// dim R_{2k} whenever b_{2k} > b_{2k+2}.
pub fn build_vanishing_target(
    d: &FixedPointData,
    k: usize,
) -> Result<VanishingTarget, CertifyError> {
    let n = d.n();
    if 2 * k >= n {
        return Err(CertifyError::KOutOfRange { k, n });
    }
    let mut p1 = Vec::new();
    let mut p2 = Vec::new();
    let mut p3 = Vec::new();
    for p in d.points() {
        let ind = p.morse_index();
        if ind < 2 * k && (2 * k - ind) % 4 == 2 {
            p1.push(p.id.clone());
        } else if ind == 2 * (n - k) - 2 {
            p3.push(p.id.clone());
        } else if ind > 2 * (n - k) && (ind - 2 * (n - k)).is_multiple_of(4) {
            p2.push(p.id.clone());
        }
    }
    let values = d.betti_profile().values().to_vec();
    let expected = values[..k].iter().sum::<usize>() + values[k + 1];
    let found = p1.len() + p2.len() + p3.len();
    if found != expected {
        return Err(CertifyError::TargetCardinality { k, expected, found });
    }
    Ok(VanishingTarget { k, p1, p2, p3 })
}

/// The ordered index partition I_1..I_{n-2k} together with the separating
/// values r_1..r_{n-2k-1}; `partition_by_index` fills the groups and
/// leaves the separators empty until [`choose_separators`] runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub groups: Vec<Vec<String>>,
    pub separators: Vec<Rational>,
}

/// Groups the fixed points by Morse index: I_1 holds levels 0..2k, the
/// middle groups hold one level 2k+2j-2 each, I_{n-2k-1} holds the three
/// levels 2n-2k-4, 2n-2k-2, 2n-2k, and I_{n-2k} holds everything above.
/// Empty groups are permitted. Windows with n - 2k < 3 are refused: there
/// the group boundaries would overlap and no reading of the construction
/// applies.
pub fn partition_by_index(d: &FixedPointData, k: usize) -> Result<Partition, CertifyError> {
    let n = d.n();
    if 2 * k >= n {
        return Err(CertifyError::KOutOfRange { k, n });
    }
    let g = n - 2 * k;
    if g < 3 {
        return Err(CertifyError::DegeneratePartition { k, width: g });
    }
    let mut groups = vec![Vec::new(); g];
    for p in d.points() {
        let h = p.morse_index() / 2;
        let j = if h <= k {
            0
        } else if h <= n - k - 3 {
            h - k
        } else if h <= n - k {
            g - 2
        } else {
            g - 1
        };
        groups[j].push(p.id.clone());
    }
    Ok(Partition { groups, separators: Vec::new() })
}

/// Picks r_j as the midpoint of the moment range gap between the
/// cumulative prefix I_1 ∪ ... ∪ I_j and the cumulative suffix, so empty
/// groups are harmless. A prefix or suffix with no points at all falls
/// back to one unit beyond the occupied side. Overlapping ranges mean the
/// moment map was not index-increasing; the offending pair is reported.
pub fn choose_separators(
    d: &FixedPointData,
    part: &Partition,
) -> Result<Vec<Rational>, CertifyError> {
    let g = part.groups.len();
    let mut separators = Vec::new();
    for j in 1..g {
        let left = moment_extreme(d, part.groups[..j].iter().flatten(), true)?;
        let right = moment_extreme(d, part.groups[j..].iter().flatten(), false)?;
        let r = match (&left, &right) {
            (Some((lid, lh)), Some((rid, rh))) => {
                if lh >= rh {
                    return Err(CertifyError::NotIndexIncreasing {
                        lower: lid.clone(),
                        upper: rid.clone(),
                    });
                }
                &(lh + rh) * &Rational::new(1, 2)
            }
            (Some((_, lh)), None) => lh + &Rational::one(),
            (None, Some((_, rh))) => rh - &Rational::one(),
            (None, None) => Rational::zero(),
        };
        separators.push(r);
    }
    Ok(separators)
}

/// The first-seen extreme moment value among `ids`: maximum when
/// `take_max`, minimum otherwise.
fn moment_extreme<'a>(
    d: &FixedPointData,
    ids: impl IntoIterator<Item = &'a String>,
    take_max: bool,
) -> Result<Option<(String, Rational)>, CertifyError> {
    let mut best: Option<(String, Rational)> = None;
    for id in ids {
        let i = d
            .index_of(id)
            .ok_or_else(|| CertifyError::UnknownPoint { id: id.clone() })?;
        let moment = &d.point(i).moment;
        let replace = match &best {
            None => true,
            Some((_, cur)) => {
                if take_max {
                    moment > cur
                } else {
                    moment < cur
                }
            }
        };
        if replace {
            best = Some((id.clone(), moment.clone()));
        }
    }
    Ok(best)
}

/// The per-group sums of beta's localization terms, their signs after
/// multiplying by (-1)^k, and the grand total, which is the scalar of
/// `integrate(beta)` at u_exponent -1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignLedger {
    pub subtotals: Vec<Rational>,
    pub normalized_signs: Vec<i8>,
    pub total: Rational,
    pub u_exponent: i64,
}

/// Computes beta = alpha^2 * prod_j omega_{r_j} and its localization sum,
/// grouped by the partition. Every precondition of the sign argument is
/// re-verified here: alpha has degree 2k and vanishes on the target for
/// this k, the groups cover each fixed point exactly once, and every
/// separator strictly separates its cumulative sides. A returned ledger
/// therefore always satisfies (-1)^k * S_j >= 0, with equality exactly
/// when alpha vanishes on all of I_j.
pub fn sign_ledger(
    d: &FixedPointData,
    k: usize,
    alpha: &EquivariantClass,
    part: &Partition,
) -> Result<SignLedger, CertifyError> {
    let n = d.n();
    if alpha.degree() != 2 * k {
        return Err(CertifyError::AlphaDegree { expected: 2 * k, found: alpha.degree() });
    }
    if alpha.restrictions().len() != d.m() {
        return Err(EqError::LengthMismatch { got: alpha.restrictions().len(), expected: d.m() }
            .into());
    }
    let target = build_vanishing_target(d, k)?;
    for id in target.all() {
        let i = d.index_of(&id).expect("target ids come from the dataset");
        let value = alpha.at(i);
        if !value.is_zero() {
            return Err(CertifyError::AlphaNotVanishing { id, value: value.clone() });
        }
    }
    let expected_groups = n - 2 * k;
    if part.groups.len() != expected_groups {
        return Err(CertifyError::GroupCount {
            expected: expected_groups,
            found: part.groups.len(),
        });
    }
    if part.separators.len() + 1 != part.groups.len() {
        return Err(CertifyError::SeparatorCount {
            expected: part.groups.len() - 1,
            found: part.separators.len(),
        });
    }
    let mut seen = vec![0usize; d.m()];
    for id in part.groups.iter().flatten() {
        let i = d
            .index_of(id)
            .ok_or_else(|| CertifyError::UnknownPoint { id: id.clone() })?;
        seen[i] += 1;
    }
    if let Some(i) = seen.iter().position(|&count| count != 1) {
        return Err(CertifyError::PartitionCoverage { id: d.point(i).id.clone() });
    }
    for (j, group) in part.groups.iter().enumerate() {
        for id in group {
            let moment = &d.point(d.index_of(id).expect("covered above")).moment;
            for (b, r) in part.separators.iter().enumerate() {
                let separated = if j <= b { moment < r } else { moment > r };
                if !separated {
                    return Err(CertifyError::SeparatorPlacement {
                        boundary: b + 1,
                        id: id.clone(),
                    });
                }
            }
        }
    }

    let mut beta = alpha.multiply(alpha)?;
    for r in &part.separators {
        beta = beta.multiply(&omega_class(d, r))?;
    }
    let mut subtotals = Vec::with_capacity(part.groups.len());
    for group in &part.groups {
        let mut subtotal = Rational::zero();
        for id in group {
            let i = d.index_of(id).expect("covered above");
            subtotal = &subtotal + &(beta.at(i) / &d.point(i).weight_product());
        }
        subtotals.push(subtotal);
    }
    let result = integrate(d, &beta)?;
    let sum: Rational = subtotals.iter().cloned().sum();
    assert_eq!(sum, result.scalar, "group subtotals must sum to the localization integral");
    let normalized_signs = subtotals
        .iter()
        .map(|s| if k.is_multiple_of(2) { s.signum() } else { -s.signum() })
        .collect();
    Ok(SignLedger {
        subtotals,
        normalized_signs,
        total: result.scalar,
        u_exponent: result.u_exponent,
    })
}

/// Outcome of a certification run.
///
/// `ProfileUnimodal` reports the profile and its mode when no first-half
/// violation exists. `MechanismVerified` additionally records that the
/// restriction map to the vanishing target is injective at every
/// admissible k (the linear-algebra form of the argument, checked by
/// [`verify_mechanism`]). `Inconsistent` carries the full refutation: the
/// violating k, the witness class alpha, the target it vanishes on, the
/// partition with separators, and the signed ledger whose nonzero total
/// contradicts the degree rule.
#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum Certificate {
    ProfileUnimodal {
        profile: BettiProfile,
        mode: usize,
    },
    MechanismVerified {
        profile: BettiProfile,
        checked: Vec<usize>,
    },
    Inconsistent {
        k: usize,
        profile: BettiProfile,
        alpha: EquivariantClass,
        target: VanishingTarget,
        partition: Partition,
        ledger: SignLedger,
        explanation: String,
    },
}

impl Certificate {
    pub fn verdict(&self) -> &'static str {
        match self {
            Certificate::ProfileUnimodal { .. } => "profile-unimodal",
            Certificate::MechanismVerified { .. } => "mechanism-verified",
            Certificate::Inconsistent { .. } => "inconsistent",
        }
    }

    /// Renders the certificate with a fixed key order; restriction maps
    /// inside follow dataset order, so equal inputs give equal bytes.
    pub fn to_json_value(&self, d: &FixedPointData) -> Value {
        match self {
            Certificate::ProfileUnimodal { profile, mode } => json!({
                "verdict": self.verdict(),
                "profile": profile.values(),
                "mode": mode,
            }),
            Certificate::MechanismVerified { profile, checked } => json!({
                "verdict": self.verdict(),
                "profile": profile.values(),
                "checked": checked,
            }),
            Certificate::Inconsistent {
                k,
                profile,
                alpha,
                target,
                partition,
                ledger,
                explanation,
            } => {
                let alpha = alpha
                    .to_json_value(d)
                    .expect("certificate classes match their dataset");
                json!({
                    "verdict": self.verdict(),
                    "k": k,
                    "profile": profile.values(),
                    "alpha": alpha,
                    "target": {
                        "p1": target.p1,
                        "p2": target.p2,
                        "p3": target.p3,
                    },
                    "groups": partition.groups,
                    "separators": partition.separators,
                    "subtotals": ledger.subtotals,
                    "normalized_signs": ledger.normalized_signs,
                    "total": ledger.total,
                    "u_exponent": ledger.u_exponent,
                    "explanation": explanation,
                })
            }
        }
    }

    pub fn to_json_string(&self, d: &FixedPointData) -> String {
        let mut out = serde_json::to_string_pretty(&self.to_json_value(d))
            .expect("certificate JSON serializes");
        out.push('\n');
        out
    }
}

/// Runs the full unimodality check. The data must be index-increasing and
/// Poincare dual, and the model must pass the structural validation (the
/// finer integral identities are deliberately not required: the procedure
/// exists to refute claimed models, so only their shape is trusted).
///
/// With no violation the verdict is profile-unimodal. Otherwise the
/// smallest violating k with n - 2k >= 3 yields an inconsistency
/// certificate; if every violating k is degenerate the run is refused.
pub fn certify(d: &FixedPointData, model: &CohomologyModel) -> Result<Certificate, CertifyError> {
    entry_checks(d, model)?;
    let profile = d.betti_profile();
    let violations = profile.violations();
    if violations.is_empty() {
        let mode = profile
            .unimodal_mode()
            .expect("dual profiles without first-half violations are unimodal");
        return Ok(Certificate::ProfileUnimodal { profile, mode });
    }
    let n = d.n();
    match violations.iter().copied().find(|k| n - 2 * k >= 3) {
        Some(k) => {
            let target = build_vanishing_target(d, k)?;
            let alpha = vanishing_class(d, model, k, &target.all())?
                .expect("a profile violation leaves the restriction map a kernel");
            inconsistency_certificate(d, k, alpha, profile)
        }
        None => {
            let k = violations[0];
            Err(CertifyError::DegeneratePartition { k, width: n - 2 * k })
        }
    }
}

/// Checks the argument's mechanism degree by degree: for every k with
/// 2k < n and n - 2k >= 3 the restriction map of R_{2k} to the vanishing
/// target must be injective. Any kernel element is turned into a full
/// inconsistency certificate; if all degrees pass and no degenerate
/// violation is left over, the verdict is mechanism-verified with the
/// list of checked k.
pub fn verify_mechanism(
    d: &FixedPointData,
    model: &CohomologyModel,
) -> Result<Certificate, CertifyError> {
    entry_checks(d, model)?;
    let profile = d.betti_profile();
    let n = d.n();
    let mut checked = Vec::new();
    if n >= 3 {
        for k in 0..=(n - 3) / 2 {
            let target = build_vanishing_target(d, k)?;
            match vanishing_class(d, model, k, &target.all())? {
                Some(alpha) => return inconsistency_certificate(d, k, alpha, profile),
                None => checked.push(k),
            }
        }
    }
    if let Some(&k) = profile.violations().first() {
        return Err(CertifyError::DegeneratePartition { k, width: n - 2 * k });
    }
    Ok(Certificate::MechanismVerified { profile, checked })
}

fn entry_checks(d: &FixedPointData, model: &CohomologyModel) -> Result<(), CertifyError> {
    if let Some((lower, upper)) = d.index_violation() {
        return Err(CertifyError::NotIndexIncreasing { lower, upper });
    }
    if let Some(k) = d.betti_profile().duality_violation() {
        return Err(CertifyError::DualityViolation { k });
    }
    let report = validate_model_structure(d, model);
    if !report.pass() {
        return Err(CertifyError::ModelRejected(FailureList(report.failures)));
    }
    Ok(())
}

/// Assembles partition, separators, and ledger for a found alpha, then
/// asserts the two facts the argument proves: the total is nonzero and
/// carries the sign (-1)^k.
fn inconsistency_certificate(
    d: &FixedPointData,
    k: usize,
    alpha: EquivariantClass,
    profile: BettiProfile,
) -> Result<Certificate, CertifyError> {
    let target = build_vanishing_target(d, k)?;
    let mut partition = partition_by_index(d, k)?;
    partition.separators = choose_separators(d, &partition)?;
    let ledger = sign_ledger(d, k, &alpha, &partition)?;
    assert!(!ledger.total.is_zero(), "a nonzero alpha forces a nonzero total");
    let want: i8 = if k.is_multiple_of(2) { 1 } else { -1 };
    assert_eq!(ledger.total.signum(), want, "the total must carry the sign (-1)^k");
    let n = d.n();
    let explanation = format!(
        "beta has degree {} = 2n-2 < 2n = {}, so its localization integral is forced to \
         vanish; it evaluates to {} * u^{} instead",
        2 * n - 2,
        2 * n,
        ledger.total,
        ledger.u_exponent,
    );
    Ok(Certificate::Inconsistent { k, profile, alpha, target, partition, ledger, explanation })
}
