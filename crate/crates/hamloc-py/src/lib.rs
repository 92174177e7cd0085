//! Python bindings for the hamloc core: fixed point datasets, cohomology
//! models, the exact localization calculus, and the certification
//! pipeline, exposed as the `hamloc_py` extension module.
//!
//! Exact rationals cross the boundary as strings (`"-45/16"`), never as
//! floats; structured verdicts cross as the canonical JSON documents the
//! CLI emits, so Python callers can `json.loads` them.

use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hamloc::eqcalc::{CohomologyModel, EquivariantClass};
use hamloc::exactalg::Rational;
use hamloc::fixdata::FixedPointData;
use hamloc::generators::Mutation;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_rational(s: &str) -> PyResult<Rational> {
    Rational::from_str(s).map_err(value_error)
}

/// A finite fixed point dataset: the half-dimension `n` and the list of
/// fixed points with their isotropy weights and moment values.
#[pyclass(frozen, module = "hamloc_py")]
struct Dataset {
    inner: FixedPointData,
}

impl Dataset {
    fn index(&self, id: &str) -> PyResult<usize> {
        self.inner.index_of(id).ok_or_else(|| value_error(format!("unknown point id {id}")))
    }
}

#[pymethods]
impl Dataset {
    /// Parses the canonical JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: FixedPointData::from_json_str(text).map_err(value_error)? })
    }

    /// Renders the canonical JSON document.
    fn to_json(&self) -> String {
        self.inner.to_json_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn point_count(&self) -> usize {
        self.inner.m()
    }

    /// Point identifiers in stored order.
    fn ids(&self) -> Vec<String> {
        self.inner.points().iter().map(|p| p.id.clone()).collect()
    }

    fn weights(&self, id: &str) -> PyResult<Vec<i64>> {
        Ok(self.inner.point(self.index(id)?).weights.clone())
    }

    /// Moment value at one point, as an exact rational string.
    fn moment(&self, id: &str) -> PyResult<String> {
        Ok(self.inner.point(self.index(id)?).moment.to_string())
    }

    fn morse_index(&self, id: &str) -> PyResult<usize> {
        Ok(self.inner.point(self.index(id)?).morse_index())
    }

    /// The even Betti profile `b_0, b_2, ..., b_{2n}` read off the Morse
    /// indices.
    fn betti(&self) -> Vec<usize> {
        self.inner.betti_profile().values().to_vec()
    }

    /// Index of the first peak when the profile is unimodal.
    fn unimodal_mode(&self) -> Option<usize> {
        self.inner.betti_profile().unimodal_mode()
    }

    /// Smallest `k` with `b_{2k} != b_{2(n-k)}`, if any.
    fn duality_violation(&self) -> Option<usize> {
        self.inner.betti_profile().duality_violation()
    }

    /// A witness pair `(lower, upper)` with `ind(lower) < ind(upper)` but
    /// `H(lower) >= H(upper)`, if any.
    fn index_violation(&self) -> Option<(String, String)> {
        self.inner.index_violation()
    }

    /// The localized symplectic volume, as an exact rational string.
    fn volume(&self) -> String {
        self.inner.localization_consistency().volume.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Dataset(n={}, points={})", self.inner.n(), self.inner.m())
    }
}

/// Stored bases for the even-degree pieces of the claimed equivariant
/// cohomology, each class recorded by its fixed point restrictions.
#[pyclass(frozen, module = "hamloc_py")]
struct Model {
    inner: CohomologyModel,
}

#[pymethods]
impl Model {
    /// Parses the canonical JSON document against the dataset.
    #[staticmethod]
    fn from_json(dataset: &Dataset, text: &str) -> PyResult<Self> {
        let inner = CohomologyModel::from_json_str(&dataset.inner, text).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Renders the canonical JSON document.
    fn to_json(&self, dataset: &Dataset) -> PyResult<String> {
        self.inner.to_json_string(&dataset.inner).map_err(value_error)
    }

    /// Degrees with a stored basis, ascending.
    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().collect()
    }

    /// Number of stored basis classes in one degree.
    fn dim(&self, degree: usize) -> Option<usize> {
        self.inner.basis(degree).map(|b| b.len())
    }

    /// Restriction vectors of the stored basis in one degree, as exact
    /// rational strings.
    fn basis(&self, degree: usize) -> Option<Vec<Vec<String>>> {
        self.inner.basis(degree).map(|classes| {
            classes
                .iter()
                .map(|c| c.restrictions().iter().map(|r| r.to_string()).collect())
                .collect()
        })
    }

    fn __repr__(&self) -> String {
        let dims: Vec<String> = self
            .inner
            .degrees()
            .map(|deg| format!("{deg}: {}", self.inner.basis(deg).unwrap().len()))
            .collect();
        format!("Model({{{}}})", dims.join(", "))
    }
}

/// CP^n dataset and model from `n + 1` distinct integer weights.
#[pyfunction]
fn gen_cpn(weights: Vec<i64>) -> PyResult<(Dataset, Model)> {
    let (d, m) = hamloc::generators::gen_cpn(&weights).map_err(value_error)?;
    Ok((Dataset { inner: d }, Model { inner: m }))
}

/// Product dataset and model, with the right factor's moment map scaled
/// by the rational `scale`.
#[pyfunction]
#[pyo3(signature = (left, left_model, right, right_model, scale = "1"))]
fn gen_product(
    left: &Dataset,
    left_model: &Model,
    right: &Dataset,
    right_model: &Model,
    scale: &str,
) -> PyResult<(Dataset, Model)> {
    let scale = parse_rational(scale)?;
    let (d, m) = hamloc::generators::gen_product(
        &left.inner,
        &left_model.inner,
        &right.inner,
        &right_model.inner,
        &scale,
    )
    .map_err(value_error)?;
    Ok((Dataset { inner: d }, Model { inner: m }))
}

/// Copy of the dataset with one weight slot replaced.
#[pyfunction]
fn corrupt_weight(dataset: &Dataset, id: &str, slot: usize, value: i64) -> PyResult<Dataset> {
    let mutation = Mutation::Weight { id: id.to_string(), slot, value };
    let inner = hamloc::generators::corrupt(&dataset.inner, &mutation).map_err(value_error)?;
    Ok(Dataset { inner })
}

/// Copy of the dataset with one moment value replaced.
#[pyfunction]
fn corrupt_moment(dataset: &Dataset, id: &str, value: &str) -> PyResult<Dataset> {
    let mutation = Mutation::Moment { id: id.to_string(), value: parse_rational(value)? };
    let inner = hamloc::generators::corrupt(&dataset.inner, &mutation).map_err(value_error)?;
    Ok(Dataset { inner })
}

/// Every failed consistency check, one message per failure; an empty
/// list means the dataset (and model, when given) passes.
#[pyfunction]
#[pyo3(signature = (dataset, model = None))]
fn validate(dataset: &Dataset, model: Option<&Model>) -> Vec<String> {
    let d = &dataset.inner;
    let mut failures = Vec::new();
    let report = d.localization_consistency();
    for (e, residual) in &report.failed_moments {
        failures.push(format!("moment identity at e = {e}: residual {residual}, expected 0"));
    }
    if !report.volume.is_positive() {
        failures.push(format!("volume sum {} is not positive", report.volume));
    }
    if let Some(k) = d.betti_profile().duality_violation() {
        failures.push(format!("Poincare duality fails at k = {k}: b_{{2k}} != b_{{2(n-k)}}"));
    }
    if let Some((lower, upper)) = d.index_violation() {
        failures.push(format!(
            "not index-increasing: H({lower}) >= H({upper}) although ind({lower}) < ind({upper})"
        ));
    }
    if let Some(model) = model {
        for failure in hamloc::eqcalc::validate_model(d, &model.inner).failures {
            failures.push(failure.to_string());
        }
    }
    failures
}

/// Runs the certification pipeline and returns the certificate JSON
/// document; raises `ValueError` when the input is refused.
#[pyfunction]
fn certify(dataset: &Dataset, model: &Model) -> PyResult<String> {
    let cert = hamloc::certify::certify(&dataset.inner, &model.inner).map_err(value_error)?;
    Ok(cert.to_json_string(&dataset.inner))
}

/// Runs the sign-certificate construction at every admissible degree and
/// returns the certificate JSON document.
#[pyfunction]
fn verify_mechanism(dataset: &Dataset, model: &Model) -> PyResult<String> {
    let cert =
        hamloc::certify::verify_mechanism(&dataset.inner, &model.inner).map_err(value_error)?;
    Ok(cert.to_json_string(&dataset.inner))
}

/// Localization integral of the class with the given exact restriction
/// strings, returned as `(scalar, u_exponent, rendered)`.
#[pyfunction]
fn integrate(
    dataset: &Dataset,
    degree: usize,
    restrictions: Vec<String>,
) -> PyResult<(String, i64, String)> {
    let values = restrictions.iter().map(|s| parse_rational(s)).collect::<PyResult<Vec<_>>>()?;
    let class = EquivariantClass::new(degree, values).map_err(value_error)?;
    let result = hamloc::eqcalc::integrate(&dataset.inner, &class).map_err(value_error)?;
    Ok((result.scalar.to_string(), result.u_exponent, result.to_string()))
}

/// A nonzero class of the given even degree vanishing on the named
/// points, as exact restriction strings, or `None` when the restriction
/// map is injective there.
#[pyfunction]
fn find_class(
    dataset: &Dataset,
    model: &Model,
    degree: usize,
    vanish: Vec<String>,
) -> PyResult<Option<Vec<String>>> {
    if !degree.is_multiple_of(2) {
        return Err(value_error(format!("degree {degree} is odd; classes live in even degree")));
    }
    for id in &vanish {
        dataset.index(id)?;
    }
    let found = hamloc::eqcalc::vanishing_class(&dataset.inner, &model.inner, degree / 2, &vanish)
        .map_err(value_error)?;
    Ok(found.map(|c| c.restrictions().iter().map(|r| r.to_string()).collect()))
}

/// The shipped width-5 synthetic fixture and its claimed model.
#[pyfunction]
fn synthetic_n5() -> (Dataset, Model) {
    let (d, m) = hamloc::synthetic::canonical_n5();
    (Dataset { inner: d }, Model { inner: m })
}

/// The width-4 spindle whose violation window is too narrow to certify.
#[pyfunction]
fn degenerate_n4() -> (Dataset, Model) {
    let (d, m) = hamloc::synthetic::degenerate_n4();
    (Dataset { inner: d }, Model { inner: m })
}

#[pymodule]
fn hamloc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Dataset>()?;
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(gen_cpn, m)?)?;
    m.add_function(wrap_pyfunction!(gen_product, m)?)?;
    m.add_function(wrap_pyfunction!(corrupt_weight, m)?)?;
    m.add_function(wrap_pyfunction!(corrupt_moment, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_mechanism, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    m.add_function(wrap_pyfunction!(find_class, m)?)?;
    m.add_function(wrap_pyfunction!(synthetic_n5, m)?)?;
    m.add_function(wrap_pyfunction!(degenerate_n4, m)?)?;
    Ok(())
}
