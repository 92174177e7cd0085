//! Command implementations behind the `hamloc` binary.
//!
//! Each command returns a [`RunReport`] carrying a text rendering, a JSON
//! rendering, and the exit code. Exit code 0 means every requested check
//! passed (or the verdict was profile-unimodal / mechanism-verified),
//! 1 means a verified failure or inconsistency, and 2 (reported through
//! [`CliError`]) means unusable input. All output is deterministic:
//! rationals render canonically and JSON keys keep a fixed order.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::certify::{certify, verify_mechanism, Certificate, CertifyError};
use crate::eqcalc::{integrate, validate_model, vanishing_class, CohomologyModel, EquivariantClass};
use crate::exactalg::Rational;
use crate::fixdata::FixedPointData;
use crate::generators::{corrupt, gen_cpn, gen_product, Mutation};

/// Problems that make a run unusable: unreadable files, malformed JSON,
/// inputs that violate the construction invariants, or refused cases.
/// These all map to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Input(String),
}

/// Output format selector; text is the default everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// The outcome of one command: both renderings plus the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunReport {
    pub text: String,
    pub json: Value,
    pub exit_code: i32,
}

impl RunReport {
    /// The rendering for the chosen format, without a trailing newline.
    pub fn rendered(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => {
                serde_json::to_string_pretty(&self.json).expect("reports serialize")
            }
        }
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Read { path: path.display().to_string(), message: e.to_string() })
}

fn load_data(path: &Path) -> Result<FixedPointData, CliError> {
    FixedPointData::from_json_str(&read_file(path)?)
        .map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

fn load_model(path: &Path, d: &FixedPointData) -> Result<CohomologyModel, CliError> {
    CohomologyModel::from_json_str(d, &read_file(path)?)
        .map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

fn load_class(path: &Path, d: &FixedPointData) -> Result<EquivariantClass, CliError> {
    EquivariantClass::from_json_str(d, &read_file(path)?)
        .map_err(|e| CliError::Parse { path: path.display().to_string(), message: e.to_string() })
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Write { path: path.to_string(), message: e.to_string() })
}

/// Runs every validator the input supports: the localization identities,
/// Poincare duality of the Betti profile, the index-increasing check, and
/// full model validation when a model file is given.
pub fn cmd_validate(data_path: &Path, model_path: Option<&Path>) -> Result<RunReport, CliError> {
    let d = load_data(data_path)?;
    let mut failures: Vec<String> = Vec::new();

    let localization = d.localization_consistency();
    for (e, residual) in &localization.failed_moments {
        failures.push(format!("moment identity at e = {e}: residual {residual}, expected 0"));
    }
    if !localization.volume.is_positive() {
        failures.push(format!(
            "volume sum {} is not positive",
            localization.volume
        ));
    }
    let localization_verdict = verdict_word(localization.pass());

    let profile = d.betti_profile();
    let duality_pass = match profile.duality_violation() {
        None => true,
        Some(k) => {
            failures.push(format!("Poincare duality fails at k = {k}: b_{{2k}} != b_{{2(n-k)}}"));
            false
        }
    };

    let index_pass = match d.index_violation() {
        None => true,
        Some((lower, upper)) => {
            failures.push(format!(
                "not index-increasing: H({lower}) >= H({upper}) although ind({lower}) < ind({upper})"
            ));
            false
        }
    };

    let model_verdict = match model_path {
        None => "skipped".to_string(),
        Some(path) => {
            let model = load_model(path, &d)?;
            let report = validate_model(&d, &model);
            for failure in &report.failures {
                failures.push(failure.to_string());
            }
            verdict_word(report.pass()).to_string()
        }
    };

    let pass = failures.is_empty();
    let mut text = String::new();
    let _ = writeln!(text, "dataset: {} (n = {}, {} fixed points)", data_path.display(), d.n(), d.m());
    let _ = writeln!(text, "localization: {localization_verdict}");
    let _ = writeln!(text, "duality: {}", verdict_word(duality_pass));
    let _ = writeln!(text, "index-increasing: {}", verdict_word(index_pass));
    let _ = writeln!(text, "model: {model_verdict}");
    for failure in &failures {
        let _ = writeln!(text, "  {failure}");
    }
    let _ = write!(text, "verdict: {}", verdict_word(pass));

    let exit_code = i32::from(!pass);
    let json = json!({
        "command": "validate",
        "data": data_path.display().to_string(),
        "n": d.n(),
        "points": d.m(),
        "checks": {
            "localization": localization_verdict,
            "duality": verdict_word(duality_pass),
            "index_increasing": verdict_word(index_pass),
            "model": model_verdict,
        },
        "failures": failures,
        "exit_code": exit_code,
    });
    Ok(RunReport { text, json, exit_code })
}

/// Runs the unimodality procedure and emits the certificate: the JSON
/// rendering is the bare certificate document. With `mechanism` set, the
/// restriction maps are rank-checked at every admissible degree instead
/// of stopping at the profile scan.
pub fn cmd_certify(
    data_path: &Path,
    model_path: &Path,
    mechanism: bool,
) -> Result<RunReport, CliError> {
    let d = load_data(data_path)?;
    let model = load_model(model_path, &d)?;
    let certificate = if mechanism { verify_mechanism(&d, &model) } else { certify(&d, &model) }
        .map_err(|e: CertifyError| CliError::Input(e.to_string()))?;

    let mut text = String::new();
    let _ = writeln!(text, "verdict: {}", certificate.verdict());
    match &certificate {
        Certificate::ProfileUnimodal { profile, mode } => {
            let _ = writeln!(text, "profile: {:?}", profile.values());
            let _ = write!(text, "mode: {mode}");
        }
        Certificate::MechanismVerified { profile, checked } => {
            let _ = writeln!(text, "profile: {:?}", profile.values());
            let _ = write!(text, "checked k: {checked:?}");
        }
        Certificate::Inconsistent { k, partition, ledger, explanation, .. } => {
            let _ = writeln!(text, "k = {k}");
            let _ = writeln!(text, "separators: {}", join(&partition.separators));
            let _ = writeln!(text, "subtotals: {}", join(&ledger.subtotals));
            let _ = writeln!(text, "total: {} * u^{}", ledger.total, ledger.u_exponent);
            let _ = write!(text, "{explanation}");
        }
    }

    let exit_code = match &certificate {
        Certificate::Inconsistent { .. } => 1,
        _ => 0,
    };
    Ok(RunReport { text, json: certificate.to_json_value(&d), exit_code })
}

/// Prints the Betti profile.
pub fn cmd_betti(data_path: &Path) -> Result<RunReport, CliError> {
    let d = load_data(data_path)?;
    let profile = d.betti_profile();
    let text = format!("{:?}", profile.values());
    let json = json!({
        "command": "betti",
        "profile": profile.values(),
        "exit_code": 0,
    });
    Ok(RunReport { text, json, exit_code: 0 })
}

/// Integrates a class file against a dataset.
pub fn cmd_integrate(data_path: &Path, class_path: &Path) -> Result<RunReport, CliError> {
    let d = load_data(data_path)?;
    let class = load_class(class_path, &d)?;
    let result = integrate(&d, &class).map_err(|e| CliError::Input(e.to_string()))?;
    let text = result.to_string();
    let json = json!({
        "command": "integrate",
        "degree": class.degree(),
        "scalar": result.scalar,
        "u_exponent": result.u_exponent,
        "rendered": text,
        "exit_code": 0,
    });
    Ok(RunReport { text, json, exit_code: 0 })
}

/// Searches the model basis of the given degree for a class vanishing on
/// the named points; exit 1 reports that no such class exists.
pub fn cmd_find_class(
    data_path: &Path,
    model_path: &Path,
    degree: usize,
    vanish: &[String],
) -> Result<RunReport, CliError> {
    let d = load_data(data_path)?;
    let model = load_model(model_path, &d)?;
    if !degree.is_multiple_of(2) {
        return Err(CliError::Input(format!("degree {degree} is odd; classes have even degree")));
    }
    for id in vanish {
        if d.index_of(id).is_none() {
            return Err(CliError::Input(format!("unknown fixed point id {id}")));
        }
    }
    let found = vanishing_class(&d, &model, degree / 2, vanish)
        .map_err(|e| CliError::Input(e.to_string()))?;

    let (text, class_json, exit_code) = match &found {
        Some(class) => {
            let mut text = String::new();
            let _ = writeln!(text, "degree: {}", class.degree());
            let pairs: Vec<String> = d
                .points()
                .iter()
                .enumerate()
                .map(|(i, p)| format!("{} = {}", p.id, class.at(i)))
                .collect();
            let _ = write!(text, "restrictions: {}", pairs.join(", "));
            let value = class.to_json_value(&d).expect("found classes match their dataset");
            (text, value, 0)
        }
        None => (
            format!("no vanishing class of degree {degree} on the given points"),
            Value::Null,
            1,
        ),
    };
    let json = json!({
        "command": "find-class",
        "degree": degree,
        "vanish": vanish,
        "class": class_json,
        "exit_code": exit_code,
    });
    Ok(RunReport { text, json, exit_code })
}

/// A generation request, mirroring the `gen` subcommand flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenRecipe {
    Cpn { weights: Vec<i64>, with_model: bool, out: Option<String> },
    Product {
        left_data: String,
        left_model: String,
        right_data: String,
        right_model: String,
        scale: Rational,
        with_model: bool,
        out: Option<String>,
    },
    Corrupt { data: String, mutation: Mutation, out: Option<String> },
}

/// Builds a dataset (and optionally its model) and writes the JSON files:
/// `BASE.json`, plus `BASE.model.json` when a model is requested.
pub fn cmd_gen(recipe: &GenRecipe) -> Result<RunReport, CliError> {
    let (d, model, with_model, base) = match recipe {
        GenRecipe::Cpn { weights, with_model, out } => {
            let (d, model) = gen_cpn(weights).map_err(|e| CliError::Input(e.to_string()))?;
            let base = out.clone().unwrap_or_else(|| format!("cp{}", weights.len() - 1));
            (d, Some(model), *with_model, base)
        }
        GenRecipe::Product {
            left_data,
            left_model,
            right_data,
            right_model,
            scale,
            with_model,
            out,
        } => {
            let d1 = load_data(Path::new(left_data))?;
            let m1 = load_model(Path::new(left_model), &d1)?;
            let d2 = load_data(Path::new(right_data))?;
            let m2 = load_model(Path::new(right_model), &d2)?;
            let (d, model) =
                gen_product(&d1, &m1, &d2, &m2, scale).map_err(|e| CliError::Input(e.to_string()))?;
            let base = out.clone().unwrap_or_else(|| "product".to_string());
            (d, Some(model), *with_model, base)
        }
        GenRecipe::Corrupt { data, mutation, out } => {
            let d = load_data(Path::new(data))?;
            let corrupted = corrupt(&d, mutation).map_err(|e| CliError::Input(e.to_string()))?;
            let base = out.clone().unwrap_or_else(|| "corrupted".to_string());
            (corrupted, None, false, base)
        }
    };

    let mut written = Vec::new();
    let data_path = format!("{base}.json");
    write_file(&data_path, &d.to_json_string())?;
    written.push(data_path);
    if with_model {
        let model = model.expect("only recipes with models accept --with-model");
        let model_path = format!("{base}.model.json");
        let body = model.to_json_string(&d).map_err(|e| CliError::Input(e.to_string()))?;
        write_file(&model_path, &body)?;
        written.push(model_path);
    }

    let text = written.iter().map(|p| format!("wrote {p}")).collect::<Vec<_>>().join("\n");
    let json = json!({
        "command": "gen",
        "written": written,
        "exit_code": 0,
    });
    Ok(RunReport { text, json, exit_code: 0 })
}

fn verdict_word(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

fn join(values: &[Rational]) -> String {
    values.iter().map(Rational::to_string).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use tempfile::tempdir;

    use super::*;
    use crate::synthetic::canonical_n5;

    fn write(dir: &Path, name: &str, contents: &str) -> std::path::PathBuf {
        let path = dir.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn cp2_files(dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
        let (d, m) = gen_cpn(&[0, 1, 2]).unwrap();
        (
            write(dir, "cp2.json", &d.to_json_string()),
            write(dir, "cp2.model.json", &m.to_json_string(&d).unwrap()),
        )
    }

    #[test]
    fn validate_reports_pass_and_fail_verdicts() {
        let dir = tempdir().unwrap();
        let (data, model) = cp2_files(dir.path());
        let report = cmd_validate(&data, Some(&model)).unwrap();
        assert_eq!(report.exit_code, 0);
        assert!(report.text.contains("localization: pass"));
        assert!(report.text.ends_with("verdict: pass"));
        assert_eq!(report.json["checks"]["model"], json!("pass"));

        let (d, _) = gen_cpn(&[0, 1, 2]).unwrap();
        let bad = corrupt(&d, &Mutation::Weight { id: "e0".into(), slot: 1, value: 3 }).unwrap();
        let bad_path = write(dir.path(), "bad.json", &bad.to_json_string());
        let report = cmd_validate(&bad_path, None).unwrap();
        assert_eq!(report.exit_code, 1);
        assert!(report.text.contains("moment identity at e = 0: residual -1/6"));
        assert_eq!(report.json["checks"]["model"], json!("skipped"));
    }

    #[test]
    fn validate_rejects_malformed_files() {
        let dir = tempdir().unwrap();
        let path = write(dir.path(), "notjson.txt", "plainly not json");
        assert!(matches!(cmd_validate(&path, None), Err(CliError::Parse { .. })));
        let missing = dir.path().join("absent.json");
        assert!(matches!(cmd_validate(&missing, None), Err(CliError::Read { .. })));
    }

    #[test]
    fn certify_command_maps_verdicts_to_exit_codes() {
        let dir = tempdir().unwrap();
        let (data, model) = cp2_files(dir.path());
        let report = cmd_certify(&data, &model, false).unwrap();
        assert_eq!(report.exit_code, 0);
        assert!(report.text.starts_with("verdict: profile-unimodal"));
        assert_eq!(report.json["verdict"], json!("profile-unimodal"));

        let (d, m) = canonical_n5();
        let sdata = write(dir.path(), "synthetic.json", &d.to_json_string());
        let smodel = write(dir.path(), "synthetic.model.json", &m.to_json_string(&d).unwrap());
        let report = cmd_certify(&sdata, &smodel, false).unwrap();
        assert_eq!(report.exit_code, 1);
        assert_eq!(report.json["total"], json!("-45/16"));
        assert!(report.text.contains("total: -45/16 * u^-1"));

        let mech = cmd_certify(&sdata, &smodel, true).unwrap();
        assert_eq!(mech.exit_code, 1);
        let mech_cp2 = cmd_certify(&data, &model, true).unwrap();
        assert_eq!(mech_cp2.exit_code, 0);
        assert_eq!(mech_cp2.json["verdict"], json!("mechanism-verified"));
    }

    #[test]
    fn betti_and_integrate_render_the_documented_strings() {
        let dir = tempdir().unwrap();
        let (data, _) = cp2_files(dir.path());
        let report = cmd_betti(&data).unwrap();
        assert_eq!(report.text, "[1, 1, 1]");

        let (d, _) = gen_cpn(&[0, 1, 2]).unwrap();
        let alpha_sq = EquivariantClass::new(
            4,
            vec![Rational::new(1, 1), Rational::zero(), Rational::new(1, 1)],
        )
        .unwrap();
        let class_path =
            write(dir.path(), "alpha_sq.json", &alpha_sq.to_json_string(&d).unwrap());
        let report = cmd_integrate(&data, &class_path).unwrap();
        assert_eq!(report.text, "1 * u^0");
        assert_eq!(report.json["scalar"], json!(1));
        assert_eq!(report.json["u_exponent"], json!(0));
    }

    #[test]
    fn find_class_prints_the_kernel_class() {
        let dir = tempdir().unwrap();
        let (data, model) = cp2_files(dir.path());
        let report = cmd_find_class(&data, &model, 2, &["e1".to_string()]).unwrap();
        assert_eq!(report.exit_code, 0);
        assert_eq!(report.text, "degree: 2\nrestrictions: e0 = 1, e1 = 0, e2 = -1");
        assert_eq!(report.json["class"]["restrictions"]["e2"], json!(-1));

        let none = cmd_find_class(&data, &model, 2, &["e0".into(), "e1".into()]).unwrap();
        assert_eq!(none.exit_code, 1);
        assert_eq!(none.json["class"], Value::Null);

        assert!(cmd_find_class(&data, &model, 2, &["zz".into()]).is_err());
        assert!(cmd_find_class(&data, &model, 3, &[]).is_err());
    }

    #[test]
    fn gen_writes_the_requested_files() {
        let dir = tempdir().unwrap();
        let base = dir.path().join("cp2").display().to_string();
        let report = cmd_gen(&GenRecipe::Cpn {
            weights: vec![0, 1, 2],
            with_model: true,
            out: Some(base.clone()),
        })
        .unwrap();
        assert_eq!(report.exit_code, 0);
        let data_path = format!("{base}.json");
        let model_path = format!("{base}.model.json");
        assert_eq!(report.json["written"], json!([data_path.clone(), model_path.clone()]));

        let d = FixedPointData::from_json_str(&fs::read_to_string(&data_path).unwrap()).unwrap();
        assert_eq!(d.n(), 2);
        let (expected, _) = gen_cpn(&[0, 1, 2]).unwrap();
        assert_eq!(d, expected);

        let prod_base = dir.path().join("prod").display().to_string();
        let report = cmd_gen(&GenRecipe::Product {
            left_data: data_path.clone(),
            left_model: model_path.clone(),
            right_data: data_path.clone(),
            right_model: model_path.clone(),
            scale: Rational::one(),
            with_model: true,
            out: Some(prod_base.clone()),
        })
        .unwrap();
        assert_eq!(report.exit_code, 0);
        let prod =
            FixedPointData::from_json_str(&fs::read_to_string(format!("{prod_base}.json")).unwrap())
                .unwrap();
        assert_eq!(prod.m(), 9);

        let bad_base = dir.path().join("bad").display().to_string();
        let report = cmd_gen(&GenRecipe::Corrupt {
            data: data_path.clone(),
            mutation: Mutation::Weight { id: "e0".into(), slot: 1, value: 3 },
            out: Some(bad_base.clone()),
        })
        .unwrap();
        assert_eq!(report.text, format!("wrote {bad_base}.json"));

        assert!(cmd_gen(&GenRecipe::Cpn {
            weights: vec![0, 0, 1],
            with_model: false,
            out: Some(dir.path().join("x").display().to_string()),
        })
        .is_err());
    }
}
