//! JSON shapes for scenarios, states, observables, strategies and reports.
//!
//! Complex matrices are `{"re": [[…]], "im": [[…]]}`; states carry `kind`
//! (`"pure"` or `"density"`) and `subsystem_dims`.

use netbell_core::certify::{CorrespondenceReport, CorrespondenceTrial, SosReport};
use netbell_core::classical::DeterministicStrategy;
use netbell_core::functional::{Assignment, Combiner, Functional, Kind};
use netbell_core::linalg::ComplexMatrix;
use netbell_core::optimize::{OptimizationResult, VectorModel};
use netbell_core::states::{Observable, QuantumState, StateData};
use netbell_core::C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&ComplexMatrix> for MatrixJson {
    fn from(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| {
            (0..m.rows())
                .map(|i| (0..m.cols()).map(|j| f(&m.get(i, j))).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorJson {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateJson {
    Pure {
        subsystem_dims: Vec<usize>,
        amplitudes: VectorJson,
    },
    Density {
        subsystem_dims: Vec<usize>,
        matrix: MatrixJson,
    },
}

impl From<&QuantumState> for StateJson {
    fn from(s: &QuantumState) -> Self {
        let subsystem_dims = s.subsystem_dims().to_vec();
        match s.data() {
            StateData::Pure(v) => StateJson::Pure {
                subsystem_dims,
                amplitudes: VectorJson {
                    re: v.iter().map(|z| z.re).collect(),
                    im: v.iter().map(|z| z.im).collect(),
                },
            },
            StateData::Density(m) => StateJson::Density {
                subsystem_dims,
                matrix: m.into(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservablesJson {
    pub edge: Vec<Vec<MatrixJson>>,
    pub central: Vec<MatrixJson>,
}

impl From<&Assignment> for ObservablesJson {
    fn from(a: &Assignment) -> Self {
        Self {
            edge: a.edge.iter().map(|p| p.iter().map(|o| o.matrix().into()).collect()).collect(),
            central: a.central.iter().map(|o| o.matrix().into()).collect(),
        }
    }
}

/// State plus observables; the input format of `certify --settings`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SettingsJson {
    pub state: StateJson,
    pub observables: ObservablesJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub signs: Vec<Vec<i8>>,
    pub central_input: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub kind: String,
    pub m: usize,
    pub n: usize,
    /// `"linear"` or `"root_sum"` (root order `n`).
    pub combiner: String,
    pub terms: Vec<TermJson>,
}

impl From<&Functional> for FunctionalJson {
    fn from(f: &Functional) -> Self {
        Self {
            kind: f.kind.name().to_string(),
            m: f.m,
            n: f.n,
            combiner: match f.combiner {
                Combiner::Linear => "linear".to_string(),
                Combiner::RootSum(_) => "root_sum".to_string(),
            },
            terms: f
                .terms
                .iter()
                .map(|t| TermJson {
                    signs: t.coefficients.clone(),
                    central_input: t.central_input,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyJson {
    pub edge_responses: Vec<Vec<i8>>,
    pub central_responses: Vec<i8>,
}

impl From<&DeterministicStrategy> for StrategyJson {
    fn from(s: &DeterministicStrategy) -> Self {
        Self {
            edge_responses: s.edge_responses.clone(),
            central_responses: s.central_responses.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationJson {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restart: usize,
    pub correlators: Vec<f64>,
    pub history: Vec<f64>,
    pub settings: SettingsJson,
}

impl From<&OptimizationResult> for OptimizationJson {
    fn from(r: &OptimizationResult) -> Self {
        Self {
            value: r.value,
            iterations: r.iterations,
            converged: r.converged,
            restart: r.restart,
            correlators: r.correlators.clone(),
            history: r.history.clone(),
            settings: SettingsJson {
                state: (&r.state).into(),
                observables: (&r.observables).into(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorModelJson {
    pub ambient: usize,
    pub vectors: Vec<Vec<Vec<f64>>>,
}

impl From<&VectorModel> for VectorModelJson {
    fn from(v: &VectorModel) -> Self {
        Self {
            ambient: v.ambient,
            vectors: v.vectors.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SosJson {
    pub kind: String,
    pub m: usize,
    pub n: usize,
    pub omegas: Vec<f64>,
    pub party_omegas: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub weights: Vec<f64>,
    pub signs: Vec<i8>,
    pub correlators: Vec<f64>,
    pub value: f64,
    pub omega_bound: f64,
    pub gap: f64,
    pub weighted_residuals: f64,
    pub gamma_expectation: Option<f64>,
    pub gamma_min_eig: Option<f64>,
    pub passed: bool,
}

impl From<&SosReport> for SosJson {
    fn from(r: &SosReport) -> Self {
        Self {
            kind: r.kind.name().to_string(),
            m: r.m,
            n: r.n,
            omegas: r.omegas.clone(),
            party_omegas: r.party_omegas.clone(),
            residuals: r.residuals.clone(),
            weights: r.weights.clone(),
            signs: r.signs.clone(),
            correlators: r.correlators.clone(),
            value: r.value,
            omega_bound: r.omega_bound,
            gap: r.gap,
            weighted_residuals: r.weighted_residuals,
            gamma_expectation: r.gamma_expectation,
            gamma_min_eig: r.gamma_min_eig,
            passed: r.passes(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialJson {
    pub seed: u64,
    pub ranks: Vec<usize>,
    pub edge_maxima: Vec<f64>,
    pub network_value: f64,
    pub bound: f64,
    pub margin: f64,
    pub satisfied: bool,
    pub all_edges_violate: bool,
    pub network_violates: bool,
}

impl From<&CorrespondenceTrial> for TrialJson {
    fn from(t: &CorrespondenceTrial) -> Self {
        Self {
            seed: t.seed,
            ranks: t.ranks.clone(),
            edge_maxima: t.edge_maxima.clone(),
            network_value: t.network_value,
            bound: t.bound,
            margin: t.margin,
            satisfied: t.satisfied,
            all_edges_violate: t.all_edges_violate,
            network_violates: t.network_violates,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrespondenceJson {
    pub family: String,
    pub trials: usize,
    pub seesaw_restarts: usize,
    pub violations: usize,
    pub implication_checked: usize,
    pub implication_failures: usize,
    pub max_network_value: f64,
    pub min_margin: f64,
    pub rows: Vec<TrialJson>,
}

impl From<&CorrespondenceReport> for CorrespondenceJson {
    fn from(r: &CorrespondenceReport) -> Self {
        Self {
            family: r.family.name().to_string(),
            trials: r.trials.len(),
            seesaw_restarts: r.settings.restarts,
            violations: r.violations,
            implication_checked: r.implication_checked,
            implication_failures: r.implication_failures,
            max_network_value: r.trials.iter().map(|t| t.network_value).fold(f64::NEG_INFINITY, f64::max),
            min_margin: r.trials.iter().map(|t| t.margin).fold(f64::INFINITY, f64::min),
            rows: r.trials.iter().map(TrialJson::from).collect(),
        }
    }
}

/// One CLI invocation's result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub scenario: FunctionalJson,
    pub seed: Option<u64>,
    pub value: f64,
    pub classical_bound: f64,
    pub quantum_bound: f64,
    pub artifacts: Option<Value>,
    pub note: Option<String>,
    pub wall_time_ms: u64,
    pub version: String,
}

impl RunRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }
}

/// A settings file problem, located by a dotted field path.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid field `{}`: {}", self.path, self.message)
    }
}

impl std::error::Error for FieldError {}

fn err(path: &str, message: impl Into<String>) -> FieldError {
    FieldError {
        path: path.to_string(),
        message: message.into(),
    }
}

fn field<'v>(v: &'v Value, path: &str, key: &str) -> Result<(&'v Value, String), FieldError> {
    let obj = v.as_object().ok_or_else(|| err(path, "expected an object"))?;
    let sub = if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    };
    obj.get(key).map(|x| (x, sub.clone())).ok_or_else(|| err(&sub, "missing"))
}

fn array<'v>(v: &'v Value, path: &str) -> Result<&'v Vec<Value>, FieldError> {
    v.as_array().ok_or_else(|| err(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64, FieldError> {
    v.as_f64().ok_or_else(|| err(path, "expected a number"))
}

fn real_vector(v: &Value, path: &str) -> Result<Vec<f64>, FieldError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn real_rows(v: &Value, path: &str) -> Result<Vec<Vec<f64>>, FieldError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| real_vector(row, &format!("{path}[{i}]")))
        .collect()
}

fn parse_matrix(v: &Value, path: &str) -> Result<ComplexMatrix, FieldError> {
    let (re, re_path) = field(v, path, "re")?;
    let (im, im_path) = field(v, path, "im")?;
    let re = real_rows(re, &re_path)?;
    let im = real_rows(im, &im_path)?;
    let rows = re.len();
    if rows == 0 {
        return Err(err(&re_path, "matrix has no rows"));
    }
    for (i, r) in re.iter().enumerate() {
        if r.len() != rows {
            return Err(err(&format!("{re_path}[{i}]"), format!("expected {rows} entries")));
        }
    }
    if im.len() != rows {
        return Err(err(&im_path, format!("expected {rows} rows")));
    }
    for (i, r) in im.iter().enumerate() {
        if r.len() != rows {
            return Err(err(&format!("{im_path}[{i}]"), format!("expected {rows} entries")));
        }
    }
    let data = (0..rows * rows)
        .map(|k| C64::new(re[k / rows][k % rows], im[k / rows][k % rows]))
        .collect();
    Ok(ComplexMatrix::new(rows, rows, data).expect("square by construction"))
}

fn parse_observable(v: &Value, path: &str) -> Result<Observable, FieldError> {
    Observable::new(parse_matrix(v, path)?).map_err(|e| err(path, e.to_string()))
}

fn parse_dims(v: &Value, path: &str) -> Result<Vec<usize>, FieldError> {
    array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, d)| {
            d.as_u64()
                .filter(|d| *d >= 1)
                .map(|d| d as usize)
                .ok_or_else(|| err(&format!("{path}[{i}]"), "expected a positive integer"))
        })
        .collect()
}

pub fn parse_state(v: &Value, path: &str) -> Result<QuantumState, FieldError> {
    let (kind, kind_path) = field(v, path, "kind")?;
    let (dims, dims_path) = field(v, path, "subsystem_dims")?;
    let dims = parse_dims(dims, &dims_path)?;
    match kind.as_str() {
        Some("pure") => {
            let (amps, amps_path) = field(v, path, "amplitudes")?;
            let (re, re_path) = field(amps, &amps_path, "re")?;
            let (im, im_path) = field(amps, &amps_path, "im")?;
            let re = real_vector(re, &re_path)?;
            let im = real_vector(im, &im_path)?;
            if im.len() != re.len() {
                return Err(err(&im_path, format!("expected {} entries", re.len())));
            }
            let amps = re.iter().zip(&im).map(|(a, b)| C64::new(*a, *b)).collect();
            QuantumState::pure(amps, dims).map_err(|e| err(&amps_path, e.to_string()))
        }
        Some("density") => {
            let (m, m_path) = field(v, path, "matrix")?;
            let m = parse_matrix(m, &m_path)?;
            QuantumState::density(m, dims).map_err(|e| err(&m_path, e.to_string()))
        }
        _ => Err(err(&kind_path, "expected \"pure\" or \"density\"")),
    }
}

/// Parses a settings document, reporting the first invalid field.
pub fn parse_settings(v: &Value) -> Result<(QuantumState, Assignment), FieldError> {
    let (state, state_path) = field(v, "", "state")?;
    let state = parse_state(state, &state_path)?;
    let (obs, obs_path) = field(v, "", "observables")?;
    let (edge, edge_path) = field(obs, &obs_path, "edge")?;
    let edge = array(edge, &edge_path)?
        .iter()
        .enumerate()
        .map(|(k, party)| {
            let p = format!("{edge_path}[{k}]");
            array(party, &p)?
                .iter()
                .enumerate()
                .map(|(x, m)| parse_observable(m, &format!("{p}[{x}]")))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (central, central_path) = field(obs, &obs_path, "central")?;
    let central = array(central, &central_path)?
        .iter()
        .enumerate()
        .map(|(j, m)| parse_observable(m, &format!("{central_path}[{j}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((state, Assignment { edge, central }))
}

/// Checks a parsed settings document against a functional, naming the
/// offending field when shapes disagree.
pub fn check_settings(f: &Functional, state: &QuantumState, a: &Assignment) -> Result<(), FieldError> {
    if a.edge.len() < f.n {
        return Err(err("observables.edge", format!("expected {} edge parties", f.n)));
    }
    let dims = state.subsystem_dims();
    if dims.len() <= f.n {
        return Err(err("state.subsystem_dims", format!("expected more than {} subsystems", f.n)));
    }
    for (k, party) in a.edge.iter().take(f.n).enumerate() {
        if party.len() < f.m {
            return Err(err(&format!("observables.edge[{k}]"), format!("expected {} observables", f.m)));
        }
        for (x, o) in party.iter().enumerate() {
            if o.dim() != dims[k] {
                return Err(err(
                    &format!("observables.edge[{k}][{x}]"),
                    format!("expected dimension {}", dims[k]),
                ));
            }
        }
    }
    let central_dim: usize = dims[f.n..].iter().product();
    if a.central.len() < f.central_inputs() {
        return Err(err(
            "observables.central",
            format!("expected {} observables", f.central_inputs()),
        ));
    }
    for (j, o) in a.central.iter().enumerate() {
        if o.dim() != central_dim {
            return Err(err(
                &format!("observables.central[{j}]"),
                format!("expected dimension {central_dim}"),
            ));
        }
    }
    if !state.is_pure_vector() {
        return Err(err("state.kind", "certificates need a pure state"));
    }
    Ok(())
}

pub fn kind_from_name(name: &str) -> Option<Kind> {
    Kind::from_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use netbell_core::linalg::{sigma_x, sigma_z};
    use netbell_core::states::maximally_entangled;

    fn chsh_settings() -> Value {
        let a = Assignment {
            edge: vec![vec![
                Observable::new(sigma_z()).unwrap(),
                Observable::new(sigma_x()).unwrap(),
            ]],
            central: vec![Observable::new(sigma_z()).unwrap(), Observable::new(sigma_x()).unwrap()],
        };
        serde_json::to_value(SettingsJson {
            state: (&maximally_entangled(2).unwrap()).into(),
            observables: (&a).into(),
        })
        .unwrap()
    }

    #[test]
    fn settings_round_trip() {
        let v = chsh_settings();
        let (state, a) = parse_settings(&v).unwrap();
        assert_eq!(state, maximally_entangled(2).unwrap());
        assert_eq!(a.edge[0][1].matrix(), &sigma_x());
    }

    #[test]
    fn first_invalid_field_is_named() {
        let mut v = chsh_settings();
        v["observables"]["edge"][0][1]["re"][1][0] = Value::String("x".into());
        let e = parse_settings(&v).unwrap_err();
        assert_eq!(e.path, "observables.edge[0][1].re[1][0]");

        let mut v = chsh_settings();
        v["state"].as_object_mut().unwrap().remove("subsystem_dims");
        assert_eq!(parse_settings(&v).unwrap_err().path, "state.subsystem_dims");

        let mut v = chsh_settings();
        v["observables"]["central"][1]["re"][0][0] = Value::from(3.0);
        assert_eq!(parse_settings(&v).unwrap_err().path, "observables.central[1]");

        let mut v = chsh_settings();
        v["state"]["kind"] = Value::from("mixed");
        assert_eq!(parse_settings(&v).unwrap_err().path, "state.kind");
    }

    #[test]
    fn records_round_trip_exactly() {
        let f = Functional::build(Kind::Chained, 3, 1).unwrap();
        let rec = RunRecord {
            command: "bound".into(),
            scenario: (&f).into(),
            seed: Some(3),
            value: 0.1 + 0.2,
            classical_bound: 4.0,
            quantum_bound: f.quantum_bound(),
            artifacts: None,
            note: None,
            wall_time_ms: 1,
            version: "0".into(),
        };
        let text = rec.to_json();
        let back: RunRecord = serde_json::from_str(&text).unwrap();
        assert_eq!(back, rec);
        assert_eq!(back.to_json(), text);
    }
}
