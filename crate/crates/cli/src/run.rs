//! Turns a validated [`RunConfig`] into a [`Table`].
//!
//! Pure states on a tilted axis are rotated into the eigenframe of the
//! collective spin, where the observable is the diagonal `S_z`; the measures
//! are invariant under that joint rotation and the dense eigensystem of the
//! tilted observable is never formed.

use std::collections::BTreeMap;

use rayon::prelude::*;

use qmacro::asymmetry::{mode_profile_with, total_asymmetry, ModeSpectrum};
use qmacro::dynamics::{lindblad_evolve, LindbladSpec};
use qmacro::linalg::{CMatrix, HermitianMatrix};
use qmacro::macroscopicity::{
    make_weight, measure_from_profile, scaled_measure, skew_information, weighted_measure, NormKind, WeightFamily,
    WeightFunction,
};
use qmacro::oracles::{coherent_modes, Method, ModeNorm};
use qmacro::states::{
    bloch_angle, collective_spin, ghz, lowering_operator, product_state, spin_coherent, tensor_vector_into_frame,
    Observable, QuantumState, Representation, SpinAxis, SpinFrame, SpinRepr,
};

use crate::config::{weight_text, Channel, Command, MeasureKind, Repr, RunConfig, StateKind};
use crate::output::{Cell, Table};
use crate::parse::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numeric(#[from] qmacro::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numeric(_) | RunError::Io(_) => 1,
        }
    }
}

impl Repr {
    pub fn spin(self) -> SpinRepr {
        match self {
            Repr::Dicke => SpinRepr::Dicke,
            Repr::Full => SpinRepr::FullTensor,
        }
    }
}

impl StateKind {
    pub fn name(self) -> &'static str {
        match self {
            StateKind::Coherent => "coherent",
            StateKind::Ghz => "ghz",
            StateKind::Product => "product",
        }
    }
}

impl MeasureKind {
    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Tr => "tr",
            MeasureKind::Hs => "hs",
            MeasureKind::Sigma => "sigma",
            MeasureKind::Skew => "skew",
            MeasureKind::Total => "total",
        }
    }

    /// The library call behind a value of this measure.
    pub fn call(self) -> &'static str {
        match self {
            MeasureKind::Tr => "weighted_measure(&state, &obs, &make_weight(weight)?, NormKind::TraceNorm)?.value",
            MeasureKind::Hs => {
                "weighted_measure(&state, &obs, &make_weight(weight)?, NormKind::HilbertSchmidt)?.value"
            }
            MeasureKind::Sigma => "scaled_measure(&state, &obs, sigma)?.value",
            MeasureKind::Skew => "skew_information(&state, &obs)?",
            MeasureKind::Total => "total_asymmetry(&state, &obs)?",
        }
    }
}

impl Channel {
    pub fn name(self) -> &'static str {
        match self {
            Channel::Dephasing => "dephasing",
            Channel::Dissipation => "dissipation",
        }
    }
}

/// One state family at one polar angle (`None` for product states).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Series {
    pub kind: StateKind,
    pub theta: Option<f64>,
}

pub fn series(config: &RunConfig) -> Vec<Series> {
    let mut out = Vec::new();
    for &kind in &config.states {
        match kind {
            StateKind::Product => out.push(Series { kind, theta: None }),
            _ => out.extend(config.theta.iter().map(|&t| Series { kind, theta: Some(t) })),
        }
    }
    out
}

/// The state of a series at `n`, or `None` if the series has no member there
/// (product states exist only at `n = sites.len()`).
pub fn build_state(config: &RunConfig, s: Series, n: usize) -> qmacro::Result<Option<QuantumState>> {
    let repr = config.repr.spin();
    Ok(match (s.kind, s.theta) {
        (StateKind::Coherent, Some(t)) => Some(spin_coherent(n, t, config.phi, repr)?),
        (StateKind::Ghz, Some(t)) => Some(ghz(n, t, config.phi, repr)?),
        _ => match &config.sites {
            Some(sites) if sites.len() == n => Some(product_state(sites)?),
            _ => None,
        },
    })
}

fn z_observable(repr: Representation) -> qmacro::Result<Observable> {
    match repr {
        Representation::Dicke(n) => collective_spin(n, SpinAxis::Z, SpinRepr::Dicke),
        Representation::FullTensor(n) => collective_spin(n, SpinAxis::Z, SpinRepr::FullTensor),
        Representation::Generic(d) => Err(qmacro::Error::InvalidState(format!("no spin structure in dimension {d}"))),
    }
}

/// `R^dag rho R` for the tensor-power rotation `R`: rotate every column,
/// take the adjoint, rotate again.
fn tensor_density_into_frame(state: &QuantumState, n: usize, axis: SpinAxis) -> qmacro::Result<QuantumState> {
    let rotate = |m: &CMatrix| -> qmacro::Result<CMatrix> {
        let d = m.rows();
        let cols = (0..d).map(|j| tensor_vector_into_frame(&m.column(j), n, axis)).collect::<qmacro::Result<Vec<_>>>()?;
        Ok(CMatrix::from_fn(d, d, |i, j| cols[j][i]))
    };
    let half = rotate(state.matrix().matrix())?.adjoint();
    let full = rotate(&half)?;
    QuantumState::from_density_with_repr(HermitianMatrix::symmetrized(full), state.repr())
}

/// The state seen from the eigenframe of `S_axis`, where that observable is
/// the diagonal `S_z`. `frame` is the cached Dicke frame for this `N`, if
/// any.
pub fn frame_state(state: &QuantumState, axis: SpinAxis, frame: Option<&SpinFrame>) -> qmacro::Result<QuantumState> {
    if axis.is_z() {
        return Ok(state.clone());
    }
    match state.repr() {
        Representation::Dicke(n) => {
            let own;
            let f = match frame {
                Some(f) => f,
                None => {
                    own = SpinFrame::new(n)?;
                    &own
                }
            };
            match state.vector() {
                Some(v) => QuantumState::pure_normalized(f.vector_into_frame(v, axis), state.repr()),
                None => f.state_into_frame(state, axis),
            }
        }
        Representation::FullTensor(n) => match state.vector() {
            Some(v) => QuantumState::pure_normalized(tensor_vector_into_frame(v, n, axis)?, state.repr()),
            None => tensor_density_into_frame(state, n, axis),
        },
        Representation::Generic(d) => Err(qmacro::Error::InvalidState(format!("no spin structure in dimension {d}"))),
    }
}

/// [`frame_state`] paired with the diagonal `S_z`.
pub fn into_axis_frame(
    state: &QuantumState,
    axis: SpinAxis,
    frame: Option<&SpinFrame>,
) -> qmacro::Result<(QuantumState, Observable)> {
    Ok((frame_state(state, axis, frame)?, z_observable(state.repr())?))
}

pub fn measure_value(
    kind: MeasureKind,
    state: &QuantumState,
    obs: &Observable,
    weight: &WeightFunction,
    sigma: f64,
) -> qmacro::Result<f64> {
    Ok(match kind {
        MeasureKind::Tr => weighted_measure(state, obs, weight, NormKind::TraceNorm)?.value,
        MeasureKind::Hs => weighted_measure(state, obs, weight, NormKind::HilbertSchmidt)?.value,
        MeasureKind::Sigma => scaled_measure(state, obs, sigma)?.value,
        MeasureKind::Skew => skew_information(state, obs)?,
        MeasureKind::Total => total_asymmetry(state, obs)?,
    })
}

/// `S_z` and its mode spectrum, built once per representation and grid point.
struct ZCache(Vec<(Representation, Observable, ModeSpectrum)>);

impl ZCache {
    fn get(&mut self, repr: Representation) -> qmacro::Result<(&Observable, &ModeSpectrum)> {
        let i = match self.0.iter().position(|(r, _, _)| *r == repr) {
            Some(i) => i,
            None => {
                let obs = z_observable(repr)?;
                let spectrum = ModeSpectrum::new(&obs);
                self.0.push((repr, obs, spectrum));
                self.0.len() - 1
            }
        };
        let (_, o, s) = &self.0[i];
        Ok((o, s))
    }
}

/// Every measure in `kinds`, in order, sharing one mode profile. Equal to
/// [`measure_value`] term by term.
pub fn measure_values(
    kinds: &[MeasureKind],
    state: &QuantumState,
    obs: &Observable,
    spectrum: &ModeSpectrum,
    weight: &WeightFunction,
    scaled: &WeightFunction,
) -> qmacro::Result<Vec<f64>> {
    let needs_profile = kinds.iter().any(|k| matches!(k, MeasureKind::Tr | MeasureKind::Hs | MeasureKind::Sigma));
    let profile = if needs_profile { Some(mode_profile_with(state, obs, spectrum)?) } else { None };
    kinds
        .iter()
        .map(|&k| {
            Ok(match (k, &profile) {
                (MeasureKind::Tr, Some(p)) => measure_from_profile(p, weight, NormKind::TraceNorm)?.value,
                (MeasureKind::Hs, Some(p)) => measure_from_profile(p, weight, NormKind::HilbertSchmidt)?.value,
                (MeasureKind::Sigma, Some(p)) => measure_from_profile(p, scaled, NormKind::HilbertSchmidt)?.value,
                (MeasureKind::Skew, _) => skew_information(state, obs)?,
                (MeasureKind::Total, _) => total_asymmetry(state, obs)?,
                _ => unreachable!("profile computed for profile measures"),
            })
        })
        .collect()
}

/// Runs any command except `verify`.
pub fn execute(config: &RunConfig) -> Result<Table, RunError> {
    config.validate()?;
    let table = match config.command {
        Command::Measure | Command::SweepN | Command::SweepAxis => sweep(config)?,
        Command::Modes => modes(config)?,
        Command::Evolve => evolve(config)?,
        Command::Verify => {
            return Err(ConfigError::new("command", "verify does not produce a table").into());
        }
    };
    Ok(table)
}

/// Grid points `(n, axis)` in emission order: `n`-major except for
/// `sweep-axis`, which is axis-major.
fn grid_points(config: &RunConfig) -> Vec<(usize, SpinAxis)> {
    let axes: Vec<SpinAxis> = config
        .axis_theta
        .iter()
        .flat_map(|&t| config.axis_phi.iter().map(move |&p| SpinAxis::new(t, p)))
        .collect();
    if config.command == Command::SweepAxis {
        axes.iter().flat_map(|&a| config.n.iter().map(move |&n| (n, a))).collect()
    } else {
        config.n.iter().flat_map(|&n| axes.iter().map(move |&a| (n, a))).collect()
    }
}

/// Dicke frames for every `n` that needs one, built in parallel.
fn frames(config: &RunConfig, points: &[(usize, SpinAxis)]) -> qmacro::Result<BTreeMap<usize, SpinFrame>> {
    if config.repr != Repr::Dicke {
        return Ok(BTreeMap::new());
    }
    let mut ns: Vec<usize> = points.iter().filter(|(_, a)| !a.is_z()).map(|&(n, _)| n).collect();
    ns.sort_unstable();
    ns.dedup();
    let built: qmacro::Result<Vec<(usize, SpinFrame)>> =
        ns.into_par_iter().map(|n| SpinFrame::new(n).map(|f| (n, f))).collect();
    Ok(built?.into_iter().collect())
}

fn angle(x: Option<f64>) -> Cell {
    x.map(Cell::Num).unwrap_or(Cell::Empty)
}

fn sweep(config: &RunConfig) -> Result<Table, RunError> {
    let weight = config.weight_function()?;
    let all = series(config);
    let points = grid_points(config);
    let frames = frames(config, &points)?;
    let axis_major = config.command == Command::SweepAxis;
    let mut table = if axis_major {
        Table::new(&["axis_theta", "axis_phi", "n", "state", "theta", "phi", "measure", "weight", "sigma", "value"])
    } else {
        Table::new(&["n", "axis_theta", "axis_phi", "state", "theta", "phi", "measure", "weight", "sigma", "value"])
    };
    table.key_columns = 3;
    table.series_columns = vec![3, 4, 6];
    let blocks: Result<Vec<Vec<Vec<Cell>>>, RunError> = points
        .par_iter()
        .map(|&(n, axis)| {
            let sigma = config.sigma.value(n);
            let scaled = make_weight(WeightFamily::Scaled(sigma))?;
            let mut cache = ZCache(Vec::new());
            let mut rows = Vec::new();
            for &s in &all {
                let Some(state) = build_state(config, s, n)? else { continue };
                let state = frame_state(&state, axis, frames.get(&n))?;
                let (obs, spectrum) = cache.get(state.repr())?;
                let values = measure_values(&config.measures, &state, obs, spectrum, &weight, &scaled)?;
                for (&m, value) in config.measures.iter().zip(values) {
                    let (w, sg) = match m {
                        MeasureKind::Tr | MeasureKind::Hs => (Cell::Text(weight_text(&config.weight)), Cell::Empty),
                        MeasureKind::Sigma => (Cell::Text("scaled".into()), Cell::Num(sigma)),
                        _ => (Cell::Empty, Cell::Empty),
                    };
                    let key = [Cell::Int(n as i64), Cell::Num(axis.theta), Cell::Num(axis.phi)];
                    let key = if axis_major { [key[1].clone(), key[2].clone(), key[0].clone()] } else { key };
                    let phi = if s.kind == StateKind::Product { Cell::Empty } else { Cell::Num(config.phi) };
                    let mut row = key.to_vec();
                    row.extend([
                        Cell::Text(s.kind.name().into()),
                        angle(s.theta),
                        phi,
                        Cell::Text(m.name().into()),
                        w,
                        sg,
                        Cell::Num(value),
                    ]);
                    rows.push(row);
                }
            }
            Ok(rows)
        })
        .collect();
    table.rows = blocks?.into_iter().flatten().collect();
    table.calls = calls(config);
    Ok(table)
}

fn calls(config: &RunConfig) -> Vec<(String, String)> {
    let mut out = vec![
        ("state=coherent".to_string(), "spin_coherent(n, theta, phi, repr)?".to_string()),
        ("state=ghz".to_string(), "ghz(n, theta, phi, repr)?".to_string()),
        ("state=product".to_string(), "product_state(&sites)?".to_string()),
        ("obs".to_string(), "collective_spin(n, SpinAxis::new(axis_theta, axis_phi), repr)?".to_string()),
    ];
    for m in &config.measures {
        out.push((format!("measure={}", m.name()), m.call().to_string()));
    }
    out
}

fn modes(config: &RunConfig) -> Result<Table, RunError> {
    let all = series(config);
    let points = grid_points(config);
    let frames = frames(config, &points)?;
    let mut table = Table::new(&[
        "n",
        "axis_theta",
        "axis_phi",
        "state",
        "theta",
        "phi",
        "omega",
        "a_tr",
        "a_hs",
        "oracle_a_tr",
        "oracle_a_hs",
    ]);
    table.key_columns = 3;
    let blocks: Result<Vec<Vec<Vec<Cell>>>, RunError> = points
        .par_iter()
        .map(|&(n, axis)| {
            let mut cache = ZCache(Vec::new());
            let mut rows = Vec::new();
            for &s in &all {
                let Some(state) = build_state(config, s, n)? else { continue };
                let state = frame_state(&state, axis, frames.get(&n))?;
                let (obs, spectrum) = cache.get(state.repr())?;
                let profile = mode_profile_with(&state, obs, spectrum)?;
                let big = match (s.kind, s.theta) {
                    (StateKind::Coherent, Some(t)) => Some(bloch_angle(t, config.phi, axis)),
                    _ => None,
                };
                for (k, &omega) in profile.omegas().iter().enumerate() {
                    let oracle = |which| -> qmacro::Result<Cell> {
                        Ok(match big {
                            Some(b) => {
                                Cell::Num(coherent_modes(n, b, omega.abs().round() as usize, which, Method::ExactSum)?)
                            }
                            None => Cell::Empty,
                        })
                    };
                    rows.push(vec![
                        Cell::Int(n as i64),
                        Cell::Num(axis.theta),
                        Cell::Num(axis.phi),
                        Cell::Text(s.kind.name().into()),
                        angle(s.theta),
                        if s.kind == StateKind::Product { Cell::Empty } else { Cell::Num(config.phi) },
                        Cell::Num(omega),
                        Cell::Num(profile.a_tr[k]),
                        Cell::Num(profile.a_hs[k]),
                        oracle(ModeNorm::TraceNorm)?,
                        oracle(ModeNorm::HilbertSchmidt)?,
                    ]);
                }
            }
            Ok(rows)
        })
        .collect();
    table.rows = blocks?.into_iter().flatten().collect();
    table.calls = vec![
        ("a_tr".into(), "mode_profile(&state, &obs)?.a_tr[k]".into()),
        ("a_hs".into(), "mode_profile(&state, &obs)?.a_hs[k]".into()),
        ("oracle_a_tr".into(), "coherent_modes(n, bloch_angle(theta, phi, axis), |omega|, ModeNorm::TraceNorm, Method::ExactSum)?".into()),
        ("oracle_a_hs".into(), "coherent_modes(n, bloch_angle(theta, phi, axis), |omega|, ModeNorm::HilbertSchmidt, Method::ExactSum)?".into()),
    ];
    Ok(table)
}

/// Measure values along one trajectory, indexed `[time][measure]`.
type Curve = (Vec<f64>, Vec<Vec<f64>>);

fn evolve(config: &RunConfig) -> Result<Table, RunError> {
    let weight = config.weight_function()?;
    let repr = config.repr.spin();
    let axis = SpinAxis::new(config.axis_theta[0], config.axis_phi[0]);
    let all = series(config);
    let jobs: Vec<(usize, Series)> = config.n.iter().flat_map(|&n| all.iter().map(move |&s| (n, s))).collect();
    let curves: Result<Vec<Curve>, RunError> = jobs
        .par_iter()
        .map(|&(n, s)| {
            let sigma = config.sigma.value(n);
            let rho0 = build_state(config, s, n)?.expect("evolve rejects product states");
            let obs = collective_spin(n, axis, repr)?;
            let jump = match config.channel {
                Channel::Dephasing => obs.matrix().matrix().clone(),
                Channel::Dissipation => lowering_operator(n, repr)?,
            };
            let spec = LindbladSpec::for_grid(jump, config.t_max_for(n), config.points)?;
            let traj = lindblad_evolve(&rho0, &spec)?;
            let values: qmacro::Result<Vec<Vec<f64>>> = traj
                .states
                .iter()
                .map(|st| config.measures.iter().map(|&m| measure_value(m, st, &obs, &weight, sigma)).collect())
                .collect();
            Ok((traj.times, values?))
        })
        .collect();
    let curves = curves?;
    let mut table =
        Table::new(&["n", "tau", "state", "theta", "phi", "channel", "measure", "weight", "sigma", "value"]);
    table.key_columns = 2;
    table.series_columns = vec![2, 3, 6];
    for (ni, &n) in config.n.iter().enumerate() {
        let sigma = config.sigma.value(n);
        let first = &curves[ni * all.len()];
        for (ti, &tau) in first.0.iter().enumerate() {
            for (si, s) in all.iter().enumerate() {
                let (_, values) = &curves[ni * all.len() + si];
                for (mi, &m) in config.measures.iter().enumerate() {
                    let (w, sg) = match m {
                        MeasureKind::Tr | MeasureKind::Hs => (Cell::Text(weight_text(&config.weight)), Cell::Empty),
                        MeasureKind::Sigma => (Cell::Text("scaled".into()), Cell::Num(sigma)),
                        _ => (Cell::Empty, Cell::Empty),
                    };
                    table.rows.push(vec![
                        Cell::Int(n as i64),
                        Cell::Num(tau),
                        Cell::Text(s.kind.name().into()),
                        angle(s.theta),
                        Cell::Num(config.phi),
                        Cell::Text(config.channel.name().into()),
                        Cell::Text(m.name().into()),
                        w,
                        sg,
                        Cell::Num(values[ti][mi]),
                    ]);
                }
            }
        }
    }
    let mut calls = calls(config);
    calls.push((
        "tau".into(),
        format!(
            "lindblad_evolve(&state, &LindbladSpec::for_grid({}, t_max, points)?)?.states[k]",
            match config.channel {
                Channel::Dephasing => "obs.matrix().matrix().clone()",
                Channel::Dissipation => "lowering_operator(n, repr)?",
            }
        ),
    ));
    table.calls = calls;
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small(command: Command) -> RunConfig {
        let mut c = RunConfig::defaults_for(command);
        c.n = vec![3, 4];
        c
    }

    #[test]
    fn sweep_rows_and_order() {
        let t = execute(&small(Command::SweepN)).unwrap();
        // 2 n x (2 states x 2 thetas) x 3 measures
        assert_eq!(t.rows.len(), 2 * 4 * 3);
        assert_eq!(t.rows[0][0], Cell::Int(3));
        assert_eq!(t.rows.last().unwrap()[0], Cell::Int(4));
    }

    #[test]
    fn frame_rotation_matches_dense_observable() {
        for repr in [Repr::Dicke, Repr::Full] {
            let mut c = small(Command::Measure);
            c.repr = repr;
            c.measures = vec![MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Sigma, MeasureKind::Skew, MeasureKind::Total];
            let axis = SpinAxis::new(0.7, 1.9);
            let weight = c.weight_function().unwrap();
            for s in series(&c) {
                let state = build_state(&c, s, 4).unwrap().unwrap();
                let (moved, zobs) = into_axis_frame(&state, axis, None).unwrap();
                let dense = collective_spin(4, axis, repr.spin()).unwrap();
                for &m in &c.measures {
                    let a = measure_value(m, &moved, &zobs, &weight, 1.3).unwrap();
                    let b = measure_value(m, &state, &dense, &weight, 1.3).unwrap();
                    assert!((a - b).abs() < 1e-10, "{m:?}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn shared_profile_matches_single_calls() {
        let kinds = [MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Sigma, MeasureKind::Skew, MeasureKind::Total];
        let weight = make_weight(WeightFamily::Power(1.5)).unwrap();
        let scaled = make_weight(WeightFamily::Scaled(0.9)).unwrap();
        let state = ghz(5, 1.2, 0.3, SpinRepr::Dicke).unwrap();
        let obs = z_observable(state.repr()).unwrap();
        let spectrum = ModeSpectrum::new(&obs);
        let shared = measure_values(&kinds, &state, &obs, &spectrum, &weight, &scaled).unwrap();
        for (k, v) in kinds.iter().zip(shared) {
            assert!((measure_value(*k, &state, &obs, &weight, 0.9).unwrap() - v).abs() < 1e-14);
        }
    }

    #[test]
    fn mixed_tensor_frame_matches_dense_observable() {
        let n = 3;
        let a = spin_coherent(n, 0.4, 0.1, SpinRepr::FullTensor).unwrap();
        let b = ghz(n, 2.0, -0.5, SpinRepr::FullTensor).unwrap();
        let mix = QuantumState::mixture(&[a, b], &[0.3, 0.7]).unwrap();
        let axis = SpinAxis::new(1.1, 0.6);
        let weight = make_weight(WeightFamily::Power(2.0)).unwrap();
        let (moved, zobs) = into_axis_frame(&mix, axis, None).unwrap();
        let dense = collective_spin(n, axis, SpinRepr::FullTensor).unwrap();
        for m in [MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Skew, MeasureKind::Total] {
            let x = measure_value(m, &moved, &zobs, &weight, 1.0).unwrap();
            let y = measure_value(m, &mix, &dense, &weight, 1.0).unwrap();
            assert!((x - y).abs() < 1e-10, "{m:?}: {x} vs {y}");
        }
    }

    #[test]
    fn product_rows_only_at_matching_n() {
        let mut c = small(Command::Measure);
        c.states = vec![StateKind::Product];
        c.sites = Some(vec![(PI / 2.0, 0.0); 3]);
        c.repr = Repr::Full;
        let t = execute(&c).unwrap();
        assert_eq!(t.rows.len(), 3);
        assert!(t.rows.iter().all(|r| r[0] == Cell::Int(3)));
    }

    #[test]
    fn modes_carry_oracle() {
        let mut c = small(Command::Modes);
        c.states = vec![StateKind::Coherent];
        c.axis_theta = vec![0.4];
        let t = execute(&c).unwrap();
        for r in &t.rows {
            if let (Cell::Num(a), Cell::Num(b)) = (&r[8], &r[10]) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn evolve_runs() {
        let mut c = RunConfig::defaults_for(Command::Evolve);
        c.n = vec![6];
        c.points = 5;
        let t = execute(&c).unwrap();
        assert_eq!(t.rows.len(), 5 * 3);
        let w = t.wide();
        assert_eq!(w.rows.len(), 5);
        assert_eq!(w.columns.len(), 2 + 3);
    }
}
