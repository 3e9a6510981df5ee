//! The acceptance suite: twelve pass/fail checks with pinned tolerances.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::Rng;

use qmacro::asymmetry::{mode_profile, total_asymmetry};
use qmacro::coherence::{c_a, Basis};
use qmacro::dynamics::{lindblad_evolve, partial_dephasing, random_covariant_with, random_incoherent_with, LindbladSpec};
use qmacro::linalg::{CMatrix, HermitianMatrix};
use qmacro::macroscopicity::{
    hellinger_average, hellinger_mode_expansion, make_weight, sandwich_bounds, scaled_measure,
    separability_ceiling, skew_information_paths, weighted_measure, ConcaveFn, GSpec, NormKind,
    WeightFamily, WeightFunction,
};
use qmacro::oracles::{closed_form_measures, MeasureSpec, StateFamily};
use qmacro::random::{random_hermitian, random_observable, random_state, rng_from_seed};
use qmacro::states::{
    collective_spin, dicke_embed_state, ghz, lowering_operator, product_state, spin_coherent, EmbedDirection,
    Observable, QuantumState, SpinAxis, SpinRepr,
};

use crate::config::{Channel, Command, MeasureKind, RunConfig};
use crate::output::{write_csv, Cell};
use crate::run::{execute, into_axis_frame, measure_value};

/// Id, name, and runtime budget in seconds where one is pinned.
pub const CRITERIA: [(u32, &str, Option<f64>); 12] = [
    (1, "mode-killing fixture", Some(1.0)),
    (2, "coherence dual formula", Some(10.0)),
    (3, "monotonicity suites", Some(60.0)),
    (4, "skew-information identity", None),
    (5, "closed-form reproduction", Some(60.0)),
    (6, "particle-number scaling", None),
    (7, "sandwich and separable ceiling", None),
    (8, "weight construction from g", None),
    (9, "Hellinger identities", None),
    (10, "Lindblad dynamics", None),
    (11, "representation equivalence", None),
    (12, "CLI determinism", None),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {:<32} {:>8.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: qmacro::Result<T>) -> Result<T, String> { r.map_err(|e| e.to_string()) }

fn rel(a: f64, b: f64) -> f64 { (a - b).abs() / b.abs().max(f64::MIN_POSITIVE) }

/// Runs one criterion. Criterion 12 here covers the byte-for-byte sweep
/// comparison only; [`run_all`] adds the end-to-end condition.
pub fn run_criterion(id: u32, seed: u64) -> Outcome {
    let (_, name, budget) = CRITERIA.iter().copied().find(|c| c.0 == id).unwrap_or((id, "unknown criterion", None));
    let start = Instant::now();
    let result = match id {
        1 => fixture(),
        2 => dual_formula(seed),
        3 => monotonicity(seed),
        4 => skew_identity(seed),
        5 => closed_forms(),
        6 => scaling(),
        7 => sandwich(seed),
        8 => weight_from_g(),
        9 => hellinger(seed),
        10 => dynamics(),
        11 => representations(),
        12 => determinism(seed),
        _ => Err(format!("no criterion {id}")),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(b) = budget {
        if elapsed.as_secs_f64() > b {
            passed = false;
            detail = format!("{detail}; over the {b} s budget");
        }
    }
    Outcome { id, name, passed, detail, elapsed }
}

/// Runs the selected criteria (all when `ids` is empty), in order.
pub fn run_all(ids: &[u32], seed: u64) -> Vec<Outcome> {
    let ids: Vec<u32> = if ids.is_empty() { CRITERIA.iter().map(|c| c.0).collect() } else { ids.to_vec() };
    let mut out: Vec<Outcome> = Vec::new();
    for &id in &ids {
        let mut o = run_criterion(id, seed);
        if id == 12 && !out.is_empty() {
            let failed: Vec<String> = out.iter().filter(|o| !o.passed).map(|o| o.id.to_string()).collect();
            if !failed.is_empty() {
                o.passed = false;
                o.detail = format!("{}; failing criteria: {}", o.detail, failed.join(","));
            }
        }
        out.push(o);
    }
    out
}

fn fixture() -> Check {
    let s = 1.0 / 3f64.sqrt();
    let rho = lib(QuantumState::pure(vec![C64::new(s, 0.0); 3]))?;
    let obs = lib(Observable::new(HermitianMatrix::from_real_diag(&[-1.0, 0.0, 1.0])))?;
    let out = lib(lib(partial_dephasing(&obs, &[1.0, -1.0]))?.apply(&rho))?;
    let (p0, p1) = (lib(mode_profile(&rho, &obs))?, lib(mode_profile(&out, &obs))?);
    let mut worst = 0.0f64;
    for (profile, omega, want) in [(&p0, 1.0, 2.0 / 9.0), (&p0, 2.0, 1.0 / 9.0), (&p1, 1.0, 0.0), (&p1, 2.0, 1.0 / 6.0)] {
        for w in [omega, -omega] {
            let k = lib(profile.spectrum.index_of(w))?;
            worst = worst.max((profile.a_hs[k] - want).abs());
        }
    }
    let (t0, t1) = (lib(total_asymmetry(&rho, &obs))?, lib(total_asymmetry(&out, &obs))?);
    worst = worst.max((t0 - 2.0 / 3.0).abs()).max((t1 - 1.0 / 3.0).abs());
    ensure(worst < 1e-12, || format!("max deviation {worst:.2e} > 1e-12"))?;
    let two = lib(p0.spectrum.index_of(2.0))?;
    ensure(p1.a_hs[two] > p0.a_hs[two], || "the omega = 2 mode did not increase".into())?;
    Ok(format!("max deviation {worst:.1e}; A_HS(2) rises 1/9 -> 1/6"))
}

fn dual_formula(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed ^ 0x02);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let dim = rng.random_range(2..=8);
        let rho = random_state(dim, &mut rng);
        let r = lib(c_a(&rho, &Basis::computational(dim)))?;
        worst = worst.max(r.discrepancy());
    }
    ensure(worst < 1e-10, || format!("max discrepancy {worst:.2e} > 1e-10"))?;
    Ok(format!("500 states, max discrepancy {worst:.1e}"))
}

fn hs_weights() -> qmacro::Result<Vec<WeightFunction>> {
    [
        WeightFamily::Power(2.0),
        WeightFamily::FromG(GSpec::Delta),
        WeightFamily::FromG(GSpec::Gaussian { sigma: 0.8 }),
        WeightFamily::FromG(GSpec::Grid { x: vec![0.0, 0.5, 1.0, 2.0], g: vec![1.0, 0.6, 0.2, 0.0] }),
        WeightFamily::ConcaveScaled { sigma: 1.5, f: ConcaveFn::Log1p },
    ]
    .into_iter()
    .map(make_weight)
    .collect()
}

struct Snapshot {
    total: f64,
    a_tr: Vec<f64>,
    m_hs: Vec<f64>,
    m_tr: f64,
    m_sigma: f64,
}

fn snapshot(rho: &QuantumState, obs: &Observable, weights: &[WeightFunction]) -> qmacro::Result<Snapshot> {
    let profile = mode_profile(rho, obs)?;
    let m_hs = weights
        .iter()
        .map(|w| weighted_measure(rho, obs, w, NormKind::HilbertSchmidt).map(|r| r.value))
        .collect::<qmacro::Result<Vec<f64>>>()?;
    Ok(Snapshot {
        total: total_asymmetry(rho, obs)?,
        a_tr: profile.a_tr,
        m_hs,
        m_tr: weighted_measure(rho, obs, &weights[0], NormKind::TraceNorm)?.value,
        m_sigma: scaled_measure(rho, obs, 0.7)?.value,
    })
}

fn monotonicity(seed: u64) -> Check {
    const SLACK: f64 = 1e-9;
    let mut rng = rng_from_seed(seed ^ 0x03);
    let mut worst = f64::NEG_INFINITY;
    let mut bump = |after: f64, before: f64| worst = worst.max(after - before);
    for _ in 0..200 {
        let dim = rng.random_range(2..=6);
        let kraus = rng.random_range(1..=4);
        let rho = random_state(dim, &mut rng);
        let ch = lib(random_incoherent_with(dim, kraus, &mut rng))?;
        let basis = Basis::computational(dim);
        let before = lib(c_a(&rho, &basis))?.value;
        bump(lib(c_a(&lib(ch.apply(&rho))?, &basis))?.value, before);
        let mut selective = 0.0;
        for (p, branch) in lib(ch.branches(&rho))? {
            selective += p * lib(c_a(&branch, &basis))?.value;
        }
        bump(selective, before);
    }
    let incoherent = worst;
    worst = f64::NEG_INFINITY;
    let weights = lib(hs_weights())?;
    for _ in 0..100 {
        let dim = rng.random_range(2..=5);
        let degenerate = rng.random::<bool>();
        let obs = random_observable(dim, degenerate, &mut rng);
        let rho = random_state(dim, &mut rng);
        let ch = lib(random_covariant_with(&obs, &mut rng))?;
        let out = lib(ch.apply(&rho))?;
        let (a, b) = (lib(snapshot(&rho, &obs, &weights))?, lib(snapshot(&out, &obs, &weights))?);
        let mut bump = |after: f64, before: f64| worst = worst.max(after - before);
        bump(b.total, a.total);
        bump(b.m_tr, a.m_tr);
        bump(b.m_sigma, a.m_sigma);
        for (x, y) in b.m_hs.iter().zip(&a.m_hs) {
            bump(*x, *y);
        }
        for (x, y) in b.a_tr.iter().zip(&a.a_tr) {
            bump(*x, *y);
        }
    }
    let covariant = worst;
    ensure(incoherent <= SLACK && covariant <= SLACK, || {
        format!("largest increase: incoherent {incoherent:.2e}, covariant {covariant:.2e} (slack 1e-9)")
    })?;
    Ok(format!("200 incoherent + 100 covariant channels, largest increase {:.1e}", incoherent.max(covariant)))
}

fn skew_identity(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed ^ 0x04);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(2..=7);
        let degenerate = rng.random::<bool>();
        let obs = random_observable(dim, degenerate, &mut rng);
        let rho = random_state(dim, &mut rng);
        worst = worst.max(lib(skew_information_paths(&rho, &obs))?.discrepancy());
    }
    ensure(worst < 1e-9, || format!("max path discrepancy {worst:.2e} > 1e-9"))?;
    let mut worst_rel = 0.0f64;
    let theta = 1.1;
    for n in [2usize, 10, 100, 500] {
        let psi = lib(spin_coherent(n, theta, 0.4, SpinRepr::Dicke))?;
        let obs = lib(collective_spin(n, SpinAxis::Z, SpinRepr::Dicke))?;
        let want = n as f64 * theta.sin().powi(2) / 4.0;
        let paths = lib(skew_information_paths(&psi, &obs))?;
        worst_rel = worst_rel.max(rel(paths.commutator, want)).max(rel(paths.mode_sum, want));
    }
    ensure(worst_rel < 1e-9, || format!("coherent skew information off by {worst_rel:.2e} (relative)"))?;
    Ok(format!("paths agree to {worst:.1e}; coherent N sin^2/4 to {worst_rel:.1e}"))
}

fn numeric(state: &QuantumState, axis: SpinAxis, m: MeasureKind, sigma: f64) -> Result<f64, String> {
    let w2 = lib(make_weight(WeightFamily::Power(2.0)))?;
    let (st, obs) = lib(into_axis_frame(state, axis, None))?;
    lib(measure_value(m, &st, &obs, &w2, sigma))
}

fn closed_forms() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    let tilted = SpinAxis::new(0.9, 0.3);
    let mut rng = rng_from_seed(5);
    for (n, repr) in [(3usize, SpinRepr::FullTensor), (8, SpinRepr::FullTensor), (50, SpinRepr::Dicke), (500, SpinRepr::Dicke)] {
        let sigma = (n as f64 * (n as f64).ln()).sqrt();
        for theta in [PI / 2.0, PI / 4.0, 2.0] {
            let phi = 0.6;
            let g = lib(ghz(n, theta, phi, repr))?;
            let fam = StateFamily::Ghz { n, theta, phi };
            let cases = [
                (MeasureKind::Hs, MeasureSpec::HsOmegaSquared, SpinAxis::Z),
                (MeasureKind::Tr, MeasureSpec::TraceOmegaSquared, SpinAxis::Z),
                (MeasureKind::Sigma, MeasureSpec::Scaled { sigma }, SpinAxis::Z),
                (MeasureKind::Hs, MeasureSpec::HsOmegaSquared, tilted),
            ];
            for (m, spec, axis) in cases {
                let want = lib(closed_form_measures(&fam, spec, axis))?;
                let got = numeric(&g, axis, m, sigma)?;
                let e = rel(got, want.value);
                ensure(e < 1e-8, || format!("GHZ N={n} theta={theta:.3} {}: {got} vs {}", want.name, want.value))?;
                worst = worst.max(e);
                count += 1;
            }
            // identical sites: the product form on the symmetric subspace
            let sites = vec![(theta, phi); n];
            let state = match repr {
                SpinRepr::Dicke => lib(spin_coherent(n, theta, phi, repr))?,
                SpinRepr::FullTensor => lib(product_state(&sites))?,
            };
            let want = lib(closed_form_measures(&StateFamily::Product { sites }, MeasureSpec::HsOmegaSquared, tilted))?;
            let got = numeric(&state, tilted, MeasureKind::Hs, sigma)?;
            worst = worst.max(rel(got, want.value));
            count += 1;
        }
        if repr == SpinRepr::FullTensor {
            let sites: Vec<(f64, f64)> =
                (0..n).map(|_| (rng.random_range(0.0..PI), rng.random_range(-PI..PI))).collect();
            let state = lib(product_state(&sites))?;
            for axis in [SpinAxis::Z, tilted] {
                let want =
                    lib(closed_form_measures(&StateFamily::Product { sites: sites.clone() }, MeasureSpec::HsOmegaSquared, axis))?;
                let got = numeric(&state, axis, MeasureKind::Hs, sigma)?;
                worst = worst.max(rel(got, want.value));
                count += 1;
            }
        }
    }
    ensure(worst < 1e-8, || format!("max relative deviation {worst:.2e} > 1e-8"))?;
    Ok(format!("{count} comparisons, max relative deviation {worst:.1e}"))
}

fn slope(ns: &[usize], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn scaling() -> Check {
    let mut config = RunConfig::defaults_for(Command::SweepN);
    config.n = (50..=500).step_by(10).collect();
    let table = execute(&config).map_err(|e| e.to_string())?;
    let series = |state: &str, theta: f64, measure: &str| -> Vec<f64> {
        table
            .rows
            .iter()
            .filter(|r| {
                r[3] == Cell::Text(state.into()) && r[4] == Cell::Num(theta) && r[6] == Cell::Text(measure.into())
            })
            .map(|r| match r[9] {
                Cell::Num(v) => v,
                _ => f64::NAN,
            })
            .collect()
    };
    let ns = &config.n;
    let mut notes = Vec::new();
    for theta in [PI / 2.0, PI / 4.0] {
        for (state, measure, want, tol) in [
            ("ghz", "tr", 2.0, 0.05),
            ("ghz", "hs", 2.0, 0.05),
            ("coherent", "tr", 1.5, 0.05),
            ("coherent", "hs", 1.0, 0.02),
        ] {
            let s = slope(ns, &series(state, theta, measure));
            ensure((s - want).abs() <= tol, || format!("{state} {measure} theta={theta:.3}: slope {s:.4}, want {want} +- {tol}"))?;
            notes.push(s);
        }
        let coherent = series("coherent", theta, "sigma");
        ensure(coherent.windows(2).all(|w| w[1] < w[0]), || format!("coherent M_sigma not decreasing at theta={theta:.3}"))?;
        // the large-N form 1 - (1 + N sin^2 / (8 sigma^2))^{-1/2} vanishes like 1/(16 ln N)
        let last = *coherent.last().unwrap();
        let fam = StateFamily::SpinCoherent { n: 500, theta, phi: config.phi };
        let sigma = config.sigma.value(500);
        let asymptote = lib(closed_form_measures(&fam, MeasureSpec::Scaled { sigma }, SpinAxis::Z))?.value;
        ensure(rel(last, asymptote) < 0.05, || {
            format!("coherent M_sigma(500) = {last:.4e}, large-N form {asymptote:.4e} (theta={theta:.3})")
        })?;
        let g = *series("ghz", theta, "sigma").last().unwrap();
        let limit = 0.5 * theta.sin().powi(2);
        ensure((g - limit).abs() < 1e-3, || format!("GHZ M_sigma(500) = {g}, limit {limit}"))?;
    }
    let lo = notes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = notes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(format!("slopes in [{lo:.3}, {hi:.3}]; M_sigma limits hold"))
}

fn embed_local(op: &CMatrix, site: usize, n: usize) -> CMatrix {
    (0..n).fold(CMatrix::identity(1), |acc, k| acc.kron(&if k == site { op.clone() } else { CMatrix::identity(2) }))
}

fn sandwich(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed ^ 0x07);
    let sigmas = [0.5, 1.0, 3.0];
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100 {
        let dim = rng.random_range(2..=6);
        let degenerate = rng.random::<bool>();
        let obs = random_observable(dim, degenerate, &mut rng);
        let rho = random_state(dim, &mut rng);
        let b = lib(sandwich_bounds(&rho, &obs, sigmas[i % 3]))?;
        worst = worst.max(b.lower - b.value).max(b.value - b.upper);
    }
    ensure(worst <= 1e-9, || format!("sandwich violated by {worst:.2e}"))?;
    let n = 6;
    let mut margin = f64::INFINITY;
    for i in 0..50 {
        let sigma = sigmas[i % 3];
        let locals: Vec<HermitianMatrix> = (0..n).map(|_| random_hermitian(2, &mut rng)).collect();
        let l_max = locals
            .iter()
            .map(|l| lib(l.eigh()).map(|e| e.values[1] - e.values[0]))
            .collect::<Result<Vec<f64>, String>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut total = CMatrix::zeros(1 << n, 1 << n);
        for (k, l) in locals.iter().enumerate() {
            total += &embed_local(l.matrix(), k, n);
        }
        let obs = lib(Observable::new(HermitianMatrix::symmetrized(total)))?;
        let mut state = random_state(2, &mut rng);
        for _ in 1..n {
            state = state.tensor(&random_state(2, &mut rng));
        }
        let value = lib(scaled_measure(&state, &obs, sigma))?.value;
        let ceiling = lib(separability_ceiling(n, l_max, sigma, ConcaveFn::ExpCutoff))?;
        let direct = -(-(n as f64) * l_max * l_max / (16.0 * sigma * sigma)).exp_m1();
        ensure((ceiling - direct).abs() < 1e-14, || format!("ceiling {ceiling} vs {direct}"))?;
        margin = margin.min(ceiling - value);
    }
    ensure(margin >= -1e-9, || format!("separable ceiling exceeded by {:.2e}", -margin))?;
    Ok(format!("sandwich slack {:.1e}; ceiling margin {margin:.2e}", worst.max(0.0)))
}

fn weight_from_g() -> Check {
    let mut worst = 0.0f64;
    for sigma in [0.5, 2.0] {
        let w = lib(make_weight(WeightFamily::FromG(GSpec::Gaussian { sigma })))?;
        for omega in [0.1, 1.0, 10.0] {
            let want = -(-omega * omega / (8.0 * sigma * sigma)).exp_m1();
            worst = worst.max((w.symmetric_weight(omega) - want).abs());
        }
    }
    ensure(worst < 1e-6, || format!("max deviation {worst:.2e} > 1e-6"))?;
    Ok(format!("max deviation {worst:.1e}"))
}

fn hellinger(seed: u64) -> Check {
    let mut rng = rng_from_seed(seed ^ 0x09);
    let mut expansion = 0.0f64;
    for _ in 0..20 {
        let dim = rng.random_range(2..=6);
        let degenerate = rng.random::<bool>();
        let obs = random_observable(dim, degenerate, &mut rng);
        let rho = random_state(dim, &mut rng);
        let x = rng.random_range(-4.0..4.0);
        let e = lib(hellinger_mode_expansion(&rho, &obs, x))?;
        expansion = expansion.max((e.direct - e.expansion).abs()).max(e.expansion_imag.abs());
    }
    ensure(expansion < 1e-10, || format!("mode expansion off by {expansion:.2e}"))?;
    let mut average = 0.0f64;
    for _ in 0..20 {
        let dim = rng.random_range(2..=6);
        let degenerate = rng.random::<bool>();
        let obs = random_observable(dim, degenerate, &mut rng);
        let rho = random_state(dim, &mut rng);
        let sigma = rng.random_range(0.7..2.0);
        let avg = lib(hellinger_average(&rho, &obs, sigma, 80))?;
        average = average.max((avg - lib(scaled_measure(&rho, &obs, sigma))?.value).abs());
    }
    ensure(average < 1e-7, || format!("Gauss-Hermite average off by {average:.2e}"))?;
    Ok(format!("expansion {expansion:.1e}; average {average:.1e}"))
}

fn dynamics() -> Check {
    let n = 50;
    let psi = lib(ghz(n, PI / 2.0, 0.0, SpinRepr::Dicke))?;
    let obs = lib(collective_spin(n, SpinAxis::Z, SpinRepr::Dicke))?;
    let spec = lib(LindbladSpec::for_grid(obs.matrix().matrix().clone(), 1e-3, 11))?;
    let traj = lib(lindblad_evolve(&psi, &spec))?;
    let mut worst = 0.0f64;
    for (tau, st) in traj.times.iter().zip(&traj.states).skip(1) {
        let want = 0.5 * (-((n * n) as f64) * tau / 2.0).exp();
        worst = worst.max(rel(st.matrix().matrix()[(0, n)].norm(), want));
    }
    ensure(worst < 1e-6, || format!("dephasing decay off by {worst:.2e} (relative)"))?;
    ensure(traj.max_trace_drift < 1e-9, || format!("trace drift {:.2e} per step", traj.max_trace_drift))?;

    let run = |repr| -> qmacro::Result<Vec<QuantumState>> {
        let rho0 = spin_coherent(4, 1.1, 0.3, repr)?;
        let spec = LindbladSpec::for_grid(lowering_operator(4, repr)?, 0.5, 6)?;
        Ok(lindblad_evolve(&rho0, &spec)?.states)
    };
    let (small, big) = (lib(run(SpinRepr::Dicke))?, lib(run(SpinRepr::FullTensor))?);
    let mut repr_gap = 0.0f64;
    for (a, b) in small.iter().zip(&big) {
        let projected = lib(dicke_embed_state(b, EmbedDirection::FullToDicke, 1e-9))?;
        repr_gap = repr_gap.max(projected.state.matrix().max_abs_diff(a.matrix()));
    }
    ensure(repr_gap < 1e-7, || format!("Dicke vs full tensor dissipation differ by {repr_gap:.2e}"))?;

    for channel in [Channel::Dephasing, Channel::Dissipation] {
        let mut config = RunConfig::defaults_for(Command::Evolve);
        config.channel = channel;
        let table = execute(&config).map_err(|e| e.to_string())?;
        let thetas = config.theta.clone();
        let curve = |theta: f64| -> Vec<f64> {
            table
                .rows
                .iter()
                .filter(|r| r[3] == Cell::Num(theta))
                .map(|r| if let Cell::Num(v) = r[9] { v } else { f64::NAN })
                .collect()
        };
        let mut starts = Vec::new();
        for &t in &thetas {
            let c = curve(t);
            ensure(c.windows(2).all(|w| w[1] <= w[0] + 1e-9), || {
                format!("{} M_sigma increases along theta={t:.3}", channel.name())
            })?;
            starts.push(c[0]);
        }
        for (i, &t) in thetas.iter().enumerate() {
            let ratio = starts[i] / starts[0];
            let want = t.sin().powi(2) / thetas[0].sin().powi(2);
            ensure(rel(ratio, want) < 1e-9, || format!("initial ordering {ratio} vs sin^2 ratio {want}"))?;
        }
    }
    Ok(format!("decay {worst:.1e}; drift {:.1e}; Dicke/full {repr_gap:.1e}; curves monotone", traj.max_trace_drift))
}

fn representations() -> Check {
    let measures = [MeasureKind::Tr, MeasureKind::Hs, MeasureKind::Sigma, MeasureKind::Skew, MeasureKind::Total];
    let w2 = lib(make_weight(WeightFamily::Power(2.0)))?;
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let sigma = 1.3;
        for axis in [SpinAxis::Z, SpinAxis::new(0.7, 0.2)] {
            let pick = |repr| -> Result<Vec<f64>, String> {
                let mut out = Vec::new();
                for st in [lib(ghz(n, 1.0, 0.5, repr))?, lib(spin_coherent(n, 2.0, -0.4, repr))?] {
                    let (st, obs) = lib(into_axis_frame(&st, axis, None))?;
                    for m in measures {
                        out.push(lib(measure_value(m, &st, &obs, &w2, sigma))?);
                    }
                }
                Ok(out)
            };
            for (a, b) in pick(SpinRepr::Dicke)?.iter().zip(&pick(SpinRepr::FullTensor)?) {
                worst = worst.max((a - b).abs());
            }
        }
    }
    ensure(worst < 1e-9, || format!("max difference {worst:.2e} > 1e-9"))?;
    Ok(format!("N = 2..10, max difference {worst:.1e}"))
}

/// Two default `sweep-n` runs rendered to CSV bytes.
pub fn sweep_bytes(seed: u64) -> Result<Vec<u8>, String> {
    let mut config = RunConfig::defaults_for(Command::SweepN);
    config.seed = seed;
    let table = execute(&config).map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_csv(&table, &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn determinism(seed: u64) -> Check {
    let (a, b) = (sweep_bytes(seed)?, sweep_bytes(seed)?);
    ensure(a == b, || "two sweep-n runs differ".into())?;
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    ensure(lines > 1, || "empty sweep".into())?;
    Ok(format!("sweep-n twice, {} bytes identical", a.len()))
}
