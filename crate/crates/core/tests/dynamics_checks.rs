use std::f64::consts::PI;

use qmacro::dynamics::{dephased_ghz, lindblad_evolve, LindbladSpec};
use qmacro::macroscopicity::{make_weight, scaled_measure, weighted_measure, NormKind, WeightFamily};
use qmacro::states::{
    collective_spin, dicke_embed_state, ghz, lowering_operator, spin_coherent, EmbedDirection, SpinAxis, SpinRepr,
};

#[test]
fn dissipation_dicke_matches_full_tensor() {
    let n = 4;
    let theta = 1.1;
    let t_max = 0.5;
    let run = |repr| {
        let rho0 = spin_coherent(n, theta, 0.3, repr).unwrap();
        let spec = LindbladSpec::for_grid(lowering_operator(n, repr).unwrap(), t_max, 6).unwrap();
        lindblad_evolve(&rho0, &spec).unwrap()
    };
    let (small, big) = (run(SpinRepr::Dicke), run(SpinRepr::FullTensor));
    for (a, b) in small.states.iter().zip(&big.states) {
        let projected = dicke_embed_state(b, EmbedDirection::FullToDicke, 1e-9).unwrap();
        assert!(projected.state.matrix().max_abs_diff(a.matrix()) < 1e-7);
    }
}

#[test]
fn dephasing_keeps_scaled_measure_decreasing() {
    let n = 8;
    let sigma = ((n as f64) * (n as f64).ln()).sqrt();
    let obs = collective_spin(n, SpinAxis::Z, SpinRepr::Dicke).unwrap();
    let rho0 = ghz(n, PI / 2.0, 0.0, SpinRepr::Dicke).unwrap();
    let spec = LindbladSpec::for_grid(obs.matrix().matrix().clone(), 6.0 / (n * n) as f64, 20).unwrap();
    let traj = lindblad_evolve(&rho0, &spec).unwrap();
    let values: Vec<f64> = traj.states.iter().map(|s| scaled_measure(s, &obs, sigma).unwrap().value).collect();
    assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let exact = dephased_ghz(n, PI / 2.0, 0.0, *t).unwrap();
        assert!(s.matrix().max_abs_diff(exact.matrix()) < 1e-8);
    }
}

#[test]
fn representations_agree_on_measures() {
    let w2 = make_weight(WeightFamily::Power(2.0)).unwrap();
    for n in 2..=8 {
        let sigma = 1.3;
        let axis = SpinAxis::new(0.7, 0.2);
        let pick = |repr| {
            let obs = collective_spin(n, axis, repr).unwrap();
            let mut out = Vec::new();
            for st in [ghz(n, 1.0, 0.5, repr).unwrap(), spin_coherent(n, 2.0, -0.4, repr).unwrap()] {
                out.push(weighted_measure(&st, &obs, &w2, NormKind::HilbertSchmidt).unwrap().value);
                out.push(weighted_measure(&st, &obs, &w2, NormKind::TraceNorm).unwrap().value);
                out.push(scaled_measure(&st, &obs, sigma).unwrap().value);
            }
            out
        };
        for (a, b) in pick(SpinRepr::Dicke).iter().zip(&pick(SpinRepr::FullTensor)) {
            assert!((a - b).abs() < 1e-9, "n = {n}: {a} vs {b}");
        }
    }
}
