use num_complex::Complex64 as C64;
use proptest::prelude::*;

use qmacro::asymmetry::{closest_free_state, mode_decomposition, mode_profile, total_asymmetry, translate};
use qmacro::coherence::{c_a, c_l1, Basis};
use qmacro::dynamics::{random_covariant_with, random_incoherent_with};
use qmacro::linalg::{CMatrix, HermitianMatrix};
use qmacro::macroscopicity::{
    hellinger_average, hellinger_mode_expansion, make_weight, sandwich_bounds, scaled_measure, skew_information,
    skew_information_paths, weighted_measure, NormKind, WeightFamily,
};
use qmacro::random::{random_hermitian, random_observable, random_simplex, random_state, rng_from_seed, SimRng};
use qmacro::states::{Observable, QuantumState};
use rand::Rng;

const SLACK: f64 = 1e-9;

fn setup(seed: u64, dim: usize) -> (SimRng, QuantumState, Observable) {
    let mut rng = rng_from_seed(seed);
    let degenerate = rng.random::<bool>();
    let obs = random_observable(dim, degenerate, &mut rng);
    let rho = random_state(dim, &mut rng);
    (rng, rho, obs)
}

struct Measures {
    total: f64,
    a_tr: Vec<f64>,
    m_hs: f64,
    m_tr: f64,
    m_sigma: f64,
}

fn measures(rho: &QuantumState, obs: &Observable) -> Measures {
    let w2 = make_weight(WeightFamily::Power(2.0)).unwrap();
    let profile = mode_profile(rho, obs).unwrap();
    Measures {
        total: total_asymmetry(rho, obs).unwrap(),
        a_tr: profile.a_tr.clone(),
        m_hs: weighted_measure(rho, obs, &w2, NormKind::HilbertSchmidt).unwrap().value,
        m_tr: weighted_measure(rho, obs, &w2, NormKind::TraceNorm).unwrap().value,
        m_sigma: scaled_measure(rho, obs, 0.7).unwrap().value,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coherence_dual_and_range(seed in any::<u64>(), dim in 2usize..7) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(dim, &mut rng);
        let r = c_a(&rho, &Basis::computational(dim)).unwrap();
        prop_assert!(r.discrepancy() < 1e-10);
        prop_assert!(r.value >= 0.0 && r.value < 1.0);
        prop_assert!((r.closest_incoherent.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherence_monotone_under_incoherent_channels(seed in any::<u64>(), dim in 2usize..6, k in 1usize..4) {
        let mut rng = rng_from_seed(seed);
        let rho = random_state(dim, &mut rng);
        let ch = random_incoherent_with(dim, k, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        let basis = Basis::computational(dim);
        prop_assert!(c_a(&out, &basis).unwrap().value <= c_a(&rho, &basis).unwrap().value + SLACK);
        prop_assert!(c_l1(&out, &basis).unwrap() <= c_l1(&rho, &basis).unwrap() + SLACK);
    }

    #[test]
    fn mode_components_partition(seed in any::<u64>(), dim in 2usize..7) {
        let (_, rho, obs) = setup(seed, dim);
        let parts = mode_decomposition(rho.matrix(), &obs).unwrap();
        let mut sum = CMatrix::zeros(dim, dim);
        for p in &parts {
            sum += &p.block;
        }
        prop_assert!(sum.max_abs_diff(rho.matrix()) < 1e-11);
        let profile = mode_profile(&rho, &obs).unwrap();
        prop_assert!((profile.a_hs.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for k in profile.spectrum.positive_indices() {
            let j = profile.spectrum.mirror(k);
            prop_assert!((profile.a_tr[k] - profile.a_tr[j]).abs() < 1e-14);
        }
    }

    #[test]
    fn total_asymmetry_dual(seed in any::<u64>(), dim in 2usize..7) {
        let (_, rho, obs) = setup(seed, dim);
        let (_, z) = closest_free_state(&rho, &obs).unwrap();
        prop_assert!((total_asymmetry(&rho, &obs).unwrap() - (1.0 - z)).abs() < 1e-10);
    }

    #[test]
    fn measures_monotone_under_covariant_channels(seed in any::<u64>(), dim in 2usize..6) {
        let (mut rng, rho, obs) = setup(seed, dim);
        let ch = random_covariant_with(&obs, &mut rng).unwrap();
        let out = ch.apply(&rho).unwrap();
        let (before, after) = (measures(&rho, &obs), measures(&out, &obs));
        prop_assert!(after.total <= before.total + SLACK);
        prop_assert!(after.m_hs <= before.m_hs + SLACK);
        prop_assert!(after.m_tr <= before.m_tr + SLACK);
        prop_assert!(after.m_sigma <= before.m_sigma + SLACK);
        for (a, b) in after.a_tr.iter().zip(&before.a_tr) {
            prop_assert!(a <= &(b + SLACK));
        }
    }

    #[test]
    fn measures_convex(seed in any::<u64>(), dim in 2usize..6, parts in 2usize..4) {
        let (mut rng, _, obs) = setup(seed, dim);
        let states: Vec<QuantumState> = (0..parts).map(|_| random_state(dim, &mut rng)).collect();
        let p = random_simplex(parts, &mut rng);
        let mix = QuantumState::mixture(&states, &p).unwrap();
        let m = measures(&mix, &obs);
        let each: Vec<Measures> = states.iter().map(|s| measures(s, &obs)).collect();
        let avg = |f: &dyn Fn(&Measures) -> f64| each.iter().zip(&p).map(|(e, w)| w * f(e)).sum::<f64>();
        prop_assert!(m.m_hs <= avg(&|e| e.m_hs) + SLACK);
        prop_assert!(m.m_tr <= avg(&|e| e.m_tr) + SLACK);
        prop_assert!(m.m_sigma <= avg(&|e| e.m_sigma) + SLACK);
        prop_assert!(m.total <= avg(&|e| e.total) + SLACK);
    }

    #[test]
    fn translation_invariance(seed in any::<u64>(), dim in 2usize..6, x in -5.0f64..5.0) {
        let (_, rho, obs) = setup(seed, dim);
        let moved = translate(&rho, &obs, x).unwrap();
        let (a, b) = (measures(&rho, &obs), measures(&moved, &obs));
        prop_assert!((a.m_hs - b.m_hs).abs() < 1e-9);
        prop_assert!((a.m_tr - b.m_tr).abs() < 1e-9);
        prop_assert!((a.total - b.total).abs() < 1e-9);
    }

    #[test]
    fn skew_information_paths_agree(seed in any::<u64>(), dim in 2usize..8) {
        let (_, rho, obs) = setup(seed, dim);
        let s = skew_information_paths(&rho, &obs).unwrap();
        prop_assert!(s.discrepancy() < 1e-9);
        // pure states: the variance
        if let Some(v) = rho.vector() {
            let l = obs.matrix();
            let lv = l.matvec(v);
            let mean: C64 = v.iter().zip(&lv).map(|(a, b)| a.conj() * b).sum();
            let l2 = l.matmul(l);
            let second: C64 = v.iter().zip(&l2.matvec(v)).map(|(a, b)| a.conj() * b).sum();
            prop_assert!((s.commutator - (second.re - mean.re * mean.re)).abs() < 1e-9);
        }
    }

    #[test]
    fn hellinger_identities(seed in any::<u64>(), dim in 2usize..6, x in -4.0f64..4.0) {
        let (_, rho, obs) = setup(seed, dim);
        let e = hellinger_mode_expansion(&rho, &obs, x).unwrap();
        prop_assert!((e.direct - e.expansion).abs() < 1e-10);
        prop_assert!(e.expansion_imag.abs() < 1e-10);
        let avg = hellinger_average(&rho, &obs, 0.9, 80).unwrap();
        prop_assert!((avg - scaled_measure(&rho, &obs, 0.9).unwrap().value).abs() < 1e-7);
    }

    #[test]
    fn sandwich_holds(seed in any::<u64>(), dim in 2usize..6, sigma in 0.2f64..4.0) {
        let (_, rho, obs) = setup(seed, dim);
        let b = sandwich_bounds(&rho, &obs, sigma).unwrap();
        prop_assert!(b.holds, "{b:?}");
    }
}

fn embed_local(op: &CMatrix, site: usize, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1);
    for k in 0..n {
        let factor = if k == site { op.clone() } else { CMatrix::identity(2) };
        out = out.kron(&factor);
    }
    out
}

#[test]
fn skew_information_additive_on_products() {
    let mut rng = rng_from_seed(77);
    for n in [2usize, 3] {
        for _ in 0..10 {
            let locals: Vec<HermitianMatrix> = (0..n).map(|_| random_hermitian(2, &mut rng)).collect();
            let sites: Vec<QuantumState> = (0..n).map(|_| random_state(2, &mut rng)).collect();
            let mut total = CMatrix::zeros(1 << n, 1 << n);
            for (i, l) in locals.iter().enumerate() {
                total += &embed_local(l, i, n);
            }
            let collective = Observable::new(HermitianMatrix::symmetrized(total)).unwrap();
            let mut product = sites[0].clone();
            for s in &sites[1..] {
                product = product.tensor(s);
            }
            let sum: f64 = sites
                .iter()
                .zip(&locals)
                .map(|(s, l)| skew_information(s, &Observable::new(l.clone()).unwrap()).unwrap())
                .sum();
            let whole = skew_information(&product, &collective).unwrap();
            assert!((whole - sum).abs() < 1e-10, "n = {n}: {whole} vs {sum}");
        }
    }
}

#[test]
fn qutrit_fixture_under_mode_killing() {
    let s = 1.0 / 3f64.sqrt();
    let rho = QuantumState::pure(vec![C64::new(s, 0.0); 3]).unwrap();
    let obs = Observable::new(HermitianMatrix::from_real_diag(&[-1.0, 0.0, 1.0])).unwrap();
    let ch = qmacro::dynamics::partial_dephasing(&obs, &[1.0, -1.0]).unwrap();
    let out = ch.apply(&rho).unwrap();
    let (p0, p1) = (mode_profile(&rho, &obs).unwrap(), mode_profile(&out, &obs).unwrap());
    let one = p0.spectrum.index_of(1.0).unwrap();
    let two = p0.spectrum.index_of(2.0).unwrap();
    assert!((p0.a_hs[one] - 2.0 / 9.0).abs() < 1e-12);
    assert!((p0.a_hs[two] - 1.0 / 9.0).abs() < 1e-12);
    assert!(p1.a_hs[one].abs() < 1e-12);
    assert!((p1.a_hs[two] - 1.0 / 6.0).abs() < 1e-12);
    assert!((total_asymmetry(&rho, &obs).unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((total_asymmetry(&out, &obs).unwrap() - 1.0 / 3.0).abs() < 1e-12);
}
