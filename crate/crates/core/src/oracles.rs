//! Closed-form mode coherences and measures for spin-coherent, GHZ and
//! product states, used to cross-check the numerical pipeline.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::states::{bloch_angle, ln_binomial, SpinAxis};

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// Complementary error function.
///
/// Power series of `erf` below 2, a continued fraction above, and the
/// reflection `erfc(-x) = 2 - erfc(x)` for negative arguments.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.0 {
        return 1.0 - erf_series(x);
    }
    if x > 27.5 {
        return 0.0;
    }
    (-x * x).exp() / PI.sqrt() * continued_fraction(x)
}

fn erf_series(x: f64) -> f64 {
    // erf(x) = 2/sqrt(pi) e^{-x^2} sum_n 2^n x^{2n+1} / (1 3 5 ... (2n+1))
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    while term.abs() > 1e-17 * sum.abs() {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `1 / (x + (1/2) / (x + 1 / (x + (3/2) / (x + ...))))` by modified Lentz.
fn continued_fraction(x: f64) -> f64 {
    let tiny = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..5000 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = x + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    1.0 / f
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeNorm {
    TraceNorm,
    HilbertSchmidt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactSum,
    NormalApprox,
}

/// Mode coherence `A(omega)` of the spin-coherent state `|theta, phi>` with
/// respect to `S_z`, for `0 <= omega <= n`.
pub fn coherent_modes(n: usize, theta: f64, omega: usize, which: ModeNorm, method: Method) -> Result<f64> {
    if n == 0 {
        return Err(Error::EmptySystem);
    }
    if omega > n {
        return Err(Error::InvalidArgument(format!("mode {omega} exceeds N = {n}")));
    }
    Ok(match method {
        Method::ExactSum => exact_sum(n, theta, omega, which),
        Method::NormalApprox => normal_approx(n, theta, omega as f64, which),
    })
}

fn exact_sum(n: usize, theta: f64, omega: usize, which: ModeNorm) -> f64 {
    let (c, s) = ((theta / 2.0).cos().abs(), (theta / 2.0).sin().abs());
    let (lc, ls) = (c.ln(), s.ln());
    // x^0 = 1 even for x = 0
    let pow_log = |ln_base: f64, e: f64| if e == 0.0 { 0.0 } else { e * ln_base };
    let scale = match which {
        ModeNorm::TraceNorm => 1.0,
        ModeNorm::HilbertSchmidt => 2.0,
    };
    let mut acc = 0.0;
    for k in omega..=n {
        let lb = ln_binomial(n, k) + ln_binomial(n, k - omega);
        let ec = (2 * n - 2 * k + omega) as f64;
        let es = (2 * k - omega) as f64;
        let log_term = scale * (0.5 * lb + pow_log(lc, ec) + pow_log(ls, es));
        acc += log_term.exp();
    }
    acc
}

fn normal_approx(n: usize, theta: f64, omega: f64, which: ModeNorm) -> f64 {
    let n = n as f64;
    let v = n * theta.sin().powi(2);
    if v == 0.0 {
        return if omega == 0.0 { 1.0 } else { 0.0 };
    }
    let shift = omega - 2.0 * n * (theta / 2.0).sin().powi(2);
    match which {
        ModeNorm::TraceNorm => 0.5 * (-omega * omega / (2.0 * v)).exp() * erfc(shift / (2.0 * v).sqrt()),
        ModeNorm::HilbertSchmidt => {
            (-omega * omega / v).exp() * erfc(shift / v.sqrt()) / (2.0 * (PI * v).sqrt())
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateFamily {
    SpinCoherent { n: usize, theta: f64, phi: f64 },
    Ghz { n: usize, theta: f64, phi: f64 },
    /// One `(theta, phi)` Bloch direction per site.
    Product { sites: Vec<(f64, f64)> },
}

/// Measures with a closed form: the trace-norm and HS measures with
/// `f = omega^2`, and the scaled measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureSpec {
    TraceOmegaSquared,
    HsOmegaSquared,
    Scaled { sigma: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedForm {
    pub name: &'static str,
    pub value: f64,
    /// True where the closed form is itself an approximation.
    pub approximate: bool,
}

fn unsupported(what: &str) -> Error { Error::UnsupportedCombination(what.to_string()) }

fn is_polar(axis: SpinAxis) -> bool { axis.theta.sin().abs() < 1e-14 }

/// The closed form for `measure` on `family`, with the collective spin along
/// `axis` as the observable.
pub fn closed_form_measures(family: &StateFamily, measure: MeasureSpec, axis: SpinAxis) -> Result<ClosedForm> {
    if let MeasureSpec::Scaled { sigma } = measure {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::NonPositiveSigma(sigma));
        }
    }
    match family {
        StateFamily::SpinCoherent { n, theta, phi } => {
            // a rotated coherent state is coherent about the new axis
            let t = bloch_angle(*theta, *phi, axis);
            let n = *n as f64;
            let s2 = t.sin().powi(2);
            Ok(match measure {
                MeasureSpec::TraceOmegaSquared => ClosedForm {
                    name: "coherent-trace",
                    value: (PI / 2.0).sqrt() * n.powf(1.5) * t.sin().abs().powi(3),
                    approximate: true,
                },
                MeasureSpec::HsOmegaSquared => {
                    ClosedForm { name: "coherent-hs", value: n * s2 / 4.0, approximate: false }
                }
                MeasureSpec::Scaled { sigma } => ClosedForm {
                    name: "coherent-scaled",
                    value: 1.0 - (1.0 + n * s2 / (8.0 * sigma * sigma)).powf(-0.5),
                    approximate: true,
                },
            })
        }
        StateFamily::Ghz { n, theta, .. } => {
            let nf = *n as f64;
            let s = theta.sin();
            match measure {
                MeasureSpec::HsOmegaSquared if is_polar(axis) => {
                    Ok(ClosedForm { name: "ghz-hs", value: nf * nf * s * s / 4.0, approximate: false })
                }
                MeasureSpec::HsOmegaSquared if *n > 2 => {
                    let (ct, st) = (axis.theta.cos(), axis.theta.sin());
                    Ok(ClosedForm {
                        name: "ghz-hs-axis",
                        value: nf * nf * s * s * ct * ct / 4.0 + nf * st * st / 4.0,
                        approximate: false,
                    })
                }
                MeasureSpec::HsOmegaSquared => Err(unsupported("tilted-axis GHZ form needs N > 2")),
                MeasureSpec::TraceOmegaSquared if is_polar(axis) => {
                    Ok(ClosedForm { name: "ghz-trace", value: nf * nf * s.abs() / 2.0, approximate: false })
                }
                MeasureSpec::Scaled { sigma } if is_polar(axis) => Ok(ClosedForm {
                    name: "ghz-scaled",
                    value: 0.5 * s * s * -(-nf * nf / (8.0 * sigma * sigma)).exp_m1(),
                    approximate: false,
                }),
                _ => Err(unsupported("GHZ trace and scaled forms need the polar axis")),
            }
        }
        StateFamily::Product { sites } => match measure {
            MeasureSpec::HsOmegaSquared => {
                if sites.is_empty() {
                    return Err(Error::EmptySystem);
                }
                let value = sites.iter().map(|&(t, p)| bloch_angle(t, p, axis).sin().powi(2)).sum::<f64>() / 4.0;
                Ok(ClosedForm { name: "product-hs", value, approximate: false })
            }
            _ => Err(unsupported("product states only have the HS closed form")),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn simpson_erfc(x: f64) -> f64 {
        // composite Simpson on [x, x + 12], far beyond where e^{-t^2} matters
        let m = 200_000;
        let h = 12.0 / m as f64;
        let f = |t: f64| (-t * t).exp();
        let mut acc = f(x) + f(x + 12.0);
        for i in 1..m {
            acc += f(x + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        FRAC_2_SQRT_PI * acc * h / 3.0
    }

    #[test]
    fn erfc_values() {
        assert_eq!(erfc(0.0), 1.0);
        for x in [0.1, 0.5, 1.0, 1.9, 2.0, 2.5, 4.0, 7.0] {
            assert!((erfc(-x) - (2.0 - erfc(x))).abs() < 1e-15);
            let q = simpson_erfc(x);
            assert!(((erfc(x) - q) / q).abs() < 1e-12, "x = {x}: {} vs {q}", erfc(x));
        }
    }

    #[test]
    fn two_spin_mode_one() {
        let a = coherent_modes(2, PI / 2.0, 1, ModeNorm::TraceNorm, Method::ExactSum).unwrap();
        assert!((a - 2f64.sqrt() / 2.0).abs() < 1e-15);
        for w in 1..=5 {
            assert_eq!(coherent_modes(5, 0.0, w, ModeNorm::HilbertSchmidt, Method::ExactSum).unwrap(), 0.0);
        }
        assert!(coherent_modes(3, 1.0, 4, ModeNorm::TraceNorm, Method::ExactSum).is_err());
    }

    #[test]
    fn normal_approximation_band() {
        let exact = coherent_modes(200, PI / 2.0, 14, ModeNorm::TraceNorm, Method::ExactSum).unwrap();
        let approx = coherent_modes(200, PI / 2.0, 14, ModeNorm::TraceNorm, Method::NormalApprox).unwrap();
        assert!(((approx - exact) / exact).abs() < 0.02);
    }

    #[test]
    fn closed_form_reductions() {
        let (n, theta) = (7, 0.9);
        let g = StateFamily::Ghz { n, theta, phi: 0.0 };
        let polar = closed_form_measures(&g, MeasureSpec::HsOmegaSquared, SpinAxis::Z).unwrap();
        let tilted = closed_form_measures(&g, MeasureSpec::HsOmegaSquared, SpinAxis::new(1e-20, 0.4)).unwrap();
        assert!((polar.value - tilted.value).abs() < 1e-12);
        let plus = StateFamily::Product { sites: vec![(PI / 2.0, 0.0); 9] };
        let p = closed_form_measures(&plus, MeasureSpec::HsOmegaSquared, SpinAxis::Z).unwrap();
        assert!((p.value - 9.0 / 4.0).abs() < 1e-15);
        assert!(matches!(
            closed_form_measures(&plus, MeasureSpec::TraceOmegaSquared, SpinAxis::Z),
            Err(Error::UnsupportedCombination(_))
        ));
        assert!(matches!(
            closed_form_measures(&g, MeasureSpec::Scaled { sigma: 1.0 }, SpinAxis::new(0.5, 0.0)),
            Err(Error::UnsupportedCombination(_))
        ));
    }
}
