//! Text syntax for scalars, grids and per-site angles.
//!
//! Scalars are decimal numbers or multiples of `pi`: `0.5`, `pi`, `-pi/4`,
//! `3*pi/8`, `2pi`. Grids are one of
//!
//! * `a,b,c`: explicit values;
//! * `start:stop:count`: `count` evenly spaced values, both ends included;
//! * `lo..hi` or `lo..hi:step`: an inclusive integer range.
//!
//! Site angles are `theta,phi` pairs separated by `;`; a lone `theta` means
//! `phi = 0`.

use std::f64::consts::PI;

/// Largest grid the parser will expand.
pub const MAX_GRID: usize = 1_000_000;

/// A configuration problem, tied to the flag or JSON key that caused it.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{field}: {message}")]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

fn finite(x: f64, text: &str) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{text}` is not a finite number"))
    }
}

fn plain_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    // f64::from_str accepts "inf" and "nan"; only digits, signs, '.', 'e' allowed here
    if t.is_empty() || !t.chars().all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E')) {
        return Err(format!("`{text}` is not a number"));
    }
    let x: f64 = t.parse().map_err(|_| format!("`{text}` is not a number"))?;
    finite(x, text)
}

/// Parses a scalar: a number or a rational multiple of `pi`.
pub fn parse_scalar(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b)),
        None => (t, None),
    };
    let value = if let Some(prefix) = num.strip_suffix("pi") {
        let prefix = prefix.trim();
        let prefix = prefix.strip_suffix('*').map(str::trim).unwrap_or(prefix);
        let coef = match prefix {
            "" | "+" => 1.0,
            "-" => -1.0,
            p => plain_number(p)?,
        };
        coef * PI
    } else {
        plain_number(num)?
    };
    match den {
        None => Ok(value),
        Some(d) => {
            let d = plain_number(d)?;
            if d == 0.0 {
                return Err(format!("`{text}` divides by zero"));
            }
            finite(value / d, text)
        }
    }
}

fn parse_count(text: &str) -> Result<usize, String> {
    let t = text.trim();
    let c: usize = t.parse().map_err(|_| format!("`{text}` is not a nonnegative integer"))?;
    Ok(c)
}

fn parse_int(text: &str) -> Result<i64, String> {
    let t = text.trim();
    t.parse().map_err(|_| format!("`{text}` is not an integer"))
}

/// Parses a grid into its values, in order.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("empty grid".into());
    }
    if let Some((lo, rest)) = t.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, s)) => (h, parse_count(s)?),
            None => (rest, 1),
        };
        let (lo, hi) = (parse_int(lo)?, parse_int(hi)?);
        if step == 0 {
            return Err("range step must be positive".into());
        }
        if hi < lo {
            return Err(format!("range {lo}..{hi} is empty"));
        }
        let len = ((hi as i128 - lo as i128) / step as i128 + 1) as u128;
        if len > MAX_GRID as u128 {
            return Err(format!("range has {len} points, limit is {MAX_GRID}"));
        }
        return Ok((0..len as i128).map(|i| (lo as i128 + i * step as i128) as f64).collect());
    }
    if t.contains(':') {
        let parts: Vec<&str> = t.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("`{t}` is not start:stop:count"));
        }
        let (a, b) = (parse_scalar(parts[0])?, parse_scalar(parts[1])?);
        let count = parse_count(parts[2])?;
        if count == 0 || count > MAX_GRID {
            return Err(format!("grid count must be in 1..={MAX_GRID}, got {count}"));
        }
        if count == 1 {
            return Ok(vec![a]);
        }
        let h = (b - a) / (count - 1) as f64;
        if !h.is_finite() {
            return Err(format!("`{t}` spacing is not finite"));
        }
        return Ok((0..count).map(|i| if i + 1 == count { b } else { a + h * i as f64 }).collect());
    }
    t.split(',').map(parse_scalar).collect()
}

/// Parses a grid of positive integers (particle numbers).
pub fn parse_count_grid(text: &str) -> Result<Vec<usize>, String> {
    parse_grid(text)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 && x <= MAX_GRID as f64 {
                Ok(x as usize)
            } else {
                Err(format!("{x} is not a positive integer"))
            }
        })
        .collect()
}

/// Parses `theta,phi;theta,phi;...` site angles.
pub fn parse_sites(text: &str) -> Result<Vec<(f64, f64)>, String> {
    let t = text.trim();
    if t.is_empty() {
        return Err("no sites given".into());
    }
    let mut out = Vec::new();
    for item in t.split(';') {
        if out.len() >= MAX_GRID {
            return Err(format!("more than {MAX_GRID} sites"));
        }
        let mut parts = item.split(',');
        let theta = parse_scalar(parts.next().unwrap_or(""))?;
        let phi = match parts.next() {
            Some(p) => parse_scalar(p)?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(format!("site `{item}` has more than two angles"));
        }
        out.push((theta, phi));
    }
    Ok(out)
}
