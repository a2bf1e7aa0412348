//! Symbolic test signals.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// A deterministic real function of one variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SignalSpec {
    /// `Σ a·sin(ω x)` over `(amplitude, angular frequency)` pairs.
    HarmonicSum { terms: Vec<(f64, f64)> },
    /// `e^{-decay·x}·sin(ω x)`.
    DampedSine { decay: f64, omega: f64 },
    /// `Σ c_p x^p`, lowest power first.
    Polynomial { coeffs: Vec<f64> },
    Constant { value: f64 },
}

impl SignalSpec {
    /// `sin(4x) + 0.5 sin(8x)`: a tone plus its second harmonic at half amplitude.
    pub fn harmonic() -> Self {
        SignalSpec::HarmonicSum {
            terms: vec![(1.0, 4.0), (0.5, 8.0)],
        }
    }

    /// `e^{-x} sin(8x)`, not band limited.
    pub fn damped() -> Self {
        SignalSpec::DampedSine {
            decay: 1.0,
            omega: 8.0,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SignalSpec::HarmonicSum { terms } => {
                terms.iter().map(|(a, w)| a * (w * x).sin()).sum()
            }
            SignalSpec::DampedSine { decay, omega } => (-decay * x).exp() * (omega * x).sin(),
            SignalSpec::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c),
            SignalSpec::Constant { value } => *value,
        }
    }

    /// Short name used in CSV rows and the CLI.
    pub fn label(&self) -> String {
        if *self == SignalSpec::harmonic() {
            return "harmonic".into();
        }
        if *self == SignalSpec::damped() {
            return "damped".into();
        }
        self.to_string()
    }
}

fn join(values: impl Iterator<Item = String>) -> String {
    values.collect::<Vec<_>>().join(",")
}

impl fmt::Display for SignalSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignalSpec::HarmonicSum { terms } => write!(
                f,
                "sines:{}",
                join(terms.iter().map(|(a, w)| format!("{a}@{w}")))
            ),
            SignalSpec::DampedSine { decay, omega } => write!(f, "damped:{decay}@{omega}"),
            SignalSpec::Polynomial { coeffs } => {
                write!(f, "poly:{}", join(coeffs.iter().map(|c| c.to_string())))
            }
            SignalSpec::Constant { value } => write!(f, "const:{value}"),
        }
    }
}

fn parse_num(s: &str) -> Result<f64, Error> {
    s.trim().parse::<f64>().map_err(|_| Error::InvalidParameter {
        field: "signal",
        reason: format!("`{s}` is not a number"),
    })
}

fn parse_pair(s: &str) -> Result<(f64, f64), Error> {
    let (a, w) = s.split_once('@').ok_or_else(|| Error::InvalidParameter {
        field: "signal",
        reason: format!("expected `amplitude@omega`, got `{s}`"),
    })?;
    Ok((parse_num(a)?, parse_num(w)?))
}

/// Accepted forms: `harmonic`, `damped`, `const:V`, `poly:c0,c1,...`,
/// `sines:a@w,a@w,...`, `damped:decay@omega`.
impl FromStr for SignalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        match s {
            "harmonic" => return Ok(SignalSpec::harmonic()),
            "damped" => return Ok(SignalSpec::damped()),
            _ => {}
        }
        let (kind, body) = s.split_once(':').ok_or_else(|| Error::UnknownTag {
            kind: "signal",
            value: s.to_string(),
        })?;
        let items = || body.split(',').filter(|p| !p.trim().is_empty());
        let spec = match kind {
            "const" => SignalSpec::Constant {
                value: parse_num(body)?,
            },
            "poly" => SignalSpec::Polynomial {
                coeffs: items().map(parse_num).collect::<Result<_, _>>()?,
            },
            "sines" => SignalSpec::HarmonicSum {
                terms: items().map(parse_pair).collect::<Result<_, _>>()?,
            },
            "damped" => {
                let (decay, omega) = parse_pair(body)?;
                SignalSpec::DampedSine { decay, omega }
            }
            _ => {
                return Err(Error::UnknownTag {
                    kind: "signal",
                    value: s.to_string(),
                })
            }
        };
        if let SignalSpec::Polynomial { coeffs } = &spec {
            if coeffs.is_empty() {
                return Err(Error::InvalidParameter {
                    field: "signal",
                    reason: "polynomial needs at least one coefficient".into(),
                });
            }
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_signals() {
        let h = SignalSpec::harmonic();
        let x = 0.3f64;
        assert_eq!(h.eval(x), (4.0 * x).sin() + 0.5 * (8.0 * x).sin());
        let d = SignalSpec::damped();
        assert_eq!(d.eval(x), (-x).exp() * (8.0 * x).sin());
    }

    #[test]
    fn polynomial_ascending_powers() {
        let p = SignalSpec::Polynomial {
            coeffs: vec![1.0, -2.0, 3.0],
        };
        assert_eq!(p.eval(2.0), 1.0 - 4.0 + 12.0);
    }

    #[test]
    fn parse_and_display() {
        for s in ["harmonic", "damped", "const:3", "poly:1,0,2", "sines:1@4,0.5@8", "damped:2@3"] {
            let spec: SignalSpec = s.parse().unwrap();
            let again: SignalSpec = spec.to_string().parse().unwrap();
            assert_eq!(spec, again);
        }
        assert_eq!("sines:1@4,0.5@8".parse::<SignalSpec>().unwrap(), SignalSpec::harmonic());
        assert_eq!(SignalSpec::harmonic().label(), "harmonic");
        assert_eq!("const:2.5".parse::<SignalSpec>().unwrap().label(), "const:2.5");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!("square".parse::<SignalSpec>(), Err(Error::UnknownTag { .. })));
        assert!("const:abc".parse::<SignalSpec>().is_err());
        assert!("sines:1".parse::<SignalSpec>().is_err());
        assert!("poly:".parse::<SignalSpec>().is_err());
    }
}
