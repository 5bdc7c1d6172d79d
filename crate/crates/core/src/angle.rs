//! Angles stored as multiples of π.
//!
//! Propagation phases `e^{iθm}` for integer `m` are evaluated from the reduced
//! multiple `θm/π mod 2`, so quarter-turn angles such as `3π/2` produce the
//! exact table `{1, i, -1, -i}` instead of accumulating rounding error.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An angle held as a multiple of π.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    pub const fn from_pi(multiple: f64) -> Self {
        Angle(multiple)
    }

    pub fn from_radians(radians: f64) -> Self {
        Angle(radians / PI)
    }

    /// The angle divided by π.
    pub fn pi_multiple(self) -> f64 {
        self.0
    }

    pub fn radians(self) -> f64 {
        self.0 * PI
    }

    pub fn cos(self) -> f64 {
        exp_i_pi(self.0).re
    }

    pub fn sin(self) -> f64 {
        exp_i_pi(self.0).im
    }

    /// `e^{i·m·θ}`.
    pub fn phase(self, m: f64) -> Complex64 {
        exp_i_pi(self.0 * m)
    }

    /// Mirror image `π - θ`.
    pub fn supplement(self) -> Self {
        Angle(1.0 - self.0)
    }
}

/// `e^{iπx}`, exact whenever `2x` is an integer.
pub fn exp_i_pi(x: f64) -> Complex64 {
    let reduced = x.rem_euclid(2.0);
    let twice = 2.0 * reduced;
    if twice.fract() == 0.0 {
        // rem_euclid may round up to exactly 2.0
        return match (twice as u32) % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let (s, c) = (PI * reduced).sin_cos();
    Complex64::new(c, s)
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}pi", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseAngleError(String);

impl fmt::Display for ParseAngleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cannot parse angle `{}` (expected e.g. `0.2pi`, `3pi/2` or radians)", self.0)
    }
}

impl std::error::Error for ParseAngleError {}

impl FromStr for Angle {
    type Err = ParseAngleError;

    /// Accepts `0.241pi`, `0.241π`, `pi`, `-pi/2`, `3pi/4`, `1.5*pi`, or a bare
    /// number of radians.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseAngleError(s.to_string());
        let text: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lowered = text.to_ascii_lowercase();
        let Some((coef, denom)) = lowered
            .split_once("pi")
            .or_else(|| lowered.split_once('π'))
        else {
            return lowered.parse::<f64>().map(Angle::from_radians).map_err(|_| err());
        };
        let coef = coef.strip_suffix('*').unwrap_or(coef);
        let multiple = match coef {
            "" | "+" => 1.0,
            "-" => -1.0,
            c => c.parse::<f64>().map_err(|_| err())?,
        };
        let divisor = match denom {
            "" => 1.0,
            d => d
                .strip_prefix('/')
                .ok_or_else(err)?
                .parse::<f64>()
                .map_err(|_| err())?,
        };
        if divisor == 0.0 || !multiple.is_finite() {
            return Err(err());
        }
        Ok(Angle(multiple / divisor))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Radians(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Radians(r) => Ok(Angle::from_radians(r)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quarter_turns_are_exact() {
        let theta = Angle::from_pi(1.5);
        let expected = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        for m in 0..40 {
            assert_eq!(theta.phase(m as f64), expected[m % 4], "m = {m}");
        }
        assert_eq!(Angle::from_pi(0.5).cos(), 0.0);
        assert_eq!(Angle::from_pi(-7.0).phase(1.0), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn generic_phase_matches_libm() {
        let theta = Angle::from_pi(0.3);
        for m in 0..10 {
            let z = theta.phase(m as f64);
            let arg = 0.3 * PI * m as f64;
            assert!((z.re - arg.cos()).abs() < 1e-14);
            assert!((z.im - arg.sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn parses_pi_literals() {
        let cases = [
            ("0.241pi", 0.241),
            ("0.241π", 0.241),
            ("pi", 1.0),
            ("-pi/2", -0.5),
            ("3pi/2", 1.5),
            ("1.5*pi", 1.5),
            (" 0.2 pi ", 0.2),
        ];
        for (text, multiple) in cases {
            assert_eq!(text.parse::<Angle>().unwrap().pi_multiple(), multiple, "{text}");
        }
        let rad: Angle = "1.0".parse().unwrap();
        assert!((rad.radians() - 1.0).abs() < 1e-15);
        assert!("pi/0".parse::<Angle>().is_err());
        assert!("twopi".parse::<Angle>().is_err());
        assert!("".parse::<Angle>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for q in [0.241, 1.5, -0.25, 0.2, 1.0 / 3.0] {
            let a = Angle::from_pi(q);
            assert_eq!(a.to_string().parse::<Angle>().unwrap(), a);
        }
    }
}
