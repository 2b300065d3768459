//! Static thrust curve of one rotor at constant speed, with its exact
//! piecewise-linear inverse.

use thiserror::Error;

/// Quadratic enrichment of the synthetic curve at full deflection.
pub const CURVE_ENRICHMENT: f64 = 0.35;

const SYNTHETIC_POINTS: usize = 181;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurveError {
    #[error("thrust table needs at least two rows")]
    TooShort,
    #[error("thrust table row {row}: {reason}")]
    Row { row: usize, reason: String },
    #[error("thrust table is not strictly increasing at row {0}")]
    NotIncreasing(usize),
}

/// Lookup result. `saturated` is set when the input lay outside the table and
/// was clamped to its edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lookup {
    pub value: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThrustCurve {
    deflection: Vec<f64>,
    thrust: Vec<f64>,
}

impl ThrustCurve {
    pub fn from_table(deflection: Vec<f64>, thrust: Vec<f64>) -> Result<Self, CurveError> {
        if deflection.len() < 2 || deflection.len() != thrust.len() {
            return Err(CurveError::TooShort);
        }
        for i in 0..deflection.len() {
            if !deflection[i].is_finite() || !thrust[i].is_finite() {
                return Err(CurveError::Row {
                    row: i + 1,
                    reason: "non-finite value".into(),
                });
            }
            if i > 0 && (deflection[i] <= deflection[i - 1] || thrust[i] <= thrust[i - 1]) {
                return Err(CurveError::NotIncreasing(i + 1));
            }
        }
        Ok(Self { deflection, thrust })
    }

    /// `T(α) = K_T α (1 + c|α|/α_max)` sampled uniformly over ±α_max.
    pub fn synthetic(thrust_gain: f64, max_deflection: f64) -> Self {
        let n = SYNTHETIC_POINTS;
        let half = (n - 1) / 2;
        let deflection: Vec<f64> = (0..n)
            .map(|i| max_deflection * (i as f64 - half as f64) / half as f64)
            .collect();
        let thrust = deflection
            .iter()
            .map(|&a| thrust_gain * a * (1.0 + CURVE_ENRICHMENT * a.abs() / max_deflection))
            .collect();
        Self::from_table(deflection, thrust).expect("synthetic curve is monotone")
    }

    /// Parses a two-column `deflection_rad, thrust_N` table. Blank lines,
    /// `#` comments and a non-numeric header line are skipped.
    pub fn parse(text: &str) -> Result<Self, CurveError> {
        let (mut d, mut t) = (Vec::new(), Vec::new());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let row_err = |reason: &str| CurveError::Row {
                row: i + 1,
                reason: reason.into(),
            };
            if cols.len() != 2 {
                return Err(row_err("expected two columns"));
            }
            match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                (Ok(a), Ok(b)) => {
                    d.push(a);
                    t.push(b);
                }
                _ if d.is_empty() && i == 0 => continue,
                _ => return Err(row_err("not a number")),
            }
        }
        Self::from_table(d, t)
    }

    pub fn min_deflection(&self) -> f64 {
        self.deflection[0]
    }

    pub fn max_deflection(&self) -> f64 {
        *self.deflection.last().expect("non-empty")
    }

    pub fn min_thrust(&self) -> f64 {
        self.thrust[0]
    }

    pub fn max_thrust(&self) -> f64 {
        *self.thrust.last().expect("non-empty")
    }

    pub fn thrust(&self, deflection: f64) -> Lookup {
        interp(&self.deflection, &self.thrust, deflection)
    }

    pub fn deflection(&self, thrust: f64) -> Lookup {
        interp(&self.thrust, &self.deflection, thrust)
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> Lookup {
    let n = xs.len();
    if x <= xs[0] {
        return Lookup {
            value: ys[0],
            saturated: x < xs[0],
        };
    }
    if x >= xs[n - 1] {
        return Lookup {
            value: ys[n - 1],
            saturated: x > xs[n - 1],
        };
    }
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    Lookup {
        value: y0 + (y1 - y0) * (x - x0) / (x1 - x0),
        saturated: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn curve() -> ThrustCurve {
        ThrustCurve::synthetic(100.0, 0.09)
    }

    #[test]
    fn anchored_at_origin() {
        let c = curve();
        assert_eq!(c.thrust(0.0).value, 0.0);
        assert_eq!(c.deflection(0.0).value, 0.0);
    }

    #[test]
    fn full_deflection_inverse() {
        let c = curve();
        let t = 100.0 * 0.09 * 1.35;
        assert!((c.thrust(0.09).value - t).abs() < 1e-12);
        assert!((c.deflection(t).value - 0.09).abs() < 1e-9);
    }

    #[test]
    fn random_round_trip() {
        let c = curve();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = rng.random_range(-0.09..0.09);
            let back = c.deflection(c.thrust(a).value).value;
            assert!((back - a).abs() < 1e-9);
        }
    }

    #[test]
    fn out_of_envelope_is_flagged() {
        let c = curve();
        let hi = c.thrust(0.2);
        assert!(hi.saturated);
        assert_eq!(hi.value, c.max_thrust());
        let lo = c.deflection(-1e6);
        assert!(lo.saturated);
        assert_eq!(lo.value, -0.09);
        assert!(!c.thrust(0.09).saturated);
    }

    #[test]
    fn nodes_match_formula() {
        let c = curve();
        for a in [-0.09, -0.045, 0.0005, 0.03, 0.0895] {
            let exact = 100.0 * a * (1.0 + 0.35 * f64::abs(a) / 0.09);
            // chord error of a quadratic on 0.001 rad spacing
            assert!((c.thrust(a).value - exact).abs() < 1e-3);
        }
    }

    #[test]
    fn parse_table() {
        let text = "deflection_rad,thrust_N\n# measured\n-0.09, -10\n0 0\n0.09,12.5\n";
        let c = ThrustCurve::parse(text).unwrap();
        assert_eq!(c.max_thrust(), 12.5);
        assert!((c.thrust(0.045).value - 6.25).abs() < 1e-12);
    }

    #[test]
    fn parse_rejects_non_monotone() {
        let err = ThrustCurve::parse("0,0\n0.05,3\n0.04,4\n").unwrap_err();
        assert_eq!(err, CurveError::NotIncreasing(3));
        assert!(matches!(ThrustCurve::parse("0,0\n0.1,x\n"), Err(CurveError::Row { row: 2, .. })));
        assert_eq!(ThrustCurve::parse("0,0\n"), Err(CurveError::TooShort));
    }
}
