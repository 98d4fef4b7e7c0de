use rand::Rng;
use rand_distr::{Distribution, Exp, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Block arrival process `γ(1) < γ(2) < …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalProcess {
    /// `γ(t) = t`.
    #[default]
    Deterministic,
    /// Exponential inter-arrivals with the given rate.
    Poisson { rate: f64 },
    /// Slotted time, each slot succeeds with probability `p`; inter-arrivals
    /// are geometric on `{1, 2, …}`.
    Geometric { p: f64 },
}

impl ArrivalProcess {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ArrivalProcess::Deterministic => Ok(()),
            ArrivalProcess::Poisson { rate } if !(rate > 0.0 && rate.is_finite()) => {
                Err(Error::param("rate", format!("must be positive, got {rate}")))
            }
            ArrivalProcess::Geometric { p } if !(p > 0.0 && p <= 1.0) => {
                Err(Error::param("p", format!("must lie in (0, 1], got {p}")))
            }
            _ => Ok(()),
        }
    }

    pub fn is_deterministic(&self) -> bool {
        matches!(self, ArrivalProcess::Deterministic)
    }
}

pub fn generate_arrivals<R: Rng + ?Sized>(process: &ArrivalProcess, t: u32, rng: &mut R) -> Result<Vec<f64>> {
    if t == 0 {
        return Err(Error::param("t", "need at least one epoch"));
    }
    process.validate()?;
    let times = match *process {
        ArrivalProcess::Deterministic => (1..=t).map(f64::from).collect(),
        ArrivalProcess::Poisson { rate } => {
            let exp = Exp::new(rate).map_err(|e| Error::param("rate", e.to_string()))?;
            let mut now = 0.0;
            (0..t)
                .map(|_| {
                    let mut gap = exp.sample(rng);
                    while gap <= 0.0 {
                        gap = exp.sample(rng);
                    }
                    now += gap;
                    now
                })
                .collect()
        }
        ArrivalProcess::Geometric { p } => {
            let geo = Geometric::new(p).map_err(|e| Error::param("p", e.to_string()))?;
            let mut slot = 0u64;
            (0..t)
                .map(|_| {
                    // rand_distr counts failures before the first success.
                    slot += 1 + geo.sample(rng);
                    slot as f64
                })
                .collect()
        }
    };
    Ok(times)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};

    fn rng() -> crate::rng::StreamRng {
        stream(11, Purpose::Arrivals, 0)
    }

    #[test]
    fn deterministic_is_identity() {
        let v = generate_arrivals(&ArrivalProcess::Deterministic, 3, &mut rng()).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn geometric_with_certain_success() {
        let v = generate_arrivals(&ArrivalProcess::Geometric { p: 1.0 }, 4, &mut rng()).unwrap();
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn poisson_mean_gap() {
        let n = 100_000;
        let v = generate_arrivals(&ArrivalProcess::Poisson { rate: 2.0 }, n, &mut rng()).unwrap();
        let mean = v[n as usize - 1] / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean gap {mean}");
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn geometric_mean_gap_and_integrality() {
        let n = 100_000;
        let v = generate_arrivals(&ArrivalProcess::Geometric { p: 0.25 }, n, &mut rng()).unwrap();
        assert!(v.iter().all(|x| x.fract() == 0.0));
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        let mean = v[n as usize - 1] / n as f64;
        assert!((mean - 4.0).abs() < 0.06, "mean gap {mean}");
    }

    #[test]
    fn rejects_bad_parameters() {
        let mut r = rng();
        assert!(generate_arrivals(&ArrivalProcess::Deterministic, 0, &mut r).is_err());
        assert!(generate_arrivals(&ArrivalProcess::Poisson { rate: 0.0 }, 3, &mut r).is_err());
        assert!(generate_arrivals(&ArrivalProcess::Poisson { rate: -1.0 }, 3, &mut r).is_err());
        assert!(generate_arrivals(&ArrivalProcess::Geometric { p: 0.0 }, 3, &mut r).is_err());
        assert!(generate_arrivals(&ArrivalProcess::Geometric { p: 1.5 }, 3, &mut r).is_err());
    }

    #[test]
    fn same_seed_same_times() {
        let p = ArrivalProcess::Poisson { rate: 1.3 };
        assert_eq!(generate_arrivals(&p, 50, &mut rng()).unwrap(), generate_arrivals(&p, 50, &mut rng()).unwrap());
    }
}
