//! Feedback laws, the Δt stability bound and the finite-difference controller.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::DiagonalObservable;
use crate::simulator::{MixerSpec, StateVector};

/// Default finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Map `Λ` from the measured commutator expectation `w` to the next `θ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case", deny_unknown_fields)]
pub enum FeedbackLaw {
    Identity {
        kappa: f64,
    },
    BangBang {
        kappa: f64,
    },
    FiniteTime {
        kappa: f64,
        a1: f64,
    },
    /// Second exponent is `1/a1`.
    FixedTime {
        kappa: f64,
        kappa2: f64,
        a1: f64,
    },
}

impl Default for FeedbackLaw {
    fn default() -> Self {
        FeedbackLaw::Identity { kappa: 1.0 }
    }
}

fn signum0(w: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w.signum()
    }
}

impl FeedbackLaw {
    pub fn validate(&self) -> Result<()> {
        let gain = |name: &str, k: f64| {
            if k > 0.0 && k.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {k}")))
            }
        };
        let exponent = |a: f64| {
            if a > 0.0 && a < 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("a1 must lie in (0, 1), got {a}")))
            }
        };
        match *self {
            FeedbackLaw::Identity { kappa } | FeedbackLaw::BangBang { kappa } => {
                gain("kappa", kappa)
            }
            FeedbackLaw::FiniteTime { kappa, a1 } => {
                gain("kappa", kappa)?;
                exponent(a1)
            }
            FeedbackLaw::FixedTime { kappa, kappa2, a1 } => {
                gain("kappa", kappa)?;
                gain("kappa2", kappa2)?;
                exponent(a1)
            }
        }
    }

    pub fn kappa(&self) -> f64 {
        match *self {
            FeedbackLaw::Identity { kappa }
            | FeedbackLaw::BangBang { kappa }
            | FeedbackLaw::FiniteTime { kappa, .. }
            | FeedbackLaw::FixedTime { kappa, .. } => kappa,
        }
    }

    /// `θ = Λ(w)`; assumes the law has been validated.
    pub fn apply(&self, w: f64) -> f64 {
        let s = signum0(w);
        match *self {
            FeedbackLaw::Identity { kappa } => -kappa * w,
            FeedbackLaw::BangBang { kappa } => -kappa * s,
            FeedbackLaw::FiniteTime { kappa, a1 } => -kappa * s * w.abs().powf(a1),
            FeedbackLaw::FixedTime { kappa, kappa2, a1 } => {
                -kappa * s * w.abs().powf(a1) - kappa2 * s * w.abs().powf(a1.recip())
            }
        }
    }
}

pub fn apply_law(law: &FeedbackLaw, w: f64) -> Result<f64> {
    law.validate()?;
    Ok(law.apply(w))
}

/// Result of [`dt_bound`]; `stall` marks a vanishing commutator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DtBound {
    pub dt: f64,
    pub stall: bool,
}

/// `|w| / (2(2‖H_M‖‖H_P‖ + |w|)(‖H_P‖ + ‖H_M‖|θ_prev|))`.
pub fn dt_bound(w: f64, norm_hm: f64, norm_hp: f64, theta_prev: f64) -> DtBound {
    let w = w.abs();
    if w == 0.0 {
        return DtBound {
            dt: 0.0,
            stall: true,
        };
    }
    let den = 2.0 * (2.0 * norm_hm * norm_hp + w) * (norm_hp + norm_hm * theta_prev.abs());
    DtBound {
        dt: w / den,
        stall: false,
    }
}

/// `-(κ/Δt)(L(h) - L(-h))/(2h)` with `L(θ) = ⟨V_M(θ)ψ|Q|V_M(θ)ψ⟩`.
///
/// The problem layer is omitted from the probes because it commutes with `Q`.
pub fn finite_diff_controller(
    state: &StateVector,
    q: &DiagonalObservable,
    mixer: &MixerSpec,
    dt: f64,
    h: f64,
    kappa: f64,
) -> Result<f64> {
    if !(h > 0.0) || !(dt > 0.0) {
        return Err(Error::Config(format!(
            "finite-difference needs h, dt > 0 (h={h}, dt={dt})"
        )));
    }
    let probe = |theta: f64| -> Result<f64> {
        let mut s = state.clone();
        s.apply_mixer_layer(mixer, theta, dt)?;
        s.expectation_diag(q)
    };
    let slope = (probe(h)? - probe(-h)?) / (2.0 * h);
    Ok(-kappa / dt * slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{init_state, InitKind};

    const LAWS: [FeedbackLaw; 4] = [
        FeedbackLaw::Identity { kappa: 1.3 },
        FeedbackLaw::BangBang { kappa: 0.7 },
        FeedbackLaw::FiniteTime {
            kappa: 2.0,
            a1: 0.4,
        },
        FeedbackLaw::FixedTime {
            kappa: 1.0,
            kappa2: 0.5,
            a1: 0.6,
        },
    ];

    #[test]
    fn law_examples() {
        let id = FeedbackLaw::Identity { kappa: 1.0 };
        assert_eq!(apply_law(&id, 0.7).unwrap(), -0.7);
        let bb = FeedbackLaw::BangBang { kappa: 1.0 };
        assert_eq!(apply_law(&bb, -0.3).unwrap(), 1.0);
        assert_eq!(apply_law(&bb, 0.0).unwrap(), 0.0);
        let ft = FeedbackLaw::FiniteTime {
            kappa: 1.0,
            a1: 0.5,
        };
        assert_eq!(apply_law(&ft, 0.25).unwrap(), -0.5);
        let fx = FeedbackLaw::FixedTime {
            kappa: 1.0,
            kappa2: 1.0,
            a1: 0.5,
        };
        assert!((apply_law(&fx, 0.25).unwrap() - (-0.5 - 0.0625)).abs() < 1e-15);
    }

    #[test]
    fn invalid_laws() {
        for bad in [
            FeedbackLaw::FiniteTime {
                kappa: 1.0,
                a1: 1.0,
            },
            FeedbackLaw::FiniteTime {
                kappa: 1.0,
                a1: 0.0,
            },
            FeedbackLaw::Identity { kappa: 0.0 },
            FeedbackLaw::FixedTime {
                kappa: 1.0,
                kappa2: -1.0,
                a1: 0.5,
            },
        ] {
            assert!(matches!(apply_law(&bad, 1.0), Err(Error::Config(_))));
        }
    }

    #[test]
    fn descent_and_odd_symmetry() {
        for law in LAWS {
            for w in [-3.0, -0.2, -1e-6, 0.0, 1e-6, 0.5, 4.0] {
                let t = law.apply(w);
                assert!(t * w <= 0.0);
                if w != 0.0 {
                    assert!(t * w < 0.0);
                }
                assert_eq!(law.apply(-w), -t);
            }
        }
    }

    #[test]
    fn law_json() {
        let law: FeedbackLaw = serde_json::from_str(r#"{"law":"bang_bang","kappa":1.0}"#).unwrap();
        assert_eq!(law, FeedbackLaw::BangBang { kappa: 1.0 });
        let back = serde_json::to_string(&LAWS[3]).unwrap();
        assert_eq!(serde_json::from_str::<FeedbackLaw>(&back).unwrap(), LAWS[3]);
    }

    #[test]
    fn bound_examples() {
        assert_eq!(
            dt_bound(0.0, 3.0, 10.0, 0.5),
            DtBound {
                dt: 0.0,
                stall: true
            }
        );
        let b = dt_bound(1.0, 1.0, 1.0, 0.0);
        assert!((b.dt - 1.0 / 6.0).abs() < 1e-15);
        assert!(!b.stall);
        assert_eq!(dt_bound(-1.0, 1.0, 1.0, 0.0), b);
    }

    #[test]
    fn finite_difference_vanishes_on_eigenstates() {
        let q = DiagonalObservable::new(vec![3., 5., 2., 9., 1., 6., 3., 10.]).unwrap();
        for j in 0..8 {
            let s = init_state(3, InitKind::Basis(j)).unwrap();
            let u =
                finite_diff_controller(&s, &q, &MixerSpec::TransverseX, 0.1, DEFAULT_FD_STEP, 1.0)
                    .unwrap();
            assert!(u.abs() < 1e-6, "{j}: {u}");
        }
    }
}
