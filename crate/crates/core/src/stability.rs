//! Propagated error of the recursion `u_n = B u_{n−1} + b_n`.
//!
//! Perturbing the start value by `v₀` perturbs every iterate by `v_n = Bⁿv₀`,
//! whatever the forcing, so `|v_n| ≤ ‖Bⁿ‖·|v₀| ≤ M(B)·|v₀|`.

use serde::{Deserialize, Serialize};

use crate::analysis::{power_bound, Verdict, OVERFLOW_GUARD};
use crate::error::{Error, Result};
use crate::export::csv_float;
use crate::linalg::{norm2, LinearMap, C64};
use crate::rng::Lcg;
use crate::symbols::TruncatedOperator;

/// Tolerance of the recursion-difference versus `Bⁿv₀` comparison.
pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Relative slack on the envelope `M̂|v₀|`.
pub const ENVELOPE_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Forcing {
    Zero,
    /// `b_1, b_2, …`; needs at least `K` entries.
    Sequence { terms: Vec<Vec<C64>> },
    /// Entries uniform in the square `[−scale, scale)²`, drawn from the
    /// seeded LCG.
    Generator { seed: u64, scale: f64 },
}

#[derive(Clone, Debug)]
pub struct SchemeRun {
    pub b: TruncatedOperator,
    pub forcing: Forcing,
    pub u0: Vec<C64>,
    pub v0: Vec<C64>,
    pub steps: usize,
}

impl SchemeRun {
    pub fn new(b: TruncatedOperator, forcing: Forcing, u0: Vec<C64>, v0: Vec<C64>, steps: usize) -> Result<Self> {
        let n = b.dim();
        if u0.len() != n {
            return Err(Error::DimensionMismatch(n, u0.len()));
        }
        if v0.len() != n {
            return Err(Error::DimensionMismatch(n, v0.len()));
        }
        if steps == 0 {
            return Err(Error::Invalid("steps must be at least 1".into()));
        }
        if let Forcing::Sequence { terms } = &forcing {
            if terms.len() < steps {
                return Err(Error::Invalid(format!("forcing has {} terms, {steps} steps requested", terms.len())));
            }
            if let Some(t) = terms.iter().find(|t| t.len() != n) {
                return Err(Error::DimensionMismatch(n, t.len()));
            }
        }
        Ok(SchemeRun { b, forcing, u0, v0, steps })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorTrajectory {
    /// `|v_n|` from the difference of the two recursions, `n = 0..=K`.
    pub norms: Vec<f64>,
    /// `M̂·|v₀|`.
    pub bound_envelope: f64,
    pub m_hat: f64,
    /// Largest `|v_n^{diff} − Bⁿv₀| / max(|v₀|, |u_n|)`.
    pub consistency: f64,
    /// Largest `|v_n|/|v₀|`.
    pub max_amplification: f64,
    /// An iterate exceeded the overflow guard and the run stopped early.
    pub unstable: bool,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeOutput {
    /// `|u_n|` of the unperturbed recursion.
    pub u_norms: Vec<f64>,
    pub trajectory: ErrorTrajectory,
}

impl SchemeOutput {
    /// Trajectory table `n,u_norm,v_norm,envelope`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,u_norm,v_norm,envelope\n");
        let env = csv_float(self.trajectory.bound_envelope);
        for (n, (u, v)) in self.u_norms.iter().zip(&self.trajectory.norms).enumerate() {
            out.push_str(&format!("{n},{},{},{env}\n", csv_float(*u), csv_float(*v)));
        }
        out
    }
}

fn forcing_term(f: &Forcing, rng: &mut Option<Lcg>, n: usize, dim: usize) -> Option<Vec<C64>> {
    match f {
        Forcing::Zero => None,
        Forcing::Sequence { terms } => Some(terms[n].clone()),
        Forcing::Generator { scale, .. } => {
            let g = rng.as_mut().expect("generator state");
            Some(g.complex_vec(dim).into_iter().map(|z| z * *scale).collect())
        }
    }
}

fn sub_norm(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Iterates both recursions with identical forcing and certifies the error
/// envelope against the power bound over `0 ≤ n ≤ K`.
pub fn run_scheme(r: &SchemeRun) -> Result<SchemeOutput> {
    let n = r.b.dim();
    let m = power_bound(&r.b, r.steps, 1e-10)?;
    let b = r.b.data();
    let mut rng = match r.forcing {
        Forcing::Generator { seed, .. } => Some(Lcg::new(seed)),
        _ => None,
    };

    let mut u = r.u0.clone();
    let mut w: Vec<C64> = r.u0.iter().zip(&r.v0).map(|(a, b)| a + b).collect();
    let mut v = r.v0.clone();
    let v0 = norm2(&r.v0);
    let mut norms = vec![sub_norm(&w, &u)];
    let mut u_norms = vec![norm2(&u)];
    let mut consistency: f64 = 0.0;
    let mut unstable = false;
    for step in 0..r.steps {
        let bn = forcing_term(&r.forcing, &mut rng, step, n);
        u = b.apply(&u);
        w = b.apply(&w);
        if let Some(bn) = &bn {
            for ((ui, wi), bi) in u.iter_mut().zip(w.iter_mut()).zip(bn) {
                *ui += bi;
                *wi += bi;
            }
        }
        v = b.apply(&v);
        let diff: Vec<C64> = w.iter().zip(&u).map(|(a, b)| a - b).collect();
        let un = norm2(&u);
        let scale = v0.max(un).max(f64::MIN_POSITIVE);
        consistency = consistency.max(sub_norm(&diff, &v) / scale);
        norms.push(norm2(&diff));
        u_norms.push(un);
        if un > OVERFLOW_GUARD || norm2(&w) > OVERFLOW_GUARD {
            unstable = true;
            break;
        }
    }

    let envelope = m.value * v0;
    let max_amp = if v0 > 0.0 { norms.iter().fold(0.0f64, |a, x| a.max(*x)) / v0 } else { 0.0 };
    let within = norms.iter().all(|x| *x <= envelope * (1.0 + ENVELOPE_TOL));
    let verdict = if unstable || consistency > CONSISTENCY_TOL {
        Verdict::Fail
    } else if !m.converged {
        Verdict::Advisory
    } else if within {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(SchemeOutput {
        u_norms,
        trajectory: ErrorTrajectory {
            norms,
            bound_envelope: envelope,
            m_hat: m.value,
            consistency,
            max_amplification: max_amp,
            unstable,
            verdict,
        },
    })
}

/// Seeded start value and a perturbation of norm `eps`.
pub fn seeded_start(dim: usize, seed: u64, eps: f64) -> (Vec<C64>, Vec<C64>) {
    let mut rng = Lcg::new(seed.wrapping_add(1));
    let u0 = rng.complex_vec(dim);
    let mut v0 = rng.complex_vec(dim);
    let s = norm2(&v0);
    v0.iter_mut().for_each(|z| *z *= eps / s);
    (u0, v0)
}
