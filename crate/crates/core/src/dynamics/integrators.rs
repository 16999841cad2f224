//! Exponential integrators for `∂ₜû = Lû + N̂(û)` with diagonal `L`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{ModelSpec, Semilinear, Workspace};
use crate::spectral::Field;
use crate::{Error, Result};

/// `φ₁(z), φ₂(z), φ₃(z)` for real `z`, with `φ_k(z) = Σ_j z^j/(j+k)!`.
///
/// The closed forms cancel catastrophically near `z = 0`, so the series is used
/// for `|z| < 1`.
pub fn phi123(z: f64) -> (f64, f64, f64) {
    if z.abs() < 1.0 {
        let mut out = [0.0; 3];
        for (k, slot) in out.iter_mut().enumerate() {
            // 1/(k+1)! then z^j/(j+k+1)!
            let mut term = 1.0 / (1..=k + 1).product::<usize>() as f64;
            let mut sum = term;
            for j in 1..24 {
                term *= z / (j + k + 1) as f64;
                sum += term;
            }
            *slot = sum;
        }
        (out[0], out[1], out[2])
    } else {
        let e = z.exp();
        let p1 = (e - 1.0) / z;
        let p2 = (p1 - 1.0) / z;
        let p3 = (p2 - 0.5) / z;
        (p1, p2, p3)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Fourth-order exponential Runge–Kutta: Krogstad's stages with the
    /// Cox–Matthews weights.
    #[default]
    Etdrk4,
    /// Second-order exponential Adams–Bashforth, started by one ETD2RK step.
    Imex,
}

#[derive(Clone, Debug)]
struct Etdrk4Coeffs {
    dt: f64,
    e: Vec<f64>,
    /// `e^{z/2}` and `(h/2)·φ₁(z/2)`.
    e2: Vec<f64>,
    q: Vec<f64>,
    /// Final weights on `N(u)`, `N(a) + N(b)` and `N(c)`.
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
    /// `h·φ₂(z/2)`, `h·φ₁(z)` and `h·φ₂(z)` for the later stages.
    k2h: Vec<f64>,
    k1: Vec<f64>,
    k2: Vec<f64>,
}

impl Etdrk4Coeffs {
    fn new(linear: &[f64], dt: f64) -> Self {
        let n = linear.len();
        let mut c = Etdrk4Coeffs {
            dt,
            e: Vec::with_capacity(n),
            e2: Vec::with_capacity(n),
            q: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
            k2h: Vec::with_capacity(n),
            k1: Vec::with_capacity(n),
            k2: Vec::with_capacity(n),
        };
        for &l in linear {
            let z = dt * l;
            let (p1, p2, p3) = phi123(z);
            let (h1, h2, _) = phi123(0.5 * z);
            c.k2h.push(dt * h2);
            c.k1.push(dt * p1);
            c.k2.push(dt * p2);
            c.e.push(z.exp());
            c.e2.push((0.5 * z).exp());
            c.q.push(0.5 * dt * h1);
            c.f1.push(dt * (p1 - 3.0 * p2 + 4.0 * p3));
            c.f2.push(dt * (p2 - 2.0 * p3));
            c.f3.push(dt * (4.0 * p3 - p2));
        }
        c
    }
}

/// Stateless fourth-order stepper with coefficients cached per step size.
#[derive(Clone, Debug)]
pub struct Etdrk4 {
    coeffs: Option<Etdrk4Coeffs>,
}

impl Default for Etdrk4 {
    fn default() -> Self {
        Self::new()
    }
}

impl Etdrk4 {
    pub fn new() -> Self {
        Self { coeffs: None }
    }

    pub fn step(
        &mut self,
        eq: &impl Semilinear,
        ws: &Workspace,
        u: &[Complex64],
        dt: f64,
    ) -> Vec<Complex64> {
        if self.coeffs.as_ref().map_or(true, |c| c.dt != dt) {
            self.coeffs = Some(Etdrk4Coeffs::new(ws.linear(), dt));
        }
        let c = self.coeffs.as_ref().expect("coefficients set");
        let nu = eq.nonlinear(ws, u);
        let a: Vec<Complex64> = (0..u.len()).map(|i| c.e2[i] * u[i] + c.q[i] * nu[i]).collect();
        let na = eq.nonlinear(ws, &a);
        let b: Vec<Complex64> = (0..u.len()).map(|i| a[i] + c.k2h[i] * (na[i] - nu[i])).collect();
        let nb = eq.nonlinear(ws, &b);
        let cc: Vec<Complex64> = (0..u.len())
            .map(|i| c.e[i] * u[i] + c.k1[i] * nu[i] + 2.0 * c.k2[i] * (nb[i] - nu[i]))
            .collect();
        let nc = eq.nonlinear(ws, &cc);
        (0..u.len())
            .map(|i| {
                c.e[i] * u[i]
                    + c.f1[i] * nu[i]
                    + 2.0 * c.f2[i] * (na[i] + nb[i])
                    + c.f3[i] * nc[i]
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
struct Etd2Coeffs {
    dt: f64,
    e: Vec<f64>,
    p1: Vec<f64>,
    p2: Vec<f64>,
}

impl Etd2Coeffs {
    fn new(linear: &[f64], dt: f64) -> Self {
        let mut c = Etd2Coeffs {
            dt,
            e: vec![],
            p1: vec![],
            p2: vec![],
        };
        for &l in linear {
            let z = dt * l;
            let (p1, p2, _) = phi123(z);
            c.e.push(z.exp());
            c.p1.push(dt * p1);
            c.p2.push(dt * p2);
        }
        c
    }
}

/// Second-order exponential multistep stepper. Linear part exact, nonlinear
/// part extrapolated from the two latest evaluations. The history is dropped
/// whenever the step size changes; the first step after that is an ETD2RK
/// step.
#[derive(Clone, Debug, Default)]
pub struct Etd2 {
    coeffs: Option<Etd2Coeffs>,
    /// Nonlinear term at the previous accepted state.
    previous: Option<Vec<Complex64>>,
}

impl Etd2 {
    pub fn new() -> Self {
        Self::default()
    }

    /// Forgets the multistep history.
    pub fn reset(&mut self) {
        self.previous = None;
    }

    /// Advances `u` by `dt`. The caller must call [`Self::commit`] with the
    /// returned nonlinear term when the step is accepted.
    pub fn step(
        &mut self,
        eq: &impl Semilinear,
        ws: &Workspace,
        u: &[Complex64],
        dt: f64,
    ) -> (Vec<Complex64>, Vec<Complex64>) {
        if self.coeffs.as_ref().map_or(true, |c| c.dt != dt) {
            self.coeffs = Some(Etd2Coeffs::new(ws.linear(), dt));
            self.previous = None;
        }
        let c = self.coeffs.as_ref().expect("coefficients set");
        let nu = eq.nonlinear(ws, u);
        let out = match &self.previous {
            Some(prev) => (0..u.len())
                .map(|i| c.e[i] * u[i] + (c.p1[i] + c.p2[i]) * nu[i] - c.p2[i] * prev[i])
                .collect(),
            None => {
                let a: Vec<Complex64> = (0..u.len()).map(|i| c.e[i] * u[i] + c.p1[i] * nu[i]).collect();
                let na = eq.nonlinear(ws, &a);
                (0..u.len()).map(|i| a[i] + c.p2[i] * (na[i] - nu[i])).collect()
            }
        };
        (out, nu)
    }

    pub fn commit(&mut self, nonlinear_at_start: Vec<Complex64>) {
        self.previous = Some(nonlinear_at_start);
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", format!("{dt} must be positive")));
    }
    Ok(())
}

fn finish(field: &Field, coeffs: Vec<Complex64>, t: f64) -> Result<Field> {
    let out = Field::from_spectral(field.grid(), coeffs);
    match out {
        Err(Error::NonFinite { .. }) => Err(Error::Blowup { t }),
        other => other,
    }
}

/// One fourth-order exponential step of `model`.
pub fn step_etdrk4(field: &Field, model: &ModelSpec, dt: f64) -> Result<Field> {
    check_dt(dt)?;
    let ws = Workspace::new(field.grid(), model);
    let out = Etdrk4::new().step(model, &ws, field.spectral(), dt);
    finish(field, out, dt)
}

/// One self-starting second-order step (ETD2RK) of `model`. For multistep
/// runs use [`Etd2`] directly or [`super::evolve`] with [`Scheme::Imex`].
pub fn step_imex(field: &Field, model: &ModelSpec, dt: f64) -> Result<Field> {
    check_dt(dt)?;
    let ws = Workspace::new(field.grid(), model);
    let (out, _) = Etd2::new().step(model, &ws, field.spectral(), dt);
    finish(field, out, dt)
}

/// Runs `steps` fixed steps of size `dt` with the chosen scheme.
pub fn integrate_fixed(
    eq: &impl Semilinear,
    h0: &Field,
    dt: f64,
    steps: usize,
    scheme: Scheme,
) -> Result<Field> {
    check_dt(dt)?;
    let ws = Workspace::new(h0.grid(), eq);
    let mut u = h0.spectral().to_vec();
    match scheme {
        Scheme::Etdrk4 => {
            let mut s = Etdrk4::new();
            for _ in 0..steps {
                u = s.step(eq, &ws, &u, dt);
            }
        }
        Scheme::Imex => {
            let mut s = Etd2::new();
            for _ in 0..steps {
                let (next, n0) = s.step(eq, &ws, &u, dt);
                s.commit(n0);
                u = next;
            }
        }
    }
    finish(h0, u, dt * steps as f64)
}
