//! Fixed-step integration of the three-variable convection flow
//! `dx = sigma (y - x)`, `dy = x (rho - z) - y`, `dz = x y - beta z`.

use crate::error::{Error, Result};
use crate::series::EventSeries;

use super::DIVERGENCE_BOUND;

/// Flow parameters. The default is the classical chaotic set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Integration time step.
    pub dt: f64,
    /// Steps discarded before the first recorded sample.
    pub transient_steps: usize,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            dt: 0.01,
            transient_steps: 1000,
        }
    }
}

#[inline]
fn derivative(p: &LorenzParams, s: [f64; 3]) -> [f64; 3] {
    let [x, y, z] = s;
    [
        p.sigma * (y - x),
        x * (p.rho - z) - y,
        x * y - p.beta * z,
    ]
}

/// One classical 4th-order Runge-Kutta step. Fixed-step on purpose:
/// adaptive stepping would break bit-reproducibility.
#[inline]
fn rk4_step(p: &LorenzParams, s: [f64; 3]) -> [f64; 3] {
    let h = p.dt;
    let k1 = derivative(p, s);
    let k2 = derivative(p, advance(s, k1, h / 2.0));
    let k3 = derivative(p, advance(s, k2, h / 2.0));
    let k4 = derivative(p, advance(s, k3, h));
    let mut out = s;
    for c in 0..3 {
        out[c] = s[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
    }
    out
}

#[inline]
fn advance(s: [f64; 3], k: [f64; 3], h: f64) -> [f64; 3] {
    [s[0] + h * k[0], s[1] + h * k[1], s[2] + h * k[2]]
}

/// Integrate the flow and record `n` samples of each coordinate after the
/// transient. The three returned series are sample-aligned.
pub fn lorenz_series(
    initial: [f64; 3],
    params: &LorenzParams,
    n: usize,
) -> Result<(EventSeries, EventSeries, EventSeries)> {
    if !(params.dt > 0.0 && params.dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "dt must be > 0, got {}",
            params.dt
        )));
    }
    if n < 1 {
        return Err(Error::InsufficientData("n must be >= 1".into()));
    }
    if initial.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("initial state must be finite".into()));
    }

    let mut state = initial;
    let check = |state: [f64; 3], step: usize| -> Result<()> {
        let mag = state.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !mag.is_finite() || mag > DIVERGENCE_BOUND {
            return Err(Error::Divergence {
                step,
                magnitude: mag,
                bound: DIVERGENCE_BOUND,
            });
        }
        Ok(())
    };

    for step in 0..params.transient_steps {
        state = rk4_step(params, state);
        check(state, step)?;
    }

    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut zs = Vec::with_capacity(n);
    xs.push(state[0]);
    ys.push(state[1]);
    zs.push(state[2]);
    for step in 1..n {
        state = rk4_step(params, state);
        check(state, params.transient_steps + step)?;
        xs.push(state[0]);
        ys.push(state[1]);
        zs.push(state[2]);
    }

    let label = format!(
        "lorenz(sigma={},rho={},beta={},dt={})",
        params.sigma, params.rho, params.beta, params.dt
    );
    Ok((
        EventSeries::new(xs, format!("{label}/x"), None)?,
        EventSeries::new(ys, format!("{label}/y"), None)?,
        EventSeries::new(zs, format!("{label}/z"), None)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_is_an_equilibrium() {
        let (x, y, z) = lorenz_series([0.0, 0.0, 0.0], &LorenzParams::default(), 5).unwrap();
        assert!(x.values().iter().all(|&v| v == 0.0));
        assert!(y.values().iter().all(|&v| v == 0.0));
        assert!(z.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn fixed_step_integration_is_bit_deterministic() {
        let p = LorenzParams::default();
        let (x1, _, z1) = lorenz_series([1.0, 1.0, 1.0], &p, 2000).unwrap();
        let (x2, _, z2) = lorenz_series([1.0, 1.0, 1.0], &p, 2000).unwrap();
        for (a, b) in x1.values().iter().zip(x2.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        for (a, b) in z1.values().iter().zip(z2.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn rejects_bad_dt() {
        let p = LorenzParams {
            dt: 0.0,
            ..LorenzParams::default()
        };
        assert!(lorenz_series([1.0, 1.0, 1.0], &p, 10).is_err());
    }

    #[test]
    fn default_parameters_stay_finite_for_a_million_steps() {
        let p = LorenzParams {
            transient_steps: 0,
            ..LorenzParams::default()
        };
        let result = lorenz_series([1.0, 1.0, 1.0], &p, 1_000_000);
        assert!(result.is_ok());
    }
}
