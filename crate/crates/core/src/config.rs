use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Solver parameters. Stored in `f64` regardless of the scalar type of the solve.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Stationarity constant used for support selection.
    pub tau: f64,
    /// Stopping tolerance on `‖F(Y;T)‖`.
    pub eps: f64,
    pub max_iter: usize,
    /// Backtracking factor.
    pub rho: f64,
    /// Armijo constant, must lie in `(0, ½)`.
    pub sigma: f64,
    /// Base regularization for the fallback solve, `κ_ℓ = kappa0 / max(ℓ, 1)`.
    pub kappa0: f64,
    pub max_backtracks: usize,
    pub seed: u64,
    /// Reset negative `μ` and `λ` entries to zero after each step. This never
    /// increases the complementarity residual of a pair and keeps the Lagrangian
    /// Hessian from picking up `−|μᵢ|Qᵢ` terms far from a solution.
    pub clamp_multipliers: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            eps: 1e-8,
            max_iter: 10_000,
            rho: 0.5,
            sigma: 0.45,
            kappa0: 0.01,
            max_backtracks: 64,
            seed: 0,
            clamp_multipliers: true,
        }
    }
}

impl SolverConfig {
    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tau", self.tau)?;
        positive("eps", self.eps)?;
        positive("kappa0", self.kappa0)?;
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(Error::InvalidConfig(format!("rho must lie in (0, 1), got {}", self.rho)));
        }
        if !(self.sigma > 0.0 && self.sigma < 0.5) {
            return Err(Error::InvalidConfig(format!("sigma must lie in (0, 1/2), got {}", self.sigma)));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be positive".into()));
        }
        if self.max_backtracks == 0 {
            return Err(Error::InvalidConfig("max_backtracks must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        assert!(c.validate().is_ok());
        assert_eq!((c.tau, c.eps, c.max_iter), (1.0, 1e-8, 10_000));
        assert_eq!((c.rho, c.sigma, c.kappa0, c.max_backtracks), (0.5, 0.45, 0.01, 64));
    }

    #[test]
    fn rejects_out_of_range() {
        for c in [
            SolverConfig { sigma: 0.7, ..Default::default() },
            SolverConfig { sigma: 0.5, ..Default::default() },
            SolverConfig { rho: 1.0, ..Default::default() },
            SolverConfig { tau: 0.0, ..Default::default() },
            SolverConfig { eps: f64::NAN, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
        ] {
            assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))), "{c:?}");
        }
    }
}
