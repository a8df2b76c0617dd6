use crate::error::SolverError;
use crate::graphs::Kernel;

/// Linear system used by the recovery-matrix step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BStep {
    /// `(2I + λ1 L) B = U P Hᵀ`, the published closed form.
    #[default]
    Published,
    /// `(I + λ1 L + U Uᵀ) B = 2 U P Hᵀ`, the exact stationarity condition
    /// of the recovery subproblem.
    Exact,
}

/// Penalty weights and iteration controls for [`fit`](super::fit).
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Feature-graph smoothness of the recovery matrices.
    pub lambda1: f64,
    /// Fit between the similarity graph and `PᵀP`.
    pub lambda2: f64,
    /// Spectral rank term on the similarity graph.
    pub lambda3: f64,
    /// Frobenius penalty on the view bases.
    pub beta: f64,
    /// View-weight exponent, `r > 1`.
    pub r: f64,
    /// Number of clusters.
    pub c: usize,
    /// Neighbors per feature in the view graphs.
    pub k_graph: usize,
    pub kernel: Kernel,
    pub max_iter: usize,
    /// Stop once the relative objective change falls below this.
    pub tol: f64,
    /// Added to denominators of the multiplicative update.
    pub eps: f64,
    pub seed: u64,
    pub b_step: BStep,
}

impl HyperParams {
    pub fn new(c: usize) -> Self {
        Self {
            lambda1: 1.0,
            lambda2: 1e-5,
            lambda3: 1e-5,
            beta: 1.0,
            r: 2.0,
            c,
            k_graph: 5,
            kernel: Kernel::Heat,
            max_iter: 100,
            tol: 1e-5,
            eps: 1e-10,
            seed: 0,
            b_step: BStep::Published,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: String| Err(SolverError::InvalidParams(msg));
        for (name, value) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("lambda3", self.lambda3),
            ("beta", self.beta),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return bad(format!(
                    "{name} must be a finite nonnegative number, got {value}"
                ));
            }
        }
        if !(self.r > 1.0 && self.r.is_finite()) {
            return bad(format!("r must exceed 1, got {}", self.r));
        }
        if self.c < 2 {
            return bad(format!("cluster count must be at least 2, got {}", self.c));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.eps > 0.0 && self.eps <= 1e-6) {
            return bad(format!("eps must lie in (0, 1e-6], got {}", self.eps));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.k_graph == 0 {
            return bad("k_graph must be positive".into());
        }
        Ok(())
    }
}
