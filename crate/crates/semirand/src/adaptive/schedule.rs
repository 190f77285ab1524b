//! Round budgets for the phased embedding strategies.

/// Budgets and knobs for the two-stage spanning strategy.
///
/// `degree_cap` is `min(2 * degeneracy, delta)`: the switching analysis
/// only touches vertices of degree at most this cap, so looser targets
/// (forests) get much shorter switching phases.
#[derive(Clone, Debug)]
pub struct PhaseSchedule {
    pub delta: usize,
    pub degeneracy: usize,
    pub degree_cap: usize,
    /// Target fraction of vertices allowed to stay bad after the filling
    /// stage; only sizes `ell0`.
    pub alpha: f64,
    /// Filling-stage rounds.
    pub ell0: u64,
    /// First switching-phase rounds.
    pub ell1: u64,
    pub max_phase2_iterations: usize,
}

pub const DEFAULT_MAX_PHASE2_ITERATIONS: usize = 40;

/// Default bad-fraction target `1 / (16 delta^3)`, floored so that
/// `ceil(alpha * n) >= 1`.
pub fn default_alpha(n: usize, delta: usize) -> f64 {
    let a = 1.0 / (16.0 * (delta.max(1) as f64).powi(3));
    a.max(1.0 / n.max(1) as f64)
}

/// Much stricter bad-fraction preset, `1e-8 / delta^5`; at workbench sizes
/// it usually leaves no bad vertices at all.
pub fn conservative_alpha(delta: usize) -> f64 {
    1e-8 / (delta.max(1) as f64).powi(5)
}

impl PhaseSchedule {
    /// Schedule with all the standard budgets.
    ///
    /// The filling stage runs `(d0 + sqrt(6 d0 ln(2 delta / alpha))) n`
    /// rounds with `d0 = max(floor(delta/2), 1)`; the first switching phase
    /// runs `(ln(2d) + d + 3 sqrt(d)) n` rounds with `d = degree_cap`.
    pub fn new(n: usize, delta: usize, degeneracy: usize, alpha: f64) -> Self {
        assert!(alpha > 0.0 && alpha < 1.0, "alpha must be in (0, 1)");
        let degeneracy = degeneracy.max(1);
        if delta == 0 {
            return Self {
                delta,
                degeneracy,
                degree_cap: 0,
                alpha,
                ell0: 0,
                ell1: 0,
                max_phase2_iterations: DEFAULT_MAX_PHASE2_ITERATIONS,
            };
        }
        let d = (2 * degeneracy).min(delta);
        let nf = n as f64;
        let d0 = (delta / 2).max(1) as f64;
        let ell0 = (d0 + (6.0 * d0 * (2.0 * delta as f64 / alpha).ln()).sqrt()) * nf;
        let df = d as f64;
        let ell1 = ((2.0 * df).ln() + df + 3.0 * df.sqrt()) * nf;
        Self {
            delta,
            degeneracy,
            degree_cap: d,
            alpha,
            ell0: ell0.ceil() as u64,
            ell1: ell1.ceil() as u64,
            max_phase2_iterations: DEFAULT_MAX_PHASE2_ITERATIONS,
        }
    }

    pub fn defaults(n: usize, delta: usize, degeneracy: usize) -> Self {
        Self::new(n, delta, degeneracy, default_alpha(n, delta))
    }

    /// Rounds for a later switching phase with candidate width `m`:
    /// `ceil(n * m^(-1/(4d)))`, always at least 1.
    pub fn phase2_rounds(&self, n: usize, m: usize) -> u64 {
        assert!(m >= 1);
        let d = self.degree_cap.max(1) as f64;
        let rounds = n as f64 * (m as f64).powf(-1.0 / (4.0 * d));
        (rounds.ceil() as u64).max(1)
    }

    /// Appearance threshold the filling stage must reach per vertex.
    pub fn fill_threshold(&self) -> u64 {
        (self.delta / 2) as u64 + 1
    }
}
