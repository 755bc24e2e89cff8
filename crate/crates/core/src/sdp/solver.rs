use crate::error::{Error, Result};
use crate::linalg::{
    cholesky, eig_hermitian, hpd_inverse, lower_inverse, solve_hermitian_linear, ComplexMatrix,
    HermitianMatrix, C64,
};

use super::{BlockMatrix, SdpProblem};

/// Diagonal shift added to the scaled Schur matrix when its factorization fails.
const SCHUR_REGULARIZATION: f64 = 1e-12;
const MAX_REGULARIZATIONS: usize = 3;
/// Target minimum eigenvalue for shifted starting points.
const START_MIN_EIG: f64 = 1e-3;
const MAX_SHIFTS: usize = 50;
/// Extra iterations allowed after the gap and feasibility tests first pass,
/// spent driving `‖F(x)Z‖_F` below `tol_slack`.
const POLISH_ITERS: usize = 40;
/// Polishing stops once an iterate misses the gap or feasibility tolerance by
/// more than this factor.
const POLISH_LOOSENESS: f64 = 10.0;
const REFINEMENT_STEPS: usize = 2;
/// Lower bound on `λ_min(S^½ Z S^½)/μ` kept along the path.
const NEIGHBORHOOD: f64 = 1e-2;
const BACKTRACK: f64 = 0.8;
const MAX_BACKTRACKS: usize = 30;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub tol_gap: f64,
    pub tol_feas: f64,
    pub max_iter: usize,
    pub step_fraction: f64,
    /// Target for `‖F(x)·Z‖_F`. A small gap alone bounds this only by
    /// `√(‖F(x)‖‖Z‖·gap)`, so iteration continues past `tol_gap` until it holds
    /// or progress stops.
    pub tol_slack: f64,
    pub initial_x: Option<Vec<f64>>,
    pub initial_z: Option<BlockMatrix>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_gap: 1e-9,
            tol_feas: 1e-9,
            max_iter: 200,
            step_fraction: 0.98,
            tol_slack: 1e-9,
            initial_x: None,
            initial_z: None,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_gap > 0.0) || !(self.tol_feas > 0.0) || !(self.tol_slack > 0.0) {
            return Err(Error::InvalidParam("tolerances must be positive".into()));
        }
        if !(self.step_fraction > 0.0 && self.step_fraction < 1.0) {
            return Err(Error::InvalidParam(format!(
                "step fraction {} outside (0, 1)",
                self.step_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    MaxIter,
    NumericalFailure,
}

/// State at the start of one iteration.
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub mu: f64,
    /// `tr{F(x)·Z}`.
    pub gap: f64,
    /// `‖F(x) − S‖_F`.
    pub primal_infeasibility: f64,
    /// `max_i |tr{F_i Z} − c_i|`.
    pub dual_infeasibility: f64,
    /// `‖F(x)·Z‖_F`.
    pub slackness: f64,
    pub primal_step: f64,
    pub dual_step: f64,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub x: Vec<f64>,
    pub z: BlockMatrix,
    pub p_star: f64,
    pub d_star: f64,
    pub gap: f64,
    pub iterations: usize,
    pub status: SolveStatus,
    pub history: Vec<IterationRecord>,
}

/// Interior starting triple: `x`, the primal slack `S ≻ 0`, and `Z ≻ 0`.
#[derive(Clone, Debug)]
pub struct StartingPoint {
    pub x: Vec<f64>,
    pub s: BlockMatrix,
    pub z: BlockMatrix,
    /// Identity multiples added to reach the interior, zero when hints were interior.
    pub primal_shift: f64,
    pub dual_shift: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub primal_min_eig: f64,
    pub dual_min_eig: f64,
    pub eq_residual_max: f64,
    pub gap: f64,
    pub slackness_norm: f64,
}

/// Post-hoc certificate of a candidate pair, computed from the problem data alone.
pub fn dual_residuals(prob: &SdpProblem, x: &[f64], z: &BlockMatrix) -> Result<ResidualReport> {
    if x.len() != prob.m() {
        return Err(Error::DimMismatch { expected: prob.m(), got: x.len() });
    }
    prob.layout().check(z)?;
    let fx = prob.eval(x);
    Ok(ResidualReport {
        primal_min_eig: fx.min_eigenvalue()?,
        dual_min_eig: z.min_eigenvalue()?,
        eq_residual_max: prob.equality_residuals(z).iter().fold(0.0, |m, r| m.max(r.abs())),
        gap: fx.trace_product(z),
        slackness_norm: fx.product_norm(z),
    })
}

fn shift_into_interior(base: &BlockMatrix) -> Result<(BlockMatrix, f64)> {
    if base.min_eigenvalue()? > 0.0 {
        return Ok((base.clone(), 0.0));
    }
    let id = BlockMatrix::new(base.blocks().iter().map(|b| HermitianMatrix::identity(b.dim())).collect());
    let mut t = START_MIN_EIG;
    for _ in 0..MAX_SHIFTS {
        let mut shifted = base.clone();
        shifted.add_scaled(t, &id);
        if shifted.min_eigenvalue()? >= START_MIN_EIG {
            return Ok((shifted, t));
        }
        t *= 2.0;
    }
    Err(Error::CannotCenter)
}

/// Builds an interior starting point from optional hints.
///
/// Hints are used unchanged when strictly inside the cone; otherwise the
/// slack `F(x₀)` or `Z₀` is shifted by doubling multiples of the identity.
/// Malformed hints (wrong length or layout, non-finite entries) are rejected.
pub fn feasible_start(
    prob: &SdpProblem,
    hint_x: Option<&[f64]>,
    hint_z: Option<&BlockMatrix>,
) -> Result<StartingPoint> {
    let x = match hint_x {
        Some(h) => {
            if h.len() != prob.m() {
                return Err(Error::InfeasibleStart(format!(
                    "initial x has {} entries, expected {}",
                    h.len(),
                    prob.m()
                )));
            }
            if h.iter().any(|v| !v.is_finite()) {
                return Err(Error::InfeasibleStart("initial x is not finite".into()));
            }
            h.to_vec()
        }
        None => vec![0.0; prob.m()],
    };
    let z = match hint_z {
        Some(h) => {
            prob.layout()
                .check(h)
                .map_err(|e| Error::InfeasibleStart(format!("initial Z does not conform: {e}")))?;
            if !h.is_finite() {
                return Err(Error::InfeasibleStart("initial Z is not finite".into()));
            }
            h.clone()
        }
        None => BlockMatrix::identity(prob.layout()),
    };
    let (s, primal_shift) = shift_into_interior(&prob.eval(&x))?;
    let (z, dual_shift) = shift_into_interior(&z)?;
    Ok(StartingPoint { x, s, z, primal_shift, dual_shift })
}

/// Largest `α` with `X + α·D ⪰ 0`, or infinity; `X` must be positive definite.
fn max_step(x: &BlockMatrix, d: &BlockMatrix) -> Result<f64> {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.blocks().iter().zip(d.blocks()) {
        let l = cholesky(xb).map_err(|_| Error::NumericalFailure("iterate left the cone".into()))?;
        let li = lower_inverse(&l);
        let w = HermitianMatrix::hermitize(&(&(&li * &**db) * &li.adjoint()));
        let lmin = eig_hermitian(&w)?.min();
        if lmin < 0.0 {
            alpha = alpha.min(-1.0 / lmin);
        }
    }
    Ok(alpha)
}

fn blockwise(
    a: &BlockMatrix,
    f: impl Fn(usize, &HermitianMatrix) -> ComplexMatrix,
) -> Vec<ComplexMatrix> {
    a.blocks().iter().enumerate().map(|(k, b)| f(k, b)).collect()
}

fn trace_pair(f: &BlockMatrix, g: &[ComplexMatrix]) -> f64 {
    f.blocks().iter().zip(g).map(|(a, b)| a.trace_product(b).re).sum()
}

fn hermitian_blocks(g: Vec<ComplexMatrix>) -> BlockMatrix {
    BlockMatrix::new(g.iter().map(HermitianMatrix::hermitize).collect())
}

/// Solves the scaled Schur system, regularizing the diagonal on failure.
fn solve_schur(m: &[Vec<f64>], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = rhs.len();
    let mut d = vec![0.0; n];
    for i in 0..n {
        if !(m[i][i] > 0.0) || !m[i][i].is_finite() {
            return Err(Error::NumericalFailure(format!("Schur diagonal {i} is {}", m[i][i])));
        }
        d[i] = 1.0 / m[i][i].sqrt();
    }
    let b: Vec<C64> = (0..n).map(|i| C64::new(rhs[i] * d[i], 0.0)).collect();
    for attempt in 0..=MAX_REGULARIZATIONS {
        let shift = attempt as f64 * SCHUR_REGULARIZATION;
        let a = HermitianMatrix::hermitize(&ComplexMatrix::from_fn(n, |i, j| {
            let v = m[i][j] * d[i] * d[j] + if i == j { shift } else { 0.0 };
            C64::new(v, 0.0)
        }));
        match solve_hermitian_linear(&a, &b) {
            Ok(y) => return Ok(y.iter().zip(&d).map(|(yi, di)| yi.re * di).collect()),
            Err(Error::SingularSystem) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NumericalFailure("singular Newton system after regularization".into()))
}

struct Workspace<'a> {
    prob: &'a SdpProblem,
    s_inv: Vec<ComplexMatrix>,
    z: &'a BlockMatrix,
    rp: BlockMatrix,
    /// `tr{F_i S⁻¹}`.
    f_sinv: Vec<f64>,
    /// `−c_i − Re tr{F_i S⁻¹ R_p Z}`.
    base_rhs: Vec<f64>,
    schur: Vec<Vec<f64>>,
    gram: &'a [Vec<f64>],
}

impl<'a> Workspace<'a> {
    fn new(
        prob: &'a SdpProblem,
        gram: &'a [Vec<f64>],
        s: &BlockMatrix,
        z: &'a BlockMatrix,
        rp: BlockMatrix,
    ) -> Result<Self> {
        let s_inv: Vec<ComplexMatrix> = s
            .blocks()
            .iter()
            .map(|b| hpd_inverse(b).map(HermitianMatrix::into_matrix))
            .collect::<Result<_>>()
            .map_err(|_| Error::NumericalFailure("primal slack lost definiteness".into()))?;
        let zb = z.blocks();
        let fs = prob.f();
        // G_j = S⁻¹ F_j Z
        let g: Vec<Vec<ComplexMatrix>> = fs
            .iter()
            .map(|fj| blockwise(fj, |k, b| &(&s_inv[k] * &**b) * &*zb[k]))
            .collect();
        let m = prob.m();
        let mut schur = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let v = trace_pair(&fs[i], &g[j]);
                schur[i][j] = v;
                schur[j][i] = v;
            }
        }
        let r = blockwise(&rp, |k, b| &(&s_inv[k] * &**b) * &*zb[k]);
        let f_sinv = fs.iter().map(|fi| trace_pair(fi, &s_inv)).collect();
        let base_rhs = fs.iter().zip(prob.c()).map(|(fi, ci)| -ci - trace_pair(fi, &r)).collect();
        Ok(Self { prob, s_inv, z, rp, f_sinv, base_rhs, schur, gram })
    }

    /// Newton direction for target `σμ` with an optional second-order term `ΔS_a·ΔZ_a`.
    fn direction(
        &self,
        sigma_mu: f64,
        second: Option<&[ComplexMatrix]>,
    ) -> Result<(Vec<f64>, BlockMatrix, BlockMatrix)> {
        let zb = self.z.blocks();
        let corr: Option<Vec<ComplexMatrix>> =
            second.map(|q| q.iter().zip(&self.s_inv).map(|(qk, si)| si * qk).collect());
        let rhs: Vec<f64> = (0..self.prob.m())
            .map(|i| {
                let mut r = self.base_rhs[i] + sigma_mu * self.f_sinv[i];
                if let Some(c) = &corr {
                    r -= trace_pair(&self.prob.f()[i], c);
                }
                r
            })
            .collect();
        let complete = |dx: &[f64]| {
            let ds = self.prob.linear_part(dx).plus(&self.rp);
            let dz: Vec<ComplexMatrix> = (0..zb.len())
                .map(|k| {
                    let si = &self.s_inv[k];
                    let mut out = si.scale(sigma_mu);
                    out = &out - zb[k].as_matrix();
                    out = &out - &(&(si * &**ds.block(k)) * &*zb[k]);
                    if let Some(c) = &corr {
                        out = &out - &c[k];
                    }
                    out
                })
                .collect();
            (ds, hermitian_blocks(dz))
        };
        let mut dx = solve_schur(&self.schur, &rhs)?;
        let (mut ds, mut dz) = complete(&dx);
        // Iterative refinement against the dual equations, which the cancelling
        // terms in ΔZ otherwise satisfy only to the accuracy of the Schur solve.
        for _ in 0..REFINEMENT_STEPS {
            let z_next = self.z.plus(&dz);
            let e = self.prob.equality_residuals(&z_next);
            if max_abs(&e) == 0.0 {
                break;
            }
            let delta = solve_schur(&self.schur, &e)?;
            for (a, d) in dx.iter_mut().zip(&delta) {
                *a += d;
            }
            (ds, dz) = complete(&dx);
        }
        // ΔZ is assembled from terms of size ‖S⁻¹‖‖Z‖ that cancel, which leaves
        // an equality error the Schur refinement cannot remove. The Euclidean
        // projection onto the dual equations removes it directly.
        let e = self.prob.equality_residuals(&self.z.plus(&dz));
        if max_abs(&e) > 0.0 {
            let y = solve_schur(self.gram, &e)?;
            dz = dz.minus(&self.prob.linear_part(&y));
        }
        Ok((dx, ds, dz))
    }
}

/// `min_k λ_min(S_k^½ Z_k S_k^½) / μ`, zero when some `S_k` is not positive definite.
fn centrality(s: &BlockMatrix, z: &BlockMatrix) -> Result<f64> {
    let n: usize = s.blocks().iter().map(|b| b.dim()).sum();
    let mu = s.trace_product(z) / n as f64;
    let mut worst = f64::INFINITY;
    for (sb, zb) in s.blocks().iter().zip(z.blocks()) {
        let Ok(l) = cholesky(sb) else { return Ok(0.0) };
        let x = HermitianMatrix::hermitize(&(&(&l.adjoint() * &**zb) * &l));
        worst = worst.min(eig_hermitian(&x)?.min() / mu);
    }
    Ok(worst)
}

fn is_central(s: &BlockMatrix, z: &BlockMatrix) -> Result<bool> {
    Ok(centrality(s, z)? >= NEIGHBORHOOD)
}

/// Shortens both steps geometrically until the next iterate is central.
/// Long Mehrotra steps otherwise let a few products `s_i z_i` collapse far
/// below μ, after which `‖F(x)Z‖_F` stalls near `√gap` instead of tracking μ.
fn stay_in_neighborhood(
    s: &BlockMatrix,
    ds: &BlockMatrix,
    mut ap: f64,
    z: &BlockMatrix,
    dz: &BlockMatrix,
    mut ad: f64,
) -> Result<(f64, f64)> {
    for _ in 0..MAX_BACKTRACKS {
        let mut s1 = s.clone();
        s1.add_scaled(ap, ds);
        let mut z1 = z.clone();
        z1.add_scaled(ad, dz);
        if is_central(&s1, &z1)? {
            break;
        }
        ap *= BACKTRACK;
        ad *= BACKTRACK;
    }
    Ok((ap, ad))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, r| m.max(r.abs()))
}

fn finish(
    prob: &SdpProblem,
    x: Vec<f64>,
    z: BlockMatrix,
    iterations: usize,
    status: SolveStatus,
    history: Vec<IterationRecord>,
) -> SdpSolution {
    let gap = prob.eval(&x).trace_product(&z);
    SdpSolution {
        p_star: prob.objective(&x),
        d_star: prob.dual_objective(&z),
        gap,
        x,
        z,
        iterations,
        status,
        history,
    }
}

/// Runs the interior-point iteration and returns the last iterate whatever
/// its status. Errors only for invalid configuration or hints.
pub fn solve_unchecked(prob: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    cfg.validate()?;
    let start = feasible_start(prob, cfg.initial_x.as_deref(), cfg.initial_z.as_ref())?;
    let n = prob.layout().total_dim() as f64;
    let StartingPoint { mut x, mut s, mut z, .. } = start;
    let mut history = Vec::new();
    let fs = prob.f();
    let gram: Vec<Vec<f64>> =
        fs.iter().map(|fi| fs.iter().map(|fj| fi.trace_product(fj)).collect()).collect();
    // Iterate with the smallest slackness among those passing the gap and feasibility tests.
    let mut certified: Option<(Vec<f64>, BlockMatrix, usize, f64)> = None;
    let mut first_certified: Option<usize> = None;
    let give_up = |certified: Option<(Vec<f64>, BlockMatrix, usize, f64)>,
                   x: Vec<f64>,
                   z: BlockMatrix,
                   iter: usize,
                   status: SolveStatus,
                   history: Vec<IterationRecord>| match certified {
        Some((cx, cz, ci, _)) => {
            let h = history[..ci].to_vec();
            finish(prob, cx, cz, ci, SolveStatus::Optimal, h)
        }
        None => finish(prob, x, z, iter, status, history),
    };
    for iter in 0..=cfg.max_iter {
        let fx = prob.eval(&x);
        let rp = fx.minus(&s);
        let gap = fx.trace_product(&z);
        let dual_inf = max_abs(&prob.equality_residuals(&z));
        let primal_inf = rp.frobenius_norm();
        let slackness = fx.product_norm(&z);
        let primal_min = fx.min_eigenvalue()?;
        if gap.abs() <= cfg.tol_gap && dual_inf <= cfg.tol_feas && primal_min >= -cfg.tol_feas {
            if slackness <= cfg.tol_slack {
                return Ok(finish(prob, x, z, iter, SolveStatus::Optimal, history));
            }
            if certified.as_ref().is_none_or(|c| slackness < c.3) {
                certified = Some((x.clone(), z.clone(), iter, slackness));
            }
            first_certified.get_or_insert(iter);
        } else if certified.is_some()
            && (gap.abs() > POLISH_LOOSENESS * cfg.tol_gap
                || dual_inf > POLISH_LOOSENESS * cfg.tol_feas
                || primal_min < -POLISH_LOOSENESS * cfg.tol_feas)
        {
            // Polishing has reached the rounding floor and started to undo feasibility.
            return Ok(give_up(certified, x, z, iter, SolveStatus::MaxIter, history));
        }
        let polish_over = first_certified.is_some_and(|c| iter >= c + POLISH_ITERS);
        if iter == cfg.max_iter || polish_over {
            return Ok(give_up(certified, x, z, iter, SolveStatus::MaxIter, history));
        }
        let mu = s.trace_product(&z) / n;
        let step = (|| -> Result<_> {
            let ws = Workspace::new(prob, &gram, &s, &z, rp)?;
            if !is_central(&s, &z)? {
                // An off-centre start would force every predictor step to zero
                // length; pure centering steps bring it into the neighborhood.
                let (dx, ds, dz) = ws.direction(mu, None)?;
                let ap = (cfg.step_fraction * max_step(&s, &ds)?).min(1.0);
                let ad = (cfg.step_fraction * max_step(&z, &dz)?).min(1.0);
                return Ok((dx, ds, dz, ap, ad));
            }

            let (_, ds_a, dz_a) = ws.direction(0.0, None)?;
            let ap = max_step(&s, &ds_a)?.min(1.0);
            let ad = max_step(&z, &dz_a)?.min(1.0);
            let mut s_a = s.clone();
            s_a.add_scaled(ap, &ds_a);
            let mut z_a = z.clone();
            z_a.add_scaled(ad, &dz_a);
            let mu_aff = s_a.trace_product(&z_a) / n;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            let second: Vec<ComplexMatrix> = ds_a
                .blocks()
                .iter()
                .zip(dz_a.blocks())
                .map(|(a, b)| &**a * &**b)
                .collect();
            let (dx, ds, dz) = ws.direction(sigma * mu, Some(&second))?;
            let ap = (cfg.step_fraction * max_step(&s, &ds)?).min(1.0);
            let ad = (cfg.step_fraction * max_step(&z, &dz)?).min(1.0);
            let (ap, ad) = stay_in_neighborhood(&s, &ds, ap, &z, &dz, ad)?;
            Ok((dx, ds, dz, ap, ad))
        })();
        let (dx, ds, dz, ap, ad) = match step {
            Ok(v) => v,
            Err(Error::NumericalFailure(_)) => {
                return Ok(give_up(certified, x, z, iter, SolveStatus::NumericalFailure, history));
            }
            Err(e) => return Err(e),
        };
        history.push(IterationRecord {
            mu,
            gap,
            primal_infeasibility: primal_inf,
            dual_infeasibility: dual_inf,
            slackness,
            primal_step: ap,
            dual_step: ad,
        });
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += ap * di;
        }
        s.add_scaled(ap, &ds);
        z.add_scaled(ad, &dz);
    }
    unreachable!("loop returns at iteration max_iter")
}

/// Solves the primal-dual pair; any status other than optimal is an error.
pub fn solve(prob: &SdpProblem, cfg: &SolverConfig) -> Result<SdpSolution> {
    let sol = solve_unchecked(prob, cfg)?;
    match sol.status {
        SolveStatus::Optimal => Ok(sol),
        SolveStatus::MaxIter => Err(Error::MaxIter(sol.iterations)),
        SolveStatus::NumericalFailure => {
            Err(Error::NumericalFailure(format!("stalled after {} iterations", sol.iterations)))
        }
    }
}
