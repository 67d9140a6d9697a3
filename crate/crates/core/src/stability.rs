//! Numerical checks of the stability theory behind the ADI schemes: the
//! rational stability functions, `A_m(α)` sector sampling, resolvent bounds
//! for `L = tridiag(1,−2,1)/Δx²`, the sector inequality chain, the closed-form
//! spectrum of `τβL`, and power bounds of `R = I + Π(θ)⁻¹τD`.
//!
//! Matrix norms are always the exact `‖·‖∞`, the maximum absolute row sum.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::{Complex, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{materialize_dense, DenseMatrix};
use crate::error::{invalid, Error, Result};
use crate::grid::{apply_full, check_operator_set, DirectionalOperator, TensorGrid};
use crate::report::{sci, CsvTable};
use crate::tridiag::{thomas_in_place, PivotedTridiagonal};
use crate::Scalar;

/// Absolute slack on `|R| ≤ 1` in sector sampling.
pub const SECTOR_SLACK: f64 = 1e-12;
/// Relative slack on the resolvent bounds and the inequality chain.
pub const RELATIVE_SLACK: f64 = 1e-12;
/// Largest `N` accepted by the one-dimensional checks.
pub const MAX_LINE_SIZE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StabilityKind {
    /// `R = 1 + z/Q`, shared by Douglas and the one-stage AMF-W schemes.
    DouglasAdi,
    /// `R = 1 + 2z/Q + (z² − 2z)/(2Q²)`.
    HundsdorferVerwer,
}

/// Rational stability function of `m` complex variables with
/// `z = Σ z_j`, `Q = ∏ (1 − θ z_j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityFunction<T> {
    pub kind: StabilityKind,
    pub theta: T,
}

impl<T: Scalar> StabilityFunction<T> {
    pub fn douglas(theta: T) -> Self {
        Self {
            kind: StabilityKind::DouglasAdi,
            theta,
        }
    }

    pub fn hundsdorfer_verwer(theta: T) -> Self {
        Self {
            kind: StabilityKind::HundsdorferVerwer,
            theta,
        }
    }

    pub fn eval(&self, z: &[Complex<T>]) -> Result<Complex<T>> {
        let one = Complex::new(T::one(), T::zero());
        let mut q = one;
        let mut sum = Complex::new(T::zero(), T::zero());
        for &zj in z {
            let factor = one - zj * self.theta;
            if factor.norm() <= T::epsilon() * (T::one() + (zj * self.theta).norm()) {
                return Err(Error::Domain(format!("z = {zj} is a pole (z·θ = 1)")));
            }
            q *= factor;
            sum += zj;
        }
        let two = T::lit(2.0);
        Ok(match self.kind {
            StabilityKind::DouglasAdi => one + sum / q,
            StabilityKind::HundsdorferVerwer => {
                one + sum * two / q + (sum * sum - sum * two) / (q * q * two)
            }
        })
    }
}

/// How sector samples choose their arguments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectorMode {
    /// `θ_j = ±α` only.
    BoundaryRay,
    /// `θ_j` uniform in `[−α, α]`.
    Interior,
}

/// Sector `{ z : |arg(−z)| ≤ α }` restricted to radii in `radius_range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorSpec {
    pub alpha: f64,
    pub mode: SectorMode,
    pub radius_range: (f64, f64),
}

impl SectorSpec {
    pub const DEFAULT_RADII: (f64, f64) = (1e-6, 1e6);

    /// Validated sector with `0 < α ≤ π/4`.
    pub fn new(alpha: f64, mode: SectorMode, radius_range: (f64, f64)) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= FRAC_PI_4 * (1.0 + 1e-15)) {
            return Err(invalid(format!("sector angle must lie in (0, pi/4], got {alpha}")));
        }
        Self::probe(alpha, mode, radius_range)
    }

    /// Sector with any `0 < α ≤ π/2`; for exploratory sampling outside the
    /// range the power-bound theory covers.
    pub fn probe(alpha: f64, mode: SectorMode, radius_range: (f64, f64)) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= FRAC_PI_2 * (1.0 + 1e-15)) {
            return Err(invalid(format!("sector angle must lie in (0, pi/2], got {alpha}")));
        }
        let (lo, hi) = radius_range;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(invalid(format!("invalid radius range ({lo}, {hi})")));
        }
        Ok(Self {
            alpha,
            mode,
            radius_range,
        })
    }

    /// `α_m = min(π/(2(m−1)), π/4)` for the `m`-variable Douglas function.
    pub fn douglas_sector(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(invalid("the Douglas sector angle needs m >= 2"));
        }
        let alpha = (PI / (2.0 * (m as f64 - 1.0))).min(FRAC_PI_4);
        Self::new(alpha, SectorMode::Interior, Self::DEFAULT_RADII)
    }

    pub(crate) fn draw(&self, rng: &mut impl Rng) -> Complex64 {
        let r = log_uniform(rng, self.radius_range.0, self.radius_range.1);
        let phi = match self.mode {
            SectorMode::Interior => self.alpha * (2.0 * rng.random::<f64>() - 1.0),
            SectorMode::BoundaryRay => {
                if rng.random::<bool>() {
                    self.alpha
                } else {
                    -self.alpha
                }
            }
        };
        -Complex64::from_polar(r, phi)
    }
}

fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        return lo;
    }
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectorReport {
    pub samples: usize,
    pub max_modulus: f64,
    pub argmax: Vec<Complex64>,
    pub violations: usize,
    pub first_violation: Option<Vec<Complex64>>,
}

impl SectorReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Largest `|R(z⃗)|` over the given points, counting `|R| > 1 + SECTOR_SLACK`.
pub fn sector_max_modulus(f: &StabilityFunction<f64>, points: impl IntoIterator<Item = Vec<Complex64>>) -> Result<SectorReport> {
    let mut report = SectorReport {
        samples: 0,
        max_modulus: 0.0,
        argmax: Vec::new(),
        violations: 0,
        first_violation: None,
    };
    for z in points {
        let value = f.eval(&z)?.norm();
        report.samples += 1;
        if value > 1.0 + SECTOR_SLACK {
            report.violations += 1;
            if report.first_violation.is_none() {
                report.first_violation = Some(z.clone());
            }
        }
        if value > report.max_modulus || report.argmax.is_empty() {
            report.max_modulus = value;
            report.argmax = z;
        }
    }
    Ok(report)
}

/// Samples `z_j = −r_j e^{iθ_j}` with log-uniform radii and checks
/// `|R(z_1,…,z_m)| ≤ 1`.
pub fn check_sector_stability(f: &StabilityFunction<f64>, m: usize, spec: &SectorSpec, samples: usize, seed: u64) -> Result<SectorReport> {
    if samples == 0 || m == 0 {
        return Err(invalid("sector sampling needs m >= 1 and at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<Complex64>> = (0..samples)
        .map(|_| (0..m).map(|_| spec.draw(&mut rng)).collect())
        .collect();
    sector_max_modulus(f, points)
}

/// Values `[|Σz_j|, √(Σ|z_j|²), Σ|z_j|/√m, √m ∏|z_j|^{1/m}]` of the
/// sector inequality chain; non-increasing for sector tuples.
pub fn inequality_chain(z: &[Complex64]) -> [f64; 4] {
    let m = z.len() as f64;
    let sum: Complex64 = z.iter().sum();
    let sq: f64 = z.iter().map(|v| v.norm_sqr()).sum();
    let abs_sum: f64 = z.iter().map(|v| v.norm()).sum();
    let log_mean = z.iter().map(|v| v.norm().ln()).sum::<f64>() / m;
    [sum.norm(), sq.sqrt(), abs_sum / m.sqrt(), m.sqrt() * log_mean.exp()]
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub m: usize,
    pub alpha: f64,
    pub samples: usize,
    /// Violations of each of the three links in the chain.
    pub violations: [usize; 3],
    /// Smallest observed `(lhs − rhs)/rhs` per link.
    pub min_relative_gap: [f64; 3],
}

impl InequalityReport {
    pub fn passed(&self) -> bool {
        self.violations.iter().all(|&v| v == 0)
    }
}

/// Random tuples `z_j = −r_j e^{iθ_j}`, `|θ_j| ≤ α ≤ π/4`, checked against
/// the inequality chain with [`RELATIVE_SLACK`].
pub fn check_sector_inequalities(m: usize, alpha: f64, samples: usize, seed: u64) -> Result<InequalityReport> {
    if m == 0 {
        return Err(invalid("m must be positive"));
    }
    if !(0.0..=FRAC_PI_4 * (1.0 + 1e-15)).contains(&alpha) {
        return Err(invalid(format!("alpha must lie in [0, pi/4], got {alpha}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = SectorSpec::DEFAULT_RADII;
    let mut report = InequalityReport {
        m,
        alpha,
        samples,
        violations: [0; 3],
        min_relative_gap: [f64::INFINITY; 3],
    };
    let mut z = vec![Complex64::new(0.0, 0.0); m];
    for _ in 0..samples {
        for zj in z.iter_mut() {
            let r = log_uniform(&mut rng, lo, hi);
            let phi = alpha * (2.0 * rng.random::<f64>() - 1.0);
            *zj = -Complex64::from_polar(r, phi);
        }
        let chain = inequality_chain(&z);
        for k in 0..3 {
            let (lhs, rhs) = (chain[k], chain[k + 1]);
            if lhs < rhs * (1.0 - RELATIVE_SLACK) {
                report.violations[k] += 1;
            }
            report.min_relative_gap[k] = report.min_relative_gap[k].min((lhs - rhs) / rhs);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    Holds,
    Violated,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub measured: f64,
    /// Right-hand side; `NaN` when the hypothesis does not hold.
    pub bound: f64,
    pub status: BoundStatus,
}

impl BoundCheck {
    fn evaluate(name: &'static str, measured: f64, bound: Option<f64>) -> Self {
        match bound {
            None => Self {
                name,
                measured,
                bound: f64::NAN,
                status: BoundStatus::NotApplicable,
            },
            Some(b) => Self {
                name,
                measured,
                bound: b,
                status: if measured <= b * (1.0 + RELATIVE_SLACK) {
                    BoundStatus::Holds
                } else {
                    BoundStatus::Violated
                },
            },
        }
    }
}

/// Exact norms of `L⁻¹` and `(zI − τL)⁻¹` against the four resolvent bounds:
/// `‖L⁻¹‖ ≤ 1/8`; `sec(arg(z)/2)/|z|` for `|arg z| < π`;
/// `1/(8τ − |z|)` for `|z| < 8τ`; `1/(|z| − 4τ/Δx²)` for `|z| > 4τ/Δx²`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolventReport {
    pub n: usize,
    pub tau: f64,
    pub z: Complex64,
    pub inverse_norm: f64,
    pub resolvent_norm: f64,
    pub checks: [BoundCheck; 4],
}

impl ResolventReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != BoundStatus::Violated)
    }
}

/// `‖L⁻¹‖∞` for `L = tridiag(1,−2,1)/Δx²` of order `n`.
pub fn laplacian_inverse_norm(n: usize) -> Result<f64> {
    check_line_size(n)?;
    let w = ((n + 1) * (n + 1)) as f64;
    let sub = vec![w; n];
    let diag = vec![-2.0 * w; n];
    let mut row_sums = vec![0.0; n];
    let mut col = vec![0.0; n];
    let mut work = vec![0.0; n];
    for k in 0..n {
        col.fill(0.0);
        col[k] = 1.0;
        thomas_in_place(&sub, &diag, &sub, &mut col, &mut work);
        for (s, c) in row_sums.iter_mut().zip(&col) {
            *s += c.abs();
        }
    }
    Ok(row_sums.into_iter().fold(0.0, f64::max))
}

/// `‖(zI − τL)⁻¹‖∞`; errors if `z` lies on the spectrum of `τL`.
pub fn resolvent_norm(n: usize, tau: f64, z: Complex64) -> Result<f64> {
    check_line_size(n)?;
    let mu = tau * ((n + 1) * (n + 1)) as f64;
    let off = vec![Complex64::new(-mu, 0.0); n];
    let diag = vec![z + 2.0 * mu; n];
    let lu = PivotedTridiagonal::factor(&off, &diag, &off)
        .ok_or_else(|| Error::Domain(format!("z = {z} lies on the spectrum of tau*L")))?;
    let mut row_sums = vec![0.0; n];
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        col.fill(Complex64::new(0.0, 0.0));
        col[k] = Complex64::new(1.0, 0.0);
        lu.solve_in_place(&mut col);
        for (s, c) in row_sums.iter_mut().zip(&col) {
            *s += c.norm();
        }
    }
    Ok(row_sums.into_iter().fold(0.0, f64::max))
}

fn check_line_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_LINE_SIZE {
        return Err(invalid(format!("N must lie in 1..={MAX_LINE_SIZE}, got {n}")));
    }
    Ok(())
}

pub fn check_resolvent_bounds(n: usize, tau: f64, z: Complex64) -> Result<ResolventReport> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(invalid(format!("tau must be positive, got {tau}")));
    }
    let inverse_norm = laplacian_inverse_norm(n)?;
    let resolvent = resolvent_norm(n, tau, z)?;
    let r = z.norm();
    let arg = z.arg();
    let dx2 = 1.0 / ((n + 1) * (n + 1)) as f64;

    let sector = (r > 0.0 && arg.abs() < PI).then(|| 1.0 / ((arg / 2.0).cos() * r));
    let small = (r < 8.0 * tau).then(|| 1.0 / (8.0 * tau - r));
    let large = (r > 4.0 * tau / dx2).then(|| 1.0 / (r - 4.0 * tau / dx2));

    Ok(ResolventReport {
        n,
        tau,
        z,
        inverse_norm,
        resolvent_norm: resolvent,
        checks: [
            BoundCheck::evaluate("inverse", inverse_norm, Some(0.125)),
            BoundCheck::evaluate("sector", resolvent, sector),
            BoundCheck::evaluate("small-z", resolvent, small),
            BoundCheck::evaluate("large-z", resolvent, large),
        ],
    })
}

/// Which resolvent bound a sweep samples for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResolventRegion {
    Inverse,
    Sector,
    SmallZ,
    LargeZ,
}

impl ResolventRegion {
    pub const ALL: [ResolventRegion; 4] = [Self::Inverse, Self::Sector, Self::SmallZ, Self::LargeZ];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Inverse => "inverse",
            Self::Sector => "sector",
            Self::SmallZ => "small-z",
            Self::LargeZ => "large-z",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSweepRow {
    pub region: ResolventRegion,
    pub points: usize,
    pub applicable: usize,
    pub violations: usize,
    /// Largest `measured / bound` seen.
    pub max_ratio: f64,
}

/// Randomized sweep: `points` samples per bound with `N` uniform in
/// `1..=n_max`, `τ` log-uniform in `tau_range`, `z` drawn from the bound's
/// hypothesis region.
pub fn resolvent_sweep(points: usize, n_max: usize, tau_range: (f64, f64), seed: u64) -> Result<Vec<ResolventSweepRow>> {
    check_line_size(n_max)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for region in ResolventRegion::ALL {
        let mut row = ResolventSweepRow {
            region,
            points,
            applicable: 0,
            violations: 0,
            max_ratio: 0.0,
        };
        for _ in 0..points {
            let n = rng.random_range(1..=n_max);
            let tau = log_uniform(&mut rng, tau_range.0, tau_range.1);
            let phi = PI * (2.0 * rng.random::<f64>() - 1.0);
            let mu = tau * ((n + 1) * (n + 1)) as f64;
            let radius = match region {
                ResolventRegion::Inverse => log_uniform(&mut rng, 1e-6 * tau, 1e6 * tau),
                ResolventRegion::Sector => log_uniform(&mut rng, 1e-6 * tau, 1e6 * mu),
                ResolventRegion::SmallZ => 8.0 * tau * rng.random::<f64>(),
                ResolventRegion::LargeZ => 4.0 * mu * (1.0 + log_uniform(&mut rng, 1e-6, 1e3)),
            };
            let z = Complex64::from_polar(radius, phi);
            let report = check_resolvent_bounds(n, tau, z)?;
            let check = report.checks[region.index()];
            if check.status == BoundStatus::NotApplicable {
                continue;
            }
            row.applicable += 1;
            if check.status == BoundStatus::Violated {
                row.violations += 1;
            }
            row.max_ratio = row.max_ratio.max(check.measured / check.bound);
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Closed-form vs. numerical spectrum of `τβL` of order `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    pub n: usize,
    pub beta: f64,
    pub tau: f64,
    /// `λ_i = −4βτ/Δx² sin²(iπΔx/2)`, ascending in `i`.
    pub closed_form: Vec<f64>,
    /// Numerical eigenvalues matched to `closed_form`.
    pub numerical: Vec<f64>,
    pub max_abs_deviation: f64,
    /// Deviation relative to the spectral radius.
    pub max_rel_deviation: f64,
    /// `(−r*, −r)` with `r = 4βτ`, `r* = 8βτ/Δx²`.
    pub enclosure: (f64, f64),
    pub enclosure_holds: bool,
}

/// Closed-form eigenvalues of `τβL`, `i = 1..=N`.
pub fn closed_form_eigenvalues(n: usize, beta: f64, tau: f64) -> Vec<f64> {
    let dx = 1.0 / (n + 1) as f64;
    (1..=n)
        .map(|i| {
            let s = (PI * i as f64 * dx / 2.0).sin();
            -4.0 * beta * tau / (dx * dx) * s * s
        })
        .collect()
}

pub fn eigenvalues_check(n: usize, beta: f64, tau: f64) -> Result<EigenReport> {
    check_line_size(n)?;
    if !(beta > 0.0 && tau > 0.0) {
        return Err(invalid("beta and tau must be positive"));
    }
    let dx = 1.0 / (n + 1) as f64;
    let w = beta * tau / (dx * dx);
    let dense = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            -2.0 * w
        } else if i.abs_diff(j) == 1 {
            w
        } else {
            0.0
        }
    });
    let mut numerical: Vec<f64> = dense.symmetric_eigenvalues().iter().copied().collect();
    // closed form is decreasing in i; sort numerical to match
    numerical.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let closed_form = closed_form_eigenvalues(n, beta, tau);

    let max_abs_deviation = closed_form
        .iter()
        .zip(&numerical)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let radius = closed_form.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let r = 4.0 * beta * tau;
    let r_star = 8.0 * beta * tau / (dx * dx);
    let enclosure_holds = closed_form
        .iter()
        .chain(&numerical)
        .all(|&l| l > -r_star && l < -r);
    Ok(EigenReport {
        n,
        beta,
        tau,
        closed_form,
        numerical,
        max_abs_deviation,
        max_rel_deviation: max_abs_deviation / radius,
        enclosure: (-r_star, -r),
        enclosure_holds,
    })
}

/// Dense `R = I + Π(θ)⁻¹ τD`.
pub fn dense_stability_matrix<T: Scalar>(ops: &[DirectionalOperator<T>], theta: T, tau: T) -> Result<DenseMatrix<T>> {
    let dense = materialize_dense(ops)?;
    let n = dense.total.rows();
    let id = DenseMatrix::identity(n);
    let mut pi = DenseMatrix::identity(n);
    for dj in &dense.directional {
        pi = pi.matmul(&id.sub(&dj.scale(theta * tau)));
    }
    let lu = pi.lu()?;
    let td = dense.total.scale(tau);
    let mut r = id;
    for j in 0..n {
        let col = lu.solve(&td.column(j));
        for i in 0..n {
            r[(i, j)] += col[i];
        }
    }
    Ok(r)
}

/// `R v = v + Π(θ)⁻¹ τD v` applied with line solves in axis order.
pub fn apply_stability_matrix<T: Scalar>(ops: &[DirectionalOperator<T>], theta: T, tau: T, v: &[T]) -> Result<Vec<T>> {
    let mut w = apply_full(ops, v)?;
    for x in w.iter_mut() {
        *x *= tau;
    }
    for op in ops {
        op.solve_shifted_in_place(theta * tau, &mut w);
    }
    Ok(v.iter().zip(&w).map(|(a, b)| *a + *b).collect())
}

/// Power-bound measurements for one `(grid, τ)` configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBoundRow {
    pub sizes: Vec<usize>,
    pub beta: Vec<f64>,
    pub theta: f64,
    pub tau: f64,
    /// `‖D⁻¹Rⁿ‖∞` for `n = 0..=n_max`.
    pub dinv_rn: Vec<f64>,
    /// `‖Rⁿ‖∞` for `n = 0..=n_max`.
    pub rn: Vec<f64>,
}

impl PowerBoundRow {
    pub fn sup_dinv_rn(&self) -> f64 {
        self.dinv_rn.iter().copied().fold(0.0, f64::max)
    }

    pub fn sup_rn(&self) -> f64 {
        self.rn.iter().copied().fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.dinv_rn.iter().chain(&self.rn).all(|v| v.is_finite() && *v >= 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerBoundReport {
    pub rows: Vec<PowerBoundRow>,
}

impl PowerBoundReport {
    pub fn to_table(&self) -> CsvTable {
        let mut t = CsvTable::new(["sizes", "tau", "n_max", "sup_dinv_rn", "sup_rn"]);
        for row in &self.rows {
            let sizes: Vec<String> = row.sizes.iter().map(|n| n.to_string()).collect();
            t.push(vec![
                sizes.join("x"),
                sci(row.tau),
                (row.dinv_rn.len() - 1).to_string(),
                sci(row.sup_dinv_rn()),
                sci(row.sup_rn()),
            ]);
        }
        t
    }
}

/// Measures `‖D⁻¹Rⁿ‖∞` and `‖Rⁿ‖∞` for `n = 0..=n_max` and every `τ`.
///
/// With constant coefficients `R` and `D⁻¹Rⁿ` are symmetric and commute
/// with the reflection `x_j ↦ 1 − x_j` of every axis. The row-sum norm is
/// then the largest column `ℓ¹` norm, and reflected columns share it, so
/// only columns with `i_j ≤ ⌈N_j/2⌉` are propagated, through the factored
/// `R`. `D⁻¹` comes from a dense LU of the materialized `D`.
pub fn measure_power_bound(m: usize, sizes: &[usize], beta: &[f64], theta: f64, tau_list: &[f64], n_max: usize) -> Result<PowerBoundReport> {
    let grid = TensorGrid::<f64>::new(m, sizes)?;
    let ops = DirectionalOperator::constant_set(&grid, beta)?;
    check_operator_set(&ops)?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(invalid(format!("theta must lie in (0, 1], got {theta}")));
    }
    if let Some(t) = tau_list.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        return Err(invalid(format!("tau must be positive, got {t}")));
    }
    let dense = materialize_dense(&ops)?;
    let d_lu = dense
        .total
        .lu()
        .map_err(|e| Error::Internal(format!("D is singular: {e}")))?;

    let representatives: Vec<usize> = (0..grid.len())
        .filter(|&lin| {
            grid.multi_index(lin)
                .iter()
                .zip(grid.sizes())
                .all(|(&i, &n)| 2 * i < n + 1)
        })
        .collect();
    let n_unknowns = grid.len();
    let l1 = |v: &[f64]| v.iter().map(|x| x.abs()).sum::<f64>();

    let mut rows = Vec::with_capacity(tau_list.len());
    for &tau in tau_list {
        let mut rn_cols: Vec<Vec<f64>> = Vec::with_capacity(representatives.len());
        let mut dinv_cols: Vec<Vec<f64>> = Vec::with_capacity(representatives.len());
        for &k in &representatives {
            let mut e = vec![0.0; n_unknowns];
            e[k] = 1.0;
            dinv_cols.push(d_lu.solve(&e));
            rn_cols.push(e);
        }
        let mut rn = Vec::with_capacity(n_max + 1);
        let mut dinv_rn = Vec::with_capacity(n_max + 1);
        for n in 0..=n_max {
            if n > 0 {
                for c in rn_cols.iter_mut().chain(dinv_cols.iter_mut()) {
                    *c = apply_stability_matrix(&ops, theta, tau, c)?;
                }
            }
            rn.push(rn_cols.iter().map(|c| l1(c)).fold(0.0, f64::max));
            dinv_rn.push(dinv_cols.iter().map(|c| l1(c)).fold(0.0, f64::max));
        }
        rows.push(PowerBoundRow {
            sizes: sizes.to_vec(),
            beta: beta.to_vec(),
            theta,
            tau,
            dinv_rn,
            rn,
        });
    }
    Ok(PowerBoundReport { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn origin_maps_to_one() {
        for f in [StabilityFunction::douglas(0.5), StabilityFunction::hundsdorfer_verwer(0.5)] {
            assert_eq!(f.eval(&[c(0.0, 0.0); 3]).unwrap(), c(1.0, 0.0));
        }
    }

    #[test]
    fn douglas_two_variable_zero() {
        let r = StabilityFunction::douglas(0.5).eval(&[c(-2.0, 0.0), c(-2.0, 0.0)]).unwrap();
        assert!(r.norm() < 1e-15);
    }

    #[test]
    fn douglas_stiff_limit_one_variable() {
        let r = StabilityFunction::douglas(0.5).eval(&[c(-1e6, 0.0)]).unwrap();
        assert!((r.re + 1.0).abs() < 1e-5 && r.im == 0.0);
    }

    #[test]
    fn pole_is_a_domain_error() {
        let f = StabilityFunction::douglas(0.5);
        assert!(matches!(f.eval(&[c(2.0, 0.0), c(-1.0, 0.0)]), Err(Error::Domain(_))));
    }

    #[test]
    fn sector_spec_validation() {
        assert!(SectorSpec::new(1.0, SectorMode::Interior, (1.0, 2.0)).is_err());
        assert!(SectorSpec::new(0.5, SectorMode::Interior, (0.0, 2.0)).is_err());
        assert!(SectorSpec::probe(FRAC_PI_2, SectorMode::BoundaryRay, (1.0, 2.0)).is_ok());
        assert_eq!(SectorSpec::douglas_sector(2).unwrap().alpha, FRAC_PI_4);
        assert!((SectorSpec::douglas_sector(4).unwrap().alpha - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn modulus_at_origin_sample_is_one() {
        let f = StabilityFunction::hundsdorfer_verwer(0.5);
        let rep = sector_max_modulus(&f, vec![vec![c(0.0, 0.0); 2]]).unwrap();
        assert_eq!(rep.max_modulus, 1.0);
    }

    #[test]
    fn symmetric_chain() {
        let chain = inequality_chain(&[c(-1.0, 0.0), c(-1.0, 0.0)]);
        let s2 = 2f64.sqrt();
        assert!((chain[0] - 2.0).abs() < 1e-15);
        for v in &chain[1..] {
            assert!((v - s2).abs() < 1e-15);
        }
    }

    #[test]
    fn single_node_resolvent_bounds() {
        assert_eq!(laplacian_inverse_norm(1).unwrap(), 0.125);
        let rep = check_resolvent_bounds(15, 1.0, c(-4.0, 0.0)).unwrap();
        assert!(rep.resolvent_norm <= 0.25);
        assert_eq!(rep.checks[2].status, BoundStatus::Holds);
        assert_eq!(rep.checks[3].status, BoundStatus::NotApplicable);
        // negative real z: sector hypothesis |arg z| < π fails
        assert_eq!(rep.checks[1].status, BoundStatus::NotApplicable);
    }

    #[test]
    fn line_size_guard() {
        assert!(laplacian_inverse_norm(0).is_err());
        assert!(laplacian_inverse_norm(513).is_err());
        assert!(eigenvalues_check(600, 1.0, 1.0).is_err());
    }

    #[test]
    fn eigen_single_node() {
        let rep = eigenvalues_check(1, 1.0, 1.0).unwrap();
        assert!((rep.closed_form[0] + 8.0).abs() < 1e-14);
        assert!((rep.numerical[0] + 8.0).abs() < 1e-14);
    }

    #[test]
    fn power_bound_at_n_zero_is_inverse_norm() {
        let rep = measure_power_bound(1, &[1], &[1.0], 0.5, &[0.25], 0).unwrap();
        assert_eq!(rep.rows[0].dinv_rn, vec![0.125]);
        assert_eq!(rep.rows[0].rn, vec![1.0]);
    }
}
