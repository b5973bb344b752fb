//! Spectral bases, projectors and grid transforms.
//!
//! Coefficient layouts:
//! - circle models: index `n + N` for `-N <= n <= N`;
//! - zonal sphere: index `n - 1` for `1 <= n <= N`;
//! - torus: index into the eigenvalue ordering (nondecreasing `|k|^2`, then
//!   lexicographic in `(k_x, k_y)`), entries `0..=N`.
//!
//! Grid layouts:
//! - circle: `x_j = 2 pi j / G`, `j = 0..G`, weight `1/G`;
//! - zonal: `theta_j = pi j / G`, `j = 1..G`, weight `(pi/G) sin^2 theta_j`;
//! - torus: `x = (j_1/G, j_2/G)` stored at `j_1 G + j_2`, weight `1/G^2`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::ops::{Add, Sub};

use crate::error::{Error, Result};
use crate::fft::{next_pow2, Fft};
use crate::model::{ModeIndex, Model};
use crate::weyl;
use crate::Complex;

const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

/// The smooth cutoff profile: 1 on `|t| <= 1/2`, 0 on `|t| >= 1`, and
/// `h(2(1-|t|))` in between with `h(s) = psi(s) / (psi(s) + psi(1-s))`,
/// `psi(s) = exp(-1/s)`.
pub fn cutoff_profile(t: f64) -> f64 {
    let a = t.abs();
    if a <= 0.5 {
        return 1.0;
    }
    if a >= 1.0 {
        return 0.0;
    }
    let s = 2.0 * (1.0 - a);
    let psi = |x: f64| if x <= 0.0 { 0.0 } else { libm::exp(-1.0 / x) };
    let p = psi(s);
    p / (p + psi(1.0 - s))
}

/// Smallest admissible grid for a band: power of two `>= 8 (band + 1)`.
pub fn min_grid(band: usize) -> usize {
    next_pow2(8 * (band + 1))
}

/// A truncated orthonormal basis with its quadrature grid.
#[derive(Clone)]
pub struct Basis(Arc<Inner>);

struct Inner {
    model: Model,
    cutoff: usize,
    band: usize,
    grid: usize,
    lattice: Vec<(i32, i32)>,
    lattice_index: BTreeMap<(i32, i32), usize>,
    plan: Plan,
    product: Plan,
    ffts: Vec<Fft>,
}

impl Basis {
    /// Basis for `model` truncated at `cutoff`, on the smallest admissible grid.
    pub fn new(model: Model, cutoff: usize) -> Result<Self> {
        Self::build(model, cutoff, None)
    }

    /// Same as [`Basis::new`] with an explicit grid size.
    pub fn with_grid(model: Model, cutoff: usize, grid: usize) -> Result<Self> {
        Self::build(model, cutoff, Some(grid))
    }

    fn build(model: Model, cutoff: usize, grid: Option<usize>) -> Result<Self> {
        if model == Model::ZonalNls && cutoff == 0 {
            return Err(Error::invalid("zonal cutoff must be at least 1"));
        }
        if cutoff > 1 << 20 {
            return Err(Error::invalid(format!("cutoff {cutoff} is too large")));
        }
        let (lattice, band) = if model == Model::Torus {
            let pts = weyl::leading_lattice(cutoff + 1);
            let k = pts
                .iter()
                .map(|&(a, b)| a.unsigned_abs().max(b.unsigned_abs()) as usize)
                .max()
                .unwrap_or(0);
            (pts, k)
        } else {
            (Vec::new(), cutoff)
        };
        let lattice_index = lattice.iter().enumerate().map(|(i, &k)| (k, i)).collect();
        let floor = min_grid(band);
        let grid = match grid {
            None => floor,
            Some(g) if g < floor => {
                return Err(Error::invalid(format!(
                    "grid size {g} is below the dealiasing bound {floor} for band {band}"
                )))
            }
            Some(g) if !g.is_power_of_two() => {
                return Err(Error::invalid(format!("grid size {g} is not a power of two")))
            }
            Some(g) => g,
        };
        let product_size = match model {
            Model::ZonalNls => grid,
            Model::Dnls => next_pow2(6 * band + 1),
            _ => next_pow2(4 * band + 1),
        };
        let ffts = if model.is_circle() {
            let top = if model == Model::Dnls { 14 * band + 2 } else { 4 * band + 1 };
            let top = next_pow2(top).max(product_size);
            (0..=top.trailing_zeros()).map(|k| Fft::new(1 << k)).collect()
        } else {
            Vec::new()
        };
        Ok(Basis(Arc::new(Inner {
            model,
            cutoff,
            band,
            grid,
            lattice,
            lattice_index,
            plan: Plan::new(model, grid),
            product: Plan::new(model, product_size),
            ffts,
        })))
    }

    pub fn model(&self) -> Model {
        self.0.model
    }

    pub fn cutoff(&self) -> usize {
        self.0.cutoff
    }

    /// Largest frequency present: `N` on the circle and sphere, the largest
    /// lattice component on the torus.
    pub fn band(&self) -> usize {
        self.0.band
    }

    pub fn grid_size(&self) -> usize {
        self.0.grid
    }

    /// Number of coefficients.
    pub fn len(&self) -> usize {
        match self.0.model {
            Model::ZonalNls => self.0.cutoff,
            Model::Torus => self.0.lattice.len(),
            _ => 2 * self.0.cutoff + 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn mode(&self, i: usize) -> ModeIndex {
        match self.0.model {
            Model::ZonalNls => ModeIndex::Zonal(i as u32 + 1),
            Model::Torus => {
                let (a, b) = self.0.lattice[i];
                ModeIndex::Lattice(a, b)
            }
            _ => ModeIndex::Circle(i as i64 - self.0.cutoff as i64),
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        (0..self.len()).map(move |i| self.mode(i))
    }

    pub fn index_of(&self, mode: ModeIndex) -> Option<usize> {
        match (self.0.model, mode) {
            (Model::ZonalNls, ModeIndex::Zonal(n)) => {
                (n >= 1 && n as usize <= self.0.cutoff).then(|| n as usize - 1)
            }
            (Model::Torus, ModeIndex::Lattice(a, b)) => self.0.lattice_index.get(&(a, b)).copied(),
            (m, ModeIndex::Circle(n)) if m.is_circle() => {
                (n.unsigned_abs() as usize <= self.0.cutoff).then(|| (n + self.0.cutoff as i64) as usize)
            }
            _ => None,
        }
    }

    /// Truncation level of coefficient `i`: kept by `Pi_M` iff `rank(i) <= M`.
    pub fn rank(&self, i: usize) -> usize {
        match self.0.model {
            Model::ZonalNls => i + 1,
            Model::Torus => i,
            _ => i.abs_diff(self.0.cutoff),
        }
    }

    /// Linear frequencies of every coefficient.
    pub fn dispersion(&self) -> Vec<f64> {
        self.modes().map(|m| self.0.model.dispersion(m)).collect()
    }

    /// Free-measure standard deviations of every coefficient.
    pub fn sigmas(&self) -> Vec<f64> {
        self.modes().map(|m| self.0.model.sigma(m)).collect()
    }

    /// Sobolev brackets `<mode>` of every coefficient.
    pub fn brackets(&self) -> Vec<f64> {
        self.modes()
            .map(|m| match m {
                ModeIndex::Zonal(n) => n as f64,
                other => other.bracket(),
            })
            .collect()
    }

    /// Quadrature nodes; the second coordinate is 0 for one-dimensional grids.
    pub fn nodes(&self) -> Vec<[f64; 2]> {
        let g = self.0.grid;
        match self.0.model {
            Model::ZonalNls => (1..g).map(|j| [PI * j as f64 / g as f64, 0.0]).collect(),
            Model::Torus => (0..g * g)
                .map(|j| [(j / g) as f64 / g as f64, (j % g) as f64 / g as f64])
                .collect(),
            _ => (0..g).map(|j| [2.0 * PI * j as f64 / g as f64, 0.0]).collect(),
        }
    }

    /// Quadrature weights matching [`Basis::nodes`] (normalized measures).
    pub fn weights(&self) -> Vec<f64> {
        self.0.plan.weights()
    }

    /// Quadrature of real grid values.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.0.plan.integrate(values)
    }

    pub(crate) fn same_as(&self, other: &Basis) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.model == other.0.model
                && self.0.cutoff == other.0.cutoff
                && self.0.grid == other.0.grid)
    }

    pub(crate) fn plan(&self) -> &Plan {
        &self.0.plan
    }

    /// Grid on which cubic (DNLS: quintic) projected products and quartic
    /// (DNLS: sextic) integrals of band-limited fields are exact.
    pub(crate) fn product_plan(&self) -> &Plan {
        &self.0.product
    }

    /// Smallest cached circle FFT of length at least `len`. Circle bases
    /// cache every power of two up to `4 band + 1` (DNLS: `14 band + 2`).
    pub(crate) fn circle_fft(&self, len: usize) -> &Fft {
        let k = next_pow2(len).trailing_zeros() as usize;
        &self.0.ffts[k]
    }

    pub(crate) fn lattice(&self) -> &[(i32, i32)] {
        &self.0.lattice
    }

    pub(crate) fn check_cutoff(&self, m: usize) -> Result<()> {
        if m > self.0.cutoff {
            Err(Error::invalid(format!(
                "cutoff {m} exceeds the basis cutoff {}",
                self.0.cutoff
            )))
        } else {
            Ok(())
        }
    }

    pub(crate) fn require(&self, model: Model, op: &str) -> Result<()> {
        if self.0.model == model {
            Ok(())
        } else {
            Err(Error::unsupported(format!("{op} is not defined for model {}", self.0.model)))
        }
    }
}

impl PartialEq for Basis {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Basis")
            .field("model", &self.0.model)
            .field("cutoff", &self.0.cutoff)
            .field("grid", &self.0.grid)
            .finish()
    }
}

/// Coefficients of a band-limited field in a [`Basis`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    basis: Basis,
    coeffs: Vec<Complex>,
}

impl SpectralField {
    /// Checks the length, and for Benjamin-Ono the reality and zero-mean
    /// constraints (to a relative `1e-9`, then symmetrized exactly).
    pub fn new(basis: &Basis, coeffs: Vec<Complex>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::invalid(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coefficient"));
        }
        let mut f = SpectralField { basis: basis.clone(), coeffs };
        if basis.model() == Model::BenjaminOno {
            let n0 = basis.cutoff();
            let scale = f.max_abs().max(1.0);
            let tol = 1e-9 * scale;
            if f.coeffs[n0].norm() > tol {
                return Err(Error::invalid("Benjamin-Ono fields must have zero mean"));
            }
            for n in 1..=n0 {
                if (f.coeffs[n0 - n] - f.coeffs[n0 + n].conj()).norm() > tol {
                    return Err(Error::invalid(format!(
                        "Benjamin-Ono fields must be real (mode {n} is not paired with {})",
                        -(n as i64)
                    )));
                }
            }
            f.make_real();
        }
        Ok(f)
    }

    pub fn zeros(basis: &Basis) -> Self {
        SpectralField { basis: basis.clone(), coeffs: vec![ZERO; basis.len()] }
    }

    /// Field with the listed coefficients and zeros elsewhere; repeated modes add.
    pub fn from_modes(basis: &Basis, modes: &[(ModeIndex, Complex)]) -> Result<Self> {
        let mut coeffs = vec![ZERO; basis.len()];
        for &(m, c) in modes {
            let i = basis
                .index_of(m)
                .ok_or_else(|| Error::invalid(format!("mode {m:?} is not in the basis")))?;
            coeffs[i] += c;
        }
        Self::new(basis, coeffs)
    }

    pub(crate) fn from_raw(basis: &Basis, coeffs: Vec<Complex>) -> Self {
        debug_assert_eq!(coeffs.len(), basis.len());
        SpectralField { basis: basis.clone(), coeffs }
    }

    pub(crate) fn make_real(&mut self) {
        let n0 = self.basis.cutoff();
        self.coeffs[n0] = ZERO;
        for n in 1..=n0 {
            let c = (self.coeffs[n0 + n] + self.coeffs[n0 - n].conj()) * 0.5;
            self.coeffs[n0 + n] = c;
            self.coeffs[n0 - n] = c.conj();
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex> {
        self.coeffs
    }

    /// Coefficient at `mode` (zero when outside the basis).
    pub fn coeff(&self, mode: ModeIndex) -> Complex {
        self.basis.index_of(mode).map_or(ZERO, |i| self.coeffs[i])
    }

    /// `||u||_{L^2}^2`, computed on coefficients.
    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `e^{i theta} u`. Not available for the real Benjamin-Ono fields.
    pub fn rotated(&self, theta: f64) -> Result<Self> {
        if self.basis.model() == Model::BenjaminOno {
            return Err(Error::unsupported("phase rotation of a real Benjamin-Ono field"));
        }
        let w = Complex::new(libm::cos(theta), libm::sin(theta));
        Ok(SpectralField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|c| c * w).collect(),
        })
    }

    /// Hermitian inner product `<self, other> = sum self_n conj(other_n)`.
    pub fn inner(&self, other: &SpectralField) -> Complex {
        assert!(self.basis.same_as(&other.basis), "fields live in different bases");
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b.conj()).sum()
    }

    fn zip_with(&self, other: &SpectralField, op: impl Fn(Complex, Complex) -> Complex) -> Self {
        assert!(self.basis.same_as(&other.basis), "fields live in different bases");
        SpectralField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| op(*a, *b)).collect(),
        }
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_with(rhs, |a, b| a - b)
    }
}

/// `Pi_M u`: zero every coefficient above level `M`.
pub fn project(u: &SpectralField, m: usize) -> Result<SpectralField> {
    u.basis.check_cutoff(m)?;
    let mut out = u.clone();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        if u.basis.rank(i) > m {
            *c = ZERO;
        }
    }
    Ok(out)
}

/// `S_M u = chi(Lambda / M) u` on the zonal sphere.
pub fn smooth_project(u: &SpectralField, m: usize) -> Result<SpectralField> {
    u.basis.require(Model::ZonalNls, "smooth projection")?;
    if m == 0 {
        return Err(Error::invalid("smooth projection needs M >= 1"));
    }
    let mut out = u.clone();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        *c *= cutoff_profile((i + 1) as f64 / m as f64);
    }
    Ok(out)
}

/// `Pi^0 u`: remove the mean of a circle field.
pub fn zero_mean_project(u: &SpectralField) -> Result<SpectralField> {
    if !u.basis.model().is_circle() {
        return Err(Error::unsupported("zero-mean projection is defined on the circle"));
    }
    let mut out = u.clone();
    out.coeffs[u.basis.cutoff()] = ZERO;
    Ok(out)
}

/// Hilbert transform `c_n -> -i sign(n) c_n`.
pub fn hilbert_transform(u: &SpectralField) -> Result<SpectralField> {
    if !u.basis.model().is_circle() {
        return Err(Error::unsupported("the Hilbert transform is defined on the circle"));
    }
    let n0 = u.basis.cutoff();
    let mut out = u.clone();
    for (i, c) in out.coeffs.iter_mut().enumerate() {
        *c = match i.cmp(&n0) {
            core::cmp::Ordering::Less => Complex::new(0.0, 1.0) * *c,
            core::cmp::Ordering::Equal => ZERO,
            core::cmp::Ordering::Greater => Complex::new(0.0, -1.0) * *c,
        };
    }
    Ok(out)
}

/// Evaluate `u` at the quadrature nodes of its basis.
pub fn to_grid(u: &SpectralField) -> Vec<Complex> {
    u.basis.plan().synth(&u.basis, &u.coeffs)
}

/// Recover coefficients from values at the quadrature nodes (exact for
/// band-limited data).
pub fn from_grid(basis: &Basis, values: &[Complex]) -> Result<SpectralField> {
    let plan = basis.plan();
    if values.len() != plan.node_count() {
        return Err(Error::invalid(format!(
            "expected {} grid values, got {}",
            plan.node_count(),
            values.len()
        )));
    }
    SpectralField::new(basis, plan.analyze(basis, values.to_vec()))
}

/// Transform pair for one grid size.
#[derive(Clone, Debug)]
pub(crate) enum Plan {
    Circle { fft: Fft },
    Zonal { fft: Fft, sin: Vec<f64> },
    Torus { fft: Fft },
}

impl Plan {
    pub(crate) fn new(model: Model, g: usize) -> Plan {
        match model {
            Model::ZonalNls => Plan::Zonal {
                fft: Fft::new(2 * g),
                sin: (0..g).map(|j| libm::sin(PI * j as f64 / g as f64)).collect(),
            },
            Model::Torus => Plan::Torus { fft: Fft::new(g) },
            _ => Plan::Circle { fft: Fft::new(g) },
        }
    }

    pub(crate) fn size(&self) -> usize {
        match self {
            Plan::Circle { fft } | Plan::Torus { fft } => fft.len(),
            Plan::Zonal { fft, .. } => fft.len() / 2,
        }
    }

    pub(crate) fn node_count(&self) -> usize {
        let g = self.size();
        match self {
            Plan::Circle { .. } => g,
            Plan::Zonal { .. } => g - 1,
            Plan::Torus { .. } => g * g,
        }
    }

    pub(crate) fn weights(&self) -> Vec<f64> {
        let g = self.size() as f64;
        match self {
            Plan::Circle { .. } => vec![1.0 / g; self.node_count()],
            Plan::Torus { .. } => vec![1.0 / (g * g); self.node_count()],
            Plan::Zonal { sin, .. } => sin[1..].iter().map(|s| PI / g * s * s).collect(),
        }
    }

    pub(crate) fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.node_count());
        let g = self.size() as f64;
        match self {
            Plan::Circle { .. } => values.iter().sum::<f64>() / g,
            Plan::Torus { .. } => values.iter().sum::<f64>() / (g * g),
            Plan::Zonal { sin, .. } => {
                values.iter().zip(&sin[1..]).map(|(v, s)| v * s * s).sum::<f64>() * PI / g
            }
        }
    }

    /// Values of `sum_i coeffs_i e_{mode(i)}` at the nodes of this plan.
    pub(crate) fn synth(&self, basis: &Basis, coeffs: &[Complex]) -> Vec<Complex> {
        match self {
            Plan::Circle { fft } => circle_synth(fft, coeffs, basis.cutoff()),
            Plan::Torus { fft } => torus_synth(fft, coeffs, basis.lattice()),
            Plan::Zonal { fft, sin } => zonal_synth(fft, sin, coeffs),
        }
    }

    /// Basis coefficients of grid data (quadrature projection).
    pub(crate) fn analyze(&self, basis: &Basis, values: Vec<Complex>) -> Vec<Complex> {
        match self {
            Plan::Circle { fft } => circle_analyze(fft, values, basis.cutoff()),
            Plan::Torus { fft } => torus_analyze(fft, values, basis.lattice()),
            Plan::Zonal { fft, sin } => zonal_analyze(fft, sin, values, basis.len()),
        }
    }
}

fn wrap(n: i64, g: usize) -> usize {
    n.rem_euclid(g as i64) as usize
}

/// Circle synthesis of a band-`band` coefficient vector (index `n + band`).
pub(crate) fn circle_synth(fft: &Fft, coeffs: &[Complex], band: usize) -> Vec<Complex> {
    let g = fft.len();
    debug_assert!(2 * band < g);
    let mut a = vec![ZERO; g];
    for (i, c) in coeffs.iter().enumerate() {
        a[wrap(i as i64 - band as i64, g)] = *c;
    }
    fft.inverse(&mut a);
    a
}

/// Circle analysis onto modes `|n| <= band`.
pub(crate) fn circle_analyze(fft: &Fft, mut values: Vec<Complex>, band: usize) -> Vec<Complex> {
    let g = fft.len();
    debug_assert!(2 * band < g);
    fft.forward(&mut values);
    let s = 1.0 / g as f64;
    (-(band as i64)..=band as i64).map(|n| values[wrap(n, g)] * s).collect()
}

fn torus_synth(fft: &Fft, coeffs: &[Complex], lattice: &[(i32, i32)]) -> Vec<Complex> {
    let g = fft.len();
    let mut a = vec![ZERO; g * g];
    for (c, &(k1, k2)) in coeffs.iter().zip(lattice) {
        a[wrap(k1 as i64, g) * g + wrap(k2 as i64, g)] = *c;
    }
    fft2(fft, &mut a, true);
    a
}

fn torus_analyze(fft: &Fft, mut values: Vec<Complex>, lattice: &[(i32, i32)]) -> Vec<Complex> {
    let g = fft.len();
    fft2(fft, &mut values, false);
    let s = 1.0 / (g * g) as f64;
    lattice
        .iter()
        .map(|&(k1, k2)| values[wrap(k1 as i64, g) * g + wrap(k2 as i64, g)] * s)
        .collect()
}

fn fft2(fft: &Fft, a: &mut [Complex], inverse: bool) {
    let g = fft.len();
    let run = |row: &mut [Complex]| if inverse { fft.inverse(row) } else { fft.forward(row) };
    for row in a.chunks_mut(g) {
        run(row);
    }
    let mut col = vec![ZERO; g];
    for j in 0..g {
        for i in 0..g {
            col[i] = a[i * g + j];
        }
        run(&mut col);
        for i in 0..g {
            a[i * g + j] = col[i];
        }
    }
}

const SQRT_2_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Zonal synthesis: `sum c_n P_n(theta_j)` for `j = 1..G` via a sine series.
fn zonal_synth(fft: &Fft, sin: &[f64], coeffs: &[Complex]) -> Vec<Complex> {
    let g2 = fft.len();
    let g = g2 / 2;
    debug_assert!(coeffs.len() < g);
    let mut a = vec![ZERO; g2];
    let half_i = Complex::new(0.0, -0.5);
    for (i, c) in coeffs.iter().enumerate() {
        let n = i + 1;
        let b = c * SQRT_2_OVER_PI * half_i;
        a[n] = b;
        a[g2 - n] = -b;
    }
    fft.inverse(&mut a);
    (1..g).map(|j| a[j] / sin[j]).collect()
}

/// Zonal analysis: `c_n = int f P_n sin^2` by the trapezoid rule, computed as
/// a discrete sine transform of `f sin(theta)`.
fn zonal_analyze(fft: &Fft, sin: &[f64], values: Vec<Complex>, len: usize) -> Vec<Complex> {
    let g2 = fft.len();
    let g = g2 / 2;
    let mut y = vec![ZERO; g2];
    for j in 1..g {
        let s = values[j - 1] * sin[j];
        y[j] = s;
        y[g2 - j] = -s;
    }
    fft.forward(&mut y);
    let scale = PI / g as f64 * SQRT_2_OVER_PI;
    (1..=len).map(|n| y[n] * Complex::new(0.0, 0.5) * scale).collect()
}
