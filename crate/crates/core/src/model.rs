//! The five dispersive models and their mode-wise linear data.

use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::Error;

/// Which truncated equation is being studied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    /// Power-type NLS on zonal functions of the three-sphere.
    ZonalNls,
    /// Benjamin-Ono on the circle (real, mean-zero fields).
    BenjaminOno,
    /// Gauged derivative NLS on the circle.
    Dnls,
    /// Wick-ordered cubic half-wave equation on the circle.
    HalfWave,
    /// Renormalized cubic NLS on the unit-area flat torus.
    Torus,
}

/// Spectral index of a basis function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModeIndex {
    /// Exponential `e^{inx}` on the circle.
    Circle(i64),
    /// Zonal eigenfunction `P_n`, `n >= 1`.
    Zonal(u32),
    /// Plane wave `e^{2 pi i k.x}` on the torus.
    Lattice(i32, i32),
}

impl ModeIndex {
    /// Squared Laplace eigenvalue of the mode (zonal: `n^2 - 1`).
    pub fn laplace_eigenvalue(self) -> f64 {
        match self {
            ModeIndex::Circle(n) => (n * n) as f64,
            ModeIndex::Zonal(n) => (n as f64) * (n as f64) - 1.0,
            ModeIndex::Lattice(a, b) => 4.0 * PI * PI * ((a as i64 * a as i64 + b as i64 * b as i64) as f64),
        }
    }

    /// Sobolev bracket `(1 + lambda^2)^{1/2}`: circle `<n>`, zonal `n`,
    /// torus `(1 + 4 pi^2 |k|^2)^{1/2}`.
    pub fn bracket(self) -> f64 {
        libm::sqrt(1.0 + self.laplace_eigenvalue())
    }
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::ZonalNls,
        Model::BenjaminOno,
        Model::Dnls,
        Model::HalfWave,
        Model::Torus,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Model::ZonalNls => "zonal",
            Model::BenjaminOno => "bo",
            Model::Dnls => "dnls",
            Model::HalfWave => "halfwave",
            Model::Torus => "torus",
        }
    }

    /// Stable one-byte code used in binary files and fingerprints.
    pub fn code(self) -> u8 {
        match self {
            Model::ZonalNls => 1,
            Model::BenjaminOno => 2,
            Model::Dnls => 3,
            Model::HalfWave => 4,
            Model::Torus => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Model> {
        Model::ALL.into_iter().find(|m| m.code() == code)
    }

    pub fn is_circle(self) -> bool {
        matches!(self, Model::BenjaminOno | Model::Dnls | Model::HalfWave)
    }

    /// Degree of the polynomial nonlinearity (zonal: the nominal cubic case).
    pub fn nonlinearity_degree(self) -> u32 {
        match self {
            Model::BenjaminOno => 2,
            Model::Dnls => 5,
            Model::ZonalNls | Model::HalfWave | Model::Torus => 3,
        }
    }

    /// Whether `mode` is a valid index for this model.
    pub fn admits(self, mode: ModeIndex) -> bool {
        match (self, mode) {
            (Model::ZonalNls, ModeIndex::Zonal(n)) => n >= 1,
            (Model::BenjaminOno, ModeIndex::Circle(n)) => n != 0,
            (Model::Dnls | Model::HalfWave, ModeIndex::Circle(_)) => true,
            (Model::Torus, ModeIndex::Lattice(..)) => true,
            _ => false,
        }
    }

    /// Linear frequency: the linearized flow is `c(t) = e^{-i omega t} c(0)`.
    pub fn dispersion(self, mode: ModeIndex) -> f64 {
        match (self, mode) {
            (Model::HalfWave, ModeIndex::Circle(n)) => 1.0 + n.unsigned_abs() as f64,
            (Model::BenjaminOno, ModeIndex::Circle(n)) => (n * n.abs()) as f64,
            (Model::Dnls, ModeIndex::Circle(n)) => (n * n) as f64,
            (Model::ZonalNls, ModeIndex::Zonal(n)) => (n as f64) * (n as f64),
            (Model::Torus, m @ ModeIndex::Lattice(..)) => 1.0 + m.laplace_eigenvalue(),
            _ => panic!("mode {mode:?} does not belong to model {self:?}"),
        }
    }

    /// Standard deviation of the Gaussian coefficient at `mode` under the
    /// free measure (so that `E|c|^2 = sigma^2`).
    ///
    /// Benjamin-Ono uses `(2|n|)^{-1/2}`, the normalization for which
    /// `E||u_N||^2 = sum_{n<=N} 1/n` and the Gaussian factor of `exp(2 H_N)`
    /// coincide with the free measure. Returns 0 for the excluded BO mean.
    pub fn sigma(self, mode: ModeIndex) -> f64 {
        match (self, mode) {
            (Model::ZonalNls, ModeIndex::Zonal(n)) => 1.0 / n as f64,
            (Model::BenjaminOno, ModeIndex::Circle(0)) => 0.0,
            (Model::BenjaminOno, ModeIndex::Circle(n)) => libm::sqrt(0.5 / n.unsigned_abs() as f64),
            (Model::Dnls, ModeIndex::Circle(n)) => 1.0 / libm::sqrt(1.0 + (n * n) as f64),
            (Model::HalfWave, ModeIndex::Circle(n)) => 1.0 / libm::sqrt(1.0 + n.unsigned_abs() as f64),
            (Model::Torus, m @ ModeIndex::Lattice(..)) => 1.0 / m.bracket(),
            _ => panic!("mode {mode:?} does not belong to model {self:?}"),
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zonal" | "zonal-nls" | "nls-s3" => Ok(Model::ZonalNls),
            "bo" | "benjamin-ono" => Ok(Model::BenjaminOno),
            "dnls" => Ok(Model::Dnls),
            "halfwave" | "half-wave" | "hw" => Ok(Model::HalfWave),
            "torus" | "nls-torus" => Ok(Model::Torus),
            other => Err(Error::invalid(alloc::format!("unknown model '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispersion_examples() {
        assert_eq!(Model::HalfWave.dispersion(ModeIndex::Circle(3)), 4.0);
        assert_eq!(Model::ZonalNls.dispersion(ModeIndex::Zonal(2)), 4.0);
        assert_eq!(Model::BenjaminOno.dispersion(ModeIndex::Circle(-2)), -4.0);
        assert_eq!(Model::Dnls.dispersion(ModeIndex::Circle(-3)), 9.0);
        let w = Model::Torus.dispersion(ModeIndex::Lattice(1, 1));
        assert!((w - (1.0 + 8.0 * PI * PI)).abs() < 1e-12);
    }

    #[test]
    fn bo_dispersion_matches_linear_symbol() {
        // Linear BO: c_t = -(symbol of H d_x^2) c, with H -> -i sign(n), d_x^2 -> -n^2.
        for n in -6i64..=6 {
            let sign = n.signum() as f64;
            let symbol = num_complex::Complex::new(0.0, -sign) * (-((n * n) as f64));
            let rate = -symbol;
            let omega = Model::BenjaminOno.dispersion(ModeIndex::Circle(n));
            // c_t = -i omega c
            assert!((rate - num_complex::Complex::new(0.0, -omega)).norm() < 1e-12);
        }
    }

    #[test]
    fn sigmas_are_positive() {
        for n in 1..50u32 {
            assert!(Model::ZonalNls.sigma(ModeIndex::Zonal(n)) > 0.0);
        }
        for n in -50i64..=50 {
            let m = ModeIndex::Circle(n);
            assert!(Model::Dnls.sigma(m) > 0.0);
            assert!(Model::HalfWave.sigma(m) > 0.0);
            if n != 0 {
                assert!(Model::BenjaminOno.sigma(m) > 0.0);
            }
        }
        assert_eq!(Model::BenjaminOno.sigma(ModeIndex::Circle(0)), 0.0);
    }

    #[test]
    fn parse_round_trip() {
        for m in Model::ALL {
            assert_eq!(m.tag().parse::<Model>().unwrap(), m);
            assert_eq!(Model::from_code(m.code()), Some(m));
        }
        assert!("kdv".parse::<Model>().is_err());
    }
}
