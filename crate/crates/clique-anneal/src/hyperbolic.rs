//! Poincaré-ball geometry with curvature `c > 0`: exponential map at the
//! origin, Möbius addition, hyperbolic distance, and the stored-energy norm.
//!
//! Points live strictly inside the radius-`1/√c` ball (`c·‖x‖² < 1`). Every
//! producing operation clamps its output to radius `(1−1e-7)/√c` so boundary
//! blow-up cannot poison the distance computation downstream.

use crate::error::{Error, Result};
use crate::tensor::{dot, norm};

/// Margin kept between any produced point and the ball boundary.
pub const BALL_EPS: f64 = 1e-7;

/// A point on the Poincaré ball of curvature `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicPoint {
    pub coords: Vec<f64>,
    pub c: f64,
}

impl HyperbolicPoint {
    pub fn new(coords: Vec<f64>, c: f64) -> Result<HyperbolicPoint> {
        let p = HyperbolicPoint { coords, c };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.c <= 0.0 {
            return Err(Error::Numeric("curvature must be positive".into()));
        }
        let n2 = dot(&self.coords, &self.coords);
        if !(self.c * n2).is_finite() || self.c * n2 >= 1.0 {
            return Err(Error::Numeric(format!(
                "point on/outside the ball: c·‖x‖² = {}",
                self.c * n2
            )));
        }
        Ok(())
    }

    /// Euclidean norm of the coordinates: the stored energy.
    pub fn stored_energy(&self) -> f64 {
        norm(&self.coords)
    }
}

/// tanh(z)/z with the small-`z` series so `exp0` is exact through the origin.
#[inline]
pub(crate) fn tanh_over_z(z: f64) -> f64 {
    if z.abs() < 1e-6 {
        1.0 - z * z / 3.0
    } else {
        z.tanh() / z
    }
}

/// d/dz[tanh(z)/z] / z, finite at 0 (limit −2/3).
#[inline]
pub(crate) fn dtanh_over_z_over_z(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        -2.0 / 3.0 + 8.0 * z * z / 15.0
    } else {
        let t = z.tanh();
        let sech2 = 1.0 - t * t;
        (z * sech2 - t) / (z * z * z)
    }
}

/// Exponential map at the origin on raw coordinates (no clamping).
pub(crate) fn exp0_raw(x: &[f64], c: f64) -> Vec<f64> {
    let z = c.sqrt() * norm(x);
    let s = tanh_over_z(z);
    x.iter().map(|v| s * v).collect()
}

/// Clamp raw coordinates to radius `(1−1e-7)/√c`.
pub(crate) fn clamp_ball(x: &mut [f64], c: f64) {
    let r = norm(x);
    let max_r = (1.0 - BALL_EPS) / c.sqrt();
    if r > max_r {
        let s = max_r / r;
        for v in x.iter_mut() {
            *v *= s;
        }
    }
}

/// Map a Euclidean vector onto the ball: `tanh(√c‖x‖)·x/(√c‖x‖)`, the zero
/// vector mapping to the origin.
pub fn exp0(x: &[f64], c: f64) -> Result<HyperbolicPoint> {
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("exp0 input not finite".into()));
    }
    let mut y = exp0_raw(x, c);
    clamp_ball(&mut y, c);
    HyperbolicPoint::new(y, c)
}

/// Möbius addition on raw coordinates (no clamping).
pub(crate) fn mobius_add_raw(v: &[f64], w: &[f64], c: f64) -> Result<Vec<f64>> {
    let s = dot(v, w);
    let p = dot(v, v);
    let q = dot(w, w);
    let a = 1.0 + 2.0 * c * s + c * q;
    let b = 1.0 - c * p;
    let d = 1.0 + 2.0 * c * s + c * c * p * q;
    if d.abs() < 1e-15 {
        return Err(Error::Numeric("möbius addition denominator vanished".into()));
    }
    Ok(v.iter()
        .zip(w)
        .map(|(vi, wi)| (a * vi + b * wi) / d)
        .collect())
}

/// Hyperbolic analog of vector addition, closed on the ball.
pub fn mobius_add(v: &HyperbolicPoint, w: &HyperbolicPoint) -> Result<HyperbolicPoint> {
    if v.c != w.c {
        return Err(Error::Numeric("curvature mismatch in möbius addition".into()));
    }
    if v.coords.len() != w.coords.len() {
        return Err(Error::Numeric("dimension mismatch in möbius addition".into()));
    }
    let mut y = mobius_add_raw(&v.coords, &w.coords, v.c)?;
    clamp_ball(&mut y, v.c);
    HyperbolicPoint::new(y, v.c)
}

/// Geodesic distance on raw coordinates. Errors when a point touches the
/// boundary.
pub(crate) fn hyp_distance_raw(x: &[f64], y: &[f64], c: f64) -> Result<f64> {
    let a = 1.0 - c * dot(x, x);
    let b = 1.0 - c * dot(y, y);
    if a <= 0.0 || b <= 0.0 {
        return Err(Error::Numeric(
            "hyperbolic distance of a point on/outside the ball".into(),
        ));
    }
    let diff2: f64 = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (xi - yi) * (xi - yi))
        .sum();
    let tm1 = 2.0 * c * diff2 / (a * b); // t − 1 ≥ 0
    let t = 1.0 + tm1;
    // acosh(t) = ln(t + √((t−1)(t+1))), computed from tm1 for precision.
    Ok((t + (tm1 * (t + 1.0)).sqrt()).ln() / c.sqrt())
}

/// `d(x, y)`: zero iff the points coincide, symmetric, positive otherwise.
pub fn hyp_distance(x: &HyperbolicPoint, y: &HyperbolicPoint) -> Result<f64> {
    if x.c != y.c || x.coords.len() != y.coords.len() {
        return Err(Error::Numeric("mismatched points in hyperbolic distance".into()));
    }
    x.validate()?;
    y.validate()?;
    hyp_distance_raw(&x.coords, &y.coords, x.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_point<R: Rng>(rng: &mut R, dim: usize, c: f64, max_norm: f64) -> HyperbolicPoint {
        loop {
            let coords: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let r = norm(&coords);
            if r < 1e-9 {
                continue;
            }
            let target = rng.gen_range(0.0..max_norm) / c.sqrt();
            let coords = coords.iter().map(|v| v * target / r).collect();
            return HyperbolicPoint::new(coords, c).unwrap();
        }
    }

    #[test]
    fn exp0_zero_is_origin() {
        let p = exp0(&[0.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(p.coords, vec![0.0, 0.0, 0.0]);
        assert_eq!(p.stored_energy(), 0.0);
    }

    #[test]
    fn exp0_moderate_input_matches_formula() {
        let p = exp0(&[2.0, 0.0], 1.0).unwrap();
        assert!((p.stored_energy() - 2.0f64.tanh()).abs() < 1e-12);
        assert!(p.stored_energy() < 1.0);
    }

    #[test]
    fn exp0_large_input_lands_inside() {
        // tanh(10) exceeds the safety radius, so the clamp takes over; the
        // point stays strictly inside the ball either way.
        let p = exp0(&[10.0, 0.0], 1.0).unwrap();
        assert!((p.stored_energy() - (1.0 - BALL_EPS)).abs() < 1e-12);
        assert!(p.stored_energy() < 1.0);
    }

    #[test]
    fn exp0_is_radial() {
        let x = [0.3, -0.7, 0.2];
        let p = exp0(&x, 1.0).unwrap();
        let scale = p.coords[0] / x[0];
        assert!(scale > 0.0);
        for (a, b) in p.coords.iter().zip(&x) {
            assert!((a - scale * b).abs() < 1e-12);
        }
    }

    #[test]
    fn mobius_identity_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let zero = HyperbolicPoint::new(vec![0.0; 4], 1.0).unwrap();
        for _ in 0..100 {
            let w = random_point(&mut rng, 4, 1.0, 0.95);
            let got = mobius_add(&zero, &w).unwrap();
            for (a, b) in got.coords.iter().zip(&w.coords) {
                assert!((a - b).abs() < 1e-12);
            }
            let neg = HyperbolicPoint::new(w.coords.iter().map(|v| -v).collect(), 1.0).unwrap();
            let sum = mobius_add(&w, &neg).unwrap();
            assert!(sum.stored_energy() < 1e-12);
        }
    }

    #[test]
    fn distance_closed_form() {
        let x = HyperbolicPoint::new(vec![0.0, 0.0], 1.0).unwrap();
        let y = HyperbolicPoint::new(vec![0.6, 0.0], 1.0).unwrap();
        let d = hyp_distance(&x, &y).unwrap();
        assert!((d - 4.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn distance_identity_and_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let x = random_point(&mut rng, 5, 1.0, 0.9);
            let y = random_point(&mut rng, 5, 1.0, 0.9);
            assert_eq!(hyp_distance(&x, &x).unwrap(), 0.0);
            let dxy = hyp_distance(&x, &y).unwrap();
            let dyx = hyp_distance(&y, &x).unwrap();
            assert!((dxy - dyx).abs() < 1e-12);
            assert!(dxy >= 0.0);
        }
    }

    #[test]
    fn distance_rejects_boundary_point() {
        let x = HyperbolicPoint {
            coords: vec![1.0, 0.0],
            c: 1.0,
        };
        let y = HyperbolicPoint::new(vec![0.1, 0.0], 1.0).unwrap();
        assert!(hyp_distance(&x, &y).is_err());
    }

    #[test]
    fn energy_monotone_in_preimage_radius() {
        // Strictly increasing until the safety clamp engages (around r ≈ 8.4
        // for c = 1), non-decreasing after.
        let u = [1.0 / 3.0f64.sqrt(); 3];
        let mut last = -1.0;
        for i in 1..=80 {
            let r = i as f64 * 0.1;
            let x: Vec<f64> = u.iter().map(|v| v * r).collect();
            let e = exp0(&x, 1.0).unwrap().stored_energy();
            assert!(e > last, "not strictly increasing at r={r}");
            last = e;
        }
        for i in 81..=200 {
            let r = i as f64 * 0.1;
            let x: Vec<f64> = u.iter().map(|v| v * r).collect();
            let e = exp0(&x, 1.0).unwrap().stored_energy();
            assert!(e >= last - 1e-12, "decreasing at r={r}");
            last = e;
        }
    }

    #[test]
    fn curvature_mismatch_is_error() {
        let x = HyperbolicPoint::new(vec![0.1], 1.0).unwrap();
        let y = HyperbolicPoint::new(vec![0.1], 2.0).unwrap();
        assert!(mobius_add(&x, &y).is_err());
    }
}
