//! SE(3) rigid transforms, exponential/logarithmic maps, and rigid point-set
//! fitting. Everything downstream moves through these types.

use nalgebra::{Matrix3, Quaternion, UnitQuaternion, Vector3};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Below this rotation angle (radians) exp/log switch to Taylor branches.
pub const SMALL_ANGLE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("rotation angle within {0} of pi; logarithm is ill-conditioned")]
    LogNearPi(f64),
    #[error("rigid fit needs at least 3 points, got {0}")]
    TooFewPoints(usize),
    #[error("rigid fit input is degenerate (collinear or coincident points)")]
    DegenerateFit,
}

/// Rigid SE(3) transform: unit-quaternion rotation plus translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: UnitQuaternion<f64>,
    pub translation: Vector3<f64>,
}

/// Element of se(3): translational part `rho`, rotational part `phi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Twist {
    pub rho: Vector3<f64>,
    pub phi: Vector3<f64>,
}

impl Default for Pose {
    fn default() -> Self {
        Self::identity()
    }
}

impl Pose {
    pub fn identity() -> Self {
        Pose {
            rotation: UnitQuaternion::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vector3<f64>) -> Self {
        Pose { rotation, translation }
    }

    pub fn from_parts(qw: f64, qx: f64, qy: f64, qz: f64, t: Vector3<f64>) -> Self {
        let q = UnitQuaternion::new_normalize(Quaternion::new(qw, qx, qy, qz));
        Pose { rotation: q, translation: t }
    }

    /// Composition `self * other` (apply `other` first, then `self`).
    /// The quaternion is renormalized to keep long chains from drifting.
    pub fn compose(&self, other: &Pose) -> Pose {
        let q = UnitQuaternion::new_normalize(
            self.rotation.into_inner() * other.rotation.into_inner(),
        );
        Pose {
            rotation: q,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let inv_rot = self.rotation.inverse();
        Pose {
            rotation: inv_rot,
            translation: -(inv_rot * self.translation),
        }
    }

    pub fn transform_point(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    /// Serialization layout: `[qw, qx, qy, qz, tx, ty, tz]`.
    pub fn to_array(&self) -> [f64; 7] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k, self.translation.x, self.translation.y, self.translation.z]
    }

    pub fn from_array(a: &[f64; 7]) -> Self {
        Pose::from_parts(a[0], a[1], a[2], a[3], Vector3::new(a[4], a[5], a[6]))
    }

    /// Rotation angle in [0, pi].
    pub fn rotation_angle(&self) -> f64 {
        self.rotation.angle()
    }
}

impl Serialize for Pose {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let a = <[f64; 7]>::deserialize(d)?;
        let norm = (a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3]).sqrt();
        if norm < 1e-12 {
            return Err(D::Error::custom("pose quaternion has zero norm"));
        }
        Ok(Pose::from_array(&a))
    }
}

impl Twist {
    pub fn zero() -> Self {
        Twist { rho: Vector3::zeros(), phi: Vector3::zeros() }
    }

    pub fn new(rho: Vector3<f64>, phi: Vector3<f64>) -> Self {
        Twist { rho, phi }
    }

    /// Serialization layout: `[rho_x, rho_y, rho_z, phi_x, phi_y, phi_z]`.
    pub fn to_array(&self) -> [f64; 6] {
        [self.rho.x, self.rho.y, self.rho.z, self.phi.x, self.phi.y, self.phi.z]
    }

    pub fn from_array(a: &[f64; 6]) -> Self {
        Twist {
            rho: Vector3::new(a[0], a[1], a[2]),
            phi: Vector3::new(a[3], a[4], a[5]),
        }
    }

    pub fn norm(&self) -> f64 {
        (self.rho.norm_squared() + self.phi.norm_squared()).sqrt()
    }
}

impl Serialize for Twist {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Twist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Twist::from_array(&<[f64; 6]>::deserialize(d)?))
    }
}

fn skew(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Exponential map se(3) -> SE(3). The rotation angle equals `|phi|`.
pub fn se3_exp(t: &Twist) -> Pose {
    let theta = t.phi.norm();
    let phi_hat = skew(&t.phi);
    let v = if theta < SMALL_ANGLE {
        // second-order Taylor of V
        Matrix3::identity() + phi_hat * 0.5 + phi_hat * phi_hat / 6.0
    } else {
        let t2 = theta * theta;
        Matrix3::identity()
            + phi_hat * ((1.0 - theta.cos()) / t2)
            + phi_hat * phi_hat * ((theta - theta.sin()) / (t2 * theta))
    };
    Pose {
        rotation: UnitQuaternion::from_scaled_axis(t.phi),
        translation: v * t.rho,
    }
}

/// Logarithmic map SE(3) -> se(3). Fails when the rotation angle is within
/// 1e-6 of pi, where the axis is not recoverable to working precision.
pub fn se3_log(p: &Pose) -> Result<Twist, GeomError> {
    // canonicalize to w >= 0 so the angle lands in [0, pi]
    let q = p.rotation.quaternion();
    let (w, vec) = if q.w < 0.0 {
        (-q.w, -Vector3::new(q.i, q.j, q.k))
    } else {
        (q.w, Vector3::new(q.i, q.j, q.k))
    };
    let vn = vec.norm();
    let theta = 2.0 * vn.atan2(w);
    if theta > std::f64::consts::PI - 1e-6 {
        return Err(GeomError::LogNearPi(1e-6));
    }
    let phi = if theta < SMALL_ANGLE { vec * 2.0 } else { vec * (theta / vn) };
    let phi_hat = skew(&phi);
    let v_inv = if theta < SMALL_ANGLE {
        Matrix3::identity() - phi_hat * 0.5 + phi_hat * phi_hat / 12.0
    } else {
        let half = 0.5 * theta;
        let cot_term = (1.0 - half * half.cos() / half.sin()) / (theta * theta);
        Matrix3::identity() - phi_hat * 0.5 + phi_hat * phi_hat * cot_term
    };
    Ok(Twist { rho: v_inv * p.translation, phi })
}

/// Least-squares rigid transform mapping `src` onto `dst` (Kabsch/Umeyama,
/// scale fixed at 1, determinant sign corrected).
pub fn fit_rigid(src: &[Vector3<f64>], dst: &[Vector3<f64>]) -> Result<Pose, GeomError> {
    assert_eq!(src.len(), dst.len(), "point lists must have equal length");
    let n = src.len();
    if n < 3 {
        return Err(GeomError::TooFewPoints(n));
    }
    let nf = n as f64;
    let c_src = src.iter().sum::<Vector3<f64>>() / nf;
    let c_dst = dst.iter().sum::<Vector3<f64>>() / nf;

    let mut cov = Matrix3::zeros();
    for (s, d) in src.iter().zip(dst.iter()) {
        cov += (d - c_dst) * (s - c_src).transpose();
    }
    let svd = cov.svd(true, true);
    let sv = svd.singular_values;
    // collinear or coincident input: the second singular value vanishes
    if sv[1] <= 1e-12 * sv[0].max(1e-300) {
        return Err(GeomError::DegenerateFit);
    }
    let u = svd.u.unwrap();
    let v_t = svd.v_t.unwrap();
    let mut d = Matrix3::identity();
    if (u * v_t).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let r = u * d * v_t;
    let rot = UnitQuaternion::from_matrix(&r);
    let t = c_dst - rot * c_src;
    Ok(Pose { rotation: rot, translation: t })
}
