//! Dutch RD (EPSG:28992) to WGS84 (EPSG:4326) coordinate transformation.
//!
//! The grid coordinates are inverted through the oblique stereographic
//! projection on the Bessel 1841 ellipsoid, shifted to WGS84 with a
//! 7-parameter similarity transformation, and converted back to geodetic
//! latitude/longitude. The inverse path applies the exact algebraic inverse
//! of each step so round trips close to well under a millimeter.
//! Centimeter-grade grid corrections are out of scope.

use crate::geometry::{PolygonGeom, Wgs84Point};
use crate::{GeoError, Result};

/// Planar RD coordinates in meters (EPSG:28992).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub x: f64,
    pub y: f64,
}

impl RdPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Working domain of the RD grid.
pub const RD_X_RANGE: (f64, f64) = (-7000.0, 300000.0);
pub const RD_Y_RANGE: (f64, f64) = (289000.0, 629000.0);

struct Ellipsoid {
    a: f64,
    e2: f64,
}

const BESSEL: Ellipsoid = Ellipsoid {
    a: 6377397.155,
    e2: ellipsoid_e2(299.1528128),
};

const WGS84: Ellipsoid = Ellipsoid {
    a: 6378137.0,
    e2: ellipsoid_e2(298.257223563),
};

const fn ellipsoid_e2(inv_f: f64) -> f64 {
    let f = 1.0 / inv_f;
    2.0 * f - f * f
}

// Projection constants for RD New: origin at Amersfoort, scale 0.9999079,
// false easting/northing 155000/463000.
const LAT0_DEG: f64 = 52.0 + 9.0 / 60.0 + 22.178 / 3600.0;
const LON0_DEG: f64 = 5.0 + 23.0 / 60.0 + 15.500 / 3600.0;
const K0: f64 = 0.9999079;
const FALSE_EASTING: f64 = 155000.0;
const FALSE_NORTHING: f64 = 463000.0;

/// Derived constants of the oblique stereographic projection on Bessel.
struct StereoParams {
    e: f64,
    n: f64,
    c: f64,
    chi0: f64,
    lambda0: f64,
    two_r_k0: f64,
}

fn stereo_params() -> StereoParams {
    let phi0 = LAT0_DEG.to_radians();
    let lambda0 = LON0_DEG.to_radians();
    let e2 = BESSEL.e2;
    let e = e2.sqrt();

    let sin_phi0 = phi0.sin();
    let rho0 = BESSEL.a * (1.0 - e2) / (1.0 - e2 * sin_phi0 * sin_phi0).powf(1.5);
    let nu0 = BESSEL.a / (1.0 - e2 * sin_phi0 * sin_phi0).sqrt();
    let r = (rho0 * nu0).sqrt();

    let n = (1.0 + e2 * phi0.cos().powi(4) / (1.0 - e2)).sqrt();
    let s1 = (1.0 + sin_phi0) / (1.0 - sin_phi0);
    let s2 = (1.0 - e * sin_phi0) / (1.0 + e * sin_phi0);
    let w1 = (s1 * s2.powf(e)).powf(n);
    let sin_chi0 = (w1 - 1.0) / (w1 + 1.0);
    let c = (n + sin_phi0) * (1.0 - sin_chi0) / ((n - sin_phi0) * (1.0 + sin_chi0));
    let w2 = c * w1;
    let chi0 = ((w2 - 1.0) / (w2 + 1.0)).asin();

    StereoParams {
        e,
        n,
        c,
        chi0,
        lambda0,
        two_r_k0: 2.0 * r * K0,
    }
}

/// Geodetic Bessel latitude/longitude (radians) to RD grid meters.
fn stereo_forward(phi: f64, lambda: f64) -> (f64, f64) {
    let p = stereo_params();
    let big_lambda = p.n * (lambda - p.lambda0) + p.lambda0;
    let sin_phi = phi.sin();
    let sa = (1.0 + sin_phi) / (1.0 - sin_phi);
    let sb = (1.0 - p.e * sin_phi) / (1.0 + p.e * sin_phi);
    let w = p.c * (sa * sb.powf(p.e)).powf(p.n);
    let chi = ((w - 1.0) / (w + 1.0)).asin();
    let dl = big_lambda - p.lambda0;
    let b = 1.0 + chi.sin() * p.chi0.sin() + chi.cos() * p.chi0.cos() * dl.cos();
    let east = FALSE_EASTING + p.two_r_k0 * chi.cos() * dl.sin() / b;
    let north =
        FALSE_NORTHING + p.two_r_k0 * (chi.sin() * p.chi0.cos() - chi.cos() * p.chi0.sin() * dl.cos()) / b;
    (east, north)
}

/// RD grid meters to geodetic Bessel latitude/longitude (radians).
fn stereo_inverse(east: f64, north: f64) -> (f64, f64) {
    let p = stereo_params();
    let de = east - FALSE_EASTING;
    let dn = north - FALSE_NORTHING;

    let g = p.two_r_k0 * (std::f64::consts::FRAC_PI_4 - p.chi0 / 2.0).tan();
    let h = 2.0 * p.two_r_k0 * p.chi0.tan() + g;
    let i = (de / (h + dn)).atan();
    let j = (de / (g - dn)).atan() - i;
    let chi = p.chi0 + 2.0 * ((dn - de * (j / 2.0).tan()) / p.two_r_k0).atan();
    let big_lambda = j + 2.0 * i + p.lambda0;
    let lambda = (big_lambda - p.lambda0) / p.n + p.lambda0;

    // Isometric latitude, then iterate back to geodetic latitude.
    let psi = 0.5 * ((1.0 + chi.sin()) / (p.c * (1.0 - chi.sin()))).ln() / p.n;
    let e = p.e;
    let e2 = BESSEL.e2;
    let mut phi = 2.0 * psi.exp().atan() - std::f64::consts::FRAC_PI_2;
    for _ in 0..32 {
        let sin_phi = phi.sin();
        let psi_i = ((phi / 2.0 + std::f64::consts::FRAC_PI_4).tan()
            * ((1.0 - e * sin_phi) / (1.0 + e * sin_phi)).powf(e / 2.0))
        .ln();
        let delta = (psi_i - psi) * phi.cos() * (1.0 - e2 * sin_phi * sin_phi) / (1.0 - e2);
        phi -= delta;
        if delta.abs() < 1e-15 {
            break;
        }
    }
    (phi, lambda)
}

fn geodetic_to_geocentric(ell: &Ellipsoid, phi: f64, lambda: f64, height: f64) -> [f64; 3] {
    let sin_phi = phi.sin();
    let nu = ell.a / (1.0 - ell.e2 * sin_phi * sin_phi).sqrt();
    [
        (nu + height) * phi.cos() * lambda.cos(),
        (nu + height) * phi.cos() * lambda.sin(),
        (nu * (1.0 - ell.e2) + height) * sin_phi,
    ]
}

fn geocentric_to_geodetic(ell: &Ellipsoid, xyz: [f64; 3]) -> (f64, f64, f64) {
    let [x, y, z] = xyz;
    let lambda = y.atan2(x);
    let p = (x * x + y * y).sqrt();
    let mut phi = z.atan2(p * (1.0 - ell.e2));
    let mut height = 0.0;
    for _ in 0..32 {
        let sin_phi = phi.sin();
        let nu = ell.a / (1.0 - ell.e2 * sin_phi * sin_phi).sqrt();
        height = p / phi.cos() - nu;
        let next = z.atan2(p * (1.0 - ell.e2 * nu / (nu + height)));
        if (next - phi).abs() < 1e-15 {
            phi = next;
            break;
        }
        phi = next;
    }
    (phi, lambda, height)
}

// Similarity transformation from the Amersfoort datum to WGS84, position
// vector rotation convention. Rotations in arc-seconds, scale in ppm.
const HELMERT_T: [f64; 3] = [565.2369, 50.0087, 465.658];
const HELMERT_R_ARCSEC: [f64; 3] = [-0.406857, 0.350733, -1.870347];
const HELMERT_SCALE_PPM: f64 = 4.0812;

fn helmert_matrix() -> [[f64; 3]; 3] {
    let to_rad = std::f64::consts::PI / (180.0 * 3600.0);
    let rx = HELMERT_R_ARCSEC[0] * to_rad;
    let ry = HELMERT_R_ARCSEC[1] * to_rad;
    let rz = HELMERT_R_ARCSEC[2] * to_rad;
    [[1.0, -rz, ry], [rz, 1.0, -rx], [-ry, rx, 1.0]]
}

fn helmert_forward(xyz: [f64; 3]) -> [f64; 3] {
    let m = helmert_matrix();
    let scale = 1.0 + HELMERT_SCALE_PPM * 1e-6;
    let mut out = [0.0; 3];
    for (r, row) in m.iter().enumerate() {
        out[r] = HELMERT_T[r] + scale * (row[0] * xyz[0] + row[1] * xyz[1] + row[2] * xyz[2]);
    }
    out
}

/// Exact inverse of the forward similarity: invert the 3x3 matrix rather
/// than flipping parameter signs, so round trips close to fp precision.
fn helmert_inverse(xyz: [f64; 3]) -> [f64; 3] {
    let m = helmert_matrix();
    let scale = 1.0 + HELMERT_SCALE_PPM * 1e-6;
    let v = [
        (xyz[0] - HELMERT_T[0]) / scale,
        (xyz[1] - HELMERT_T[1]) / scale,
        (xyz[2] - HELMERT_T[2]) / scale,
    ];
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let adj = [
        [
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
        ],
        [
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
        ],
        [
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        ],
    ];
    let mut out = [0.0; 3];
    for (r, row) in adj.iter().enumerate() {
        out[r] = (row[0] * v[0] + row[1] * v[1] + row[2] * v[2]) / det;
    }
    out
}

fn check_domain(p: RdPoint) -> Result<()> {
    if !p.x.is_finite() || !p.y.is_finite() {
        return Err(GeoError::Domain(format!("non-finite RD point ({}, {})", p.x, p.y)));
    }
    if p.x < RD_X_RANGE.0 || p.x > RD_X_RANGE.1 || p.y < RD_Y_RANGE.0 || p.y > RD_Y_RANGE.1 {
        return Err(GeoError::Domain(format!(
            "RD point ({}, {}) outside x {:?}, y {:?}",
            p.x, p.y, RD_X_RANGE, RD_Y_RANGE
        )));
    }
    Ok(())
}

/// RD grid coordinates to WGS84 latitude/longitude in degrees.
pub fn rd_to_wgs84(p: RdPoint) -> Result<Wgs84Point> {
    check_domain(p)?;
    let (phi_b, lambda_b) = stereo_inverse(p.x, p.y);
    let xyz_b = geodetic_to_geocentric(&BESSEL, phi_b, lambda_b, 0.0);
    let xyz_w = helmert_forward(xyz_b);
    let (phi_w, lambda_w, _h) = geocentric_to_geodetic(&WGS84, xyz_w);
    Ok(Wgs84Point::new(phi_w.to_degrees(), lambda_w.to_degrees()))
}

/// WGS84 latitude/longitude in degrees to RD grid coordinates.
pub fn wgs84_to_rd(p: Wgs84Point) -> Result<RdPoint> {
    if !p.is_valid() {
        return Err(GeoError::Domain(format!("invalid WGS84 point ({}, {})", p.lat, p.lon)));
    }
    let xyz_w = geodetic_to_geocentric(&WGS84, p.lat.to_radians(), p.lon.to_radians(), 0.0);
    let xyz_b = helmert_inverse(xyz_w);
    let (phi_b, lambda_b, _h) = geocentric_to_geodetic(&BESSEL, xyz_b);
    let (x, y) = stereo_forward(phi_b, lambda_b);
    let rd = RdPoint::new(x, y);
    check_domain(rd)?;
    Ok(rd)
}

/// Reprojects every vertex of a polygon given in RD meters. GeoJSON stores
/// positions as (x, y); the output uses (lat, lon).
pub fn reproject_polygon_rd(rings_xy: &[Vec<(f64, f64)>]) -> Result<PolygonGeom> {
    let mut rings = Vec::with_capacity(rings_xy.len());
    for ring in rings_xy {
        let mut out = Vec::with_capacity(ring.len());
        for &(x, y) in ring {
            out.push(rd_to_wgs84(RdPoint::new(x, y))?);
        }
        rings.push(out);
    }
    Ok(PolygonGeom::new(rings))
}
