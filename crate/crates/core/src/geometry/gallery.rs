//! Built-in test domains.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use super::{ArcKind, ArcSpec, Corner, CuspAnnotation, DomainSpec, C64};
use crate::error::{Error, Result};

pub const GALLERY: &[&str] = &["disk", "ellipse", "square", "lune", "lens", "psi"];

/// Lune base point; the crescent lies outside the inner disk, so it must sit
/// to the right of 1.
pub const LUNE_Z0: f64 = 1.5;
pub const LENS_XI: f64 = 0.6;
pub const LENS_ALPHA: f64 = FRAC_1_SQRT_2;
pub const PSI_COEFFS: [f64; 2] = [1.0, 0.25];

pub fn disk(radius: f64, z0: C64) -> Result<DomainSpec> {
    if !(radius > 0.0) {
        return Err(Error::Invalid(format!(
            "disk radius {radius} must be positive"
        )));
    }
    let arcs = vec![ArcSpec::circle(C64::new(0.0, 0.0), radius, 0.0, TAU)];
    DomainSpec::build(
        "disk",
        arcs,
        vec![],
        vec![],
        z0,
        true,
        Some(C64::new(0.0, 0.0)),
    )
}

pub fn ellipse(a: f64, b: f64, z0: C64) -> Result<DomainSpec> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::Invalid("ellipse semi-axes must be positive".into()));
    }
    let arcs = vec![ArcSpec::new(ArcKind::Series {
        coeffs: vec![(1, [0.5 * (a + b), 0.0]), (-1, [0.5 * (a - b), 0.0])],
        theta0: 0.0,
        sweep: TAU,
    })];
    DomainSpec::build(
        "ellipse",
        arcs,
        vec![],
        vec![],
        z0,
        true,
        Some(C64::new(0.0, 0.0)),
    )
}

pub fn square(half: f64, z0: C64) -> Result<DomainSpec> {
    let v = [
        C64::new(half, -half),
        C64::new(half, half),
        C64::new(-half, half),
        C64::new(-half, -half),
    ];
    let arcs = (0..4)
        .map(|k| ArcSpec::segment(v[k], v[(k + 1) % 4]))
        .collect();
    let corners = v
        .iter()
        .map(|p| Corner {
            vertex: [p.re, p.im],
            alpha: 0.5,
        })
        .collect();
    DomainSpec::build(
        "square",
        arcs,
        vec![],
        corners,
        z0,
        true,
        Some(C64::new(0.0, 0.0)),
    )
}

/// Crescent between |z - 1| = 1 and |z - 1/2| = 1/2, pinched at 0.
///
/// The outer circle is traversed counterclockwise from 0 and the inner one
/// clockwise from 0. The annotated cusp is the upper horn.
pub fn lune(z0: C64) -> Result<DomainSpec> {
    let arcs = vec![
        ArcSpec::circle(C64::new(1.0, 0.0), 1.0, PI, TAU),
        ArcSpec::circle(C64::new(0.5, 0.0), 0.5, PI, -TAU),
    ];
    let cusp = CuspAnnotation {
        vertex: [0.0, 0.0],
        p: 2.0,
        big_p: 2.0,
        c1: 0.5,
        c2: 1.1,
        direction: [0.0, 1.0],
        x_check: 0.2,
    };
    DomainSpec::build("lune", arcs, vec![cusp], vec![], z0, true, None)
}

/// Two circular arcs joining -1 and `xi` with interior angle `alpha * pi`.
pub fn lens(xi: f64, alpha: f64, z0: C64) -> Result<DomainSpec> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Invalid(format!(
            "lens angle factor {alpha} must lie in (0, 1)"
        )));
    }
    if !(xi > -1.0) {
        return Err(Error::Invalid("lens vertex must lie right of -1".into()));
    }
    let beta = 0.5 * alpha * PI;
    let (a, b) = (C64::new(xi, 0.0), C64::new(-1.0, 0.0));
    let arcs = vec![ArcSpec::circular(a, b, beta), ArcSpec::circular(b, a, beta)];
    let corners = vec![
        Corner {
            vertex: [xi, 0.0],
            alpha,
        },
        Corner {
            vertex: [-1.0, 0.0],
            alpha,
        },
    ];
    DomainSpec::build("lens", arcs, vec![], corners, z0, true, None)
}

/// Image of the unit disk under `psi(w) = sum_{k>=1} coeffs[k-1] w^k`.
pub fn psi_image(coeffs: &[f64]) -> Result<DomainSpec> {
    if coeffs.is_empty() || !(coeffs[0] > 0.0) {
        return Err(Error::Invalid(
            "psi needs a positive linear coefficient".into(),
        ));
    }
    let arcs = vec![ArcSpec::new(ArcKind::Series {
        coeffs: coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (k as i32 + 1, [*c, 0.0]))
            .collect(),
        theta0: 0.0,
        sweep: TAU,
    })];
    DomainSpec::build("psi", arcs, vec![], vec![], C64::new(0.0, 0.0), true, None)
}

/// Gallery entry with default parameters.
pub fn by_name(name: &str) -> Result<DomainSpec> {
    match name {
        "disk" => disk(1.0, C64::new(0.0, 0.0)),
        "ellipse" => ellipse(1.0, 0.5, C64::new(0.0, 0.0)),
        "square" => square(1.0, C64::new(0.0, 0.0)),
        "lune" => lune(C64::new(LUNE_Z0, 0.0)),
        "lens" => lens(LENS_XI, LENS_ALPHA, C64::new(0.0, 0.0)),
        "psi" => psi_image(&PSI_COEFFS),
        _ => Err(Error::Config(format!(
            "unknown gallery domain '{name}'; known: {}",
            GALLERY.join(", ")
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_gallery_domain_builds() {
        for name in GALLERY {
            let d = by_name(name).unwrap();
            assert_eq!(d.winding_number(d.z0()).unwrap(), 1, "{name}");
        }
    }

    #[test]
    fn lune_cusp_envelope_holds() {
        let d = by_name("lune").unwrap();
        assert!(d.check_cusp_envelope(0, 100).unwrap());
        assert_eq!(d.winding_number(C64::new(0.75, 0.0)).unwrap(), 0);
        assert_eq!(d.winding_number(C64::new(1.75, 0.0)).unwrap(), 1);
    }

    #[test]
    fn lens_interior_angle_matches() {
        let d = by_name("lens").unwrap();
        // Tangent directions leaving the vertex xi along both arcs.
        let out0 = d.arcs[0].eval(0.0).1;
        let out1 = -d.arcs[1].eval(1.0).1;
        let angle = (out0 / out1).arg().abs();
        assert!((angle - LENS_ALPHA * PI).abs() < 1e-12);
        assert!(d.symmetric);
        assert_eq!(d.corners.len(), 2);
    }

    #[test]
    fn lune_center_is_snapped_midpoint() {
        let d = by_name("lune").unwrap();
        assert_eq!(d.center, [1.0, 0.0]);
    }
}
