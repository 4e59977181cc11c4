//! TOML domain descriptions.
//!
//! Either name a gallery domain:
//!
//! ```toml
//! gallery = "lens"
//! xi = 0.6
//! alpha = 0.7071067811865476
//! z0 = [0.0, 0.0]
//! ```
//!
//! or list arcs explicitly:
//!
//! ```toml
//! name = "triangle"
//! z0 = [0.2, 0.2]
//! [[arcs]]
//! kind = "segment"
//! start = [0.0, 0.0]
//! end = [1.0, 0.0]
//! # ...
//! [[corners]]
//! vertex = [0.0, 0.0]
//! alpha = 0.5
//! ```

use serde::{Deserialize, Serialize};

use super::{gallery, ArcSpec, Corner, CuspAnnotation, DomainSpec, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub gallery: Option<String>,
    pub name: Option<String>,
    pub z0: Option<[f64; 2]>,
    pub center: Option<[f64; 2]>,
    pub symmetric: Option<bool>,
    /// Disk radius.
    pub radius: Option<f64>,
    /// Ellipse semi-axes.
    pub semi_axes: Option<[f64; 2]>,
    /// Lens vertex and angle factor.
    pub xi: Option<f64>,
    pub alpha: Option<f64>,
    /// Coefficients of psi for `w, w^2, ...`.
    pub psi: Option<Vec<f64>>,
    /// Square half side.
    pub half: Option<f64>,
    #[serde(default)]
    pub arcs: Vec<ArcSpec>,
    #[serde(default)]
    pub cusps: Vec<CuspAnnotation>,
    #[serde(default)]
    pub corners: Vec<Corner>,
}

impl DomainConfig {
    pub fn parse(text: &str) -> Result<DomainConfig> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build(&self) -> Result<DomainSpec> {
        let z0 = self.z0.map(|p| C64::new(p[0], p[1]));
        let center = self.center.map(|p| C64::new(p[0], p[1]));
        let d = match (&self.gallery, self.arcs.is_empty()) {
            (Some(_), false) => {
                return Err(Error::Config(
                    "give either `gallery` or `arcs`, not both".into(),
                ))
            }
            (None, true) => return Err(Error::Config("config needs `gallery` or `arcs`".into())),
            (Some(g), true) => {
                let origin = C64::new(0.0, 0.0);
                let d = match g.as_str() {
                    "disk" => gallery::disk(self.radius.unwrap_or(1.0), z0.unwrap_or(origin))?,
                    "ellipse" => {
                        let [a, b] = self.semi_axes.unwrap_or([1.0, 0.5]);
                        gallery::ellipse(a, b, z0.unwrap_or(origin))?
                    }
                    "square" => gallery::square(self.half.unwrap_or(1.0), z0.unwrap_or(origin))?,
                    "lune" => gallery::lune(z0.unwrap_or(C64::new(gallery::LUNE_Z0, 0.0)))?,
                    "lens" => gallery::lens(
                        self.xi.unwrap_or(gallery::LENS_XI),
                        self.alpha.unwrap_or(gallery::LENS_ALPHA),
                        z0.unwrap_or(origin),
                    )?,
                    "psi" => {
                        let d = gallery::psi_image(
                            self.psi.as_deref().unwrap_or(&gallery::PSI_COEFFS),
                        )?;
                        match z0 {
                            Some(z) => d.with_z0(z)?,
                            None => d,
                        }
                    }
                    other => gallery::by_name(other)?,
                };
                match center {
                    Some(c) => DomainSpec::build(
                        &d.name,
                        d.arcs.clone(),
                        d.cusps.clone(),
                        d.corners.clone(),
                        d.z0(),
                        d.symmetric,
                        Some(c),
                    )?,
                    None => d,
                }
            }
            (None, false) => DomainSpec::build(
                self.name.as_deref().unwrap_or("custom"),
                self.arcs.clone(),
                self.cusps.clone(),
                self.corners.clone(),
                z0.ok_or_else(|| Error::Config("explicit arcs need `z0`".into()))?,
                self.symmetric.unwrap_or(false),
                center,
            )?,
        };
        Ok(d)
    }
}

pub fn load_domain(path: &std::path::Path) -> Result<DomainSpec> {
    let text = std::fs::read_to_string(path)?;
    DomainConfig::parse(&text)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gallery_config() {
        let d = DomainConfig::parse("gallery = \"disk\"\nz0 = [0.5, 0.0]\n")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(d.z0, [0.5, 0.0]);
        assert_eq!(d.arcs.len(), 1);
    }

    #[test]
    fn explicit_arcs_config() {
        let text = r#"
name = "triangle"
z0 = [0.25, 0.25]
[[arcs]]
kind = "segment"
start = [0.0, 0.0]
end = [1.0, 0.0]
[[arcs]]
kind = "segment"
start = [1.0, 0.0]
end = [0.0, 1.0]
[[arcs]]
kind = "segment"
start = [0.0, 1.0]
end = [0.0, 0.0]
[[corners]]
vertex = [0.0, 0.0]
alpha = 0.5
"#;
        let d = DomainConfig::parse(text).unwrap().build().unwrap();
        assert_eq!(d.arcs.len(), 3);
        assert_eq!(d.corners.len(), 1);
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(DomainConfig::parse("gallery = \"disk\"\nradiuss = 2.0\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = DomainConfig::parse("gallery = \"disk\"\n")
            .unwrap()
            .build()
            .unwrap();
        let b = DomainConfig::parse("gallery = \"disk\"\nradius = 2.0\n")
            .unwrap()
            .build()
            .unwrap();
        let c = DomainConfig::parse("gallery = \"disk\"\n")
            .unwrap()
            .build()
            .unwrap();
        assert_ne!(a.id_hash, b.id_hash);
        assert_eq!(a.id_hash, c.id_hash);
    }
}
