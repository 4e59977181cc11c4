//! On-disk Gram matrices keyed by domain, degree, precision and rule.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use bieberbach::digest::json_digest;
use bieberbach::gram::GramMatrix;
use bieberbach::quadrature::RuleParams;
use bieberbach::Real;

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn disabled() -> Self {
        Cache { dir: None }
    }

    fn path(&self, domain_hash: &str, n: usize, bits: u32, params: &RuleParams) -> Option<PathBuf> {
        let rule = json_digest(params);
        self.dir.as_ref().map(|d| {
            d.join(format!(
                "gram-{}-{n}-{bits}-{}.bin",
                &domain_hash[..16.min(domain_hash.len())],
                &rule[..16]
            ))
        })
    }

    /// A stored matrix, or `None` on a miss. Corrupt or mismatched entries
    /// are reported and treated as misses.
    pub fn lookup<T: Real>(
        &self,
        domain_hash: &str,
        n: usize,
        params: &RuleParams,
    ) -> Option<GramMatrix<T>> {
        let path = self.path(domain_hash, n, T::BITS, params)?;
        let bytes = fs::read(&path).ok()?;
        match GramMatrix::<T>::from_binary(&bytes) {
            Ok(g) if g.degree == n && g.domain_hash == domain_hash => {
                log::info!("cache hit {}", path.display());
                Some(g)
            }
            Ok(_) => {
                log::warn!(
                    "cache entry {} does not match its key; recomputing",
                    path.display()
                );
                None
            }
            Err(e) => {
                log::warn!(
                    "cache entry {} is unusable ({e}); recomputing",
                    path.display()
                );
                None
            }
        }
    }

    /// Write-then-rename, so readers never observe a partial file.
    pub fn store<T: Real>(&self, g: &GramMatrix<T>, params: &RuleParams) -> std::io::Result<()> {
        let Some(path) = self.path(&g.domain_hash, g.degree, T::BITS, params) else {
            return Ok(());
        };
        let dir = path.parent().unwrap_or(Path::new("."));
        fs::create_dir_all(dir)?;
        let tmp = dir.join(format!(
            ".{}.{}.tmp",
            path.file_name().and_then(|s| s.to_str()).unwrap_or("gram"),
            std::process::id()
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&g.to_binary())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use bieberbach::geometry::{gallery, C64};
    use bieberbach::gram::compute_gram;
    use bieberbach::quadrature::build_rule;
    use bieberbach::{Dd, Qd};

    fn sample() -> (GramMatrix<Dd>, RuleParams) {
        let d = gallery::ellipse(1.0, 0.5, C64::new(0.0, 0.0)).unwrap();
        let p = RuleParams::for_gram(4, bieberbach::Precision::DoubleDouble);
        let r = build_rule::<Dd>(&d, &p).unwrap();
        (compute_gram(&d, &r, 4).unwrap(), p)
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(Some(dir.path().to_path_buf()));
        let (g, p) = sample();
        c.store(&g, &p).unwrap();
        let back = c.lookup::<Dd>(&g.domain_hash, 4, &p).unwrap();
        assert_eq!(back.to_binary(), g.to_binary());
    }

    #[test]
    fn other_precision_or_params_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(Some(dir.path().to_path_buf()));
        let (g, p) = sample();
        c.store(&g, &p).unwrap();
        assert!(c.lookup::<Qd>(&g.domain_hash, 4, &p).is_none());
        let mut q = p;
        q.order += 1;
        assert!(c.lookup::<Dd>(&g.domain_hash, 4, &q).is_none());
        assert!(c.lookup::<Dd>(&g.domain_hash, 3, &p).is_none());
    }

    #[test]
    fn truncated_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let c = Cache::new(Some(dir.path().to_path_buf()));
        let (g, p) = sample();
        c.store(&g, &p).unwrap();
        let path = c.path(&g.domain_hash, 4, 106, &p).unwrap();
        let bytes = fs::read(&path).unwrap();
        fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(c.lookup::<Dd>(&g.domain_hash, 4, &p).is_none());
    }

    #[test]
    fn disabled_cache_never_hits() {
        let (g, p) = sample();
        let c = Cache::disabled();
        c.store(&g, &p).unwrap();
        assert!(c.lookup::<Dd>(&g.domain_hash, 4, &p).is_none());
    }
}
