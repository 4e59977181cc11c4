//! Area moments of the shifted powers `u = z - c` over the domain:
//! `M[m][n] = <u^m, u^n> = integral u^m conj(u)^n dA`, reduced to the
//! boundary by Green's identity as `(1 / (2i (n+1))) * contour u^m conj(u)^(n+1) du`.

use std::io::{Read, Write};

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::digest;
use crate::error::{Error, Result};
use crate::geometry::{DomainSpec, C64};
use crate::linalg::{cholesky, Mat};
use crate::precision::{from_c64, Real};
use crate::quadrature::QuadratureRule;

const MAGIC: &[u8; 8] = b"BBGRAM01";

#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix<T: Real> {
    pub degree: usize,
    pub matrix: Mat<T>,
    /// Expansion center of the power basis.
    pub center: C64,
    pub domain_hash: String,
    pub rule_digest: String,
}

impl<T: Real> GramMatrix<T> {
    pub fn precision_bits(&self) -> u32 {
        T::BITS
    }

    pub fn get(&self, m: usize, n: usize) -> Complex<T> {
        self.matrix[(m, n)]
    }

    pub fn area(&self) -> T {
        self.matrix[(0, 0)].re
    }

    /// Gram matrix of the first `k + 1` powers.
    pub fn truncate(&self, k: usize) -> GramMatrix<T> {
        GramMatrix {
            degree: k,
            matrix: self.matrix.leading(k + 1),
            ..self.clone()
        }
    }

    /// `sum_{j,k} p_j conj(q_k) M[j][k]` for coefficients in the shifted basis.
    pub fn inner_product(&self, p: &[Complex<T>], q: &[Complex<T>]) -> Result<Complex<T>> {
        let max = p.len().max(q.len());
        if max > self.degree + 1 {
            return Err(Error::OutOfRange {
                index: max - 1,
                max: self.degree,
            });
        }
        let mut s = Complex::zero();
        for (j, pj) in p.iter().enumerate() {
            let mut row = Complex::zero();
            for (k, qk) in q.iter().enumerate() {
                row += qk.conj() * self.matrix[(j, k)];
            }
            s += pj * row;
        }
        Ok(s)
    }

    /// Positive-definiteness check; returns the failing pivot on breakdown.
    pub fn check_positive_definite(&self) -> Result<()> {
        cholesky(&self.matrix)
            .map(|_| ())
            .map_err(|pivot| Error::NotPositiveDefinite {
                pivot,
                suggest: next_precision(T::BITS),
            })
    }

    pub fn to_binary(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        write_str(&mut out, &self.domain_hash);
        write_str(&mut out, &self.rule_digest);
        out.extend_from_slice(&(self.degree as u64).to_le_bytes());
        out.extend_from_slice(&T::BITS.to_le_bytes());
        out.extend_from_slice(&(T::LIMBS as u32).to_le_bytes());
        out.extend_from_slice(&self.center.re.to_le_bytes());
        out.extend_from_slice(&self.center.im.to_le_bytes());
        for v in &self.matrix.data {
            for part in [v.re, v.im] {
                for l in &part.limbs()[..T::LIMBS] {
                    out.extend_from_slice(&l.to_le_bytes());
                }
            }
        }
        let d = digest::bytes_digest(&out);
        out.extend_from_slice(d.as_bytes());
        out
    }

    /// Inverse of [`to_binary`]; rejects truncated or corrupted payloads.
    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 64 {
            return Err(Error::Format("gram file truncated".into()));
        }
        let (body, tail) = bytes.split_at(bytes.len() - 64);
        if digest::bytes_digest(body).as_bytes() != tail {
            return Err(Error::Format("gram file digest mismatch".into()));
        }
        let mut r = body;
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a gram file".into()));
        }
        let domain_hash = read_str(&mut r)?;
        let rule_digest = read_str(&mut r)?;
        let degree = read_u64(&mut r)? as usize;
        let bits = read_u32(&mut r)?;
        let limbs = read_u32(&mut r)? as usize;
        if bits != T::BITS || limbs != T::LIMBS {
            return Err(Error::Format(format!(
                "gram file holds {bits}-bit data, expected {}",
                T::BITS
            )));
        }
        let center = C64::new(read_f64(&mut r)?, read_f64(&mut r)?);
        let n = degree + 1;
        if r.len() != n * n * 2 * limbs * 8 {
            return Err(Error::Format("gram payload size mismatch".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        let mut buf = [0f64; 4];
        for _ in 0..n * n {
            let mut part = || -> Result<T> {
                for b in buf.iter_mut().take(limbs) {
                    *b = read_f64(&mut r)?;
                }
                Ok(T::from_limbs(&buf[..limbs]))
            };
            let re = part()?;
            let im = part()?;
            data.push(Complex::new(re, im));
        }
        Ok(GramMatrix {
            degree,
            matrix: Mat { n, data },
            center,
            domain_hash,
            rule_digest,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# domain_hash={}", self.domain_hash)?;
        writeln!(out, "# degree={}", self.degree)?;
        writeln!(out, "# precision_bits={}", T::BITS)?;
        writeln!(out, "# center={},{}", self.center.re, self.center.im)?;
        writeln!(out, "m,n,re,im")?;
        let n = self.degree + 1;
        for i in 0..n {
            for j in 0..n {
                let v = self.matrix[(i, j)];
                writeln!(out, "{},{},{:e},{:e}", i, j, v.re.to_f64(), v.im.to_f64())?;
            }
        }
        Ok(())
    }
}

pub fn next_precision(bits: u32) -> u32 {
    match bits {
        53 => 106,
        _ => 212,
    }
}

fn write_str(out: &mut Vec<u8>, s: &str) {
    out.extend_from_slice(&(s.len() as u32).to_le_bytes());
    out.extend_from_slice(s.as_bytes());
}

fn read_u32(r: &mut &[u8]) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut &[u8]) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64(r: &mut &[u8]) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn read_str(r: &mut &[u8]) -> Result<String> {
    let n = read_u32(r)? as usize;
    if n > r.len() {
        return Err(Error::Format("string length exceeds payload".into()));
    }
    let (s, rest) = r.split_at(n);
    *r = rest;
    String::from_utf8(s.to_vec()).map_err(|e| Error::Format(e.to_string()))
}

/// Assemble the Gram matrix of degree `n` from a boundary rule.
///
/// Entries with `m >= n` are integrated; the rest follow by Hermitian
/// symmetry and the diagonal is stored exactly real. Each entry is a
/// fixed-order sum over nodes, so the parallel result is bit-identical to
/// a serial one.
pub fn compute_gram<T: Real>(
    domain: &DomainSpec,
    rule: &QuadratureRule<T>,
    n: usize,
) -> Result<GramMatrix<T>> {
    if rule.domain_hash != domain.id_hash {
        return Err(Error::Invalid(
            "quadrature rule was built for a different domain".into(),
        ));
    }
    let c: Complex<T> = from_c64(domain.center());
    let jn = rule.len();
    // pw[k][j] = u_j^k w_j, pc[k][j] = conj(u_j)^k
    let mut pw: Vec<Vec<Complex<T>>> = Vec::with_capacity(n + 1);
    let mut pc: Vec<Vec<Complex<T>>> = Vec::with_capacity(n + 2);
    let u: Vec<Complex<T>> = rule.nodes.iter().map(|z| z - c).collect();
    let mut cur: Vec<Complex<T>> = vec![Complex::new(T::one(), T::zero()); jn];
    for k in 0..=n + 1 {
        if k <= n {
            pw.push(cur.iter().zip(&rule.weights).map(|(p, w)| p * w).collect());
        }
        pc.push(cur.iter().map(|p| p.conj()).collect());
        for (p, uj) in cur.iter_mut().zip(&u) {
            *p = *p * uj;
        }
    }
    for (k, row) in pw.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !(v.re.is_finite() && v.im.is_finite()) {
                let _ = k;
                return Err(Error::NonFinite { node: j });
            }
        }
    }

    let rows: Vec<Vec<Complex<T>>> = (0..=n)
        .into_par_iter()
        .map(|m| {
            (0..=m)
                .map(|k| {
                    let a = &pw[m];
                    let b = &pc[k + 1];
                    let mut s = Complex::<T>::zero();
                    for j in 0..jn {
                        s += a[j] * b[j];
                    }
                    // s / (2i (k+1)) = -i s / (2 (k+1))
                    let d = T::from_usize(2 * (k + 1));
                    Complex::new(s.im / d, -s.re / d)
                })
                .collect()
        })
        .collect();

    let mut mat = Mat::zeros(n + 1);
    for (m, row) in rows.into_iter().enumerate() {
        for (k, v) in row.into_iter().enumerate() {
            if m == k {
                mat[(m, m)] = Complex::new(v.re, T::zero());
            } else {
                mat[(m, k)] = v;
                mat[(k, m)] = v.conj();
            }
        }
    }
    let g = GramMatrix {
        degree: n,
        matrix: mat,
        center: domain.center(),
        domain_hash: domain.id_hash.clone(),
        rule_digest: rule.digest(),
    };
    if !(g.area() > T::zero()) {
        return Err(Error::NotPositiveDefinite {
            pivot: 0,
            suggest: next_precision(T::BITS),
        });
    }
    g.check_positive_definite()?;
    Ok(g)
}
