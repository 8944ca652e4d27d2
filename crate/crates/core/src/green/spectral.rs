use std::io::{Read, Write};
use std::sync::Once;

use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use super::GreenMatrix;
use crate::error::{Error, Result};
use crate::graph::Adjacency;
use crate::scalar::SpectralParam;

/// Largest graph decomposed without an explicit override.
pub const DEFAULT_SPECTRAL_CAP: usize = 5000;

static SEQUENTIAL: Once = Once::new();

/// Results must not depend on the thread pool, so the dense kernels run
/// single-threaded; parallelism is over samples instead.
pub(crate) fn init_solver() {
    SEQUENTIAL.call_once(|| faer::set_global_parallelism(faer::Par::Seq));
}

fn hamiltonian<A: Adjacency + ?Sized>(g: &A, d: usize) -> Mat<f64> {
    let n = g.vertex_count();
    let s = 1.0 / ((d - 1) as f64).sqrt();
    let mut h = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for &j in g.neighbors(i) {
            h[(i, j)] = s;
        }
    }
    h
}

fn check_size(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::InvalidParameters(format!(
            "graph has {n} vertices; dense decomposition is capped at {cap}"
        )));
    }
    if n == 0 {
        return Err(Error::InvalidParameters("empty graph".into()));
    }
    Ok(())
}

/// Eigenvalues `λ_1 ≥ … ≥ λ_N` of `H = A/√(d-1)` with orthonormal
/// eigenvectors.
#[derive(Clone, Debug)]
pub struct SpectralData {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Row-major: `vectors[i*n + k]` is component `i` of eigenvector `k`.
    vectors: Vec<f64>,
}

/// Decomposition of `H = A/√(d-1)` for any graph with degrees at most `d`.
pub fn spectral_decompose<A: Adjacency + ?Sized>(g: &A, d: usize) -> Result<SpectralData> {
    spectral_decompose_with_cap(g, d, DEFAULT_SPECTRAL_CAP)
}

pub fn spectral_decompose_with_cap<A: Adjacency + ?Sized>(g: &A, d: usize, cap: usize) -> Result<SpectralData> {
    let n = g.vertex_count();
    check_size(n, cap)?;
    init_solver();
    let h = hamiltonian(g, d);
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    // faer returns ascending order
    let eigenvalues: Vec<f64> = (0..n).rev().map(|k| s[k]).collect();
    let mut vectors = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            vectors[i * n + k] = u[(i, n - 1 - k)];
        }
    }
    if eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    Ok(SpectralData {
        n,
        eigenvalues,
        vectors,
    })
}

/// Eigenvalues of `H` only, descending.
pub fn eigenvalues<A: Adjacency + ?Sized>(g: &A, d: usize) -> Result<Vec<f64>> {
    let n = g.vertex_count();
    check_size(n, DEFAULT_SPECTRAL_CAP)?;
    init_solver();
    let mut ev = hamiltonian(g, d)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    if ev.iter().any(|x| !x.is_finite()) {
        return Err(Error::Eigensolver("non-finite eigenvalue".into()));
    }
    ev.reverse();
    Ok(ev)
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Component `i` of the `k`-th eigenvector (0-based, descending order).
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.n + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.component(i, k)).collect()
    }

    /// Stieltjes transform of the empirical spectral measure.
    pub fn m_n(&self, z: SpectralParam) -> C64 {
        let z = z.z();
        self.eigenvalues.iter().map(|&l| 1.0 / (l - z)).sum::<C64>() / self.n as f64
    }

    fn weights(&self, z: SpectralParam) -> Vec<C64> {
        self.eigenvalues.iter().map(|&l| 1.0 / (l - z.z())).collect()
    }

    fn entry_with(&self, w: &[C64], i: usize, j: usize) -> C64 {
        let n = self.n;
        let (a, b) = (&self.vectors[i * n..(i + 1) * n], &self.vectors[j * n..(j + 1) * n]);
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..n {
            let p = a[k] * b[k];
            re += p * w[k].re;
            im += p * w[k].im;
        }
        C64::new(re, im)
    }

    /// `G_ij(z) = Σ_k v_k(i) v_k(j) / (λ_k - z)`.
    pub fn green_entry(&self, i: usize, j: usize, z: SpectralParam) -> C64 {
        self.entry_with(&self.weights(z), i, j)
    }

    /// Selected entries at one `z`.
    pub fn green_entries(&self, pairs: &[(usize, usize)], z: SpectralParam) -> Vec<C64> {
        let w = self.weights(z);
        pairs.iter().map(|&(i, j)| self.entry_with(&w, i, j)).collect()
    }

    pub fn green_diagonal(&self, z: SpectralParam) -> Vec<C64> {
        let w = self.weights(z);
        (0..self.n).map(|i| self.entry_with(&w, i, i)).collect()
    }

    /// The full resolvent `V diag(1/(λ - z)) Vᵀ`.
    pub fn green(&self, z: SpectralParam) -> GreenMatrix {
        let n = self.n;
        let w = self.weights(z);
        let mut entries = vec![C64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.entry_with(&w, i, j);
                entries[i * n + j] = v;
                entries[j * n + i] = v;
            }
        }
        GreenMatrix::from_entries(z, n, entries)
    }

    /// `max |H - V Λ Vᵀ|` for the given graph.
    pub fn reconstruction_error<A: Adjacency + ?Sized>(&self, g: &A, d: usize) -> f64 {
        let n = self.n;
        let s = 1.0 / ((d - 1) as f64).sqrt();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let h = if g.has_edge(i, j) { s } else { 0.0 };
                let v: f64 = (0..n).map(|k| self.component(i, k) * self.component(j, k) * self.eigenvalues[k]).sum();
                worst = worst.max((h - v).abs());
            }
        }
        worst
    }
}

/// Little-endian `u64` count followed by the `f64` values.
pub fn write_eigenvalues_bin<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    w.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_eigenvalues_bin<R: Read>(mut r: R) -> Result<Vec<f64>> {
    let mut head = [0u8; 8];
    r.read_exact(&mut head)?;
    let count = u64::from_le_bytes(head) as usize;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * count {
        return Err(Error::Parse(format!(
            "eigenvalue dump declares {count} values but carries {} bytes",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}
