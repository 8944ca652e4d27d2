//! Resolvents of graphs and of weighted extensions, minors, the edge
//! average `Q(G, z)`, and closed-form tree Green's functions.

mod spectral;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{distances_from, Adjacency, DeficitGraph, Graph, RegularGraph, TreeKind};
use crate::scalar::{m_d, m_sc, SpectralParam};

pub use spectral::{
    eigenvalues, read_eigenvalues_bin, spectral_decompose, spectral_decompose_with_cap, write_eigenvalues_bin,
    SpectralData, DEFAULT_SPECTRAL_CAP,
};

/// Pivots below this magnitude are rejected in Schur-complement formulas.
pub const PIVOT_FLOOR: f64 = 1e-12;

/// A dense complex symmetric resolvent at one spectral parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct GreenMatrix {
    z: SpectralParam,
    n: usize,
    entries: Vec<C64>,
}

impl GreenMatrix {
    pub(crate) fn from_entries(z: SpectralParam, n: usize, entries: Vec<C64>) -> Self {
        debug_assert_eq!(entries.len(), n * n);
        GreenMatrix { z, n, entries }
    }

    fn from_dmatrix(z: SpectralParam, m: &DMatrix<C64>) -> Self {
        let n = m.nrows();
        let entries = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
        GreenMatrix { z, n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn z(&self) -> SpectralParam {
        self.z
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `tr G / N`.
    pub fn m_n(&self) -> C64 {
        (0..self.n).map(|i| self.get(i, i)).sum::<C64>() / self.n as f64
    }

    pub fn to_dmatrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Worst relative Ward residual `|Σ_j |G_ij|² - Im G_ii/η| / (1 + Σ_j |G_ij|²)`.
    pub fn ward_residual(&self) -> f64 {
        let eta = self.z.eta();
        (0..self.n)
            .map(|i| {
                let s: f64 = self.row(i).iter().map(|x| x.norm_sqr()).sum();
                (s - self.get(i, i).im / eta).abs() / (1.0 + s)
            })
            .fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).norm());
            }
        }
        worst
    }

    /// `max |(M G) - I|` for `M = H - z - D` given as a dense matrix.
    pub fn inverse_residual(&self, m: &DMatrix<C64>) -> f64 {
        let prod = m * self.to_dmatrix();
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// `H - z - diag(weights)` as a dense complex matrix.
pub fn shifted_hamiltonian<A: Adjacency + ?Sized>(g: &A, d: usize, z: C64, weights: &[C64]) -> DMatrix<C64> {
    let n = g.vertex_count();
    let s = 1.0 / ((d - 1) as f64).sqrt();
    let mut m = DMatrix::from_element(n, n, C64::new(0.0, 0.0));
    for i in 0..n {
        for &j in g.neighbors(i) {
            m[(i, j)] = C64::new(s, 0.0);
        }
        m[(i, i)] -= z + weights.get(i).copied().unwrap_or_default();
    }
    m
}

/// Dense complex inverse by LU with partial pivoting.
pub fn invert(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    m.clone().lu().try_inverse().ok_or(Error::Singular)
}

/// Resolvent of a `d`-regular graph.
pub fn green_full(g: &RegularGraph, z: SpectralParam) -> Result<GreenMatrix> {
    Ok(spectral_decompose(g, g.d())?.green(z))
}

/// Resolvent of `H = A/√(d-1)` for any graph with degrees at most `d`,
/// by direct dense inversion.
pub fn green_direct<A: Adjacency + ?Sized>(g: &A, d: usize, z: SpectralParam) -> Result<GreenMatrix> {
    let m = shifted_hamiltonian(g, d, z.z(), &[]);
    Ok(GreenMatrix::from_dmatrix(z, &invert(&m)?))
}

/// `G^{(k)}` from `G` by the single-vertex Schur formula
/// `G_ij^{(k)} = G_ij - G_ik G_kj / G_kk`. Rows and columns are the
/// remaining vertices in increasing order.
pub fn schur_single(g: &GreenMatrix, k: usize) -> Result<GreenMatrix> {
    let n = g.n;
    if k >= n {
        return Err(Error::VertexOutOfRange { vertex: k, n });
    }
    let pivot = g.get(k, k);
    if pivot.norm() < PIVOT_FLOOR {
        return Err(Error::DegeneratePivot(pivot.norm()));
    }
    let keep: Vec<usize> = (0..n).filter(|&v| v != k).collect();
    let mut entries = Vec::with_capacity(keep.len() * keep.len());
    for &i in &keep {
        for &j in &keep {
            entries.push(g.get(i, j) - g.get(i, k) * g.get(k, j) / pivot);
        }
    }
    Ok(GreenMatrix::from_entries(g.z, keep.len(), entries))
}

/// The resolvent `G^{(T)}` of the graph with the vertices of `T` deleted.
#[derive(Clone, Debug)]
pub struct Minor {
    /// Remaining vertices, increasing; local index `k` is `kept[k]`.
    pub kept: Vec<usize>,
    pub green: GreenMatrix,
}

/// `G^{(T)}`: Schur complement from the full resolvent when `|T| = 1`,
/// recomputation on the induced subgraph otherwise.
pub fn green_minor<A: Adjacency + ?Sized>(g: &A, d: usize, z: SpectralParam, t: &[usize]) -> Result<Minor> {
    let n = g.vertex_count();
    let mut removed = vec![false; n];
    for &v in t {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        removed[v] = true;
    }
    let kept: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    if kept.is_empty() {
        return Err(Error::InvalidParameters("cannot remove every vertex".into()));
    }
    let green = if kept.len() == n - 1 {
        let full = spectral_decompose(g, d)?.green(z);
        schur_single(&full, (0..n).find(|&v| removed[v]).unwrap())?
    } else {
        let sub = Graph::induced(g, &kept);
        spectral_decompose(&sub, d)?.green(z)
    };
    Ok(Minor { kept, green })
}

/// `Ext(G, Δ)`: the graph `G` with weight `((d - g(v) - deg v)/(d-1))·Δ` on
/// the diagonal at every vertex, standing in for the missing subtrees.
#[derive(Clone, Debug)]
pub struct WeightedExtension {
    pub base: DeficitGraph,
    pub delta: C64,
    pub z: SpectralParam,
}

impl WeightedExtension {
    pub fn new(base: DeficitGraph, delta: C64, z: SpectralParam) -> Self {
        WeightedExtension { base, delta, z }
    }

    pub fn weight(&self, v: usize) -> C64 {
        let d = self.base.d();
        self.delta * (self.base.missing(v) as f64 / (d - 1) as f64)
    }

    pub fn weights(&self) -> Vec<C64> {
        (0..self.base.vertex_count()).map(|v| self.weight(v)).collect()
    }

    pub fn matrix(&self) -> DMatrix<C64> {
        shifted_hamiltonian(&self.base, self.base.d(), self.z.z(), &self.weights())
    }
}

/// Resolvent of a weighted extension, in the local ids of its base graph.
pub fn green_ext(ext: &WeightedExtension) -> Result<GreenMatrix> {
    Ok(GreenMatrix::from_dmatrix(ext.z, &invert(&ext.matrix())?))
}

/// Selected columns of the resolvent of a weighted extension by a sparse LU
/// factorization; `out[k][i] = G_{i, cols[k]}`. Suited to large trees where
/// the dense inverse is out of reach.
pub fn green_ext_columns(ext: &WeightedExtension, cols: &[usize]) -> Result<Vec<Vec<C64>>> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};
    spectral::init_solver();
    let g = &ext.base;
    let n = g.vertex_count();
    if let Some(&c) = cols.iter().find(|&&c| c >= n) {
        return Err(Error::VertexOutOfRange { vertex: c, n });
    }
    let s = C64::new(1.0 / ((g.d() - 1) as f64).sqrt(), 0.0);
    let mut triplets = Vec::with_capacity(n + 2 * g.edge_count());
    for v in 0..n {
        triplets.push(Triplet::new(v, v, -ext.z.z() - ext.weight(v)));
        triplets.extend(g.neighbors(v).iter().map(|&u| Triplet::new(v, u, s)));
    }
    let m = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidGraph(format!("{e:?}")))?;
    let lu = m.sp_lu().map_err(|_| Error::Singular)?;
    let mut rhs = faer::Mat::<C64>::zeros(n, cols.len());
    for (k, &c) in cols.iter().enumerate() {
        rhs[(c, k)] = C64::new(1.0, 0.0);
    }
    let x = lu.solve(&rhs);
    let out: Vec<Vec<C64>> = (0..cols.len()).map(|k| (0..n).map(|i| x[(i, k)]).collect()).collect();
    if out.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    Ok(out)
}

fn q_sum<F: Fn(usize, usize) -> C64>(g: &RegularGraph, entry: F, diag: &[C64]) -> Result<C64> {
    let n = g.n();
    let mut total = C64::new(0.0, 0.0);
    for (i, j) in g.edges() {
        let gij = entry(i, j);
        for (a, b) in [(i, j), (j, i)] {
            let pivot = diag[b];
            if pivot.norm() < PIVOT_FLOOR {
                return Err(Error::DegeneratePivot(pivot.norm()));
            }
            total += diag[a] - gij * gij / pivot;
        }
    }
    Ok(total / (n * g.d()) as f64)
}

/// `Q(G, z) = (1/(Nd)) Σ_{i~j} G_ii^{(j)}`, each minor entry from the full
/// resolvent by the single-vertex Schur formula.
pub fn q_of_g(g: &RegularGraph, gm: &GreenMatrix) -> Result<C64> {
    if gm.n() != g.n() {
        return Err(Error::InconsistentData(format!(
            "resolvent has size {} but the graph has {} vertices",
            gm.n(),
            g.n()
        )));
    }
    let diag: Vec<C64> = (0..g.n()).map(|i| gm.get(i, i)).collect();
    q_sum(g, |i, j| gm.get(i, j), &diag)
}

/// [`q_of_g`] evaluating only the diagonal and edge entries of `G`.
pub fn q_spectral(g: &RegularGraph, sd: &SpectralData, z: SpectralParam) -> Result<C64> {
    if sd.n() != g.n() {
        return Err(Error::InconsistentData("spectral data does not match the graph".into()));
    }
    let diag = sd.green_diagonal(z);
    let edges = g.edges();
    let values = sd.green_entries(&edges, z);
    let lookup = |i: usize, j: usize| values[edges.binary_search(&(i.min(j), i.max(j))).unwrap()];
    q_sum(g, lookup, &diag)
}

/// Green's function of the infinite `d`-regular tree (`Regular`) or the
/// rooted `(d-1)`-ary tree (`Ary`) between vertices at distance `dist`
/// whose common ancestor is at depth `anc` (ignored for `Regular`).
pub fn green_closed_tree(dist: usize, anc: usize, z: impl Into<C64>, d: usize, kind: TreeKind) -> C64 {
    let z = z.into();
    let q = -m_sc(z) / ((d - 1) as f64).sqrt();
    let md = m_d(z, d);
    let decay = q.powu(dist as u32);
    match kind {
        TreeKind::Regular => md * decay,
        TreeKind::Ary => md * (1.0 - q.powu(2 * anc as u32 + 2)) * decay,
    }
}

/// Smallest constants for which `Ext(g, m_sc)` satisfies
/// `|G_ij| ≤ C (|m_sc|/√(d-1))^{dist(i,j)}` and `1/C ≤ |G_ii| ≤ C` over a
/// grid of spectral parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaProbe {
    pub offdiag_constant: f64,
    pub diag_constant: f64,
    /// Larger of the two.
    pub constant: f64,
    /// Grid point attaining `constant`.
    pub worst_z: (f64, f64),
    /// Set when `constant` exceeds the caller's threshold.
    pub flagged: bool,
}

/// Diagnostic for the tree-extension bounds on one connected graph.
pub fn omega_probe(g: &DeficitGraph, zs: &[SpectralParam], threshold: f64) -> Result<OmegaProbe> {
    let n = g.vertex_count();
    let d = g.d();
    let dist: Vec<Vec<usize>> = (0..n).map(|i| distances_from(g, &[i])).collect();
    if dist.iter().flatten().any(|&x| x == usize::MAX) {
        return Err(Error::InvalidGraph("omega probe needs a connected graph".into()));
    }
    let mut off = 0.0f64;
    let mut diag = 0.0f64;
    let mut worst = (f64::NEG_INFINITY, (0.0, 0.0));
    for &z in zs {
        let m = m_sc(z);
        let rate = m.norm() / ((d - 1) as f64).sqrt();
        let gm = green_ext(&WeightedExtension::new(g.clone(), m, z))?;
        let mut local = 0.0f64;
        for i in 0..n {
            let gii = gm.get(i, i).norm();
            let c = gii.max(1.0 / gii);
            diag = diag.max(c);
            local = local.max(c);
            for j in 0..n {
                if i != j {
                    let c = gm.get(i, j).norm() / rate.powi(dist[i][j] as i32);
                    off = off.max(c);
                    local = local.max(c);
                }
            }
        }
        if local > worst.0 {
            worst = (local, (z.e(), z.eta()));
        }
    }
    let constant = off.max(diag);
    Ok(OmegaProbe {
        offdiag_constant: off,
        diag_constant: diag,
        constant,
        worst_z: worst.1,
        flagged: constant > threshold,
    })
}

#[cfg(test)]
mod tests;
