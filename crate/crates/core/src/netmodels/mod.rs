//! Generative models: mixing matrices, memberships, degree vectors, population
//! matrices for MMSB and DCMM, and adjacency sampling.

pub mod io;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::numlin::{jacobi_eigen, EigenDecomposition};
use crate::rng::stream;
use crate::scalar::{dot, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mmsb,
    Dcmm,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Mmsb => "mmsb",
            ModelKind::Dcmm => "dcmm",
        })
    }
}

/// Symmetric full-rank `K x K` community connectivity matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct MixingMatrix<T> {
    entries: SymmetricMatrix<T>,
}

impl<T: Scalar> MixingMatrix<T> {
    /// Validates symmetry, finiteness, nonnegativity and full rank.
    pub fn new(entries: SymmetricMatrix<T>) -> Result<Self> {
        let d = entries.as_dense();
        if !d.is_finite() || d.data().iter().any(|&v| v < T::zero()) {
            return Err(Error::invalid("mixing matrix entries must be finite and nonnegative"));
        }
        let m = Self { entries };
        if !(m.sigma_k() > T::tol(1e-12) * m.max_entry().max(T::one())) {
            return Err(Error::SingularMixing(format!(
                "smallest singular value {} is not positive",
                m.sigma_k()
            )));
        }
        Ok(m)
    }

    pub fn k(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &SymmetricMatrix<T> {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries.get(i, j)
    }

    pub fn max_entry(&self) -> T {
        self.entries.as_dense().max_abs()
    }

    pub fn min_entry(&self) -> T {
        self.entries.as_dense().data().iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    /// Smallest singular value, from the Jacobi spectrum.
    pub fn sigma_k(&self) -> T {
        let e = jacobi_eigen(&self.entries).expect("jacobi on K x K converges");
        e.values.iter().fold(T::infinity(), |m, v| m.min(v.abs()))
    }

    /// MMSB identifiability: largest entry equals one.
    pub fn is_mmsb_flavor(&self) -> bool {
        (self.max_entry() - T::one()).abs() <= T::tol(1e-12)
    }

    /// DCMM identifiability: unit diagonal.
    pub fn is_dcmm_flavor(&self) -> bool {
        (0..self.k()).all(|i| (self.get(i, i) - T::one()).abs() <= T::tol(1e-12))
    }
}

/// `omega I + (1 - omega) 1 1'`: unit diagonal, off-diagonal `1 - omega`.
pub fn build_ptilde_standard<T: Scalar>(k: usize, omega: T) -> Result<MixingMatrix<T>> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !(omega > T::zero() && omega <= T::one()) {
        return Err(Error::invalid(format!("omega = {omega} outside (0, 1]")));
    }
    let off = T::one() - omega;
    MixingMatrix::new(SymmetricMatrix::from_upper(k, |i, j| if i == j { T::one() } else { off }))
}

/// `(2 - beta) I + (beta - 1) 1 1'`: unit diagonal, off-diagonal `beta - 1`,
/// smallest singular value `|beta - 2|`.
pub fn build_ptilde_offdiag<T: Scalar>(k: usize, beta: T) -> Result<MixingMatrix<T>> {
    if k == 0 {
        return Err(Error::invalid("K must be at least 1"));
    }
    if !beta.is_finite() || beta < T::one() {
        return Err(Error::invalid(format!("beta = {beta} must be at least 1")));
    }
    if beta == T::lit(2.0) && k > 1 {
        return Err(Error::SingularMixing("beta = 2 gives the all-ones matrix".into()));
    }
    let off = beta - T::one();
    MixingMatrix::new(SymmetricMatrix::from_upper(k, |i, j| if i == j { T::one() } else { off }))
}

/// Row-stochastic `n x K` membership with a pure node in every community.
#[derive(Clone, Debug, PartialEq)]
pub struct Membership<T> {
    rows: DenseMatrix<T>,
}

impl<T: Scalar> Membership<T> {
    pub fn new(rows: DenseMatrix<T>) -> Result<Self> {
        let k = rows.ncols();
        if k == 0 || rows.nrows() < k {
            return Err(Error::invalid("membership needs K >= 1 columns and n >= K rows"));
        }
        let tol = T::tol(1e-12);
        let mut has_pure = vec![false; k];
        for (i, r) in rows.rows_iter().enumerate() {
            if r.iter().any(|&v| !(v >= T::zero())) {
                return Err(Error::invalid(format!("row {i} has a negative or non-finite entry")));
            }
            let s: T = r.iter().copied().sum();
            if (s - T::one()).abs() > tol {
                return Err(Error::invalid(format!("row {i} sums to {s}")));
            }
            if let Some(c) = pure_community(r) {
                has_pure[c] = true;
            }
        }
        if let Some(c) = has_pure.iter().position(|&p| !p) {
            return Err(Error::invalid(format!("community {c} has no pure node")));
        }
        Ok(Self { rows })
    }

    pub fn n(&self) -> usize {
        self.rows.nrows()
    }

    pub fn k(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> &DenseMatrix<T> {
        &self.rows
    }

    /// `Pi' Pi`.
    pub fn gram(&self) -> DenseMatrix<T> {
        self.rows.tr_matmul(&self.rows).expect("same row count")
    }

    /// Smallest column sum.
    pub fn pi_min(&self) -> T {
        (0..self.k())
            .map(|c| self.rows.rows_iter().map(|r| r[c]).sum::<T>())
            .fold(T::infinity(), T::min)
    }

    /// Indices of one pure node per community (the first one found).
    pub fn pure_indices(&self) -> Vec<usize> {
        let mut out = vec![usize::MAX; self.k()];
        for (i, r) in self.rows.rows_iter().enumerate() {
            if let Some(c) = pure_community(r) {
                if out[c] == usize::MAX {
                    out[c] = i;
                }
            }
        }
        out
    }
}

fn pure_community<T: Scalar>(r: &[T]) -> Option<usize> {
    let mut hit = None;
    for (c, &v) in r.iter().enumerate() {
        if v == T::one() {
            hit = Some(c);
        } else if v != T::zero() {
            return None;
        }
    }
    hit
}

/// Samples a membership matrix. Rows `0..K` are the standard basis; every
/// later row is pure with probability `frac_pure` (community uniform) and
/// otherwise drawn from a symmetric Dirichlet(`dirichlet_a`).
pub fn sample_membership<T: Scalar>(
    n: usize,
    k: usize,
    frac_pure: f64,
    dirichlet_a: f64,
    seed: u64,
) -> Result<Membership<T>> {
    if k == 0 || n < k {
        return Err(Error::invalid(format!("need n >= K >= 1, got n = {n}, K = {k}")));
    }
    if !(0.0..=1.0).contains(&frac_pure) {
        return Err(Error::invalid(format!("frac_pure = {frac_pure} outside [0, 1]")));
    }
    let gamma = Gamma::new(dirichlet_a, 1.0)
        .map_err(|_| Error::invalid(format!("dirichlet_a = {dirichlet_a} must be positive")))?;
    let mut rng = stream(seed);
    let mut rows = DenseMatrix::<T>::zeros(n, k);
    for c in 0..k {
        rows[(c, c)] = T::one();
    }
    let mut draws = vec![0.0f64; k];
    for i in k..n {
        let u: f64 = rng.random();
        if u < frac_pure {
            let c = rng.random_range(0..k);
            rows[(i, c)] = T::one();
            continue;
        }
        for d in draws.iter_mut() {
            *d = gamma.sample(&mut rng);
        }
        let s: f64 = draws.iter().sum();
        if s > 0.0 && s.is_finite() {
            let row = rows.row_mut(i);
            for (x, &d) in row.iter_mut().zip(&draws) {
                *x = T::lit(d / s);
            }
        } else {
            // every gamma draw underflowed (tiny a): the Dirichlet limit is a vertex
            let c = rng.random_range(0..k);
            rows[(i, c)] = T::one();
        }
    }
    Membership::new(rows)
}

/// Positive per-node degree parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeVector<T> {
    theta: Vec<T>,
}

impl<T: Scalar> DegreeVector<T> {
    pub fn new(theta: Vec<T>) -> Result<Self> {
        if theta.is_empty() || theta.iter().any(|&t| !(t > T::zero()) || !t.is_finite()) {
            return Err(Error::invalid("degree parameters must be finite and positive"));
        }
        Ok(Self { theta })
    }

    pub fn constant(n: usize, value: T) -> Result<Self> {
        Self::new(vec![value; n])
    }

    pub fn values(&self) -> &[T] {
        &self.theta
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn max(&self) -> T {
        self.theta.iter().copied().fold(T::zero(), T::max)
    }

    pub fn min(&self) -> T {
        self.theta.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn l1(&self) -> T {
        self.theta.iter().copied().sum()
    }
}

/// `theta_i = sqrt(rho) * u_i` with `u_i ~ Uniform[lo_ratio, 1]`.
pub fn sample_degrees<T: Scalar>(n: usize, rho: f64, lo_ratio: f64, seed: u64) -> Result<DegreeVector<T>> {
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::invalid(format!("rho = {rho} outside (0, 1]")));
    }
    if !(lo_ratio > 0.0 && lo_ratio <= 1.0) {
        return Err(Error::invalid(format!("theta ratio = {lo_ratio} outside (0, 1]")));
    }
    let mut rng = stream(seed);
    let s = rho.sqrt();
    let theta = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            T::lit(s * (lo_ratio + (1.0 - lo_ratio) * u))
        })
        .collect();
    DegreeVector::new(theta)
}

/// The scale part of a population matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Scale<T> {
    Sparsity(T),
    Degrees(DegreeVector<T>),
}

/// `Omega = E[A]`, together with the parameters that generated it.
#[derive(Clone, Debug)]
pub struct PopulationMatrix<T> {
    omega: SymmetricMatrix<T>,
    model: ModelKind,
    mixing: MixingMatrix<T>,
    membership: Membership<T>,
    scale: Scale<T>,
}

impl<T: Scalar> PopulationMatrix<T> {
    pub fn omega(&self) -> &SymmetricMatrix<T> {
        &self.omega
    }

    pub fn model(&self) -> ModelKind {
        self.model
    }

    pub fn mixing(&self) -> &MixingMatrix<T> {
        &self.mixing
    }

    pub fn membership(&self) -> &Membership<T> {
        &self.membership
    }

    pub fn scale(&self) -> &Scale<T> {
        &self.scale
    }

    pub fn n(&self) -> usize {
        self.omega.dim()
    }

    pub fn k(&self) -> usize {
        self.mixing.k()
    }

    /// `B = Theta Pi` (or `sqrt(rho) Pi`), so that `Omega = B P B'`.
    fn factor(&self) -> DenseMatrix<T> {
        let pi = self.membership.rows();
        match &self.scale {
            Scale::Sparsity(rho) => pi.scale(rho.sqrt()),
            Scale::Degrees(theta) => {
                let mut b = pi.clone();
                for (i, &t) in theta.values().iter().enumerate() {
                    b.row_mut(i).iter_mut().for_each(|v| *v *= t);
                }
                b
            }
        }
    }

    /// Compact eigendecomposition of `Omega` through its `K x K` factors.
    ///
    /// With `G = B'B`, the nonzero spectrum of `B P B'` is that of
    /// `G^{1/2} P G^{1/2} = V D V'`, and `U = B G^{-1/2} V` has orthonormal
    /// columns. Costs `O(n K^2)`; used for diagnostics and as an independent
    /// route to the population eigenvectors.
    pub fn compact_eigen(&self) -> Result<EigenDecomposition<T>> {
        let b = self.factor();
        let g = SymmetricMatrix::new(symmetrize(b.tr_matmul(&b)?))?;
        let ge = jacobi_eigen(&g)?;
        let k = self.k();
        if ge.values.iter().any(|&v| !(v > T::zero())) {
            return Err(Error::invalid("membership Gram matrix is singular"));
        }
        let half = spectral_function(&ge, |v| v.sqrt());
        let inv_half = spectral_function(&ge, |v| T::one() / v.sqrt());
        let p = self.mixing.entries().as_dense();
        let core = SymmetricMatrix::new(symmetrize(half.matmul(p)?.matmul(&half)?))?;
        let ce = jacobi_eigen(&core)?;
        let mut u = b.matmul(&inv_half)?.matmul(&ce.vectors)?;
        for c in 0..k {
            let mut col = u.column(c);
            crate::numlin::apply_sign_rule(&mut col);
            for (i, x) in col.into_iter().enumerate() {
                u[(i, c)] = x;
            }
        }
        Ok(EigenDecomposition {
            values: ce.values,
            vectors: u,
        })
    }

    /// `sigma_K(Omega)`.
    pub fn sigma_k(&self) -> Result<T> {
        Ok(self.compact_eigen()?.values.iter().fold(T::infinity(), |m, v| m.min(v.abs())))
    }
}

fn symmetrize<T: Scalar>(m: DenseMatrix<T>) -> DenseMatrix<T> {
    let half = T::lit(0.5);
    DenseMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j {
            m[(i, i)]
        } else {
            half * (m[(i, j)] + m[(j, i)])
        }
    })
}

/// `V f(D) V'` for a full decomposition.
fn spectral_function<T: Scalar>(e: &EigenDecomposition<T>, f: impl Fn(T) -> T) -> DenseMatrix<T> {
    let k = e.values.len();
    DenseMatrix::from_fn(k, k, |i, j| {
        (0..k)
            .map(|l| e.vectors[(i, l)] * f(e.values[l]) * e.vectors[(j, l)])
            .sum()
    })
}

/// `q(i, j) = Pi(i,:) P Pi(j,:)'`, evaluated on the upper triangle.
fn membership_bilinear<T: Scalar>(
    mixing: &MixingMatrix<T>,
    membership: &Membership<T>,
    mut scale: impl FnMut(usize, usize, T) -> T,
) -> Result<SymmetricMatrix<T>> {
    if mixing.k() != membership.k() {
        return Err(Error::invalid(format!(
            "mixing matrix is {}x{} but membership has {} columns",
            mixing.k(),
            mixing.k(),
            membership.k()
        )));
    }
    let pi = membership.rows();
    let c = pi.matmul(mixing.entries().as_dense())?;
    let n = membership.n();
    Ok(SymmetricMatrix::from_upper(n, |i, j| {
        let q = dot(c.row(i), pi.row(j));
        scale(i, j, q).min(T::one()).max(T::zero())
    }))
}

/// `Omega = rho Pi P Pi'`.
pub fn omega_mmsb<T: Scalar>(rho: T, mixing: &MixingMatrix<T>, membership: &Membership<T>) -> Result<PopulationMatrix<T>> {
    if !(rho >= T::zero()) || rho > T::one() {
        return Err(Error::InvalidProbability(format!("rho = {rho} outside [0, 1]")));
    }
    if !mixing.is_mmsb_flavor() {
        return Err(Error::invalid("MMSB mixing matrix must have maximum entry 1"));
    }
    if rho * mixing.max_entry() > T::one() + T::tol(1e-12) {
        return Err(Error::InvalidProbability(format!(
            "rho * max P = {} exceeds 1",
            rho * mixing.max_entry()
        )));
    }
    let omega = membership_bilinear(mixing, membership, |_, _, q| rho * q)?;
    Ok(PopulationMatrix {
        omega,
        model: ModelKind::Mmsb,
        mixing: mixing.clone(),
        membership: membership.clone(),
        scale: Scale::Sparsity(rho),
    })
}

/// `Omega = Theta Pi P Pi' Theta`.
pub fn omega_dcmm<T: Scalar>(
    theta: &DegreeVector<T>,
    mixing: &MixingMatrix<T>,
    membership: &Membership<T>,
) -> Result<PopulationMatrix<T>> {
    if theta.len() != membership.n() {
        return Err(Error::invalid(format!(
            "{} degree parameters for {} nodes",
            theta.len(),
            membership.n()
        )));
    }
    if !mixing.is_dcmm_flavor() {
        return Err(Error::invalid("DCMM mixing matrix must have unit diagonal"));
    }
    if theta.max() * mixing.max_entry() > T::one() + T::tol(1e-12) {
        return Err(Error::InvalidProbability(format!(
            "theta_max * max P = {} exceeds 1",
            theta.max() * mixing.max_entry()
        )));
    }
    let t = theta.values();
    let omega = membership_bilinear(mixing, membership, |i, j, q| t[i] * t[j] * q)?;
    Ok(PopulationMatrix {
        omega,
        model: ModelKind::Dcmm,
        mixing: mixing.clone(),
        membership: membership.clone(),
        scale: Scale::Degrees(theta.clone()),
    })
}

/// `rho n >= log n`.
pub fn gate_sparsity(rho: f64, n: usize) -> bool {
    rho * n as f64 >= (n as f64).ln()
}

/// `P_max theta_max ||theta||_1 >= log n`.
pub fn gate_degrees(p_max: f64, theta_max: f64, theta_l1: f64, n: usize) -> bool {
    p_max * theta_max * theta_l1 >= (n as f64).ln()
}

/// Simple undirected graph on `n` labelled vertices, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Adjacency {
    n: usize,
    bits: Vec<u8>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        Self { n, bits: vec![0; n * n] }
    }

    /// Builds from an edge list; self-loops and out-of-range ends are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut a = Self::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i},{j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at {i}")));
            }
            a.set_edge(i, j);
        }
        Ok(a)
    }

    fn set_edge(&mut self, i: usize, j: usize) {
        self.bits[i * self.n + j] = 1;
        self.bits[j * self.n + i] = 1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.n + j] != 0
    }

    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.bits[i * self.n..(i + 1) * self.n].iter().map(|&b| b as usize).sum()
    }

    pub fn to_matrix<T: Scalar>(&self) -> SymmetricMatrix<T> {
        SymmetricMatrix::from_upper(self.n, |i, j| if self.has_edge(i, j) { T::one() } else { T::zero() })
    }

    /// Adds an edge; used by property tests on monotone graph functions.
    pub fn with_edge(&self, i: usize, j: usize) -> Result<Self> {
        let mut a = self.clone();
        if i >= self.n || j >= self.n || i == j {
            return Err(Error::invalid(format!("cannot add edge ({i},{j})")));
        }
        a.set_edge(i, j);
        Ok(a)
    }
}

/// Samples `A(i,j) ~ Bernoulli(Omega(i,j))` for `i < j`, one uniform deviate
/// per pair in row-major upper-triangle order, with zero diagonal. Using the
/// same seed across different `Omega` couples the draws: the edge set is
/// monotone in every entry of `Omega`.
pub fn sample_adjacency<T: Scalar>(omega: &SymmetricMatrix<T>, seed: u64) -> Adjacency {
    let n = omega.dim();
    let mut a = Adjacency::empty(n);
    let mut rng = stream(seed);
    for i in 0..n {
        let row = omega.row(i);
        for (j, &p) in row.iter().enumerate().skip(i + 1) {
            let u: f64 = rng.random();
            if u < p.to_f64_lossy() {
                a.set_edge(i, j);
            }
        }
    }
    a
}

/// Erdos-Renyi `G(n, p)`: the one-community MMSB with `P = [[1]]`, `rho = p`.
pub fn sample_er(n: usize, p: f64, seed: u64) -> Result<Adjacency> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(format!("p = {p} outside [0, 1]")));
    }
    if n == 0 {
        return Ok(Adjacency::empty(0));
    }
    let mixing = MixingMatrix::<f64>::new(SymmetricMatrix::identity(1))?;
    let membership = Membership::new(DenseMatrix::from_vec(n, 1, vec![1.0; n])?)?;
    let pop = omega_mmsb(p, &mixing, &membership)?;
    Ok(sample_adjacency(pop.omega(), seed))
}
