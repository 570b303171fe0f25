//! Exact transfer-matrix Ising model on a `(2M+1) × (2N+1)` strip with plus
//! boundary conditions.
//!
//! Basis conventions: the row Hilbert space is `(ℂ²)^{⊗(2M+1)}` with column
//! `j = −M` as the most significant tensor factor. Within a factor, basis
//! vector 0 is spin `+1` and basis vector 1 is spin `−1`, so `σ̂ = diag(1, −1)`.
//! Basis index `b` has spin `σ_j = 1 − 2·bit(b, 2M − (j + M))`.
//!
//! Half-integer columns `k` are carried as `twice_k = 2k` (odd).
//!
//! Two representations of operators coexist. [`PauliString`] acts on vectors
//! in `O(dim)` and is used for correlators up to `M = 6`; [`RowOperator`] is
//! the dense matrix and is only built for small `M` (see [`DENSE_MAX_M`]).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cft::{two_point, ConformalChart};
use crate::{Error, Result};

/// `β_c = −½ ln(√2 − 1)`.
pub const BETA_C: f64 = 0.440_686_793_509_771_5;

/// Largest number of columns, `2M + 1`.
pub const MAX_COLUMNS: usize = 13;

/// Largest `M` for which dense row operators are built.
pub const DENSE_MAX_M: usize = 4;

/// Largest number of sites for [`partition_function_enum`].
pub const ENUM_MAX_SITES: usize = 25;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Fermion normalizations `A_ψ = (−1 − i)/√2`, `A_ψ̄ = conj(A_ψ)` and the
/// constant `Z = −π/2` relating correlators to parafermionic observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionNormalization {
    pub a_psi: Complex64,
    pub a_psibar: Complex64,
    pub z: f64,
}

pub const NORMALIZATION: FermionNormalization = FermionNormalization {
    a_psi: Complex64 { re: -std::f64::consts::FRAC_1_SQRT_2, im: -std::f64::consts::FRAC_1_SQRT_2 },
    a_psibar: Complex64 { re: -std::f64::consts::FRAC_1_SQRT_2, im: std::f64::consts::FRAC_1_SQRT_2 },
    z: -std::f64::consts::FRAC_PI_2,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripGeometry {
    m: usize,
    n: usize,
    beta: f64,
    delta: f64,
}

impl StripGeometry {
    /// `beta = 0` is accepted for counting checks; operations that need
    /// `V_M⁻¹` reject it.
    pub fn new(m: usize, n: usize, beta: f64, delta: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::Geometry("N must be at least 1".into()));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Geometry(format!("beta must be finite and non-negative, got {beta}")));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::Geometry(format!("delta must be positive, got {delta}")));
        }
        if 2 * m + 1 > MAX_COLUMNS {
            return Err(Error::TooLarge { n: 2 * m + 1, max: MAX_COLUMNS });
        }
        Ok(Self { m, n, beta, delta })
    }

    /// Unit mesh.
    pub fn unit(m: usize, n: usize, beta: f64) -> Result<Self> {
        Self::new(m, n, beta, 1.0)
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn columns(&self) -> usize {
        2 * self.m + 1
    }
    pub fn dim(&self) -> usize {
        1 << self.columns()
    }

    fn bit(&self, j: i32) -> usize {
        (2 * self.m as i32 - (j + self.m as i32)) as usize
    }

    /// Spin at column `j` in basis state `b`.
    pub fn spin(&self, b: usize, j: i32) -> f64 {
        if (b >> self.bit(j)) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    fn dense_guard(&self) -> Result<()> {
        if self.m > DENSE_MAX_M {
            return Err(Error::TooLarge { n: self.dim(), max: 1 << (2 * DENSE_MAX_M + 1) });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pauli {
    X,
    Y,
    Z,
}

/// Tensor product of Pauli matrices (identity elsewhere) with a scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliString {
    geom: StripGeometry,
    coeff: Complex64,
    flip: usize,
    z_mask: usize,
    y_mask: usize,
}

impl PauliString {
    fn new(geom: &StripGeometry, factors: &[(i32, Pauli)]) -> Self {
        let (mut flip, mut z_mask, mut y_mask) = (0, 0, 0);
        for &(j, p) in factors {
            let b = 1usize << geom.bit(j);
            match p {
                Pauli::X => flip |= b,
                Pauli::Y => {
                    flip |= b;
                    y_mask |= b;
                }
                Pauli::Z => z_mask |= b,
            }
        }
        Self { geom: *geom, coeff: ONE, flip, z_mask, y_mask }
    }

    pub fn scaled(mut self, c: Complex64) -> Self {
        self.coeff *= c;
        self
    }

    fn phase(&self, out: usize) -> Complex64 {
        let mut ph = self.coeff;
        if (out & self.z_mask).count_ones() % 2 == 1 {
            ph = -ph;
        }
        // Y|0> = i|1>, Y|1> = -i|0>: phase depends on the output bit
        let ys = self.y_mask.count_ones();
        if ys > 0 {
            let ones = (out & self.y_mask).count_ones();
            let zeros = ys - ones;
            ph *= I.powu(ones) * (-I).powu(zeros);
        }
        ph
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..v.len()).map(|i| self.phase(i) * v[i ^ self.flip]).collect()
    }

    pub fn to_dense(&self) -> RowOperator {
        let d = self.geom.dim();
        let mut mat = DMatrix::zeros(d, d);
        for i in 0..d {
            mat[(i, i ^ self.flip)] = self.phase(i);
        }
        RowOperator { mat }
    }
}

/// Dense operator on the row Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct RowOperator {
    pub mat: DMatrix<Complex64>,
}

impl RowOperator {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }
    pub fn identity(dim: usize) -> Self {
        Self { mat: DMatrix::identity(dim, dim) }
    }
}

/// `σ̂_j = Z` at column `j`.
pub fn sigma_string(geom: &StripGeometry, j: i32) -> PauliString {
    PauliString::new(geom, &[(j, Pauli::Z)])
}

/// `p_k = X_{−M} ⋯ X_{k−½} Z_{k+½}`, `k ∈ {−M−½, …, M−½}`.
pub fn p_string(geom: &StripGeometry, twice_k: i32) -> Result<PauliString> {
    let m = geom.m as i32;
    if twice_k % 2 == 0 || twice_k < -2 * m - 1 || twice_k > 2 * m - 1 {
        return Err(Error::InvalidArgument(format!("p_k column 2k = {twice_k} out of range")));
    }
    let mut f: Vec<(i32, Pauli)> = (-m..=(twice_k - 1) / 2).map(|j| (j, Pauli::X)).collect();
    f.push(((twice_k + 1) / 2, Pauli::Z));
    Ok(PauliString::new(geom, &f))
}

/// `q_k = X_{−M} ⋯ X_{k−3/2} Y_{k−½}`, `k ∈ {−M+½, …, M+½}`.
pub fn q_string(geom: &StripGeometry, twice_k: i32) -> Result<PauliString> {
    let m = geom.m as i32;
    if twice_k % 2 == 0 || twice_k < -2 * m + 1 || twice_k > 2 * m + 1 {
        return Err(Error::InvalidArgument(format!("q_k column 2k = {twice_k} out of range")));
    }
    let mut f: Vec<(i32, Pauli)> = (-m..=(twice_k - 3) / 2).map(|j| (j, Pauli::X)).collect();
    f.push(((twice_k - 1) / 2, Pauli::Y));
    Ok(PauliString::new(geom, &f))
}

/// Dense σ̂, p and q families, keyed by `j` and `2k` respectively.
#[derive(Debug, Clone)]
pub struct CliffordSet {
    pub sigma: Vec<(i32, RowOperator)>,
    pub p: Vec<(i32, RowOperator)>,
    pub q: Vec<(i32, RowOperator)>,
}

impl CliffordSet {
    /// All p and q generators in a fixed order.
    pub fn generators(&self) -> Vec<&RowOperator> {
        self.p.iter().chain(self.q.iter()).map(|(_, o)| o).collect()
    }

    /// Largest entry of `ab + ba − 2δ_ab·1` over all generator pairs, and of
    /// `σ² − 1` over the spins.
    pub fn clifford_deviation(&self) -> f64 {
        let gens = self.generators();
        let Some(first) = gens.first() else { return 0.0 };
        let d = first.dim();
        let id = DMatrix::<Complex64>::identity(d, d);
        let mut dev: f64 = 0.0;
        for (i, a) in gens.iter().enumerate() {
            for (j, b) in gens.iter().enumerate().skip(i) {
                let mut ac = &a.mat * &b.mat + &b.mat * &a.mat;
                if i == j {
                    ac -= &id * Complex64::new(2.0, 0.0);
                }
                dev = dev.max(ac.camax());
            }
        }
        for (_, s) in &self.sigma {
            dev = dev.max((&s.mat * &s.mat - &id).camax());
        }
        dev
    }
}

pub fn build_spin_and_clifford(geom: &StripGeometry) -> Result<CliffordSet> {
    geom.dense_guard()?;
    let m = geom.m as i32;
    let sigma = (-m..=m).map(|j| (j, sigma_string(geom, j).to_dense())).collect();
    let mut p = Vec::new();
    for tk in (-2 * m - 1..=2 * m - 1).step_by(2) {
        p.push((tk, p_string(geom, tk)?.to_dense()));
    }
    let mut q = Vec::new();
    for tk in (-2 * m + 1..=2 * m + 1).step_by(2) {
        q.push((tk, q_string(geom, tk)?.to_dense()));
    }
    Ok(CliffordSet { sigma, p, q })
}

/// Structured action of `V1`, `V2plus` and `V_M` on vectors.
#[derive(Debug, Clone)]
pub struct Transfer {
    geom: StripGeometry,
    v1_half: Vec<f64>,
}

impl Transfer {
    pub fn new(geom: &StripGeometry) -> Self {
        let m = geom.m as i32;
        let v1_half = (0..geom.dim())
            .map(|b| {
                let e: f64 = (-m..m).map(|j| geom.spin(b, j) * geom.spin(b, j + 1)).sum();
                (0.5 * geom.beta * e).exp()
            })
            .collect();
        Self { geom: *geom, v1_half }
    }

    pub fn v1_half_diag(&self) -> &[f64] {
        &self.v1_half
    }

    fn apply_kernel<T>(&self, v: &mut [T], diag: f64, off: f64)
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let m = self.geom.m as i32;
        for j in (-m + 1)..m {
            let mask = 1usize << self.geom.bit(j);
            for i in 0..v.len() {
                if i & mask == 0 {
                    let (a, b) = (v[i], v[i | mask]);
                    v[i] = a * diag + b * off;
                    v[i | mask] = a * off + b * diag;
                }
            }
        }
    }

    /// `V2plus = I ⊗ K^{⊗(2M−1)} ⊗ I`, `K = [[e^β, e^−β], [e^−β, e^β]]`.
    pub fn apply_v2<T>(&self, v: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let b = self.geom.beta;
        self.apply_kernel(v, b.exp(), (-b).exp());
    }

    pub fn apply_v2_inverse<T>(&self, v: &mut [T]) -> Result<()>
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        let b = self.geom.beta;
        let det = (2.0 * b).exp() - (-2.0 * b).exp();
        if !(det > 0.0) && self.geom.m > 0 {
            return Err(Error::Singular("V2plus is singular at beta = 0".into()));
        }
        self.apply_kernel(v, b.exp() / det, -(-b).exp() / det);
        Ok(())
    }

    pub fn apply_v1_half<T>(&self, v: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T>,
    {
        for (x, &d) in v.iter_mut().zip(&self.v1_half) {
            *x = *x * d;
        }
    }

    /// `V_M = V1^{1/2} V2plus V1^{1/2}`.
    pub fn apply_vm<T>(&self, v: &mut [T])
    where
        T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
    {
        self.apply_v1_half(v);
        self.apply_v2(v);
        self.apply_v1_half(v);
    }

    /// `V_M^p` applied with renormalization; returns the log of the scale
    /// removed.
    fn apply_vm_pow_scaled(&self, v: &mut [Complex64], p: usize) -> f64 {
        let mut log_scale = 0.0;
        for _ in 0..p {
            self.apply_vm(v);
            let s = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if s > 0.0 {
                for x in v.iter_mut() {
                    *x /= s;
                }
                log_scale += s.ln();
            }
        }
        log_scale
    }

    /// `V1^{1/2}|e₊⟩` followed by `V_M^p`, normalized, with its log scale.
    fn boundary_state(&self, p: usize) -> (Vec<Complex64>, f64) {
        let mut v = vec![ZERO; self.geom.dim()];
        v[0] = Complex64::new(self.v1_half[0], 0.0);
        let ls = self.apply_vm_pow_scaled(&mut v, p);
        (v, ls)
    }
}

/// Dense `V1`, `V2plus` and `V_M`.
#[derive(Debug, Clone)]
pub struct TransferMatrices {
    pub v1: RowOperator,
    pub v2plus: RowOperator,
    pub vm: RowOperator,
}

pub fn transfer_matrices(geom: &StripGeometry) -> Result<TransferMatrices> {
    geom.dense_guard()?;
    let t = Transfer::new(geom);
    let d = geom.dim();
    let v1 = DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            Complex64::new(t.v1_half[i] * t.v1_half[i], 0.0)
        } else {
            ZERO
        }
    });
    let mut v2 = DMatrix::zeros(d, d);
    let mut vm = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut col = vec![ZERO; d];
        col[j] = ONE;
        let mut c2 = col.clone();
        t.apply_v2(&mut c2);
        t.apply_vm(&mut col);
        for i in 0..d {
            v2[(i, j)] = c2[i];
            vm[(i, j)] = col[i];
        }
    }
    Ok(TransferMatrices {
        v1: RowOperator { mat: v1 },
        v2plus: RowOperator { mat: v2 },
        vm: RowOperator { mat: vm },
    })
}

/// `ln Z` with `Z = ⟨e₊|V1^{1/2} V_M^{2N} V1^{1/2}|e₊⟩`.
pub fn log_partition_function(geom: &StripGeometry) -> f64 {
    let t = Transfer::new(geom);
    let (v, ls) = t.boundary_state(geom.n);
    // V_M is symmetric, so Z = |V_M^N V1^{1/2} e₊|²
    let nrm: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    2.0 * ls + nrm.ln()
}

pub fn partition_function(geom: &StripGeometry) -> f64 {
    log_partition_function(geom).exp()
}

/// Direct sum of Boltzmann weights over interior spins with plus boundary.
///
/// Every row carries its horizontal bonds; vertical bonds are weighted on
/// interior columns only (boundary columns are pinned to `+`).
pub fn partition_function_enum(geom: &StripGeometry) -> Result<f64> {
    let (cols, rows) = (geom.columns(), 2 * geom.n + 1);
    if cols * rows > ENUM_MAX_SITES {
        return Err(Error::TooLarge { n: cols * rows, max: ENUM_MAX_SITES });
    }
    let ic = cols.saturating_sub(2);
    let ir = rows - 2;
    let free = ic * ir;
    let beta = geom.beta;
    let mut total = 0.0;
    let mut grid = vec![vec![1i32; cols]; rows];
    for conf in 0u64..(1u64 << free) {
        for r in 0..ir {
            for c in 0..ic {
                let bit = (conf >> (r * ic + c)) & 1;
                grid[r + 1][c + 1] = if bit == 0 { 1 } else { -1 };
            }
        }
        let mut e = 0i32;
        for row in &grid {
            for c in 0..cols - 1 {
                e += row[c] * row[c + 1];
            }
        }
        for r in 0..rows - 1 {
            for c in 1..cols.saturating_sub(1) {
                e += grid[r][c] * grid[r + 1][c];
            }
        }
        total += (beta * f64::from(e)).exp();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FermionKind {
    Psi,
    PsiBar,
}

/// Insertion point `k + i m` for a lattice fermion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticePoint {
    pub twice_k: i32,
    pub m: i32,
    pub kind: FermionKind,
}

impl LatticePoint {
    pub fn psi(twice_k: i32, m: i32) -> Self {
        Self { twice_k, m, kind: FermionKind::Psi }
    }
    pub fn psibar(twice_k: i32, m: i32) -> Self {
        Self { twice_k, m, kind: FermionKind::PsiBar }
    }
}

/// `ψ_k = A_ψ(q_k + p_k)` or `ψ̄_k = A_ψ̄(−q_k + p_k)` as two Pauli strings.
pub fn fermion_strings(geom: &StripGeometry, twice_k: i32, kind: FermionKind) -> Result<[PauliString; 2]> {
    let m = geom.m as i32;
    if twice_k % 2 == 0 || twice_k.abs() > 2 * m - 1 {
        return Err(Error::InvalidArgument(format!(
            "fermion column 2k = {twice_k} outside the strip interior for M = {m}"
        )));
    }
    let n = NORMALIZATION;
    let (a, sq) = match kind {
        FermionKind::Psi => (n.a_psi, ONE),
        FermionKind::PsiBar => (n.a_psibar, -ONE),
    };
    Ok([p_string(geom, twice_k)?.scaled(a), q_string(geom, twice_k)?.scaled(a * sq)])
}

fn apply_sum(ops: &[PauliString; 2], v: &[Complex64]) -> Vec<Complex64> {
    let a = ops[0].apply(v);
    let b = ops[1].apply(v);
    a.into_iter().zip(b).map(|(x, y)| x + y).collect()
}

/// Normalized correlator `⟨++|T Π ψ(z_i)|++⟩ / ⟨++|++⟩`.
///
/// `T` orders factors by row, largest `m` leftmost, with the sign of the
/// reordering permutation; factors on one row keep their given order. With
/// distinct rows in descending order this is the plain operator product with
/// `ψ(k + i m) = V_M^{−m} ψ_k V_M^m`, and only non-negative powers of `V_M`
/// are ever applied.
pub fn lattice_fermion_correlator(geom: &StripGeometry, points: &[LatticePoint]) -> Result<Complex64> {
    if points.len() % 2 == 1 {
        return Err(Error::OddCount(points.len()));
    }
    let n = geom.n as i32;
    for p in points {
        if p.m.abs() >= n {
            return Err(Error::InvalidArgument(format!("row {} outside |m| < N = {n}", p.m)));
        }
    }
    let ops: Vec<[PauliString; 2]> = points
        .iter()
        .map(|p| fermion_strings(geom, p.twice_k, p.kind))
        .collect::<Result<_>>()?;
    if points.is_empty() {
        return Ok(ONE);
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[b].m.cmp(&points[a].m));
    let sign = permutation_sign(&order);

    let t = Transfer::new(geom);
    let top = points[order[0]].m;
    let bottom = points[*order.last().unwrap()].m;
    let (left, ls_left) = t.boundary_state((n - top) as usize);
    let (mut v, mut ls_v) = t.boundary_state((n + bottom) as usize);
    let mut cur = bottom;
    for &idx in order.iter().rev() {
        let p = points[idx];
        ls_v += t.apply_vm_pow_scaled(&mut v, (p.m - cur) as usize);
        cur = p.m;
        v = apply_sum(&ops[idx], &v);
    }
    let overlap: Complex64 = left.iter().zip(&v).map(|(a, b)| a * b).sum();
    let log_z = log_partition_function(geom);
    Ok(overlap * (ls_left + ls_v - log_z).exp() * sign)
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut s = 1.0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                s = -s;
            }
        }
    }
    s
}

/// Parafermionic observables recovered from fermion correlators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parafermion {
    pub up: Complex64,
    pub down: Complex64,
}

/// Inverts
/// `⟨ψ(z)ψ(z′)⟩ = 2A_ψ²Z(F↑ − F↓)` and `⟨ψ(z)ψ̄(z̄′)⟩ = 2iA_ψA_ψ̄Z(F↑ + F↓)`.
pub fn parafermion_from_pair(psi_psi: Complex64, psi_psibar: Complex64) -> Result<Parafermion> {
    let n = NORMALIZATION;
    let c_minus = 2.0 * n.a_psi * n.a_psi * n.z;
    let c_plus = 2.0 * I * n.a_psi * n.a_psibar * n.z;
    if c_minus.norm() == 0.0 || c_plus.norm() == 0.0 {
        return Err(Error::Singular("parafermion relation constants vanish".into()));
    }
    let diff = psi_psi / c_minus;
    let sum = psi_psibar / c_plus;
    Ok(Parafermion { up: 0.5 * (sum + diff), down: 0.5 * (sum - diff) })
}

/// Forward relation; the inverse of [`parafermion_from_pair`].
pub fn correlators_from_parafermion(f: Parafermion) -> (Complex64, Complex64) {
    let n = NORMALIZATION;
    (
        2.0 * n.a_psi * n.a_psi * n.z * (f.up - f.down),
        2.0 * I * n.a_psi * n.a_psibar * n.z * (f.up + f.down),
    )
}

/// `F↑_{z′}(z)` and `F↓_{z′}(z)` from the lattice correlators at `z`, `z′`
/// (both given as ψ insertion sites).
pub fn parafermion_from_correlators(geom: &StripGeometry, z: (i32, i32), zp: (i32, i32)) -> Result<Parafermion> {
    if z == zp {
        return Err(Error::Coincident(0, 1));
    }
    let c1 = lattice_fermion_correlator(geom, &[LatticePoint::psi(z.0, z.1), LatticePoint::psi(zp.0, zp.1)])?;
    let c2 = lattice_fermion_correlator(geom, &[LatticePoint::psi(z.0, z.1), LatticePoint::psibar(zp.0, zp.1)])?;
    parafermion_from_pair(c1, c2)
}

/// Deviation of the conjugation `v ↦ V⁻¹ v V` from an isometry of the
/// Clifford bilinear form, for an arbitrary pair `(V, V⁻¹)`.
///
/// The form is `(a, b) = tr(ab + ba)/dim`. Each image is expanded in the
/// generator basis; both the expansion residual and the change of the form
/// enter the returned maximum.
pub fn induced_rotation_deviation(
    set: &CliffordSet,
    v: &DMatrix<Complex64>,
    v_inv: &DMatrix<Complex64>,
) -> f64 {
    let gens = set.generators();
    let dim = v.nrows() as f64;
    let images: Vec<DMatrix<Complex64>> = gens.iter().map(|g| v_inv * &g.mat * v).collect();
    let mut dev: f64 = 0.0;
    let mut coeffs = Vec::with_capacity(gens.len());
    for img in &images {
        let c: Vec<Complex64> = gens.iter().map(|g| (&g.mat * img).trace() / dim).collect();
        let mut recon = DMatrix::<Complex64>::zeros(img.nrows(), img.ncols());
        for (ci, g) in c.iter().zip(&gens) {
            recon += &g.mat * *ci;
        }
        dev = dev.max((&recon - img).camax());
        coeffs.push(c);
    }
    for a in 0..gens.len() {
        for b in 0..gens.len() {
            let before = (&gens[a].mat * &gens[b].mat + &gens[b].mat * &gens[a].mat).trace() / dim;
            let after = (&images[a] * &images[b] + &images[b] * &images[a]).trace() / dim;
            // the same form evaluated through the expansion coefficients
            let via: Complex64 = coeffs[a].iter().zip(&coeffs[b]).map(|(x, y)| 2.0 * x * y).sum();
            dev = dev.max((after - before).norm()).max((via - before).norm());
        }
    }
    dev
}

/// Induced rotation by `V_M` (requires `β > 0`).
pub fn induced_rotation_check(geom: &StripGeometry) -> Result<f64> {
    let set = build_spin_and_clifford(geom)?;
    let tm = transfer_matrices(geom)?;
    let inv = vm_inverse(geom)?;
    Ok(induced_rotation_deviation(&set, &tm.vm.mat, &inv))
}

/// Dense `V_M⁻¹ = V1^{−1/2} V2plus⁻¹ V1^{−1/2}`.
pub fn vm_inverse(geom: &StripGeometry) -> Result<DMatrix<Complex64>> {
    geom.dense_guard()?;
    let t = Transfer::new(geom);
    let d = geom.dim();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut col = vec![ZERO; d];
        col[j] = Complex64::new(1.0 / t.v1_half[j], 0.0);
        t.apply_v2_inverse(&mut col)?;
        for i in 0..d {
            out[(i, j)] = col[i] / t.v1_half[i];
        }
    }
    Ok(out)
}

/// Dense `V2plus⁻¹`.
pub fn v2_inverse(geom: &StripGeometry) -> Result<DMatrix<Complex64>> {
    geom.dense_guard()?;
    let t = Transfer::new(geom);
    let d = geom.dim();
    let mut out = DMatrix::zeros(d, d);
    for j in 0..d {
        let mut col = vec![ZERO; d];
        col[j] = ONE;
        t.apply_v2_inverse(&mut col)?;
        out.set_column(j, &DVector::from_vec(col));
    }
    Ok(out)
}

/// Vertical strip `|Re z| < ℓ/2` mapped to ℍ by
/// `z ↦ exp(iπ(z + ℓ/2)/ℓ)`: the rotation `z ↦ i(z + ℓ/2)` onto the strip
/// `0 < Im u < ℓ` followed by `u ↦ e^{πu/ℓ}`.
pub fn vertical_strip_chart(ell: f64) -> ConformalChart {
    let rot = ConformalChart::moebius(I, I * (0.5 * ell), ZERO, ONE);
    ConformalChart::compose(vec![rot, ConformalChart::horizontal_strip_to_h(ell)])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub m: usize,
    pub n: usize,
    pub delta: f64,
    pub lattice: Complex64,
    pub continuum: Complex64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingReport {
    pub rows: Vec<ScalingRow>,
    pub warnings: Vec<String>,
}

impl ScalingReport {
    /// Every error is at most `slack` times the error at the smallest `M`,
    /// and the largest-`M` error does not exceed it.
    pub fn non_increasing(&self, slack: f64) -> bool {
        let Some(first) = self.rows.first() else { return true };
        let last = self.rows.last().unwrap();
        last.rel_error <= first.rel_error * slack
            && self.rows.windows(2).all(|w| w[1].rel_error <= w[0].rel_error * slack)
    }
}

/// Options for [`scaling_limit_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingConfig {
    /// Physical strip width `ℓ = 2Mδ`.
    pub ell: f64,
    /// Half-height `N = height_factor · M`.
    pub height_factor: usize,
    pub beta: f64,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self { ell: 1.0, height_factor: 6, beta: BETA_C }
    }
}

/// Rows closer than this many strip widths to the top or bottom boundary
/// trigger a finite-height warning.
const MIN_CLEARANCE_WIDTHS: f64 = 1.0;

/// Lattice `⟨ψψ⟩/δ` against the continuum strip correlator.
///
/// The pair sits on column `k = ½` at rows `0` and `M`, i.e. a vertical
/// separation of `ℓ/2` at every mesh. The lattice row index grows opposite to
/// the continuum imaginary axis: the lattice site `k + i m` is compared at the
/// continuum point `δ(k − i m)`.
pub fn scaling_limit_report(widths: &[usize], cfg: &ScalingConfig) -> Result<ScalingReport> {
    let chart = vertical_strip_chart(cfg.ell);
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &m in widths {
        if m == 0 {
            return Err(Error::Geometry("scaling needs M >= 1".into()));
        }
        let delta = cfg.ell / (2.0 * m as f64);
        let n = cfg.height_factor * m;
        let geom = StripGeometry::new(m, n, cfg.beta, delta)?;
        let clearance = (n as f64 - m as f64) * delta;
        if clearance < MIN_CLEARANCE_WIDTHS * cfg.ell {
            warnings.push(format!(
                "M = {m}: N = {n} leaves {clearance:.3} of clearance (< {MIN_CLEARANCE_WIDTHS} widths); finite-height contamination"
            ));
        }
        let (z, w) = (LatticePoint::psi(1, m as i32), LatticePoint::psi(1, 0));
        let lattice = lattice_fermion_correlator(&geom, &[z, w])? / delta;
        let to_c = |p: LatticePoint| Complex64::new(0.5 * p.twice_k as f64 * delta, -(p.m as f64) * delta);
        let continuum = two_point(&chart, to_c(z), to_c(w))?;
        let rel_error = (lattice - continuum).norm() / continuum.norm();
        rows.push(ScalingRow { m, n, delta, lattice, continuum, rel_error });
    }
    Ok(ScalingReport { rows, warnings })
}
