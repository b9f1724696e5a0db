//! Dense complex vectors and operators for small dimensions (d ≲ 16).

use std::f64::consts::FRAC_1_SQRT_2;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{Complex, Error, Result, EXACT_TOL};

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Unit-norm state vector in `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex>,
}

impl Ket {
    /// Normalizes `amps`; fails when the norm is below `1e-12`.
    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        normalize(amps)
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        normalize(amps.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// Computational basis vector `|index⟩` in dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::InvalidIndices {
                indices: vec![index],
                len: dim,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Ket { amps })
    }

    pub fn z_plus() -> Self {
        Ket {
            amps: vec![ONE, ZERO],
        }
    }

    pub fn z_minus() -> Self {
        Ket {
            amps: vec![ZERO, ONE],
        }
    }

    pub fn x_plus() -> Self {
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        Ket { amps: vec![h, h] }
    }

    pub fn x_minus() -> Self {
        let h = Complex::new(FRAC_1_SQRT_2, 0.0);
        Ket { amps: vec![h, -h] }
    }

    pub fn y_plus() -> Self {
        Ket {
            amps: vec![
                Complex::new(FRAC_1_SQRT_2, 0.0),
                Complex::new(0.0, FRAC_1_SQRT_2),
            ],
        }
    }

    pub fn y_minus() -> Self {
        Ket {
            amps: vec![
                Complex::new(FRAC_1_SQRT_2, 0.0),
                Complex::new(0.0, -FRAC_1_SQRT_2),
            ],
        }
    }

    /// Qubit ket with the given Bloch vector; the vector is normalized first.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if r < EXACT_TOL {
            return Err(Error::DegenerateState { norm: r });
        }
        let theta = (z / r).clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        Ok(Ket {
            amps: vec![
                Complex::new((theta / 2.0).cos(), 0.0),
                Complex::from_polar((theta / 2.0).sin(), phi),
            ],
        })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    /// Bloch vector `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)` of a qubit ket.
    pub fn bloch(&self) -> Result<[f64; 3]> {
        check_dim(2, self.dim())?;
        let (a, b) = (self.amps[0], self.amps[1]);
        let cross = a.conj() * b;
        Ok([2.0 * cross.re, 2.0 * cross.im, a.norm_sqr() - b.norm_sqr()])
    }

    /// Multiplies by the global phase `e^{iχ}`.
    pub fn with_phase(&self, chi: f64) -> Ket {
        let ph = Complex::from_polar(1.0, chi);
        Ket {
            amps: self.amps.iter().map(|a| a * ph).collect(),
        }
    }

    /// Componentwise complex conjugate (an antiunitary map).
    pub fn conj(&self) -> Ket {
        Ket {
            amps: self.amps.iter().map(|a| a.conj()).collect(),
        }
    }

    /// True when `self` and `other` describe the same ray, i.e. `|⟨self|other⟩| ≈ 1`.
    pub fn same_ray(&self, other: &Ket, tol: f64) -> bool {
        inner(self, other)
            .map(|z| (1.0 - z.norm()).abs() <= tol)
            .unwrap_or(false)
    }

    pub(crate) fn from_normalized_unchecked(amps: Vec<Complex>) -> Ket {
        Ket { amps }
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

pub fn norm(v: &[Complex]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Raw inner product `Σ conj(a_k)·b_k` of unnormalized vectors.
pub fn dot(a: &[Complex], b: &[Complex]) -> Result<Complex> {
    check_dim(a.len(), b.len())?;
    Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum())
}

/// `⟨a|b⟩`, conjugating the first argument.
pub fn inner(a: &Ket, b: &Ket) -> Result<Complex> {
    dot(&a.amps, &b.amps)
}

/// Scales `v` to unit norm.
pub fn normalize(v: Vec<Complex>) -> Result<Ket> {
    if v.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidParameter("non-finite amplitude".into()));
    }
    let n = norm(&v);
    if n <= EXACT_TOL {
        return Err(Error::DegenerateState { norm: n });
    }
    Ok(Ket {
        amps: v.into_iter().map(|z| z / n).collect(),
    })
}

/// Square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex>,
}

impl Matrix {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            check_dim(dim, row.len())?;
            data.extend(row);
        }
        Ok(Matrix { dim, data })
    }

    /// Matrix whose columns are the given kets.
    pub fn from_columns(cols: &[Ket]) -> Result<Self> {
        let dim = cols.len();
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut m = Matrix::zeros(dim);
        for (c, ket) in cols.iter().enumerate() {
            check_dim(dim, ket.dim())?;
            for r in 0..dim {
                m.data[r * dim + c] = ket.amps[r];
            }
        }
        Ok(m)
    }

    /// `|a⟩⟨b|`
    pub fn outer(a: &Ket, b: &Ket) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        let dim = a.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(a.amps[r] * b.amps[c].conj());
            }
        }
        Ok(Matrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim)
    }

    pub fn apply(&self, v: &[Complex]) -> Result<Vec<Complex>> {
        check_dim(self.dim, v.len())?;
        Ok(self
            .rows()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Applies the matrix and renormalizes; meant for unitaries.
    pub fn apply_ket(&self, ket: &Ket) -> Result<Ket> {
        normalize(self.apply(&ket.amps)?)
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[r * n + c] = (0..n).map(|k| self.get(r, k) * other.get(k, c)).sum();
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.data[c * n + r] = self.get(r, c).conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|k| self.get(k, k)).sum()
    }

    pub fn scale(&self, s: Complex) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        check_dim(self.dim, other.dim)?;
        Ok(Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Hermitian operator on `C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: Matrix,
}

impl HermitianOperator {
    /// Accepts `matrix` if it is hermitian within `1e-12`.
    pub fn new(matrix: Matrix) -> Result<Self> {
        let deviation = matrix.max_abs_diff(&matrix.adjoint());
        if deviation > EXACT_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(HermitianOperator { matrix })
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        Self::new(Matrix::from_rows(rows)?)
    }

    pub fn sigma_x() -> Self {
        HermitianOperator {
            matrix: Matrix {
                dim: 2,
                data: vec![ZERO, ONE, ONE, ZERO],
            },
        }
    }

    pub fn sigma_y() -> Self {
        let i = Complex::i();
        HermitianOperator {
            matrix: Matrix {
                dim: 2,
                data: vec![ZERO, -i, i, ZERO],
            },
        }
    }

    pub fn sigma_z() -> Self {
        HermitianOperator {
            matrix: Matrix {
                dim: 2,
                data: vec![ONE, ZERO, ZERO, -ONE],
            },
        }
    }

    /// Real linear combination `α·self + β·other`.
    pub fn combine(&self, alpha: f64, other: &HermitianOperator, beta: f64) -> Result<Self> {
        let m = self
            .matrix
            .scale(Complex::new(alpha, 0.0))
            .add(&other.matrix.scale(Complex::new(beta, 0.0)))?;
        Ok(HermitianOperator { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// `A|ψ⟩` as a raw (unnormalized) vector.
    pub fn apply(&self, ket: &Ket) -> Result<Vec<Complex>> {
        self.matrix.apply(&ket.amps)
    }

    /// `⟨bra|A|ket⟩`
    pub fn matrix_element(&self, bra: &Ket, ket: &Ket) -> Result<Complex> {
        check_dim(self.dim(), bra.dim())?;
        dot(&bra.amps, &self.apply(ket)?)
    }
}

impl From<&Projector> for HermitianOperator {
    fn from(p: &Projector) -> Self {
        HermitianOperator { matrix: p.matrix() }
    }
}

/// Rank-one projector `|ω⟩⟨ω|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    axis: Ket,
}

impl Projector {
    pub fn new(axis: Ket) -> Self {
        Projector { axis }
    }

    pub fn axis(&self) -> &Ket {
        &self.axis
    }

    pub fn dim(&self) -> usize {
        self.axis.dim()
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::outer(&self.axis, &self.axis).expect("same ket on both sides")
    }

    /// `⟨bra|ω⟩⟨ω|ket⟩` without materializing the matrix.
    pub fn matrix_element(&self, bra: &Ket, ket: &Ket) -> Result<Complex> {
        Ok(inner(bra, &self.axis)? * inner(&self.axis, ket)?)
    }
}

/// `⟨ψ|A|ψ⟩`; the imaginary residue is checked (< 1e-10) and dropped.
pub fn expectation(op: &HermitianOperator, psi: &Ket) -> Result<f64> {
    let z = op.matrix_element(psi, psi)?;
    debug_assert!(
        z.im.abs() < 1e-10,
        "hermitian expectation has imaginary part {}",
        z.im
    );
    Ok(z.re)
}

fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector(rng: &mut ChaCha8Rng, d: usize) -> Vec<Complex> {
    (0..d)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex::new(re, im)
        })
        .collect()
}

/// Haar-distributed pure state in `C^d`, deterministic in `(d, seed)`.
pub fn haar_random_ket(d: usize, seed: u64) -> Result<Ket> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut rng = seeded_rng(seed);
    loop {
        if let Ok(k) = normalize(gaussian_vector(&mut rng, d)) {
            return Ok(k);
        }
    }
}

/// Haar-random orthonormal basis of `C^d` (the columns of a Haar unitary).
pub fn haar_random_basis(d: usize, seed: u64) -> Result<Vec<Ket>> {
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let mut rng = seeded_rng(seed);
    let mut basis: Vec<Ket> = Vec::with_capacity(d);
    while basis.len() < d {
        let mut v = gaussian_vector(&mut rng, d);
        for b in &basis {
            let c = dot(&b.amps, &v)?;
            for (x, y) in v.iter_mut().zip(&b.amps) {
                *x -= c * y;
            }
        }
        if let Ok(k) = normalize(v) {
            basis.push(k);
        }
    }
    Ok(basis)
}

/// Haar-random unitary matrix.
pub fn haar_random_unitary(d: usize, seed: u64) -> Result<Matrix> {
    Matrix::from_columns(&haar_random_basis(d, seed)?)
}

/// Random hermitian operator with independent Gaussian entries (GUE-like).
pub fn random_hermitian(d: usize, seed: u64) -> Result<HermitianOperator> {
    if d == 0 {
        return Err(Error::InvalidDimension(d));
    }
    let mut rng = seeded_rng(seed);
    let g = Matrix {
        dim: d,
        data: gaussian_vector(&mut rng, d * d),
    };
    let h = g.add(&g.adjoint())?.scale(Complex::new(0.5, 0.0));
    HermitianOperator::new(h)
}

/// Max deviation of `basis` from an orthonormal, complete set.
pub fn orthonormality_deviation(basis: &[Ket], dim: usize) -> Result<f64> {
    let mut dev: f64 = 0.0;
    if basis.len() != dim {
        return Ok(f64::INFINITY);
    }
    for (i, a) in basis.iter().enumerate() {
        check_dim(dim, a.dim())?;
        for (j, b) in basis.iter().enumerate() {
            let target = if i == j { ONE } else { ZERO };
            dev = dev.max((inner(a, b)? - target).norm());
        }
    }
    Ok(dev)
}
