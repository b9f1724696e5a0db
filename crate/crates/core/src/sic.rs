//! SIC-POVM state sets, their triple phases and the pure-state expansion identity.
//!
//! A SIC set is `d²` unit kets with `|⟨ψ_i|ψ_j⟩|² = 1/(d+1)` for `i ≠ j`. The POVM
//! elements are `Π_i / d`, so outcome probabilities are `p_i = |⟨ψ_i|ψ⟩|² / d`.
//!
//! The triple phase `θ_ijk ∈ [0, 2π)` is the argument of
//! `⟨ψ_k|ψ_j⟩⟨ψ_j|ψ_i⟩⟨ψ_i|ψ_k⟩`, which is also the argument of the weak value of
//! `Π_j` with pre-selection `ψ_i` and post-selection `ψ_k`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::angle::{circular_distance, wrap_two_pi};
use crate::linalg::{inner, Matrix};
use crate::{Complex, Error, Ket, Result, CENSUS_TOL};

const SIC_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SicSource {
    Builtin,
    UserFiducial,
}

impl SicSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            SicSource::Builtin => "builtin",
            SicSource::UserFiducial => "user_fiducial",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicSet {
    dim: usize,
    states: Vec<Ket>,
    source: SicSource,
}

impl SicSet {
    /// Validates equiangularity and the resolution of identity.
    pub fn new(states: Vec<Ket>, source: SicSource) -> Result<Self> {
        let dim = states
            .first()
            .map(Ket::dim)
            .ok_or(Error::InvalidDimension(0))?;
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if states.len() != dim * dim {
            return Err(Error::TooFewStates {
                required: dim * dim,
                found: states.len(),
            });
        }
        if let Some(k) = states.iter().find(|k| k.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: k.dim(),
            });
        }
        let expected = 1.0 / (dim as f64 + 1.0);
        let (mut worst, mut wi, mut wj, mut wov) = (0.0, 0, 0, expected);
        for i in 0..states.len() {
            for j in i + 1..states.len() {
                let ov = inner(&states[i], &states[j])?.norm_sqr();
                let dev = (ov - expected).abs();
                if dev > worst {
                    (worst, wi, wj, wov) = (dev, i, j, ov);
                }
            }
        }
        if worst > SIC_TOL {
            return Err(Error::NotSicFiducial {
                i: wi,
                j: wj,
                overlap: wov,
                expected,
            });
        }
        let set = SicSet {
            dim,
            states,
            source,
        };
        debug_assert!(set.identity_deviation() <= SIC_TOL);
        Ok(set)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[Ket] {
        &self.states
    }

    pub fn source(&self) -> SicSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `max_{i≠j} ||⟨ψ_i|ψ_j⟩|² − 1/(d+1)|`
    pub fn equiangularity_deviation(&self) -> f64 {
        let expected = 1.0 / (self.dim as f64 + 1.0);
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let ov = inner(&self.states[i], &self.states[j])
                    .expect("same dim")
                    .norm_sqr();
                worst = worst.max((ov - expected).abs());
            }
        }
        worst
    }

    /// Entrywise deviation of `Σ_i Π_i` from `d·I`.
    pub fn identity_deviation(&self) -> f64 {
        let mut sum = Matrix::zeros(self.dim);
        for k in &self.states {
            sum = sum
                .add(&Matrix::outer(k, k).expect("same dim"))
                .expect("same dim");
        }
        sum.max_abs_diff(&Matrix::identity(self.dim).scale(Complex::new(self.dim as f64, 0.0)))
    }

    fn check_triple(&self, i: usize, j: usize, k: usize) -> Result<()> {
        let n = self.len();
        if i == j || j == k || i == k || i >= n || j >= n || k >= n {
            return Err(Error::InvalidIndices {
                indices: vec![i, j, k],
                len: n,
            });
        }
        Ok(())
    }

    /// `⟨ψ_k|ψ_j⟩⟨ψ_j|ψ_i⟩⟨ψ_i|ψ_k⟩`, i.e. `Δ3(ψ_k, ψ_j, ψ_i)`.
    pub fn triple_product(&self, i: usize, j: usize, k: usize) -> Result<Complex> {
        self.check_triple(i, j, k)?;
        let s = &self.states;
        Ok(inner(&s[k], &s[j])? * inner(&s[j], &s[i])? * inner(&s[i], &s[k])?)
    }
}

/// Fiducial `(0, 1, −e^{iπ/18})/√2` of the one-parameter d = 3 SIC family.
///
/// Members at multiples of π/9 (the Hesse fiducial `(0, 1, −1)/√2` among them) are
/// more symmetric and produce only two triple-phase cosine classes; this member
/// produces the five classes of a generic d = 3 SIC.
pub fn d3_fiducial() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::new(vec![
        Complex::new(0.0, 0.0),
        Complex::new(h, 0.0),
        -Complex::from_polar(h, PI / 18.0),
    ])
    .expect("unit vector")
}

/// Built-in SIC sets: the tetrahedron for d = 2 and a Weyl–Heisenberg orbit for d = 3.
pub fn builtin_sic(d: usize) -> Result<SicSet> {
    match d {
        2 => {
            let s = 1.0;
            let states = [[s, s, s], [s, -s, -s], [-s, s, -s], [-s, -s, s]]
                .iter()
                .map(|[x, y, z]| Ket::from_bloch(*x, *y, *z))
                .collect::<Result<Vec<_>>>()?;
            SicSet::new(states, SicSource::Builtin)
        }
        3 => {
            let set = wh_orbit(&d3_fiducial())?;
            Ok(SicSet {
                source: SicSource::Builtin,
                ..set
            })
        }
        _ => Err(Error::UnsupportedSicDimension(d)),
    }
}

/// The `d²` states `X^a Z^b |fiducial⟩`, `X|k⟩ = |k+1 mod d⟩`, `Z|k⟩ = ω^k|k⟩`.
pub fn wh_orbit(fiducial: &Ket) -> Result<SicSet> {
    let d = fiducial.dim();
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    let f = fiducial.amplitudes();
    let mut states = Vec::with_capacity(d * d);
    for a in 0..d {
        for b in 0..d {
            let mut amps = vec![Complex::new(0.0, 0.0); d];
            for (k, fk) in f.iter().enumerate() {
                let clock = Complex::from_polar(1.0, TAU * ((b * k) % d) as f64 / d as f64);
                amps[(k + a) % d] = clock * fk;
            }
            states.push(Ket::from_normalized_unchecked(amps));
        }
    }
    SicSet::new(states, SicSource::UserFiducial)
}

/// `θ_ijk` in `[0, 2π)`.
pub fn triple_phase(set: &SicSet, i: usize, j: usize, k: usize) -> Result<f64> {
    Ok(wrap_two_pi(set.triple_product(i, j, k)?.arg()))
}

/// Triple phases for every unordered triple `i < j < k`; other orderings are
/// derived (cyclic permutations keep `θ`, odd permutations map it to `2π − θ`).
#[derive(Debug, Clone, PartialEq)]
pub struct TriplePhaseTable {
    dim: usize,
    n: usize,
    /// `(i, j, k, θ_ijk)` with `i < j < k`, lexicographic.
    entries: Vec<(usize, usize, usize, f64)>,
}

impl TriplePhaseTable {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn canonical(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    fn position(&self, i: usize, j: usize, k: usize) -> usize {
        // rank of the combination (i < j < k) in lexicographic order
        let n = self.n;
        let c2 = |m: usize| m * m.saturating_sub(1) / 2;
        let c3 = |m: usize| m * m.saturating_sub(1) * m.saturating_sub(2) / 6;
        let before_i = c3(n) - c3(n - i);
        let before_j = c2(n - i - 1) - c2(n - j);
        before_i + before_j + (k - j - 1)
    }

    /// `θ_ijk` for any ordering of distinct indices.
    pub fn get(&self, i: usize, j: usize, k: usize) -> Result<f64> {
        if i == j || j == k || i == k || i >= self.n || j >= self.n || k >= self.n {
            return Err(Error::InvalidIndices {
                indices: vec![i, j, k],
                len: self.n,
            });
        }
        let mut idx = [i, j, k];
        // parity of the sorting permutation
        let mut odd = false;
        for a in 0..3 {
            for b in 0..2 - a {
                if idx[b] > idx[b + 1] {
                    idx.swap(b, b + 1);
                    odd = !odd;
                }
            }
        }
        let theta = self.entries[self.position(idx[0], idx[1], idx[2])].3;
        Ok(if odd { wrap_two_pi(-theta) } else { theta })
    }
}

pub fn triple_phase_table(set: &SicSet) -> TriplePhaseTable {
    let n = set.len();
    let entries = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).flat_map(move |j| {
                (j + 1..n).map(move |k| {
                    (
                        i,
                        j,
                        k,
                        triple_phase(set, i, j, k).expect("distinct indices"),
                    )
                })
            })
        })
        .collect();
    TriplePhaseTable {
        dim: set.dim(),
        n,
        entries,
    }
}

/// One conjugation class of triple phases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CensusEntry {
    /// Representative in `[0, π]`.
    pub theta: f64,
    pub cos_theta: f64,
    pub multiplicity: usize,
}

/// Clusters `cos θ` over all unordered triples (tolerance [`CENSUS_TOL`]); sorted by `θ`.
pub fn triple_phase_census(set: &SicSet) -> Vec<CensusEntry> {
    triple_phase_census_with_tol(set, CENSUS_TOL)
}

pub fn triple_phase_census_with_tol(set: &SicSet, tol: f64) -> Vec<CensusEntry> {
    let table = triple_phase_table(set);
    let mut cosines: Vec<f64> = table.entries.iter().map(|e| e.3.cos()).collect();
    cosines.sort_by(|a, b| b.total_cmp(a));
    let mut clusters: Vec<(f64, f64, usize)> = Vec::new(); // (first, sum, count)
    for c in cosines {
        match clusters.last_mut() {
            Some((first, sum, count)) if *first - c <= tol => {
                *sum += c;
                *count += 1;
            }
            _ => clusters.push((c, c, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|(_, sum, count)| {
            let cos_theta = (sum / count as f64).clamp(-1.0, 1.0);
            CensusEntry {
                theta: cos_theta.acos(),
                cos_theta,
                multiplicity: count,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCoefficients {
    pub lambdas: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl ExpansionCoefficients {
    /// `λ_i = (d+1)·p_i − 1/d`
    pub fn from_probabilities(probabilities: Vec<f64>, d: usize) -> Self {
        let df = d as f64;
        let lambdas = probabilities
            .iter()
            .map(|p| (df + 1.0) * p - 1.0 / df)
            .collect();
        ExpansionCoefficients {
            lambdas,
            probabilities,
        }
    }

    /// `ρ = Σ λ_i Π_i`
    pub fn density_matrix(&self, set: &SicSet) -> Result<Matrix> {
        if self.lambdas.len() != set.len() {
            return Err(Error::DimensionMismatch {
                expected: set.len(),
                found: self.lambdas.len(),
            });
        }
        let mut rho = Matrix::zeros(set.dim());
        for (l, k) in self.lambdas.iter().zip(set.states()) {
            rho = rho.add(&Matrix::outer(k, k)?.scale(Complex::new(*l, 0.0)))?;
        }
        Ok(rho)
    }
}

pub fn expansion_coefficients(psi: &Ket, set: &SicSet) -> Result<ExpansionCoefficients> {
    let d = set.dim() as f64;
    let probabilities = set
        .states()
        .iter()
        .map(|s| inner(s, psi).map(|z| z.norm_sqr() / d))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExpansionCoefficients::from_probabilities(
        probabilities,
        set.dim(),
    ))
}

/// `Tr ρ³ − 1` for `ρ = Σ λ_i Π_i`, expanded over the SIC triple products:
///
/// `Σλ_i³ + 3/(d+1)·Σ_{i≠j} λ_i²λ_j + 6/(d+1)^{3/2}·Σ_{i<j<k} cos θ_ijk·λ_iλ_jλ_k − 1`.
///
/// Vanishes exactly for pure states and is negative for mixed ones.
pub fn purity_identity_residual(
    coeffs: &ExpansionCoefficients,
    table: &TriplePhaseTable,
    d: usize,
) -> Result<f64> {
    let n = d * d;
    if table.dim() != d || coeffs.lambdas.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coeffs.lambdas.len(),
        });
    }
    let l = &coeffs.lambdas;
    let df = d as f64;
    let sum1: f64 = l.iter().sum();
    let sum2: f64 = l.iter().map(|x| x * x).sum();
    let sum3: f64 = l.iter().map(|x| x * x * x).sum();
    // Σ_{i≠j} λ_i² λ_j = Σλ² · Σλ − Σλ³
    let pairs = sum2 * sum1 - sum3;
    let triples: f64 = table
        .entries
        .iter()
        .map(|&(i, j, k, theta)| theta.cos() * l[i] * l[j] * l[k])
        .sum();
    Ok(sum3 + 3.0 / (df + 1.0) * pairs + 6.0 / (df + 1.0).powf(1.5) * triples - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompositionReport {
    pub quadruples: usize,
    /// Largest circular deviation of `θ_ijk + θ_ikl − θ_ijl` from `θ_jkl`.
    pub max_deviation: f64,
}

/// Checks `θ_ijk + θ_ikl − θ_ijl ≡ θ_jkl (mod 2π)` for every quadruple `i<j<k<l`.
pub fn phase_composition_check(set: &SicSet) -> CompositionReport {
    let table = triple_phase_table(set);
    let n = set.len();
    let mut quadruples = 0;
    let mut max_deviation: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                for l in k + 1..n {
                    quadruples += 1;
                    max_deviation = max_deviation.max(composition_deviation(&table, [i, j, k, l]));
                }
            }
        }
    }
    CompositionReport {
        quadruples,
        max_deviation,
    }
}

/// Deviation of the composition relation for one labelled quadruple `[i, j, k, l]`.
pub fn composition_deviation(table: &TriplePhaseTable, q: [usize; 4]) -> f64 {
    let [i, j, k, l] = q;
    let t = |a, b, c| table.get(a, b, c).expect("distinct indices");
    circular_distance(t(i, j, k) + t(i, k, l) - t(i, j, l), t(j, k, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_random_ket;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn builtin_d2_is_equiangular() {
        let s = builtin_sic(2).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.source(), SicSource::Builtin);
        assert!(s.equiangularity_deviation() < 1e-10);
        assert!(s.identity_deviation() < 1e-10);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let ov = inner(&s.states()[i], &s.states()[j]).unwrap().norm_sqr();
                    assert!((ov - 1.0 / 3.0).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn builtin_d3_is_equiangular() {
        let s = builtin_sic(3).unwrap();
        assert_eq!(s.len(), 9);
        assert!(s.equiangularity_deviation() < 1e-10);
        assert!(s.identity_deviation() < 1e-10);
    }

    #[test]
    fn unsupported_dimension() {
        assert_eq!(
            builtin_sic(5).unwrap_err(),
            Error::UnsupportedSicDimension(5)
        );
    }

    #[test]
    fn orbits() {
        let hesse = Ket::from_real(&[0.0, 1.0, -1.0]).unwrap();
        let s = wh_orbit(&hesse).unwrap();
        assert_eq!(s.len(), 9);
        assert_eq!(s.source(), SicSource::UserFiducial);
        let apex = Ket::from_bloch(1.0, 1.0, 1.0).unwrap();
        assert!(wh_orbit(&apex).unwrap().equiangularity_deviation() < 1e-10);
        match wh_orbit(&Ket::basis(3, 0).unwrap()) {
            Err(Error::NotSicFiducial { overlap, .. }) => {
                assert!(overlap.abs() < 1e-12 || (overlap - 1.0).abs() < 1e-12)
            }
            other => panic!("expected NotSicFiducial, got {other:?}"),
        }
    }

    #[test]
    fn d2_triple_phases() {
        let s = builtin_sic(2).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let t = triple_phase(&s, i, j, k).unwrap();
                    assert!(
                        (t - FRAC_PI_2).abs() < 1e-10 || (t - 3.0 * FRAC_PI_2).abs() < 1e-10,
                        "θ_{i}{j}{k} = {t}"
                    );
                    let swapped = triple_phase(&s, j, i, k).unwrap();
                    assert!(circular_distance(swapped, TAU - t) < 1e-12);
                }
            }
        }
        assert!(triple_phase(&s, 0, 0, 1).is_err());
        assert!(triple_phase(&s, 0, 1, 4).is_err());
    }

    #[test]
    fn table_lookup_matches_direct() {
        let s = builtin_sic(3).unwrap();
        let table = triple_phase_table(&s);
        assert_eq!(table.canonical().len(), 84);
        for i in 0..9 {
            for j in 0..9 {
                for k in 0..9 {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let direct = triple_phase(&s, i, j, k).unwrap();
                    assert!(circular_distance(table.get(i, j, k).unwrap(), direct) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn census_counts() {
        let c2 = triple_phase_census(&builtin_sic(2).unwrap());
        assert_eq!(c2.len(), 1);
        assert_eq!(c2[0].multiplicity, 4);
        assert!(c2[0].cos_theta.abs() < 1e-12);

        let c3 = triple_phase_census(&builtin_sic(3).unwrap());
        assert_eq!(c3.len(), 5);
        assert_eq!(c3.iter().map(|e| e.multiplicity).sum::<usize>(), 84);
        let cos: Vec<f64> = c3.iter().map(|e| e.cos_theta).collect();
        // cos(π/6), 1/2, 0, −cos(π/6), −1
        let expected = [3f64.sqrt() / 2.0, 0.5, 0.0, -(3f64.sqrt()) / 2.0, -1.0];
        for (c, e) in cos.iter().zip(expected) {
            assert!((c - e).abs() < 1e-10, "{cos:?}");
        }
        assert_eq!(
            c3.iter().map(|e| e.multiplicity).collect::<Vec<_>>(),
            vec![9, 54, 9, 9, 3]
        );

        // the Hesse fiducial is the symmetric member with only two classes
        let hesse = wh_orbit(&Ket::from_real(&[0.0, 1.0, -1.0]).unwrap()).unwrap();
        let ch = triple_phase_census(&hesse);
        assert_eq!(
            ch.iter().map(|e| e.multiplicity).collect::<Vec<_>>(),
            vec![72, 12]
        );
    }

    #[test]
    fn census_is_sorted_and_deterministic() {
        let s = builtin_sic(3).unwrap();
        let a = triple_phase_census(&s);
        let b = triple_phase_census(&s);
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].theta < w[1].theta));
    }

    #[test]
    fn expansion_examples() {
        let s = builtin_sic(2).unwrap();
        let c = expansion_coefficients(&s.states()[0], &s).unwrap();
        assert!((c.probabilities[0] - 0.5).abs() < 1e-12);
        for p in &c.probabilities[1..] {
            assert!((p - 1.0 / 6.0).abs() < 1e-12);
        }
        for seed in 0..10 {
            for d in [2, 3] {
                let set = builtin_sic(d).unwrap();
                let psi = haar_random_ket(d, seed).unwrap();
                let c = expansion_coefficients(&psi, &set).unwrap();
                assert!((c.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!((c.lambdas.iter().sum::<f64>() - 1.0).abs() < 1e-10);
                assert!((c.lambdas.iter().map(|l| l * l).sum::<f64>() - 1.0).abs() < 1e-10);
                let rho = c.density_matrix(&set).unwrap();
                assert!(rho.max_abs_diff(&Matrix::outer(&psi, &psi).unwrap()) < 1e-10);
            }
        }
        assert!(expansion_coefficients(&Ket::z_plus(), &builtin_sic(3).unwrap()).is_err());
    }

    /// `Tr ρ³` computed directly from the reconstructed density matrix.
    fn trace_cube_oracle(c: &ExpansionCoefficients, set: &SicSet) -> f64 {
        let rho = c.density_matrix(set).unwrap();
        rho.matmul(&rho).unwrap().matmul(&rho).unwrap().trace().re
    }

    #[test]
    fn purity_residual_matches_trace_cube() {
        for d in [2, 3] {
            let set = builtin_sic(d).unwrap();
            let table = triple_phase_table(&set);
            for seed in 0..20 {
                let psi = haar_random_ket(d, seed).unwrap();
                let c = expansion_coefficients(&psi, &set).unwrap();
                let r = purity_identity_residual(&c, &table, d).unwrap();
                assert!((trace_cube_oracle(&c, &set) - 1.0 - r).abs() < 1e-12);
                assert!(r.abs() <= 1e-9);
            }
            let mixed =
                ExpansionCoefficients::from_probabilities(vec![1.0 / (d * d) as f64; d * d], d);
            let r = purity_identity_residual(&mixed, &table, d).unwrap();
            assert!((trace_cube_oracle(&mixed, &set) - 1.0 - r).abs() < 1e-12);
            assert!((r - (1.0 / (d * d) as f64 - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn collapsed_purity_form_for_qutrits() {
        // With Σλ = Σλ² = 1 and d ≠ 2 the identity collapses to
        // Σλ³ + 6/((d−2)√(d+1)) Σ cos θ λλλ = 1.
        let set = builtin_sic(3).unwrap();
        let table = triple_phase_table(&set);
        let psi = haar_random_ket(3, 4).unwrap();
        let c = expansion_coefficients(&psi, &set).unwrap();
        let l = &c.lambdas;
        let tri: f64 = table
            .canonical()
            .iter()
            .map(|&(i, j, k, t)| t.cos() * l[i] * l[j] * l[k])
            .sum();
        let lhs = l.iter().map(|x| x.powi(3)).sum::<f64>() + 6.0 / (1.0 * 2.0) * tri;
        assert!((lhs - 1.0).abs() < 1e-10);
    }

    #[test]
    fn purity_dimension_errors() {
        let set = builtin_sic(2).unwrap();
        let table = triple_phase_table(&set);
        let c = ExpansionCoefficients::from_probabilities(vec![0.1; 9], 3);
        assert!(purity_identity_residual(&c, &table, 3).is_err());
        assert!(purity_identity_residual(&c, &table, 2).is_err());
    }

    #[test]
    fn composition_holds() {
        for d in [2, 3] {
            let rep = phase_composition_check(&builtin_sic(d).unwrap());
            let n = d * d;
            assert_eq!(rep.quadruples, n * (n - 1) * (n - 2) * (n - 3) / 24);
            assert!(rep.max_deviation <= 1e-9, "d={d}: {rep:?}");
        }
    }

    #[test]
    fn composition_under_relabeling() {
        let set = builtin_sic(3).unwrap();
        let table = triple_phase_table(&set);
        let q = [0, 3, 5, 8];
        let perms = [
            [0, 1, 2, 3],
            [1, 0, 2, 3],
            [3, 2, 1, 0],
            [2, 0, 3, 1],
            [1, 3, 0, 2],
        ];
        for p in perms {
            let relabeled = p.map(|x| q[x]);
            assert!(composition_deviation(&table, relabeled) <= 1e-9);
        }
    }

    #[test]
    fn triple_modulus() {
        for d in [2, 3] {
            let set = builtin_sic(d).unwrap();
            let expected = (d as f64 + 1.0).powf(-1.5);
            for &(i, j, k, _) in triple_phase_table(&set).canonical() {
                let m = set.triple_product(i, j, k).unwrap().norm();
                assert!((m - expected).abs() < 1e-10);
            }
        }
    }
}
