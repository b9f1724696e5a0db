//! Bargmann invariants and geometric phases of ray-space polygons.
//!
//! Sign convention: the geometric phase of a closed polyline `p_1 … p_n` is
//! `φ_g = −arg Π_k ⟨p_k|p_{k+1}⟩` (indices cyclic). For a geodesic triangle this gives
//! `arg Δ3(a, b, c) = −φ_g`.

use crate::angle::{circular_distance, wrap_pi};
use crate::linalg::{inner, normalize};
use crate::{Complex, Error, Ket, Result, EXACT_TOL};

/// Overlaps with modulus at or below this are treated as vanishing.
pub const OVERLAP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargmannInvariant {
    pub order: usize,
    pub value: Complex,
    /// `arg value` in `(−π, π]`; meaningless when `degenerate` is set.
    pub argument: f64,
    /// Some consecutive pair is orthogonal, so `value ≈ 0`.
    pub degenerate: bool,
}

/// Geodesic between two rays, sampled with real-positive consecutive overlaps.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPath {
    pub endpoints: (Ket, Ket),
    pub samples: Vec<Ket>,
}

/// `⟨s1|s2⟩⟨s2|s3⟩ ··· ⟨sn|s1⟩`
pub fn bargmann(states: &[Ket]) -> Result<BargmannInvariant> {
    if states.len() < 3 {
        return Err(Error::TooFewStates {
            required: 3,
            found: states.len(),
        });
    }
    let mut value = Complex::new(1.0, 0.0);
    let mut degenerate = false;
    for (k, s) in states.iter().enumerate() {
        let next = &states[(k + 1) % states.len()];
        let ov = inner(s, next)?;
        degenerate |= ov.norm() <= OVERLAP_FLOOR;
        value *= ov;
    }
    Ok(BargmannInvariant {
        order: states.len(),
        value,
        argument: wrap_pi(value.arg()),
        degenerate,
    })
}

/// `Δ3(a, b, c) = ⟨a|b⟩⟨b|c⟩⟨c|a⟩`
pub fn bargmann3(a: &Ket, b: &Ket, c: &Ket) -> Result<Complex> {
    Ok(inner(a, b)? * inner(b, c)? * inner(c, a)?)
}

/// Shorter great arc from `a` to `b` in ray space, `n` segments (`n + 1` samples).
pub fn geodesic(a: &Ket, b: &Ket, n: usize) -> Result<GeodesicPath> {
    if n == 0 {
        return Err(Error::InvalidParameter(
            "geodesic needs at least one segment".into(),
        ));
    }
    let ov = inner(a, b)?;
    let cos0 = ov.norm();
    if cos0 <= OVERLAP_FLOOR {
        return Err(Error::GeodesicNotUnique);
    }
    if 1.0 - cos0 <= EXACT_TOL {
        return Err(Error::DegenerateGeodesic);
    }
    // phase b so that <a|b~> is real and positive
    let b_aligned = b.with_phase(-ov.arg());
    let theta0 = cos0.min(1.0).acos();
    let sin0 = theta0.sin();
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(a.clone());
    for s in 1..n {
        let t = s as f64 / n as f64;
        let wa = ((1.0 - t) * theta0).sin() / sin0;
        let wb = (t * theta0).sin() / sin0;
        let v = a
            .amplitudes()
            .iter()
            .zip(b_aligned.amplitudes())
            .map(|(x, y)| x * wa + y * wb)
            .collect();
        samples.push(normalize(v)?);
    }
    samples.push(b_aligned);
    Ok(GeodesicPath {
        endpoints: (a.clone(), b.clone()),
        samples,
    })
}

/// Geometric phase `−arg Π⟨p_k|p_{k+1}⟩` of a closed polyline, in `(−π, π]`.
pub fn polyline_phase(closed_path: &[Ket]) -> Result<f64> {
    if closed_path.len() < 3 {
        return Err(Error::TooFewStates {
            required: 3,
            found: closed_path.len(),
        });
    }
    let n = closed_path.len();
    // accumulate the argument factor by factor to avoid underflow on long paths
    let mut phase = 0.0;
    for k in 0..n {
        let ov = inner(&closed_path[k], &closed_path[(k + 1) % n])?;
        if ov.norm() <= OVERLAP_FLOOR {
            return Err(Error::VanishingOverlap {
                index: k,
                next: (k + 1) % n,
            });
        }
        phase += ov.arg();
    }
    Ok(wrap_pi(-phase))
}

/// Closed polyline made of the three geodesic sides `a→b→c→a`, `n` segments each.
pub fn geodesic_triangle(a: &Ket, b: &Ket, c: &Ket, n: usize) -> Result<Vec<Ket>> {
    let mut path = Vec::with_capacity(3 * n);
    for (from, to) in [(a, b), (b, c), (c, a)] {
        let side = geodesic(from, to, n)?;
        // the closing sample is the next side's first vertex up to phase
        path.extend(side.samples.into_iter().take(n));
    }
    Ok(path)
}

/// Geometric phase of the geodesic triangle with vertices `a, b, c`.
pub fn geodesic_triangle_phase(a: &Ket, b: &Ket, c: &Ket, n: usize) -> Result<f64> {
    polyline_phase(&geodesic_triangle(a, b, c, n)?)
}

fn checked_delta3(a: &Ket, b: &Ket, c: &Ket) -> Result<Complex> {
    for (i, (x, y)) in [(a, b), (b, c), (c, a)].into_iter().enumerate() {
        if inner(x, y)?.norm() <= OVERLAP_FLOOR {
            return Err(Error::VanishingOverlap {
                index: i,
                next: (i + 1) % 3,
            });
        }
    }
    bargmann3(a, b, c)
}

/// True when `|arg Δ3(a, b, c)| ≤ tol`, i.e. the three rays lie on a null phase curve.
pub fn is_null_phase(a: &Ket, b: &Ket, c: &Ket, tol: f64) -> Result<bool> {
    let d = checked_delta3(a, b, c)?;
    Ok(circular_distance(d.arg(), 0.0) <= tol)
}

/// True when `arg Δ3(post, ω, pre)`, the argument of the projector weak value, lies
/// within `tol` of `target` on the circle.
pub fn constant_phase_membership(
    pre: &Ket,
    post: &Ket,
    omega: &Ket,
    target: f64,
    tol: f64,
) -> Result<bool> {
    let d = checked_delta3(post, omega, pre)?;
    Ok(circular_distance(d.arg(), target) <= tol)
}
