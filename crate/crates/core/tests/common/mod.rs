//! Shared helpers for the integration suites. The projection oracle here is
//! deliberately written against raw slices, independent of the library's
//! geometry types, so agreement between the two is meaningful evidence.

use rand::Rng;

/// `{x : ⟨normal, x − anchor⟩ ≤ offset}` stored as plain slices.
#[derive(Clone, Debug)]
pub struct RawHalfspace {
    pub normal: Vec<f64>,
    pub anchor: Vec<f64>,
    pub offset: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl RawHalfspace {
    /// Slack of the defining inequality at `x`; nonnegative inside.
    pub fn margin(&self, x: &[f64]) -> f64 {
        let shifted: Vec<f64> = x.iter().zip(&self.anchor).map(|(a, b)| a - b).collect();
        self.offset - dot(&self.normal, &shifted)
    }

    fn project(&self, x: &[f64]) -> Vec<f64> {
        let margin = self.margin(x);
        if margin >= 0.0 {
            return x.to_vec();
        }
        let scale = margin / dot(&self.normal, &self.normal);
        x.iter().zip(&self.normal).map(|(a, n)| a + scale * n).collect()
    }
}

/// Dykstra's alternating projection scheme for the intersection of two
/// halfspaces. Unlike plain alternating projections, the correction terms
/// make it converge to the metric projection of `x0`, which is exactly what
/// the closed-form implementation under test claims to compute.
pub fn dykstra_two_halfspaces(
    first: &RawHalfspace,
    second: &RawHalfspace,
    x0: &[f64],
    max_sweeps: usize,
) -> Vec<f64> {
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut p = vec![0.0; dim];
    let mut q = vec![0.0; dim];
    let scale: f64 = dot(x0, x0).sqrt().max(1.0);
    for _ in 0..max_sweeps {
        let moved: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + b).collect();
        let y = first.project(&moved);
        for i in 0..dim {
            p[i] = moved[i] - y[i];
        }
        let moved: Vec<f64> = y.iter().zip(&q).map(|(a, b)| a + b).collect();
        let next = second.project(&moved);
        for i in 0..dim {
            q[i] = moved[i] - next[i];
        }
        let change: f64 = next
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        x = next;
        if change <= 1e-15 * scale {
            break;
        }
    }
    x
}

/// Random halfspace with a well-scaled normal, an anchor in `[−2, 2]^dim`,
/// and a nonnegative offset, so the inequality is exercised in both its
/// shifted and unshifted forms.
pub fn random_halfspace<R: Rng>(rng: &mut R, dim: usize) -> RawHalfspace {
    let normal = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if dot(&v, &v).sqrt() >= 0.3 {
            break v;
        }
    };
    RawHalfspace {
        normal,
        anchor: (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect(),
        offset: rng.gen_range(0.0..1.5),
    }
}

/// A pair whose normals are neither nearly parallel nor nearly antiparallel,
/// keeping the oracle's conditioning honest; the intersection is then always
/// nonempty. The exactly-parallel branch is covered by fixture runs instead.
pub fn random_halfspace_pair<R: Rng>(rng: &mut R, dim: usize) -> (RawHalfspace, RawHalfspace) {
    loop {
        let a = random_halfspace(rng, dim);
        let b = random_halfspace(rng, dim);
        let cos = dot(&a.normal, &b.normal)
            / (dot(&a.normal, &a.normal).sqrt() * dot(&b.normal, &b.normal).sqrt());
        if cos.abs() <= 0.99 {
            return (a, b);
        }
    }
}
