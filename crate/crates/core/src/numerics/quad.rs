//! Gauss–Legendre rules and composite panel quadrature along parametrised paths.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

/// Nodes and weights on [-1, 1].
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on P_n from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..(n + 1) / 2 {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared 24-point rule used by the path integrators.
    pub fn standard() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(24))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let m = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(m + h * x)).sum::<f64>() * h
    }
}

/// A smooth path piece z(s), s in [0, 1].
#[derive(Clone, Copy, Debug)]
pub enum Segment {
    Line { from: Complex64, to: Complex64 },
    Arc { center: Complex64, radius: f64, start: f64, sweep: f64 },
}

impl Segment {
    pub fn point(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => from + (to - from) * s,
            Segment::Arc { center, radius, start, sweep } => center + Complex64::from_polar(radius, start + sweep * s),
        }
    }

    pub fn tangent(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { from, to } => to - from,
            Segment::Arc { radius, start, sweep, .. } => {
                Complex64::new(0.0, sweep) * Complex64::from_polar(radius, start + sweep * s)
            }
        }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, sweep, .. } => radius * sweep.abs(),
        }
    }

    pub fn start(&self) -> Complex64 {
        self.point(0.0)
    }

    pub fn end(&self) -> Complex64 {
        self.point(1.0)
    }
}

/// One quadrature node on a path: position, dz weight, and parameter order.
#[derive(Clone, Copy, Debug)]
pub struct PathNode {
    pub z: Complex64,
    pub dz: Complex64,
}

/// Composite nodes along a chain of segments, each split into panels no
/// longer than `max_panel` (and at least `min_panels` per segment).
pub fn path_nodes(segments: &[Segment], max_panel: f64, min_panels: usize) -> Vec<PathNode> {
    let rule = GaussLegendre::standard();
    let mut out = Vec::new();
    for seg in segments {
        let len = seg.length();
        let panels = ((len / max_panel).ceil() as usize).max(min_panels).max(1);
        for p in 0..panels {
            let a = p as f64 / panels as f64;
            let b = (p + 1) as f64 / panels as f64;
            let h = 0.5 * (b - a);
            for (x, w) in rule.nodes.iter().zip(&rule.weights) {
                let s = 0.5 * (a + b) + h * x;
                out.push(PathNode { z: seg.point(s), dz: seg.tangent(s) * (w * h) });
            }
        }
    }
    out
}

/// Panels that shrink geometrically towards s = 0 of a segment (for a
/// singularity or near-singularity at its start), then uniform.
pub fn graded_nodes(seg: &Segment, levels: usize, uniform_panels: usize) -> Vec<PathNode> {
    let rule = GaussLegendre::standard();
    let mut cuts = vec![0.0];
    for k in (1..=levels).rev() {
        cuts.push(0.5f64.powi(k as i32));
    }
    let tail = uniform_panels.max(1);
    let start = *cuts.last().unwrap();
    for p in 1..=tail {
        cuts.push(start + (1.0 - start) * p as f64 / tail as f64);
    }
    let mut out = Vec::new();
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = 0.5 * (b - a);
        for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
            let s = 0.5 * (a + b) + h * x;
            out.push(PathNode { z: seg.point(s), dz: seg.tangent(s) * (wt * h) });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let r = GaussLegendre::new(10);
        // exact for degree <= 19
        let v = r.integrate(-1.0, 2.0, |x| x.powi(19));
        let exact = (2f64.powi(20) - 1.0) / 20.0;
        assert!((v - exact).abs() < 1e-9 * exact);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn circle_integral() {
        let seg = Segment::Arc { center: Complex64::new(0.3, 0.0), radius: 1.0, start: 0.0, sweep: 2.0 * PI };
        let nodes = path_nodes(&[seg], 0.5, 1);
        let v: Complex64 = nodes.iter().map(|n| n.dz / n.z).sum();
        assert!((v - Complex64::new(0.0, 2.0 * PI)).norm() < 1e-13);
    }
}
