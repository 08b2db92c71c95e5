/// Gauss-Legendre rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point rule, exact for polynomials of degree `2n - 1`. Supports
    /// `1 <= n <= 5`.
    pub fn legendre(n: usize) -> Option<Self> {
        let (points, weights): (Vec<f64>, Vec<f64>) = match n {
            1 => (vec![0.0], vec![2.0]),
            2 => {
                let p = 1.0 / 3.0f64.sqrt();
                (vec![-p, p], vec![1.0, 1.0])
            }
            3 => {
                let p = (3.0f64 / 5.0).sqrt();
                (vec![-p, 0.0, p], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
            }
            4 => {
                let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
                let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
                let wa = (18.0 + 30.0f64.sqrt()) / 36.0;
                let wb = (18.0 - 30.0f64.sqrt()) / 36.0;
                (vec![-b, -a, a, b], vec![wb, wa, wa, wb])
            }
            5 => {
                let a = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
                let b = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
                let wa = (322.0 + 13.0 * 70.0f64.sqrt()) / 900.0;
                let wb = (322.0 - 13.0 * 70.0f64.sqrt()) / 900.0;
                (
                    vec![-b, -a, 0.0, a, b],
                    vec![wb, wa, 128.0 / 225.0, wa, wb],
                )
            }
            _ => return None,
        };
        Some(Self { points, weights })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Highest polynomial degree integrated exactly.
    pub fn degree(&self) -> usize {
        2 * self.len() - 1
    }

    /// Nodes and weights mapped to `[0, 1]`.
    pub fn unit_interval(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| (0.5 * (p + 1.0), 0.5 * w))
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(mid + half * p))
            .sum::<f64>()
    }
}
