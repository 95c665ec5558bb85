use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::training::TimeGrid;

/// A symmetric positive definite matrix acting on nodal vectors, paired with
/// the weighted inner product `⟨u, v⟩ = h Σ u_i v_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    m: usize,
    entries: Vec<f64>,
    inner_weight: f64,
}

impl DiscreteOperator {
    /// Row-major `m x m` matrix. Symmetry is checked here, definiteness in
    /// [`mr_identity_residual`].
    pub fn new(m: usize, entries: Vec<f64>, inner_weight: f64) -> Result<Self> {
        ensure!(m >= 1 && entries.len() == m * m, "operator must be {m}x{m}");
        ensure!(inner_weight > 0.0, "inner-product weight must be positive");
        for i in 0..m {
            for j in 0..i {
                ensure!(
                    entries[i * m + j] == entries[j * m + i],
                    "discrete operator is not symmetric at ({i},{j})"
                );
            }
        }
        Ok(Self {
            m,
            entries,
            inner_weight,
        })
    }

    /// `-d²/dx²` with homogeneous Dirichlet conditions on `m` interior nodes
    /// of `(0, 1)`, `h = 1/(m+1)`: `tridiag(-1, 2, -1) / h²`.
    pub fn dirichlet_laplacian_1d(m: usize) -> Self {
        let h = 1.0 / (m + 1) as f64;
        let s = 1.0 / (h * h);
        let mut e = vec![0.0; m * m];
        for i in 0..m {
            e[i * m + i] = 2.0 * s;
            if i + 1 < m {
                e[i * m + i + 1] = -s;
                e[(i + 1) * m + i] = -s;
            }
        }
        Self {
            m,
            entries: e,
            inner_weight: h,
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                let row = &self.entries[i * self.m..(i + 1) * self.m];
                row.iter().zip(u).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.inner_weight * u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Rejects operators with a nonpositive Rayleigh quotient on the unit
    /// vectors or on a fixed family of random probes.
    fn check_positive(&self) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut probes: Vec<Vec<f64>> = (0..self.m)
            .map(|i| {
                let mut e = vec![0.0; self.m];
                e[i] = 1.0;
                e
            })
            .collect();
        for _ in 0..16 {
            probes.push((0..self.m).map(|_| rng.random_range(-1.0..1.0)).collect());
        }
        for p in &probes {
            let q = self.inner(&self.apply(p), p);
            ensure!(
                q > 0.0,
                "discrete operator is not positive definite (Rayleigh quotient {q})"
            );
        }
        Ok(())
    }
}

/// Both sides of the discrete maximal-regularity expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaxRegCheck {
    /// `|five-term expansion - ‖Û_t + LŪ‖²|`, pure roundoff for SPD `L`.
    pub identity_residual: f64,
    /// `‖Û_t‖² + ‖LŪ‖² - ‖Û_t + LŪ‖² - ⟨LU⁰, U⁰⟩`, never positive for SPD `L`.
    pub slack: f64,
    /// `‖Û_t + LŪ‖²`, for scale.
    pub combined: f64,
}

/// Checks the identity
///
/// `‖Û_t + LŪ‖² = ‖Û_t‖² + ‖LŪ‖² + ⟨LU^N, U^N⟩ + Σ_n ⟨L(U^n - U^{n-1}), U^n - U^{n-1}⟩ - ⟨LU⁰, U⁰⟩`
///
/// for nodal vectors `U^0..U^N` on `grid`, all norms in `L²(0,T; L²_h)`.
pub fn mr_identity_residual(levels: &[Vec<f64>], grid: &TimeGrid, op: &DiscreteOperator) -> Result<MaxRegCheck> {
    ensure!(
        levels.len() == grid.len() + 1,
        "need N + 1 = {} nodal vectors, got {}",
        grid.len() + 1,
        levels.len()
    );
    ensure!(
        levels.iter().all(|u| u.len() == op.size()),
        "nodal vectors must have length {}",
        op.size()
    );
    op.check_positive()?;
    // all sums and products in double-double arithmetic; the identity is
    // exact, so the result measures evaluation error only
    let w = Dd::from(op.inner_weight);
    let inner = |u: &[Dd], v: &[Dd]| {
        let mut acc = Dd::ZERO;
        for (a, b) in u.iter().zip(v) {
            acc = acc.add(a.mul(*b));
        }
        acc.mul(w)
    };
    let apply = |u: &[Dd]| -> Vec<Dd> {
        (0..op.m)
            .map(|i| {
                let mut acc = Dd::ZERO;
                for (a, b) in op.entries[i * op.m..(i + 1) * op.m].iter().zip(u) {
                    if *a != 0.0 {
                        acc = acc.add(b.mul(Dd::from(*a)));
                    }
                }
                acc
            })
            .collect()
    };
    let levels: Vec<Vec<Dd>> = levels
        .iter()
        .map(|u| u.iter().map(|&x| Dd::from(x)).collect())
        .collect();
    let lu: Vec<Vec<Dd>> = levels.iter().map(|u| apply(u)).collect();
    let mut dt_sq = Dd::ZERO;
    let mut l_sq = Dd::ZERO;
    let mut combined = Dd::ZERO;
    let mut jumps = Dd::ZERO;
    for n in 1..=grid.len() {
        let k = Dd::from(grid.step(n));
        let diff: Vec<Dd> = levels[n].iter().zip(&levels[n - 1]).map(|(a, b)| a.sub(*b)).collect();
        let q: Vec<Dd> = diff.iter().map(|d| d.div(k)).collect();
        let sum: Vec<Dd> = q.iter().zip(&lu[n]).map(|(a, b)| a.add(*b)).collect();
        dt_sq = dt_sq.add(k.mul(inner(&q, &q)));
        l_sq = l_sq.add(k.mul(inner(&lu[n], &lu[n])));
        combined = combined.add(k.mul(inner(&sum, &sum)));
        jumps = jumps.add(inner(&apply(&diff), &diff));
    }
    let last = grid.len();
    let end = inner(&lu[last], &levels[last]);
    let start = inner(&lu[0], &levels[0]);
    let expansion = dt_sq.add(l_sq).add(end).add(jumps).sub(start);
    Ok(MaxRegCheck {
        identity_residual: expansion.sub(combined).hi.abs(),
        slack: dt_sq.add(l_sq).sub(combined).sub(start).hi,
        combined: combined.hi,
    })
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let (hi, lo) = quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi));
        Dd { hi, lo }
    }

    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from(q3))
    }
}
