//! Linear solvers for the Newton steps: Jacobi-preconditioned CG for the
//! definite case and banded Gaussian elimination otherwise. Both run
//! serially so that results are bit-reproducible.

/// 5-point stencil operator `a * Lap_h + diag(d)` on the interior of an
/// `nx x ny` grid with homogeneous Dirichlet data, acting on interior unknowns
/// ordered row-major with `mx = nx - 2` unknowns per row.
pub(crate) struct Stencil<'a> {
    pub mx: usize,
    pub my: usize,
    pub h: f64,
    pub lap_coeff: f64,
    pub diag: &'a [f64],
}

impl Stencil<'_> {
    fn off(&self) -> f64 {
        self.lap_coeff / (self.h * self.h)
    }

    fn center(&self, k: usize) -> f64 {
        -4.0 * self.off() + self.diag[k]
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let off = self.off();
        for j in 0..self.my {
            for i in 0..self.mx {
                let k = j * self.mx + i;
                let mut s = self.center(k) * x[k];
                if i > 0 {
                    s += off * x[k - 1];
                }
                if i + 1 < self.mx {
                    s += off * x[k + 1];
                }
                if j > 0 {
                    s += off * x[k - self.mx];
                }
                if j + 1 < self.my {
                    s += off * x[k + self.mx];
                }
                y[k] = s;
            }
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) struct CgOutcome {
    pub iterations: usize,
    pub converged: bool,
}

/// Solves `-A x = b` for a stencil `A` whose negation is symmetric positive
/// definite.
pub(crate) fn pcg_negated(
    op: &Stencil<'_>,
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> CgOutcome {
    let n = b.len();
    let inv_diag: Vec<f64> = (0..n).map(|k| -1.0 / op.center(k)).collect();
    x.iter_mut().for_each(|v| *v = 0.0);
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let target = rel_tol * dot(b, b).sqrt();
    if target == 0.0 {
        return CgOutcome { iterations: 0, converged: true };
    }
    for it in 0..max_iter {
        op.apply(&p, &mut ap);
        ap.iter_mut().for_each(|v| *v = -*v);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return CgOutcome { iterations: it, converged: false };
        }
        let alpha = rz / pap;
        for k in 0..n {
            x[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        if dot(&r, &r).sqrt() <= target {
            return CgOutcome { iterations: it + 1, converged: true };
        }
        for k in 0..n {
            z[k] = r[k] * inv_diag[k];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for k in 0..n {
            p[k] = z[k] + beta * p[k];
        }
    }
    CgOutcome { iterations: max_iter, converged: false }
}

/// Band matrix with `kl` sub- and `ku` super-diagonals. Each row stores the
/// window of columns `[i - kl, i + kl + ku]`, wide enough to hold the fill
/// created by partial pivoting.
struct Band {
    n: usize,
    kl: usize,
    width: usize,
    data: Vec<f64>,
}

impl Band {
    fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, width, data: vec![0.0; n * width] }
    }

    fn slot(&self, i: usize, c: usize) -> Option<usize> {
        let off = (c + self.kl).checked_sub(i)?;
        (off < self.width && c < self.n).then(|| i * self.width + off)
    }

    fn get(&self, i: usize, c: usize) -> f64 {
        self.slot(i, c).map_or(0.0, |s| self.data[s])
    }

    fn set(&mut self, i: usize, c: usize, v: f64) {
        let s = self.slot(i, c).expect("entry outside band");
        self.data[s] = v;
    }

    fn last_col(&self, i: usize) -> usize {
        (i + self.width - self.kl - 1).min(self.n - 1)
    }
}

/// Solves `A x = b` for a stencil operator by banded Gaussian elimination with
/// partial pivoting. Returns `None` for a numerically singular matrix.
pub(crate) fn banded_solve(op: &Stencil<'_>, b: &[f64]) -> Option<Vec<f64>> {
    let n = b.len();
    let kl = op.mx;
    let mut a = Band::new(n, kl, kl);
    let off = op.off();
    for k in 0..n {
        let (i, j) = (k % op.mx, k / op.mx);
        a.set(k, k, op.center(k));
        if i > 0 {
            a.set(k, k - 1, off);
        }
        if i + 1 < op.mx {
            a.set(k, k + 1, off);
        }
        if j > 0 {
            a.set(k, k - op.mx, off);
        }
        if j + 1 < op.my {
            a.set(k, k + op.mx, off);
        }
    }
    let mut rhs = b.to_vec();
    let scale = a.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    for k in 0..n {
        let last_row = (k + kl).min(n - 1);
        let mut p = k;
        let mut best = a.get(k, k).abs();
        for r in k + 1..=last_row {
            let v = a.get(r, k).abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best <= 1e-300_f64.max(1e-15 * scale) {
            return None;
        }
        let end = a.last_col(k);
        if p != k {
            for c in k..=end {
                let (x, y) = (a.get(k, c), a.get(p, c));
                a.set(k, c, y);
                a.set(p, c, x);
            }
            rhs.swap(k, p);
        }
        let pivot = a.get(k, k);
        for r in k + 1..=last_row {
            let m = a.get(r, k) / pivot;
            if m == 0.0 {
                continue;
            }
            a.set(r, k, 0.0);
            for c in k + 1..=end {
                let v = a.get(r, c) - m * a.get(k, c);
                a.set(r, c, v);
            }
            rhs[r] -= m * rhs[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for c in k + 1..=a.last_col(k) {
            s -= a.get(k, c) * x[c];
        }
        x[k] = s / a.get(k, k);
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(op: &Stencil<'_>, x: &[f64], b: &[f64]) -> f64 {
        let mut y = vec![0.0; b.len()];
        op.apply(x, &mut y);
        y.iter().zip(b).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn cg_and_banded_agree_on_definite_problem() {
        let (mx, my) = (7, 5);
        let diag: Vec<f64> = (0..mx * my).map(|k| -0.3 - 0.01 * k as f64).collect();
        let op = Stencil { mx, my, h: 0.1, lap_coeff: 0.25, diag: &diag };
        let b: Vec<f64> = (0..mx * my).map(|k| ((k * 7) % 5) as f64 - 2.0).collect();
        let mut x = vec![0.0; b.len()];
        let out = pcg_negated(&op, &b, &mut x, 1e-14, 500);
        assert!(out.converged);
        let neg_b: Vec<f64> = b.iter().map(|v| -v).collect();
        assert!(residual(&op, &x, &neg_b) < 1e-10);
        let y = banded_solve(&op, &neg_b).unwrap();
        assert!(x.iter().zip(&y).all(|(a, c)| (a - c).abs() < 1e-10));
    }

    #[test]
    fn banded_handles_indefinite_problem() {
        let (mx, my) = (9, 9);
        let diag = vec![60.0; mx * my];
        let op = Stencil { mx, my, h: 0.1, lap_coeff: 0.25, diag: &diag };
        let b: Vec<f64> = (0..mx * my).map(|k| (k as f64 * 0.37).sin()).collect();
        let x = banded_solve(&op, &b).unwrap();
        assert!(residual(&op, &x, &b) < 1e-9);
    }
}
