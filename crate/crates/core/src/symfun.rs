//! Elementary symmetric functions and Newton tensors of symmetric matrices.

use nalgebra::DMatrix;

use crate::error::{arg, Result};

/// Symmetric n×n matrix storing each off-diagonal pair once (packed upper triangle).
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * (n + 1) / 2] }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated for i <= j only.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Symmetrizes a dense row-major matrix by averaging (i,j) and (j,i).
    pub fn from_dense_symmetrized(n: usize, a: &[f64]) -> Self {
        Self::from_fn(n, |i, j| 0.5 * (a[i * n + j] + a[j * n + i]))
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        // row i starts after Σ_{r<i} (n − r) entries
        i * self.n + j - i - i * i.saturating_sub(1) / 2
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.idx(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.get(i, j);
            }
        }
        out
    }

    /// vᵀ A v.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += v[i] * self.get(i, j) * v[j];
            }
        }
        s
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_row_slice(self.n, self.n, &self.to_dense());
        let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ev
    }
}

/// Dense row-major product of two n×n matrices.
pub fn dense_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for l in 0..n {
            let ail = a[i * n + l];
            if ail == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += ail * b[l * n + j];
            }
        }
    }
    out
}

/// σ_0..σ_n of the given values, adding one value at a time.
pub fn sigma_all_from_eigenvalues(lambda: &[f64]) -> Vec<f64> {
    let n = lambda.len();
    let mut s = vec![0.0; n + 1];
    s[0] = 1.0;
    for (i, &l) in lambda.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            s[k] += l * s[k - 1];
        }
    }
    s
}

pub fn sigma_from_eigenvalues(lambda: &[f64], k: usize) -> Result<f64> {
    if k > lambda.len() {
        return arg(format!("sigma_k needs k <= n, got k={k}, n={}", lambda.len()));
    }
    Ok(sigma_all_from_eigenvalues(lambda)[k])
}

/// Matrix order above which σ_k is taken from a symmetric eigendecomposition.
pub const RECURSION_MAX_N: usize = 12;

/// σ_0..σ_kmax together with [T_0]..[T_kmax].
#[derive(Debug, Clone)]
pub struct NewtonSeries {
    pub sigma: Vec<f64>,
    pub tensors: Vec<SymMatrix>,
}

/// Runs [T_{k+1}] = σ_{k+1} Id − [T_k]·A with σ_{k+1} = tr([T_k]·A)/(k+1)
/// up to order `kmax`.
pub fn newton_series(a: &SymMatrix, kmax: usize) -> NewtonSeries {
    let n = a.n();
    let kmax = kmax.min(n);
    let ad = a.to_dense();
    let eig_sigma = (n > RECURSION_MAX_N).then(|| sigma_all_from_eigenvalues(&a.eigenvalues()));
    let mut sigma = vec![1.0];
    let mut tensors = vec![SymMatrix::identity(n)];
    for k in 0..kmax {
        let p = dense_mul(n, &tensors[k].to_dense(), &ad);
        let s = match &eig_sigma {
            Some(es) => es[k + 1],
            None => (0..n).map(|i| p[i * n + i]).sum::<f64>() / (k + 1) as f64,
        };
        let mut t = p;
        for v in t.iter_mut() {
            *v = -*v;
        }
        for i in 0..n {
            t[i * n + i] += s;
        }
        sigma.push(s);
        tensors.push(SymMatrix::from_dense_symmetrized(n, &t));
    }
    NewtonSeries { sigma, tensors }
}

pub fn sigma_matrix(a: &SymMatrix, k: usize) -> Result<f64> {
    if k > a.n() {
        return arg(format!("sigma_k needs k <= n, got k={k}, n={}", a.n()));
    }
    if !a.is_finite() {
        return arg("matrix has non-finite entries");
    }
    Ok(newton_series(a, k).sigma[k])
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonTensor {
    pub k: usize,
    pub matrix: SymMatrix,
}

pub fn newton_tensor(a: &SymMatrix, k: usize) -> Result<NewtonTensor> {
    if k > a.n() {
        return arg(format!("newton tensor needs k <= n, got k={k}, n={}", a.n()));
    }
    let mut s = newton_series(a, k);
    Ok(NewtonTensor { k, matrix: s.tensors.swap_remove(k) })
}

/// Σ_k(A_1,…,A_k) = (1/(k−1)!) δ^{j_1…j_k}_{i_1…i_k} (A_1)^{i_1}_{j_1}⋯(A_k)^{i_k}_{j_k},
/// expanded over distinct index tuples and permutations.
pub fn polarized_sigma(mats: &[SymMatrix]) -> Result<f64> {
    let k = mats.len();
    if k == 0 || k > 4 {
        return arg(format!("polarized sigma supports 1 <= k <= 4, got {k}"));
    }
    let n = mats[0].n();
    if mats.iter().any(|m| m.n() != n) {
        return arg("polarized sigma needs matrices of equal size");
    }
    let perms = permutations(k);
    let mut idx = vec![0usize; k];
    let mut total = 0.0;
    loop {
        let distinct = (0..k).all(|a| (a + 1..k).all(|b| idx[a] != idx[b]));
        if distinct {
            for (perm, sgn) in &perms {
                let mut prod = *sgn as f64;
                for r in 0..k {
                    prod *= mats[r].get(idx[r], idx[perm[r]]);
                }
                total += prod;
            }
        }
        // odometer increment
        let mut pos = 0;
        loop {
            if pos == k {
                let fact: f64 = (1..k).map(|v| v as f64).product();
                return Ok(total / fact);
            }
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// All permutations of 0..k with their signs.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).filter(|&(a, b)| p[a] > p[b]).count();
            let s = if inversions % 2 == 0 { 1 } else { -1 };
            (p, s)
        })
        .collect()
}
