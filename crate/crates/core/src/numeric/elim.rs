//! Gauss-Jordan elimination with complete pivoting and an incremental span
//! tracker used by the greedy basis searches.

/// Reduced row echelon form of a set of rows, pivot columns in pivoting order.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    ncols: usize,
    thresh: f64,
    pivots: Vec<usize>,
    rows: Vec<Vec<f64>>,
}

impl RowEchelon {
    /// Eliminates `rows` (each of length `ncols`). Pivots with magnitude
    /// `<= thresh` are treated as zero.
    pub fn new<'a, I>(rows: I, ncols: usize, thresh: f64) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut w: Vec<Vec<f64>> = rows.into_iter().map(|r| r.to_vec()).collect();
        let m = w.len();
        let mut pivots = Vec::new();
        let mut used = vec![false; ncols];
        for k in 0..m.min(ncols) {
            let mut best = (0.0, k, usize::MAX);
            for (i, row) in w.iter().enumerate().skip(k) {
                for (j, &x) in row.iter().enumerate() {
                    if !used[j] && x.abs() > best.0 {
                        best = (x.abs(), i, j);
                    }
                }
            }
            let (mag, pi, pj) = best;
            if mag <= thresh || pj == usize::MAX {
                break;
            }
            w.swap(k, pi);
            let pivot = w[k][pj];
            for x in w[k].iter_mut() {
                *x /= pivot;
            }
            w[k][pj] = 1.0;
            let pivot_row = w[k].clone();
            for (i, row) in w.iter_mut().enumerate() {
                if i == k {
                    continue;
                }
                let f = row[pj];
                if f != 0.0 {
                    for (x, p) in row.iter_mut().zip(&pivot_row) {
                        *x -= f * p;
                    }
                    row[pj] = 0.0;
                }
            }
            used[pj] = true;
            pivots.push(pj);
        }
        w.truncate(pivots.len());
        RowEchelon {
            ncols,
            thresh,
            pivots,
            rows: w,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// What remains of `v` after removing its component in the row space.
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let f = r[p];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= f * y;
                }
                r[p] = 0.0;
            }
        }
        r
    }

    /// Whether `v` lies in the row space (up to the elimination threshold).
    pub fn contains(&self, v: &[f64]) -> bool {
        self.residual(v).iter().all(|x| x.abs() <= self.thresh)
    }

    /// Basis of the right null space, one vector per free column.
    pub fn null_space(&self) -> Vec<Vec<f64>> {
        let mut is_pivot = vec![false; self.ncols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.ncols)
            .filter(|&f| !is_pivot[f])
            .map(|f| {
                let mut x = vec![0.0; self.ncols];
                x[f] = 1.0;
                for (row, &p) in self.rows.iter().zip(&self.pivots) {
                    x[p] = -row[f];
                }
                x
            })
            .collect()
    }
}

/// Numerical rank of a list of rows.
pub fn rank_of_rows(rows: &[&[f64]], ncols: usize, thresh: f64) -> usize {
    RowEchelon::new(rows.iter().copied(), ncols, thresh).rank()
}

/// Orthonormal basis grown one vector at a time (modified Gram-Schmidt,
/// applied twice). A vector extends the span when its residual norm exceeds
/// `rel` times its own norm.
#[derive(Clone, Debug)]
pub struct SpanTracker {
    rel: f64,
    basis: Vec<Vec<f64>>,
}

pub const INDEPENDENCE_REL: f64 = 1e-8;

impl SpanTracker {
    pub fn new(rel: f64) -> Self {
        SpanTracker {
            rel,
            basis: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn project_out(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.basis {
                let d: f64 = r.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in r.iter_mut().zip(q) {
                    *x -= d * y;
                }
            }
        }
        r
    }

    pub fn extends(&self, v: &[f64]) -> bool {
        let norm = l2(v);
        norm > 0.0 && l2(&self.project_out(v)) > self.rel * norm
    }

    /// Adds `v` if it extends the span; returns whether it did.
    pub fn insert(&mut self, v: &[f64]) -> bool {
        let norm = l2(v);
        if norm == 0.0 {
            return false;
        }
        let r = self.project_out(v);
        let rn = l2(&r);
        if rn <= self.rel * norm {
            return false;
        }
        self.basis.push(r.into_iter().map(|x| x / rn).collect());
        true
    }
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_is_annihilated() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.5]];
        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let e = RowEchelon::new(refs.iter().copied(), 3, 1e-12);
        assert_eq!(e.rank(), 2);
        let ns = e.null_space();
        assert_eq!(ns.len(), 1);
        for r in &rows {
            let d: f64 = r.iter().zip(&ns[0]).map(|(a, b)| a * b).sum();
            assert!(d.abs() < 1e-12);
        }
        assert!(e.contains(&[3.0, 6.0, 9.5]));
        assert!(!e.contains(&[0.0, 1.0, 0.0]));
    }

    #[test]
    fn tracker_detects_dependence() {
        let mut t = SpanTracker::new(INDEPENDENCE_REL);
        assert!(t.insert(&[1.0, 1.0, 0.0]));
        assert!(t.insert(&[0.0, 1.0, 1.0]));
        assert!(!t.extends(&[1.0, 2.0, 1.0]));
        assert!(t.insert(&[0.0, 0.0, 1.0]));
        assert_eq!(t.dim(), 3);
    }
}
