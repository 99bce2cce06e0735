//! Mesh-aligned cubes of a factor, wrapped on the torus.
//!
//! A window is a cube `start + [0, s)^d` in mesh units, `1 ≤ s ≤ S` where
//! `S = 2^L` is the number of cells per side. A cell `x` lies in the window
//! iff its offset `t(x, start) = max_c (x_c − start_c) mod S` is below `s`,
//! so suprema over windows reduce to suffix maxima over the side length.

use crate::dyadic::Factor;

#[derive(Clone, Debug)]
pub(crate) struct Windows {
    factor: Factor,
    side: usize,
    dim: usize,
    coords: Vec<[usize; 2]>,
}

impl Windows {
    pub fn new(factor: Factor) -> Self {
        let side = factor.side() as usize;
        let coords = (0..factor.len())
            .map(|c| {
                let x = factor.coords(c);
                [x[0] as usize, x[1] as usize]
            })
            .collect();
        Self { factor, side, dim: factor.dim() as usize, coords }
    }

    /// Number of side lengths, and of distinct offsets.
    pub fn sides(&self) -> usize {
        self.side
    }

    /// Number of start positions (one per cell).
    pub fn starts(&self) -> usize {
        self.coords.len()
    }

    pub fn offset(&self, x: usize, start: usize) -> usize {
        let (a, b) = (self.coords[x], self.coords[start]);
        let s = self.side;
        let mut t = (a[0] + s - b[0]) % s;
        if self.dim == 2 {
            t = t.max((a[1] + s - b[1]) % s);
        }
        t
    }

    /// Cells of the window at `start` with side `s`.
    pub fn cells(&self, start: usize, s: usize) -> Vec<usize> {
        let b = self.coords[start];
        let n = self.side;
        if self.dim == 1 {
            (0..s).map(|t| (b[0] + t) % n).collect()
        } else {
            let mut out = Vec::with_capacity(s * s);
            for v in 0..s {
                for u in 0..s {
                    out.push(self.factor.cell([((b[0] + u) % n) as u32, ((b[1] + v) % n) as u32]));
                }
            }
            out
        }
    }

    /// Window sums of `values` for every start, as `sums[start * S + (s − 1)]`.
    pub fn sums(&self, values: &[f64]) -> Vec<f64> {
        let n = self.side;
        let mut out = vec![0.0; self.starts() * n];
        if self.dim == 1 {
            let mut pre = vec![0.0; 2 * n + 1];
            for i in 0..2 * n {
                pre[i + 1] = pre[i] + values[i % n];
            }
            for a in 0..n {
                for s in 1..=n {
                    out[a * n + s - 1] = pre[a + s] - pre[a];
                }
            }
        } else {
            let w = 2 * n + 1;
            let mut pre = vec![0.0; w * w];
            for y in 0..2 * n {
                for x in 0..2 * n {
                    let v = values[self.factor.cell([(x % n) as u32, (y % n) as u32])];
                    pre[(y + 1) * w + x + 1] = v + pre[y * w + x + 1] + pre[(y + 1) * w + x] - pre[y * w + x];
                }
            }
            for a in 0..self.starts() {
                let [x0, y0] = self.coords[a];
                for s in 1..=n {
                    let (x1, y1) = (x0 + s, y0 + s);
                    out[a * n + s - 1] = pre[y1 * w + x1] - pre[y0 * w + x1] - pre[y1 * w + x0] + pre[y0 * w + x0];
                }
            }
        }
        out
    }

    /// Volume of a window of side `s`, in cells.
    pub fn volume(&self, s: usize) -> usize {
        s.pow(self.dim as u32)
    }

    /// Given a value per window (`vals[start * S + s − 1]`), the supremum over
    /// the windows containing each cell.
    pub fn sup_over_containing(&self, vals: &[f64]) -> Vec<f64> {
        let n = self.side;
        let mut best = vec![0.0; n];
        let mut out = vec![f64::NEG_INFINITY; self.starts()];
        for a in 0..self.starts() {
            let row = &vals[a * n..(a + 1) * n];
            // best[t] = max over sides s > t.
            let mut m = f64::NEG_INFINITY;
            for t in (0..n).rev() {
                m = m.max(row[t]);
                best[t] = m;
            }
            for (x, o) in out.iter_mut().enumerate() {
                let v = best[self.offset(x, a)];
                if v > *o {
                    *o = v;
                }
            }
        }
        out
    }
}
