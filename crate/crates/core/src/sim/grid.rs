//! Bucket grid for nearest-point queries inside a square window.

#[derive(Debug, Clone)]
pub(crate) struct Grid {
    lo: f64,
    cell: f64,
    n: usize,
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl Grid {
    /// Buckets `points` of the window `[lo, lo + side]²` into cells holding
    /// about two points each.
    pub fn new(points: &[[f64; 2]], lo: f64, side: f64) -> Self {
        let n = ((points.len() as f64 / 2.0).sqrt().ceil() as usize).clamp(1, 1024);
        let cell = side / n as f64;
        let mut g = Grid {
            lo,
            cell,
            n,
            starts: vec![0; n * n + 1],
            order: vec![0; points.len()],
        };
        let keys: Vec<usize> = points.iter().map(|p| g.key(p)).collect();
        for &k in &keys {
            g.starts[k + 1] += 1;
        }
        for i in 0..n * n {
            g.starts[i + 1] += g.starts[i];
        }
        let mut fill = g.starts.clone();
        for (i, &k) in keys.iter().enumerate() {
            g.order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        g
    }

    fn coord(&self, x: f64) -> usize {
        (((x - self.lo) / self.cell).floor().max(0.0) as usize).min(self.n - 1)
    }

    fn key(&self, p: &[f64; 2]) -> usize {
        self.coord(p[1]) * self.n + self.coord(p[0])
    }

    fn scan(
        &self,
        cx: usize,
        cy: usize,
        x: &[f64; 2],
        points: &[[f64; 2]],
        best: &mut Option<(usize, f64)>,
    ) {
        let k = cy * self.n + cx;
        for &i in &self.order[self.starts[k] as usize..self.starts[k + 1] as usize] {
            let p = points[i as usize];
            let d2 = (p[0] - x[0]).powi(2) + (p[1] - x[1]).powi(2);
            if best.is_none_or(|(_, b)| d2 < b) {
                *best = Some((i as usize, d2));
            }
        }
    }

    /// Index and squared distance of the point nearest to `x`.
    pub fn nearest(&self, x: &[f64; 2], points: &[[f64; 2]]) -> Option<(usize, f64)> {
        if points.is_empty() {
            return None;
        }
        let (cx, cy) = (self.coord(x[0]) as isize, self.coord(x[1]) as isize);
        let n = self.n as isize;
        let mut best = None;
        for r in 0..=n {
            for dy in -r..=r {
                let y = cy + dy;
                if y < 0 || y >= n {
                    continue;
                }
                let step = if dy.abs() == r { 1 } else { 2 * r.max(1) };
                let mut dx = -r;
                while dx <= r {
                    let xx = cx + dx;
                    if xx >= 0 && xx < n {
                        self.scan(xx as usize, y as usize, x, points, &mut best);
                    }
                    dx += step;
                }
            }
            if let Some((_, d2)) = best {
                let reach = r as f64 * self.cell;
                if d2 <= reach * reach {
                    break;
                }
            }
        }
        best
    }
}
