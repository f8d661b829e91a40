//! Uniform bucket grid over realized coordinates for radius queries.

use std::collections::HashMap;

pub struct Grid {
    cell: f64,
    dim: usize,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
}

impl Grid {
    /// `cell` must be positive.
    pub fn new(points: &[Vec<f64>], cell: f64) -> Self {
        let dim = points.first().map_or(0, Vec::len);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(key(p, cell)).or_default().push(i);
        }
        Grid { cell, dim, buckets }
    }

    /// Indices of all points whose cell is within `radius` of `x` along every
    /// axis (a superset of the points within distance `radius`), ascending.
    pub fn candidates(&self, x: &[f64], radius: f64) -> Vec<usize> {
        let reach = (radius / self.cell).ceil() as i64;
        let base = key(x, self.cell);
        let mut out = Vec::new();
        let mut offset = vec![-reach; self.dim];
        loop {
            let k: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(v) = self.buckets.get(&k) {
                out.extend_from_slice(v);
            }
            let mut t = 0;
            loop {
                if t == self.dim {
                    out.sort_unstable();
                    return out;
                }
                offset[t] += 1;
                if offset[t] <= reach {
                    break;
                }
                offset[t] = -reach;
                t += 1;
            }
        }
    }
}

fn key(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| (x / cell).floor() as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_neighbours() {
        let pts: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 * 0.5, 0.0]).collect();
        let g = Grid::new(&pts, 1.0);
        let c = g.candidates(&[3.0, 0.0], 1.0);
        for i in 0..20 {
            if (pts[i][0] - 3.0).abs() <= 1.0 {
                assert!(c.contains(&i));
            }
        }
    }
}
