//! Sample points inside a chart's sampling region.

use rand_xoshiro::rand_core::SeedableRng;
use rand_xoshiro::SplitMix64;

use crate::catalog::unit_draw;
use crate::chart::Chart;

/// Cell-centred uniform points, optionally followed by seeded random points.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub counts: Vec<usize>,
    pub random: usize,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
}

impl SampleGrid {
    /// `counts[i]` cells along coordinate `i`, points at cell centres of the
    /// margin-shrunk domain; the last coordinate varies fastest.
    pub fn uniform(chart: &Chart, counts: &[usize]) -> Self {
        assert_eq!(counts.len(), chart.dim());
        let region = chart.sampling_region();
        let total: usize = counts.iter().product();
        let mut points = Vec::with_capacity(total);
        let mut idx = vec![0usize; counts.len()];
        for _ in 0..total {
            points.push(
                idx.iter()
                    .zip(counts)
                    .zip(&region)
                    .map(|((&k, &c), iv)| iv.lo + (k as f64 + 0.5) / c as f64 * iv.width())
                    .collect(),
            );
            for slot in (0..idx.len()).rev() {
                idx[slot] += 1;
                if idx[slot] < counts[slot] {
                    break;
                }
                idx[slot] = 0;
            }
        }
        Self {
            counts: counts.to_vec(),
            random: 0,
            seed: 0,
            points,
        }
    }

    /// `count` points drawn uniformly from the open sampling region.
    pub fn random(chart: &Chart, count: usize, seed: u64) -> Self {
        let region = chart.sampling_region();
        let mut rng = SplitMix64::seed_from_u64(seed);
        let points = (0..count)
            .map(|_| {
                region
                    .iter()
                    .map(|iv| {
                        // shift off zero so the point is strictly inside
                        let u = unit_draw(&mut rng) + 0.5 / (1u64 << 53) as f64;
                        iv.lo + u * iv.width()
                    })
                    .collect()
            })
            .collect();
        Self {
            counts: Vec::new(),
            random: count,
            seed,
            points,
        }
    }

    /// Uniform points along the first coordinate with `fiber` points along
    /// each of the others.
    pub fn radial(chart: &Chart, radial: usize, fiber: usize) -> Self {
        let mut counts = vec![fiber; chart.dim()];
        counts[0] = radial;
        Self::uniform(chart, &counts)
    }

    /// Appends seeded random points.
    pub fn with_random(mut self, chart: &Chart, count: usize, seed: u64) -> Self {
        let extra = Self::random(chart, count, seed);
        self.points.extend(extra.points);
        self.random = count;
        self.seed = seed;
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Compact description such as `64x8x8+20@42`.
    pub fn describe(&self) -> String {
        let mut s = self
            .counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("x");
        if self.random > 0 {
            if !s.is_empty() {
                s.push('+');
            }
            s.push_str(&format!("{}@{}", self.random, self.seed));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{build_unverified, Params, SpaceId};

    fn chart() -> Chart {
        build_unverified(SpaceId::Hemisphere, 3, &Params::default()).unwrap().chart
    }

    #[test]
    fn uniform_points_are_cell_centres() {
        let c = chart();
        let g = SampleGrid::uniform(&c, &[2, 1, 1]);
        let t = c.sampling_region()[0];
        assert_eq!(g.points.len(), 2);
        assert!((g.points[0][0] - (t.lo + 0.25 * t.width())).abs() < 1e-15);
        assert!((g.points[1][0] - (t.lo + 0.75 * t.width())).abs() < 1e-15);
    }

    #[test]
    fn last_coordinate_varies_fastest() {
        let g = SampleGrid::uniform(&chart(), &[2, 2, 3]);
        assert_eq!(g.points[0][..2], g.points[2][..2]);
        assert_ne!(g.points[0][2], g.points[1][2]);
    }

    #[test]
    fn random_points_are_seeded() {
        let c = chart();
        assert_eq!(SampleGrid::random(&c, 5, 7), SampleGrid::random(&c, 5, 7));
        assert_ne!(SampleGrid::random(&c, 5, 7).points, SampleGrid::random(&c, 5, 8).points);
    }

    #[test]
    fn descriptions() {
        let c = chart();
        assert_eq!(SampleGrid::radial(&c, 64, 8).describe(), "64x8x8");
        assert_eq!(SampleGrid::random(&c, 20, 42).describe(), "20@42");
        assert_eq!(SampleGrid::radial(&c, 4, 2).with_random(&c, 3, 1).describe(), "4x2x2+3@1");
    }
}
