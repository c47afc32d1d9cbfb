use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::BenchError;
use crate::graph::{Graph, VertexId, Weight};
use crate::sweep;

/// Edges drawn per RNG stream. Streams are independent, so chunks can be
/// generated in parallel without changing the output.
const CHUNK: usize = 1 << 12;

/// RMAT generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    /// log2 of the vertex count.
    pub scale: u32,
    pub edge_factor: usize,
    #[serde(default = "default_probs")]
    pub probs: [f64; 4],
    #[serde(default = "default_lo")]
    pub weight_lo: Weight,
    #[serde(default = "default_hi")]
    pub weight_hi: Weight,
    #[serde(default)]
    pub seed: u64,
}

/// Graph500 quadrant probabilities.
pub const GRAPH500_PROBS: [f64; 4] = [0.57, 0.19, 0.19, 0.05];

fn default_probs() -> [f64; 4] {
    GRAPH500_PROBS
}

fn default_lo() -> Weight {
    1
}

fn default_hi() -> Weight {
    20
}

impl GenSpec {
    pub fn new(scale: u32, edge_factor: usize, seed: u64) -> Self {
        GenSpec {
            scale,
            edge_factor,
            probs: GRAPH500_PROBS,
            weight_lo: default_lo(),
            weight_hi: default_hi(),
            seed,
        }
    }

    pub fn n_vertices(&self) -> usize {
        1 << self.scale
    }

    pub fn n_edges(&self) -> usize {
        self.edge_factor << self.scale
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Spec(m));
        let sum: f64 = self.probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 || self.probs.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return bad(format!("quadrant probabilities {:?} must be in [0,1] and sum to 1", self.probs));
        }
        if self.weight_lo < 1 || self.weight_hi <= self.weight_lo {
            return bad(format!("weight range [{}, {}) needs 1 <= lo < hi", self.weight_lo, self.weight_hi));
        }
        if self.scale == 0 || self.scale > 31 {
            return bad(format!("scale {} outside [1, 31]", self.scale));
        }
        Ok(())
    }
}

fn draw_edge(spec: &GenSpec, rng: &mut ChaCha8Rng) -> (VertexId, VertexId) {
    let [a, b, c, _] = spec.probs;
    loop {
        let (mut u, mut v) = (0u32, 0u32);
        for _ in 0..spec.scale {
            let r: f64 = rng.gen();
            let (row, col) = if r < a {
                (0, 0)
            } else if r < a + b {
                (0, 1)
            } else if r < a + b + c {
                (1, 0)
            } else {
                (1, 1)
            };
            u = (u << 1) | row;
            v = (v << 1) | col;
        }
        // Redraw self-loops so the arc count stays exact.
        if u != v {
            return (u, v);
        }
    }
}

fn chunk_edges(spec: &GenSpec, chunk: usize) -> Vec<(VertexId, VertexId, Weight)> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(chunk as u64);
    let len = CHUNK.min(spec.n_edges() - chunk * CHUNK);
    (0..len)
        .map(|_| {
            let (u, v) = draw_edge(spec, &mut rng);
            (u, v, rng.gen_range(spec.weight_lo..spec.weight_hi))
        })
        .collect()
}

/// `edge_factor * 2^scale` directed edges by recursive quadrant descent,
/// weights uniform in `[lo, hi)`. Deterministic for a fixed seed.
pub fn generate_rmat(spec: &GenSpec) -> Result<Graph, BenchError> {
    spec.validate()?;
    let m = spec.n_edges();
    let chunks: Vec<usize> = (0..m.div_ceil(CHUNK)).collect();
    let parts = sweep::map(chunks, |chunk| chunk_edges(spec, chunk));
    let edges: Vec<_> = parts.into_iter().flatten().collect();
    Ok(Graph::build(&edges, spec.n_vertices(), true)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_follow_scale_and_edge_factor() {
        let g = generate_rmat(&GenSpec::new(10, 16, 3)).unwrap();
        assert_eq!(g.n_vertices(), 1024);
        assert_eq!(g.n_edges(), 16384);
        assert!(g.edges().all(|(u, v, w)| u != v && (1..20).contains(&w)));
    }

    #[test]
    fn deterministic_for_seed() {
        let a = generate_rmat(&GenSpec::new(8, 8, 11)).unwrap();
        let b = generate_rmat(&GenSpec::new(8, 8, 11)).unwrap();
        let c = generate_rmat(&GenSpec::new(8, 8, 12)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn parallel_and_sequential_chunks_agree() {
        let spec = GenSpec::new(9, 20, 5);
        let m = spec.n_edges();
        let seq: Vec<_> = sweep::map_seq((0..m.div_ceil(CHUNK)).collect(), |c| chunk_edges(&spec, c))
            .into_iter()
            .flatten()
            .collect();
        let g = generate_rmat(&spec).unwrap();
        assert_eq!(g, Graph::build(&seq, spec.n_vertices(), true).unwrap());
    }

    #[test]
    fn uniform_quadrants_give_uniform_sources() {
        let spec = GenSpec { probs: [0.25; 4], ..GenSpec::new(10, 16, 9) };
        let g = generate_rmat(&spec).unwrap();
        let n = g.n_vertices() as f64;
        // Pairs are uniform over n^2; redrawing the diagonal keeps sources
        // uniform.
        let expected = g.n_edges() as f64 / n;
        let chi2: f64 = (0..g.n_vertices() as VertexId)
            .map(|u| {
                let o = g.out_degree(u) as f64;
                (o - expected).powi(2) / expected
            })
            .sum();
        // df = 1023: mean 1023, sd ~45. Five sigma either side.
        assert!((1023.0 - 226.0..1023.0 + 226.0).contains(&chi2), "chi2 = {chi2}");
    }

    #[test]
    fn skewed_default_probs_concentrate_degree() {
        let g = generate_rmat(&GenSpec::new(10, 16, 9)).unwrap();
        let hub = g.max_out_degree_vertex().unwrap();
        assert!(g.out_degree(hub) > 10 * 16);
    }

    #[test]
    fn invalid_specs() {
        let mut s = GenSpec::new(4, 2, 0);
        s.probs = [0.5, 0.5, 0.5, 0.0];
        assert!(s.validate().is_err());
        let mut s = GenSpec::new(4, 2, 0);
        s.weight_lo = 0;
        assert!(s.validate().is_err());
        let mut s = GenSpec::new(4, 2, 0);
        s.weight_hi = 1;
        assert!(s.validate().is_err());
    }
}
