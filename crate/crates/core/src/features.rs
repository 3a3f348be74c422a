//! Node feature encoding.
//!
//! The built-in encoder hashes lowercased character trigrams into a fixed
//! number of buckets and L2-normalizes the counts. Any other text encoder
//! (for example a remote sentence embedder) plugs in through [`TextEncoder`].

use thiserror::Error;

use crate::graph::{Graph, GraphError};

pub const DEFAULT_DIM: usize = 768;

pub trait TextEncoder: Send + Sync {
    /// Stable identifier recorded in manifests.
    fn id(&self) -> String;
    fn dim(&self) -> usize;
    fn encode(&self, text: &str) -> Vec<f64>;
}

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("encoder {id} returned {got} values, expected {expected}")]
    DimensionMismatch { id: String, expected: usize, got: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NgramHashEncoder {
    pub dim: usize,
    pub n: usize,
}

impl Default for NgramHashEncoder {
    fn default() -> Self {
        Self { dim: DEFAULT_DIM, n: 3 }
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

impl NgramHashEncoder {
    pub fn new(dim: usize, n: usize) -> Self {
        assert!(dim > 0 && n > 0, "dimension and gram size must be positive");
        Self { dim, n }
    }

    /// Character n-grams of the padded, lowercased text. Texts shorter than
    /// `n` after padding form a single gram.
    pub fn grams(&self, text: &str) -> Vec<String> {
        let padded: Vec<char> = std::iter::once('\u{2}')
            .chain(text.to_lowercase().chars())
            .chain(std::iter::once('\u{3}'))
            .collect();
        if padded.len() <= self.n {
            return vec![padded.into_iter().collect()];
        }
        padded.windows(self.n).map(|w| w.iter().collect()).collect()
    }
}

impl TextEncoder for NgramHashEncoder {
    fn id(&self) -> String {
        format!("ngram{}-hash-{}", self.n, self.dim)
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for g in self.grams(text) {
            v[(fnv1a(g.as_bytes()) % self.dim as u64) as usize] += 1.0;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        // padding guarantees at least one gram, so norm > 0
        v.iter_mut().for_each(|x| *x /= norm);
        v
    }
}

/// Row `i` of the result is the encoding of node label `i`.
pub fn encode_features(g: Graph, encoder: &dyn TextEncoder) -> Result<Graph, FeatureError> {
    let dim = encoder.dim();
    let rows = g
        .node_labels()
        .iter()
        .map(|label| {
            let row = encoder.encode(label);
            if row.len() == dim {
                Ok(row)
            } else {
                Err(FeatureError::DimensionMismatch {
                    id: encoder.id(),
                    expected: dim,
                    got: row.len(),
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(g.with_features(rows)?)
}

/// Cosine similarity; 0 when either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Edge;

    #[test]
    fn unit_norm_for_any_label() {
        let enc = NgramHashEncoder::default();
        for label in ["", "a", "0", "Customer Orders", "ünïcødé label 42"] {
            let v = enc.encode(label);
            assert_eq!(v.len(), 768);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() < 1e-9, "{label}: {norm}");
        }
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn matrix_shape_and_identical_labels() {
        let g = Graph::with_labels(
            false,
            false,
            3,
            vec![Edge::unit(0, 1)],
            vec!["alpha".into(), "beta".into(), "alpha".into()],
        )
        .unwrap();
        let g = encode_features(g, &NgramHashEncoder::default()).unwrap();
        let x = g.node_features().unwrap();
        assert_eq!((x.len(), x[0].len()), (3, 768));
        assert_eq!(x[0], x[2]);
        assert_ne!(x[0], x[1]);
    }

    struct Broken;
    impl TextEncoder for Broken {
        fn id(&self) -> String {
            "broken".into()
        }
        fn dim(&self) -> usize {
            4
        }
        fn encode(&self, _: &str) -> Vec<f64> {
            vec![1.0; 3]
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let g = Graph::new(false, false, 1, vec![]).unwrap();
        assert!(matches!(
            encode_features(g, &Broken),
            Err(FeatureError::DimensionMismatch { expected: 4, got: 3, .. })
        ));
    }
}
