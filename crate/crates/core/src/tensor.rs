//! Dense real tensors in row-major layout.
//!
//! Every vector space carries a fixed orthonormal basis, so a space is
//! identified with its dual and contraction is plain diagonal summation.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("data length {len} does not match shape {shape:?}")]
    DataLength { shape: Vec<usize>, len: usize },
    #[error("zero-sized dimension in shape {0:?}")]
    ZeroDimension(Vec<usize>),
    #[error("shape mismatch: {0:?} vs {1:?}")]
    ShapeMismatch(Vec<usize>, Vec<usize>),
    #[error("cannot contract axes {0} and {1} of a rank-{2} tensor")]
    BadAxes(usize, usize, usize),
    #[error("cannot contract axis {i} (dim {di}) with axis {j} (dim {dj})")]
    DimensionMismatch {
        i: usize,
        j: usize,
        di: usize,
        dj: usize,
    },
    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),
    #[error("expected a rank-{expected} tensor, found shape {shape:?}")]
    Rank { expected: usize, shape: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTensor")]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

#[derive(Deserialize)]
struct RawTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl TryFrom<RawTensor> for Tensor {
    type Error = TensorError;
    fn try_from(raw: RawTensor) -> Result<Self, Self::Error> {
        Tensor::new(raw.shape, raw.data)
    }
}

/// Result of [`cosine`]. `zero_norm` flags a degenerate input, in which case
/// `value` is defined as 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cosine {
    pub value: f64,
    pub zero_norm: bool,
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        if shape.contains(&0) {
            return Err(TensorError::ZeroDimension(shape));
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(TensorError::DataLength {
                shape,
                len: data.len(),
            });
        }
        Ok(Tensor { shape, data })
    }

    pub fn scalar(x: f64) -> Self {
        Tensor {
            shape: Vec::new(),
            data: vec![x],
        }
    }

    pub fn vector(data: Vec<f64>) -> Self {
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    pub fn matrix(rows: &[Vec<f64>]) -> Result<Self, TensorError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(TensorError::DataLength {
                shape: vec![r, c],
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Tensor::new(vec![r, c], rows.concat())
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Tensor {
            shape,
            data: vec![0.0; len],
        }
    }

    /// The unit vector `e_index` of dimension `dim`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut data = vec![0.0; dim];
        data[index] = 1.0;
        Tensor::vector(data)
    }

    /// `sum_i e_i (x) e_i` over the multi-index space `dims`: shape
    /// `dims ++ dims`, ones where both halves agree. For empty `dims` this is
    /// the scalar 1.
    pub fn identity(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        let mut shape = dims.to_vec();
        shape.extend_from_slice(dims);
        let mut data = vec![0.0; n * n];
        for k in 0..n {
            data[k * n + k] = 1.0;
        }
        Tensor { shape, data }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.shape.len());
        let off: usize = index
            .iter()
            .zip(strides(&self.shape))
            .map(|(i, s)| i * s)
            .sum();
        self.data[off]
    }

    pub fn reshape(self, shape: Vec<usize>) -> Result<Self, TensorError> {
        Tensor::new(shape, self.data)
    }

    pub fn scale(&self, k: f64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Component-wise product.
    pub fn hadamard(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.zip_with(other, |a, b| a * b)
    }

    fn zip_with(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Result<Tensor, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(
                self.shape.clone(),
                other.shape.clone(),
            ));
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    /// Euclidean inner product of equally shaped tensors.
    pub fn inner(&self, other: &Tensor) -> Result<f64, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(
                self.shape.clone(),
                other.shape.clone(),
            ));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Tensor) -> Result<f64, TensorError> {
        if self.shape != other.shape {
            return Err(TensorError::ShapeMismatch(
                self.shape.clone(),
                other.shape.clone(),
            ));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Reorders axes: axis `k` of the result is axis `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor, TensorError> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true))
        {
            return Err(TensorError::BadPermutation(perm.to_vec()));
        }
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(self.clone());
        }
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let src = strides(&self.shape);
        let moved: Vec<usize> = perm.iter().map(|&p| src[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; r];
        let mut off = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[off]);
            for k in (0..r).rev() {
                idx[k] += 1;
                off += moved[k];
                if idx[k] < shape[k] {
                    break;
                }
                off -= moved[k] * shape[k];
                idx[k] = 0;
            }
        }
        Ok(Tensor { shape, data })
    }

    /// Applies the square matrix `m` (rows = output) along `axis`.
    pub fn apply_matrix(&self, m: &Tensor, axis: usize) -> Result<Tensor, TensorError> {
        if m.rank() != 2 {
            return Err(TensorError::Rank {
                expected: 2,
                shape: m.shape.clone(),
            });
        }
        if axis >= self.rank() {
            return Err(TensorError::BadAxes(axis, axis, self.rank()));
        }
        let d = self.shape[axis];
        if m.shape != [d, d] {
            return Err(TensorError::ShapeMismatch(m.shape.clone(), vec![d, d]));
        }
        let outer: usize = self.shape[..axis].iter().product();
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut data = vec![0.0; self.data.len()];
        for o in 0..outer {
            for row in 0..d {
                let dst = (o * d + row) * inner;
                for col in 0..d {
                    let w = m.data[row * d + col];
                    if w == 0.0 {
                        continue;
                    }
                    let src = (o * d + col) * inner;
                    for k in 0..inner {
                        data[dst + k] += w * self.data[src + k];
                    }
                }
            }
        }
        Ok(Tensor {
            shape: self.shape.clone(),
            data,
        })
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// `a (x) b`: shape is the concatenation, entries `a[i] * b[j]`.
pub fn tensor_product(a: &Tensor, b: &Tensor) -> Tensor {
    let mut shape = a.shape.clone();
    shape.extend_from_slice(&b.shape);
    let mut data = Vec::with_capacity(a.data.len() * b.data.len());
    for &x in &a.data {
        data.extend(b.data.iter().map(|&y| x * y));
    }
    Tensor { shape, data }
}

/// Sums the diagonal over two distinct axes of equal dimension; the result
/// keeps the remaining axes in order.
pub fn contract(t: &Tensor, axis_i: usize, axis_j: usize) -> Result<Tensor, TensorError> {
    let r = t.rank();
    if axis_i == axis_j || axis_i >= r || axis_j >= r {
        return Err(TensorError::BadAxes(axis_i, axis_j, r));
    }
    let (i, j) = (axis_i.min(axis_j), axis_i.max(axis_j));
    let d = t.shape[i];
    if t.shape[j] != d {
        return Err(TensorError::DimensionMismatch {
            i: axis_i,
            j: axis_j,
            di: t.shape[axis_i],
            dj: t.shape[axis_j],
        });
    }
    // View the tensor as [A, d, B, d, C].
    let a: usize = t.shape[..i].iter().product();
    let b: usize = t.shape[i + 1..j].iter().product();
    let c: usize = t.shape[j + 1..].iter().product();
    let mut shape = t.shape[..i].to_vec();
    shape.extend_from_slice(&t.shape[i + 1..j]);
    shape.extend_from_slice(&t.shape[j + 1..]);
    let mut data = vec![0.0; a * b * c];
    let s_j = c;
    let s_b = d * c;
    let s_i = b * s_b;
    let s_a = d * s_i;
    for ia in 0..a {
        for k in 0..d {
            let base = ia * s_a + k * s_i + k * s_j;
            for ib in 0..b {
                let src = base + ib * s_b;
                let dst = (ia * b + ib) * c;
                for ic in 0..c {
                    data[dst + ic] += t.data[src + ic];
                }
            }
        }
    }
    Ok(Tensor { shape, data })
}

/// Cosine of the angle between two equally shaped tensors. A zero-norm input
/// yields 0 with `zero_norm` set.
pub fn cosine(a: &Tensor, b: &Tensor) -> Result<Cosine, TensorError> {
    let dot = a.inner(b)?;
    let denom = a.norm() * b.norm();
    if denom == 0.0 {
        return Ok(Cosine {
            value: 0.0,
            zero_norm: true,
        });
    }
    Ok(Cosine {
        value: (dot / denom).clamp(-1.0, 1.0),
        zero_norm: false,
    })
}

/// `v (x) v (x) ... (x) v` with `k >= 1` factors.
pub fn kronecker_power(v: &Tensor, k: usize) -> Result<Tensor, TensorError> {
    if v.rank() != 1 {
        return Err(TensorError::Rank {
            expected: 1,
            shape: v.shape.clone(),
        });
    }
    assert!(k >= 1, "kronecker power needs at least one factor");
    let mut out = v.clone();
    for _ in 1..k {
        out = tensor_product(&out, v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(rng: &mut ChaCha8Rng, shape: Vec<usize>) -> Tensor {
        let n = shape.iter().product();
        Tensor::new(shape, (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap()
    }

    // Independent multi-index helpers for the nested-loop oracles.
    fn multi_indices(shape: &[usize]) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        for &d in shape {
            out = out
                .into_iter()
                .flat_map(|p| {
                    (0..d).map(move |i| {
                        let mut q = p.clone();
                        q.push(i);
                        q
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn product_examples() {
        let t = tensor_product(&Tensor::vector(vec![1.0, 0.0]), &Tensor::vector(vec![0.0, 1.0]));
        assert_eq!(t, Tensor::matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap());
        let s = tensor_product(&Tensor::scalar(2.0), &Tensor::vector(vec![1.0, 2.0]));
        assert_eq!(s, Tensor::vector(vec![2.0, 4.0]));
    }

    #[test]
    fn product_matches_nested_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random(&mut rng, vec![2, 3]);
        let b = random(&mut rng, vec![2]);
        let t = tensor_product(&a, &b);
        assert_eq!(t.shape(), &[2, 3, 2]);
        for i in 0..2 {
            for j in 0..3 {
                for k in 0..2 {
                    assert_eq!(t.get(&[i, j, k]), a.get(&[i, j]) * b.get(&[k]));
                }
            }
        }
    }

    #[test]
    fn contraction_examples() {
        let id = Tensor::identity(&[2]);
        assert_eq!(contract(&id, 0, 1).unwrap(), Tensor::scalar(2.0));
        let v = Tensor::vector(vec![1.0, 2.0, 3.0]);
        let w = Tensor::vector(vec![-1.0, 0.5, 2.0]);
        let dyad = contract(&tensor_product(&v, &w), 0, 1).unwrap();
        assert_eq!(dyad, Tensor::scalar(v.inner(&w).unwrap()));
    }

    #[test]
    fn contraction_matches_nested_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = random(&mut rng, vec![3, 3, 2]);
        let c = contract(&t, 0, 1).unwrap();
        assert_eq!(c.shape(), &[2]);
        for k in 0..2 {
            let expect: f64 = (0..3).map(|i| t.get(&[i, i, k])).sum();
            assert!((c.get(&[k]) - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn contraction_errors() {
        let t = Tensor::zeros(vec![2, 3]);
        assert!(matches!(
            contract(&t, 0, 1),
            Err(TensorError::DimensionMismatch { .. })
        ));
        assert!(contract(&t, 1, 1).is_err());
        assert!(contract(&t, 0, 2).is_err());
    }

    #[test]
    fn cosine_examples() {
        let e0 = Tensor::vector(vec![1.0, 0.0]);
        let e1 = Tensor::vector(vec![0.0, 1.0]);
        assert_eq!(cosine(&e0, &e0).unwrap().value, 1.0);
        assert_eq!(cosine(&e0, &e1).unwrap().value, 0.0);
        let d = cosine(&Tensor::vector(vec![1.0, 1.0]), &e0).unwrap();
        assert!((d.value - 0.7071067811865475).abs() < 1e-12);
        let z = cosine(&Tensor::zeros(vec![2]), &e0).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.zero_norm);
        assert!(cosine(&e0, &Tensor::zeros(vec![3])).is_err());
    }

    #[test]
    fn kronecker_examples() {
        let e0 = Tensor::vector(vec![1.0, 0.0]);
        assert_eq!(
            kronecker_power(&e0, 2).unwrap(),
            Tensor::matrix(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap()
        );
        let v = Tensor::vector(vec![1.0, 2.0]);
        assert_eq!(
            kronecker_power(&v, 2).unwrap(),
            Tensor::matrix(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap()
        );
        assert_eq!(kronecker_power(&v, 1).unwrap(), v);
        assert!(kronecker_power(&Tensor::zeros(vec![2, 2]), 2).is_err());
    }

    #[test]
    fn validation_and_json() {
        assert!(Tensor::new(vec![2, 2], vec![1.0]).is_err());
        assert!(Tensor::new(vec![0], vec![]).is_err());
        let t: Tensor = serde_json::from_str(r#"{"shape":[2],"data":[1.0,2.0]}"#).unwrap();
        assert_eq!(t, Tensor::vector(vec![1.0, 2.0]));
        assert_eq!(serde_json::to_string(&t).unwrap(), r#"{"shape":[2],"data":[1.0,2.0]}"#);
        assert!(serde_json::from_str::<Tensor>(r#"{"shape":[3],"data":[1.0]}"#).is_err());
    }

    #[test]
    fn apply_matrix_and_identity() {
        let swap = Tensor::matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = Tensor::matrix(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        assert_eq!(
            t.apply_matrix(&swap, 1).unwrap(),
            Tensor::matrix(&[vec![2.0, 1.0], vec![4.0, 3.0]]).unwrap()
        );
        assert_eq!(
            t.apply_matrix(&swap, 0).unwrap(),
            Tensor::matrix(&[vec![3.0, 4.0], vec![1.0, 2.0]]).unwrap()
        );
        assert_eq!(Tensor::identity(&[]), Tensor::scalar(1.0));
        let id = Tensor::identity(&[2, 3]);
        assert_eq!(id.shape(), &[2, 3, 2, 3]);
        assert_eq!(id.get(&[1, 2, 1, 2]), 1.0);
        assert_eq!(id.get(&[1, 2, 0, 2]), 0.0);
    }

    fn arb_tensor() -> impl Strategy<Value = Tensor> {
        prop::collection::vec(1usize..4, 0..4).prop_flat_map(|shape| {
            let n: usize = shape.iter().product();
            prop::collection::vec(-2.0f64..2.0, n)
                .prop_map(move |data| Tensor::new(shape.clone(), data).unwrap())
        })
    }

    proptest! {
        #[test]
        fn inner_product_via_contraction(v in prop::collection::vec(-3.0f64..3.0, 1..8), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Tensor::vector(v.clone());
            let b = random(&mut rng, vec![v.len()]);
            let c = contract(&tensor_product(&a, &b), 0, 1).unwrap();
            prop_assert!((c.data()[0] - a.inner(&b).unwrap()).abs() < 1e-12);
        }

        #[test]
        fn cosine_properties(v in prop::collection::vec(-3.0f64..3.0, 1..8), seed in any::<u64>(), k in 0.01f64..10.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Tensor::vector(v.clone());
            let b = random(&mut rng, vec![v.len()]);
            let ab = cosine(&a, &b).unwrap().value;
            let ba = cosine(&b, &a).unwrap().value;
            prop_assert!((ab - ba).abs() < 1e-15);
            prop_assert!(ab.abs() <= 1.0 + 1e-12);
            if a.norm() > 1e-9 {
                prop_assert!((cosine(&a, &a.scale(k)).unwrap().value - 1.0).abs() < 1e-12);
            }
        }

        #[test]
        fn permute_matches_nested_loops(t in arb_tensor(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut perm: Vec<usize> = (0..t.rank()).collect();
            for i in (1..perm.len()).rev() {
                perm.swap(i, rng.gen_range(0..=i));
            }
            let p = t.permute(&perm).unwrap();
            for idx in multi_indices(p.shape()) {
                let mut src = vec![0; t.rank()];
                for (k, &ax) in perm.iter().enumerate() {
                    src[ax] = idx[k];
                }
                prop_assert_eq!(p.get(&idx), t.get(&src));
            }
        }

        #[test]
        fn contract_matches_nested_loops(t in arb_tensor(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Force a contractible pair by tensoring with a square matrix.
            let d = rng.gen_range(1..4);
            let m = random(&mut rng, vec![d, d]);
            let big = tensor_product(&t, &m);
            let r = big.rank();
            let (i, j) = (r - 2, r - 1);
            let c = contract(&big, i, j).unwrap();
            for idx in multi_indices(c.shape()) {
                let mut expect = 0.0;
                for k in 0..d {
                    let mut src = idx.clone();
                    src.push(k);
                    src.push(k);
                    expect += big.get(&src);
                }
                prop_assert!((c.get(&idx) - expect).abs() < 1e-12);
            }
            // And a pair straddling the original axes, when shapes allow.
            if t.rank() >= 1 && t.shape()[0] == d {
                let c2 = contract(&big, 0, r - 1).unwrap();
                for idx in multi_indices(c2.shape()) {
                    let mut expect = 0.0;
                    for k in 0..d {
                        let mut src = vec![k];
                        src.extend_from_slice(&idx);
                        src.push(k);
                        expect += big.get(&src);
                    }
                    prop_assert!((c2.get(&idx) - expect).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn product_matches_nested_loops_prop(a in arb_tensor(), b in arb_tensor()) {
            let t = tensor_product(&a, &b);
            for ia in multi_indices(a.shape()) {
                for ib in multi_indices(b.shape()) {
                    let mut idx = ia.clone();
                    idx.extend_from_slice(&ib);
                    prop_assert_eq!(t.get(&idx), a.get(&ia) * b.get(&ib));
                }
            }
        }
    }
}
