//! Tape-based reverse-mode differentiation over [`Tensor`] values.
//!
//! A [`Graph`] records every primitive applied during the forward pass.
//! Nodes are appended in evaluation order, so the tape is already a
//! topological order and [`Graph::backward`] is a single reverse sweep.
//! Parameters are referenced from a borrowed [`ParamStore`] rather than
//! copied into the tape.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::params::{Gradients, ParamId, ParamStore};
use super::tensor::Tensor;
use super::NumError;

/// Handle to a node on a [`Graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Rows,
    Cols,
}

enum Value {
    Owned(Tensor),
    Param(ParamId),
}

enum Op {
    Leaf,
    Param,
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    AddRow(Var, Var),
    ScaleRows(Var, Var),
    MatMul(Var, Var),
    Transpose(Var),
    Reshape(Var),
    Concat(Vec<Var>, Axis),
    Slice(Var, Axis, usize),
    SumAll(Var),
    Sum(Var, Axis),
    Sigmoid(Var),
    Tanh(Var),
    Relu(Var),
    Log(Var),
    Softmax(Var, Axis),
    Dropout(Var, Vec<f64>),
    Gather(Var, Vec<usize>),
    MaxPool(Var, Vec<usize>),
    CrossEntropy(Var, Vec<usize>, Tensor),
    BceWithLogits(Var, Vec<f64>),
}

struct Node {
    value: Value,
    op: Op,
    requires_grad: bool,
}

/// One forward computation. Single-writer; drop it after `backward`.
pub struct Graph<'s> {
    store: &'s ParamStore,
    nodes: Vec<Node>,
    train: bool,
    rng: ChaCha8Rng,
}

fn shape_err(op: &'static str, detail: String) -> NumError {
    NumError::Shape { op, detail }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl<'s> Graph<'s> {
    /// Evaluation-mode graph: dropout is the identity.
    pub fn new(store: &'s ParamStore) -> Self {
        Graph {
            store,
            nodes: Vec::new(),
            train: false,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    /// Training-mode graph with a seeded dropout stream.
    pub fn training(store: &'s ParamStore, seed: u64) -> Self {
        Graph {
            store,
            nodes: Vec::new(),
            train: true,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn is_training(&self) -> bool {
        self.train
    }

    pub fn store(&self) -> &'s ParamStore {
        self.store
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        match &self.nodes[v.0].value {
            Value::Owned(t) => t,
            Value::Param(id) => self.store.value(*id),
        }
    }

    fn push(&mut self, value: Tensor, op: Op, inputs: &[Var]) -> Var {
        let requires_grad = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node {
            value: Value::Owned(value),
            op,
            requires_grad,
        });
        Var(self.nodes.len() - 1)
    }

    /// A constant input (no gradient).
    pub fn constant(&mut self, t: Tensor) -> Var {
        self.nodes.push(Node {
            value: Value::Owned(t),
            op: Op::Leaf,
            requires_grad: false,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, id: ParamId) -> Var {
        self.nodes.push(Node {
            value: Value::Param(id),
            op: Op::Param,
            requires_grad: true,
        });
        Var(self.nodes.len() - 1)
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<(), NumError> {
        let (sa, sb) = (self.value(a).shape(), self.value(b).shape());
        if sa != sb {
            return Err(shape_err(op, format!("{:?} vs {:?}", sa, sb)));
        }
        Ok(())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        self.same_shape("add", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x + y);
        Ok(self.push(out, Op::Add(a, b), &[a, b]))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        self.same_shape("sub", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x - y);
        Ok(self.push(out, Op::Sub(a, b), &[a, b]))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        self.same_shape("mul", a, b)?;
        let out = self.value(a).zip_map(self.value(b), |x, y| x * y);
        Ok(self.push(out, Op::Mul(a, b), &[a, b]))
    }

    pub fn scale(&mut self, a: Var, c: f64) -> Var {
        let out = self.value(a).map(|x| x * c);
        self.push(out, Op::Scale(a, c), &[a])
    }

    /// Bias add: `a` is m x c, `row` is 1 x c.
    pub fn add_row(&mut self, a: Var, row: Var) -> Result<Var, NumError> {
        let (ta, tr) = (self.value(a), self.value(row));
        if ta.rank() != 2 || tr.rows() != 1 || tr.cols() != ta.cols() {
            return Err(shape_err("add_row", format!("{:?} + row {:?}", ta.shape(), tr.shape())));
        }
        let c = ta.cols();
        let mut out = ta.clone();
        for (i, x) in out.data_mut().iter_mut().enumerate() {
            *x += tr.data()[i % c];
        }
        Ok(self.push(out, Op::AddRow(a, row), &[a, row]))
    }

    /// Multiplies row `i` of `a` (m x c) by `s[i]` (s is m x 1).
    pub fn scale_rows(&mut self, a: Var, s: Var) -> Result<Var, NumError> {
        let (ta, ts) = (self.value(a), self.value(s));
        if ta.rank() != 2 || ts.shape() != [ta.rows(), 1] {
            return Err(shape_err("scale_rows", format!("{:?} by {:?}", ta.shape(), ts.shape())));
        }
        let c = ta.cols();
        let mut out = ta.clone();
        for (i, x) in out.data_mut().iter_mut().enumerate() {
            *x *= ts.data()[i / c];
        }
        Ok(self.push(out, Op::ScaleRows(a, s), &[a, s]))
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var, NumError> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.cols() != tb.rows() {
            return Err(shape_err("matmul", format!("{:?} x {:?}", ta.shape(), tb.shape())));
        }
        let out = ta.matmul(tb);
        Ok(self.push(out, Op::MatMul(a, b), &[a, b]))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let out = self.value(a).transpose();
        self.push(out, Op::Transpose(a), &[a])
    }

    pub fn reshape(&mut self, a: Var, shape: &[usize]) -> Result<Var, NumError> {
        let out = self.value(a).clone().reshaped(shape)?;
        Ok(self.push(out, Op::Reshape(a), &[a]))
    }

    pub fn concat(&mut self, parts: &[Var], axis: Axis) -> Result<Var, NumError> {
        if parts.is_empty() {
            return Err(shape_err("concat", "no inputs".into()));
        }
        let shapes: Vec<(usize, usize)> = parts
            .iter()
            .map(|&p| (self.value(p).rows(), self.value(p).cols()))
            .collect();
        let out = match axis {
            Axis::Rows => {
                let c = shapes[0].1;
                if shapes.iter().any(|s| s.1 != c) {
                    return Err(shape_err("concat", format!("rows of {:?}", shapes)));
                }
                let mut data = Vec::new();
                for &p in parts {
                    data.extend_from_slice(self.value(p).data());
                }
                Tensor::matrix(data.len() / c.max(1), c, data)?
            }
            Axis::Cols => {
                let r = shapes[0].0;
                if shapes.iter().any(|s| s.0 != r) {
                    return Err(shape_err("concat", format!("cols of {:?}", shapes)));
                }
                let total: usize = shapes.iter().map(|s| s.1).sum();
                let mut data = Vec::with_capacity(r * total);
                for i in 0..r {
                    for &p in parts {
                        data.extend_from_slice(self.value(p).row_slice(i));
                    }
                }
                Tensor::matrix(r, total, data)?
            }
        };
        Ok(self.push(out, Op::Concat(parts.to_vec(), axis), parts))
    }

    /// Contiguous slice `[start, start + len)` along `axis`.
    pub fn slice(&mut self, a: Var, axis: Axis, start: usize, len: usize) -> Result<Var, NumError> {
        let t = self.value(a);
        let (r, c) = (t.rows(), t.cols());
        let out = match axis {
            Axis::Rows => {
                if start + len > r || len == 0 {
                    return Err(shape_err("slice", format!("rows {}+{} of {:?}", start, len, t.shape())));
                }
                Tensor::matrix(len, c, t.data()[start * c..(start + len) * c].to_vec())?
            }
            Axis::Cols => {
                if start + len > c || len == 0 {
                    return Err(shape_err("slice", format!("cols {}+{} of {:?}", start, len, t.shape())));
                }
                let mut data = Vec::with_capacity(r * len);
                for i in 0..r {
                    data.extend_from_slice(&t.row_slice(i)[start..start + len]);
                }
                Tensor::matrix(r, len, data)?
            }
        };
        Ok(self.push(out, Op::Slice(a, axis, start), &[a]))
    }

    /// Single row `i` as a 1 x c matrix.
    pub fn row(&mut self, a: Var, i: usize) -> Result<Var, NumError> {
        self.slice(a, Axis::Rows, i, 1)
    }

    /// Sum of all entries as a 1 x 1 scalar.
    pub fn sum_all(&mut self, a: Var) -> Var {
        let out = Tensor::scalar(self.value(a).sum());
        self.push(out, Op::SumAll(a), &[a])
    }

    /// Sum along an axis: `Rows` collapses rows (result 1 x c), `Cols` collapses columns (m x 1).
    pub fn sum(&mut self, a: Var, axis: Axis) -> Var {
        let t = self.value(a);
        let (r, c) = (t.rows(), t.cols());
        let out = match axis {
            Axis::Rows => {
                let mut acc = vec![0.0; c];
                for i in 0..r {
                    for (s, x) in acc.iter_mut().zip(t.row_slice(i)) {
                        *s += x;
                    }
                }
                Tensor::row(acc)
            }
            Axis::Cols => {
                let acc: Vec<f64> = (0..r).map(|i| t.row_slice(i).iter().sum()).collect();
                Tensor::matrix(r, 1, acc).expect("column sum")
            }
        };
        self.push(out, Op::Sum(a, axis), &[a])
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.value(a).map(sigmoid);
        self.push(out, Op::Sigmoid(a), &[a])
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.value(a).map(f64::tanh);
        self.push(out, Op::Tanh(a), &[a])
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let out = self.value(a).map(|x| x.max(0.0));
        self.push(out, Op::Relu(a), &[a])
    }

    pub fn log(&mut self, a: Var) -> Var {
        let out = self.value(a).map(f64::ln);
        self.push(out, Op::Log(a), &[a])
    }

    /// Softmax along `axis`: `Cols` normalizes each row, `Rows` each column.
    pub fn softmax(&mut self, a: Var, axis: Axis) -> Var {
        let t = self.value(a);
        let out = match axis {
            Axis::Cols => softmax_rows(t),
            Axis::Rows => softmax_rows(&t.transpose()).transpose(),
        };
        self.push(out, Op::Softmax(a, axis), &[a])
    }

    /// Inverted dropout; identity outside training or when `keep >= 1`.
    pub fn dropout(&mut self, a: Var, keep: f64) -> Var {
        if !self.train || keep >= 1.0 {
            return a;
        }
        let n = self.value(a).len();
        let mask: Vec<f64> = (0..n)
            .map(|_| if self.rng.gen::<f64>() < keep { 1.0 / keep } else { 0.0 })
            .collect();
        let out = self.value(a).zip_map(&Tensor::row(mask.clone()), |x, m| x * m);
        self.push(out, Op::Dropout(a, mask), &[a])
    }

    /// Row gather (embedding lookup): output row `i` is `table[ids[i]]`.
    pub fn gather(&mut self, table: Var, ids: &[usize]) -> Result<Var, NumError> {
        let t = self.value(table);
        let (r, c) = (t.rows(), t.cols());
        if ids.is_empty() {
            return Err(shape_err("gather", "empty index list".into()));
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= r) {
            return Err(shape_err("gather", format!("index {} of {:?}", bad, t.shape())));
        }
        let mut data = Vec::with_capacity(ids.len() * c);
        for &i in ids {
            data.extend_from_slice(t.row_slice(i));
        }
        let out = Tensor::matrix(ids.len(), c, data)?;
        Ok(self.push(out, Op::Gather(table, ids.to_vec()), &[table]))
    }

    /// Column-wise max over rows (max-pool over time), 1 x c.
    pub fn max_pool(&mut self, a: Var) -> Var {
        let t = self.value(a);
        let (r, c) = (t.rows(), t.cols());
        let mut arg = vec![0usize; c];
        let mut best = t.row_slice(0).to_vec();
        for i in 1..r {
            for (j, &x) in t.row_slice(i).iter().enumerate() {
                if x > best[j] {
                    best[j] = x;
                    arg[j] = i;
                }
            }
        }
        self.push(Tensor::row(best), Op::MaxPool(a, arg), &[a])
    }

    /// Mean softmax cross-entropy of `logits` (m x K) against class ids.
    pub fn cross_entropy(&mut self, logits: Var, targets: &[usize]) -> Result<Var, NumError> {
        let t = self.value(logits);
        if targets.len() != t.rows() || targets.iter().any(|&y| y >= t.cols()) {
            return Err(shape_err(
                "cross_entropy",
                format!("{} targets for {:?}", targets.len(), t.shape()),
            ));
        }
        let probs = softmax_rows(t);
        let mut loss = 0.0;
        for (i, &y) in targets.iter().enumerate() {
            let row = t.row_slice(i);
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = mx + row.iter().map(|x| (x - mx).exp()).sum::<f64>().ln();
            loss += lse - row[y];
        }
        let loss = loss / targets.len() as f64;
        Ok(self.push(
            Tensor::scalar(loss),
            Op::CrossEntropy(logits, targets.to_vec(), probs),
            &[logits],
        ))
    }

    /// Mean binary cross-entropy with logits; `x` is m x 1.
    pub fn bce_with_logits(&mut self, x: Var, targets: &[f64]) -> Result<Var, NumError> {
        let t = self.value(x);
        if t.len() != targets.len() || targets.is_empty() {
            return Err(shape_err(
                "bce_with_logits",
                format!("{} targets for {:?}", targets.len(), t.shape()),
            ));
        }
        let m = targets.len() as f64;
        let loss: f64 = t
            .data()
            .iter()
            .zip(targets)
            .map(|(&z, &y)| z.max(0.0) - z * y + (-z.abs()).exp().ln_1p())
            .sum::<f64>()
            / m;
        Ok(self.push(Tensor::scalar(loss), Op::BceWithLogits(x, targets.to_vec()), &[x]))
    }

    /// Reverse sweep from a scalar loss. Returns gradients for every
    /// parameter reached; parameters that did not contribute are absent
    /// (read as zero through [`Gradients::get_or_zero`]).
    pub fn backward(&self, loss: Var) -> Result<Gradients, NumError> {
        if self.value(loss).len() != 1 {
            return Err(NumError::NonScalarLoss(self.value(loss).shape().to_vec()));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::filled(self.value(loss).shape(), 1.0));
        let mut out = Gradients::new(self.store.len());

        for idx in (0..=loss.0).rev() {
            let g = match grads[idx].take() {
                Some(g) => g,
                None => continue,
            };
            let node = &self.nodes[idx];
            if !node.requires_grad {
                continue;
            }
            let y = match &node.value {
                Value::Owned(t) => t,
                Value::Param(id) => {
                    out.accumulate(*id, g);
                    continue;
                }
            };
            let mut send = |v: Var, t: Tensor| {
                if !self.nodes[v.0].requires_grad {
                    return;
                }
                match &mut grads[v.0] {
                    Some(acc) => acc.add_assign(&t),
                    slot => *slot = Some(t),
                }
            };
            match &node.op {
                Op::Leaf | Op::Param => {}
                Op::Add(a, b) => {
                    send(*a, g.clone());
                    send(*b, g);
                }
                Op::Sub(a, b) => {
                    send(*b, g.map(|x| -x));
                    send(*a, g);
                }
                Op::Mul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    send(*a, g.zip_map(tb, |x, y| x * y));
                    send(*b, g.zip_map(ta, |x, y| x * y));
                }
                Op::Scale(a, c) => send(*a, g.map(|x| x * c)),
                Op::AddRow(a, row) => {
                    let c = g.cols();
                    let mut acc = vec![0.0; c];
                    for (i, x) in g.data().iter().enumerate() {
                        acc[i % c] += x;
                    }
                    send(*row, Tensor::row(acc).reshaped(self.value(*row).shape())?);
                    send(*a, g);
                }
                Op::ScaleRows(a, s) => {
                    let (ta, ts) = (self.value(*a), self.value(*s));
                    let c = ta.cols();
                    let mut ga = g.clone();
                    let mut gs = vec![0.0; ta.rows()];
                    for (i, x) in ga.data_mut().iter_mut().enumerate() {
                        gs[i / c] += *x * ta.data()[i];
                        *x *= ts.data()[i / c];
                    }
                    send(*a, ga);
                    send(*s, Tensor::matrix(gs.len(), 1, gs)?);
                }
                Op::MatMul(a, b) => {
                    let (ta, tb) = (self.value(*a), self.value(*b));
                    if self.nodes[a.0].requires_grad {
                        send(*a, g.matmul_t(tb).reshaped(ta.shape())?);
                    }
                    if self.nodes[b.0].requires_grad {
                        let ga = Tensor::matrix(ta.rows(), ta.cols(), ta.data().to_vec())?;
                        send(*b, ga.t_matmul(&g).reshaped(tb.shape())?);
                    }
                }
                Op::Transpose(a) => send(*a, g.transpose()),
                Op::Reshape(a) => {
                    let shape = self.value(*a).shape().to_vec();
                    send(*a, g.reshaped(&shape)?);
                }
                Op::Concat(parts, axis) => {
                    let mut offset = 0;
                    for &p in parts {
                        let tp = self.value(p);
                        let (r, c) = (tp.rows(), tp.cols());
                        let piece = match axis {
                            Axis::Rows => Tensor::matrix(r, c, g.data()[offset * c..(offset + r) * c].to_vec())?,
                            Axis::Cols => {
                                let mut data = Vec::with_capacity(r * c);
                                for i in 0..r {
                                    data.extend_from_slice(&g.row_slice(i)[offset..offset + c]);
                                }
                                Tensor::matrix(r, c, data)?
                            }
                        };
                        offset += match axis {
                            Axis::Rows => r,
                            Axis::Cols => c,
                        };
                        send(p, piece.reshaped(tp.shape())?);
                    }
                }
                Op::Slice(a, axis, start) => {
                    let ta = self.value(*a);
                    let (r, c) = (ta.rows(), ta.cols());
                    let mut ga = Tensor::zeros(&[r, c]);
                    match axis {
                        Axis::Rows => ga.data_mut()[start * c..start * c + g.len()].copy_from_slice(g.data()),
                        Axis::Cols => {
                            let w = g.cols();
                            for i in 0..r {
                                ga.data_mut()[i * c + start..i * c + start + w].copy_from_slice(g.row_slice(i));
                            }
                        }
                    }
                    send(*a, ga.reshaped(ta.shape())?);
                }
                Op::SumAll(a) => send(*a, Tensor::filled(self.value(*a).shape(), g.item())),
                Op::Sum(a, axis) => {
                    let ta = self.value(*a);
                    let c = ta.cols();
                    let mut ga = Tensor::zeros(ta.shape());
                    for (i, x) in ga.data_mut().iter_mut().enumerate() {
                        *x = match axis {
                            Axis::Rows => g.data()[i % c],
                            Axis::Cols => g.data()[i / c],
                        };
                    }
                    send(*a, ga);
                }
                Op::Sigmoid(a) => send(*a, g.zip_map(y, |d, s| d * s * (1.0 - s))),
                Op::Tanh(a) => send(*a, g.zip_map(y, |d, t| d * (1.0 - t * t))),
                Op::Relu(a) => send(*a, g.zip_map(self.value(*a), |d, x| if x > 0.0 { d } else { 0.0 })),
                Op::Log(a) => send(*a, g.zip_map(self.value(*a), |d, x| d / x)),
                Op::Softmax(a, axis) => {
                    let grad_rows = |g: &Tensor, y: &Tensor| {
                        let mut out = g.clone();
                        for i in 0..y.rows() {
                            let yr = y.row_slice(i);
                            let gr = g.row_slice(i);
                            let dot: f64 = yr.iter().zip(gr).map(|(a, b)| a * b).sum();
                            for j in 0..yr.len() {
                                out.set(i, j, yr[j] * (gr[j] - dot));
                            }
                        }
                        out
                    };
                    let ga = match axis {
                        Axis::Cols => grad_rows(&g, y),
                        Axis::Rows => grad_rows(&g.transpose(), &y.transpose()).transpose(),
                    };
                    send(*a, ga);
                }
                Op::Dropout(a, mask) => {
                    let mut ga = g;
                    for (x, m) in ga.data_mut().iter_mut().zip(mask) {
                        *x *= m;
                    }
                    send(*a, ga);
                }
                Op::Gather(table, ids) => {
                    let tt = self.value(*table);
                    let c = tt.cols();
                    let mut ga = Tensor::zeros(tt.shape());
                    for (row, &i) in ids.iter().enumerate() {
                        let dst = &mut ga.data_mut()[i * c..(i + 1) * c];
                        for (d, s) in dst.iter_mut().zip(g.row_slice(row)) {
                            *d += s;
                        }
                    }
                    send(*table, ga);
                }
                Op::MaxPool(a, arg) => {
                    let ta = self.value(*a);
                    let mut ga = Tensor::zeros(ta.shape());
                    for (j, &i) in arg.iter().enumerate() {
                        ga.set(i, j, g.data()[j]);
                    }
                    send(*a, ga);
                }
                Op::CrossEntropy(logits, targets, probs) => {
                    let scale = g.item() / targets.len() as f64;
                    let mut ga = probs.clone();
                    for (i, &t) in targets.iter().enumerate() {
                        let v = ga.get(i, t);
                        ga.set(i, t, v - 1.0);
                    }
                    send(*logits, ga.map(|x| x * scale));
                }
                Op::BceWithLogits(x, targets) => {
                    let tx = self.value(*x);
                    let scale = g.item() / targets.len() as f64;
                    let mut ga = tx.clone();
                    for (z, &t) in ga.data_mut().iter_mut().zip(targets) {
                        *z = (sigmoid(*z) - t) * scale;
                    }
                    send(*x, ga);
                }
            }
        }
        Ok(out)
    }
}

/// Row-wise numerically stable softmax.
pub fn softmax_rows(t: &Tensor) -> Tensor {
    let mut out = t.clone();
    let c = t.cols();
    if c == 0 {
        return out;
    }
    for row in out.data_mut().chunks_mut(c) {
        let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut z = 0.0;
        for x in row.iter_mut() {
            *x = (*x - mx).exp();
            z += *x;
        }
        for x in row.iter_mut() {
            *x /= z;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store_with(values: &[(&str, Tensor)]) -> (ParamStore, Vec<ParamId>) {
        let mut store = ParamStore::new();
        let ids = values.iter().map(|(n, t)| store.add(n, t.clone()).unwrap()).collect();
        (store, ids)
    }

    #[test]
    fn relu_forward() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let x = g.constant(Tensor::row(vec![-1.0, 2.0]));
        let y = g.relu(x);
        assert_eq!(g.value(y).data(), &[0.0, 2.0]);
    }

    #[test]
    fn softmax_of_zeros_is_uniform() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let x = g.constant(Tensor::row(vec![0.0, 0.0]));
        let y = g.softmax(x, Axis::Cols);
        assert_eq!(g.value(y).data(), &[0.5, 0.5]);
    }

    #[test]
    fn matmul_matches_triple_loop() {
        let a = Tensor::matrix(2, 3, vec![0.3, -1.2, 2.0, 0.7, 0.1, -0.4]).unwrap();
        let b = Tensor::matrix(3, 1, vec![1.5, -0.25, 0.8]).unwrap();
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let (va, vb) = (g.constant(a.clone()), g.constant(b.clone()));
        let c = g.matmul(va, vb).unwrap();
        for i in 0..2 {
            let mut naive = 0.0;
            for k in 0..3 {
                naive += a.get(i, k) * b.get(k, 0);
            }
            assert!((g.value(c).get(i, 0) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn square_sum_gradient_is_twice_w() {
        let (store, ids) = store_with(&[("w", Tensor::row(vec![1.0, 2.0])), ("unused", Tensor::row(vec![3.0]))]);
        let mut g = Graph::new(&store);
        let w = g.param(ids[0]);
        let sq = g.mul(w, w).unwrap();
        let loss = g.sum_all(sq);
        let grads = g.backward(loss).unwrap();
        assert_eq!(grads.get(ids[0]).unwrap().data(), &[2.0, 4.0]);
        assert_eq!(grads.get_or_zero(&store, ids[1]).data(), &[0.0]);
    }

    #[test]
    fn shape_errors_name_the_primitive() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let a = g.constant(Tensor::zeros(&[2, 3]));
        let b = g.constant(Tensor::zeros(&[2, 3]));
        let err = g.matmul(a, b).unwrap_err().to_string();
        assert!(err.contains("matmul") && err.contains("[2, 3]"), "{}", err);
        let c = g.constant(Tensor::zeros(&[3, 2]));
        assert!(g.add(a, c).unwrap_err().to_string().contains("add"));
    }

    #[test]
    fn non_scalar_loss_rejected() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let a = g.constant(Tensor::zeros(&[2, 2]));
        assert!(matches!(g.backward(a), Err(NumError::NonScalarLoss(_))));
    }

    #[test]
    fn dropout_is_identity_in_eval_and_preserves_mean_in_training() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let x = g.constant(Tensor::filled(&[1, 4], 3.0));
        let y = g.dropout(x, 0.8);
        assert_eq!(g.value(y), g.value(x));

        let mut g = Graph::training(&store, 11);
        let x = g.constant(Tensor::filled(&[1, 200_000], 1.0));
        let y = g.dropout(x, 0.8);
        let mean = g.value(y).sum() / 200_000.0;
        assert!((mean - 1.0).abs() < 0.01, "mean {}", mean);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let t = Tensor::matrix(2, 3, vec![1.0, 2.0, 3.0, -50.0, 0.0, 80.0]).unwrap();
        let s = softmax_rows(&t);
        for r in 0..2 {
            let total: f64 = s.row_slice(r).iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn uniform_cross_entropy_is_log_k() {
        let store = ParamStore::new();
        let mut g = Graph::new(&store);
        let x = g.constant(Tensor::zeros(&[3, 5]));
        let l = g.cross_entropy(x, &[0, 4, 2]).unwrap();
        assert!((g.value(l).item() - 5f64.ln()).abs() < 1e-12);
        let y = g.constant(Tensor::matrix(1, 3, vec![0.0, 60.0, 0.0]).unwrap());
        let l = g.cross_entropy(y, &[1]).unwrap();
        assert!(g.value(l).item() < 1e-20);
    }
}
