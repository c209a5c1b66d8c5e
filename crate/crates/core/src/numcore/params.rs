use std::collections::HashMap;
use std::io::{Read, Write};

use super::tensor::Tensor;
use super::NumError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub usize);

#[derive(Debug, Clone)]
struct Param {
    name: String,
    value: Tensor,
    m: Tensor,
    v: Tensor,
    frozen: bool,
}

/// Named parameters plus Adam moment estimates.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    params: Vec<Param>,
    by_name: HashMap<String, ParamId>,
    step: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig {
            lr: 2e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, value: Tensor) -> Result<ParamId, NumError> {
        if self.by_name.contains_key(name) {
            return Err(NumError::Checkpoint(format!("duplicate parameter name {}", name)));
        }
        let id = ParamId(self.params.len());
        self.params.push(Param {
            name: name.to_string(),
            m: Tensor::zeros(value.shape()),
            v: Tensor::zeros(value.shape()),
            value,
            frozen: false,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    /// Excludes a parameter from optimizer updates (e.g. pretrained embeddings).
    pub fn freeze(&mut self, id: ParamId) {
        self.params[id.0].frozen = true;
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn value(&self, id: ParamId) -> &Tensor {
        &self.params[id.0].value
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.params[id.0].value
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.params[id.0].name
    }

    pub fn id(&self, name: &str) -> Option<ParamId> {
        self.by_name.get(name).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.params.len()).map(ParamId)
    }

    pub fn num_scalars(&self) -> usize {
        self.params.iter().map(|p| p.value.len()).sum()
    }

    /// One bias-corrected Adam update; increments the step counter.
    pub fn adam_step(&mut self, grads: &Gradients, cfg: &AdamConfig) -> Result<(), NumError> {
        for (i, g) in grads.grads.iter().enumerate() {
            if let Some(g) = g {
                if i >= self.params.len() || g.shape() != self.params[i].value.shape() {
                    return Err(NumError::Shape {
                        op: "adam_step",
                        detail: format!("gradient {} has shape {:?}", i, g.shape()),
                    });
                }
            }
        }
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - cfg.beta1.powi(t);
        let bc2 = 1.0 - cfg.beta2.powi(t);
        for (p, g) in self.params.iter_mut().zip(&grads.grads) {
            let g = match g {
                Some(g) if !p.frozen => g,
                _ => continue,
            };
            let data = p.value.data_mut();
            let (m, v) = (p.m.data_mut(), p.v.data_mut());
            for k in 0..data.len() {
                m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g.data()[k];
                v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g.data()[k] * g.data()[k];
                let mhat = m[k] / bc1;
                let vhat = v[k] / bc2;
                data[k] -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
            }
        }
        Ok(())
    }

    /// Writes parameter values in the named-tensor binary format:
    ///
    /// ```text
    /// magic   b"SRLT"
    /// version u32 = 1
    /// count   u32
    /// repeated count times:
    ///   name_len u32, name (UTF-8)
    ///   rank     u32, dims (u64 x rank)
    ///   data     f64 x prod(dims)
    /// ```
    ///
    /// All integers and floats are little-endian.
    pub fn write_checkpoint<W: Write>(&self, mut w: W) -> Result<(), NumError> {
        w.write_all(b"SRLT")?;
        w.write_all(&1u32.to_le_bytes())?;
        w.write_all(&(self.params.len() as u32).to_le_bytes())?;
        for p in &self.params {
            w.write_all(&(p.name.len() as u32).to_le_bytes())?;
            w.write_all(p.name.as_bytes())?;
            w.write_all(&(p.value.rank() as u32).to_le_bytes())?;
            for &d in p.value.shape() {
                w.write_all(&(d as u64).to_le_bytes())?;
            }
            for &x in p.value.data() {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        Ok(())
    }

    /// Reads a checkpoint as an ordered list of named tensors.
    pub fn read_checkpoint<R: Read>(mut r: R) -> Result<Vec<(String, Tensor)>, NumError> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != b"SRLT" {
            return Err(NumError::Checkpoint("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != 1 {
            return Err(NumError::Checkpoint(format!("unsupported version {}", version)));
        }
        let count = read_u32(&mut r)? as usize;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let len = read_u32(&mut r)? as usize;
            let mut name = vec![0u8; len];
            r.read_exact(&mut name)?;
            let name =
                String::from_utf8(name).map_err(|_| NumError::Checkpoint("parameter name is not UTF-8".into()))?;
            let rank = read_u32(&mut r)? as usize;
            let mut dims = Vec::with_capacity(rank);
            for _ in 0..rank {
                let mut b = [0u8; 8];
                r.read_exact(&mut b)?;
                dims.push(u64::from_le_bytes(b) as usize);
            }
            let n: usize = dims.iter().product();
            let mut data = Vec::with_capacity(n);
            for _ in 0..n {
                let mut b = [0u8; 8];
                r.read_exact(&mut b)?;
                data.push(f64::from_le_bytes(b));
            }
            out.push((name, Tensor::new(dims, data)?));
        }
        Ok(out)
    }

    /// Overwrites values from a checkpoint; names and shapes must match exactly.
    pub fn load_values(&mut self, tensors: Vec<(String, Tensor)>) -> Result<(), NumError> {
        if tensors.len() != self.params.len() {
            return Err(NumError::Checkpoint(format!(
                "checkpoint has {} tensors, model has {}",
                tensors.len(),
                self.params.len()
            )));
        }
        for (name, t) in tensors {
            let id = self
                .id(&name)
                .ok_or_else(|| NumError::Checkpoint(format!("unknown parameter {}", name)))?;
            if t.shape() != self.value(id).shape() {
                return Err(NumError::Checkpoint(format!(
                    "{}: shape {:?} vs {:?}",
                    name,
                    t.shape(),
                    self.value(id).shape()
                )));
            }
            self.params[id.0].value = t;
        }
        Ok(())
    }

    /// Snapshot of all parameter values (for best-epoch restoration).
    pub fn snapshot(&self) -> Vec<Tensor> {
        self.params.iter().map(|p| p.value.clone()).collect()
    }

    pub fn restore(&mut self, snapshot: Vec<Tensor>) {
        for (p, v) in self.params.iter_mut().zip(snapshot) {
            p.value = v;
        }
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32, NumError> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

/// Sparse per-parameter gradients.
#[derive(Debug, Clone, Default)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn new(n: usize) -> Self {
        Gradients {
            grads: (0..n).map(|_| None).collect(),
        }
    }

    pub fn accumulate(&mut self, id: ParamId, g: Tensor) {
        if id.0 >= self.grads.len() {
            self.grads.resize(id.0 + 1, None);
        }
        match &mut self.grads[id.0] {
            Some(acc) => acc.add_assign(&g),
            slot => *slot = Some(g),
        }
    }

    pub fn get(&self, id: ParamId) -> Option<&Tensor> {
        self.grads.get(id.0).and_then(Option::as_ref)
    }

    pub fn get_or_zero(&self, store: &ParamStore, id: ParamId) -> Tensor {
        self.get(id)
            .cloned()
            .unwrap_or_else(|| Tensor::zeros(store.value(id).shape()))
    }

    /// Adds `other` into `self`.
    pub fn merge(&mut self, other: Gradients) {
        for (i, g) in other.grads.into_iter().enumerate() {
            if let Some(g) = g {
                self.accumulate(ParamId(i), g);
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        for g in self.grads.iter_mut().flatten() {
            for x in g.data_mut() {
                *x *= c;
            }
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Tensor)> {
        self.grads
            .iter()
            .enumerate()
            .filter_map(|(i, g)| g.as_ref().map(|g| (ParamId(i), g)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_parameters() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::row(vec![0.5, -1.0])).unwrap();
        let mut grads = Gradients::new(1);
        grads.accumulate(w, Tensor::zeros(&[1, 2]));
        store.adam_step(&grads, &AdamConfig::default()).unwrap();
        assert_eq!(store.value(w).data(), &[0.5, -1.0]);
        assert_eq!(store.step(), 1);
    }

    #[test]
    fn first_adam_step_moves_by_learning_rate() {
        // m_hat = g and v_hat = g^2 after bias correction, so the step is lr * g / (|g| + eps).
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(1.0)).unwrap();
        let mut grads = Gradients::new(1);
        grads.accumulate(w, Tensor::scalar(1.0));
        let cfg = AdamConfig {
            lr: 0.1,
            ..AdamConfig::default()
        };
        store.adam_step(&grads, &cfg).unwrap();
        let expected = 1.0 - 0.1 * 1.0 / (1.0 + 1e-8);
        assert!((store.value(w).item() - expected).abs() < 1e-15);
    }

    #[test]
    fn adam_rejects_misaligned_gradients() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(1.0)).unwrap();
        let mut grads = Gradients::new(1);
        grads.accumulate(w, Tensor::zeros(&[1, 2]));
        assert!(store.adam_step(&grads, &AdamConfig::default()).is_err());
    }

    #[test]
    fn frozen_parameters_do_not_move() {
        let mut store = ParamStore::new();
        let w = store.add("w", Tensor::scalar(1.0)).unwrap();
        store.freeze(w);
        let mut grads = Gradients::new(1);
        grads.accumulate(w, Tensor::scalar(3.0));
        store.adam_step(&grads, &AdamConfig::default()).unwrap();
        assert_eq!(store.value(w).item(), 1.0);
    }

    #[test]
    fn checkpoint_layout_is_stable() {
        let mut store = ParamStore::new();
        store
            .add("ab", Tensor::new(vec![1, 2, 1], vec![1.0, -2.5]).unwrap())
            .unwrap();
        let mut buf = Vec::new();
        store.write_checkpoint(&mut buf).unwrap();
        let mut expected = b"SRLT".to_vec();
        expected.extend(1u32.to_le_bytes());
        expected.extend(1u32.to_le_bytes());
        expected.extend(2u32.to_le_bytes());
        expected.extend(b"ab");
        expected.extend(3u32.to_le_bytes());
        for d in [1u64, 2, 1] {
            expected.extend(d.to_le_bytes());
        }
        expected.extend(1.0f64.to_le_bytes());
        expected.extend((-2.5f64).to_le_bytes());
        assert_eq!(buf, expected);

        let back = ParamStore::read_checkpoint(&buf[..]).unwrap();
        assert_eq!(back[0].0, "ab");
        assert_eq!(back[0].1.shape(), &[1, 2, 1]);
        let mut other = store.clone();
        other.value_mut(ParamId(0)).data_mut()[0] = 9.0;
        other.load_values(back).unwrap();
        assert_eq!(other.value(ParamId(0)).data(), &[1.0, -2.5]);
    }
}
