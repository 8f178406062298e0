//! Parameter storage shared across forward/backward runs.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use ndarray::{ArrayD, IxDyn};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::{NnError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(pub(crate) usize);

/// Named parameter arrays with gradients and a trainable flag. Buffers such
/// as normalization running statistics are stored here too, permanently
/// non-trainable.
#[derive(Debug, Clone, Default)]
pub struct ParamStore {
    names: Vec<String>,
    values: Vec<Arc<ArrayD<f32>>>,
    grads: Vec<ArrayD<f32>>,
    trainable: Vec<bool>,
    /// Buffers never participate in optimization or freezing toggles.
    buffer: Vec<bool>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, value: ArrayD<f32>) -> ParamId {
        let id = ParamId(self.values.len());
        self.grads.push(ArrayD::zeros(value.raw_dim()));
        self.values.push(Arc::new(value));
        self.names.push(name.to_string());
        self.trainable.push(true);
        self.buffer.push(false);
        id
    }

    pub fn add_buffer(&mut self, name: &str, value: ArrayD<f32>) -> ParamId {
        let id = self.add(name, value);
        self.trainable[id.0] = false;
        self.buffer[id.0] = true;
        id
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn value(&self, id: ParamId) -> &Arc<ArrayD<f32>> {
        &self.values[id.0]
    }

    pub fn value_mut(&mut self, id: ParamId) -> &mut ArrayD<f32> {
        Arc::make_mut(&mut self.values[id.0])
    }

    pub fn grad(&self, id: ParamId) -> &ArrayD<f32> {
        &self.grads[id.0]
    }

    pub fn is_trainable(&self, id: ParamId) -> bool {
        self.trainable[id.0]
    }

    pub fn is_buffer(&self, id: ParamId) -> bool {
        self.buffer[id.0]
    }

    pub fn set_trainable(&mut self, id: ParamId, trainable: bool) {
        if !self.buffer[id.0] {
            self.trainable[id.0] = trainable;
        }
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> + '_ {
        (0..self.values.len()).map(ParamId)
    }

    pub fn trainable_ids(&self) -> Vec<ParamId> {
        self.ids().filter(|&id| self.trainable[id.0]).collect()
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.fill(0.0);
        }
    }

    pub fn accumulate_grad(&mut self, id: ParamId, grad: &ArrayD<f32>) {
        self.grads[id.0] += grad;
    }

    pub fn trainable_param_count(&self) -> usize {
        self.ids()
            .filter(|&id| self.trainable[id.0])
            .map(|id| self.values[id.0].len())
            .sum()
    }

    /// Sum of squared trainable weights, accumulated in f64.
    pub fn sum_squared_trainable(&self) -> f64 {
        self.ids()
            .filter(|&id| self.trainable[id.0])
            .map(|id| self.values[id.0].iter().map(|&v| f64::from(v) * f64::from(v)).sum::<f64>())
            .sum()
    }

    /// Serializes all parameters (including buffers) to a single file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
        file.write_all(b"SVRKPAR1")?;
        file.write_all(&(self.values.len() as u64).to_le_bytes())?;
        for id in self.ids() {
            let name = self.names[id.0].as_bytes();
            file.write_all(&(name.len() as u32).to_le_bytes())?;
            file.write_all(name)?;
            let value = &self.values[id.0];
            file.write_all(&(value.ndim() as u32).to_le_bytes())?;
            for &d in value.shape() {
                file.write_all(&(d as u64).to_le_bytes())?;
            }
            for &v in value.iter() {
                file.write_all(&v.to_le_bytes())?;
            }
        }
        file.flush()?;
        Ok(())
    }

    /// Loads parameters saved by [`ParamStore::save`] into this store.
    /// Names and shapes must match exactly.
    pub fn load(&mut self, path: &Path) -> Result<()> {
        let mut file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut magic = [0u8; 8];
        file.read_exact(&mut magic)?;
        if &magic != b"SVRKPAR1" {
            return Err(NnError::Validation("not a parameter file".into()));
        }
        let mut u64buf = [0u8; 8];
        file.read_exact(&mut u64buf)?;
        let count = u64::from_le_bytes(u64buf) as usize;
        if count != self.values.len() {
            return Err(NnError::Validation(format!(
                "parameter count mismatch: file has {count}, store has {}",
                self.values.len()
            )));
        }
        for id in (0..count).map(ParamId) {
            let mut u32buf = [0u8; 4];
            file.read_exact(&mut u32buf)?;
            let name_len = u32::from_le_bytes(u32buf) as usize;
            let mut name = vec![0u8; name_len];
            file.read_exact(&mut name)?;
            let name = String::from_utf8(name)
                .map_err(|_| NnError::Validation("bad parameter name".into()))?;
            if name != self.names[id.0] {
                return Err(NnError::Validation(format!(
                    "parameter name mismatch at {}: file {name:?}, store {:?}",
                    id.0, self.names[id.0]
                )));
            }
            file.read_exact(&mut u32buf)?;
            let ndim = u32::from_le_bytes(u32buf) as usize;
            let mut shape = Vec::with_capacity(ndim);
            for _ in 0..ndim {
                file.read_exact(&mut u64buf)?;
                shape.push(u64::from_le_bytes(u64buf) as usize);
            }
            if shape != self.values[id.0].shape() {
                return Err(NnError::Validation(format!(
                    "shape mismatch for {name}: file {shape:?}, store {:?}",
                    self.values[id.0].shape()
                )));
            }
            let len: usize = shape.iter().product();
            let mut data = vec![0f32; len];
            let mut f32buf = [0u8; 4];
            for v in &mut data {
                file.read_exact(&mut f32buf)?;
                *v = f32::from_le_bytes(f32buf);
            }
            self.values[id.0] = Arc::new(
                ArrayD::from_shape_vec(IxDyn(&shape), data)
                    .map_err(|e| NnError::Validation(e.to_string()))?,
            );
        }
        Ok(())
    }
}

/// Truncated normal initialization (resampled beyond two standard
/// deviations), the convention for transformer embeddings and heads.
pub fn trunc_normal(rng: &mut ChaCha8Rng, shape: &[usize], std: f32) -> ArrayD<f32> {
    ArrayD::from_shape_fn(IxDyn(shape), |_| loop {
        // Box-Muller.
        let u1: f32 = rng.random_range(f32::EPSILON..1.0);
        let u2: f32 = rng.random_range(0.0..1.0);
        let z = (-2.0 * u1.ln()).sqrt() * (2.0 * std::f32::consts::PI * u2).cos();
        if z.abs() <= 2.0 {
            return z * std;
        }
    })
}

/// Kaiming-style fan-in scaled uniform init for convolution and linear
/// weights.
pub fn kaiming_uniform(rng: &mut ChaCha8Rng, shape: &[usize], fan_in: usize) -> ArrayD<f32> {
    let bound = (6.0 / fan_in as f32).sqrt();
    ArrayD::from_shape_fn(IxDyn(shape), |_| rng.random_range(-bound..bound))
}

pub fn zeros(shape: &[usize]) -> ArrayD<f32> {
    ArrayD::zeros(IxDyn(shape))
}

pub fn ones(shape: &[usize]) -> ArrayD<f32> {
    ArrayD::ones(IxDyn(shape))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn grads_start_zero_and_accumulate() {
        let mut store = ParamStore::new();
        let id = store.add("w", zeros(&[2, 2]));
        assert!(store.grad(id).iter().all(|&g| g == 0.0));
        store.accumulate_grad(id, &ArrayD::ones(IxDyn(&[2, 2])));
        store.accumulate_grad(id, &ArrayD::ones(IxDyn(&[2, 2])));
        assert!(store.grad(id).iter().all(|&g| g == 2.0));
        store.zero_grads();
        assert!(store.grad(id).iter().all(|&g| g == 0.0));
    }

    #[test]
    fn buffers_cannot_become_trainable() {
        let mut store = ParamStore::new();
        let b = store.add_buffer("running_mean", zeros(&[4]));
        store.set_trainable(b, true);
        assert!(!store.is_trainable(b));
    }

    #[test]
    fn save_load_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("params.bin");

        let mut store = ParamStore::new();
        store.add("a", trunc_normal(&mut rng, &[3, 5], 0.02));
        store.add("b", kaiming_uniform(&mut rng, &[7], 7));
        store.save(&path).unwrap();

        let mut reloaded = ParamStore::new();
        reloaded.add("a", zeros(&[3, 5]));
        reloaded.add("b", zeros(&[7]));
        reloaded.load(&path).unwrap();
        for (id_a, id_b) in store.ids().zip(reloaded.ids()) {
            assert_eq!(store.value(id_a).as_ref(), reloaded.value(id_b).as_ref());
        }

        // Mismatched shape is rejected.
        let mut wrong = ParamStore::new();
        wrong.add("a", zeros(&[3, 4]));
        wrong.add("b", zeros(&[7]));
        assert!(wrong.load(&path).is_err());
    }

    #[test]
    fn trunc_normal_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let arr = trunc_normal(&mut rng, &[1000], 0.02);
        assert!(arr.iter().all(|&v| v.abs() <= 0.04 + 1e-6));
        let mean: f32 = arr.iter().sum::<f32>() / 1000.0;
        assert!(mean.abs() < 0.005, "mean {mean}");
    }
}
