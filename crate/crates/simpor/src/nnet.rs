//! Small feed-forward classifier trained from scratch.
//!
//! ReLU hidden layers, softmax output, categorical cross-entropy loss, Adam
//! updates on shuffled mini-batches, a multiplicative learning-rate decay on
//! loss plateaus, and optional early stopping. Nothing here is tuned for
//! large models; the networks involved are a few hundred units at most, and
//! determinism for a fixed seed matters more than raw speed.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
/// Floor for probabilities inside log() so the loss stays finite.
const LOG_FLOOR: f64 = 1e-300;

/// Multiplicative learning-rate decay on a loss plateau.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LrDecay {
    /// Multiplier applied when the plateau triggers.
    pub factor: f64,
    /// Consecutive epochs without sufficient improvement before decaying.
    pub patience: usize,
    /// Improvement below this does not count.
    pub floor_delta: f64,
}

/// Early stopping on a loss plateau.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EarlyStop {
    pub enabled: bool,
    pub patience: usize,
    pub min_delta: f64,
}

/// Architecture and training hyperparameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpSpec {
    /// Hidden layer widths, input to output.
    pub hidden: Vec<usize>,
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lr_decay: LrDecay,
    pub early_stop: EarlyStop,
    pub seed: u64,
}

impl MlpSpec {
    /// Settings used when scoring balancing methods: three hidden layers of
    /// 100 units, 200 epochs, batch 32, Adam at 0.1 with decay 0.9 after 5
    /// flat epochs.
    pub fn evaluation_default() -> Self {
        MlpSpec {
            hidden: vec![100, 100, 100],
            max_epochs: 200,
            batch_size: 32,
            learning_rate: 0.1,
            lr_decay: LrDecay {
                factor: 0.9,
                patience: 5,
                floor_delta: 1e-4,
            },
            early_stop: EarlyStop {
                enabled: false,
                patience: 10,
                min_delta: 1e-4,
            },
            seed: 0,
        }
    }

    /// Settings for the small probe network used during sample selection:
    /// two hidden layers of 10 units, up to 300 epochs, early stopping on.
    pub fn probe_default() -> Self {
        MlpSpec {
            hidden: vec![10, 10],
            max_epochs: 300,
            batch_size: 32,
            learning_rate: 0.01,
            lr_decay: LrDecay {
                factor: 0.9,
                patience: 5,
                floor_delta: 1e-4,
            },
            early_stop: EarlyStop {
                enabled: true,
                patience: 10,
                min_delta: 1e-4,
            },
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.contains(&0) {
            return Err(Error::config("hidden layer width must be positive"));
        }
        if self.max_epochs == 0 {
            return Err(Error::config("max_epochs must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch_size must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config(format!(
                "learning_rate must be positive and finite, got {}",
                self.learning_rate
            )));
        }
        if !(self.lr_decay.factor > 0.0 && self.lr_decay.factor <= 1.0) {
            return Err(Error::config(format!(
                "lr decay factor must be in (0, 1], got {}",
                self.lr_decay.factor
            )));
        }
        if self.lr_decay.patience == 0 || (self.early_stop.enabled && self.early_stop.patience == 0)
        {
            return Err(Error::config("plateau patience must be positive"));
        }
        if self.lr_decay.floor_delta < 0.0 || self.early_stop.min_delta < 0.0 {
            return Err(Error::config("plateau thresholds must be >= 0"));
        }
        Ok(())
    }
}

/// Watches a loss series and fires after `patience` consecutive epochs
/// without an improvement greater than `min_delta` over the best seen.
#[derive(Debug, Clone)]
struct PlateauTracker {
    best: f64,
    wait: usize,
    patience: usize,
    min_delta: f64,
}

impl PlateauTracker {
    fn new(patience: usize, min_delta: f64) -> Self {
        PlateauTracker {
            best: f64::INFINITY,
            wait: 0,
            patience,
            min_delta,
        }
    }

    /// Feed one epoch loss; returns true when the plateau triggers. The wait
    /// counter resets on trigger so the watcher can fire again later.
    fn update(&mut self, loss: f64) -> bool {
        if loss < self.best - self.min_delta {
            self.best = loss;
            self.wait = 0;
            return false;
        }
        self.wait += 1;
        if self.wait >= self.patience {
            self.wait = 0;
            true
        } else {
            false
        }
    }
}

#[derive(Debug, Clone)]
struct Layer {
    w: Array2<f64>,
    b: Array1<f64>,
}

/// A trained network plus its training history.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    spec: MlpSpec,
    layers: Vec<Layer>,
    input_dim: usize,
    n_classes: usize,
    /// Mean training loss per completed epoch.
    pub loss_history: Vec<f64>,
}

impl TrainedModel {
    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Class probabilities, one row per input row; rows sum to 1.
    pub fn predict_proba(&self, x: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.input_dim {
            return Err(Error::data(format!(
                "network expects {} features, got {}",
                self.input_dim,
                x.ncols()
            )));
        }
        let mut a = x.to_owned();
        for (i, layer) in self.layers.iter().enumerate() {
            a = a.dot(&layer.w) + &layer.b;
            if i + 1 < self.layers.len() {
                a.mapv_inplace(|v| v.max(0.0));
            }
        }
        softmax_rows(&mut a);
        if a.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("network produced non-finite output"));
        }
        Ok(a)
    }

    /// Most probable class per row; ties resolve to the lower class id.
    pub fn predict(&self, x: ArrayView2<'_, f64>) -> Result<Vec<usize>> {
        let probs = self.predict_proba(x)?;
        Ok(probs
            .rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                for (j, &v) in row.iter().enumerate() {
                    if v > row[best] {
                        best = j;
                    }
                }
                best
            })
            .collect())
    }
}

/// Row-wise softmax in place, stabilized by subtracting the row max.
fn softmax_rows(logits: &mut Array2<f64>) {
    for mut row in logits.rows_mut() {
        let max = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.sum();
        row.mapv_inplace(|v| v / sum);
    }
}

fn init_layers(dims: &[usize], rng: &mut ChaCha8Rng) -> Vec<Layer> {
    let mut layers = Vec::with_capacity(dims.len() - 1);
    for win in dims.windows(2) {
        let (fan_in, fan_out) = (win[0], win[1]);
        let scale = 1.0 / (fan_in as f64).sqrt();
        let w = Array2::from_shape_fn((fan_in, fan_out), |_| rng.random_range(-scale..scale));
        layers.push(Layer {
            w,
            b: Array1::zeros(fan_out),
        });
    }
    layers
}

struct AdamState {
    m: Vec<(Array2<f64>, Array1<f64>)>,
    v: Vec<(Array2<f64>, Array1<f64>)>,
    t: u64,
}

impl AdamState {
    fn new(layers: &[Layer]) -> Self {
        let zero = |l: &Layer| (Array2::zeros(l.w.dim()), Array1::zeros(l.b.dim()));
        AdamState {
            m: layers.iter().map(zero).collect(),
            v: layers.iter().map(zero).collect(),
            t: 0,
        }
    }

    fn step(&mut self, layers: &mut [Layer], grads: &[(Array2<f64>, Array1<f64>)], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - ADAM_BETA1.powi(self.t as i32);
        let bc2 = 1.0 - ADAM_BETA2.powi(self.t as i32);
        for (i, layer) in layers.iter_mut().enumerate() {
            let (gw, gb) = &grads[i];
            let (mw, mb) = &mut self.m[i];
            let (vw, vb) = &mut self.v[i];
            ndarray::Zip::from(&mut layer.w)
                .and(mw)
                .and(vw)
                .and(gw)
                .for_each(|w, m, v, &g| {
                    *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                    *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                    *w -= lr * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
                });
            ndarray::Zip::from(&mut layer.b)
                .and(mb)
                .and(vb)
                .and(gb)
                .for_each(|w, m, v, &g| {
                    *m = ADAM_BETA1 * *m + (1.0 - ADAM_BETA1) * g;
                    *v = ADAM_BETA2 * *v + (1.0 - ADAM_BETA2) * g * g;
                    *w -= lr * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
                });
        }
    }
}

/// Forward pass keeping every post-activation; the last entry is softmax
/// probabilities, earlier ones are ReLU outputs (index 0 is the input).
fn forward_cached(layers: &[Layer], x: &Array2<f64>) -> Vec<Array2<f64>> {
    let mut acts: Vec<Array2<f64>> = Vec::with_capacity(layers.len() + 1);
    acts.push(x.clone());
    for (i, layer) in layers.iter().enumerate() {
        let mut z = acts[i].dot(&layer.w) + &layer.b;
        if i + 1 < layers.len() {
            z.mapv_inplace(|v| v.max(0.0));
        } else {
            softmax_rows(&mut z);
        }
        acts.push(z);
    }
    acts
}

/// Mean cross-entropy of softmax outputs against integer targets.
fn cross_entropy(probs: &Array2<f64>, targets: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &y) in probs.rows().into_iter().zip(targets.iter()) {
        total -= row[y].max(LOG_FLOOR).ln();
    }
    total / targets.len() as f64
}

/// Gradients of mean cross-entropy for one batch, via backpropagation.
fn backward(
    layers: &[Layer],
    acts: &[Array2<f64>],
    targets: &[usize],
) -> Vec<(Array2<f64>, Array1<f64>)> {
    let batch = targets.len() as f64;
    // d(loss)/d(logits) for softmax + cross-entropy.
    let mut delta = acts.last().expect("output activations").clone();
    for (i, &y) in targets.iter().enumerate() {
        delta[[i, y]] -= 1.0;
    }
    delta.mapv_inplace(|v| v / batch);

    let mut grads = vec![(Array2::zeros((0, 0)), Array1::zeros(0)); layers.len()];
    for l in (0..layers.len()).rev() {
        let gw = acts[l].t().dot(&delta);
        let gb = delta.sum_axis(Axis(0));
        if l > 0 {
            let mut back = delta.dot(&layers[l].w.t());
            ndarray::Zip::from(&mut back)
                .and(&acts[l])
                .for_each(|d, &a| {
                    if a <= 0.0 {
                        *d = 0.0;
                    }
                });
            delta = back;
        }
        grads[l] = (gw, gb);
    }
    grads
}

fn train_impl(spec: &MlpSpec, data: &Dataset, warm_start: Option<&[Layer]>) -> Result<TrainedModel> {
    spec.validate()?;
    if data.present_classes().len() < 2 {
        return Err(Error::data(
            "training needs at least two classes with samples",
        ));
    }
    let n = data.len();
    let dims: Vec<usize> = std::iter::once(data.dim())
        .chain(spec.hidden.iter().copied())
        .chain(std::iter::once(data.num_classes()))
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut layers = match warm_start {
        Some(base) => base.to_vec(),
        None => init_layers(&dims, &mut rng),
    };
    let x_all = data.features().to_owned();
    let y_all = data.labels().to_vec();

    let mut adam = AdamState::new(&layers);
    let mut lr = spec.learning_rate;
    let mut lr_watch = PlateauTracker::new(spec.lr_decay.patience, spec.lr_decay.floor_delta);
    let mut stop_watch = PlateauTracker::new(spec.early_stop.patience, spec.early_stop.min_delta);
    let mut loss_history = Vec::with_capacity(spec.max_epochs);
    let mut indices: Vec<usize> = (0..n).collect();

    for epoch in 0..spec.max_epochs {
        indices.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in indices.chunks(spec.batch_size) {
            let xb = x_all.select(Axis(0), chunk);
            let yb: Vec<usize> = chunk.iter().map(|&i| y_all[i]).collect();
            let acts = forward_cached(&layers, &xb);
            epoch_loss += cross_entropy(acts.last().unwrap(), &yb) * yb.len() as f64;
            let grads = backward(&layers, &acts, &yb);
            adam.step(&mut layers, &grads, lr);
        }
        epoch_loss /= n as f64;
        if !epoch_loss.is_finite() {
            return Err(Error::numerical(format!(
                "training loss became non-finite at epoch {epoch}"
            )));
        }
        loss_history.push(epoch_loss);
        if lr_watch.update(epoch_loss) {
            lr *= spec.lr_decay.factor;
        }
        if spec.early_stop.enabled && stop_watch.update(epoch_loss) {
            break;
        }
    }

    Ok(TrainedModel {
        spec: spec.clone(),
        layers,
        input_dim: data.dim(),
        n_classes: data.num_classes(),
        loss_history,
    })
}

/// Train a fresh network on `data` according to `spec`.
pub fn train(spec: &MlpSpec, data: &Dataset) -> Result<TrainedModel> {
    train_impl(spec, data, None)
}

/// Continue training `base` on `data` with the same spec (another full
/// budget of epochs). The optimizer state restarts; the weights carry over.
pub fn fine_tune(base: &TrainedModel, data: &Dataset) -> Result<TrainedModel> {
    if data.dim() != base.input_dim {
        return Err(Error::data(format!(
            "network expects {} features, got {}",
            base.input_dim,
            data.dim()
        )));
    }
    if data.num_classes() != base.n_classes {
        return Err(Error::data(format!(
            "network expects {} classes, got {}",
            base.n_classes,
            data.num_classes()
        )));
    }
    train_impl(&base.spec, data, Some(&base.layers))
}
