//! Dueling action-value network with hand-rolled reverse-mode gradients.
//!
//! A small fully connected trunk (rectifier activations) feeds two heads: a
//! scalar state-value stream `V` and a `K`-way advantage stream `A`. The
//! action values combine with the mean-subtracted aggregation
//!
//! ```text
//! Q(s, a) = V(s) + A(s, a) - mean_a' A(s, a')
//! ```
//!
//! so adding a constant to every advantage leaves `Q` unchanged while a
//! value-head shift moves all `Q` together. Parameters live in one flat
//! vector (trunk layers, then value head, then advantage head), which keeps
//! the optimizer and the finite-difference checks trivial.

use crate::rng::Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, AgentError>;

/// Layer widths of the approximator.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct NetworkShape {
    pub input: usize,
    pub hidden: Vec<usize>,
    pub actions: usize,
}

impl NetworkShape {
    pub fn new(input: usize, hidden: Vec<usize>, actions: usize) -> Self {
        NetworkShape { input, hidden, actions }
    }

    /// Total parameter count: trunk, value head, advantage head.
    pub fn param_count(&self) -> usize {
        let mut count = 0;
        let mut prev = self.input;
        for &h in &self.hidden {
            count += prev * h + h;
            prev = h;
        }
        count + (prev + 1) + (prev * self.actions + self.actions)
    }

    fn last_hidden(&self) -> usize {
        *self.hidden.last().unwrap_or(&self.input)
    }
}

/// Dueling network: shape plus the flat parameter vector.
#[derive(Debug, Clone)]
pub struct DuelingNetwork {
    pub shape: NetworkShape,
    pub params: Vec<f64>,
}

/// Forward-pass intermediates retained for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    input: Vec<f64>,
    /// Pre-activation and post-activation of each trunk layer.
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
    advantages: Vec<f64>,
    pub q: Vec<f64>,
}

impl DuelingNetwork {
    /// Zero-initialized network (every Q output is exactly zero).
    pub fn zeros(shape: NetworkShape) -> Self {
        let params = vec![0.0; shape.param_count()];
        DuelingNetwork { shape, params }
    }

    /// Xavier-uniform initialization from the given generator.
    pub fn init(shape: NetworkShape, rng: &mut Rng) -> Self {
        let mut net = DuelingNetwork::zeros(shape);
        let mut offset = 0;
        let mut prev = net.shape.input;
        let hidden = net.shape.hidden.clone();
        for &h in &hidden {
            let limit = (6.0 / (prev + h) as f64).sqrt();
            for p in net.params[offset..offset + prev * h].iter_mut() {
                *p = rng.uniform(-limit, limit);
            }
            offset += prev * h + h; // biases stay zero
            prev = h;
        }
        let limit_v = (6.0 / (prev + 1) as f64).sqrt();
        for p in net.params[offset..offset + prev].iter_mut() {
            *p = rng.uniform(-limit_v, limit_v);
        }
        offset += prev + 1;
        let k = net.shape.actions;
        let limit_a = (6.0 / (prev + k) as f64).sqrt();
        for p in net.params[offset..offset + prev * k].iter_mut() {
            *p = rng.uniform(-limit_a, limit_a);
        }
        net
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    /// Action values for a state, with the cache needed for gradients.
    pub fn forward(&self, state: &[f64]) -> Result<ForwardCache> {
        assert_eq!(state.len(), self.shape.input, "state width mismatch");
        if !self.is_finite() {
            return Err(AgentError::Numerical("non-finite network parameter".into()));
        }
        let mut offset = 0;
        let mut prev_width = self.shape.input;
        let mut activ: Vec<f64> = state.to_vec();
        let mut pre_layers = Vec::with_capacity(self.shape.hidden.len());
        let mut post_layers = Vec::with_capacity(self.shape.hidden.len());
        for &h in &self.shape.hidden {
            let w = &self.params[offset..offset + prev_width * h];
            let b = &self.params[offset + prev_width * h..offset + prev_width * h + h];
            let mut pre = vec![0.0; h];
            for (o, pre_o) in pre.iter_mut().enumerate() {
                let row = &w[o * prev_width..(o + 1) * prev_width];
                let mut acc = b[o];
                for (x, wi) in activ.iter().zip(row) {
                    acc += x * wi;
                }
                *pre_o = acc;
            }
            let post: Vec<f64> = pre.iter().map(|&x| x.max(0.0)).collect();
            pre_layers.push(pre);
            offset += prev_width * h + h;
            prev_width = h;
            activ = post.clone();
            post_layers.push(post);
        }
        // Value head.
        let hw = prev_width;
        let wv = &self.params[offset..offset + hw];
        let bv = self.params[offset + hw];
        let value = wv.iter().zip(&activ).map(|(w, x)| w * x).sum::<f64>() + bv;
        offset += hw + 1;
        // Advantage head.
        let k = self.shape.actions;
        let wa = &self.params[offset..offset + hw * k];
        let ba = &self.params[offset + hw * k..offset + hw * k + k];
        let mut advantages = vec![0.0; k];
        for (a, adv) in advantages.iter_mut().enumerate() {
            let row = &wa[a * hw..(a + 1) * hw];
            let mut acc = ba[a];
            for (x, wi) in activ.iter().zip(row) {
                acc += x * wi;
            }
            *adv = acc;
        }
        let mean_adv = advantages.iter().sum::<f64>() / k as f64;
        let q: Vec<f64> = advantages.iter().map(|a| value + a - mean_adv).collect();
        Ok(ForwardCache {
            input: state.to_vec(),
            pre: pre_layers,
            post: post_layers,
            advantages,
            q,
        })
    }

    /// Convenience forward returning only the Q values.
    pub fn q_values(&self, state: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(state)?.q)
    }

    /// Greedy action: argmax over Q, ties resolved to the lowest index.
    pub fn greedy_action(&self, state: &[f64]) -> Result<usize> {
        let q = self.q_values(state)?;
        Ok(argmax(&q))
    }

    /// Accumulate parameter gradients for a given output cotangent `dq`
    /// (∂loss/∂Q per action) into `grads`.
    pub fn backward(&self, cache: &ForwardCache, dq: &[f64], grads: &mut [f64]) {
        assert_eq!(dq.len(), self.shape.actions);
        assert_eq!(grads.len(), self.params.len());
        let k = self.shape.actions;
        let dq_sum: f64 = dq.iter().sum();
        // Dueling combiner: dV = Σ dq; dA_a = dq_a - mean(dq).
        let d_value = dq_sum;
        let d_adv: Vec<f64> = dq.iter().map(|d| d - dq_sum / k as f64).collect();

        let last = if self.shape.hidden.is_empty() {
            cache.input.clone()
        } else {
            cache.post[cache.post.len() - 1].clone()
        };
        let hw = last.len();

        // Walk offsets to the heads.
        let mut offset = 0;
        let mut prev_width = self.shape.input;
        for &h in &self.shape.hidden {
            offset += prev_width * h + h;
            prev_width = h;
        }
        let value_offset = offset;
        let adv_offset = offset + hw + 1;

        let mut d_last = vec![0.0; hw];
        // Value head gradients.
        for i in 0..hw {
            grads[value_offset + i] += d_value * last[i];
            d_last[i] += d_value * self.params[value_offset + i];
        }
        grads[value_offset + hw] += d_value;
        // Advantage head gradients.
        for a in 0..k {
            let row = adv_offset + a * hw;
            for i in 0..hw {
                grads[row + i] += d_adv[a] * last[i];
                d_last[i] += d_adv[a] * self.params[row + i];
            }
            grads[adv_offset + hw * k + a] += d_adv[a];
        }

        // Trunk, deepest layer first.
        let mut d_post = d_last;
        for layer in (0..self.shape.hidden.len()).rev() {
            let h = self.shape.hidden[layer];
            let in_width = if layer == 0 { self.shape.input } else { self.shape.hidden[layer - 1] };
            let layer_offset = {
                let mut off = 0;
                let mut prev = self.shape.input;
                for &hh in &self.shape.hidden[..layer] {
                    off += prev * hh + hh;
                    prev = hh;
                }
                off
            };
            let inputs: &[f64] = if layer == 0 { &cache.input } else { &cache.post[layer - 1] };
            let mut d_pre = vec![0.0; h];
            for o in 0..h {
                d_pre[o] = if cache.pre[layer][o] > 0.0 { d_post[o] } else { 0.0 };
            }
            let mut d_in = vec![0.0; in_width];
            for o in 0..h {
                let row = layer_offset + o * in_width;
                for i in 0..in_width {
                    grads[row + i] += d_pre[o] * inputs[i];
                    d_in[i] += d_pre[o] * self.params[row + i];
                }
                grads[layer_offset + h * in_width + o] += d_pre[o];
            }
            d_post = d_in;
        }
    }

    /// Advantage values of the last forward pass (used in tests).
    pub fn advantages(cache: &ForwardCache) -> &[f64] {
        &cache.advantages
    }
}

/// Index of the maximum entry, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}
