use crate::error::{Error, Result};
use ndarray::linalg::general_mat_mul;
use ndarray::{Array2, ArrayView1, ArrayView2, ArrayViewMut1, ArrayViewMut2, Axis};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Activation {
    Tanh,
}

impl Activation {
    pub fn name(self) -> &'static str {
        match self {
            Activation::Tanh => "tanh",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "tanh" => Some(Activation::Tanh),
            _ => None,
        }
    }
}

/// Shape of a fully connected network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub input_dim: usize,
    pub hidden: Vec<usize>,
    pub output_dim: usize,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(input_dim: usize, hidden: Vec<usize>, output_dim: usize) -> Self {
        Self {
            input_dim,
            hidden,
            output_dim,
            activation: Activation::Tanh,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hidden.is_empty() {
            return Err(Error::invalid("an MLP needs at least one hidden layer"));
        }
        if self.input_dim == 0 || self.output_dim == 0 || self.hidden.contains(&0) {
            return Err(Error::invalid(format!("zero-sized layer in {self:?}")));
        }
        Ok(())
    }

    /// (fan_in, fan_out) of every affine layer, input to output.
    pub fn layer_dims(&self) -> Vec<(usize, usize)> {
        let mut dims = Vec::with_capacity(self.hidden.len() + 1);
        let mut fan_in = self.input_dim;
        for &h in self.hidden.iter().chain(std::iter::once(&self.output_dim)) {
            dims.push((fan_in, h));
            fan_in = h;
        }
        dims
    }

    pub fn param_count(&self) -> usize {
        self.layer_dims().iter().map(|(i, o)| i * o + o).sum()
    }
}

/// Placement of one affine layer inside the flat parameter array.
///
/// The weight block is `inputs × outputs`, row-major, followed by the bias.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayerShape {
    pub inputs: usize,
    pub outputs: usize,
    pub weight_offset: usize,
    pub bias_offset: usize,
}

/// Flat parameters with a gradient buffer of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    grads: Vec<f64>,
    layout: Vec<LayerShape>,
}

impl ParamVector {
    fn zeros(spec: &MlpSpec) -> Self {
        let mut layout = Vec::new();
        let mut offset = 0;
        for (inputs, outputs) in spec.layer_dims() {
            layout.push(LayerShape {
                inputs,
                outputs,
                weight_offset: offset,
                bias_offset: offset + inputs * outputs,
            });
            offset += inputs * outputs + outputs;
        }
        Self {
            values: vec![0.0; offset],
            grads: vec![0.0; offset],
            layout,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn grads(&self) -> &[f64] {
        &self.grads
    }

    pub fn grads_mut(&mut self) -> &mut [f64] {
        &mut self.grads
    }

    /// Simultaneous access for optimizers.
    pub fn split_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.values, &mut self.grads)
    }

    pub fn layout(&self) -> &[LayerShape] {
        &self.layout
    }

    pub fn zero_grads(&mut self) {
        self.grads.iter_mut().for_each(|g| *g = 0.0);
    }

    fn weight(&self, l: &LayerShape) -> ArrayView2<'_, f64> {
        let s = &self.values[l.weight_offset..l.bias_offset];
        ArrayView2::from_shape((l.inputs, l.outputs), s).expect("layout matches storage")
    }

    fn bias(&self, l: &LayerShape) -> ArrayView1<'_, f64> {
        ArrayView1::from(&self.values[l.bias_offset..l.bias_offset + l.outputs])
    }

    fn grad_blocks(&mut self, l: &LayerShape) -> (ArrayViewMut2<'_, f64>, ArrayViewMut1<'_, f64>) {
        let (w, rest) = self.grads[l.weight_offset..].split_at_mut(l.inputs * l.outputs);
        (
            ArrayViewMut2::from_shape((l.inputs, l.outputs), w).expect("layout matches storage"),
            ArrayViewMut1::from(&mut rest[..l.outputs]),
        )
    }
}

/// Activations of the last recorded forward pass.
#[derive(Debug, Clone)]
struct Tape {
    input: Array2<f64>,
    /// Post-activation output of each hidden layer.
    hidden: Vec<Array2<f64>>,
}

/// A tanh multilayer perceptron with a linear output layer.
#[derive(Debug, Clone)]
pub struct Mlp {
    spec: MlpSpec,
    params: ParamVector,
    tape: Option<Tape>,
}

impl Mlp {
    /// Uniform `±1/sqrt(fan_in)` weights and zero biases, deterministic per seed.
    pub fn new(spec: MlpSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut params = ParamVector::zeros(&spec);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for l in params.layout.clone() {
            let bound = 1.0 / (l.inputs as f64).sqrt();
            for w in &mut params.values[l.weight_offset..l.bias_offset] {
                *w = rng.random_range(-bound..bound);
            }
        }
        Ok(Self {
            spec,
            params,
            tape: None,
        })
    }

    pub fn from_values(spec: MlpSpec, values: Vec<f64>) -> Result<Self> {
        spec.validate()?;
        let mut params = ParamVector::zeros(&spec);
        if values.len() != params.len() {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                params.len(),
                values.len()
            )));
        }
        params.values = values;
        Ok(Self {
            spec,
            params,
            tape: None,
        })
    }

    pub fn spec(&self) -> &MlpSpec {
        &self.spec
    }

    pub fn params(&self) -> &ParamVector {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut ParamVector {
        &mut self.params
    }

    fn check_input(&self, cols: usize) -> Result<()> {
        if cols != self.spec.input_dim {
            return Err(Error::invalid(format!(
                "input has {cols} features, network expects {}",
                self.spec.input_dim
            )));
        }
        Ok(())
    }

    fn run(&self, inputs: ArrayView2<'_, f64>, keep: bool) -> (Array2<f64>, Vec<Array2<f64>>) {
        let layers = self.params.layout();
        let mut kept = Vec::new();
        let mut current: Option<Array2<f64>> = None;
        for (i, l) in layers.iter().enumerate() {
            let x = current.as_ref().map_or(inputs, |a| a.view());
            let mut z = x.dot(&self.params.weight(l));
            z += &self.params.bias(l);
            if i + 1 < layers.len() {
                match self.spec.activation {
                    Activation::Tanh => z.mapv_inplace(f64::tanh),
                }
                if keep {
                    kept.push(z.clone());
                }
            }
            current = Some(z);
        }
        (current.expect("at least one layer"), kept)
    }

    /// Batched forward pass (one row per sample), recording activations.
    pub fn forward_batch(&mut self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_input(inputs.ncols())?;
        let (out, hidden) = self.run(inputs, true);
        self.tape = Some(Tape {
            input: inputs.to_owned(),
            hidden,
        });
        Ok(out)
    }

    pub fn forward(&mut self, input: &[f64]) -> Result<Vec<f64>> {
        let x = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
        Ok(self.forward_batch(x)?.into_raw_vec_and_offset().0)
    }

    /// Forward pass without recording, for rollouts and evaluation.
    pub fn predict_batch(&self, inputs: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
        self.check_input(inputs.ncols())?;
        Ok(self.run(inputs, false).0)
    }

    pub fn predict(&self, input: &[f64]) -> Result<Vec<f64>> {
        let x = ArrayView2::from_shape((1, input.len()), input).expect("row vector");
        Ok(self.predict_batch(x)?.into_raw_vec_and_offset().0)
    }

    /// Accumulates `∂loss/∂params` into the gradient buffer given `∂loss/∂output`
    /// for every row of the last recorded forward pass. The tape is kept, so
    /// repeated calls accumulate.
    pub fn backward_batch(&mut self, output_grad: ArrayView2<'_, f64>) -> Result<()> {
        let tape = self
            .tape
            .take()
            .ok_or_else(|| Error::State("backward called without a recorded forward pass".into()))?;
        let result = self.backprop(&tape, output_grad);
        self.tape = Some(tape);
        result
    }

    pub fn backward(&mut self, output_grad: &[f64]) -> Result<()> {
        let g = ArrayView2::from_shape((1, output_grad.len()), output_grad).expect("row vector");
        self.backward_batch(g)
    }

    fn backprop(&mut self, tape: &Tape, output_grad: ArrayView2<'_, f64>) -> Result<()> {
        let rows = tape.input.nrows();
        if output_grad.dim() != (rows, self.spec.output_dim) {
            return Err(Error::invalid(format!(
                "output gradient has shape {:?}, expected ({rows}, {})",
                output_grad.dim(),
                self.spec.output_dim
            )));
        }
        let layout = self.params.layout.clone();
        let mut delta: Array2<f64> = output_grad.to_owned();
        for (i, l) in layout.iter().enumerate().rev() {
            let layer_input = if i == 0 {
                tape.input.view()
            } else {
                tape.hidden[i - 1].view()
            };
            {
                let (mut gw, mut gb) = self.params.grad_blocks(l);
                general_mat_mul(1.0, &layer_input.t(), &delta, 1.0, &mut gw);
                gb += &delta.sum_axis(Axis(0));
            }
            if i > 0 {
                let mut upstream = delta.dot(&self.params.weight(l).t());
                match self.spec.activation {
                    Activation::Tanh => {
                        upstream.zip_mut_with(&tape.hidden[i - 1], |d, &a| *d *= 1.0 - a * a)
                    }
                }
                delta = upstream;
            }
        }
        Ok(())
    }
}

/// Convenience for building a row-major batch from per-sample feature rows.
pub fn stack_rows(rows: &[Vec<f64>], width: usize) -> Array2<f64> {
    let mut flat = Vec::with_capacity(rows.len() * width);
    for r in rows {
        flat.extend_from_slice(r);
    }
    Array2::from_shape_vec((rows.len(), width), flat).expect("rows share one width")
}
