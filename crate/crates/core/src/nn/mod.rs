//! Feed-forward networks, softmax policy heads and the Adam optimizer.

mod adam;
mod checkpoint;
mod head;
mod mlp;

pub use adam::Adam;
pub use checkpoint::{header_line, parse_header, read_checkpoint, write_checkpoint};
pub use head::{categorical_head, entropy, sample_action};
pub use mlp::{stack_rows, Activation, LayerShape, Mlp, MlpSpec, ParamVector};

/// Two hidden layers of 64 tanh units.
pub const DEFAULT_HIDDEN: [usize; 2] = [64, 64];
