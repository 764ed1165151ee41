//! Learnable layers on top of the tape: linear projections, the GRU cell,
//! dropout, initialisers and the binary parameter checkpoint.

mod checkpoint;
mod dropout;
mod gru;
mod init;
mod linear;

pub use checkpoint::{load_checkpoint, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use dropout::{dropout, dropout_mask, Mode};
pub use gru::{GruCell, GruStep};
pub use init::{init_params, init_default, InitScheme};
pub use linear::LinearLayer;
