pub mod chains;
pub mod cli;
pub mod collections;
pub mod error;
pub mod fincat;
pub mod formats;
pub mod globes;
pub mod leinster;
pub mod operads;
pub mod par;
pub mod pasting;
pub mod soa;

pub use error::{Error, Result};
