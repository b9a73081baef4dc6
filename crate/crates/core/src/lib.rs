pub mod error;
pub mod qform;
pub mod special;
pub mod epstein;
pub mod hardy;
pub mod expsum;

pub use error::{Error, Result};
