//! Tokenizer training, morphological alignment scoring and the statistics
//! used to compare tokenization quality across agglutinative and fusional
//! languages.
//!
//! The main entry points are [`tokenizer::train_bpe`],
//! [`morphscore::morphscore`], [`metrics::compute_metrics`],
//! [`byte_premium::compute_byte_premium`], [`synth::generate`] and the
//! [`stats`] module.

pub mod byte_premium;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod morphscore;
pub mod report;
pub mod stats;
pub mod synth;
pub mod tokenizer;
pub mod typology;

pub use error::{Error, Result};
pub use typology::MorphType;

#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident) => {
            #[doc = include_str!(concat!("../../../book/src/", stringify!($name), ".md"))]
            mod $name {}
        };
    }
    chapter!(intro);
    chapter!(tokenizers);
    chapter!(morphscore);
    chapter!(datasets);
    chapter!(metrics);
    chapter!(byte_premium);
    chapter!(synthetic);
    chapter!(statistics);
    chapter!(cli);
}
