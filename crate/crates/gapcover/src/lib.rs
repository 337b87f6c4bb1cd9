//! Instance formats, generators, batch runs and reporting around
//! [`gapcover_core`].

pub mod generate;
pub mod run;
pub mod spec;

pub use generate::{acceptance_corpus, corpus, gen_random, Kind, Params};
pub use run::{run_batch, run_item, Flags, Outcome, Status};
pub use spec::{parse_instance, InstanceSpec, Item, ParseError};
