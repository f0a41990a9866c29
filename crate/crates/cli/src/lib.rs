//! Model files, built-in solvable models and subcommands of the `guillotine`
//! command-line tool.

pub mod builtin;
pub mod commands;
pub mod model;

pub use commands::Status;
pub use model::ModelFile;
