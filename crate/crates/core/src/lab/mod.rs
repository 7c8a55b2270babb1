//! Configuration, persistence and the command implementations behind the CLI.

mod checkpoint;
mod commands;
mod config;

pub use checkpoint::{
    decode_checkpoint, encode_checkpoint, load_checkpoint, save_checkpoint, FORMAT_VERSION, MAGIC,
};
pub use commands::{
    cmd_fit_rates, cmd_simulate, cmd_sweep, cmd_verify_lemmas, exit_code, initial_fields,
    linear_rate, mode_rates, read_table, suggested_weight, LemmaOutcome, SimulateOutcome,
    SweepOutcome, Table,
};
pub use config::{parse_config, InitialKind, InitialSpec, RunConfig, KEYS};
