pub mod logic;
pub mod kr;
pub mod temporal;
pub mod engine;
pub mod dutch;
pub mod cli;
