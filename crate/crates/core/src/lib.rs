pub mod geo;
pub mod ingest;
pub mod textproc;
pub mod vocabulary;
pub mod mobility;
pub mod baseline;
pub mod synth;
pub mod cli;
