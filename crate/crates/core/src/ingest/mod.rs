//! NDJSON message ingestion and the day/language/country partitioned store.

mod record;
mod store;

pub use record::{parse_record, Country, CountryScope, Lang, MessageRecord, ParseError};
pub use store::{
    ingest_reader, partition, IngestSummary, PartitionKey, PartitionReport, PartitionWriter, Store,
};
