pub mod ingest;
pub mod llm;
pub mod analytics;
pub mod app;
pub mod crew;
pub mod events;
pub mod retrieval;
pub mod text;
