"""Tower-data ingestion: parse, clean and summarize wind-speed series."""
