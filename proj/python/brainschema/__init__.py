"""Hierarchical brain-region naming, synthetic connectome blocks and ingest benchmarks."""

from ._core import (
    AddressError,
    CerebellumConfig,
    ConfigError,
    CortexConfig,
    Error,
    FormatError,
    ParseError,
    Schema,
    Store,
    SpecError,
    StoreError,
    bench,
    csv,
    derive_cortex_row,
    durable_store,
    generate_block,
    ingest,
    label_triples,
    memory_store,
    plot,
    published_cortex_rows,
    total_regions,
)

__all__ = [
    "AddressError",
    "CerebellumConfig",
    "ConfigError",
    "CortexConfig",
    "Error",
    "FormatError",
    "ParseError",
    "Schema",
    "Store",
    "SpecError",
    "StoreError",
    "bench",
    "csv",
    "derive_cortex_row",
    "durable_store",
    "generate_block",
    "ingest",
    "label_triples",
    "memory_store",
    "plot",
    "published_cortex_rows",
    "total_regions",
]
