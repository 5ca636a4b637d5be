SEMIBLIND_VERSION = 'v0.2.0'
CSV_SCHEMA_VERSION = 'v1'
