"""Temporal clause graphs for versioned contract corpora."""
