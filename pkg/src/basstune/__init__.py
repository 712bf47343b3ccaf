"""Sub-bass drum transposition analysis."""
