"""Command-line interface and canonical example structures."""
