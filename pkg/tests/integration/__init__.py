"""Integration tests for the batch workflow and the command line."""
