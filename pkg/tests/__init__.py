"""Tests for the fiscal stabiliser toolkit."""
