"""Tests for oc-witness."""
