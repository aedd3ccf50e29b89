"""Test suite for catlab."""
