"""Library utilities for catlab."""
