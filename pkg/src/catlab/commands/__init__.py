"""Command implementations for the catlab CLI."""
