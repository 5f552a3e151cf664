"""Exact algebra and verification for higher Courant-Dorfman structures."""
