"""Vital edges of minimum (s,t)-cuts and sensitivity structures."""
