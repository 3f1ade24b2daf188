"""Behavior-guidance engine, region-teaching simulator and session server."""

__version__ = "0.1.0"
