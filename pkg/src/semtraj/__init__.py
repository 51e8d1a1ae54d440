"""Semantic trajectory mining for coordinate-free wireless (WAP/BLE) data."""

__version__ = "0.1.0"
