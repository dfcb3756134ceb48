"""Inner and outer bounds for the broadcast relay channel with mixed DF/CF relaying."""

__version__ = "0.1.0"
