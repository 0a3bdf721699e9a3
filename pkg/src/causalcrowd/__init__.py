"""Crowdsourced causal-network collection and illusion analysis toolkit."""

__version__ = "0.1.0"
