"""Word-problem workbench for machine-encoding equational varieties."""

__version__ = "0.1.0"
