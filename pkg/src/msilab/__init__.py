"""msilab: in-situ magic state injection workbench for CSS qLDPC codes."""

__version__ = "0.1.0"
