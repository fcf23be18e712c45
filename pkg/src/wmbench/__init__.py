"""wmbench: invisible image watermarking robustness workbench."""

__version__ = "0.1.0"
