"""srzoo: constrained x4 super-resolution model zoo and benchmark harness."""

__version__ = "0.1.0"
