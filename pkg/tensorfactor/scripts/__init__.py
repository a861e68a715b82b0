"""Command-line entry points for tensorfactor."""
