"""Top-level entry point: python weave.py generate --config generate.json."""

from hyperweave.cli import main

main()
