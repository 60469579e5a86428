#!/usr/bin/env python3
"""Regenerate the shipped example inputs under fixtures/."""

from pathlib import Path

from healthval.fixtures import write_fixture_tree

if __name__ == "__main__":
    target = Path(__file__).resolve().parents[1] / "fixtures"
    write_fixture_tree(target)
    print(f"fixtures written to {target}")
