#!/usr/bin/env python3
"""
Layout calibration for the DMERA scaling circuit.

Scores every CircuitConvention variant by the relative energy error that
the bundled D=6 Ising angles reach, and reports whether the frozen default
is the one that passes.
"""

import sys
from pathlib import Path

from dotenv import load_dotenv

# Add the project root to Python path
project_root = Path(__file__).parent.parent
sys.path.append(str(project_root))

from dmera.ansatz import (  # noqa: E402
    DEFAULT_CONVENTION,
    all_conventions,
    energy_density,
    load_bundled_parameters,
    relative_energy_error,
)
from dmera.exceptions import DmeraError  # noqa: E402

TARGET = 1e-8
DEPTH = 6


def score(convention):
    theta = load_bundled_parameters("ising", DEPTH)
    try:
        density = energy_density(theta, DEPTH, "ising", convention=convention, strict=False)
    except DmeraError as e:
        print(f"❌ {convention.name}: {e}")
        return float("inf")
    return relative_energy_error(density)


def main():
    """Rank the sixteen conventions"""
    print(f"🔧 Scoring layout conventions with bundled D={DEPTH} parameters...")
    results = [(score(c), c) for c in all_conventions()]
    results.sort(key=lambda item: item[0])

    for error, convention in results:
        marker = "✅" if error < TARGET else "  "
        default = " (default)" if convention == DEFAULT_CONVENTION else ""
        print(f"{marker} {convention.name:<32} relative error {error:.3e}{default}")

    passing = [c for e, c in results if e < TARGET]
    if not passing:
        print(f"❌ No convention reaches relative error < {TARGET:g}")
        return False
    if DEFAULT_CONVENTION not in passing:
        print(f"❌ Default convention fails; best is {results[0][1].name}")
        return False

    print("🎉 Default convention reproduces the published energy")
    return True


if __name__ == "__main__":
    load_dotenv()
    success = main()
    sys.exit(0 if success else 1)
