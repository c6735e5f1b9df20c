"""Regenerate src/mmwave_ia/data/gamma_table.json (Lloyd-Max MSE of N(0,1), 1..12 bits)."""

import json
from pathlib import Path

from mmwave_ia.quantization import MAX_BITS, MIN_BITS, lloyd_max_quantizer

OUT = Path(__file__).resolve().parents[1] / "src" / "mmwave_ia" / "data" / "gamma_table.json"


def main():
    gamma = {}
    for bits in range(MIN_BITS, MAX_BITS + 1):
        _, _, mse = lloyd_max_quantizer(bits)
        gamma[str(bits)] = float(f"{mse:.6e}")
        print(bits, gamma[str(bits)])
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(json.dumps({
        "description": "normalized MSE of the Lloyd-Max quantizer for a unit-variance Gaussian, per rail",
        "gamma": gamma,
    }, indent=2) + "\n")


if __name__ == "__main__":
    main()
