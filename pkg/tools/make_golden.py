#!/usr/bin/env python3
"""Regenerate the shared golden-vector table.

The table freezes the derived synthesis quantities (partial frequencies,
modulation index, partial amplitudes, tremolo rate) for a documented set
of parameter rows.  Independent implementations, such as the browser
explorer, check themselves against this file.
"""

from __future__ import annotations

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from somson.sonify import golden_vector_table  # noqa: E402

OUT = os.path.join(os.path.dirname(__file__), "..", "golden", "sonification_vectors.tsv")


def main() -> None:
    os.makedirs(os.path.dirname(OUT), exist_ok=True)
    with open(OUT, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(golden_vector_table())
    print(f"wrote {os.path.normpath(OUT)}")


if __name__ == "__main__":
    main()
