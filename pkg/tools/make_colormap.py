"""Regenerate the frozen colormap table in src/somson/colormap.py.

Development-only: needs matplotlib.  The shipped package carries the table
as literals so renders never depend on a plotting library being installed.
Run from the repository root:

    python3 tools/make_colormap.py
"""

from __future__ import annotations

import pathlib

from matplotlib import colormaps

SOURCE = "cividis"
OUT = pathlib.Path(__file__).resolve().parent.parent / "src" / "somson" / "colormap.py"

HEADER = '''"""Frozen 256-entry dark-blue-to-yellow colormap.

The table is shipped as literals (regenerated by tools/make_colormap.py)
so component-plane renders are byte-identical on every platform.  Entry 0
is the darkest blue, entry 255 the brightest yellow, and the documented
midpoint color is ``COLORMAP[128]``.
"""

from __future__ import annotations

COLORMAP: tuple[tuple[int, int, int], ...] = (
'''

FOOTER = ''')

# the half-value anchor: color_at(0.5) resolves to this entry
MIDPOINT: tuple[int, int, int] = COLORMAP[128]


def color_at(value: float) -> tuple[int, int, int]:
    """Nearest table entry for a value in [0, 1]."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"colormap value {value} outside [0, 1]")
    return COLORMAP[int(value * 255.0 + 0.5)]
'''


def main() -> None:
    table = colormaps[SOURCE].colors
    assert len(table) == 256
    lines = []
    for rgb_float in table:
        r, g, b = (round(255.0 * float(c)) for c in rgb_float[:3])
        lines.append(f"    ({r}, {g}, {b}),\n")
    OUT.write_text(HEADER + "".join(lines) + FOOTER, encoding="utf-8")
    print(f"wrote {OUT} ({len(table)} entries)")


if __name__ == "__main__":
    main()
