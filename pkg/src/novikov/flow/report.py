"""CSV tables and SVG pictures with the effective configuration embedded.

Output is deterministic: floats are printed with 17 significant digits and
nothing depends on time or the environment.
"""

from __future__ import annotations

import csv
import io
import json
from xml.sax.saxutils import escape

import numpy as np


def fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def config_comment(config: dict) -> str:
    return json.dumps(config, sort_keys=True, separators=(",", ":"))


def csv_text(header, rows, config: dict) -> str:
    buf = io.StringIO()
    buf.write("# config: " + config_comment(config) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows, config: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(csv_text(header, rows, config))


_COLORS = {0: "#1f77b4", 1: "#2ca02c", 2: "#d62728"}


def svg_text(crit, paths, config: dict, size: int = 480) -> str:
    """Trajectories reduced mod 1 and drawn on the unit square.

    ``paths`` is a list of point lists in lifted coordinates; segments that
    jump across the square's edges are split.
    """
    s = size

    def px(x, y):
        return f"{fmt(round(x * s, 3))},{fmt(round((1 - y) * s, 3))}"

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{s}" height="{s}" viewBox="0 0 {s} {s}">',
           f"<metadata>{escape(config_comment(config))}</metadata>",
           f'<rect x="0" y="0" width="{s}" height="{s}" fill="white" stroke="black"/>']
    for path in paths:
        pts = np.mod(np.asarray(path, dtype=float), 1.0)
        pieces = [[pts[0]]] if len(pts) else []
        for a, b in zip(pts[:-1], pts[1:]):
            if np.max(np.abs(b - a)) > 0.5:
                pieces.append([b])
            else:
                pieces[-1].append(b)
        for piece in pieces:
            if len(piece) > 1:
                d = " ".join(px(*p) for p in piece)
                out.append(f'<polyline points="{d}" fill="none" stroke="#555" stroke-width="1"/>')
    for c in crit:
        cx, cy = px(c.x, c.y).split(",")
        out.append(f'<circle cx="{cx}" cy="{cy}" r="4" fill="{_COLORS[c.index]}">'
                   f"<title>{escape(c.name)} index {c.index}</title></circle>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
