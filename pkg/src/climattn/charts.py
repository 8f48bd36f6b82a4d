"""Minimal self-contained SVG line charts for emitted curve data.

No external assets, no styling beyond inline attributes, deterministic text
output so chart files are byte-stable across runs.
"""

from __future__ import annotations

from pathlib import Path

_WIDTH, _HEIGHT = 640, 420
_MARGIN = 56
_COLORS = ("#1f6fb2", "#c05020", "#3a8a3a", "#7a4fa0")


def _scale(values, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span == 0:
        return [(out_lo + out_hi) / 2.0 for _ in values]
    return [out_lo + (v - lo) / span * (out_hi - out_lo) for v in values]


def line_chart(
    path: str | Path,
    series: list[tuple[str, list, list]],
    title: str = "",
    x_label: str = "",
    y_label: str = "",
) -> None:
    """Write one SVG with a polyline per (label, xs, ys) series."""
    if not series:
        raise ValueError("need at least one series")
    all_x = [float(x) for _, xs, _ in series for x in xs]
    all_y = [float(y) for _, _, ys in series for y in ys]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)

    left, right = _MARGIN, _WIDTH - _MARGIN // 2
    top, bottom = _MARGIN // 2, _HEIGHT - _MARGIN

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}">',
        f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    if title:
        parts.append(
            f'<text x="{(_WIDTH) // 2}" y="{top - 6}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    for i, (label, xs, ys) in enumerate(series):
        px = _scale([float(v) for v in xs], x_lo, x_hi, left, right)
        py = _scale([float(v) for v in ys], y_lo, y_hi, bottom, top)
        points = " ".join(f"{x:.2f},{y:.2f}" for x, y in zip(px, py))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{points}"/>')
        if label:
            parts.append(
                f'<text x="{right - 4}" y="{top + 16 + 16 * i}" text-anchor="end" '
                f'font-family="sans-serif" font-size="12" fill="{color}">{label}</text>'
            )
    # axis extent labels
    parts.append(
        f'<text x="{left}" y="{bottom + 18}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x_lo:g}</text>'
    )
    parts.append(
        f'<text x="{right}" y="{bottom + 18}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x_hi:g}</text>'
    )
    parts.append(
        f'<text x="{left - 6}" y="{bottom}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y_lo:g}</text>'
    )
    parts.append(
        f'<text x="{left - 6}" y="{top + 10}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{y_hi:g}</text>'
    )
    if x_label:
        parts.append(
            f'<text x="{(left + right) // 2}" y="{_HEIGHT - 12}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{x_label}</text>'
        )
    if y_label:
        parts.append(
            f'<text x="14" y="{(top + bottom) // 2}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12" transform="rotate(-90 14 {(top + bottom) // 2})">'
            f"{y_label}</text>"
        )
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
