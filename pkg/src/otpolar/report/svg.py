"""Single-file SVG line chart, one polyline per curve."""

from __future__ import annotations

from xml.sax.saxutils import escape

from ..bounds import BoundCurve

WIDTH, HEIGHT = 1000, 600
LEFT, RIGHT, TOP, BOTTOM = 80, 200, 30, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


def render_svg(curves: list[BoundCurve], y_max: float | None = None) -> str:
    if not curves:
        raise ValueError("nothing to plot")
    q0 = min(float(c.q[0]) for c in curves)
    q1 = max(float(c.q[-1]) for c in curves)
    if y_max is None:
        y_max = max(float(c.rate.max()) for c in curves) or 1.0
    pw, ph = WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM

    def sx(q):
        return LEFT + (q - q0) / (q1 - q0) * pw

    def sy(r):
        return TOP + ph - min(r, y_max) / y_max * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for k in range(6):
        q = q0 + (q1 - q0) * k / 5
        r = y_max * k / 5
        out.append(f'<text x="{sx(q):.1f}" y="{TOP + ph + 20}" text-anchor="middle" font-size="14">{q:.2f}</text>')
        out.append(f'<text x="{LEFT - 8}" y="{sy(r) + 5:.1f}" text-anchor="end" font-size="14">{r:.3g}</text>')
    out.append(f'<text x="{LEFT + pw / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-size="16">q</text>')
    out.append(
        f'<text x="20" y="{TOP + ph / 2}" text-anchor="middle" font-size="16" '
        f'transform="rotate(-90 20 {TOP + ph / 2})">rate</text>'
    )
    for i, c in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(float(q)):.2f},{sy(float(r)):.2f}" for q, r in zip(c.q, c.rate))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = TOP + 20 + 22 * i
        out.append(f'<line x1="{WIDTH - RIGHT + 15}" y1="{ly}" x2="{WIDTH - RIGHT + 40}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{WIDTH - RIGHT + 46}" y="{ly + 5}" font-size="14">{escape(c.method.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
