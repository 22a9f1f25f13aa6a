"""Minimal deterministic SVG line-plot writer.

Pure string assembly: fixed canvas, fixed styles, fixed number
formatting, no timestamps or generated ids, so identical inputs yield
byte-identical files.
"""

WIDTH = 720
HEIGHT = 460
MARGIN_LEFT = 72
MARGIN_RIGHT = 168
MARGIN_TOP = 28
MARGIN_BOTTOM = 52

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
    "#bcbd22",
    "#e377c2",
)


def _fmt(v):
    return format(float(v), ".6g")


class Series:
    """One polyline: points plus draw style."""

    def __init__(self, label, xs, ys, color, dashed=False):
        self.label = label
        self.xs = list(xs)
        self.ys = list(ys)
        self.color = color
        self.dashed = dashed


def _nice_ticks(lo, hi, target=5):
    """Round tick positions covering [lo, hi]."""
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    raw = span / target
    import math

    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if span / step <= target + 0.5:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return ticks


def render_svg(series, x_label, y_label, title=""):
    """Assemble the SVG document for a list of Series."""
    if not series or all(len(s.xs) == 0 for s in series):
        raise ValueError("nothing to draw")
    xs = [x for s in series for x in s.xs]
    ys = [y for s in series for y in s.ys]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    y_pad = 0.05 * (y_hi - y_lo)
    y_lo -= y_pad
    y_hi += y_pad

    plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def px(x):
        return MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y):
        return MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = []
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    if title:
        out.append(
            f'<text x="{MARGIN_LEFT}" y="18" font-family="sans-serif" '
            f'font-size="14" fill="#222">{title}</text>'
        )

    # axes
    x0, y0 = MARGIN_LEFT, MARGIN_TOP + plot_h
    out.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" '
        f'stroke="#333" stroke-width="1"/>'
    )
    out.append(
        f'<line x1="{x0}" y1="{MARGIN_TOP}" x2="{x0}" y2="{y0}" '
        f'stroke="#333" stroke-width="1"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        x = px(t)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{y0}" x2="{_fmt(x)}" y2="{y0 + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{y0 + 20}" font-family="sans-serif" font-size="11" '
            f'fill="#333" text-anchor="middle">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(y_lo, y_hi):
        y = py(t)
        out.append(
            f'<line x1="{x0 - 5}" y1="{_fmt(y)}" x2="{x0}" y2="{_fmt(y)}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{x0 - 8}" y="{_fmt(y + 4)}" font-family="sans-serif" font-size="11" '
            f'fill="#333" text-anchor="end">{_fmt(t)}</text>'
        )
    out.append(
        f'<text x="{MARGIN_LEFT + plot_w / 2}" y="{HEIGHT - 14}" font-family="sans-serif" '
        f'font-size="13" fill="#222" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="18" y="{MARGIN_TOP + plot_h / 2}" font-family="sans-serif" '
        f'font-size="13" fill="#222" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_TOP + plot_h / 2})">{y_label}</text>'
    )

    # series
    for s in series:
        pts = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(s.xs, s.ys))
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(
            f'<polyline points="{pts}" fill="none" stroke="{s.color}" '
            f'stroke-width="1.6"{dash}/>'
        )

    # legend
    lx = MARGIN_LEFT + plot_w + 14
    ly = MARGIN_TOP + 8
    for i, s in enumerate(series):
        y = ly + 18 * i
        dash = ' stroke-dasharray="6 4"' if s.dashed else ""
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 26}" y2="{y}" '
            f'stroke="{s.color}" stroke-width="1.6"{dash}/>'
        )
        out.append(
            f'<text x="{lx + 32}" y="{y + 4}" font-family="sans-serif" font-size="11" '
            f'fill="#222">{s.label}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
