"""Minimal deterministic SVG line plots (no plotting library).

Byte-identical output for identical input: fixed canvas, fixed palette,
fixed float formatting.  One polyline per series, linear axes with ticks.
"""

import math

from .errors import ParameterError

__all__ = ["emit_svg"]

_W, _H = 640, 480
_ML, _MR, _MT, _MB = 72, 16, 20, 48
_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _nice_ticks(lo, hi, target=6):
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ParameterError("non-finite axis range")
    if lo == hi:
        lo -= 0.5
        hi += 0.5
    span = hi - lo
    raw = span / max(target - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * span:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _fmt(v):
    return f"{v:.2f}"


def _fmt_tick(v):
    s = f"{v:.6g}"
    return s


def emit_svg(series, xlabel, ylabel, path, title=None):
    """Write a standalone SVG 1.1 line plot.

    series: list of (label, xs, ys) with xs/ys equal-length non-empty
    sequences of finite numbers.  Returns the path written.
    """
    if not series:
        raise ParameterError("no series to plot")
    cleaned = []
    for label, xs, ys in series:
        xs = [float(v) for v in xs]
        ys = [float(v) for v in ys]
        if len(xs) == 0 or len(xs) != len(ys):
            raise ParameterError(f"series {label!r} empty or length-mismatched")
        pts = [(x, y) for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y)]
        if not pts:
            raise ParameterError(f"series {label!r} has no finite points")
        cleaned.append((str(label), pts))
    xlo = min(p[0] for _, pts in cleaned for p in pts)
    xhi = max(p[0] for _, pts in cleaned for p in pts)
    ylo = min(p[1] for _, pts in cleaned for p in pts)
    yhi = max(p[1] for _, pts in cleaned for p in pts)
    if xlo == xhi:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if ylo == yhi:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad_y = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad_y, yhi + pad_y

    def sx(x):
        return _ML + (x - xlo) / (xhi - xlo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - ylo) / (yhi - ylo) * (_H - _MT - _MB)

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
               f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">')
    out.append(f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>')
    # axes box
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="black" '
               f'stroke-width="1"/>')
    for t in _nice_ticks(xlo, xhi):
        if t < xlo or t > xhi:
            continue
        px = _fmt(sx(t))
        out.append(f'<line x1="{px}" y1="{_H - _MB}" x2="{px}" '
                   f'y2="{_H - _MB + 5}" stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{px}" y="{_H - _MB + 18}" font-size="11" '
                   f'text-anchor="middle" font-family="sans-serif">'
                   f'{_fmt_tick(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        if t < ylo or t > yhi:
            continue
        py = _fmt(sy(t))
        out.append(f'<line x1="{_ML - 5}" y1="{py}" x2="{_ML}" y2="{py}" '
                   f'stroke="black" stroke-width="1"/>')
        out.append(f'<text x="{_ML - 8}" y="{py}" font-size="11" '
                   f'text-anchor="end" dominant-baseline="middle" '
                   f'font-family="sans-serif">{_fmt_tick(t)}</text>')
    out.append(f'<text x="{_ML + (_W - _ML - _MR) / 2:.1f}" y="{_H - 12}" '
               f'font-size="13" text-anchor="middle" '
               f'font-family="sans-serif">{xlabel}</text>')
    out.append(f'<text x="16" y="{_MT + (_H - _MT - _MB) / 2:.1f}" '
               f'font-size="13" text-anchor="middle" '
               f'font-family="sans-serif" transform="rotate(-90 16 '
               f'{_MT + (_H - _MT - _MB) / 2:.1f})">{ylabel}</text>')
    if title:
        out.append(f'<text x="{_W / 2:.1f}" y="14" font-size="13" '
                   f'text-anchor="middle" font-family="sans-serif">'
                   f'{title}</text>')
    for idx, (label, pts) in enumerate(cleaned):
        color = _PALETTE[idx % len(_PALETTE)]
        coords = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in pts)
        out.append(f'<polyline points="{coords}" fill="none" '
                   f'stroke="{color}" stroke-width="1.5"/>')
    if len(cleaned) > 1:
        for idx, (label, _) in enumerate(cleaned):
            color = _PALETTE[idx % len(_PALETTE)]
            ly = _MT + 14 + 16 * idx
            out.append(f'<line x1="{_W - _MR - 150}" y1="{ly}" '
                       f'x2="{_W - _MR - 122}" y2="{ly}" stroke="{color}" '
                       f'stroke-width="1.5"/>')
            out.append(f'<text x="{_W - _MR - 116}" y="{ly + 4}" '
                       f'font-size="11" font-family="sans-serif">'
                       f'{label}</text>')
    out.append("</svg>")
    data = "\n".join(out) + "\n"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)
    return path
