"""SVG rendering of reinforcement factors with their null boxes.

Geometry: a vertical median line at ``x = CENTER_X``. An upward factor u is a
bar from the line to ``CENTER_X + u * PX_PER_UNIT``; a downward factor d is a
bar from ``CENTER_X - d * PX_PER_UNIT`` to the line. The null box of a bar is
drawn just above it on the same axis, so a significant factor is a bar that
reaches past its whisker. Every bar is a ``<rect>`` whose class starts with
``bar``; no other element uses that class.
"""
from __future__ import annotations

from xml.sax.saxutils import escape, quoteattr

from ordsurvey.errors import OrdSurveyError

PX_PER_UNIT = 200.0
LABEL_WIDTH = 170.0
MARGIN = 20.0
CENTER_X = LABEL_WIDTH + MARGIN + PX_PER_UNIT
WIDTH = CENTER_X + PX_PER_UNIT + 130.0
TRACK_HEIGHT = 44.0
HEADER_HEIGHT = 50.0
BAR_HEIGHT = 12.0
BOX_HEIGHT = 10.0

PALETTES = {
    "standard": {"up": "#d62728", "down": "#1f77b4"},
    "colorblind": {"up": "#e66100", "down": "#5e3c99"},
}


class UnknownAttribute(OrdSurveyError, KeyError):
    pass


def _f(x: float) -> str:
    return f"{x:.2f}"


def _x(direction: str, p: float) -> float:
    return CENTER_X + p * PX_PER_UNIT if direction == "up" else CENTER_X - p * PX_PER_UNIT


def _open(height: float, title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_f(WIDTH)}" '
        f'height="{_f(height)}" viewBox="0 0 {_f(WIDTH)} {_f(height)}" '
        'font-family="sans-serif" font-size="12">',
        f"<title>{escape(title)}</title>",
        f'<rect class="background" x="0" y="0" width="{_f(WIDTH)}" height="{_f(height)}" fill="white"/>',
        f'<text class="title" x="{_f(MARGIN)}" y="24" font-size="15">{escape(title)}</text>',
    ]


def _axis(n_tracks: int) -> list[str]:
    top = HEADER_HEIGHT - 8
    bottom = HEADER_HEIGHT + n_tracks * TRACK_HEIGHT
    out = [f'<line class="median-line" x1="{_f(CENTER_X)}" y1="{_f(top)}" '
           f'x2="{_f(CENTER_X)}" y2="{_f(bottom)}" stroke="black" stroke-width="1"/>']
    for p in (0.5, 1.0):
        for d in ("down", "up"):
            x = _x(d, p)
            out.append(f'<line class="gridline" x1="{_f(x)}" y1="{_f(top)}" x2="{_f(x)}" '
                       f'y2="{_f(bottom)}" stroke="#cccccc" stroke-dasharray="2,3"/>')
            out.append(f'<text class="tick" x="{_f(x)}" y="{_f(bottom + 14)}" '
                       f'text-anchor="middle">{p:g}</text>')
    return out


def _cell_marks(cell: dict, direction: str, y0: float, colors: dict, attrs: str) -> list[str]:
    """Box, whiskers and bar of one cell on the track starting at ``y0``."""
    out = []
    box_y = y0 + 4
    bar_y = box_y + BOX_HEIGHT + 4
    box = cell.get("box")
    if box is not None:
        lo, hi = sorted((_x(direction, box["q1"]), _x(direction, box["q3"])))
        wl, wh = sorted((_x(direction, box["whisker_low"]), _x(direction, box["whisker_high"])))
        mid = box_y + BOX_HEIGHT / 2
        out.append(f'<line class="whisker {direction}" x1="{_f(wl)}" y1="{_f(mid)}" x2="{_f(wh)}" '
                   f'y2="{_f(mid)}" stroke="#555555"/>')
        for wx in (wl, wh):
            out.append(f'<line class="whisker-cap {direction}" x1="{_f(wx)}" y1="{_f(box_y)}" '
                       f'x2="{_f(wx)}" y2="{_f(box_y + BOX_HEIGHT)}" stroke="#555555"/>')
        out.append(f'<rect class="box {direction}" x="{_f(lo)}" y="{_f(box_y)}" width="{_f(hi - lo)}" '
                   f'height="{_f(BOX_HEIGHT)}" fill="#eeeeee" stroke="#555555"/>')
        mx = _x(direction, box["median"])
        out.append(f'<line class="box-median {direction}" x1="{_f(mx)}" y1="{_f(box_y)}" '
                   f'x2="{_f(mx)}" y2="{_f(box_y + BOX_HEIGHT)}" stroke="#000000"/>')
    p = cell.get("factor")
    if p is None:
        tx = CENTER_X + 6 if direction == "up" else CENTER_X - 6
        anchor = "start" if direction == "up" else "end"
        out.append(f'<text class="na {direction}" x="{_f(tx)}" y="{_f(bar_y + BAR_HEIGHT - 2)}" '
                   f'text-anchor="{anchor}" fill="#777777">n/a</text>')
        return out
    x0, x1 = sorted((CENTER_X, _x(direction, p)))
    sig = " significant" if cell.get("significant") else ""
    out.append(f'<rect class="bar {direction}{sig}" x="{_f(x0)}" y="{_f(bar_y)}" width="{_f(x1 - x0)}" '
               f'height="{_f(BAR_HEIGHT)}" fill="{colors[direction]}" {attrs} '
               f'data-direction="{direction}" data-factor="{p:.6f}"/>')
    lx = x1 + 4 if direction == "up" else x0 - 4
    anchor = "start" if direction == "up" else "end"
    star = "*" if sig else ""
    out.append(f'<text class="factor-label {direction}" x="{_f(lx)}" y="{_f(bar_y + BAR_HEIGHT - 2)}" '
               f'text-anchor="{anchor}" font-size="10">{p:.2f}{star}</text>')
    return out


def _legend(height: float, colors: dict) -> list[str]:
    y = height - 14
    return [
        f'<rect class="legend" x="{_f(MARGIN)}" y="{_f(y - 9)}" width="10" height="10" fill="{colors["down"]}"/>',
        f'<text class="legend" x="{_f(MARGIN + 14)}" y="{_f(y)}">downward: decrease lowers response</text>',
        f'<rect class="legend" x="{_f(CENTER_X + 20)}" y="{_f(y - 9)}" width="10" height="10" fill="{colors["up"]}"/>',
        f'<text class="legend" x="{_f(CENTER_X + 34)}" y="{_f(y)}">upward: increase raises response</text>',
    ]


def _height(n_tracks: int) -> float:
    return HEADER_HEIGHT + n_tracks * TRACK_HEIGHT + 50


def find_attribute(report: dict, name: str) -> dict:
    for attr in report["attributes"]:
        if attr["name"] == name:
            return attr
    raise UnknownAttribute(name)


def render_attribute_plot(report: dict, attribute: str, palette: str = "standard") -> str:
    """One track per scale value, upward bars right of the median line, downward bars left."""
    attr = find_attribute(report, attribute)
    colors = PALETTES[palette]
    tracks = attr["values"]
    height = _height(len(tracks))
    out = _open(height, f"{attr['name']}: value-level reinforcement ({attr['label']})")
    out += _axis(len(tracks))
    for i, cell in enumerate(tracks):
        y0 = HEADER_HEIGHT + i * TRACK_HEIGHT
        out.append(f'<text class="track-label" x="{_f(MARGIN)}" y="{_f(y0 + 26)}">value {cell["value"]}</text>')
        attrs = f'data-attribute={quoteattr(attr["name"])} data-value="{cell["value"]}"'
        for d in ("down", "up"):
            out += _cell_marks(cell[d], d, y0, colors, attrs)
    out += _legend(height, colors)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def summary_order(report: dict) -> list[dict]:
    """Attributes by max(up, down) aggregate factor, descending; undefined counts as 0."""
    def strength(attr):
        vals = [attr["aggregate"][d]["factor"] for d in ("up", "down")]
        return max(v if v is not None else 0.0 for v in vals)
    return sorted(report["attributes"], key=strength, reverse=True)


def render_summary_plot(report: dict, palette: str = "standard") -> str:
    """Attribute-level bars and boxes, strongest attribute first, Kano label per track."""
    colors = PALETTES[palette]
    attrs = summary_order(report)
    height = _height(len(attrs))
    out = _open(height, "Attribute-level reinforcement factors")
    out += _axis(len(attrs))
    for i, attr in enumerate(attrs):
        y0 = HEADER_HEIGHT + i * TRACK_HEIGHT
        out.append(f'<text class="track-label" x="{_f(MARGIN)}" y="{_f(y0 + 20)}">{escape(attr["name"])}</text>')
        out.append(f'<text class="kano-label" x="{_f(MARGIN)}" y="{_f(y0 + 34)}" font-size="10" '
                   f'fill="#555555">{escape(attr["label"])}</text>')
        data = f'data-attribute={quoteattr(attr["name"])} data-value="all"'
        for d in ("down", "up"):
            out += _cell_marks(attr["aggregate"][d], d, y0, colors, data)
    out += _legend(height, colors)
    out.append("</svg>")
    return "\n".join(out) + "\n"
