"""Static SVG charts written with plain SVG primitives.

Every bar and marker carries its data value in a ``data-value`` attribute and
as visible text, so the charts can be checked by parsing them back.
"""
from pathlib import Path
from xml.sax.saxutils import escape

W, H = 900, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 90
COLORS = ["#2b8a3e", "#868e96", "#c92a2a", "#1971c2", "#e8590c", "#7048e8"]


def _attr(s):
    return escape(str(s), {'"': "&quot;"})


def _fmt(v):
    return f"{v:.6g}" if isinstance(v, float) else str(v)


def _frame(title, parts, xlabel="", ylabel=""):
    plot_w, plot_h = W - LEFT - RIGHT, H - TOP - BOTTOM
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
        f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">',
        f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<line class="axis" x1="{LEFT}" y1="{TOP + plot_h}" x2="{LEFT + plot_w}" y2="{TOP + plot_h}" stroke="black"/>',
        f'<line class="axis" x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + plot_h}" stroke="black"/>',
    ]
    if xlabel:
        head.append(f'<text x="{LEFT + plot_w / 2}" y="{H - 8}" text-anchor="middle">{escape(xlabel)}</text>')
    if ylabel:
        head.append(f'<text x="14" y="{TOP + plot_h / 2}" transform="rotate(-90 14 {TOP + plot_h / 2})" '
                    f'text-anchor="middle">{escape(ylabel)}</text>')
    return "\n".join(head + parts + ["</svg>"]) + "\n"


def _no_data(title, xlabel="", ylabel=""):
    return _frame(title, [f'<text class="no-data" x="{W / 2}" y="{H / 2}" '
                          f'text-anchor="middle">no data</text>'], xlabel, ylabel)


def grouped_bars(title, groups, series, ylabel=""):
    """groups: list of (group name, [value per series])."""
    if not groups:
        return _no_data(title, ylabel=ylabel)
    plot_w, plot_h = W - LEFT - RIGHT, H - TOP - BOTTOM
    vmax = max([max(vals) for _, vals in groups] + [0]) or 1
    gw = plot_w / len(groups)
    bw = gw * 0.8 / len(series)
    parts = []
    for gi, (name, vals) in enumerate(groups):
        x0 = LEFT + gi * gw + gw * 0.1
        for si, v in enumerate(vals):
            h = plot_h * v / vmax
            x = x0 + si * bw
            y = TOP + plot_h - h
            parts.append(
                f'<rect class="bar" data-group="{_attr(name)}" data-series="{_attr(series[si])}" '
                f'data-value="{_fmt(v)}" x="{x:.2f}" y="{y:.2f}" width="{bw:.2f}" height="{h:.4f}" '
                f'fill="{COLORS[si % len(COLORS)]}"/>')
            parts.append(f'<text class="value" x="{x + bw / 2:.2f}" y="{y - 2:.2f}" '
                         f'text-anchor="middle" font-size="8">{_fmt(v)}</text>')
        cx = x0 + gw * 0.4
        parts.append(f'<text class="group" x="{cx:.2f}" y="{TOP + plot_h + 14}" '
                     f'transform="rotate(30 {cx:.2f} {TOP + plot_h + 14})">{escape(str(name))}</text>')
    for si, s in enumerate(series):
        parts.append(f'<rect x="{LEFT + 10 + si * 110}" y="{TOP - 14}" width="10" height="10" '
                     f'fill="{COLORS[si % len(COLORS)]}"/>')
        parts.append(f'<text x="{LEFT + 24 + si * 110}" y="{TOP - 5}">{escape(s)}</text>')
    parts.append(f'<text x="{LEFT - 6}" y="{TOP + 4}" text-anchor="end">{_fmt(vmax)}</text>')
    return _frame(title, parts, ylabel=ylabel)


def lines(title, series, xlabel="", ylabel=""):
    """series: name -> list of (x, y). A one-point series is drawn as a lone marker."""
    pts_all = [p for pts in series.values() for p in pts]
    if not pts_all:
        return _no_data(title, xlabel, ylabel)
    plot_w, plot_h = W - LEFT - RIGHT, H - TOP - BOTTOM
    xs = [p[0] for p in pts_all]
    ys = [p[1] for p in pts_all]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1

    def sx(x):
        return LEFT + plot_w * (x - x0) / (x1 - x0)

    def sy(y):
        return TOP + plot_h * (1 - (y - y0) / (y1 - y0))

    parts = []
    for si, (name, pts) in enumerate(series.items()):
        color = COLORS[si % len(COLORS)]
        if len(pts) > 1:
            path = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in pts)
            parts.append(f'<polyline class="line" data-series="{_attr(name)}" points="{path}" '
                         f'fill="none" stroke="{color}"/>')
        for x, y in pts:
            parts.append(f'<circle class="marker" data-series="{_attr(name)}" data-x="{_fmt(x)}" '
                         f'data-value="{_fmt(y)}" cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="3" fill="{color}"/>')
        parts.append(f'<text x="{LEFT + 10 + si * 140}" y="{TOP - 5}" fill="{color}">{escape(name)}</text>')
    for x in sorted(set(xs)):
        parts.append(f'<text class="tick" x="{sx(x):.2f}" y="{TOP + plot_h + 14}" '
                     f'text-anchor="middle">{_fmt(x)}</text>')
    parts.append(f'<text x="{LEFT - 6}" y="{TOP + 4}" text-anchor="end">{_fmt(y1)}</text>')
    parts.append(f'<text x="{LEFT - 6}" y="{TOP + plot_h}" text-anchor="end">{_fmt(y0)}</text>')
    return _frame(title, parts, xlabel, ylabel)


def summary_chart(summary):
    groups = [(f"{r.topic_id}: {r.label}", [r.positive, r.neutral, r.negative]) for r in summary]
    return grouped_bars("Topic based sentiment", groups, ["positive", "neutral", "negative"],
                        ylabel="tweets")


def coherence_chart(entries):
    return lines("Coherence by number of topics", {"coherence": list(entries)},
                 xlabel="topics (K)", ylabel="coherence")


def history_charts(rows):
    acc = {"train": [(r[0], r[2]) for r in rows], "validation": [(r[0], r[4]) for r in rows
                                                                 if r[4] == r[4]]}
    loss = {"train": [(r[0], r[1]) for r in rows], "validation": [(r[0], r[3]) for r in rows
                                                                  if r[3] == r[3]]}
    return (lines("Model accuracy", acc, "epoch", "accuracy"),
            lines("Model loss", loss, "epoch", "loss"))


def comparison_chart(rows):
    """rows: (topic_id, method, label, scs, winner)."""
    methods = []
    for r in rows:
        if r[1] not in methods:
            methods.append(r[1])
    by_topic = {}
    for k, m, _, s, _ in rows:
        by_topic.setdefault(k, {})[m] = s
    groups = [(str(k), [by_topic[k].get(m, 0.0) for m in methods]) for k in sorted(by_topic)]
    return grouped_bars("Topic label SCS by method", groups, methods, ylabel="soft cosine")


def render_charts(out_dir, summary=(), coherence=(), history=(), comparison=()):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    acc, loss = history_charts(list(history))
    files = {
        "topic_sentiment.svg": summary_chart(list(summary)),
        "coherence.svg": coherence_chart(list(coherence)),
        "accuracy.svg": acc,
        "loss.svg": loss,
        "label_scs.svg": comparison_chart(list(comparison)),
    }
    for name, svg in files.items():
        (out / name).write_text(svg, encoding="utf-8")
    return [out / n for n in files]
