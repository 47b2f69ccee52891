"""CSV, JSON and SVG writers plus the run manifest."""

import csv
import json
import os
from dataclasses import dataclass, field
from html import escape

import numpy as np

FLOAT_FMT = "%.17g"
METRIC_COLUMNS = ("step", "hellinger", "std_exact", "std_approx", "neg_exact", "neg_approx")
DISTRIBUTION_COLUMNS = ("step", "site", "phase_rad", "prob")


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return FLOAT_FMT % float(x)


def _jsonable(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


@dataclass
class RunManifest:
    command: str
    config: dict
    window: tuple
    seed: int
    output_dir: str
    emitted_files: list = field(default_factory=list)

    def path(self, name):
        return os.path.join(self.output_dir, name)

    def record(self, name, kind):
        self.emitted_files.append({"path": name, "kind": kind})
        return self.path(name)

    def write_csv(self, name, header, rows):
        with open(self.record(name, "csv"), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for row in rows:
                w.writerow([fmt(v) for v in row])

    def write_json(self, name, payload):
        with open(self.record(name, "json"), "w") as fh:
            json.dump(payload, fh, indent=2, default=_jsonable, allow_nan=True)
            fh.write("\n")

    def write_svg(self, name, series, title="", xlabel="", ylabel=""):
        with open(self.record(name, "svg"), "w") as fh:
            fh.write(line_plot_svg(series, title, xlabel, ylabel))

    def save(self):
        self.emitted_files.append({"path": "manifest.json", "kind": "manifest"})
        payload = {
            "command": self.command,
            "config": self.config,
            "window": list(self.window),
            "seed": self.seed,
            "output_dir": self.output_dir,
            "emitted_files": self.emitted_files,
        }
        with open(self.path("manifest.json"), "w") as fh:
            json.dump(payload, fh, indent=2, default=_jsonable)
            fh.write("\n")


def distribution_rows(probs):
    """Rows ``(step, site, phase, prob)`` for a ``(steps + 1, d)`` array."""
    steps, d = probs.shape
    phases = 2 * np.pi * np.arange(d) / d
    for t in range(steps):
        for m in range(d):
            yield t, m, phases[m], probs[t, m]


def metric_rows(report):
    n = len(report.hellinger_per_step)
    neg_e = report.negativity_exact if report.negativity_exact is not None else [None] * n
    neg_a = report.negativity_approx if report.negativity_approx is not None else [None] * n
    for t in range(n):
        yield t, report.hellinger_per_step[t], report.std_exact[t], report.std_approx[t], neg_e[t], neg_a[t]


COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def line_plot_svg(series, title="", xlabel="", ylabel="", width=640, height=400):
    """Polylines with bare axes. ``series`` maps a label to ``(x, y)`` arrays."""
    left, right, top, bottom = 60, 20, 30, 45
    xs = np.concatenate([np.asarray(x, float) for x, _ in series.values()])
    ys = np.concatenate([np.asarray(y, float) for _, y in series.values()])
    x0, x1 = float(xs.min()), float(xs.max())
    y0, y1 = min(0.0, float(ys.min())), float(ys.max())
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
        f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{left + pw / 2}" y="{height - 8}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>',
        f'<text x="14" y="{top + ph / 2}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 14 {top + ph / 2})">{escape(ylabel)}</text>',
        f'<text x="{left - 4}" y="{top + ph}" text-anchor="end" font-size="10">{y0:.3g}</text>',
        f'<text x="{left - 4}" y="{top + 8}" text-anchor="end" font-size="10">{y1:.3g}</text>',
        f'<text x="{left}" y="{top + ph + 14}" text-anchor="middle" font-size="10">{x0:.3g}</text>',
        f'<text x="{left + pw}" y="{top + ph + 14}" text-anchor="middle" font-size="10">{x1:.3g}</text>',
    ]
    for k, (label, (x, y)) in enumerate(series.items()):
        color = COLORS[k % len(COLORS)]
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"><title>{escape(label)}</title></polyline>')
        out.append(
            f'<text x="{left + pw - 4}" y="{top + 14 * (k + 1)}" text-anchor="end" font-size="11" '
            f'fill="{color}">{escape(label)}</text>'
        )
    out.append("</svg>\n")
    return "\n".join(out)
