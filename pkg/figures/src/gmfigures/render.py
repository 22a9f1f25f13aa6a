"""Figure jobs over the gmscore CSV artifacts.

Four kinds, one per CSV schema:

  landscape  -- theta, loss_sm, loss_ddsm, loss_ml
  densities  -- theta, x, density, score  (densities solid, scores dashed)
  sweep      -- the estimator sweep schema; plots per-estimator median
                absolute error against mu (medians, not means: flat-loss
                outliers make means unstable)
  bounds     -- name, lhs, rhs, ...; lhs solid vs rhs dashed per report

Rendering is deterministic: byte-identical SVG for identical input.
"""

import csv
from dataclasses import dataclass, field
from statistics import median

from .svg import PALETTE, Series, render_svg

KINDS = ("landscape", "densities", "sweep", "bounds")

REQUIRED_COLUMNS = {
    "landscape": ("theta", "loss_sm", "loss_ddsm", "loss_ml"),
    "densities": ("theta", "x", "density", "score"),
    "sweep": ("mu", "estimator", "abs_error"),
    "bounds": ("name", "lhs", "rhs"),
}


class SchemaError(ValueError):
    """Input CSV does not match the schema for the figure kind."""


@dataclass(frozen=True)
class FigureJob:
    kind: str
    input_csv: str
    output_image: str
    style: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r}")


def _read_table(path, kind):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        for column in REQUIRED_COLUMNS[kind]:
            if column not in reader.fieldnames:
                raise SchemaError(f"{path}: missing column '{column}'")
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def median_abs_error_by_group(rows):
    """Per-(estimator, mu) median of abs_error, exact arithmetic."""
    groups = {}
    for r in rows:
        key = (r["estimator"], float(r["mu"]))
        groups.setdefault(key, []).append(float(r["abs_error"]))
    return {key: median(vals) for key, vals in groups.items()}


def _color(style, key, index):
    if key in style and "color" in style[key]:
        return style[key]["color"]
    return PALETTE[index % len(PALETTE)]


def _landscape_series(rows, style):
    thetas = [float(r["theta"]) for r in rows]
    out = []
    for i, (column, label) in enumerate(
        (("loss_sm", "SM"), ("loss_ddsm", "DDSM"), ("loss_ml", "ML"))
    ):
        ys = [float(r[column]) for r in rows]
        out.append(Series(label, thetas, ys, _color(style, label, i)))
    return out, "theta", "centered loss"


def _densities_series(rows, style):
    by_theta = {}
    for r in rows:
        by_theta.setdefault(float(r["theta"]), []).append(r)
    out = []
    for i, theta in enumerate(sorted(by_theta)):
        chunk = sorted(by_theta[theta], key=lambda r: float(r["x"]))
        xs = [float(r["x"]) for r in chunk]
        color = _color(style, f"theta={theta:g}", i)
        out.append(
            Series(f"density theta={theta:g}", xs, [float(r["density"]) for r in chunk], color)
        )
        out.append(
            Series(
                f"score theta={theta:g}",
                xs,
                [float(r["score"]) for r in chunk],
                color,
                dashed=True,
            )
        )
    return out, "x", "density (solid) / score (dashed)"


def _sweep_series(rows, style):
    medians = median_abs_error_by_group(rows)
    estimators = sorted({key[0] for key in medians})
    out = []
    for i, est in enumerate(estimators):
        mus = sorted(mu for e, mu in medians if e == est)
        out.append(
            Series(est, mus, [medians[(est, mu)] for mu in mus], _color(style, est, i))
        )
    return out, "mu", "median |theta_hat - theta0|"


def _bounds_series(rows, style):
    idx = list(range(1, len(rows) + 1))
    lhs = [float(r["lhs"]) for r in rows]
    rhs = [float(r["rhs"]) for r in rows]
    return (
        [
            Series("lhs", idx, lhs, _color(style, "lhs", 0)),
            Series("rhs (bound)", idx, rhs, _color(style, "rhs", 1), dashed=True),
        ],
        "report index",
        "bound sides",
    )


_BUILDERS = {
    "landscape": _landscape_series,
    "densities": _densities_series,
    "sweep": _sweep_series,
    "bounds": _bounds_series,
}


def render(job):
    """Render one FigureJob to its SVG path; returns the path.

    Schema mismatches raise SchemaError (naming the missing column) before
    anything is written.
    """
    rows = _read_table(job.input_csv, job.kind)
    series, x_label, y_label = _BUILDERS[job.kind](rows, job.style)
    document = render_svg(series, x_label, y_label, title=job.kind)
    with open(job.output_image, "w") as fh:
        fh.write(document)
    return job.output_image
