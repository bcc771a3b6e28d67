#!/usr/bin/env python3
"""Batch figure rendering for the simulation CLI's CSV outputs.

Consumes only the public artifact contract: CSV files with the header
``x,y,ci_low,ci_high,n_trials`` plus an optional ``<name>.meta.json``
sidecar. Four figure kinds are supported:

- ``ccdf``     PAPR CCDF, log-y
- ``psd``      power spectral density, peak-normalized to 0 dB
- ``mdp``      missed-detection probability vs SNR, log-y with
               confidence bands
- ``geometry`` residual timing/frequency offset vs positioning
               uncertainty radius

Driven either by a JSON spec file (``plots.py --spec spec.json``) or
directly (``plots.py --kind mdp a.csv b.csv -o fig.png``). Output is
deterministic: embedded timestamps are disabled so identical inputs
produce identical image bytes.
"""

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
# fixed salt so SVG element ids do not vary between runs
matplotlib.rcParams["svg.hashsalt"] = "otfs-rach-plots"

import matplotlib.pyplot as plt  # noqa: E402

EXIT_BAD_INPUT = 2

KINDS = ("ccdf", "psd", "mdp", "geometry")
HEADER = "x,y,ci_low,ci_high,n_trials"


class PlotError(Exception):
    """Input problem that should abort rendering with a message."""


@dataclass
class Series:
    """One CSV file: columns plus its sidecar metadata."""

    path: Path
    x: list[float]
    y: list[float]
    ci_low: list[float]
    ci_high: list[float]
    n_trials: list[int]
    metadata: dict = field(default_factory=dict)


@dataclass
class PlotSpec:
    kind: str
    inputs: list[str]
    output: str
    labels: list[str] | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(f"unknown plot kind {self.kind!r}; "
                            f"expected one of {KINDS}")
        if not self.inputs:
            raise PlotError("at least one input CSV is required")
        if not self.output:
            raise PlotError("an output image path is required")
        if self.labels is not None and len(self.labels) != len(self.inputs):
            raise PlotError(f"{len(self.labels)} labels given for "
                            f"{len(self.inputs)} inputs")


def load_series(path: str | Path) -> Series:
    """Parse one CSV + optional meta.json sidecar, validating every row."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise PlotError(f"{path}: {exc}")
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        got = lines[0].strip() if lines else "<empty file>"
        raise PlotError(f"{path}: row 1: expected header {HEADER!r}, "
                        f"got {got!r}")
    cols: tuple[list, ...] = ([], [], [], [], [])
    for row_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise PlotError(f"{path}: row {row_no}: expected 5 fields, "
                            f"got {len(parts)}")
        try:
            for j in range(4):
                cols[j].append(float(parts[j]))
            cols[4].append(int(parts[4]))
        except ValueError as exc:
            raise PlotError(f"{path}: row {row_no}: {exc}")
    if not cols[0]:
        raise PlotError(f"{path}: no data rows")
    metadata = {}
    meta_path = path.with_suffix(".meta.json")
    if meta_path.exists():
        try:
            metadata = json.loads(meta_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise PlotError(f"{meta_path}: {exc}")
    return Series(path=path, x=cols[0], y=cols[1], ci_low=cols[2],
                  ci_high=cols[3], n_trials=cols[4], metadata=metadata)


def _default_label(kind: str, s: Series) -> str:
    meta = s.metadata
    if kind == "mdp":
        mdp = meta.get("mdp", {})
        if mdp:
            return (f"CFO {float(mdp.get('cfo_hz', 0.0)) / 1e3:g} kHz, "
                    f"$N_U$={mdp.get('n_users', 1)}")
    elif kind == "ccdf":
        if "n_roots" in meta:
            return f"{meta['n_roots']} roots"
    elif kind == "geometry":
        return ("residual CFO" if meta.get("series") == "cfo_hz"
                else "residual TO")
    return s.path.stem


def _save(fig, output: str) -> None:
    out = Path(output)
    suffix = out.suffix.lower()
    # strip the format-dependent timestamp fields so identical inputs
    # produce identical bytes
    metadata: dict | None = None
    if suffix == ".svg":
        metadata = {"Date": None}
    elif suffix == ".pdf":
        metadata = {"CreationDate": None}
    fig.savefig(out, dpi=150, metadata=metadata)


def render(spec: PlotSpec) -> Path:
    """Render the figure described by spec; returns the output path."""
    series = [load_series(p) for p in spec.inputs]
    labels = spec.labels or [_default_label(spec.kind, s) for s in series]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    try:
        if spec.kind == "ccdf":
            for s, lab in zip(series, labels):
                ax.semilogy(s.x, s.y, label=lab)
            ax.set_xlabel("PAPR threshold (dB)")
            ax.set_ylabel("CCDF")
        elif spec.kind == "psd":
            for s, lab in zip(series, labels):
                peak = max(s.y)
                y = [v - peak for v in s.y]  # normalize peak to 0 dB
                ax.plot([f / 1e6 for f in s.x], y, label=lab)
            ax.set_xlabel("frequency (MHz)")
            ax.set_ylabel("PSD (dB, peak-normalized)")
        elif spec.kind == "mdp":
            floor = 1e-6
            for s, lab in zip(series, labels):
                y = [max(v, floor) for v in s.y]
                line, = ax.semilogy(s.x, y, marker="o", label=lab)
                if all(math.isfinite(v) for v in s.ci_low):
                    lo = [max(v, floor) for v in s.ci_low]
                    hi = [max(v, floor) for v in s.ci_high]
                    ax.fill_between(s.x, lo, hi, alpha=0.2,
                                    color=line.get_color())
            ax.set_xlabel("SNR (dB)")
            ax.set_ylabel("missed detection probability")
        else:  # geometry
            cfo_ax = None
            for s, lab in zip(series, labels):
                if s.metadata.get("series") == "cfo_hz":
                    cfo_ax = cfo_ax or ax.twinx()
                    cfo_ax.plot(s.x, [v / 1e3 for v in s.y], "C1--",
                                label=lab)
                    cfo_ax.set_ylabel("max residual CFO (kHz)")
                else:
                    ax.plot(s.x, [v * 1e6 for v in s.y], "C0-", label=lab)
                    ax.set_ylabel("max residual TO (us)")
            ax.set_xlabel("position uncertainty radius (m)")
            if cfo_ax is not None:
                h1, l1 = ax.get_legend_handles_labels()
                h2, l2 = cfo_ax.get_legend_handles_labels()
                ax.legend(h1 + h2, l1 + l2)
        if spec.kind != "geometry" or not any(
                s.metadata.get("series") == "cfo_hz" for s in series):
            ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        if spec.title:
            ax.set_title(spec.title)
        fig.tight_layout()
        _save(fig, spec.output)
    finally:
        plt.close(fig)
    return Path(spec.output)


def spec_from_file(path: str) -> PlotSpec:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise PlotError(f"{path}: {exc}")
    if not isinstance(raw, dict):
        raise PlotError(f"{path}: spec must be a JSON object")
    unknown = set(raw) - {"kind", "inputs", "output", "labels", "title"}
    if unknown:
        raise PlotError(f"{path}: unknown spec fields {sorted(unknown)}")
    try:
        return PlotSpec(kind=raw.get("kind", ""),
                        inputs=list(raw.get("inputs", [])),
                        output=raw.get("output", ""),
                        labels=raw.get("labels"),
                        title=raw.get("title"))
    except TypeError as exc:
        raise PlotError(f"{path}: {exc}")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plots.py",
        description="Render figures from experiment CSV outputs")
    parser.add_argument("--spec", help="JSON plot spec file")
    parser.add_argument("--kind", choices=KINDS)
    parser.add_argument("inputs", nargs="*", help="input CSV files")
    parser.add_argument("-o", "--output", help="output image path")
    parser.add_argument("--labels", nargs="*", default=None)
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        if args.spec:
            if args.kind or args.inputs or args.output:
                raise PlotError("--spec cannot be combined with "
                                "--kind/inputs/-o")
            spec = spec_from_file(args.spec)
        else:
            if not args.kind:
                raise PlotError("either --spec or --kind is required")
            if not args.output:
                raise PlotError("-o/--output is required with --kind")
            spec = PlotSpec(kind=args.kind, inputs=args.inputs,
                            output=args.output, labels=args.labels,
                            title=args.title)
        out = render(spec)
    except PlotError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
