"""Batch experiment runner.

Usage::

    skewwalk COMMAND [--alpha A[,A...]] [--n N[,N...]] [--horizon H]
                     [--replicates R] [--seed S] [--output DIR] [--format csv|json]

Each run writes ``DIR/<command>.<format>`` and ``DIR/manifest.json``. The
default DIR is ``$SKEWWALK_OUTPUT_DIR`` or ``./skewwalk-out``.

Data file columns (fixed per command):

    pmf             k, m, prob
    convolution     name, index, value, partial_sum
    tauberian       name, n, theta, c, partial_sum, ratio
    moments         alpha, n, j, k, fourth_moment, ratio, diagonal,
                    square_square, square_cross, full_cross
    tightness-scan  alpha, n, j, k, fourth_moment, ratio
    simulate        alpha, n, sampler, m, count, empirical_prob, exact_prob
    converge        alpha, n, t, ks_exact

Exit status: 0 success, 1 no command given, 2 usage error, 3 resource or I/O
error, 4 internal assertion failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .asymptotics import g_seq, mu_seq, nu_seq, partial_sums, tauberian_ratio
from .lattice import ResourceLimitError, SkewParam, exact_pmf
from .moments import decomposition_terms, fourth_moment_exact, tightness_scan
from .rng import RngContract
from .simulate import ks_statistic, sample_endpoints

COMMANDS = ("pmf", "convolution", "tauberian", "moments", "tightness-scan", "simulate", "converge")
FORMATS = ("csv", "json")
OUTPUT_ENV = "SKEWWALK_OUTPUT_DIR"

EXIT_OK, EXIT_NO_COMMAND, EXIT_USAGE, EXIT_RESOURCE, EXIT_INTERNAL = 0, 1, 2, 3, 4

COLUMNS = {
    "pmf": ("k", "m", "prob"),
    "convolution": ("name", "index", "value", "partial_sum"),
    "tauberian": ("name", "n", "theta", "c", "partial_sum", "ratio"),
    "moments": ("alpha", "n", "j", "k", "fourth_moment", "ratio", "diagonal",
                "square_square", "square_cross", "full_cross"),
    "tightness-scan": ("alpha", "n", "j", "k", "fourth_moment", "ratio"),
    "simulate": ("alpha", "n", "sampler", "m", "count", "empirical_prob", "exact_prob"),
    "converge": ("alpha", "n", "t", "ks_exact"),
}

# (theta, c) with c the constant of the generating function near t = 1
TAUBERIAN_SEQS = {"g": (0.5, 1.0 / math.sqrt(2.0)), "mu": (1.0, 0.5), "nu": (2.0, 0.25)}


@dataclass
class ExperimentConfig:
    command: str
    alpha: list[float] = field(default_factory=lambda: [0.7])
    n: list[int] = field(default_factory=lambda: [64])
    horizon: float = 1.0
    replicates: int = 100_000
    seed: int = 0
    output_path: str = ""
    format: str = "csv"
    workers: int = 1
    j: int | None = None
    k: int | None = None

    def to_argv(self) -> list[str]:
        argv = [
            self.command,
            "--alpha", ",".join(repr(a) for a in self.alpha),
            "--n", ",".join(str(v) for v in self.n),
            "--horizon", repr(self.horizon),
            "--replicates", str(self.replicates),
            "--seed", str(self.seed),
            "--output", self.output_path,
            "--format", self.format,
            "--workers", str(self.workers),
        ]
        if self.j is not None:
            argv += ["--j", str(self.j)]
        if self.k is not None:
            argv += ["--k", str(self.k)]
        return argv


def _alpha_list(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number in {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    for v in vals:
        if not 0.0 < v < 1.0:
            raise argparse.ArgumentTypeError("alpha must lie in (0,1)")
    return vals


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer in {text!r}")
    if not vals or min(vals) < 1:
        raise argparse.ArgumentTypeError("n must be a positive integer or list")
    return vals


def _positive(kind):
    def conv(text):
        try:
            v = kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"malformed number {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError("must be positive")
        return v
    return conv


def _nonneg_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer {text!r}")
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skewwalk", description="Skew random walk laboratory.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--alpha", type=_alpha_list, default=[0.7], help="skewness, or comma list")
    ap.add_argument("--n", type=_int_list, default=[64], help="scale / step count, or comma list")
    ap.add_argument("--horizon", type=_positive(float), default=1.0)
    ap.add_argument("--replicates", type=_positive(int), default=100_000)
    ap.add_argument("--seed", type=_nonneg_int, default=0)
    ap.add_argument("--output", default=None, help=f"output directory (default ${OUTPUT_ENV} or ./skewwalk-out)")
    ap.add_argument("--format", choices=FORMATS, default="csv")
    ap.add_argument("--workers", type=_positive(int), default=1)
    ap.add_argument("--j", type=_nonneg_int, default=None, help="moments: start index (default 0)")
    ap.add_argument("--k", type=_positive(int), default=None, help="moments: end index (default n*horizon)")
    return ap


def parse_config(argv) -> ExperimentConfig:
    """Validated config; argparse exits with status 2 on bad input."""
    ap = build_parser()
    ns = ap.parse_args(list(argv))
    if ns.command == "pmf" and len(ns.alpha) != 1:
        ap.error("argument --alpha: pmf takes a single alpha")
    if ns.j is not None and ns.k is not None and ns.j >= ns.k:
        ap.error("argument --j: need j < k")
    out = ns.output if ns.output is not None else os.environ.get(OUTPUT_ENV, "skewwalk-out")
    return ExperimentConfig(ns.command, ns.alpha, ns.n, ns.horizon, ns.replicates, ns.seed,
                            out, ns.format, ns.workers, ns.j, ns.k)


# ---------------------------------------------------------------------------
# commands


def _rows_pmf(cfg):
    rows = []
    for k in cfg.n:
        for m, prob in exact_pmf(cfg.alpha[0], k).to_dict().items():
            rows.append((k, m, prob))
    return rows


def _rows_convolution(cfg):
    kmax = max(cfg.n)
    rows = []
    for seq in (g_seq(kmax), mu_seq(kmax), nu_seq(kmax)):
        ps = partial_sums(seq).values
        rows += [(seq.label, i, float(v), float(s)) for i, (v, s) in enumerate(zip(seq.values, ps))]
    return rows


def _rows_tauberian(cfg):
    kmax = max(cfg.n)
    rows = []
    for seq in (g_seq(kmax), mu_seq(kmax), nu_seq(kmax)):
        theta, c = TAUBERIAN_SEQS[seq.label]
        ps = partial_sums(seq).values
        ratio = tauberian_ratio(seq, theta, c)
        rows += [(seq.label, n, theta, c, float(ps[n]), float(ratio[n])) for n in cfg.n]
    return rows


def _rows_moments(cfg):
    rows = []
    for a in cfg.alpha:
        for n in cfg.n:
            j = cfg.j if cfg.j is not None else 0
            k = cfg.k if cfg.k is not None else int(math.floor(n * cfg.horizon))
            if j >= k:
                raise ValueError(f"need j < k, got j={j}, k={k}")
            m4 = fourth_moment_exact(a, j, k) / n**2
            terms = decomposition_terms(a, j, k)
            rows.append((a, n, j, k, m4, m4 / ((k - j) / n) ** 2, *terms))
    return rows


def _rows_scan(cfg):
    reports = tightness_scan(cfg.alpha, cfg.n, cfg.horizon, nongrid=0, seed=cfg.seed, workers=cfg.workers)
    return [(r.alpha, s.n, s.j, s.k, s.fourth_moment, s.sup_ratio) for r in reports for s in r.scales]


def _rows_simulate(cfg):
    rows = []
    stream = 0
    for a in cfg.alpha:
        for n in cfg.n:
            exact = exact_pmf(a, n)
            for sampler in ("direct", "excursion"):
                ends = sample_endpoints(a, n, cfg.replicates, RngContract(cfg.seed, stream), sampler,
                                        workers=cfg.workers)
                stream += 1
                pts, counts = np.unique(ends, return_counts=True)
                for m, c in zip(pts, counts):
                    rows.append((a, n, sampler, int(m), int(c), c / cfg.replicates, exact[int(m)]))
    return rows


def _rows_converge(cfg):
    t = cfg.horizon

    def one(a):
        return [(a, n, t, ks_statistic(a, n, t)) for n in cfg.n]

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            parts = list(ex.map(one, cfg.alpha))
    else:
        parts = [one(a) for a in cfg.alpha]
    return [r for part in parts for r in part]


RUNNERS = {
    "pmf": _rows_pmf,
    "convolution": _rows_convolution,
    "tauberian": _rows_tauberian,
    "moments": _rows_moments,
    "tightness-scan": _rows_scan,
    "simulate": _rows_simulate,
    "converge": _rows_converge,
}


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else _fmt(v)
    if isinstance(v, np.integer):
        return int(v)
    return v


def render(cfg: ExperimentConfig, rows) -> bytes:
    cols = COLUMNS[cfg.command]
    if cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue().encode()
    # workers and output location do not affect content, so they stay out of the data bytes
    echo = {k: v for k, v in asdict(cfg).items() if k not in ("workers", "output_path")}
    doc = {
        "manifest": {"config": echo, "version": __version__, "seed": cfg.seed},
        "rows": [{c: _jsonable(v) for c, v in zip(cols, r)} for r in rows],
    }
    return (json.dumps(doc, indent=1, sort_keys=True) + "\n").encode()


def run(cfg: ExperimentConfig) -> dict:
    """Execute one command, write its data file and manifest, return the manifest."""
    SkewParam(cfg.alpha[0])  # re-validate configs built by hand
    rows = RUNNERS[cfg.command](cfg)
    data = render(cfg, rows)
    out = Path(cfg.output_path)
    out.mkdir(parents=True, exist_ok=True)
    name = f"{cfg.command}.{cfg.format}"
    (out / name).write_bytes(data)
    manifest = {
        "config": asdict(cfg),
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "seed": cfg.seed,
        "digests": {name: hashlib.sha256(data).hexdigest()},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True) + "\n")
    return manifest


def config_from_manifest(manifest: dict) -> ExperimentConfig:
    return ExperimentConfig(**manifest["config"])


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        build_parser().print_usage(sys.stderr)
        return EXIT_NO_COMMAND
    try:
        cfg = parse_config(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        manifest = run(cfg)
    except (ResourceLimitError, MemoryError, OSError) as e:
        print(f"skewwalk: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except AssertionError as e:
        print(f"skewwalk: internal check failed: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except ValueError as e:
        print(f"skewwalk: {e}", file=sys.stderr)
        return EXIT_USAGE
    for name, digest in manifest["digests"].items():
        print(f"{Path(cfg.output_path) / name}  sha256={digest}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
