"""Convergence experiment and timing benchmark for restarted block FOM.

The experiment computes ``exp(A) * I`` for a seeded random network tensor
in two ways:

``bcirc``
    Krylov iteration on ``bcirc(A)`` applied to ``E_1``.
``fourier``
    Krylov iteration on the block-diagonal Fourier operator ``D`` applied
    to ``(F kron I) E_1``; the result lives in Fourier coordinates and is
    compared with the transformed reference.

Both cases are run for each inner product scheme and restart length, and
every cycle is recorded together with its true error against the facewise
reference.
"""

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import tcore
from .bfomfom import restarted_bfomfom
from .densefun import EXP
from .errors import NonConvergenceError, QuadratureSaturationError
from .netcomm import random_network_tensor
from .spectral import apply_bcirc, face_diagonalize, t_function_facewise, to_fourier

__all__ = [
    "CASES",
    "CYCLE_COLUMNS",
    "BENCH_COLUMNS",
    "ExperimentConfig",
    "RunResult",
    "ExperimentResult",
    "run_convergence_experiment",
    "run_benchmark",
    "apply_scaling",
    "write_csv",
    "plot_convergence",
]

CASES = ("bcirc", "fourier")
CYCLE_COLUMNS = ("cycle", "scheme", "case", "m", "update_norm", "true_rel_error", "wall_time_ms")
BENCH_COLUMNS = ("benchmark", "scheme", "n", "p", "m", "repeats", "seconds")


@dataclass
class ExperimentConfig:
    n: int = 50
    p: int = 50
    density: float = 0.1
    seed: int = 0
    m: tuple = (5,)
    tol: float = 1e-12
    schemes: tuple = ("classical", "global")
    cases: tuple = CASES
    max_cycles: int = 50
    contour: str = "fixed"

    def __post_init__(self):
        self.m = tuple(int(v) for v in np.atleast_1d(self.m))
        self.schemes = tuple(self.schemes)
        self.cases = tuple(self.cases)
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if not self.m or min(self.m) < 1:
            raise ValueError("every restart length m must be at least 1")
        if not self.schemes or not set(self.schemes) <= {"classical", "global"}:
            raise ValueError(f"schemes must be a nonempty subset of classical/global, got {self.schemes}")
        if not self.cases or not set(self.cases) <= set(CASES):
            raise ValueError(f"cases must be a nonempty subset of {CASES}, got {self.cases}")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        if self.n < 2 or self.p < 1:
            raise ValueError("need n >= 2 and p >= 1")
        _check_cycle_length(max(self.m), self.p)


def _check_cycle_length(m, p):
    # the right-hand side has s = n columns, so m blocks fill m/p of the space
    if m > p:
        raise ValueError(f"restart length m={m} exceeds p={p}: the block basis would not fit")


@dataclass
class RunResult:
    scheme: str
    case: str
    m: int
    status: str  # converged, saturated or nonconverged
    history: object
    final_error: Optional[float]

    @property
    def cycles(self):
        return self.history.cycles

    def summary_entry(self):
        return str(self.cycles) if self.status == "converged" else self.status


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    runs: list = field(default_factory=list)

    def run(self, scheme, case, m):
        for r in self.runs:
            if (r.scheme, r.case, r.m) == (scheme, case, m):
                return r
        raise KeyError((scheme, case, m))

    def cycle_rows(self):
        """One row per cycle, in the column order of ``CYCLE_COLUMNS``."""
        rows = []
        for r in self.runs:
            for rec in r.history.records:
                rows.append(
                    (rec.cycle, r.scheme, r.case, r.m, rec.update_norm, rec.true_error, 1000.0 * rec.wall_time)
                )
        return rows

    def summary_rows(self):
        """Cycles to converge per (scheme, case) and restart length."""
        cfg = self.config
        header = ("scheme", "case") + tuple(f"m={m}" for m in cfg.m)
        rows = [header]
        for scheme in cfg.schemes:
            for case in cfg.cases:
                rows.append((scheme, case) + tuple(self.run(scheme, case, m).summary_entry() for m in cfg.m))
        return rows

    def summary_text(self):
        rows = self.summary_rows()
        widths = [max(len(str(row[i])) for row in rows) for i in range(len(rows[0]))]
        return "\n".join("  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows) + "\n"


def _problem(cfg):
    a = random_network_tensor(cfg.n, cfg.p, cfg.density, cfg.seed).tensor
    n, p = cfg.n, cfg.p
    reference = tcore.unfold(t_function_facewise(EXP, a, tcore.identity_tensor(n, p)))
    e1 = tcore.block_unit_vector(0, n, p)
    faces = face_diagonalize(a)
    return {
        "bcirc": (lambda v: apply_bcirc(a, v), e1, reference),
        "fourier": (faces.apply, to_fourier(e1, p), to_fourier(reference, p)),
    }


def run_convergence_experiment(cfg):
    """Run every (scheme, case, m) combination of `cfg`.

    Saturation and non-convergence do not abort the experiment; they are
    recorded as the run's status.
    """
    problems = _problem(cfg)
    result = ExperimentResult(cfg)
    for m in cfg.m:
        for scheme in cfg.schemes:
            for case in cfg.cases:
                op, b, ref = problems[case]
                try:
                    _, history = restarted_bfomfom(
                        EXP, op, b, scheme, m, tol=cfg.tol, max_cycles=cfg.max_cycles,
                        reference=ref, contour=cfg.contour,
                    )
                except (QuadratureSaturationError, NonConvergenceError) as exc:
                    history = exc.history
                final = history.records[-1].true_error if history.records else None
                result.runs.append(RunResult(scheme, case, m, history.status, history, final))
    return result


def _format(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(rows, columns, path=None):
    """Write `rows` as CSV with a header; returns the text.

    Floats are written with ``repr`` (shortest round-trip form, always a
    decimal point), missing values as empty fields, and lines end in ``\\n``.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def apply_scaling(sizes=(16, 32, 64), p=8, repeats=3, seed=0):
    """Time ``bcirc(A) @ unfold(B)`` for square ``n x n x p`` operands.

    Returns ``(rows, slope)`` where `slope` is the least-squares exponent of
    time against ``n``.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        a = rng.standard_normal((n, n, p))
        x = rng.standard_normal((n * p, n))
        apply_bcirc(a, x)  # warm up
        best = np.inf
        for _ in range(repeats):
            start = time.perf_counter()
            apply_bcirc(a, x)
            best = min(best, time.perf_counter() - start)
        rows.append(("apply_bcirc", "", n, p, "", repeats, best))
    times = np.array([r[-1] for r in rows])
    slope = float(np.polyfit(np.log(sizes), np.log(times), 1)[0])
    return rows, slope


def run_benchmark(n=50, p=50, m=5, cycles=3, density=0.1, seed=0, schemes=("classical", "global")):
    """Mean wall time per restart cycle of each scheme on the experiment problem.

    Runs `cycles` cycles of ``exp(bcirc(A)) E_1`` per scheme (stopping early
    is fine) and reports the mean over the recorded cycles.

    Returns
    -------
    rows : list of tuples in ``BENCH_COLUMNS`` order
    per_cycle : dict mapping scheme to seconds per cycle
    """
    _check_cycle_length(m, p)
    a = random_network_tensor(n, p, density, seed).tensor
    b = tcore.block_unit_vector(0, n, p)
    rows, per_cycle = [], {}
    for scheme in schemes:
        try:
            _, history = restarted_bfomfom(EXP, lambda v: apply_bcirc(a, v), b, scheme, m, max_cycles=cycles)
        except (QuadratureSaturationError, NonConvergenceError) as exc:
            history = exc.history
        times = [rec.wall_time for rec in history.records]
        per_cycle[scheme] = float(np.mean(times))
        rows.append(("cycle", scheme, n, p, m, len(times), per_cycle[scheme]))
    return rows, per_cycle


def plot_convergence(result, path):
    """Save an SVG of true relative error per cycle (log scale), one line per run.

    Needs matplotlib, which is an optional dependency.
    """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as exc:
        raise RuntimeError("plotting needs matplotlib (pip install 'artifact[plot]')") from exc
    fig, ax = plt.subplots(figsize=(6, 4))
    for r in result.runs:
        recs = [rec for rec in r.history.records if rec.true_error is not None]
        style = "-" if r.case == "bcirc" else "--"
        ax.semilogy(
            [rec.cycle for rec in recs],
            [max(rec.true_error, 1e-17) for rec in recs],
            style,
            marker="o",
            label=f"{r.scheme} {r.case} m={r.m}",
        )
    ax.axhline(result.config.tol, color="gray", linewidth=0.8)
    ax.set_xlabel("restart cycle")
    ax.set_ylabel("relative error")
    ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)
