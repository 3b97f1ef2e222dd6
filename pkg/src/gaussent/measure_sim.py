"""Nine-kind entanglement estimation and the ten-vs-nine Monte-Carlo study.

Measurement model: each "kind" is a homodyne measurement of one quadrature
combination whose outcomes are ``N(0, v)`` with ``v`` the targeted variance.
The variance is estimated by the unbiased sample variance.

Off-diagonal entries are never measured directly.  A quarter-period rotation
``(1/sqrt 2) [[1, -1], [1, 1]]`` of one mode turns ``x`` into
``(x - p)/sqrt 2`` with variance ``(g_11 + g_22 - 2 g_12) / 2``; the same
combination across two modes is produced by a 50:50 beam splitter.  So

    g_ij = (g_ii + g_jj) / 2 - v_ij.
"""
import csv
import io
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .covariance import (
    as_gamma,
    is_valid_cm,
    simon_invariants,
    symplectic_eigenvalues,
    williamson,
)
from .entanglement import ModeSplit, partial_transpose_cm
from .exceptions import DegenerateInputError, DimensionError, InvalidPlanError
from .symplectic import direct_sum
from .tolerances import TOL_UNC

STRATEGIES = ("ten_entries", "nine_kinds")
SAMPLERS = ("normal", "chi2", "exact")
CSV_HEADER = ("log10_n", "delta_ten", "delta_nine")


def _offdiag(v_ii, v_jj, v_mix):
    """Recover ``g_ij`` from two diagonal variances and the mixed one."""
    return 0.5 * (v_ii + v_jj) - v_mix


def _mixed_variance(g, i, j):
    return 0.5 * (g[i, i] + g[j, j] - 2.0 * g[i, j])


def _two_mode(gamma):
    g = as_gamma(gamma)
    if g.shape != (4, 4):
        raise DimensionError(f"two-mode matrix required, got {g.shape}")
    return g


# closed-form spectra (vectorised, NaN instead of exceptions)

def _spectrum_pair(a, b, cd, det):
    """Both two-mode symplectic eigenvalues from the local invariants.

    NaN when a radicand is negative (no repair).
    """
    delta = a * a + b * b + 2.0 * cd
    disc = delta * delta - 4.0 * det
    with np.errstate(invalid="ignore", divide="ignore"):
        hi = 0.5 * (delta + np.sqrt(disc))
        lo = det / hi
        return np.sqrt(hi), np.sqrt(lo)


@dataclass(frozen=True)
class NineStepResult:
    """Outcome of the nine-kind scheme.

    ``spectra[k]`` and ``pt_spectra[k]`` are the (descending) symplectic
    spectra of ``gamma`` and its partial transpose for the branch
    ``cd = (+|det C|, -|det C|)[k]``.
    """
    a: float
    b: float
    abs_det_c: float
    det_gamma: float
    spectra: Tuple[Tuple[float, float], Tuple[float, float]]
    pt_spectra: Tuple[Tuple[float, float], Tuple[float, float]]
    entangled: bool
    sign_ambiguity_resolved: bool
    pt_min: float
    gamma_pp: Optional[np.ndarray] = field(default=None, repr=False)

    def branch(self, sign: float):
        """``(spectrum, pt_spectrum)`` for the branch with ``sign(cd) = sign``."""
        k = 0 if sign >= 0 else 1
        return np.array(self.spectra[k]), np.array(self.pt_spectra[k])

    @property
    def log_negativity(self) -> float:
        return float(max(-math.log(self.pt_min), 0.0)) if self.pt_min > 0 else float("inf")


def nine_step_from_quantities(a: float, b: float, g1: float, g2: float, g3: float,
                              tol: float = TOL_UNC) -> NineStepResult:
    """Steps 5 to 7 from ``a``, ``b`` and the projected matrix ``[[g1, g2], [g2, g3]]``.

    ``(det C)^2 = (b+1)^2 [(a-g1)(a-g3) - g2^2]`` and
    ``det gamma = det[(b+1) gamma'' - a I]``.
    """
    det_c2 = (b + 1.0) ** 2 * ((a - g1) * (a - g3) - g2 * g2)
    if det_c2 < 0:
        if det_c2 < -1e-9 * max(1.0, (b + 1.0) ** 2 * a * a):
            raise DegenerateInputError(f"(det C)^2 = {det_c2:.3e} is negative", step=5)
        det_c2 = 0.0
    abs_c = math.sqrt(det_c2)
    M = (b + 1.0) * np.array([[g1, g2], [g2, g3]]) - a * np.eye(2)
    det_g = float(np.linalg.det(M))
    spectra, pt = [], []
    for cd in (abs_c, -abs_c):
        spectra.append(tuple(float(x) for x in _spectrum_pair(a, b, cd, det_g)))
        pt.append(tuple(float(x) for x in _spectrum_pair(a, b, -cd, det_g)))
    values = [v for pair in spectra + pt for v in pair]
    if any(not np.isfinite(v) for v in values):
        raise DegenerateInputError("negative discriminant in the spectra", step=7)
    vmin = min(values)
    entangled = vmin < 1.0 - tol
    resolved = entangled or abs_c <= tol
    return NineStepResult(a, b, abs_c, det_g, tuple(spectra), tuple(pt),
                          bool(entangled), bool(resolved), float(vmin),
                          np.array([[g1, g2], [g2, g3]]))


def _local_transform(block, step):
    if np.linalg.det(block) <= 0 or block[0, 0] <= 0:
        raise DegenerateInputError("local block is not positive definite", step=step)
    S, s = williamson(block)
    return S, float(s[0])


def nine_step_estimate(gamma, split: Optional[ModeSplit] = None,
                       tol: float = TOL_UNC) -> NineStepResult:
    """Run the nine-kind scheme on exactly known entries.

    Steps 1-2 read ``a1, a3`` and the rotated variance, recover ``a2`` and
    form ``a = sqrt det A`` (same for ``B``); step 3 applies the local
    Williamson transforms; step 4 projects mode 2 on a coherent state; steps
    5-7 follow :func:`nine_step_from_quantities`.
    """
    g = _two_mode(gamma)
    if split is not None and (split.n_a, split.n_b) != (1, 1):
        raise DimensionError("nine-step scheme needs a 1:1 split")
    A = np.array([[g[0, 0], 0.0], [0.0, g[1, 1]]])
    A[0, 1] = A[1, 0] = _offdiag(g[0, 0], g[1, 1], _mixed_variance(g, 0, 1))
    B = np.array([[g[2, 2], 0.0], [0.0, g[3, 3]]])
    B[0, 1] = B[1, 0] = _offdiag(g[2, 2], g[3, 3], _mixed_variance(g, 2, 3))
    S_A, a = _local_transform(A, 1)
    S_B, b = _local_transform(B, 2)
    S = direct_sum(S_A, S_B)
    gp = S @ g @ S.T
    gpp = _coherent_project(gp)
    g1, g3 = gpp[0, 0], gpp[1, 1]
    g2 = _offdiag(g1, g3, _mixed_variance(gpp, 0, 1))
    return nine_step_from_quantities(a, b, g1, g2, g3, tol)


def _coherent_project(g):
    A, B, C = g[:2, :2], g[2:, 2:], g[:2, 2:]
    out = A - C @ np.linalg.solve(B + np.eye(2), C.T)
    return 0.5 * (out + out.T)


# Monte-Carlo

@dataclass(frozen=True)
class MeasurementPlan:
    """Sampling plan for one strategy.

    ``samples_per_kind`` is ``floor(total / 10)`` for ``ten_entries`` and
    ``floor(total / 9)`` for ``nine_kinds``.
    """
    strategy: str
    total_samples: int
    repetitions: int
    seed: int
    sampler: str = "normal"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise InvalidPlanError(f"unknown strategy {self.strategy!r}")
        if self.sampler not in SAMPLERS:
            raise InvalidPlanError(f"unknown sampler {self.sampler!r}")
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise InvalidPlanError("repetitions must be a positive integer")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise InvalidPlanError("seed must be an unsigned 64-bit integer")
        if int(self.total_samples) != self.total_samples or self.samples_per_kind < 2:
            raise InvalidPlanError(
                f"{self.total_samples} samples give fewer than 2 per kind for {self.strategy}")

    @property
    def kinds(self) -> int:
        return 10 if self.strategy == "ten_entries" else 9

    @property
    def samples_per_kind(self) -> int:
        return int(self.total_samples) // self.kinds


def _variance_estimates(rng, variances, n, sampler):
    """Unbiased sample variances of ``n`` draws from ``N(0, v)`` for each ``v``."""
    v = np.asarray(variances, dtype=float)
    if sampler == "exact":
        return v.copy()
    if sampler == "chi2":
        # (n-1) s^2 / v ~ chi^2_{n-1}
        return v * rng.chisquare(n - 1, size=v.shape) / (n - 1)
    z = rng.standard_normal((v.size, n))
    return v * np.var(z, axis=1, ddof=1)


def _ten_entry_estimate(rng, g, n, sampler):
    diag_idx = [0, 1, 2, 3]
    pairs = [(0, 1), (2, 3), (0, 2), (0, 3), (1, 2), (1, 3)]
    targets = [g[i, i] for i in diag_idx] + [_mixed_variance(g, i, j) for i, j in pairs]
    est = _variance_estimates(rng, targets, n, sampler)
    gh = np.diag(est[:4])
    for k, (i, j) in enumerate(pairs):
        gh[i, j] = gh[j, i] = _offdiag(est[i], est[j], est[4 + k])
    return gh


def _sym2(v11, v22, vmix):
    m = np.array([[v11, 0.0], [0.0, v22]])
    m[0, 1] = m[1, 0] = _offdiag(v11, v22, vmix)
    return m


@dataclass(frozen=True)
class StrategyReport:
    """Monte-Carlo results for one plan and one true state.

    ``invariants`` rows are ``(a, b, |det C|, det gamma)``; ``pt_min`` is the
    estimate of the smallest symplectic eigenvalue of the partial transpose.
    Rows with NaN come from estimates where a square root or a local
    transform does not exist; they are counted, not repaired.
    """
    plan: MeasurementPlan
    invariants: np.ndarray
    spectra: np.ndarray
    pt_spectra: np.ndarray
    pt_min: np.ndarray
    exact_pt_min: float
    deviation: float
    n_nan: int
    n_invalid: int
    sign_ambiguity_resolved: np.ndarray

    @property
    def mean_pt_min(self) -> float:
        ok = np.isfinite(self.pt_min)
        return float(np.mean(self.pt_min[ok])) if ok.any() else float("nan")


def deviation_statistic(estimates, exact: float) -> float:
    """``sqrt(sum (x_i - exact)^2 / (M - 1))`` over finite estimates.

    With a single estimate the absolute error is returned.
    """
    x = np.asarray(estimates, dtype=float)
    x = x[np.isfinite(x)]
    if x.size == 0:
        return float("nan")
    if x.size == 1:
        return float(abs(x[0] - exact))
    return float(np.sqrt(np.sum((x - exact) ** 2) / (x.size - 1)))


def _rep_ten(rng, g, n, sampler):
    gh = _ten_entry_estimate(rng, g, n, sampler)
    invalid = not is_valid_cm(gh)
    A, B, C = gh[:2, :2], gh[2:, 2:], gh[:2, 2:]
    with np.errstate(invalid="ignore"):
        a = math.sqrt(np.linalg.det(A)) if np.linalg.det(A) >= 0 else float("nan")
        b = math.sqrt(np.linalg.det(B)) if np.linalg.det(B) >= 0 else float("nan")
    cd = float(np.linalg.det(C))
    det_g = float(np.linalg.det(gh))
    spec = _spectrum_pair(a, b, cd, det_g)
    pt = _spectrum_pair(a, b, -cd, det_g)
    return (a, b, abs(cd), det_g), spec, pt, float(pt[1]), True, invalid


def _rep_nine(rng, g, n, sampler):
    nan2 = (float("nan"), float("nan"))
    est = _variance_estimates(rng, [g[0, 0], g[1, 1], _mixed_variance(g, 0, 1),
                                    g[2, 2], g[3, 3], _mixed_variance(g, 2, 3)], n, sampler)
    Ah, Bh = _sym2(*est[:3]), _sym2(*est[3:])
    try:
        S_A, a = _local_transform(Ah, 1)
        S_B, b = _local_transform(Bh, 2)
    except DegenerateInputError:
        return (float("nan"),) * 4, nan2, nan2, float("nan"), False, True
    # the transforms built from estimates act on the true state
    S = direct_sum(S_A, S_B)
    gpp = _coherent_project(S @ g @ S.T)
    e2 = _variance_estimates(rng, [gpp[0, 0], gpp[1, 1], _mixed_variance(gpp, 0, 1)], n, sampler)
    g1, g3 = e2[0], e2[1]
    g2 = _offdiag(g1, g3, e2[2])
    det_c2 = (b + 1.0) ** 2 * ((a - g1) * (a - g3) - g2 * g2)
    det_g = float(np.linalg.det((b + 1.0) * np.array([[g1, g2], [g2, g3]]) - a * np.eye(2)))
    if det_c2 < 0:
        return (a, b, float("nan"), det_g), nan2, nan2, float("nan"), False, True
    abs_c = math.sqrt(det_c2)
    vals, specs, pts = [], [], []
    for cd in (abs_c, -abs_c):
        s = _spectrum_pair(a, b, cd, det_g)
        p = _spectrum_pair(a, b, -cd, det_g)
        specs.append(s)
        pts.append(p)
        vals.extend(s + p)
    vals = np.array(vals, dtype=float)
    if not np.all(np.isfinite(vals)):
        return (a, b, abs_c, det_g), nan2, nan2, float("nan"), False, True
    vmin = float(vals.min())
    resolved = vmin < 1.0 - TOL_UNC or abs_c <= TOL_UNC
    # report the branch holding the smallest value as the partial transpose
    k = int(np.argmin([min(p) for p in pts]))
    return (a, b, abs_c, det_g), specs[k], pts[k], vmin, bool(resolved), False


def _streams(seed, key, M):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return [np.random.Generator(np.random.PCG64(c)) for c in ss.spawn(M)]


def simulate_strategy(true_state, plan: MeasurementPlan, stream_key: Sequence[int] = (0, 0)
                      ) -> StrategyReport:
    """Run ``plan.repetitions`` independent estimates of the smallest
    partial-transpose symplectic eigenvalue.

    Repetition ``i`` draws from its own PCG64 stream spawned from
    ``SeedSequence(plan.seed, spawn_key=stream_key)``, so results do not
    depend on evaluation order.
    """
    g = _two_mode(true_state)
    if not is_valid_cm(g):
        raise InvalidPlanError("true state is not a valid covariance matrix")
    exact = float(symplectic_eigenvalues(partial_transpose_cm(g, ModeSplit(1, 1)))[-1])
    n = plan.samples_per_kind
    rep = _rep_ten if plan.strategy == "ten_entries" else _rep_nine
    rows = [rep(rng, g, n, plan.sampler) for rng in _streams(plan.seed, stream_key, plan.repetitions)]
    inv = np.array([r[0] for r in rows], dtype=float)
    spec = np.array([r[1] for r in rows], dtype=float)
    pt = np.array([r[2] for r in rows], dtype=float)
    pmin = np.array([r[3] for r in rows], dtype=float)
    resolved = np.array([r[4] for r in rows], dtype=bool)
    n_invalid = int(sum(r[5] for r in rows))
    return StrategyReport(plan, inv, spec, pt, pmin, exact,
                          deviation_statistic(pmin, exact),
                          int(np.sum(~np.isfinite(pmin))), n_invalid, resolved)


@dataclass(frozen=True)
class ComparisonRow:
    total_samples: int
    delta_ten: float
    delta_nine: float

    @property
    def log10_n(self) -> float:
        return math.log10(self.total_samples)


@dataclass(frozen=True)
class Comparison:
    rows: List[ComparisonRow]
    reports: List[Tuple[StrategyReport, StrategyReport]]

    def to_csv(self) -> str:
        return comparison_csv(self.rows)


def compare_strategies(true_state, budgets: Sequence[int], repetitions: int, seed: int,
                       sampler: str = "normal",
                       strategies: Sequence[str] = STRATEGIES) -> Comparison:
    """Deviation of both strategies for each total budget.

    Budget ``i`` and strategy ``j`` use the stream key ``(i, j)``.
    """
    budgets = list(budgets)
    if not budgets:
        raise InvalidPlanError("at least one budget is required")
    rows, reports = [], []
    for i, N in enumerate(budgets):
        out = {}
        for j, strat in enumerate(STRATEGIES):
            if strat not in strategies:
                out[strat] = None
                continue
            plan = MeasurementPlan(strat, int(N), repetitions, seed, sampler)
            out[strat] = simulate_strategy(true_state, plan, (i, j))
        ten, nine = out["ten_entries"], out["nine_kinds"]
        rows.append(ComparisonRow(int(N),
                                  ten.deviation if ten else float("nan"),
                                  nine.deviation if nine else float("nan")))
        reports.append((ten, nine))
    return Comparison(rows, reports)


def comparison_csv(rows: Sequence[ComparisonRow]) -> str:
    """CSV text with header ``log10_n,delta_ten,delta_nine`` and 6 significant digits."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow([f"{r.log10_n:.6g}", f"{r.delta_ten:.6g}", f"{r.delta_nine:.6g}"])
    return buf.getvalue()


def write_csv(rows: Sequence[ComparisonRow], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(comparison_csv(rows))
