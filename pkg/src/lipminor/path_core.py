"""Sampled cadlag paths and their Lipschitz minorant (min-plus cone envelope).

A path is a grid skeleton: strictly increasing times, the right-limit value at
each time, and an optional left-limit column at declared jump indices.  The
greatest function below the path whose slope is bounded by ``alpha`` is
computed exactly on the grid with one forward and one backward scan, each a
min-plus recursion

    a[i] = min(a[i-1] + alpha * dt[i], w[i]),      w = value ^ left_value,

so a contact (``w[i] == m[i]``) is produced bit-exactly whenever the path
point itself wins the scan.  Values beyond the window are treated as +inf;
indices whose achieving cone apex sits inside a guard band at either window
edge are flagged as contaminated and should be discarded by samplers rather
than corrected.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numba import njit


class PathError(ValueError):
    """Invalid path data (non-finite values, unsorted times, ...)."""


class ContaminationError(RuntimeError):
    """A required feature touches the window boundary guard band."""


class RecipePreconditionError(RuntimeError):
    """The stopping point of the first-descent recipe is an upward jump."""


# ---------------------------------------------------------------------------
# Domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CadlagPath:
    """Grid skeleton of a cadlag path.

    ``left_values`` is a full-length array that is NaN except at declared jump
    indices, where it holds the left limit f(t-).  A declared jump must differ
    from the right limit.  ``origin_index`` points at the (mandatory for Levy
    workflows) sample with time exactly 0.
    """

    times: np.ndarray
    values: np.ndarray
    left_values: Optional[np.ndarray] = None
    origin_index: Optional[int] = None

    def __post_init__(self):
        times = np.ascontiguousarray(self.times, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        if times.ndim != 1 or values.shape != times.shape:
            raise PathError("times and values must be 1-d arrays of equal length")
        if times.size < 2:
            raise PathError("need at least two samples")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise PathError("times and values must be finite")
        if np.any(np.diff(times) <= 0):
            raise PathError("times must be strictly increasing")
        if self.left_values is not None:
            lv = np.ascontiguousarray(self.left_values, dtype=np.float64)
            object.__setattr__(self, "left_values", lv)
            if lv.shape != times.shape:
                raise PathError("left_values must align with times")
            declared = ~np.isnan(lv)
            if np.any(~np.isfinite(lv[declared])):
                raise PathError("declared left values must be finite")
            if np.any(lv[declared] == values[declared]):
                raise PathError("a declared jump must differ from the value")
        if self.origin_index is not None:
            i = int(self.origin_index)
            if not (0 <= i < times.size) or times[i] != 0.0:
                raise PathError("origin_index must point at a sample with t == 0")
            object.__setattr__(self, "origin_index", i)

    @property
    def w(self) -> np.ndarray:
        """Pointwise min of value and left limit, f(t) ^ f(t-)."""
        if self.left_values is None:
            return self.values
        w = self.values.copy()
        declared = ~np.isnan(self.left_values)
        np.minimum(w[declared], self.left_values[declared], out=w[declared])
        return w

    @property
    def window(self) -> tuple[float, float]:
        return float(self.times[0]), float(self.times[-1])

    def require_origin(self) -> int:
        if self.origin_index is None:
            raise PathError("path has no origin sample (t == 0)")
        return self.origin_index


@dataclass(frozen=True)
class MinorantResult:
    """Minorant values on the grid plus contact/contamination bookkeeping.

    ``argmin_left[i]`` / ``argmin_right[i]`` are the indices of the cone apex
    achieving the forward / backward scan minimum at i (ties resolved to the
    apex found first by the scan).  ``contaminated[i]`` is set when an apex
    that achieves ``m[i]`` lies within ``guard`` of a window edge.
    """

    m: np.ndarray
    contact_mask: np.ndarray
    argmin_left: np.ndarray
    argmin_right: np.ndarray
    contaminated: np.ndarray
    alpha: float
    tol: float
    guard: float


@dataclass(frozen=True)
class StraddleInterval:
    """The contact-set gap straddling time zero and its sawtooth geometry.

    G < 0 < D are the nearest contact times around the origin, T the apex time
    of the sawtooth between them, H the path-minorant gap at the apex, S the
    first-descent stopping time of the recipe construction.  A degenerate
    interval (all zeros) signals that 0 itself is a contact.
    """

    G: float
    D: float
    T: float
    K: float
    H: float
    L: float
    R: float
    S: float
    degenerate: bool = False


@dataclass(frozen=True)
class RecipeResult:
    """Output of the first-descent recipe: stopping time S and descent end e."""

    S: float
    e: float
    s_index: int
    e_index: int


@dataclass(frozen=True)
class SawtoothReport:
    """Per-gap slope audit of the minorant between consecutive contact runs."""

    passed: bool
    n_gaps: int
    failures: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# Scan kernels
# ---------------------------------------------------------------------------


@njit(cache=True)
def _cone_scan(w, dt, alpha):
    """One-sided min-plus scan; returns scan values and first-winning apexes."""
    n = w.shape[0]
    out = np.empty(n, dtype=np.float64)
    apex = np.empty(n, dtype=np.int64)
    acc = w[0]
    j = 0
    out[0] = acc
    apex[0] = 0
    for i in range(1, n):
        cand = acc + alpha * dt[i - 1]
        if w[i] < cand:
            acc = w[i]
            j = i
        else:
            acc = cand
        out[i] = acc
        apex[i] = j
    return out, apex


def _two_sided_scans(w: np.ndarray, times: np.ndarray, alpha: float):
    dt = np.diff(times)
    a, apex_l = _cone_scan(w, dt, alpha)
    b_rev, apex_rev = _cone_scan(w[::-1].copy(), dt[::-1].copy(), alpha)
    b = b_rev[::-1].copy()
    apex_r = (w.shape[0] - 1) - apex_rev[::-1]
    return a, apex_l, b, apex_r


def default_guard(path: CadlagPath, alpha: float) -> float:
    """Guard band: value range over alpha, clipped to 10% of the window."""
    w = path.w
    vrange = float(np.max(w) - np.min(w))
    t0, t1 = path.window
    return min(vrange / alpha, 0.10 * (t1 - t0))


def default_tol(path: CadlagPath) -> float:
    """Contact tolerance for analytic inputs: 1e-9 at the path's value scale."""
    scale = float(np.max(np.abs(path.w)))
    return 1e-9 * max(1.0, scale)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def compute_minorant(
    path: CadlagPath,
    alpha: float,
    guard: Optional[float] = None,
    tol: Optional[float] = None,
) -> MinorantResult:
    """Exact Lipschitz minorant of the grid path, O(n) in two passes.

    Parameters
    ----------
    path : CadlagPath
    alpha : float
        Slope bound (> 0), in value units per time unit.
    guard : float, optional
        Width of the boundary guard band.  Defaults to
        ``min(value_range / alpha, 0.1 * window_length)``.
    tol : float, optional
        Contact threshold on w - m.  Defaults to 1e-9 at the value scale;
        Monte Carlo consumers pass an explicit 1e-12 since scan contacts are
        exact grid minima.
    """
    if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 0):
        raise ValueError(f"alpha must be a positive finite number, got {alpha!r}")
    w = np.ascontiguousarray(path.w)
    if guard is None:
        guard = default_guard(path, alpha)
    if guard < 0:
        raise ValueError("guard must be nonnegative")
    if tol is None:
        tol = default_tol(path)

    a, apex_l, b, apex_r = _two_sided_scans(w, path.times, alpha)
    m = np.minimum(a, b)
    contact = (w - m) <= tol

    t = path.times
    lo = t[0] + guard
    hi = t[-1] - guard
    near_edge = lambda idx: (t[idx] <= lo) | (t[idx] >= hi)
    contaminated = ((a == m) & near_edge(apex_l)) | ((b == m) & near_edge(apex_r))

    return MinorantResult(
        m=m,
        contact_mask=contact,
        argmin_left=apex_l,
        argmin_right=apex_r,
        contaminated=contaminated,
        alpha=float(alpha),
        tol=float(tol),
        guard=float(guard),
    )


def extract_contact_set(result: MinorantResult) -> list[tuple[int, int]]:
    """Maximal runs of consecutive uncontaminated contact indices.

    Returns half-open index ranges ``(start, stop)`` sorted by time.
    """
    ok = result.contact_mask & ~result.contaminated
    if not ok.any():
        return []
    padded = np.concatenate(([False], ok, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, stops = edges[0::2], edges[1::2]
    return list(zip(starts.tolist(), stops.tolist()))


def _recipe_s_index(w: np.ndarray, t: np.ndarray, alpha: float, origin: int) -> int:
    """First grid index i > origin with w[i] - alpha*t[i] <= min over u <= 0."""
    tilted = w - alpha * t
    thresh = tilted[: origin + 1].min()
    after = np.flatnonzero(tilted[origin + 1 :] <= thresh)
    if after.size == 0:
        raise ContaminationError("first-descent stopping time lies beyond the window")
    return origin + 1 + int(after[0])


def recipe_D(path: CadlagPath, alpha: float) -> RecipeResult:
    """First-descent construction of the contact time right of the origin.

    S is the first positive grid time where the tilted path w - alpha*t drops
    to its running minimum over u <= 0; e is the first time >= S achieving the
    minimum of w + alpha*(u - S).  Requires f(S) <= f(S-) at the realizing
    sample; upward-jump stopping points are reported, not repaired.
    """
    origin = path.require_origin()
    w = path.w
    t = path.times
    i_s = _recipe_s_index(w, t, alpha, origin)
    if path.left_values is not None and not np.isnan(path.left_values[i_s]):
        if path.values[i_s] > path.left_values[i_s]:
            raise RecipePreconditionError(
                f"f(S) > f(S-) at t={t[i_s]:.6g}: recipe does not apply"
            )
    if i_s == t.size - 1:
        raise ContaminationError("first-descent stopping time hit the window edge")
    ascent = w[i_s:] + alpha * (t[i_s:] - t[i_s])
    i_e = i_s + int(np.argmin(ascent))
    if i_e == t.size - 1:
        raise ContaminationError("descent endpoint hit the window edge")
    return RecipeResult(S=float(t[i_s]), e=float(t[i_e]), s_index=i_s, e_index=i_e)


def straddle_interval(path: CadlagPath, result: MinorantResult) -> StraddleInterval:
    """Extract the contact-set gap straddling 0 and its sawtooth statistics.

    Returns a degenerate all-zero interval when 0 is itself a contact.  Raises
    ContaminationError when the bracketing contacts are missing from the
    window or flagged contaminated.
    """
    origin = path.require_origin()
    t = path.times
    w = path.w
    alpha = result.alpha
    contact = result.contact_mask

    if contact[origin]:
        if result.contaminated[origin]:
            raise ContaminationError("origin contact is inside the guard band")
        return StraddleInterval(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, degenerate=True)

    left = np.flatnonzero(contact[:origin])
    right = np.flatnonzero(contact[origin + 1 :])
    if left.size == 0 or right.size == 0:
        raise ContaminationError("no contact on one side of the origin")
    i_g = int(left[-1])
    i_d = origin + 1 + int(right[0])
    if result.contaminated[i_g] or result.contaminated[i_d]:
        raise ContaminationError("bracketing contact lies in the guard band")

    G, D = float(t[i_g]), float(t[i_d])
    w_g, w_d = float(w[i_g]), float(w[i_d])
    T = (w_d - w_g + alpha * (D + G)) / (2.0 * alpha)
    peak = w_g + alpha * (T - G)
    # Read the path at the half-open cell [t_i, t_{i+1}) containing T.
    i_t = int(np.searchsorted(t, T, side="right") - 1)
    x_t = w[i_t] if t[i_t] == T else float(path.values[i_t])
    H = max(x_t - peak, 0.0)

    i_s = _recipe_s_index(w, t, alpha, origin)
    return StraddleInterval(
        G=G,
        D=D,
        T=float(T),
        K=D - G,
        H=float(H),
        L=float(T - G),
        R=float(D - T),
        S=float(t[i_s]),
    )


def sawtooth_check(
    path: CadlagPath, result: MinorantResult, rtol: float = 1e-9
) -> SawtoothReport:
    """Verify that m runs at slope +alpha then -alpha between contact runs.

    Each gap may contain at most one interior cell of intermediate slope (the
    cell holding the apex); everything before it must rise at +alpha and
    everything after fall at -alpha, within ``rtol`` relative tolerance.
    """
    runs = extract_contact_set(result)
    if len(runs) < 2:
        return SawtoothReport(passed=True, n_gaps=0)
    t = path.times
    m = result.m
    alpha = result.alpha
    atol = rtol * max(1.0, abs(alpha) * max(abs(t[0]), abs(t[-1])))
    failures = []
    n_gaps = 0
    for (s0, e0), (s1, _) in zip(runs[:-1], runs[1:]):
        i0, i1 = e0 - 1, s1  # last contact of the left run, first of the right
        if i1 - i0 < 1:
            continue
        n_gaps += 1
        slopes = np.diff(m[i0 : i1 + 1]) / np.diff(t[i0 : i1 + 1])
        up = np.abs(slopes - alpha) <= atol
        down = np.abs(slopes + alpha) <= atol
        mid = ~up & ~down
        # valid pattern: up* mid{0,1} down*, with the mid cell's slope inside the band
        mids = np.flatnonzero(mid)
        first_non_up = np.flatnonzero(~up)
        k = first_non_up[0] if first_non_up.size else slopes.size
        ok = (
            mids.size <= 1
            and bool(np.all(down[k:] | mid[k:]))
            and (mids.size == 0 or (mids[0] == k and abs(slopes[k]) <= alpha + atol))
        )
        if not ok:
            failures.append((int(i0), int(i1)))
    return SawtoothReport(passed=not failures, n_gaps=n_gaps, failures=failures)


# ---------------------------------------------------------------------------
# CSV interchange
# ---------------------------------------------------------------------------


def read_path_csv(src) -> CadlagPath:
    """Read a path from CSV with header ``t,value,left_value``.

    ``left_value`` is blank except at declared jumps.  A row with t == 0
    becomes the origin when present.
    """
    close = False
    if isinstance(src, (str, bytes)) or hasattr(src, "__fspath__"):
        fh = open(src, "r", newline="")
        close = True
    else:
        fh = src
    try:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header[:3]] != ["t", "value", "left_value"]:
            raise PathError("expected CSV header 't,value,left_value'")
        times, values, lefts = [], [], []
        any_left = False
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise PathError(f"line {lineno}: need at least t,value")
            try:
                times.append(float(row[0]))
                values.append(float(row[1]))
                cell = row[2].strip() if len(row) > 2 else ""
                if cell:
                    lefts.append(float(cell))
                    any_left = True
                else:
                    lefts.append(math.nan)
            except ValueError as exc:
                raise PathError(f"line {lineno}: {exc}") from exc
    finally:
        if close:
            fh.close()
    t = np.asarray(times)
    origin = np.flatnonzero(t == 0.0)
    return CadlagPath(
        times=t,
        values=np.asarray(values),
        left_values=np.asarray(lefts) if any_left else None,
        origin_index=int(origin[0]) if origin.size else None,
    )


def write_path_csv(dst, path: CadlagPath) -> None:
    close = False
    if isinstance(dst, (str, bytes)) or hasattr(dst, "__fspath__"):
        fh = open(dst, "w", newline="")
        close = True
    else:
        fh = dst
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "value", "left_value"])
        lv = path.left_values
        for i in range(path.times.size):
            cell = ""
            if lv is not None and not math.isnan(lv[i]):
                cell = repr(float(lv[i]))
            writer.writerow([repr(float(path.times[i])), repr(float(path.values[i])), cell])
    finally:
        if close:
            fh.close()


def write_minorant_csv(dst, path: CadlagPath, result: MinorantResult) -> None:
    """Write ``t,m,contact(0/1),contaminated(0/1)`` rows."""
    close = False
    if isinstance(dst, (str, bytes)) or hasattr(dst, "__fspath__"):
        fh = open(dst, "w", newline="")
        close = True
    else:
        fh = dst
    try:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "m", "contact", "contaminated"])
        for i in range(path.times.size):
            writer.writerow(
                [
                    repr(float(path.times[i])),
                    repr(float(result.m[i])),
                    int(result.contact_mask[i]),
                    int(result.contaminated[i]),
                ]
            )
    finally:
        if close:
            fh.close()
