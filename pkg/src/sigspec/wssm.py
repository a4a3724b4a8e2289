"""
Weighted signal spectrum models.

A node ``j`` carries an outgoing vector ``w_out[j]`` and an incoming vector
``w_in[j]``; the modelled weight of ``(i, j)`` is ``w_out[i] . w_in[j]``.
Undirected models use one matrix for both. This module fits such vectors to
arbitrary square matrices (optionally ignoring the diagonal), searches small
integer models that reproduce an unweighted graph after thresholding, and
scores nodes by the breadth of their spectrum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .bssm import rng_for
from .graph import Graph

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 20000


@dataclass
class SpectrumWeights:
    w_out: np.ndarray
    w_in: Optional[np.ndarray] = None
    undirected: bool = True

    def __post_init__(self):
        self.w_out = np.atleast_2d(np.asarray(self.w_out, dtype=float))
        if self.undirected:
            if self.w_in is not None and not np.array_equal(np.asarray(self.w_in, dtype=float), self.w_out):
                raise ValueError("undirected weights need w_in == w_out")
            self.w_in = self.w_out
        else:
            if self.w_in is None:
                raise ValueError("directed weights need w_in")
            self.w_in = np.atleast_2d(np.asarray(self.w_in, dtype=float))
            if self.w_in.shape != self.w_out.shape:
                raise ValueError("w_out and w_in shapes differ")
        if not (np.isfinite(self.w_out).all() and np.isfinite(self.w_in).all()):
            raise ValueError("weights must be finite")

    @property
    def n(self) -> int:
        return self.w_out.shape[0]

    @property
    def m(self) -> int:
        return self.w_out.shape[1]

    def matrix(self) -> np.ndarray:
        """Full reconstruction ``w_out @ w_in.T`` (diagonal included)."""
        return self.w_out @ self.w_in.T


@dataclass
class FitReport:
    weights: SpectrumWeights
    offdiag_residual: float
    iterations: int
    converged: bool
    history: List[float] = field(default_factory=list)


def reconstruct(w: SpectrumWeights, i: int, j: int) -> float:
    if not (0 <= i < w.n and 0 <= j < w.n):
        raise IndexError(f"node pair ({i}, {j}) out of range for n={w.n}")
    return float(w.w_out[i] @ w.w_in[j])


def offdiag_residual(w: SpectrumWeights, x: np.ndarray) -> float:
    """Frobenius norm of ``x - reconstruction`` over entries with ``i != j``."""
    x = np.asarray(x, dtype=float)
    if x.shape != (w.n, w.n):
        raise ValueError(f"matrix shape {x.shape} does not match n={w.n}")
    return _offdiag_norm(x - w.matrix())


def _offdiag_norm(e: np.ndarray) -> float:
    e = e.copy()
    np.fill_diagonal(e, 0.0)
    return float(np.sqrt(np.square(e).sum()))


def _orient(v: np.ndarray) -> np.ndarray:
    """Column signs such that the largest-magnitude entry of each column is positive."""
    if v.size == 0:
        return np.ones(v.shape[1])
    pick = v[np.abs(v).argmax(axis=0), np.arange(v.shape[1])]
    return np.where(pick < 0, -1.0, 1.0)


def _pad(a: np.ndarray, m: int) -> np.ndarray:
    if a.shape[1] >= m:
        return a[:, :m]
    return np.hstack([a, np.zeros((a.shape[0], m - a.shape[1]))])


def _gram_truncate(y: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh(y)
    order = np.argsort(-lam, kind="stable")[:m]
    keep = order[lam[order] > 0]
    v = vec[:, keep] * _orient(vec[:, keep])
    w = _pad(v * np.sqrt(lam[keep]), m)
    return w, w


def _signed_truncate(y: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    lam, vec = np.linalg.eigh(y)
    order = np.argsort(-np.abs(lam), kind="stable")[:m]
    v = vec[:, order] * _orient(vec[:, order])
    return _pad(v * lam[order], m), _pad(v, m)


def _svd_truncate(y: np.ndarray, m: int) -> Tuple[np.ndarray, np.ndarray]:
    u, s, vt = np.linalg.svd(y)
    k = min(m, len(s))
    v = vt[:k].T
    sign = _orient(v)
    return _pad(u[:, :k] * s[:k] * sign, m), _pad(v * sign, m)


def _fit_offdiag(x: np.ndarray, m: int, truncate: Callable, tol: float, max_iter: int):
    """Low-rank fit judged on off-diagonal entries only.

    The diagonal of ``x`` is replaced by a fill vector; each iteration takes
    the best rank-``m`` truncation of the filled matrix and moves the fill
    towards the diagonal of that truncation. A plain move (step 1) never
    increases the off-diagonal residual. Longer, extrapolated moves are tried
    first and kept only when they do not increase it either; the step length
    grows after each success and resets to 1 after a failure.
    """
    def evaluate(fill):
        y = x.copy()
        np.fill_diagonal(y, fill)
        wo, wi = truncate(y, m)
        r = wo @ wi.T
        return wo, wi, _offdiag_norm(x - r), np.diag(r).copy()

    fill = np.zeros(len(x))
    wo, wi, res, target = evaluate(fill)
    history = [res]
    step = 1.0
    for it in range(1, max_iter + 1):
        cand = fill + step * (target - fill)
        c_wo, c_wi, c_res, c_target = evaluate(cand)
        if c_res <= res:
            step = min(step * 1.5, 1e6)
        else:
            step = 1.0
            cand = target
            c_wo, c_wi, c_res, c_target = evaluate(cand)
        gain = res - c_res
        fill, wo, wi, res, target = cand, c_wo, c_wi, c_res, c_target
        history.append(res)
        if gain < tol:
            return wo, wi, res, it, True, history
    return wo, wi, res, max_iter, False, history


def _check_fit_args(x: np.ndarray, m: int, tol: float):
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise ValueError("target must be a square matrix")
    if m < 1:
        raise ValueError("dimension m must be at least 1")
    if tol <= 0:
        raise ValueError("tol must be positive")


def fit_symmetric(x: np.ndarray, m: int, gram: bool = True, fit_diagonal: bool = True,
                  tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> FitReport:
    """Rank-``m`` spectral fit of a symmetric matrix.

    Parameters
    ----------
    x : (n, n) array
        Symmetric target (within 1e-9).
    m : int
        Spectrum dimension.
    gram : bool
        If True, return an undirected model ``w w^T`` built from the ``m``
        largest positive eigenpairs. Otherwise return a signed model with
        ``w_out = v * lambda`` and ``w_in = v`` over the ``m`` eigenpairs of
        largest magnitude, which also represents negative eigenvalues.
    fit_diagonal : bool
        If False the diagonal of ``x`` is ignored and an iterative fill of
        the diagonal is used (see ``_fit_offdiag``).
    """
    x = np.asarray(x, dtype=float)
    _check_fit_args(x, m, tol)
    if not np.allclose(x, x.T, rtol=0, atol=1e-9):
        raise ValueError("target matrix is not symmetric")
    x = (x + x.T) / 2
    truncate = _gram_truncate if gram else _signed_truncate
    if fit_diagonal:
        wo, wi = truncate(x, m)
        w = SpectrumWeights(wo) if gram else SpectrumWeights(wo, wi, undirected=False)
        res = offdiag_residual(w, x)
        return FitReport(w, res, 0, True, [res])
    wo, wi, res, it, conv, hist = _fit_offdiag(x, m, truncate, tol, max_iter)
    w = SpectrumWeights(wo) if gram else SpectrumWeights(wo, wi, undirected=False)
    return FitReport(w, res, it, conv, hist)


def fit_directed(x: np.ndarray, m: int, fit_diagonal: bool = True,
                 tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> FitReport:
    """Rank-``m`` fit ``x ~ w_out w_in^T`` via truncated SVD."""
    x = np.asarray(x, dtype=float)
    _check_fit_args(x, m, tol)
    if fit_diagonal:
        wo, wi = _svd_truncate(x, m)
        w = SpectrumWeights(wo, wi, undirected=False)
        res = offdiag_residual(w, x)
        return FitReport(w, res, 0, True, [res])
    wo, wi, res, it, conv, hist = _fit_offdiag(x, m, _svd_truncate, tol, max_iter)
    return FitReport(SpectrumWeights(wo, wi, undirected=False), res, it, conv, hist)


def threshold_classify(w: SpectrumWeights, theta: float) -> Graph:
    """Unweighted undirected graph of pairs whose reconstruction reaches ``theta`` both ways."""
    r = w.matrix() >= theta
    a = r & r.T
    np.fill_diagonal(a, False)
    rows, cols = np.nonzero(np.triu(a, k=1))
    return Graph.from_edges(w.n, zip(rows.tolist(), cols.tolist()))


def hub_scores(w: SpectrumWeights) -> np.ndarray:
    """Euclidean norm of each node's spectrum (both vectors for directed models)."""
    if w.undirected:
        return np.linalg.norm(w.w_out, axis=1)
    return np.sqrt(np.square(w.w_out).sum(axis=1) + np.square(w.w_in).sum(axis=1))


# -- integer thresholded models ---------------------------------------------

@dataclass
class IntegerModel:
    weights: np.ndarray
    theta: int
    misclassified: int
    restart: int = 0
    trace: List[int] = field(default_factory=list)

    def spectrum(self) -> SpectrumWeights:
        return SpectrumWeights(self.weights.astype(float))


def _misclassified(r: np.ndarray, a: np.ndarray, theta: int) -> int:
    return int(np.triu((r >= theta) != a, k=1).sum())


def _violation(r: np.ndarray, a: np.ndarray, theta: int) -> np.ndarray:
    """How far each reconstruction sits on the wrong side of the threshold."""
    return np.where(a, np.maximum(0, theta - r), np.maximum(0, r - theta + 1))


def _descend(w: np.ndarray, theta: int, a: np.ndarray, bound: int, theta_max: int,
             margin_tiebreak: bool = True):
    """Coordinate descent on integer weights and threshold.

    Sweeps entries node-major then dimension, then the threshold. A change is
    taken only if it strictly lowers the misclassification count, or, with
    ``margin_tiebreak``, keeps the count and strictly lowers the summed
    threshold violation. The smallest value wins among equally good changes.
    Stops after a sweep with no change.
    """
    n, m = w.shape
    r = w @ w.T
    offdiag = ~np.eye(n, dtype=bool)

    def totals(t):
        wrong = _misclassified(r, a, t)
        return wrong, int(_violation(r, a, t)[offdiag].sum()) if margin_tiebreak else 0

    miss = _misclassified(r, a, theta)
    trace = [miss]
    values = np.arange(-bound, bound + 1)
    improved = True
    while improved and miss > 0:
        improved = False
        for j in range(n):
            aj = a[j][None, :]
            mask = offdiag[j][None, :]
            for d in range(m):
                col = w[:, d]
                cur = w[j, d]
                rows = r[j][None, :] + (values - cur)[:, None] * col[None, :]
                wrong = (((rows >= theta) != aj) & mask).sum(axis=1)
                if margin_tiebreak:
                    slack = (_violation(rows, aj, theta) * mask).sum(axis=1)
                else:
                    slack = np.zeros_like(wrong)
                best = int(np.lexsort((slack, wrong))[0])
                here = cur + bound
                if (wrong[best], slack[best]) < (wrong[here], slack[here]):
                    delta = values[best] - cur
                    r[j, :] += delta * col
                    r[:, j] += delta * col
                    w[j, d] = values[best]
                    r[j, j] = w[j] @ w[j]
                    miss += int(wrong[best] - wrong[here])
                    trace.append(miss)
                    improved = True
        scored = [totals(t) for t in range(1, theta_max + 1)]
        t_best = min(range(theta_max), key=lambda i: scored[i]) + 1
        if scored[t_best - 1] < totals(theta):
            theta, miss = t_best, scored[t_best - 1][0]
            trace.append(miss)
            improved = True
    return w, theta, miss, trace


def _best_theta(w: np.ndarray, a: np.ndarray, theta_max: int) -> int:
    r = w @ w.T
    counts = [_misclassified(r, a, t) for t in range(1, theta_max + 1)]
    return int(np.argmin(counts)) + 1


RANDOM_DENSITY = 0.1
START_FIT_ITER = 500
START_SCALES = (1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0)


def _gram_start(a: np.ndarray, m: int, bound: int, theta_max: int) -> np.ndarray:
    """Round the continuous diagonal-free Gram fit of the adjacency.

    The fit is scaled so its peak maps to ``bound * s`` for each ``s`` in
    ``START_SCALES``, clipped to the bound and rounded; the candidate with the
    fewest misclassified pairs is kept.
    """
    cont = fit_symmetric(a.astype(float), m, gram=True, fit_diagonal=False, max_iter=START_FIT_ITER).weights.w_out
    peak = np.abs(cont).max()
    if peak == 0:
        return np.zeros(cont.shape, dtype=np.int64)
    best, best_miss = None, None
    for s in START_SCALES:
        w0 = np.clip(np.rint(cont * bound * s / peak), -bound, bound).astype(np.int64)
        r = w0 @ w0.T
        miss = min(_misclassified(r, a, t) for t in range(1, theta_max + 1))
        if best is None or miss < best_miss:
            best, best_miss = w0, miss
    return best


def fit_wiassm(g: Graph, m: int, bound: int = 3, theta_max: int = 3, restarts: int = 50,
               seed: int = 0, start: Optional[np.ndarray] = None,
               margin_tiebreak: bool = True) -> IntegerModel:
    """Search integer weights in ``[-bound, bound]`` whose Gram matrix, thresholded
    at an integer ``theta``, reproduces the unweighted graph ``g``.

    Restart 0 starts from ``start`` when given (e.g. a clique-cover spectrum),
    otherwise from the rounded continuous Gram fit (see ``_gram_start``).
    Restart ``k > 0`` draws sparse 0/1 entries (density ``RANDOM_DENSITY``)
    with seed ``seed + k``. The best model is
    returned, earliest restart on ties; the search stops early on an exact
    model.
    """
    if g.directed:
        raise ValueError("integer models need an undirected graph")
    if any(w != 1.0 for w in g.edges.values()):
        raise ValueError("integer models need an unweighted graph")
    if m < 1 or bound < 1 or theta_max < 1 or restarts < 1:
        raise ValueError("m, bound, theta_max and restarts must all be at least 1")
    a = g.adjacency() != 0
    best: Optional[IntegerModel] = None
    for k in range(restarts):
        if k == 0:
            if start is not None:
                w0 = np.asarray(start, dtype=np.int64).copy()
                if w0.shape != (g.n, m):
                    raise ValueError(f"start has shape {w0.shape}, expected {(g.n, m)}")
                if np.abs(w0).max(initial=0) > bound:
                    raise ValueError("start entries exceed the weight bound")
            else:
                w0 = _gram_start(a, m, bound, theta_max)
        else:
            w0 = (rng_for(seed + k).random((g.n, m)) < RANDOM_DENSITY).astype(np.int64)
        theta0 = _best_theta(w0, a, theta_max)
        w, theta, miss, trace = _descend(w0, theta0, a, bound, theta_max, margin_tiebreak)
        if best is None or miss < best.misclassified:
            best = IntegerModel(w, theta, miss, k, trace)
        if miss == 0:
            break
    return best


def exact_dimension_scan(g: Graph, m_start: int, patience: int = 3, **kwargs) -> Tuple[Optional[int], dict]:
    """Run :func:`fit_wiassm` for ``m = m_start, m_start - 1, ...``.

    The scan stops at ``m = 1`` or after ``patience`` consecutive dimensions
    without an exact model. Returns the smallest exact dimension seen (None if
    none) and the misclassified count per dimension tried.
    """
    seen = {}
    best = None
    misses = 0
    for m in range(m_start, 0, -1):
        model = fit_wiassm(g, m, **kwargs)
        seen[m] = model.misclassified
        if model.misclassified == 0:
            best, misses = m, 0
        else:
            misses += 1
            if misses >= patience:
                break
    return best, seen


# -- file formats -----------------------------------------------------------

def _rows(a: np.ndarray) -> str:
    return "".join("\t".join(repr(float(x)) for x in row) + "\n" for row in a)


def weights_to_tsv(w: SpectrumWeights) -> str:
    out = f"{w.n}\t{w.m}\t{0 if w.undirected else 1}\n" + _rows(w.w_out)
    if not w.undirected:
        out += _rows(w.w_in)
    return out


def weights_from_tsv(text: str) -> SpectrumWeights:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m, directed = (int(x) for x in lines[0].split())
    body = np.array([[float(x) for x in ln.split("\t")] for ln in lines[1:]]).reshape(-1, m)
    if directed:
        return SpectrumWeights(body[:n], body[n:2 * n], undirected=False)
    return SpectrumWeights(body[:n])


def integer_model_to_tsv(model: IntegerModel) -> str:
    n, m = model.weights.shape
    rows = "".join("\t".join(str(int(x)) for x in row) + "\n" for row in model.weights)
    return f"{n}\t{m}\t0\ntheta\t{model.theta}\n" + rows


def integer_model_from_tsv(text: str, g: Optional[Graph] = None) -> IntegerModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    n, m, _ = (int(x) for x in lines[0].split())
    theta = int(lines[1].split()[1])
    w = np.array([[int(x) for x in ln.split("\t")] for ln in lines[2:2 + n]], dtype=np.int64).reshape(n, m)
    miss = -1 if g is None else _misclassified(w @ w.T, g.adjacency() != 0, theta)
    return IntegerModel(w, theta, miss)
