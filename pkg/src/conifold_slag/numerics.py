"""Finite differences, damped Newton and pseudo-arclength continuation."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .errors import ContinuationStall, NoConvergence, SingularJacobian

FD_STEP = 1e-5


def fd_step(scale: float) -> float:
    """Step size for symmetric differences around a coordinate of size `scale`."""
    return FD_STEP * max(1.0, float(scale))


def richardson_derivative(f: Callable[[float], np.ndarray | float], h: float):
    """Derivative of f at 0 by symmetric differences with one Richardson level.

    The O(h^2) error of the central quotient is cancelled, leaving O(h^4).
    """
    d1 = (np.asarray(f(h)) - np.asarray(f(-h))) / (2.0 * h)
    d2 = (np.asarray(f(0.5 * h)) - np.asarray(f(-0.5 * h))) / h
    return (4.0 * d2 - d1) / 3.0


def newton_solve(fun, jac, x0, tol: float = 1e-12, maxiter: int = 50, min_step: float = 1e-10):
    """Damped Newton for a square system with a backtracking line search on |F|.

    Returns the converged point; raises NoConvergence or SingularJacobian.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(fun(x), dtype=float)
    norm = np.linalg.norm(fx)
    for _ in range(maxiter):
        if norm < tol:
            return x
        J = np.asarray(jac(x), dtype=float)
        try:
            dx = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
        if not np.all(np.isfinite(dx)):
            raise SingularJacobian("non-finite Newton step")
        t = 1.0
        while True:
            x_new = x + t * dx
            f_new = np.asarray(fun(x_new), dtype=float)
            n_new = np.linalg.norm(f_new)
            if np.isfinite(n_new) and (n_new < (1.0 - 1e-4 * t) * norm or n_new < tol):
                break
            t *= 0.5
            if t < min_step:
                raise NoConvergence(f"line search failed at |F|={norm:.3e}")
        x, fx, norm = x_new, f_new, n_new
    if norm < tol:
        return x
    raise NoConvergence(f"no convergence after {maxiter} iterations, |F|={norm:.3e}")


def null_direction(J: np.ndarray) -> np.ndarray:
    """Unit vector spanning the kernel of a full-rank (n-1) x n matrix."""
    _, s, vt = np.linalg.svd(J)
    if s[-1] < 1e-12 * max(1.0, s[0]):
        raise SingularJacobian(f"rank drop, singular values {s}")
    return vt[-1]


def arclength_step(fun, jac, x, tangent, h, tol=1e-12, maxiter=12):
    """One predictor-corrector step of pseudo-arclength continuation.

    The corrector solves F(y) = 0 together with tangent . (y - x) = h.
    Returns the corrected point and the new oriented unit tangent.
    """
    y = x + h * tangent

    def aug(z):
        return np.concatenate([np.asarray(fun(z), dtype=float), [tangent @ (z - x) - h]])

    def aug_jac(z):
        return np.vstack([np.asarray(jac(z), dtype=float), tangent])

    for _ in range(maxiter):
        r = aug(y)
        if np.linalg.norm(r[:-1]) < tol and abs(r[-1]) < 1e-12 * max(1.0, abs(h)):
            break
        try:
            y = y - np.linalg.solve(aug_jac(y), r)
        except np.linalg.LinAlgError as exc:
            raise SingularJacobian(str(exc)) from exc
    else:
        if np.linalg.norm(aug(y)[:-1]) >= tol:
            raise NoConvergence("corrector failed")
    t_new = null_direction(np.asarray(jac(y), dtype=float))
    if t_new @ tangent < 0:
        t_new = -t_new
    return y, t_new


def _walk(fun, jac, x, tangent, targets, h0, h_min, stop, tol):
    out_s, out_x, out_t = [], [], []
    s = 0.0
    h = h0
    targets = sorted(float(t) for t in targets)
    k = 0
    while k < len(targets) and targets[k] <= 0.0:
        out_s.append(0.0)
        out_x.append(x.copy())
        out_t.append(tangent.copy())
        k += 1
    while k < len(targets):
        step = min(h, targets[k] - s)
        try:
            y, t_new = arclength_step(fun, jac, x, tangent, step, tol=tol)
        except (NoConvergence, SingularJacobian):
            h = 0.5 * step
            if h < h_min:
                raise ContinuationStall(f"step size underflow at arclength {s:.6g}")
            continue
        x, tangent = y, t_new
        s += step
        if stop is not None and stop(x):
            break
        if abs(s - targets[k]) < 1e-12 * max(1.0, abs(s)):
            out_s.append(targets[k])
            out_x.append(x.copy())
            out_t.append(tangent.copy())
            k += 1
        h = min(2.0 * h, h0) if step == h else h
    return out_s, out_x, out_t


def trace_both_ways(fun, jac, x0, t_values, h0=0.05, h_min=1e-7, stop=None, tol=1e-12):
    """Sample the curve through x0 at signed arclengths `t_values`.

    Positive values follow the initial null vector, negative ones its
    opposite. Values that cannot be reached before `stop` triggers are
    dropped. Returns (t, points, tangents) sorted by t, tangents oriented
    along increasing t.
    """
    x0 = np.asarray(x0, float)
    t0 = null_direction(np.asarray(jac(x0), float))
    t_values = np.asarray(sorted(t_values), float)
    pos = [t for t in t_values if t >= 0]
    neg = [-t for t in t_values if t < 0]
    s_p, x_p, d_p = _walk(fun, jac, x0, t0, pos, h0, h_min, stop, tol) if pos else ([], [], [])
    s_n, x_n, d_n = _walk(fun, jac, x0, -t0, neg, h0, h_min, stop, tol) if neg else ([], [], [])
    ts = [-s for s in s_n[::-1]] + list(s_p)
    xs = x_n[::-1] + x_p
    ds = [-d for d in d_n[::-1]] + d_p
    return np.array(ts), xs, ds
