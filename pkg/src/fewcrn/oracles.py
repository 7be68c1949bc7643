"""Independent counts of positive solutions, used to cross-check Gale counts.

Neither routine shares code with the Gale/Sturm pipeline: the resultant
oracle leans on sympy's resultant and root isolation, the Newton oracle
on numpy linear algebra.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polysys import PolynomialSystem


@dataclass(frozen=True)
class OracleResult:
    count: int
    solutions: tuple[tuple[float, ...], ...]
    method: str
    probabilistic: bool


def resultant_count(system: PolynomialSystem, tol: float = 1e-20) -> OracleResult:
    """Positive solutions of a numeric 2x2 system by eliminating ``x2``.

    The resultant in ``x1`` is isolated exactly by sympy; each positive root
    is refined and every positive real ``x2`` solving ``f1 = 0`` is kept when
    ``f2`` also vanishes (relative residual below ``tol``, evaluated at 50 digits).
    """
    import mpmath as mp
    import sympy as sp

    if system.n != 2:
        raise ValueError("the resultant oracle handles n = 2 only")
    (f1, f2), (x1, x2) = system.to_sympy()
    res = sp.Poly(sp.resultant(f1, f2, x2), x1)
    if res.is_zero:
        raise ValueError("resultant vanishes identically (common component)")
    sols = []
    with mp.workdps(50):
        for (lo, hi), _ in res.intervals(inf=0, eps=sp.Rational(1, 10**30)):
            if hi <= 0:
                continue
            r1 = mp.mpf(sp.Rational(lo + hi, 2).p) / sp.Rational(lo + hi, 2).q
            if lo == hi and lo == 0:
                continue
            p2 = sp.Poly(f1.subs(x1, sp.Rational(lo + hi, 2)), x2)
            if p2.is_zero or p2.degree() < 1:
                p2 = sp.Poly(f2.subs(x1, sp.Rational(lo + hi, 2)), x2)
            if p2.degree() < 1:
                continue
            coeffs = [mp.mpf(c.p) / c.q for c in p2.all_coeffs()]
            for r2 in mp.polyroots(coeffs, maxsteps=200, extraprec=200):
                if abs(mp.im(r2)) > 1e-20 * max(1, abs(r2)) or mp.re(r2) <= 0:
                    continue
                pt = _polish(system, (r1, mp.re(r2)))
                if pt is not None and min(pt) > 0 and _relres(system, pt) < tol:
                    sols.append((float(pt[0]), float(pt[1])))
    sols = _dedupe(sols, 1e-9)
    return OracleResult(len(sols), tuple(sols), "sylvester-resultant", False)


def _polish(system: PolynomialSystem, x, steps: int = 40):
    """Newton on the full system at working precision; None if it wanders off."""
    import mpmath as mp

    def ev(p, pt):
        acc = mp.mpf(0)
        for w, c in p.items():
            t = mp.mpf(c.numerator) / c.denominator
            for xi, wi in zip(pt, w):
                t *= xi**wi
            acc += t
        return acc

    jac = [[system.derivative(i, j) for j in range(2)] for i in range(2)]
    x0 = x = [mp.mpf(v) for v in x]
    for _ in range(steps):
        f = mp.matrix([ev(p, x) for p in system.polys])
        J = mp.matrix([[ev(jac[i][j], x) for j in range(2)] for i in range(2)])
        try:
            dx = mp.lu_solve(J, -f)
        except ZeroDivisionError:
            return None
        x = [x[0] + dx[0], x[1] + dx[1]]
        if max(abs(dx[i]) / max(abs(x[i]), mp.mpf(10) ** -300) for i in range(2)) < mp.mpf(10) ** -40:
            break
    if any(abs(a - b) > mp.mpf(10) ** -6 * abs(b) for a, b in zip(x, x0)):
        return None
    return tuple(x)


def _relres(system: PolynomialSystem, x) -> float:
    import mpmath as mp

    worst = 0.0
    for p in system.polys:
        acc, scale = mp.mpf(0), mp.mpf(0)
        for w, c in p.items():
            term = mp.mpf(c.numerator) / c.denominator
            for xi, wi in zip(x, w):
                term *= xi**wi
            acc += term
            scale += abs(term)
        if scale:
            worst = max(worst, float(abs(acc) / scale))
    return worst


def _dedupe(points, rel: float):
    out: list[tuple[float, ...]] = []
    for p in sorted(points):
        if not any(all(abs(a - b) <= rel * max(abs(a), abs(b), 1e-300) for a, b in zip(p, q))
                   for q in out):
            out.append(tuple(p))
    return out


def newton_count(system: PolynomialSystem, starts: int = 256, span: float = 12.0,
                 seed: int = 0, tol: float = 1e-12, dedupe: float = 1e-6,
                 max_iter: int = 100) -> OracleResult:
    """Multistart damped Newton in ``u = log x`` from a scrambled Halton grid.

    Misses are possible, so the result is labeled probabilistic.
    """
    from scipy.stats import qmc

    n = system.n
    terms = [[(np.array(w, dtype=float), float(c)) for w, c in p.items()] for p in system.polys]

    def F(u):
        with np.errstate(all="ignore"):
            return _F(u)

    def _F(u):
        x = np.exp(u)
        vals, scales, jac = np.zeros(n), np.zeros(n), np.zeros((n, n))
        for i, row in enumerate(terms):
            for w, c in row:
                t = c * np.exp(w @ u)
                vals[i] += t
                scales[i] += abs(t)
                jac[i] += t * w  # d/du_j of c x^w = c x^w w_j
        s = np.where(scales > 0, scales, 1.0)
        return vals / s, jac / s[:, None], x

    grid = qmc.Halton(d=n, scramble=True, seed=seed).random(starts)
    found = []
    for g in grid:
        u = (2 * g - 1) * span
        for _ in range(max_iter):
            r, J, _ = F(u)
            nr = np.linalg.norm(r)
            if nr < tol:
                break
            try:
                step = np.linalg.lstsq(J, -r, rcond=None)[0]
            except np.linalg.LinAlgError:
                break
            t = 1.0
            while t > 1e-8:
                cand = u + t * step
                rc = F(cand)[0]
                if np.all(np.isfinite(rc)) and np.linalg.norm(rc) < (1 - 1e-4 * t) * nr:
                    u = cand
                    break
                t /= 2
            else:
                break
        r, J, x = F(u)
        if np.all(np.isfinite(x)) and np.linalg.norm(r) < 1e-10:
            found.append(tuple(float(v) for v in x))
    sols = _dedupe(found, dedupe)
    return OracleResult(len(sols), tuple(sols), "multistart-newton", True)
