"""Local stability of steady states, the lifting construction, and RK4 simulation."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .irreversible import PreconditionError, RawRates
from .polysys import PolynomialSystem

STATE_TOL = 1e-9


class Label(enum.Enum):
    STABLE = "AsymptoticallyStable"
    UNSTABLE = "Unstable"
    DEGENERATE = "Degenerate"
    INCONCLUSIVE = "Inconclusive"


class Method(enum.Enum):
    DERIVATIVE_SIGN = "DerivativeSign"
    DET_TRACE = "DetTrace"
    ROUTH_HURWITZ = "RouthHurwitzCubic"
    NUMERIC_EIGEN = "NumericEigen"
    SIMULATION = "Simulation"


@dataclass(frozen=True)
class StabilityVerdict:
    label: Label
    method: Method
    certificates: dict = field(default_factory=dict)


@dataclass(frozen=True)
class JacobianAtState:
    matrix: tuple[tuple, ...]
    exact: bool

    @property
    def n(self) -> int:
        return len(self.matrix)

    def as_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self.matrix])


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction))


def jacobian(system: PolynomialSystem, x: Sequence) -> JacobianAtState:
    if system.symbolic:
        raise ValueError("bind all rate symbols before computing a Jacobian")
    exact = all(_is_exact(v) for v in x)
    xs = [Fraction(v) if exact else float(v) for v in x]
    rows = []
    for i in range(system.n):
        row = []
        for j in range(system.n):
            d = PolynomialSystem(system.species, (system.derivative(i, j),))
            row.append(d.evaluate(xs)[0] if exact else float(d.evaluate(xs)[0]))
        rows.append(tuple(row))
    return JacobianAtState(tuple(rows), exact)


def check_steady_state(system: PolynomialSystem, x: Sequence, tol: float = STATE_TOL) -> float:
    res = max(system.relative_residuals([Fraction(v) if _is_exact(v) else v for v in x]), default=0.0)
    if res > tol:
        raise ValueError(f"not a steady state: relative residual {res:.3g} exceeds {tol:g}")
    return res


def _sign(v, scale, width) -> int:
    if abs(v) <= width * scale:
        return 0
    return 1 if v > 0 else -1


def char_poly(J: JacobianAtState) -> list:
    """Coefficients ``[1, xi_{n-1}, ..., xi_0]`` of ``det(zI - J)`` (Faddeev-LeVerrier)."""
    n = J.n
    one = Fraction(1) if J.exact else 1.0
    A = [list(r) for r in J.matrix]
    M = [[one * (i == j) for j in range(n)] for i in range(n)]
    coeffs = [one]
    for k in range(1, n + 1):
        AM = [[sum(A[i][t] * M[t][j] for t in range(n)) for j in range(n)] for i in range(n)]
        ck = -sum(AM[i][i] for i in range(n)) / k
        coeffs.append(ck)
        M = [[AM[i][j] + (ck if i == j else 0) for j in range(n)] for i in range(n)]
    return coeffs


def routh_hurwitz_cubic(xi2, xi1, xi0, width: float = 0.0) -> StabilityVerdict:
    """Eigenvalue test for ``z^3 + xi2 z^2 + xi1 z + xi0``."""
    certs = {"xi2": xi2, "xi1": xi1, "xi0": xi0}
    scale = max(abs(xi2 * xi1), abs(xi0), 1)
    s0 = _sign(xi0, scale, width)
    if s0 == 0:
        return StabilityVerdict(Label.DEGENERATE, Method.ROUTH_HURWITZ, certs)
    if s0 < 0:
        return StabilityVerdict(Label.UNSTABLE, Method.ROUTH_HURWITZ, certs)
    s2 = _sign(xi2, max(abs(xi2), 1), width)
    sh = _sign(xi2 * xi1 - xi0, scale, width)
    if s2 > 0 and sh > 0:
        return StabilityVerdict(Label.STABLE, Method.ROUTH_HURWITZ, certs)
    if s2 < 0 or sh < 0:
        # trace positive, or a complex pair crossed into the right half-plane
        return StabilityVerdict(Label.UNSTABLE, Method.ROUTH_HURWITZ, certs)
    return StabilityVerdict(Label.INCONCLUSIVE, Method.ROUTH_HURWITZ, certs)


def hurwitz_minors(coeffs: Sequence) -> list:
    """Leading principal minors of the Hurwitz matrix of a monic polynomial."""
    import sympy as sp

    n = len(coeffs) - 1
    a = list(coeffs)

    def at(i):
        return a[i] if 0 <= i <= n else 0

    H = sp.Matrix(n, n, lambda r, c: sp.nsimplify(at(2 * c - r + 1)) if isinstance(at(2 * c - r + 1), Fraction)
                  else at(2 * c - r + 1))
    return [H[:k, :k].det() for k in range(1, n + 1)]


def numeric_eigen(J: JacobianAtState, rel: float = 1e-9) -> StabilityVerdict:
    A = J.as_array()
    ev = np.linalg.eigvals(A)
    thr = rel * max(np.linalg.norm(A, 2), 1e-300)
    re = [float(v) for v in ev.real]
    certs = {"eigenvalues": [complex(v) for v in ev], "threshold": thr}
    if max(re) > thr:
        label = Label.UNSTABLE
    elif max(re) < -thr:
        label = Label.STABLE
    elif min(abs(v) for v in ev) <= thr:
        label = Label.DEGENERATE
    else:
        label = Label.INCONCLUSIVE
    return StabilityVerdict(label, Method.NUMERIC_EIGEN, certs)


def classify_jacobian(J: JacobianAtState, width: float = 1e-9, det_trace: bool = True) -> StabilityVerdict:
    n = J.n
    A = J.matrix
    if n == 1:
        d = A[0][0]
        s = _sign(d, max(abs(d), 1) if not J.exact else 1, 0 if J.exact else width)
        label = {1: Label.UNSTABLE, -1: Label.STABLE, 0: Label.DEGENERATE}[s]
        return StabilityVerdict(label, Method.DERIVATIVE_SIGN, {"df": d})
    if n == 2 and det_trace:
        det = A[0][0] * A[1][1] - A[0][1] * A[1][0]
        tr = A[0][0] + A[1][1]
        w = 0 if J.exact else width
        scale = max(abs(A[0][0] * A[1][1]), abs(A[0][1] * A[1][0]), 1e-300)
        sd, st = _sign(det, scale, w), _sign(tr, max(abs(A[0][0]), abs(A[1][1]), 1e-300), w)
        certs = {"det": det, "trace": tr}
        if sd == 0:
            label = Label.DEGENERATE
        elif sd < 0 or st > 0:
            label = Label.UNSTABLE
        elif st < 0:
            label = Label.STABLE
        else:
            label = Label.INCONCLUSIVE
        return StabilityVerdict(label, Method.DET_TRACE, certs)
    if n == 3:
        _, xi2, xi1, xi0 = char_poly(J)
        return routh_hurwitz_cubic(xi2, xi1, xi0, 0 if J.exact else width)
    if J.exact and n > 3:
        coeffs = char_poly(J)
        if all(c > 0 for c in coeffs) and all(m > 0 for m in hurwitz_minors(coeffs)):
            return StabilityVerdict(Label.STABLE, Method.ROUTH_HURWITZ,
                                    {"charpoly": coeffs})
    return numeric_eigen(J, width)


def classify_state(system: PolynomialSystem, x: Sequence, width: float = 1e-9,
                   det_trace: bool = True, tol: float = STATE_TOL) -> StabilityVerdict:
    """Stability of the steady state ``x``; raises ``ValueError`` if ``x`` is not one.

    ``det_trace=False`` skips the 2x2 determinant/trace route (used for
    families whose exact criterion does not apply) in favor of eigenvalues.
    """
    check_steady_state(system, x, tol)
    return classify_jacobian(jacobian(system, x), width, det_trace)


def family_det_trace_applies(a: Sequence[int], b: Sequence[int], c: Sequence) -> bool:
    """For the two-species irreversible family with mixed signs the exact route needs ``c1 < c2``."""
    if len(a) != 2:
        return True
    signs = {(bi > ai) - (bi < ai) for ai, bi in zip(a, b)}
    if signs == {1, -1}:
        return c[0] < c[1]
    return True


# -- lifting ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lifted:
    raw: RawRates
    state: tuple
    beta: tuple[Fraction, Fraction]
    residual: float


def lift_steady_state(a: Sequence[int], b: Sequence[int], merged: RawRates, state: Sequence,
                      pair: tuple[int, int] = (0, 1), tol: float = STATE_TOL) -> Lifted:
    """Split merged species into the pair ``(p, q)`` of the network with exponents ``a, b``.

    ``merged`` holds the rates of the network in which ``X_p`` and ``X_q`` are
    one species (placed at index ``p``, the ``q`` entry dropped).
    """
    a, b = tuple(a), tuple(b)
    p, q = pair
    if not p < q:
        raise PreconditionError("pair must be ordered (p < q)")
    if not (a[p] < b[p] and a[q] < b[q]):
        raise PreconditionError("both merged species need a_i < b_i")
    at, bt = a[p] + a[q], b[p] + b[q]

    def merge(v):
        return tuple(v[i] + (v[q] if i == p else 0) for i in range(len(v)) if i != q)

    if merged.a != merge(a) or merged.b != merge(b):
        raise PreconditionError("merged rates do not describe the merged network")
    beta = (Fraction(b[p] - a[p], bt - at), Fraction(b[q] - a[q], bt - at))
    if beta[0] + beta[1] != 1:
        raise AssertionError("lifting weights must sum to one")

    def split(v, scale):
        out = list(v)
        out.insert(q, None)
        out[p], out[q] = scale[0] * v[p], scale[1] * v[p]
        return tuple(out)

    c = split(merged.c, beta)
    k = split(merged.k, beta)
    raw = RawRates(a, b, k, c, merged.ells)
    st = list(state)
    st.insert(q, state[p])
    res = max(raw.system().relative_residuals(st))
    if res > tol:
        raise AssertionError(f"lifted state residual {res:.3g}")
    return Lifted(raw, tuple(st), beta, res)


# -- simulation -------------------------------------------------------------------------

@dataclass
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    blew_up: bool = False
    nearest: int | None = None
    distance: float | None = None
    converged: bool = False


def _vector_field(system: PolynomialSystem):
    mons = system.monomials()
    W = np.array(mons, dtype=float)
    C = np.array([[float(p.get(w, 0)) for w in mons] for p in system.polys])

    def f(x):
        return C @ np.prod(np.power(x[None, :], W), axis=1)

    return f


def default_dt(system: PolynomialSystem) -> float:
    """``1e-3`` times the shortest outflow time scale ``1 / max c_i``."""
    rates = []
    for i, p in enumerate(system.polys):
        e = tuple(int(j == i) for j in range(system.n))
        rates.append(abs(float(p.get(e, 0))))
    return 1e-3 / (max(rates) or 1.0)


def simulate(system: PolynomialSystem, x0: Sequence[float], t_end: float | None = None,
             dt: float | None = None, states: Sequence[Sequence] = (), tol: float = 1e-6,
             record_every: int = 1) -> Trajectory:
    """Fixed-step RK4; optionally reports the nearest of ``states`` at the end."""
    dt = default_dt(system) if dt is None else dt
    if dt <= 0:
        raise ValueError("dt must be positive")
    t_end = 1e4 * dt if t_end is None else t_end
    steps = int(round(t_end / dt))
    f = _vector_field(system)
    x = np.array(x0, dtype=float)
    ts, xs = [0.0], [x.copy()]
    blew = False
    with np.errstate(all="ignore"):
        for s in range(1, steps + 1):
            k1 = f(x)
            k2 = f(x + dt / 2 * k1)
            k3 = f(x + dt / 2 * k2)
            k4 = f(x + dt * k3)
            x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(x)) or np.max(np.abs(x)) > 1e300:
                blew = True
                break
            if s % record_every == 0 or s == steps:
                ts.append(s * dt)
                xs.append(x.copy())
    traj = Trajectory(np.array(ts), np.array(xs), blew)
    if states and not blew:
        d = [float(np.max(np.abs(x - np.array(st, dtype=float)) / np.maximum(np.abs(np.array(st, dtype=float)), 1e-300)))
             for st in states]
        traj.nearest = int(np.argmin(d))
        traj.distance = d[traj.nearest]
        traj.converged = traj.distance < tol
    return traj
