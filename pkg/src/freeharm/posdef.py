"""Positive definiteness and l^p summability tests for functions on F_d.

Radial profiles may carry an exact geometric tail ``c_k = A * r^k`` beyond
the explicit coefficients, which lets the summability conditions be
decided in closed form:

* sup_k |phi chi_k|_p / (k+1) < inf
* phi(s) (1+|s|)^(-1-2/p) in l^p
* phi(s) alpha^|s| in l^p for every alpha < 1

With rho = (2d-1)^(1/p) * r, all three hold iff rho <= 1.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp, zeta

from .errors import DomainError, ResourceCapError
from .estimator import BatterySummary, InequalityReport, _perturb, _ratio, case_rng
from .funcspace import RadialFunction, SparseFunction, log_sphere_sizes, parse_complex
from .words import (
    GroupContext,
    Word,
    _mul,
    conjugacy_sphere_count,
    enumerate_ball,
    format_word,
    invert,
    is_cyclically_reduced,
)

PSD_TOL = 1e-9
JACOBI_TOL = 1e-12
# rho within this relative band of 1 counts as the boundary rho = 1
BOUNDARY_TOL = 1e-12
MAX_GRAM_RADIUS = 3
TAIL_TERMS = 1_000_000


# ------------------------------------------------------------ eigenvalues


def _round_robin(m: int):
    """Rounds of disjoint index pairs covering all pairs of range(m), m even."""
    players = list(range(m))
    for _ in range(m - 1):
        yield [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        players = [players[0], players[-1]] + players[1:-1]


def jacobi_eigenvalues(a, tol: float = JACOBI_TOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Each round annihilates n/2 disjoint off-diagonal pairs at once
    (round-robin ordering); sweeps repeat until the off-diagonal Frobenius
    mass drops below ``tol * ||A||_F``.
    """
    A = np.array(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError("expected a square matrix")
    n = A.shape[0]
    if n == 0:
        return np.zeros(0)
    A = 0.5 * (A + A.T)
    m = n + (n % 2)
    if m != n:
        B = np.zeros((m, m))
        B[:n, :n] = A
        A = B
    scale = np.linalg.norm(A)
    if scale == 0.0:
        return np.zeros(n)
    rounds = [np.array(r).T for r in _round_robin(m)]

    def off():
        O = A.copy()
        np.fill_diagonal(O, 0.0)
        return float(np.linalg.norm(O))

    for _ in range(max_sweeps):
        if off() <= tol * scale:
            break
        for P, Q in rounds:
            apq = A[P, Q]
            active = np.abs(apq) > 1e-300
            if not np.any(active):
                continue
            app, aqq = A[P, P], A[Q, Q]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tau = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
                sign = np.where(tau >= 0, 1.0, -1.0)
                # |tau| -> inf gives t -> 0, i.e. no rotation needed
                t = np.where(active, sign / (np.abs(tau) + np.sqrt(1.0 + tau * tau)), 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c
            colP, colQ = A[:, P].copy(), A[:, Q].copy()
            A[:, P] = colP * c - colQ * s
            A[:, Q] = colP * s + colQ * c
            rowP, rowQ = A[P, :].copy(), A[Q, :].copy()
            A[P, :] = c[:, None] * rowP - s[:, None] * rowQ
            A[Q, :] = s[:, None] * rowP + c[:, None] * rowQ
            A[P, Q] = 0.0
            A[Q, P] = 0.0
    else:
        if off() > tol * scale:
            raise RuntimeError("Jacobi iteration did not converge")
    eig = np.sort(np.diag(A))
    if m != n:
        # drop the zero contributed by the padding row
        idx = int(np.argmin(np.abs(eig)))
        eig = np.delete(eig, idx)
    return eig


def hermitian_eigenvalues(h) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix via its real 2n x 2n embedding."""
    H = np.asarray(h, dtype=complex)
    X, Y = H.real, H.imag
    M = np.block([[X, -Y], [Y, X]])
    eig = jacobi_eigenvalues(M)
    return eig[::2]  # every eigenvalue appears twice


# ------------------------------------------------------------ profiles


@dataclass(frozen=True)
class GeometricTail:
    """c_k = amplitude * ratio**k for every k past the explicit coefficients."""

    ratio: float
    amplitude: complex = 1.0

    def __post_init__(self):
        if not (self.ratio > 0 and math.isfinite(self.ratio)):
            raise DomainError(f"tail ratio must be positive, got {self.ratio}")


@dataclass
class RadialProfile:
    """Values c_k of a radial function on the spheres W_k.

    Past ``len(coeffs) - 1`` the values follow ``tail`` if given, are zero
    if ``truncated`` is False, and are unknown otherwise.
    """

    ctx: GroupContext
    coeffs: np.ndarray
    tail: GeometricTail | None = None
    truncated: bool = False

    def __post_init__(self):
        self.coeffs = np.array(self.coeffs, dtype=complex).reshape(-1)
        if self.coeffs.size == 0:
            raise DomainError("a profile needs at least c_0")

    @property
    def K(self) -> int:
        return self.coeffs.size - 1

    @classmethod
    def geometric(cls, ctx: GroupContext, alpha: float, K: int = 0, amplitude: complex = 1.0):
        """phi(s) = amplitude * alpha^|s| with explicit values up to K."""
        k = np.arange(K + 1)
        return cls(ctx, amplitude * float(alpha) ** k, GeometricTail(float(alpha), amplitude))

    @classmethod
    def from_radial(cls, r: RadialFunction) -> "RadialProfile":
        return cls(r.ctx, r.values()[: r.radius + 1])

    def covers(self, radius: int) -> bool:
        return self.tail is not None or not self.truncated or radius <= self.K

    def value(self, k: int) -> complex:
        if k <= self.K:
            return complex(self.coeffs[k])
        if self.tail is not None:
            return complex(self.tail.amplitude) * self.tail.ratio ** k
        if not self.truncated:
            return 0j
        raise DomainError(f"profile is truncated at K={self.K}; value on W_{k} unknown")

    def values(self, K: int) -> np.ndarray:
        return np.array([self.value(k) for k in range(K + 1)], dtype=complex)

    def times_geometric(self, alpha: float) -> "RadialProfile":
        """The profile of s -> phi(s) alpha^|s|."""
        k = np.arange(self.K + 1)
        tail = None
        if self.tail is not None:
            tail = GeometricTail(self.tail.ratio * alpha, self.tail.amplitude)
        return RadialProfile(self.ctx, self.coeffs * float(alpha) ** k, tail, self.truncated)

    def tail_rate(self, p: float) -> float | None:
        """rho = (2d-1)^(1/p) * ratio, or None without a nonzero tail."""
        if self.tail is None or self.tail.amplitude == 0:
            return None
        return (2 * self.ctx.d - 1) ** (1.0 / p) * self.tail.ratio

    def to_json(self) -> dict:
        out = {"d": self.ctx.d, "coeffs": [[c.real, c.imag] for c in self.coeffs.tolist()]}
        if self.tail is not None:
            a = complex(self.tail.amplitude)
            out["tail"] = {"ratio": self.tail.ratio, "amplitude": [a.real, a.imag]}
        if self.truncated:
            out["truncated"] = True
        return out

    @classmethod
    def from_json(cls, obj, ctx: GroupContext | None = None) -> "RadialProfile":
        ctx = ctx or GroupContext(int(obj["d"]))
        coeffs = np.array([parse_complex(v) for v in obj["coeffs"]], dtype=complex)
        ls = float(obj.get("log_scale", 0.0))
        if ls:
            coeffs = coeffs * math.exp(ls)
        tail = None
        if obj.get("tail") is not None:
            t = obj["tail"]
            tail = GeometricTail(float(t["ratio"]), parse_complex(t.get("amplitude", 1.0)))
        return cls(ctx, coeffs, tail, bool(obj.get("truncated", False)))


def _rate_class(rho: float) -> int:
    """-1 below the boundary, 0 on it (within BOUNDARY_TOL), +1 above."""
    if abs(rho - 1.0) <= BOUNDARY_TOL:
        return 0
    return -1 if rho < 1.0 else 1


# ------------------------------------------------------------ gram data


@dataclass
class GramReport:
    base_set: list[Word]
    matrix: np.ndarray
    min_eigenvalue: float
    psd: bool
    tol: float
    hermitian_defect: float = 0.0

    def to_dict(self) -> dict:
        return {
            "base_set": [list(w) for w in self.base_set],
            "size": len(self.base_set),
            "min_eigenvalue": self.min_eigenvalue,
            "psd": self.psd,
            "tol": self.tol,
            "hermitian_defect": self.hermitian_defect,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _phi_lookup(phi, F):
    if isinstance(phi, RadialProfile):
        need = max((len(_mul(invert(s), t)) for s in F for t in F), default=0)
        if not phi.covers(need):
            raise DomainError(f"profile covers radius {phi.K} but the base set needs {need}")
        return lambda w: phi.value(len(w))
    if isinstance(phi, SparseFunction):
        return phi
    raise TypeError("phi must be a SparseFunction or RadialProfile")


def gram_matrix(phi, F, tol: float = PSD_TOL) -> GramReport:
    """G[s, t] = phi(s^-1 t) over the base set F, with its least eigenvalue."""
    F = [Word(w) for w in F]
    look = _phi_lookup(phi, F)
    n = len(F)
    G = np.zeros((n, n), dtype=complex)
    defect = 0.0
    inv = [invert(s) for s in F]
    for i in range(n):
        for j in range(i, n):
            v = look(_mul(inv[i], F[j]))
            G[i, j] = v
            if i == j:
                defect = max(defect, abs(v.imag))
                G[i, i] = v.real
            else:
                w = look(_mul(inv[j], F[i]))
                defect = max(defect, abs(w - v.conjugate()))
                G[j, i] = v.conjugate()
    eig = hermitian_eigenvalues(G)
    min_eig = float(eig[0]) if eig.size else 0.0
    bound = tol * max(1.0, float(np.max(np.sum(np.abs(G), axis=1))) if n else 1.0)
    psd = min_eig >= -bound and defect <= bound
    return GramReport(F, G, min_eig, psd, bound, defect)


def pd_battery_phi_alpha(ctx: GroupContext, alpha: float, radius: int) -> GramReport:
    """Gram report of phi_alpha(s) = alpha^|s| on the full ball of a radius."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    if radius > MAX_GRAM_RADIUS:
        raise ResourceCapError(f"Gram radius {radius} exceeds the cap {MAX_GRAM_RADIUS}")
    return gram_matrix(RadialProfile.geometric(ctx, alpha), enumerate_ball(ctx, radius))


def omega(phi, f: SparseFunction) -> complex:
    """omega_phi(f) = sum_s f(s) phi(s)."""
    if isinstance(phi, RadialProfile):
        return sum((c * phi.value(len(w)) for w, c in f.items()), 0j)
    return sum((c * phi(w) for w, c in f.items()), 0j)


def quadratic_form(report: GramReport, f: SparseFunction) -> complex:
    """<G c, c> with c = f restricted to the base set."""
    c = np.array([f(w) for w in report.base_set], dtype=complex)
    return complex(np.vdot(c, report.matrix @ c))


# ------------------------------------------------------------ conditions


@dataclass
class ConditionReport:
    condition: int
    value: float
    divergence_flag: bool
    k_range: tuple[int, int]
    verdict: str
    p: float
    note: str = ""
    sweep: list[tuple[int, float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "value": self.value,
            "divergence_flag": self.divergence_flag,
            "k_range": list(self.k_range),
            "verdict": self.verdict,
            "p": self.p,
            "note": self.note,
        }

    def sweep_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "sphere_norm", "normalized_value"])
        for k, a, b in self.sweep:
            w.writerow([k, repr(float(a)), repr(float(b))])
        return buf.getvalue()


def _check_p(p: float) -> float:
    p = float(p)
    if not (2.0 <= p < math.inf):
        raise DomainError(f"p must lie in [2, inf), got {p}")
    return p


def log_sphere_norms(phi: RadialProfile, p: float, K: int) -> np.ndarray:
    """log |phi chi_k|_p = log|W_k| / p + log|c_k| for k = 0..K."""
    with np.errstate(divide="ignore"):
        return log_sphere_sizes(phi.ctx, K) / p + np.log(np.abs(phi.values(K)))


def _exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


def _head_range(phi: RadialProfile, K: int) -> int:
    if phi.truncated and phi.tail is None:
        return min(K, phi.K)
    return K


def condition2_sup(phi: RadialProfile, p: float, K: int) -> ConditionReport:
    """sup_k |phi chi_k|_p / (k+1)."""
    p = _check_p(p)
    Kh = _head_range(phi, K)
    # with rho <= 1 the tail terms decrease, so the first tail term is the tail sup
    span = max(Kh, phi.K + 1 if phi.tail is not None else Kh)
    logs = log_sphere_norms(phi, p, span)
    normalized = logs - np.log(np.arange(1, span + 2))
    sweep = [(k, _exp(logs[k]), _exp(normalized[k])) for k in range(Kh + 1)]
    value = _exp(float(np.max(normalized)))
    rho = phi.tail_rate(p)
    if rho is not None:
        cls = _rate_class(rho)
        if cls > 0:
            return ConditionReport(2, math.inf, True, (0, Kh), "fail", p,
                                   f"tail grows like rho^k/(k+1), rho={rho:.6g} > 1", sweep)
        return ConditionReport(2, value, False, (0, Kh), "pass", p, f"tail rho={rho:.6g} <= 1", sweep)
    if phi.truncated and phi.tail is None:
        return ConditionReport(2, value, False, (0, Kh), "inconclusive", p,
                               "no tail model beyond the explicit coefficients", sweep)
    return ConditionReport(2, value, False, (0, Kh), "pass", p, "finitely supported", sweep)


def _tail_sum_weighted(x: float, start: int, s: float, exact_boundary: bool) -> float:
    """sum_{k >= start} x^k (1+k)^(-s) for 0 < x <= 1."""
    if exact_boundary:
        return float(zeta(s, start + 1))
    n_needed = math.ceil(-41.5 / math.log(x)) + 1 if x < 1 else TAIL_TERMS
    n = min(max(n_needed, 1), TAIL_TERMS)
    k = np.arange(start, start + n, dtype=float)
    logs = k * math.log(x) - s * np.log1p(k)
    total = float(np.exp(logsumexp(logs)))
    # remainder bound: x^(start+n) * zeta(s, start+n+1)
    return total + x ** (start + n) * float(zeta(s, start + n + 1))


def condition3_sum(phi: RadialProfile, p: float, K: int) -> ConditionReport:
    """sum_k |W_k| |c_k|^p (1+k)^(-p-2), with the tail summed in closed form."""
    p = _check_p(p)
    Kh = _head_range(phi, K)
    Kexp = phi.K if phi.tail is not None or not phi.truncated else Kh
    span = max(Kh, Kexp)
    logs = log_sphere_norms(phi, p, span)
    kk = np.arange(span + 1)
    term_logs = p * logs - (p + 2) * np.log1p(kk)
    partial = np.logaddexp.accumulate(term_logs)
    sweep = [(k, _exp(logs[k]), _exp(term_logs[k])) for k in range(Kh + 1)]
    head_log = float(logsumexp(term_logs[: Kexp + 1]))
    rho = phi.tail_rate(p)
    if rho is not None:
        cls = _rate_class(rho)
        if cls > 0:
            return ConditionReport(3, math.inf, True, (0, Kh), "fail", p,
                                   f"terms grow like rho^(pk), rho={rho:.6g} > 1", sweep)
        d = phi.ctx.d
        amp = abs(complex(phi.tail.amplitude)) ** p
        x = 1.0 if cls == 0 else rho ** p
        tail = amp * (2 * d / (2 * d - 1)) * _tail_sum_weighted(x, phi.K + 1, p + 2, cls == 0)
        total = math.log(_exp(head_log) + tail) if tail > 0 else head_log
        return ConditionReport(3, _exp(total), False, (0, Kh), "pass", p,
                               f"head through k={phi.K} plus closed-form tail", sweep)
    value = _exp(float(partial[Kexp]))
    if phi.truncated and phi.tail is None:
        return ConditionReport(3, value, False, (0, Kh), "inconclusive", p,
                               "partial sum only; no tail model", sweep)
    return ConditionReport(3, value, False, (0, Kh), "pass", p, "finitely supported", sweep)


def condition4_limsup(phi: RadialProfile, p: float, K: int) -> ConditionReport:
    """limsup_k |phi chi_k|_p^(1/k) <= 1, i.e. phi * phi_alpha in l^p for all alpha < 1."""
    p = _check_p(p)
    Kh = _head_range(phi, K)
    logs = log_sphere_norms(phi, p, Kh)
    roots = [(k, _exp(logs[k]), _exp(logs[k] / k) if k else _exp(logs[0])) for k in range(Kh + 1)]
    rho = phi.tail_rate(p)
    if rho is not None:
        cls = _rate_class(rho)
        verdict = "fail" if cls > 0 else "pass"
        return ConditionReport(4, rho, cls > 0, (0, Kh), verdict, p,
                               "limsup from the geometric tail (exact)", roots)
    if phi.truncated and phi.tail is None:
        est = roots[-1][2] if Kh > 0 else 0.0
        return ConditionReport(4, est, False, (0, Kh), "inconclusive", p,
                               "k-th root estimate at the last explicit sphere", roots)
    return ConditionReport(4, 0.0, False, (0, Kh), "pass", p, "finitely supported", roots)


def condition_battery(phi: RadialProfile, p: float, K: int) -> list[ConditionReport]:
    return [condition2_sup(phi, p, K), condition3_sum(phi, p, K), condition4_limsup(phi, p, K)]


def chain_violations(reports: list[ConditionReport]) -> list[str]:
    """Breaks of (2) pass => (3) pass => (4) pass."""
    by = {r.condition: r.verdict for r in reports}
    out = []
    if by.get(2) == "pass" and by.get(3) != "pass":
        out.append("(2) passes but (3) does not")
    if by.get(3) == "pass" and by.get(4) != "pass":
        out.append("(3) passes but (4) does not")
    return out


# ------------------------------------------------------------ thresholds


def lp_threshold(ctx: GroupContext, p: float) -> float:
    """(2d-1)^(-1/p): phi_alpha extends to the l^p completion iff alpha <= this."""
    p = _check_p(p)
    return 1.0 / (2 * ctx.d - 1) ** (1.0 / p)


def phi_alpha_in_lp(ctx: GroupContext, alpha: float, p: float) -> bool:
    """Strict membership phi_alpha in l^p, i.e. (2d-1) alpha^p < 1."""
    p = _check_p(p)
    rho = (2 * ctx.d - 1) ** (1.0 / p) * alpha
    return _rate_class(rho) < 0


def phi_alpha_extendable(ctx: GroupContext, alpha: float, p: float) -> bool:
    """Condition (4) verdict for phi_alpha; includes the boundary."""
    return condition4_limsup(RadialProfile.geometric(ctx, alpha), p, 0).verdict == "pass"


@dataclass
class SeparationWitness:
    d: int
    q: float
    p: float
    lower: float
    upper: float
    alpha: float
    passes_p: bool
    fails_q: bool

    @property
    def separates(self) -> bool:
        return self.lower < self.alpha <= self.upper and self.passes_p and self.fails_q

    def to_dict(self) -> dict:
        out = dict(self.__dict__)
        out["separates"] = self.separates
        return out


def separation_witness(ctx: GroupContext, q: float, p: float, alpha: float | None = None) -> SeparationWitness:
    """phi_alpha with (2d-1)^(-1/q) < alpha <= (2d-1)^(-1/p), for 2 <= q < p."""
    q, p = _check_p(q), _check_p(p)
    if not q < p:
        raise DomainError(f"need q < p, got q={q}, p={p}")
    lo, hi = lp_threshold(ctx, q), lp_threshold(ctx, p)
    a = 0.5 * (lo + hi) if alpha is None else float(alpha)
    return SeparationWitness(
        ctx.d, q, p, lo, hi, a,
        phi_alpha_extendable(ctx, a, p),
        not phi_alpha_extendable(ctx, a, q),
    )


@dataclass
class TraceGrowthRow:
    n: int
    count: int
    lower_bound: int
    passed: bool


def trace_growth_check(ctx: GroupContext, w, n_max: int) -> list[TraceGrowthRow]:
    """Compare |W_{k+2n} cap K| with (2d-1)^(n-1) for n = 1..n_max."""
    w = Word(w, ctx.d)
    if not w:
        raise DomainError("the trivial class {e} is excluded")
    if not is_cyclically_reduced(w):
        raise DomainError(f"{format_word(w)} is not cyclically reduced")
    ctx.check_radius(len(w) + 2 * n_max)
    rows = []
    for n in range(1, n_max + 1):
        count = conjugacy_sphere_count(ctx, w, n)
        bound = (2 * ctx.d - 1) ** (n - 1)
        rows.append(TraceGrowthRow(n, count, bound, count >= bound))
    return rows


# ------------------------------------------------------------ hoelder


def log_lp_norm(phi: RadialProfile, p: float) -> float:
    """log |phi|_p over all of F_d; +inf when the tail is not p-summable."""
    p = float(p)
    if p < 1:
        raise DomainError(f"p must be >= 1, got {p}")
    if phi.truncated and phi.tail is None:
        raise DomainError("norm of a truncated profile without a tail is undefined")
    with np.errstate(divide="ignore"):
        head = log_sphere_sizes(phi.ctx, phi.K) + p * np.log(np.abs(phi.coeffs))
    total = float(logsumexp(head)) if np.any(np.isfinite(head)) else -math.inf
    rho = phi.tail_rate(p)
    if rho is not None:
        if _rate_class(rho) >= 0:
            return math.inf
        d = phi.ctx.d
        x = (2 * d - 1) * phi.tail.ratio ** p
        start = phi.K + 1
        log_tail = (
            p * math.log(abs(complex(phi.tail.amplitude)))
            + math.log(2 * d / (2 * d - 1))
            + start * math.log(x)
            - math.log1p(-x)
        )
        total = float(np.logaddexp(total, log_tail))
    return total / p


def holder_triple_check(phi: RadialProfile, alpha: float, beta: float, p: float, q: float, r: float) -> InequalityReport:
    """|phi phi_alpha phi_beta|_p <= |phi phi_alpha|_q |phi_beta|_r with 1/p = 1/q + 1/r."""
    if abs(1 / p - 1 / q - 1 / r) > 1e-12:
        raise DomainError(f"exponents violate 1/p = 1/q + 1/r: p={p}, q={q}, r={r}")
    for name, v in (("alpha", alpha), ("beta", beta)):
        if not 0 < v < 1:
            raise DomainError(f"{name} must lie in (0, 1), got {v}")
    ctx = phi.ctx
    pa = phi.times_geometric(alpha)
    lhs = log_lp_norm(pa.times_geometric(beta), p)
    rhs = log_lp_norm(pa, q) + log_lp_norm(RadialProfile.geometric(ctx, beta), r)
    if math.isinf(rhs) and rhs > 0:
        rep = InequalityReport.compare_logs(lhs, math.inf, label="rhs infinite")
        rep.passed = True
        return rep
    return InequalityReport.compare_logs(lhs, rhs, label=f"p={p:g},q={q:g},r={r:g}")


def conjugate_exponent_r(p: float, q: float) -> float:
    """r with 1/p = 1/q + 1/r, i.e. r = pq / (q - p) for q > p."""
    if not q > p:
        raise DomainError(f"need q > p, got p={p}, q={q}")
    return p * q / (q - p)


# ------------------------------------------------------------ batteries


def random_holder_instance(rng: np.random.Generator, ctx: GroupContext):
    """A random geometric profile with admissible (alpha, beta, p, q, r)."""
    p = float(rng.uniform(2.0, 8.0))
    q = p * float(rng.uniform(1.1, 4.0))
    r = conjugate_exponent_r(p, q)
    head = int(rng.integers(0, 5))
    rad = np.sqrt(rng.random(head + 1))
    coeffs = rad * np.exp(2j * np.pi * rng.random(head + 1))
    tail = GeometricTail(float(rng.uniform(0.05, 1.0)), complex(coeffs[-1]))
    phi = RadialProfile(ctx, coeffs, tail)
    alpha = float(rng.uniform(0.01, 0.99))
    b = 2 * ctx.d - 1
    if rng.random() < 0.5:
        # the window in which phi_beta is r-summable
        beta = float(rng.uniform(b ** (-2 / r), b ** (-1 / r)))
    else:
        beta = float(rng.uniform(0.01, 0.99))
    return phi, alpha, beta, p, q, r


def holder_battery(seed: int, cases: int, *, rhs_factor: float = 1.0):
    failures = 0
    worst = 0.0
    bad = []
    for case in range(cases):
        rng = case_rng(seed, case)
        ctx = GroupContext(int(rng.choice([2, 3])))
        phi, alpha, beta, p, q, r = random_holder_instance(rng, ctx)
        rep = _perturb(holder_triple_check(phi, alpha, beta, p, q, r), rhs_factor)
        if rep.log_rhs is not None and math.isfinite(rep.log_rhs):
            worst = max(worst, _ratio(rep))
        if not rep.passed:
            failures += 1
            bad.append(f"case {case}: {rep.label}")
    return BatterySummary("holder", cases, cases, failures, worst, bad)


GRID_ALPHAS = tuple(round(0.01 * i, 2) for i in range(10, 96))
GRID_PS = (2.0, 2.5, 3.0, 4.0, 8.0)


def condition_grid(alphas=None, ps=GRID_PS, ds=(2, 3), K: int = 30):
    """Condition battery for phi_alpha over a grid; yields (d, p, alpha, reports)."""
    for d in ds:
        ctx = GroupContext(d)
        grid = list(alphas) if alphas is not None else list(GRID_ALPHAS)
        for p in ps:
            points = sorted(set(grid + [lp_threshold(ctx, p)]))
            for a in points:
                yield d, p, a, condition_battery(RadialProfile.geometric(ctx, a, K=4), p, K)
