"""Finitely supported functions on F_d and the radial convolution algebra.

``SparseFunction`` stores a dict ``Word -> complex``.  ``RadialFunction``
stores sphere coefficients ``c_0..c_K`` plus a log-scale ledger ``L`` and
represents ``exp(L) * sum_k c_k chi_k``; the ledger lets iterated
convolution powers run far past the double range.
"""

from __future__ import annotations

import math
import os
from collections.abc import Iterable, Mapping

import numpy as np
from scipy.special import logsumexp

from .errors import DomainError, InvalidLetterError, ResourceCapError, ShapeError
from .words import GroupContext, Word, _mul, enumerate_sphere, invert, iter_sphere

STORAGE_EPS = 1e-300
RADIAL_TOL = 1e-12
SCALE_HI = 1e150
SCALE_LO = 1e-150
# rough bytes per stored term (tuple key + complex value + dict slot)
BYTES_PER_TERM = 200
DEFAULT_CAP_MB = 256


def cap_bytes() -> int:
    raw = os.environ.get("FREEHARM_CAP_MB")
    mb = float(raw) if raw else DEFAULT_CAP_MB
    return int(mb * 1024 * 1024)


def check_term_budget(n_terms: int, what: str) -> None:
    if n_terms * BYTES_PER_TERM > cap_bytes():
        raise ResourceCapError(
            f"{what}: about {n_terms} terms exceeds the memory cap "
            f"({cap_bytes() // (1024 * 1024)} MB, set FREEHARM_CAP_MB); "
            "use the radial path for sphere-constant inputs"
        )


class SparseFunction:
    """Finitely supported complex function on F_d.

    Treat instances as immutable: every operation returns a new function.
    """

    __slots__ = ("ctx", "_terms")

    def __init__(self, ctx: GroupContext, terms: Mapping | Iterable = ()):
        self.ctx = ctx
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Word, complex] = {}
        for w, c in items:
            w = w if isinstance(w, Word) else Word(w, ctx.d)
            if w and max(abs(x) for x in w) > ctx.d:
                Word(w, ctx.d)  # raises InvalidLetterError
            clean[w] = clean.get(w, 0j) + complex(c)
        self._terms = {w: c for w, c in clean.items() if abs(c) >= STORAGE_EPS}

    @classmethod
    def _from_clean(cls, ctx, terms: dict) -> "SparseFunction":
        obj = cls.__new__(cls)
        obj.ctx = ctx
        obj._terms = {w: c for w, c in terms.items() if abs(c) >= STORAGE_EPS}
        return obj

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> list[Word]:
        return list(self._terms)

    def __len__(self):
        return len(self._terms)

    def __call__(self, s) -> complex:
        return self._terms.get(tuple(s), 0j)

    def __iter__(self):
        return iter(self._terms)

    def radius(self) -> int:
        return max((len(w) for w in self._terms), default=0)

    def lengths(self) -> set[int]:
        return {len(w) for w in self._terms}

    def __add__(self, other: "SparseFunction") -> "SparseFunction":
        return add(self, other)

    def __sub__(self, other: "SparseFunction") -> "SparseFunction":
        return add(self, scale(other, -1))

    def __neg__(self):
        return scale(self, -1)

    def __mul__(self, c):
        if isinstance(c, SparseFunction):
            return NotImplemented
        return scale(self, c)

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseFunction") -> "SparseFunction":
        return convolve(self, other)

    def __eq__(self, other):
        if not isinstance(other, SparseFunction):
            return NotImplemented
        return self.ctx == other.ctx and self._terms == other._terms

    def __repr__(self):
        from .words import format_word

        body = ", ".join(f"{format_word(w)}: {c:g}" for w, c in list(self._terms.items())[:6])
        more = ", ..." if len(self._terms) > 6 else ""
        return f"SparseFunction(d={self.ctx.d}, {{{body}{more}}})"

    def allclose(self, other: "SparseFunction", rtol=1e-12, atol=1e-12) -> bool:
        keys = set(self._terms) | set(other._terms)
        scale_ = max([abs(c) for c in self._terms.values()] + [abs(c) for c in other._terms.values()] + [0.0])
        return all(abs(self(w) - other(w)) <= atol + rtol * scale_ for w in keys)


def delta(ctx: GroupContext, s=()) -> SparseFunction:
    return SparseFunction(ctx, {Word(s, ctx.d): 1.0})


def chi(ctx: GroupContext, k: int) -> SparseFunction:
    """Indicator of the sphere W_k."""
    if k < 0:
        raise DomainError(f"sphere index must be >= 0, got {k}")
    ctx.check_radius(k)
    check_term_budget(ctx.sphere_size(k), f"chi_{k}")
    return SparseFunction._from_clean(ctx, {w: 1 + 0j for w in iter_sphere(ctx, k)})


def add(f: SparseFunction, g: SparseFunction) -> SparseFunction:
    _same_ctx(f.ctx, g.ctx)
    out = dict(f._terms)
    for w, c in g._terms.items():
        out[w] = out.get(w, 0j) + c
    return SparseFunction._from_clean(f.ctx, out)


def scale(f: SparseFunction, c: complex) -> SparseFunction:
    c = complex(c)
    return SparseFunction._from_clean(f.ctx, {w: c * v for w, v in f._terms.items()})


def involution(f: SparseFunction) -> SparseFunction:
    """f*(s) = conj(f(s^-1))."""
    return SparseFunction._from_clean(
        f.ctx, {invert(w): v.conjugate() for w, v in f._terms.items()}
    )


def conjugate(f: SparseFunction) -> SparseFunction:
    """Pointwise complex conjugate."""
    return SparseFunction._from_clean(f.ctx, {w: v.conjugate() for w, v in f._terms.items()})


def check_vee(f: SparseFunction) -> SparseFunction:
    """f^vee(s) = f(s^-1)."""
    return SparseFunction._from_clean(f.ctx, {invert(w): v for w, v in f._terms.items()})


def pointwise(f: SparseFunction, g: SparseFunction) -> SparseFunction:
    _same_ctx(f.ctx, g.ctx)
    small, big = (f, g) if len(f) <= len(g) else (g, f)
    return SparseFunction._from_clean(
        f.ctx, {w: c * big._terms[w] for w, c in small._terms.items() if w in big._terms}
    )


def convolution_size_bound(f: SparseFunction, g: SparseFunction) -> int:
    """Upper bound on |supp(f*g)| from term counts and reachable spheres."""
    naive = len(f) * len(g)
    lengths = set()
    for k in f.lengths():
        for l in g.lengths():
            lengths.update(range(abs(k - l), k + l + 1, 2))
    ctx = f.ctx
    by_spheres = 0
    for m in lengths:
        by_spheres += ctx.sphere_size(m)
        if by_spheres >= naive:
            break
    return min(naive, by_spheres)


def convolve(f: SparseFunction, g: SparseFunction) -> SparseFunction:
    """(f*g)(s) = sum over s = tu of f(t) g(u)."""
    _same_ctx(f.ctx, g.ctx)
    if not f._terms or not g._terms:
        return SparseFunction._from_clean(f.ctx, {})
    check_term_budget(convolution_size_bound(f, g), "convolve")
    out: dict[tuple, complex] = {}
    get = out.get
    ft, gt = list(f._terms.items()), list(g._terms.items())
    if len(ft) <= len(gt):
        for t, a in ft:
            for u, b in gt:
                key = _mul(t, u)
                out[key] = get(key, 0j) + a * b
    else:
        for u, b in gt:
            for t, a in ft:
                key = _mul(t, u)
                out[key] = get(key, 0j) + a * b
    return SparseFunction._from_clean(
        f.ctx, {Word._trusted(k): v for k, v in out.items()}
    )


def convolve_power(f: SparseFunction, n: int) -> SparseFunction:
    """f^{*n} for n >= 1 by binary exponentiation."""
    if n < 1:
        raise DomainError(f"power must be >= 1, got {n}")
    result = None
    base = f
    while True:
        if n & 1:
            result = base if result is None else convolve(result, base)
        n >>= 1
        if not n:
            return result
        base = convolve(base, base)


def sphere_restrict(f: SparseFunction, m: int) -> SparseFunction:
    """Pointwise product with chi_m."""
    if m < 0:
        raise DomainError(f"sphere index must be >= 0, got {m}")
    return SparseFunction._from_clean(f.ctx, {w: c for w, c in f._terms.items() if len(w) == m})


def _check_q(q: float, allow_inf=True) -> float:
    q = float(q)
    if math.isnan(q) or q < 1 or (math.isinf(q) and not allow_inf):
        raise DomainError(f"exponent q must satisfy q >= 1, got {q}")
    return q


def lq_norm_of_values(values, q: float) -> float:
    q = _check_q(q)
    a = np.abs(np.asarray(values, dtype=complex))
    if a.size == 0:
        return 0.0
    top = float(a.max())
    if math.isinf(q):
        return top
    if top == 0.0:
        return 0.0
    # np.sum is pairwise; rescaling by the max keeps |c|^q in range
    return top * float(np.sum((a / top) ** q)) ** (1.0 / q)


def lq_norm(f: SparseFunction, q: float) -> float:
    """|f|_q = (sum |f(s)|^q)^(1/q); q = inf gives the max modulus."""
    return lq_norm_of_values(list(f._terms.values()), q)


def _same_ctx(a: GroupContext, b: GroupContext) -> None:
    if a.d != b.d:
        raise DomainError(f"context mismatch: d={a.d} vs d={b.d}")


# ---------------------------------------------------------------- radial


class RadialFunction:
    """exp(log_scale) * sum_k coeffs[k] * chi_k."""

    __slots__ = ("ctx", "coeffs", "log_scale")

    def __init__(self, ctx: GroupContext, coeffs, log_scale: float = 0.0):
        c = np.array(coeffs, dtype=complex).reshape(-1)
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        if not np.all(np.isfinite(c)) or not math.isfinite(log_scale):
            raise DomainError("radial coefficients and log_scale must be finite")
        self.ctx = ctx
        self.coeffs, self.log_scale = _renormalize(c, float(log_scale))
        self.coeffs.setflags(write=False)

    @property
    def radius(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(nz[-1]) if nz.size else 0

    def values(self) -> np.ndarray:
        """Coefficients with the ledger folded in; may overflow to inf."""
        with np.errstate(over="ignore", invalid="ignore"):
            return self.coeffs * np.exp(self.log_scale)

    def __matmul__(self, other):
        return radial_convolve(self, other)

    def __repr__(self):
        return f"RadialFunction(d={self.ctx.d}, coeffs={self.coeffs.tolist()}, log_scale={self.log_scale})"


def _renormalize(c: np.ndarray, log_scale: float):
    top = float(np.max(np.abs(c))) if c.size else 0.0
    if top == 0.0:
        return c, 0.0
    if SCALE_LO <= top <= SCALE_HI:
        return c, log_scale
    return c / top, log_scale + math.log(top)


def radial(ctx: GroupContext, coeffs, log_scale: float = 0.0) -> RadialFunction:
    return RadialFunction(ctx, coeffs, log_scale)


def radial_chi(ctx: GroupContext, k: int) -> RadialFunction:
    c = np.zeros(k + 1, dtype=complex)
    c[k] = 1
    return RadialFunction(ctx, c)


def to_radial(f: SparseFunction) -> RadialFunction:
    """Sphere coefficients of a sphere-constant function.

    Raises ShapeError naming the first sphere where f is not constant.
    """
    ctx = f.ctx
    by_sphere: dict[int, list[complex]] = {}
    for w, c in f._terms.items():
        by_sphere.setdefault(len(w), []).append(c)
    K = max(by_sphere, default=0)
    coeffs = np.zeros(K + 1, dtype=complex)
    for k in sorted(by_sphere):
        vals = by_sphere[k]
        if len(vals) != ctx.sphere_size(k):
            raise ShapeError(
                f"not sphere-constant on W_{k}: {len(vals)} of {ctx.sphere_size(k)} words in support",
                sphere=k,
            )
        ref = vals[0]
        tol = RADIAL_TOL * max(abs(v) for v in vals)
        if any(abs(v - ref) > tol for v in vals):
            raise ShapeError(f"not sphere-constant on W_{k}", sphere=k)
        # exact round trip when the sphere is exactly constant
        coeffs[k] = ref if all(v == ref for v in vals) else sum(vals) / len(vals)
    return RadialFunction(ctx, coeffs)


def is_radial(f: SparseFunction) -> bool:
    try:
        to_radial(f)
    except ShapeError:
        return False
    return True


def from_radial(r: RadialFunction) -> SparseFunction:
    ctx = r.ctx
    vals = r.values()
    K = r.radius
    ctx.check_radius(K)
    check_term_budget(ctx.ball_size(K), "from_radial")
    terms = {}
    for k in range(K + 1):
        if vals[k] != 0:
            for w in enumerate_sphere(ctx, k):
                terms[w] = complex(vals[k])
    return SparseFunction._from_clean(ctx, terms)


def _apply_chi1(ctx: GroupContext, y: np.ndarray) -> np.ndarray:
    """Coefficients of chi_1 (.) y where y has length n; result has n + 1.

    chi_1 chi_0 = chi_1, chi_1 chi_1 = chi_2 + 2d chi_0,
    chi_1 chi_k = chi_{k+1} + (2d-1) chi_{k-1} for k >= 2.
    """
    n = y.size
    out = np.zeros(n + 1, dtype=complex)
    out[1:] += y
    if n > 1:
        out[0] += 2 * ctx.d * y[1]
        out[1 : n - 1] += (2 * ctx.d - 1) * y[2:]
    return out


def radial_convolve(x: RadialFunction, y: RadialFunction) -> RadialFunction:
    """Exact radial product via the chi-basis three-term recurrence.

    T_j = chi_j (.) y is built from T_{j+1} = chi_1 T_j - (2d-1) T_{j-1}
    (with 2d in place of 2d-1 at j = 1).  Whenever T_j grows past the
    scale window, T_j, T_{j-1} and the running sum are rescaled together.
    """
    _same_ctx(x.ctx, y.ctx)
    ctx = x.ctx
    a = x.coeffs[: x.radius + 1]
    b = y.coeffs[: y.radius + 1]
    n = a.size + b.size - 1
    q = 2 * ctx.d - 1
    acc = np.zeros(n, dtype=complex)
    local = 0.0  # shared log-scale of prev, cur and acc

    def padded(v):
        out = np.zeros(n, dtype=complex)
        out[: v.size] = v
        return out

    prev = np.zeros(n, dtype=complex)
    cur = padded(b)
    acc += a[0] * cur
    for j in range(1, a.size):
        nxt = _apply_chi1(ctx, cur)[:n]
        if j == 2:
            nxt -= 2 * ctx.d * prev
        elif j > 2:
            nxt -= q * prev
        prev, cur = cur, nxt
        acc += a[j] * cur
        top = float(np.max(np.abs(cur)))
        if top > SCALE_HI:
            prev = prev / top
            cur = cur / top
            acc = acc / top
            local += math.log(top)
    return RadialFunction(ctx, acc, x.log_scale + y.log_scale + local)


def radial_power(x: RadialFunction, n: int) -> RadialFunction:
    if n < 1:
        raise DomainError(f"power must be >= 1, got {n}")
    result = None
    base = x
    while True:
        if n & 1:
            result = base if result is None else radial_convolve(result, base)
        n >>= 1
        if not n:
            return result
        base = radial_convolve(base, base)


def radial_involution(x: RadialFunction) -> RadialFunction:
    # spheres are inversion-invariant, so only conjugation remains
    return RadialFunction(x.ctx, np.conj(x.coeffs), x.log_scale)


def log_sphere_sizes(ctx: GroupContext, K: int) -> np.ndarray:
    k = np.arange(K + 1, dtype=float)
    out = math.log(2 * ctx.d) + (k - 1) * math.log(2 * ctx.d - 1)
    out[0] = 0.0
    return out


def radial_log_norm(x: RadialFunction, q: float) -> float:
    """log |x|_q, using |x|_q^q = sum_k |W_k| |c_k|^q in log space."""
    q = _check_q(q, allow_inf=True)
    c = np.abs(x.coeffs[: x.radius + 1])
    if not np.any(c):
        return -math.inf
    if math.isinf(q):
        return float(np.log(c.max())) + x.log_scale
    nz = c > 0
    logs = log_sphere_sizes(x.ctx, c.size - 1)[nz] + q * np.log(c[nz])
    return float(logsumexp(logs)) / q + x.log_scale


def radial_lq_norm(x: RadialFunction, q: float) -> tuple[float, float]:
    """|x|_q as ``(mantissa, log_scale)`` with value mantissa * e^log_scale."""
    if math.isinf(float(q)):
        raise DomainError("radial_lq_norm requires finite q")
    log_norm = radial_log_norm(x, q)
    if log_norm == -math.inf:
        return 0.0, 0.0
    exponent = math.floor(log_norm)
    return math.exp(log_norm - exponent), float(exponent)


# ------------------------------------------------------------ json forms


def function_to_json(f: SparseFunction) -> dict:
    terms = sorted(f.items(), key=lambda kv: (len(kv[0]), list(kv[0])))
    return {
        "d": f.ctx.d,
        "terms": [{"word": list(w), "re": c.real, "im": c.imag} for w, c in terms],
    }


def function_from_json(obj: Mapping, ctx: GroupContext | None = None) -> SparseFunction:
    ctx = ctx or GroupContext(int(obj["d"]))
    terms = []
    for i, t in enumerate(obj["terms"]):
        try:
            w = Word(t["word"], ctx.d)
        except InvalidLetterError as exc:
            raise InvalidLetterError(exc.letter, ctx.d, f"terms[{i}].word[{exc.position}]") from None
        terms.append((w, complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))))
    return SparseFunction(ctx, terms)


def radial_to_json(x: RadialFunction) -> dict:
    return {
        "d": x.ctx.d,
        "coeffs": [[c.real, c.imag] for c in x.coeffs.tolist()],
        "log_scale": x.log_scale,
    }


def parse_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        re, im = (list(v) + [0.0])[:2]
        return complex(float(re), float(im))
    return complex(float(v))


def radial_from_json(obj: Mapping, ctx: GroupContext | None = None) -> RadialFunction:
    ctx = ctx or GroupContext(int(obj["d"]))
    coeffs = [parse_complex(v) for v in obj["coeffs"]]
    return RadialFunction(ctx, coeffs, float(obj.get("log_scale", 0.0)))
