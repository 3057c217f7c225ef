"""Norm estimates from convolution powers and checks of the sphere
convolution inequalities.

For f in the group ring and h = f* * f, the numbers

    u_n = |h^{*2n}|_q^{1/(4n)}

bound the operator norm of f in every representation whose diagonal
coefficient lies in l^p (1/p + 1/q = 1) from above, in the liminf.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DomainError, PreconditionError, ResourceCapError, ShapeError
from .funcspace import (
    RadialFunction,
    SparseFunction,
    check_vee,
    conjugate,
    convolve,
    convolve_power,
    delta,
    from_radial,
    involution,
    lq_norm,
    radial_convolve,
    radial_involution,
    radial_log_norm,
    radial_power,
    sphere_restrict,
    to_radial,
)
from .words import GroupContext, Word, enumerate_sphere, format_word, invert

REL_TOL = 1e-9
MAX_SPARSE_POWER = 4


@dataclass
class InequalityReport:
    """lhs <= rhs, judged as lhs <= rhs * (1 + 1e-9).

    ``log_lhs``/``log_rhs`` carry the comparison when the plain values
    overflow a double.
    """

    lhs: float
    rhs: float
    slack: float
    passed: bool
    exact_zero_case: bool = False
    log_lhs: float | None = None
    log_rhs: float | None = None
    label: str = ""

    @classmethod
    def compare(cls, lhs, rhs, *, label="", rel_tol=REL_TOL) -> "InequalityReport":
        return cls(lhs, rhs, rhs - lhs, lhs <= rhs * (1 + rel_tol), label=label)

    @classmethod
    def compare_logs(cls, log_lhs, log_rhs, *, label="", rel_tol=REL_TOL) -> "InequalityReport":
        lhs, rhs = _safe_exp(log_lhs), _safe_exp(log_rhs)
        slack = rhs - lhs if math.isfinite(lhs) and math.isfinite(rhs) else math.nan
        passed = log_lhs <= log_rhs + math.log1p(rel_tol)
        return cls(lhs, rhs, slack, passed, log_lhs=log_lhs, log_rhs=log_rhs, label=label)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), allow_nan=True)


def _safe_exp(x: float) -> float:
    if x == -math.inf:
        return 0.0
    return math.exp(x) if x < 709.0 else math.inf


@dataclass
class NormEstimateReport:
    entries: list[tuple[int, float, float]]
    q: float
    descriptor: str
    monotone_flag: bool
    path: str = "radial"
    log_u: list[float] = field(default_factory=list)

    @property
    def final(self) -> float:
        return self.entries[-1][1]

    def values(self) -> list[float]:
        return [u for _, u, _ in self.entries]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "u_n", "log_scale"])
        for n, u, ls in self.entries:
            w.writerow([n, repr(float(u)), repr(float(ls))])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "input": self.descriptor,
            "path": self.path,
            "monotone": self.monotone_flag,
            "entries": [{"n": n, "u_n": u, "log_scale": ls} for n, u, ls in self.entries],
        }


def _check_q_range(q: float) -> float:
    q = float(q)
    if not 1.0 <= q <= 2.0:
        raise DomainError(f"q must lie in [1, 2] for the convolution lemmas, got {q}")
    return q


def _as_radial(f) -> RadialFunction | None:
    if isinstance(f, RadialFunction):
        return f
    try:
        return to_radial(f)
    except ShapeError:
        return None


def _validate_schedule(schedule) -> list[int]:
    sched = sorted(set(int(n) for n in schedule))
    if not sched:
        raise DomainError("empty schedule")
    for n in sched:
        if n < 1 or n & (n - 1):
            raise DomainError(f"schedule entries must be powers of two, got {n}")
    return sched


def doubling_schedule(max_n: int) -> list[int]:
    out, n = [], 1
    while n <= max_n:
        out.append(n)
        n *= 2
    return out


def power_norm_sequence(f, q: float, schedule, *, descriptor: str = "", path: str = "auto") -> NormEstimateReport:
    """u_n = |h^{*2n}|_q^{1/(4n)} with h = f* * f along a doubling schedule.

    Sphere-constant inputs (or a RadialFunction) use repeated radial
    squaring; anything else runs on sparse convolution and is limited to
    n <= MAX_SPARSE_POWER.  ``path="sparse"`` forces the sparse route,
    which is how the two paths are cross-checked.
    """
    q = _check_q_range(q)
    sched = _validate_schedule(schedule)
    if path not in ("auto", "radial", "sparse"):
        raise DomainError(f"path must be auto, radial or sparse, got {path!r}")
    if path == "sparse":
        if isinstance(f, RadialFunction):
            f = from_radial(f)
        r = None
    else:
        r = _as_radial(f)
        if path == "radial" and r is None:
            raise ShapeError("radial path requested for a function that is not sphere-constant")
    entries, logs = [], []
    if r is not None:
        h = radial_convolve(radial_involution(r), r)
        power = radial_convolve(h, h)  # h^{*2}, i.e. n = 1
        n = 1
        while True:
            if n in sched:
                lu = radial_log_norm(power, q) / (4 * n)
                logs.append(lu)
                entries.append((n, math.exp(lu), power.log_scale))
            if n >= sched[-1]:
                break
            power = radial_convolve(power, power)
            n *= 2
        path = "radial"
    else:
        if sched[-1] > MAX_SPARSE_POWER:
            raise_resource(sched[-1])
        h = convolve(involution(f), f)
        power = convolve(h, h)
        n = 1
        while True:
            if n in sched:
                nrm = lq_norm(power, q)
                lu = math.log(nrm) / (4 * n) if nrm > 0 else -math.inf
                logs.append(lu)
                entries.append((n, _safe_exp(lu), 0.0))
            if n >= sched[-1]:
                break
            power = convolve(power, power)
            n *= 2
        path = "sparse"
    monotone = all(b >= a - REL_TOL for a, b in zip(logs, logs[1:]))
    return NormEstimateReport(entries, q, descriptor or _describe(f), monotone, path, logs)


def raise_resource(n: int):
    raise ResourceCapError(
        f"sparse power schedule up to n={n} exceeds n={MAX_SPARSE_POWER}; "
        "use a sphere-constant (radial) input for long schedules"
    )


def _describe(f) -> str:
    if isinstance(f, RadialFunction):
        return f"radial(d={f.ctx.d}, K={f.radius})"
    return f"sparse(d={f.ctx.d}, terms={len(f)})"


def _require_sphere(f: SparseFunction, k: int, name: str) -> None:
    for w in f:
        if len(w) != k:
            raise PreconditionError(
                f"{name} must be supported on W_{k}; found {format_word(w)} of length {len(w)}",
                word=w,
            )


def sphere_of(f: SparseFunction) -> int:
    """The unique k with supp(f) in W_k (0 for the zero function)."""
    lengths = f.lengths()
    if len(lengths) > 1:
        k = min(lengths)
        bad = next(w for w in f if len(w) != k)
        raise PreconditionError(f"support meets several spheres: {sorted(lengths)}", word=bad)
    return lengths.pop() if lengths else 0


def admissible_lengths(k: int, l: int) -> range:
    """Spheres that f*g can meet when f lives on W_k and g on W_l."""
    return range(abs(k - l), k + l + 1, 2)


def check_sphere_convolution_bound(
    f: SparseFunction, g: SparseFunction, q: float, m: int, *, k: int | None = None, l: int | None = None
) -> InequalityReport:
    """|(f*g) chi_m|_q <= |f|_q |g|_q, or exact zero for inadmissible m."""
    q = _check_q_range(q)
    k = sphere_of(f) if k is None else k
    l = sphere_of(g) if l is None else l
    _require_sphere(f, k, "f")
    _require_sphere(g, l, "g")
    if m < 0:
        raise DomainError(f"m must be >= 0, got {m}")
    restricted = sphere_restrict(convolve(f, g), m)
    lhs = lq_norm(restricted, q)
    if m not in admissible_lengths(k, l):
        # structural zero: not a tolerance check
        exact = len(restricted) == 0
        return InequalityReport(lhs, 0.0, -lhs, exact, exact_zero_case=True, label=f"m={m}")
    return InequalityReport.compare(lhs, lq_norm(f, q) * lq_norm(g, q), label=f"k={k},l={l},m={m}")


def split_pair(f: SparseFunction, g: SparseFunction, j: int, q: float, *, k=None, l=None):
    """Collapse the j cancelling letters of f (suffix) and g (prefix).

    f'(t) = (sum_{|v|=j} |f(tv)|^q)^{1/q} on W_{k-j} and
    g'(u) = (sum_{|v|=j} |g(v^-1 u)|^q)^{1/q} on W_{l-j}.
    """
    q = float(q)
    if not 1.0 < q <= 2.0:
        raise DomainError(f"split_pair needs q in (1, 2], got {q}")
    k = sphere_of(f) if k is None else k
    l = sphere_of(g) if l is None else l
    _require_sphere(f, k, "f")
    _require_sphere(g, l, "g")
    if not 1 <= j <= min(k, l):
        raise DomainError(f"j must lie in [1, min(k, l)] = [1, {min(k, l)}], got {j}")
    fsum: dict[Word, float] = {}
    for s, c in f.items():
        t = Word._trusted(s[: k - j])
        fsum[t] = fsum.get(t, 0.0) + abs(c) ** q
    gsum: dict[Word, float] = {}
    for s, c in g.items():
        u = Word._trusted(s[j:])
        gsum[u] = gsum.get(u, 0.0) + abs(c) ** q
    fp = SparseFunction(f.ctx, {t: v ** (1 / q) for t, v in fsum.items()})
    gp = SparseFunction(g.ctx, {u: v ** (1 / q) for u, v in gsum.items()})
    return fp, gp


def domination_defect(f, g, fp, gp, m: int) -> float:
    """max over |s| = m of |(f*g)(s)| - (f'*g')(s); <= 0 means dominated."""
    lhs = sphere_restrict(convolve(f, g), m)
    rhs = sphere_restrict(convolve(fp, gp), m)
    worst = -math.inf
    for s in set(lhs) | set(rhs):
        worst = max(worst, abs(lhs(s)) - rhs(s).real)
    return worst if worst > -math.inf else 0.0


def check_lemma_rep_bound(f, q: float, n: int, *, k: int | None = None) -> InequalityReport:
    """|(f* * f)^{*2n}|_q <= (k+1)^{4n-1} |f|_q^{4n}, compared in log space."""
    q = _check_q_range(q)
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    r = _as_radial(f)
    if isinstance(f, RadialFunction):
        nz = np.flatnonzero(f.coeffs)
        if nz.size > 1:
            raise PreconditionError(f"radial input meets spheres {nz.tolist()}; expected one sphere")
        if k is None:
            k = int(nz[0]) if nz.size else 0
    else:
        k = sphere_of(f) if k is None else k
        _require_sphere(f, k, "f")
    if r is not None:
        h = radial_convolve(radial_involution(r), r)
        log_lhs = radial_log_norm(radial_power(h, 2 * n), q)
        log_f = radial_log_norm(r, q)
    else:
        if 2 * n > 2 * MAX_SPARSE_POWER:
            raise_resource(n)
        h = convolve(involution(f), f)
        nrm = lq_norm(convolve_power(h, 2 * n), q)
        log_lhs = math.log(nrm) if nrm > 0 else -math.inf
        nf = lq_norm(f, q)
        log_f = math.log(nf) if nf > 0 else -math.inf
    log_rhs = (4 * n - 1) * math.log(k + 1) + 4 * n * log_f
    return InequalityReport.compare_logs(log_lhs, log_rhs, label=f"k={k},n={n},q={q:g}")


def coefficient_function(g: SparseFunction, h: SparseFunction) -> SparseFunction:
    """conj(g) * h * g^vee, the coefficient s -> <pi(s) pi(g) xi, pi(g) xi>
    when h is the diagonal coefficient of xi."""
    return convolve(convolve(conjugate(g), h), check_vee(g))


def regular_coefficient(g: SparseFunction) -> SparseFunction:
    """s -> <lambda(s) g, g> = sum_t g(s^-1 t) conj(g(t)), summed directly."""
    out: dict = {}
    supp = list(g.items())
    for t, gt in supp:
        for t2, gt2 in supp:
            # g(s^-1 t) = gt2 at s^-1 t = t2, i.e. s = t t2^-1
            s = Word._trusted(t * invert(t2))
            out[s] = out.get(s, 0j) + gt2 * gt.conjugate()
    return SparseFunction(g.ctx, out)


def coefficient_function_checked(g: SparseFunction, rtol: float = 1e-12) -> SparseFunction:
    """Both evaluations for h = delta_e; raises if they disagree."""
    via_conv = coefficient_function(g, delta(g.ctx))
    direct = regular_coefficient(g)
    if not via_conv.allclose(direct, rtol=rtol, atol=rtol):
        raise AssertionError("coefficient identity failed: convolution and inner-product forms differ")
    return via_conv


# ------------------------------------------------------------ batteries


def case_rng(seed: int, case: int) -> np.random.Generator:
    """Per-case generator so results do not depend on evaluation order."""
    return np.random.default_rng([int(seed), int(case)])


def random_disc(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform samples from the closed unit disc."""
    r = np.sqrt(rng.random(size))
    theta = 2 * np.pi * rng.random(size)
    return r * np.exp(1j * theta)


def random_on_sphere(ctx, k: int, rng, n_terms: int | None = None) -> SparseFunction:
    """Random complex function on W_k; the full sphere unless n_terms is given."""
    words = enumerate_sphere(ctx, k)
    if n_terms is not None and n_terms < len(words):
        idx = rng.choice(len(words), size=n_terms, replace=False)
        words = [words[i] for i in sorted(idx)]
    vals = random_disc(rng, len(words))
    return SparseFunction(ctx, dict(zip(words, vals)))


def check_sphere_convolution_all(f, g, q: float, k: int, l: int) -> list[InequalityReport]:
    """check_sphere_convolution_bound for every m in 0..k+l+1 from one product."""
    q = _check_q_range(q)
    _require_sphere(f, k, "f")
    _require_sphere(g, l, "g")
    prod = convolve(f, g)
    rhs = lq_norm(f, q) * lq_norm(g, q)
    out = []
    for m in range(k + l + 2):
        part = sphere_restrict(prod, m)
        lhs = lq_norm(part, q)
        if m in admissible_lengths(k, l):
            out.append(InequalityReport.compare(lhs, rhs, label=f"k={k},l={l},m={m}"))
        else:
            exact = len(part) == 0
            out.append(InequalityReport(lhs, 0.0, -lhs, exact, exact_zero_case=True, label=f"m={m}"))
    return out


@dataclass
class BatterySummary:
    name: str
    cases: int
    checks: int
    failures: int
    worst_ratio: float
    failed_labels: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def row(self) -> list:
        return [self.name, self.cases, self.checks, self.failures, repr(float(self.worst_ratio))]


def _ratio(rep: InequalityReport) -> float:
    if rep.log_lhs is not None and rep.log_rhs is not None:
        if rep.log_lhs == -math.inf:
            return 0.0
        return _safe_exp(rep.log_lhs - rep.log_rhs)
    if rep.rhs == 0:
        return 0.0 if rep.lhs == 0 else math.inf
    return rep.lhs / rep.rhs


def _perturb(rep: InequalityReport, rhs_factor: float) -> InequalityReport:
    if rhs_factor == 1.0 or rep.exact_zero_case:
        return rep
    if rep.log_rhs is not None:
        return InequalityReport.compare_logs(rep.log_lhs, rep.log_rhs + math.log(rhs_factor), label=rep.label)
    return InequalityReport.compare(rep.lhs, rep.rhs * rhs_factor, label=rep.label)


CONV_QS = (1.0, 1.2, 1.5, 2.0)


def lemma_conv_battery(seed: int, cases: int, *, rhs_factor: float = 1.0) -> BatterySummary:
    """Randomized |(f*g) chi_m|_q <= |f|_q |g|_q over d in {2,3}, k,l <= 3."""
    checks = failures = 0
    worst = 0.0
    bad = []
    for case in range(cases):
        rng = case_rng(seed, case)
        ctx = GroupContext(int(rng.choice([2, 3])))
        k, l = (int(x) for x in rng.integers(0, 4, size=2))
        q = float(rng.choice(CONV_QS))
        f = random_on_sphere(ctx, k, rng)
        g = random_on_sphere(ctx, l, rng)
        for rep in check_sphere_convolution_all(f, g, q, k, l):
            rep = _perturb(rep, rhs_factor)
            checks += 1
            if not rep.exact_zero_case:
                worst = max(worst, _ratio(rep))
            if not rep.passed:
                failures += 1
                bad.append(f"case {case}: d={ctx.d} {rep.label} q={q}")
    return BatterySummary("lemma_conv", cases, checks, failures, worst, bad)


def split_pair_battery(seed: int, cases: int, *, rtol: float = 1e-12) -> BatterySummary:
    """Norm preservation and pointwise domination of split_pair."""
    checks = failures = 0
    worst = 0.0
    bad = []
    for case in range(cases):
        rng = case_rng(seed, case)
        ctx = GroupContext(int(rng.choice([2, 3])))
        k, l = (int(x) for x in rng.integers(1, 4, size=2))
        j = int(rng.integers(1, min(k, l) + 1))
        q = float(rng.choice([1.2, 1.5, 2.0]))
        f = random_on_sphere(ctx, k, rng)
        g = random_on_sphere(ctx, l, rng)
        fp, gp = split_pair(f, g, j, q)
        nf, ng = lq_norm(f, q), lq_norm(g, q)
        errs = [abs(lq_norm(fp, q) - nf) / nf, abs(lq_norm(gp, q) - ng) / ng]
        defect = domination_defect(f, g, fp, gp, k + l - 2 * j)
        checks += 3
        worst = max(worst, *errs)
        ok = max(errs) <= rtol and defect <= rtol * max(1.0, nf * ng)
        if not ok:
            failures += 1
            bad.append(f"case {case}: d={ctx.d} k={k} l={l} j={j} q={q}")
    return BatterySummary("split_pair", cases, checks, failures, worst, bad)


def rep_bound_battery(seed: int, cases: int, *, rhs_factor: float = 1.0, radial_max_n: int = 64) -> BatterySummary:
    """(k+1)^{4n-1} |f|_q^{4n} bound: sparse f with n <= 2, radial f with n up to radial_max_n."""
    checks = failures = 0
    worst = 0.0
    bad = []
    radial_ns = doubling_schedule(radial_max_n)
    for case in range(cases):
        rng = case_rng(seed, case)
        ctx = GroupContext(int(rng.choice([2, 3])))
        k = int(rng.integers(0, 4))
        q = float(rng.choice(CONV_QS))
        if case % 2 == 0:
            n = int(rng.integers(1, 3))
            size = int(rng.integers(1, 4 if n == 2 else 6))
            f = random_on_sphere(ctx, k, rng, n_terms=size)
        else:
            n = int(rng.choice(radial_ns))
            coeffs = np.zeros(k + 1, dtype=complex)
            coeffs[k] = random_disc(rng, 1)[0]
            f = RadialFunction(ctx, coeffs)
        rep = _perturb(check_lemma_rep_bound(f, q, n, k=k), rhs_factor)
        checks += 1
        worst = max(worst, _ratio(rep))
        if not rep.passed:
            failures += 1
            bad.append(f"case {case}: d={ctx.d} {rep.label}")
    return BatterySummary("lemma_rep", cases, checks, failures, worst, bad)
