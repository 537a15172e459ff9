"""Candidate generation by truncation and coefficient deformation.

Each link row y = g(c*x) is replaced by its Maclaurin truncation, giving a
square polynomial system. A linear-product start system tailored to the
truncated link rows is solved slice by slice, and its solutions are carried
to the truncated system and then to the original system along straight-line
deformations

    H(z, t) = (1 - t) * Ftarget(z) + gamma * t * Fstart(z),    t: 1 -> 0,

with gamma a random unit-modulus constant derived from the recorded seed.
Path tracking runs in hardware doubles (Euler predictor, Newton corrector,
adaptive step length); endpoints are then polished with the multiprecision
Newton iteration and returned as candidates for certification, never as
certified output. Every random draw is derived from the seed and written to
a run ledger, so a run can be replayed exactly.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache
from math import factorial

import mpmath as mp

from .certify import certify_solution, same_root
from .errors import DimensionMismatch, ValidationError
from .expsystems import ExpKind, ExpSystem, as_exp_system
from .polynomials import Polynomial, PolynomialSystem, constant, variable
from .refine import newton_refine
from .scalars import EC_ONE, ExactComplex, PrecisionConfig, working_precision

# ---------------------------------------------------------------------------
# Maclaurin truncation of link rows


def _maclaurin_coeffs(kind: ExpKind, c: ExactComplex, degree: int):
    """Coefficients a_0..a_degree of the truncated series of kind(c*x).

    exp keeps every order; sin/sinh keep odd orders, cos/cosh even ones, and
    the circular pair alternates in sign while the hyperbolic pair does not.
    """
    parity = {ExpKind.SIN: 1, ExpKind.SINH: 1, ExpKind.COS: 0, ExpKind.COSH: 0}
    alternating = kind in (ExpKind.SIN, ExpKind.COS)
    out = []
    for j in range(degree + 1):
        if kind is not ExpKind.EXP and j % 2 != parity[kind]:
            out.append(ExactComplex())
            continue
        base = Fraction(1, factorial(j))
        if alternating and (j // 2) % 2 == 1:
            base = -base
        out.append(c**j * base)
    return out


def taylor_truncate(F: ExpSystem, degrees) -> PolynomialSystem:
    """Replace every link by its Maclaurin truncation to the given degree.

    degrees has one positive entry per link. The result is the square
    polynomial system with the original polynomial rows first, then one row
    y_dst - T(g)(c * x_src) per link, all in the same n + m variables.
    """
    F = as_exp_system(F)
    degrees = tuple(int(d) for d in degrees)
    if len(degrees) != F.m:
        raise DimensionMismatch(f"got {len(degrees)} degrees for {F.m} links")
    if any(d < 1 for d in degrees):
        raise ValidationError("truncation degrees must be positive")
    nv = F.N
    rows = list(F.P.polys)
    for link, d in zip(F.links, degrees):
        items = []
        exps = [0] * nv
        exps[link.dst - 1] = 1
        items.append((EC_ONE, tuple(exps)))
        for j, a in enumerate(_maclaurin_coeffs(link.kind, link.c, d)):
            if a.is_zero():
                continue
            exps = [0] * nv
            exps[link.src - 1] = j
            items.append((-a, tuple(exps)))
        rows.append(Polynomial.from_terms(nv, items))
    return PolynomialSystem(tuple(rows))


# ---------------------------------------------------------------------------
# Polynomial arithmetic (local helpers; exact throughout)


def _padd(p: Polynomial, q: Polynomial) -> Polynomial:
    return Polynomial.from_terms(p.nv, [(c, m) for c, m in p.terms] + [(c, m) for c, m in q.terms])


def _pscale(p: Polynomial, c) -> Polynomial:
    c = ExactComplex.of(c) if not isinstance(c, ExactComplex) else c
    return Polynomial.from_terms(p.nv, [(c * coeff, m) for coeff, m in p.terms])


def _pmul(p: Polynomial, q: Polynomial) -> Polynomial:
    acc = {}
    for c1, m1 in p.terms:
        for c2, m2 in q.terms:
            exps = tuple(a + b for a, b in zip(m1.exponents, m2.exponents))
            prev = acc.get(exps)
            prod = c1 * c2
            acc[exps] = prod if prev is None else prev + prod
    return Polynomial.from_terms(p.nv, [(c, e) for e, c in acc.items()])


def _ppow(p: Polynomial, k: int) -> Polynomial:
    out = constant(p.nv, 1)
    for _ in range(k):
        out = _pmul(out, p)
    return out


# ---------------------------------------------------------------------------
# Linear-product start system


@dataclass(frozen=True)
class LinearFactor:
    """One factor a*y + b*x + 1 of a product row; a is nonzero only for j = 1."""

    a: ExactComplex
    b: ExactComplex

    def __post_init__(self):
        for name in ("a", "b"):
            v = getattr(self, name)
            if not isinstance(v, ExactComplex):
                object.__setattr__(self, name, ExactComplex.of(v))
        if self.b.is_zero():
            raise ValidationError("factor coefficient b must be nonzero")


def _draw_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-12, 12), rng.randint(1, 12))


def _draw_nonzero(rng: random.Random) -> ExactComplex:
    while True:
        v = ExactComplex(_draw_rational(rng), _draw_rational(rng))
        if not v.is_zero():
            return v


def _link_x_degrees(Fp: PolynomialSystem, links) -> tuple:
    """Actual source-variable degree of each truncated link row (at least 1)."""
    n = Fp.n - len(links)
    out = []
    for i, link in enumerate(links):
        row = Fp.polys[n + i]
        d = max((m.exponents[link.src - 1] for _, m in row.terms), default=0)
        out.append(max(1, d))
    return tuple(out)


def _draw_factors(links, counts, seed: int):
    """One factor list per link, drawn reproducibly; the b values of a link
    are kept pairwise distinct so the slices they pin never coincide."""
    rng = random.Random(seed)
    out = []
    for link, r in zip(links, counts):
        used = set()
        facs = []
        for j in range(r):
            a = _draw_nonzero(rng) if j == 0 else ExactComplex()
            while True:
                b = _draw_nonzero(rng)
                if b not in used:
                    break
            used.add(b)
            facs.append(LinearFactor(a, b))
        out.append(tuple(facs))
    return tuple(out)


def _allowed_nus(links, counts):
    """Factor selections, pruned of pairs that pin the same source twice.

    When two links share a source variable and both selections are >= 2, the
    two selected factors b*x + 1 pin that variable to two different values,
    so the slice is empty for generic draws and is dropped up front.
    """
    out = []
    for nu in itertools.product(*[range(1, r + 1) for r in counts]):
        ok = True
        for i in range(len(links)):
            for j in range(i + 1, len(links)):
                if links[i].src == links[j].src and nu[i] > 1 and nu[j] > 1:
                    ok = False
        if ok:
            out.append(nu)
    return tuple(out)


def _factor_row(nv: int, link, fac: LinearFactor) -> Polynomial:
    items = [(fac.b, tuple(1 if v == link.src - 1 else 0 for v in range(nv)))]
    items.append((EC_ONE, (0,) * nv))
    if not fac.a.is_zero():
        items.append((fac.a, tuple(1 if v == link.dst - 1 else 0 for v in range(nv))))
    return Polynomial.from_terms(nv, items)


def linear_product_start(Fp: PolynomialSystem, links, degrees, seed: int):
    """Start data for the truncated system: slice systems and the product system.

    For link i with truncated row of source degree r_i, the product row is
    L_{i,1} * ... * L_{i,r_i} with L_{i,1} = a_i*y + b_{i,1}*x + 1 and
    L_{i,j} = b_{i,j}*x + 1 for j >= 2; its support covers the truncated
    row's. Returns (slices, product_system) where slices is a tuple of
    (selection, system) pairs, each system keeping the polynomial rows and
    replacing link row i by its selected factor, pruned as in _allowed_nus.
    All coefficients are drawn from the seed alone.
    """
    counts = _link_x_degrees(Fp, links)
    if len(degrees) != len(links):
        raise DimensionMismatch(f"got {len(degrees)} degrees for {len(links)} links")
    factors = _draw_factors(links, counts, seed)
    nv = Fp.nv
    n = Fp.n - len(links)
    head = Fp.polys[:n]
    slices = []
    for nu in _allowed_nus(links, counts):
        rows = list(head)
        for i, link in enumerate(links):
            rows.append(_factor_row(nv, link, factors[i][nu[i] - 1]))
        slices.append((nu, PolynomialSystem(tuple(rows))))
    prod_rows = list(head)
    for i, link in enumerate(links):
        acc = _factor_row(nv, link, factors[i][0])
        for fac in factors[i][1:]:
            acc = _pmul(acc, _factor_row(nv, link, fac))
        prod_rows.append(acc)
    return tuple(slices), PolynomialSystem(tuple(prod_rows))


# ---------------------------------------------------------------------------
# Native-precision compilation and tracking

_NFUNC = {
    ExpKind.EXP: cmath.exp,
    ExpKind.SIN: cmath.sin,
    ExpKind.COS: cmath.cos,
    ExpKind.SINH: cmath.sinh,
    ExpKind.COSH: cmath.cosh,
}
_NDERIV = {
    ExpKind.EXP: (cmath.exp, 1.0),
    ExpKind.SIN: (cmath.cos, 1.0),
    ExpKind.COS: (cmath.sin, -1.0),
    ExpKind.SINH: (cmath.cosh, 1.0),
    ExpKind.COSH: (cmath.sinh, 1.0),
}


def _sparse_terms(p: Polynomial):
    return tuple(
        (complex(c), tuple((i, e) for i, e in enumerate(m.exponents) if e))
        for c, m in p.terms
    )


def _eval_terms(terms, z) -> complex:
    total = 0j
    for c, pairs in terms:
        v = c
        for i, e in pairs:
            v *= z[i] ** e
        total += v
    return total


class _Compiled:
    """Double-precision evaluator for values and Jacobians of one system."""

    def __init__(self, system):
        F = as_exp_system(system)
        self.size = F.N
        self.rows = [_sparse_terms(p) for p in F.P.polys]
        self.drows = [
            [_sparse_terms(p.derivative(j)) for j in range(F.N)] for p in F.P.polys
        ]
        self.links = [
            (_NFUNC[l.kind], *_NDERIV[l.kind], complex(l.c), l.src - 1, l.dst - 1)
            for l in F.links
        ]

    def value(self, z):
        out = [_eval_terms(t, z) for t in self.rows]
        for fn, _dfn, _sign, c, s, d in self.links:
            out.append(z[d] - fn(c * z[s]))
        return out

    def jac(self, z):
        mat = [[_eval_terms(t, z) for t in drow] for drow in self.drows]
        for _fn, dfn, sign, c, s, d in self.links:
            row = [0j] * self.size
            row[s] = -c * sign * dfn(c * z[s])
            row[d] = 1.0 + 0j
            mat.append(row)
        return mat


@lru_cache(maxsize=None)
def _compiled(system) -> _Compiled:
    return _Compiled(system)


class _NativeSingular(Exception):
    pass


def _solve_native(A, b):
    """Dense complex solve with partial pivoting, in doubles."""
    n = len(A)
    M = [list(A[i]) + [b[i]] for i in range(n)]
    for col in range(n):
        piv, best = col, abs(M[col][col])
        for r in range(col + 1, n):
            a = abs(M[r][col])
            if a > best:
                piv, best = r, a
        if best < 1e-250:
            raise _NativeSingular
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
        inv = 1.0 / M[col][col]
        for r in range(col + 1, n):
            f = M[r][col] * inv
            if f:
                for k in range(col + 1, n + 1):
                    M[r][k] -= f * M[col][k]
    x = [0j] * n
    for i in range(n - 1, -1, -1):
        s = M[i][n]
        for k in range(i + 1, n):
            s -= M[i][k] * x[k]
        x[i] = s / M[i][i]
    return x


class PathStatus(enum.Enum):
    ENDPOINT = "endpoint"
    DIVERGED = "diverged"
    FAILED = "failed"


@dataclass(frozen=True)
class PathResult:
    status: PathStatus
    point: tuple | None
    steps: int
    reason: str = ""


@dataclass(frozen=True)
class HomotopyConfig:
    """Step control and reproducibility knobs for one deformation run."""

    seed: int = 0
    dt_init: float = 0.1
    dt_min: float = 1e-7
    max_corrections: int = 3
    contraction_threshold: float = 0.5
    endpoint_tol: float = 1e-6
    blowup: float = 1e10
    bits: int = 256

    def __post_init__(self):
        if not 0 < self.dt_min <= self.dt_init <= 1:
            raise ValidationError(
                f"need 0 < dt_min <= dt_init <= 1, got {self.dt_min}, {self.dt_init}"
            )
        if self.max_corrections < 1:
            raise ValidationError("max_corrections must be at least 1")
        if not 0 < self.contraction_threshold <= 1:
            raise ValidationError("contraction_threshold must lie in (0, 1]")
        if self.endpoint_tol <= 0:
            raise ValidationError("endpoint_tol must be positive")
        if self.blowup <= 1:
            raise ValidationError("blowup must exceed 1")
        if self.bits < 64:
            raise ValidationError(f"need at least 64 bits, got {self.bits}")


_CORRECT_TOL = 1e-10
_SHARPEN_TOL = 1e-13
_MAX_STEPS = 20000
_GROWTH_STREAK = 4
_GROWTH_FACTOR = 1.5
_STALL_T = 1e-2
_STALL_TOL = 1e-9
_STALL_ITERS = 8


def _gamma_for_seed(seed: int) -> complex:
    return cmath.exp(2j * math.pi * random.Random(seed).random())


def _norm(z) -> float:
    return math.sqrt(sum(abs(v) ** 2 for v in z))


class _Pencil:
    def __init__(self, cs: _Compiled, ct: _Compiled, gamma: complex):
        self.cs, self.ct, self.gamma = cs, ct, gamma

    def value(self, z, t):
        fs, ft = self.cs.value(z), self.ct.value(z)
        g = self.gamma * t
        return [(1.0 - t) * b + g * a for a, b in zip(fs, ft)]

    def jac(self, z, t):
        js, jt = self.cs.jac(z), self.ct.jac(z)
        g = self.gamma * t
        return [
            [(1.0 - t) * b + g * a for a, b in zip(ra, rb)] for ra, rb in zip(js, jt)
        ]

    def tderiv(self, z):
        fs, ft = self.cs.value(z), self.ct.value(z)
        return [self.gamma * a - b for a, b in zip(fs, ft)]


def _correct(pencil: _Pencil, z, t, cfg: HomotopyConfig):
    """Newton iterations at fixed t; None when convergence is not accepted."""
    prev = None
    for _ in range(cfg.max_corrections):
        step = _solve_native(pencil.jac(z, t), pencil.value(z, t))
        z = [a - b for a, b in zip(z, step)]
        ns = _norm(step)
        if ns <= _CORRECT_TOL * max(1.0, _norm(z)):
            return z
        if prev is not None and ns > cfg.contraction_threshold * prev:
            return None
        prev = ns
    return None


def _rescue_stall(ct: _Compiled, z, cfg: HomotopyConfig):
    """Try to finish a stalled path by Newton against the target alone.

    Accepts only a clean quadratic finish: the step norm must drop below a
    strict tolerance and the residual must verify. Paths stalled against a
    singular or diverging endpoint bounce off and stay failed.
    """
    z = list(z)
    for _ in range(_STALL_ITERS):
        try:
            step = _solve_native(ct.jac(z), ct.value(z))
            z = [a - b for a, b in zip(z, step)]
            nz = _norm(z)
            if not math.isfinite(nz) or nz > cfg.blowup:
                return None
            if _norm(step) <= _STALL_TOL * max(1.0, nz):
                if _norm(ct.value(z)) <= cfg.endpoint_tol * max(1.0, nz):
                    return z
                return None
        except (_NativeSingular, OverflowError):
            return None
    return None


def track_path(Fstart, Ftarget, z0, cfg: HomotopyConfig) -> PathResult:
    """Track one root of Fstart to t = 0 along the straight-line deformation.

    The same seed always yields the same gamma, hence the same path. The
    returned point is a double-precision approximation only; callers are
    expected to polish and certify it separately.
    """
    cs, ct = _compiled(Fstart), _compiled(Ftarget)
    if cs.size != ct.size:
        raise DimensionMismatch(
            f"start tracks {cs.size} variables, target {ct.size}"
        )
    z = [complex(v) for v in z0]
    if len(z) != cs.size:
        raise DimensionMismatch(f"start point has {len(z)} coordinates, expected {cs.size}")
    try:
        if _norm(cs.value(z)) > cfg.endpoint_tol * max(1.0, _norm(z)):
            return PathResult(PathStatus.FAILED, None, 0, "start residual too large")
    except OverflowError:
        return PathResult(PathStatus.FAILED, None, 0, "start evaluation overflow")
    pencil = _Pencil(cs, ct, _gamma_for_seed(cfg.seed))
    t, dt, streak, steps = 1.0, cfg.dt_init, 0, 0
    while t > 0.0:
        if steps >= _MAX_STEPS:
            return PathResult(PathStatus.FAILED, None, steps, "step limit reached")
        h = min(dt, t)
        tn = t - h
        steps += 1
        try:
            v = _solve_native(pencil.jac(z, t), pencil.tderiv(z))
            zc = _correct(pencil, [a + h * b for a, b in zip(z, v)], tn, cfg)
        except _NativeSingular:
            zc = None
        except OverflowError:
            return PathResult(PathStatus.DIVERGED, None, steps, "evaluation overflow")
        if zc is None:
            dt = h / 2
            streak = 0
            if dt < cfg.dt_min:
                if t < _STALL_T:
                    rescued = _rescue_stall(ct, z, cfg)
                    if rescued is not None:
                        return PathResult(
                            PathStatus.ENDPOINT,
                            tuple(rescued),
                            steps,
                            f"sharpened from a stall at t={t:.1e}",
                        )
                return PathResult(PathStatus.FAILED, None, steps, "step size underflow")
            continue
        z, t = zc, tn
        nz = _norm(z)
        if not math.isfinite(nz) or nz > cfg.blowup:
            return PathResult(PathStatus.DIVERGED, None, steps, "norm above blowup")
        streak += 1
        if streak >= _GROWTH_STREAK:
            dt = min(dt * _GROWTH_FACTOR, cfg.dt_init)
            streak = 0
    # Sharpen against the target alone; a singular endpoint is kept as is.
    for _ in range(5):
        try:
            step = _solve_native(ct.jac(z), ct.value(z))
        except (_NativeSingular, OverflowError):
            break
        z = [a - b for a, b in zip(z, step)]
        if _norm(step) <= _SHARPEN_TOL * max(1.0, _norm(z)):
            break
    return PathResult(PathStatus.ENDPOINT, tuple(z), steps)


# ---------------------------------------------------------------------------
# Slice solving


def _slice_maps(nu, factors, links):
    """Variable assignments implied by one factor selection (0-based keys).

    A selected first factor eliminates the link target through
    y = -(1 + b*x)/a; any later factor pins the source to x = -1/b.
    """
    pinned = {}
    affine = {}
    for i, link in enumerate(links):
        fac = factors[i][nu[i] - 1]
        if nu[i] == 1:
            inva = EC_ONE / fac.a
            affine[link.dst - 1] = (-inva, -(fac.b * inva), link.src - 1)
        else:
            pinned[link.src - 1] = -(EC_ONE / fac.b)
    return pinned, affine


def _compose(poly: Polynomial, subs, nfree: int) -> Polynomial:
    acc = Polynomial.from_terms(nfree, [])
    for coeff, mono in poly.terms:
        term = constant(nfree, coeff)
        for v, e in enumerate(mono.exponents):
            if e:
                term = _pmul(term, _ppow(subs[v], e))
        acc = _padd(acc, term)
    return acc


def _restrict(head, nu, factors, links, N):
    """Polynomial rows of one slice, rewritten over its free variables.

    Returns (system, free, pinned, affine) or None when a row restricts to a
    constant, which for generic draws means the slice carries no solutions.
    """
    pinned, affine = _slice_maps(nu, factors, links)
    free = [v for v in range(N) if v not in pinned and v not in affine]
    pos = {v: i for i, v in enumerate(free)}
    nfree = len(free)
    subs = {}
    for v in free:
        subs[v] = variable(nfree, pos[v])
    for v, c in pinned.items():
        subs[v] = constant(nfree, c)
    for v, (c0, c1, s) in affine.items():
        base = constant(nfree, pinned[s]) if s in pinned else variable(nfree, pos[s])
        subs[v] = _padd(constant(nfree, c0), _pscale(base, c1))
    rows = []
    for p in head:
        q = _compose(p, subs, nfree)
        if q.degree == 0:
            return None
        rows.append(q)
    return PolynomialSystem(tuple(rows)), free, pinned, affine


def _roots_of_unity_starts(degs):
    axes = [[cmath.exp(2j * math.pi * k / d) for k in range(d)] for d in degs]
    return [list(combo) for combo in itertools.product(*axes)]


def _total_degree_system(degs, nv) -> PolynomialSystem:
    rows = []
    for k, d in enumerate(degs):
        exps = [0] * nv
        exps[k] = d
        rows.append(
            Polynomial.from_terms(nv, [(EC_ONE, tuple(exps)), (ExactComplex.of(-1), (0,) * nv)])
        )
    return PolynomialSystem(tuple(rows))


def _lift_slice_point(sol, free, pinned, affine, N):
    full = [0j] * N
    for v, val in zip(free, sol):
        full[v] = val
    for v, c in pinned.items():
        full[v] = complex(c)
    for v, (c0, c1, s) in affine.items():
        full[v] = complex(c0) + complex(c1) * full[s]
    return tuple(full)


def _dedup_native(points, rel=1e-8):
    kept = []
    for p in points:
        dup = False
        for q in kept:
            if _norm([a - b for a, b in zip(p, q)]) <= rel * max(1.0, _norm(q)):
                dup = True
                break
        if not dup:
            kept.append(p)
    return kept


# ---------------------------------------------------------------------------
# Run ledger and the full pipeline


@dataclass
class StageRecord:
    name: str
    seed: int
    gamma: complex
    outcomes: list = field(default_factory=list)  # (label, status, steps)
    kept: int = 0
    notes: list = field(default_factory=list)

    @property
    def tracked(self) -> int:
        return len(self.outcomes)

    def count(self, status: PathStatus) -> int:
        return sum(1 for _, s, _ in self.outcomes if s is status)


@dataclass
class RunLedger:
    """Replayable record of one deformation run: every draw and every path."""

    seed: int
    config: HomotopyConfig
    degrees: tuple = ()
    factor_lines: list = field(default_factory=list)
    stages: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    candidate_count: int = 0

    def summary_lines(self):
        out = []
        for st in self.stages:
            out.append(
                f"stage {st.name}: tracked {st.tracked}, "
                f"endpoints {st.count(PathStatus.ENDPOINT)}, "
                f"diverged {st.count(PathStatus.DIVERGED)}, "
                f"failed {st.count(PathStatus.FAILED)}, kept {st.kept}"
            )
        out.append(f"candidates: {self.candidate_count}")
        return out

    def render(self) -> str:
        c = self.config
        lines = ["solve run ledger", "format: 1", f"seed: {self.seed}"]
        lines.append(
            f"config: dt_init={c.dt_init!r} dt_min={c.dt_min!r}"
            f" max_corrections={c.max_corrections}"
            f" contraction_threshold={c.contraction_threshold!r}"
            f" endpoint_tol={c.endpoint_tol!r} blowup={c.blowup!r} bits={c.bits}"
        )
        if self.degrees:
            lines.append("truncation degrees: " + " ".join(str(d) for d in self.degrees))
        if self.factor_lines:
            lines.append("factors:")
            lines.extend("  " + s for s in self.factor_lines)
        for note in self.notes:
            lines.append(f"note: {note}")
        for st in self.stages:
            g = st.gamma
            lines.append(
                f"stage {st.name}: seed={st.seed} gamma={g.real:+.17g}{g.imag:+.17g}i"
                f" tracked={st.tracked} kept={st.kept}"
            )
            for note in st.notes:
                lines.append(f"  note: {note}")
            for label, status, steps in st.outcomes:
                lines.append(f"  path {label}: {status.value} steps={steps}")
        lines.extend(self.summary_lines())
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SolveResult:
    candidates: tuple  # tuples of mpc coordinates at config.bits
    ledger: RunLedger


def _stage_seed(seed: int, k: int) -> int:
    return seed * 1000003 + k


def _track_stage(record: StageRecord, Fstart, Ftarget, starts, labels, cfg):
    """Track every start, log outcomes, and return deduplicated endpoints."""
    ends = []
    for z0, label in zip(starts, labels):
        res = track_path(Fstart, Ftarget, z0, cfg)
        record.outcomes.append((label, res.status, res.steps))
        if res.status is PathStatus.ENDPOINT:
            ends.append(res.point)
    kept = _dedup_native(ends)
    record.kept = len(kept)
    return kept


def _solve_slices(head, slices, factors, links, N, cfg, ledger) -> list:
    """Solve every slice by total-degree continuation and lift the solutions."""
    seed = _stage_seed(cfg.seed, 1)
    record = StageRecord("slice-continuation", seed, _gamma_for_seed(seed))
    ledger.stages.append(record)
    scfg = replace(cfg, seed=seed)
    sols = []
    for nu, _system in slices:
        restricted = _restrict(head, nu, factors, links, N)
        nulabel = "nu=(" + ",".join(str(k) for k in nu) + ")"
        if restricted is None:
            record.notes.append(f"{nulabel}: constant row after restriction, skipped")
            continue
        S, free, pinned, affine = restricted
        if S.n != len(free):
            record.notes.append(f"{nulabel}: not square after restriction, skipped")
            continue
        if len(free) == 0:
            sols.append(_lift_slice_point((), free, pinned, affine, N))
            record.outcomes.append((nulabel, PathStatus.ENDPOINT, 0))
            continue
        degs = S.degrees
        start = _total_degree_system(degs, len(free))
        for idx, z0 in enumerate(_roots_of_unity_starts(degs)):
            res = track_path(start, S, z0, scfg)
            record.outcomes.append((f"{nulabel}#{idx}", res.status, res.steps))
            if res.status is PathStatus.ENDPOINT:
                sols.append(_lift_slice_point(res.point, free, pinned, affine, N))
    kept = _dedup_native(sols)
    record.kept = len(kept)
    return kept


def _polish(F: ExpSystem, points, cfg: HomotopyConfig, ledger: RunLedger):
    """Refine endpoints at full precision and merge the ones provably equal.

    Each surviving endpoint gets a short multiprecision Newton run; a new
    point is folded into an earlier one when the earlier point certifies
    with margin and the membership test says both lie in the same basin,
    falling back to a relative distance cut when certification is out of
    reach. Candidates are reported in path order.
    """
    prec = PrecisionConfig("float", cfg.bits)
    reps = []  # (point, certificate or None)
    with working_precision(cfg.bits):
        lifted = [tuple(mp.mpc(v) for v in p) for p in points]
    for z in lifted:
        refined, table = newton_refine(F, z, 3, prec)
        if table.singular_at is not None:
            ledger.notes.append(
                f"candidate refinement hit a singular Jacobian at step {table.singular_at}"
            )
        cert = None
        try:
            cert = certify_solution(F, refined, prec)
        except Exception:  # noqa: BLE001 - any failure just disables merging
            cert = None
        dup = False
        for rz, rcert in reps:
            merged = False
            if rcert is not None and rcert.certified_approximate:
                try:
                    merged = same_root(F, rcert, rz, refined, prec)
                except Exception:  # noqa: BLE001 - non-robust alpha, singular, ...
                    merged = False
            if not merged:
                with working_precision(cfg.bits):
                    d = mp.sqrt(
                        sum((abs(a - b)) ** 2 for a, b in zip(rz, refined))
                    )
                    scale = max(mp.mpf(1), mp.sqrt(sum(abs(a) ** 2 for a in rz)))
                merged = d <= mp.mpf("1e-8") * scale
            if merged:
                dup = True
                break
        if not dup:
            reps.append((refined, cert))
    return tuple(z for z, _ in reps)


def solve_by_deformation(F, degrees, cfg: HomotopyConfig) -> SolveResult:
    """Generate candidate solutions of F by the full deformation pipeline.

    With links present: truncate, solve the linear-product slices, carry the
    solutions to the truncated system and on to F. Without links this is a
    plain total-degree continuation of the polynomial part. Endpoints are
    polished at cfg.bits and deduplicated; everything random is derived from
    cfg.seed and recorded in the returned ledger.
    """
    F = as_exp_system(F)
    degrees = tuple(int(d) for d in degrees)
    ledger = RunLedger(cfg.seed, cfg, degrees)
    if F.m == 0:
        if degrees:
            raise DimensionMismatch(f"got {len(degrees)} degrees for a link-free system")
        if F.P.n != F.P.nv:
            raise ValidationError("total-degree continuation needs a square system")
        if any(d < 1 for d in F.P.degrees):
            raise ValidationError("every polynomial must have positive degree")
        seed = _stage_seed(cfg.seed, 3)
        record = StageRecord("total-degree", seed, _gamma_for_seed(seed))
        ledger.stages.append(record)
        scfg = replace(cfg, seed=seed)
        degs = F.P.degrees
        start = _total_degree_system(degs, F.P.nv)
        starts = _roots_of_unity_starts(degs)
        ends = _track_stage(
            record, start, F.P, starts, [str(i) for i in range(len(starts))], scfg
        )
        candidates = _polish(F, ends, cfg, ledger)
        ledger.candidate_count = len(candidates)
        return SolveResult(candidates, ledger)

    Fp = taylor_truncate(F, degrees)
    counts = _link_x_degrees(Fp, F.links)
    factors = _draw_factors(F.links, counts, cfg.seed)
    for i, (link, facs) in enumerate(zip(F.links, factors)):
        parts = [f"a={facs[0].a}"] + [f"b{j + 1}={fac.b}" for j, fac in enumerate(facs)]
        ledger.factor_lines.append(
            f"link {i + 1} ({link.kind.value}, src {link.src}): " + ", ".join(parts)
        )
    slices, product_system = linear_product_start(Fp, F.links, degrees, cfg.seed)
    ledger.notes.append(
        f"slices: {len(slices)} factor selections after pruning "
        f"(source degrees {', '.join(str(c) for c in counts)})"
    )
    head = Fp.polys[: F.n]
    start_sols = _solve_slices(head, slices, factors, F.links, F.N, cfg, ledger)

    seed2 = _stage_seed(cfg.seed, 2)
    rec2 = StageRecord("product-to-truncated", seed2, _gamma_for_seed(seed2))
    ledger.stages.append(rec2)
    fp_sols = _track_stage(
        rec2,
        product_system,
        Fp,
        start_sols,
        [str(i) for i in range(len(start_sols))],
        replace(cfg, seed=seed2),
    )

    seed3 = _stage_seed(cfg.seed, 3)
    rec3 = StageRecord("truncated-to-target", seed3, _gamma_for_seed(seed3))
    ledger.stages.append(rec3)
    ends = _track_stage(
        rec3,
        Fp,
        F,
        fp_sols,
        [str(i) for i in range(len(fp_sols))],
        replace(cfg, seed=seed3),
    )

    candidates = _polish(F, ends, cfg, ledger)
    ledger.candidate_count = len(candidates)
    return SolveResult(candidates, ledger)
