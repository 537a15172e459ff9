"""Certification predicates built on the Newton step and the curvature bounds.

A point z is certified as an approximate solution when

    alpha = beta * gamma_bound < ALPHA_STAR,

where beta is the Newton step length at z and gamma_bound the curvature
bound from the polynomial or link-aware path. ALPHA_STAR is a rational
number chosen strictly below the true threshold (13 - 3*sqrt(17))/4, so a
conservative comparison can only under-certify. The stronger condition
alpha < 3/100 buys a robustness radius of 1/(20*gamma) used by the
same-root, distinctness and realness predicates.

All decisions compare squared quantities, and in floating mode the final
comparison converts the computed value exactly to a rational, so the
decision itself never rounds.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import mpmath as mp

from .errors import (
    DimensionMismatch,
    ExpcertError,
    NotCertified,
    NotRealMap,
    PreconditionFailed,
    SingularMatrix,
)
from .expsystems import (
    ExpSystem,
    as_exp_system,
    evaluate_exp,
    gamma_bound_exp,
    jacobian_exp,
)
from .linalg import CVector, norm_sq, solve_vector, vec_sub
from .polynomials import gamma_bound_poly_sq
from .scalars import (
    ExactComplex,
    MODE_RATIONAL,
    PrecisionConfig,
    fraction_to_mpf,
    lift,
    mpf_to_fraction,
    working_precision,
)

# Safe rational stand-in strictly below (13 - 3*sqrt(17))/4 = 0.15767078...
# (the 6-digit rounding 0.157671 of that threshold lies slightly ABOVE it and
# would not be conservative; tests verify the integer inequality).
ALPHA_STAR = Fraction(1576707, 10**7)
ALPHA_STAR_SQ = ALPHA_STAR * ALPHA_STAR
ROBUST_ALPHA = Fraction(3, 100)
ROBUST_ALPHA_SQ = ROBUST_ALPHA * ROBUST_ALPHA
ROBUST_RADIUS_FACTOR = Fraction(1, 20)
ROBUST_RADIUS_SQ = ROBUST_RADIUS_FACTOR * ROBUST_RADIUS_FACTOR  # 1/400
SEPARATION_FACTOR = 2


@dataclass(frozen=True)
class AlphaConstants:
    alpha_star_sq: Fraction = ALPHA_STAR_SQ
    robust_alpha: Fraction = ROBUST_ALPHA
    robust_radius_factor: Fraction = ROBUST_RADIUS_FACTOR
    separation_factor: int = SEPARATION_FACTOR


CONSTANTS = AlphaConstants()


class RealStatus(Enum):
    REAL = "real"
    NOT_REAL = "not_real"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class Certificate:
    """Per-point record of the certification quantities and verdict."""

    beta_sq: object
    gamma_bound_sq: object  # math.inf when the Jacobian is singular
    alpha_bound_sq: object  # 0 for exact zeros, math.inf when undefined
    jacobian_invertible: bool
    exact_zero: bool
    certified_approximate: bool
    mode: str
    bits: int


def _is_infinite(v) -> bool:
    try:
        return math.isinf(v)
    except TypeError:
        return False


def _lt_exact(value, threshold: Fraction) -> bool:
    """Exact comparison value < threshold for Fraction or finite mpf values."""
    if _is_infinite(value):
        return False
    if isinstance(value, (Fraction, int)):
        return value < threshold
    return mpf_to_fraction(value) < threshold


def decide_certified(beta_sq, gamma_bound_sq) -> bool:
    """Pure decision: beta^2 * gamma^2 < ALPHA_STAR^2 (monotone in gamma)."""
    if _is_infinite(gamma_bound_sq):
        return False
    return _lt_exact(beta_sq * gamma_bound_sq, ALPHA_STAR_SQ)


def _materialize(z: CVector, prec: PrecisionConfig) -> CVector:
    return tuple(lift(v, prec) if isinstance(v, ExactComplex) else v for v in z)


def _as_working_mpf(v, bits: int):
    if isinstance(v, Fraction):
        return fraction_to_mpf(v, bits)
    return v


def newton_step(F, z: CVector, prec: PrecisionConfig):
    """One Newton iteration; returns (new point, jacobian_invertible).

    On a singular Jacobian the point is returned unchanged with flag False.
    """
    F = as_exp_system(F)
    if len(z) != F.N:
        raise DimensionMismatch(f"point has {len(z)} coordinates, expected {F.N}")
    with working_precision(prec.bits):
        z = _materialize(z, prec)
        residual = evaluate_exp(F, z, prec)
        J = jacobian_exp(F, z, prec)
        try:
            step = solve_vector(J, residual, prec.bits)
        except SingularMatrix:
            return z, False
        return tuple(a - b for a, b in zip(z, step)), True


def beta_sq(F, z: CVector, prec: PrecisionConfig):
    """Squared Newton step length; zero by convention at a singular Jacobian."""
    F = as_exp_system(F)
    with working_precision(prec.bits):
        z = _materialize(z, prec)
        residual = evaluate_exp(F, z, prec)
        J = jacobian_exp(F, z, prec)
        try:
            step = solve_vector(J, residual, prec.bits)
        except SingularMatrix:
            return Fraction(0) if prec.is_exact else mp.mpf(0)
        return norm_sq(step)


def _gamma_bound_sq(F: ExpSystem, z: CVector, prec: PrecisionConfig):
    """Squared curvature bound, math.inf on a singular Jacobian."""
    try:
        if F.is_polynomial():
            return gamma_bound_poly_sq(F.P, z, prec.bits)
        g = gamma_bound_exp(F, z, prec)
        return g * g
    except SingularMatrix:
        return math.inf


def certify_solution(F, z: CVector, prec: PrecisionConfig) -> Certificate:
    """Full certification of one point against a square system."""
    F = as_exp_system(F)
    if len(z) != F.N:
        raise DimensionMismatch(f"point has {len(z)} coordinates, expected {F.N}")
    with working_precision(prec.bits):
        z = _materialize(z, prec)
        residual = evaluate_exp(F, z, prec)
        if prec.is_exact and all(v.is_zero() for v in residual):
            gamma_sq = _gamma_bound_sq(F, z, prec)
            return Certificate(
                beta_sq=Fraction(0),
                gamma_bound_sq=gamma_sq,
                alpha_bound_sq=Fraction(0),
                jacobian_invertible=not _is_infinite(gamma_sq),
                exact_zero=True,
                certified_approximate=True,
                mode=prec.mode,
                bits=prec.bits,
            )
        J = jacobian_exp(F, z, prec)
        try:
            step = solve_vector(J, residual, prec.bits)
        except SingularMatrix:
            zero = Fraction(0) if prec.is_exact else mp.mpf(0)
            return Certificate(
                beta_sq=zero,
                gamma_bound_sq=math.inf,
                alpha_bound_sq=math.inf,
                jacobian_invertible=False,
                exact_zero=False,
                certified_approximate=False,
                mode=prec.mode,
                bits=prec.bits,
            )
        bsq = norm_sq(step)
        gamma_sq = _gamma_bound_sq(F, z, prec)
        alpha_sq = math.inf if _is_infinite(gamma_sq) else bsq * gamma_sq
        return Certificate(
            beta_sq=bsq,
            gamma_bound_sq=gamma_sq,
            alpha_bound_sq=alpha_sq,
            jacobian_invertible=True,
            exact_zero=False,
            certified_approximate=decide_certified(bsq, gamma_sq),
            mode=prec.mode,
            bits=prec.bits,
        )


def certify_distinct(F, cert1: Certificate, z1: CVector, cert2: Certificate, z2: CVector) -> bool:
    """Certify that two certified points have different associated solutions.

    Rational mode uses the sufficient squared test ||z1 - z2||^2 >
    8 (beta1^2 + beta2^2), which implies the separation condition
    ||z1 - z2|| > 2 (beta1 + beta2) without taking square roots; floating
    mode evaluates the separation condition directly.
    """
    if not (cert1.certified_approximate and cert2.certified_approximate):
        raise NotCertified("certify_distinct needs two certified approximate solutions")
    if cert1.mode == MODE_RATIONAL and cert2.mode == MODE_RATIONAL:
        dsq = norm_sq(vec_sub(z1, z2))
        return dsq > 2 * SEPARATION_FACTOR**2 * (cert1.beta_sq + cert2.beta_sq)
    bits = max(cert1.bits, cert2.bits)
    with working_precision(bits):
        prec = PrecisionConfig(mode="float", bits=bits)
        a = _materialize(z1, prec)
        b = _materialize(z2, prec)
        dist = mp.sqrt(norm_sq(vec_sub(a, b)))
        b1 = mp.sqrt(_as_working_mpf(cert1.beta_sq, bits))
        b2 = mp.sqrt(_as_working_mpf(cert2.beta_sq, bits))
        return dist > SEPARATION_FACTOR * (b1 + b2)


def same_root(F, cert_x: Certificate, z_x: CVector, z_y: CVector, prec: PrecisionConfig) -> bool:
    """Certify that z_y is an approximate solution sharing z_x's solution.

    Requires the strong bound alpha < 3/100 at z_x; then any point within
    1/(20 gamma) of z_x converges to the same solution. Tested squared:
    ||x - y||^2 * gamma^2 < 1/400.
    """
    if not _lt_exact(cert_x.alpha_bound_sq, ROBUST_ALPHA_SQ):
        raise PreconditionFailed("same_root needs alpha < 3/100 at the anchor point")
    if tuple(z_x) == tuple(z_y):
        return True
    if _is_infinite(cert_x.gamma_bound_sq):
        return False
    with working_precision(prec.bits):
        a = _materialize(z_x, prec)
        b = _materialize(z_y, prec)
        dsq = norm_sq(vec_sub(a, b))
        return _lt_exact(dsq * cert_x.gamma_bound_sq, ROBUST_RADIUS_SQ)


def real_map_check(F) -> bool:
    """Syntactic test that all system data is real.

    Real coefficients and real link constants make the Newton operator
    commute with coordinate-wise conjugation, the hypothesis behind the
    realness predicates.
    """
    F = as_exp_system(F)
    for p in F.P.polys:
        for coeff, _ in p.terms:
            if coeff.im:
                return False
    for link in F.links:
        if link.c.im:
            return False
    return True


def _imag_part_sq(z: CVector, exact: bool):
    total = Fraction(0) if exact else mp.mpf(0)
    for v in z:
        if isinstance(v, ExactComplex):
            total = total + v.im * v.im
        else:
            im = v.imag if hasattr(v, "imag") else 0
            total = total + im * im
    return total


def certify_real(F, cert: Certificate, z: CVector, prec: PrecisionConfig,
                 assume_real_map: bool = False) -> RealStatus:
    """Decide whether the associated solution is real.

    NOT_REAL when the imaginary displacement exceeds twice the Newton step
    (the solution lies within 2 beta, so it cannot be the real projection);
    REAL when alpha < 3/100 and the real projection lies inside the
    robustness radius; UNDECIDED otherwise. A point with exactly zero
    imaginary parts is REAL outright: a real map keeps its iterates real.
    """
    F = as_exp_system(F)
    if not assume_real_map and not real_map_check(F):
        raise NotRealMap(
            "system has non-real coefficients or link constants; "
            "pass assume_real_map=True only if conjugation symmetry holds by construction"
        )
    if not cert.certified_approximate:
        raise NotCertified("certify_real needs a certified approximate solution")
    with working_precision(prec.bits):
        zm = _materialize(z, prec)
        imag_sq = _imag_part_sq(zm, prec.is_exact)
        if imag_sq == 0:
            return RealStatus.REAL
        # ||z - pi_R(z)||^2 = sum Im(z_i)^2
        if imag_sq > 4 * cert.beta_sq:
            return RealStatus.NOT_REAL
        if _lt_exact(cert.alpha_bound_sq, ROBUST_ALPHA_SQ) and not _is_infinite(cert.gamma_bound_sq):
            if _lt_exact(imag_sq * cert.gamma_bound_sq, ROBUST_RADIUS_SQ):
                return RealStatus.REAL
        return RealStatus.UNDECIDED


@dataclass(frozen=True)
class BatchOptions:
    distinct: bool = True
    real: bool = True
    threads: int | None = None
    assume_real_map: bool = False


@dataclass
class PointRecord:
    index: int
    point: CVector
    certificate: Certificate | None = None
    error: str | None = None
    distinct_set: int | None = None
    real: RealStatus | None = None


@dataclass
class BatchReport:
    """In-memory batch result; serialization lives with the file formats."""

    records: list = field(default_factory=list)
    mode: str = MODE_RATIONAL
    bits: int = 96
    real_map: bool | None = None

    @property
    def counts(self) -> dict:
        certified = sum(
            1 for r in self.records if r.certificate and r.certificate.certified_approximate
        )
        sets = {r.distinct_set for r in self.records if r.distinct_set is not None}
        reals = sum(1 for r in self.records if r.real is RealStatus.REAL)
        not_reals = sum(1 for r in self.records if r.real is RealStatus.NOT_REAL)
        undecided = sum(1 for r in self.records if r.real is RealStatus.UNDECIDED)
        return {
            "total": len(self.records),
            "certified": certified,
            "distinct": len(sets) if sets else 0,
            "real": reals,
            "not_real": not_reals,
            "undecided": undecided,
        }


def _thread_count(options: BatchOptions, njobs: int) -> int:
    if options.threads is not None:
        limit = options.threads
    else:
        env = os.environ.get("EXPCERT_THREADS")
        limit = int(env) if env else (os.cpu_count() or 1)
    return max(1, min(limit, njobs))


def certify_batch(F, points, prec: PrecisionConfig, options: BatchOptions = BatchOptions()) -> BatchReport:
    """Certify a list of points, then group and test the certified ones.

    Per-point failures are recorded, never fatal. Certified points are
    partitioned into distinct-solution sets: two points that cannot be
    certified distinct share a set id (the smallest member index). Reports
    are assembled in input order regardless of scheduling.
    """
    F = as_exp_system(F)
    report = BatchReport(mode=prec.mode, bits=prec.bits)
    records = [PointRecord(index=i, point=tuple(p)) for i, p in enumerate(points)]
    report.records = records
    if not records:
        report.real_map = real_map_check(F)
        return report

    def work(rec: PointRecord):
        try:
            rec.certificate = certify_solution(F, rec.point, prec)
        except ExpcertError as exc:
            rec.error = f"{type(exc).__name__}: {exc}"

    nthreads = _thread_count(options, len(records))
    if nthreads == 1:
        for rec in records:
            work(rec)
    else:
        with working_precision(prec.bits):
            with ThreadPoolExecutor(max_workers=nthreads) as pool:
                list(pool.map(work, records))

    certified = [r for r in records if r.certificate and r.certificate.certified_approximate]

    if options.distinct and certified:
        parent = {r.index: r.index for r in certified}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i, j):
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        for a in range(len(certified)):
            for b in range(a + 1, len(certified)):
                ra, rb = certified[a], certified[b]
                if not certify_distinct(F, ra.certificate, ra.point, rb.certificate, rb.point):
                    union(ra.index, rb.index)
        for r in certified:
            r.distinct_set = find(r.index)

    report.real_map = real_map_check(F) or options.assume_real_map
    if options.real and report.real_map:
        for r in certified:
            r.real = certify_real(
                F, r.certificate, r.point, prec, assume_real_map=options.assume_real_map
            )
    return report
