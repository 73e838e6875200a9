"""Invariant suite behind ``treeboundary verify-all``.

Each check is a module-level function registered with a stable name; the
runner executes them in registration order and reports (name, ok, detail)
triples.  Details are deterministic strings (exact rationals or 17-digit
floats, never timings), so two runs with the same configuration produce
identical reports.

``tol_scale`` multiplies every floating-point tolerance.  Scale 1 is the
standard gate; scale 0 demands exact float equality and is expected to fail
(it exercises the nonzero-exit path of the CLI).  Checks that compare exact
rationals ignore the scale.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import chern as chern_mod
from . import operators as ops
from .boundary import (
    BoundaryPoint,
    Cylinder,
    VisualStructure,
    cylinder_measure,
    depth_mass,
    preimage_cylinder,
    pushforward,
    pushforward_mass,
    weak_distance_to_delta,
)
from .deviation import (
    DeviationProfile,
    deviation_sq,
    deviation_sq_pairsum,
    sigma_envelope,
)
from .functions import QQ_I, LocallyConstantFunction, random_unit_function
from .summability import (
    dplus_surrogate_check,
    hausdorff_dimension,
    lp_report,
    summability_threshold,
)
from .words import DEFAULT_BUDGET, IDENTITY, FreeGroup, Word, gromov_product, mul


@dataclass(frozen=True)
class VerifyContext:
    group: FreeGroup
    vs: VisualStructure
    radius: int
    seed: int
    tol_scale: float
    budget: int = DEFAULT_BUDGET


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str


CheckFn = Callable[[VerifyContext], tuple[bool, str]]
_REGISTRY: list[tuple[str, CheckFn]] = []


def _check(name: str):
    def register(fn: CheckFn) -> CheckFn:
        _REGISTRY.append((name, fn))
        return fn

    return register


def check_names() -> list[str]:
    return [name for name, _ in _REGISTRY]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _indicators(group: FreeGroup) -> list[LocallyConstantFunction]:
    return [
        LocallyConstantFunction.indicator(group, Word((letter,)))
        for letter in range(group.alphabet_size)
    ]


@_check("growth-closed-form")
def _growth(ctx: VerifyContext) -> tuple[bool, str]:
    rmax = max(ctx.radius, 4)
    for n in (2, 3):
        group = FreeGroup(n)
        for r in range(rmax + 1):
            if len(group.ball(r, budget=ctx.budget)) != group.growth_count(r):
                return False, f"ball enumeration mismatch at n={n}, R={r}"
    return True, f"enumerated balls match the closed form for n=2,3 up to R={rmax}"


@_check("hyperbolicity")
def _hyperbolicity(ctx: VerifyContext) -> tuple[bool, str]:
    ball = ctx.group.ball(2, budget=ctx.budget)
    count = 0
    for x in ball:
        for y in ball:
            gp_xy = gromov_product(x, y)
            for z in ball:
                if gp_xy < min(gromov_product(x, z), gromov_product(y, z)):
                    return False, f"0-hyperbolicity fails at ({x}, {y}, {z})"
                count += 1
    return True, f"Gromov product 0-hyperbolic on {count} triples from B_2"


@_check("measure-partition")
def _measure(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    for depth in range(1, 4):
        total = sum(
            (cylinder_measure(Cylinder(w), group) for w in group.sphere(depth)),
            Fraction(0),
        )
        if total != 1:
            return False, f"depth-{depth} masses sum to {total}"
    for w in group.sphere(2):
        c = Cylinder(w)
        children_total = sum(
            (cylinder_measure(child, group) for child in c.children(group)),
            Fraction(0),
        )
        if children_total != cylinder_measure(c, group):
            return False, f"children of [{w}] do not partition it"
    for g in group.ball(2):
        pushforward(g, 2, group)  # constructor validates sum-to-1 exactly
    return True, "partitions of unity and pushforward tables exact at depths 1-3"


@_check("preimage-decomposition")
def _preimage(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    cases = 0
    for g in group.ball(2):
        for depth in (1, 2):
            for w in group.sphere(depth):
                pieces = preimage_cylinder(g, Cylinder(w), group)
                for i, p in enumerate(pieces):
                    for q in pieces[i + 1 :]:
                        if not p.disjoint(q):
                            return False, f"overlap in preimage of [{w}] under {g}"
                total = sum(
                    (cylinder_measure(p, group) for p in pieces), Fraction(0)
                )
                if total != pushforward_mass(g, Cylinder(w), group):
                    return False, f"mass mismatch for g={g}, w={w}"
                cases += 1
    return True, f"preimage covers disjoint with exact mass on {cases} cases"


@_check("deviation-identity")
def _deviation_identity(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    phis = _indicators(group)
    phis.append(phis[0] * QQ_I + phis[1])
    cases = 0
    for phi in phis:
        for g in group.ball(2):
            if deviation_sq(phi, g) != deviation_sq_pairsum(phi, g):
                return False, f"pair-sum identity fails at g={g}"
            cases += 1
    return True, f"sigma^2 equals the pair-sum form exactly on {cases} cases"


@_check("deviation-envelope")
def _envelope(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    rmax = max(ctx.radius, 4)
    worst = 0.0
    for phi in (_indicators(group)[0], _indicators(group)[0] * QQ_I + _indicators(group)[1]):
        profile = DeviationProfile.compute(phi, rmax, budget=ctx.budget)
        for m, s in enumerate(profile.sphere_max_sq()):
            bound = sigma_envelope(phi, m) ** 2
            if float(s) > bound:
                return False, f"envelope violated at sphere {m}"
            if bound > 0:
                worst = max(worst, float(s) / bound)
    return True, f"sphere maxima under the envelope up to R={rmax}; max ratio {_fmt(worst)}"


@_check("furstenberg-rate")
def _furstenberg(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    a = Word((0,))
    omega = BoundaryPoint(IDENTITY, a)
    n2 = 2 * group.n
    g = IDENTITY
    for m in range(1, 9):
        g = mul(g, a)
        expected = 2 * Fraction(1, n2) * Fraction(1, n2 - 1) ** (m - 1)
        got = weak_distance_to_delta(g, omega, 1, group)
        if got != expected:
            return False, f"distance at m={m} is {got}, expected {expected}"
    return True, "weak distance to the endpoint matches 2 (1/2n) (2n-1)^(1-m) for m<=8"


@_check("dimension-formula")
def _dimension(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    vs = VisualStructure(group, math.log(2 * group.n - 1))
    d = hausdorff_dimension(vs)
    tol = 1e-15 * ctx.tol_scale
    if abs(d - 1.0) > tol:
        return False, f"dimension at eps=ln(2n-1) is {_fmt(d)}"
    threshold = summability_threshold(ctx.vs)
    expected = max(2.0, hausdorff_dimension(ctx.vs))
    if threshold != expected:
        return False, f"threshold {_fmt(threshold)} != max(2, D)"
    return True, f"D(eps=ln(2n-1)) = {_fmt(d)}; threshold = {_fmt(threshold)}"


@_check("summability-witness")
def _summability(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    vs = ctx.vs
    phi = _indicators(group)[0]
    radius = max(ctx.radius, 5)
    profile = DeviationProfile.compute(phi, radius, budget=ctx.budget)
    above = lp_report(profile, 3.0, vs)
    below = lp_report(profile, 2.0, vs)
    limit = (2 * group.n - 1) ** -0.5 + 0.1
    tail = above.tail_ratios[2:]
    if any(r > limit for r in tail):
        return False, f"p=3 sphere ratio {max(tail):.17g} above {limit:.17g}"
    low = [s for s in below.sphere_sums if s < 0.1]
    if low:
        return False, "p=2 sphere sums dip below the divergence witness 0.1"
    surrogate = dplus_surrogate_check(group, vs, radius)
    if not surrogate.ok:
        return False, f"sorted-decay surrogate ratio {_fmt(surrogate.max_ratio)}"
    return True, (
        f"p=3 ratios <= {_fmt(limit)}, p=2 sphere sums >= 0.1, "
        f"sorted-decay ratio {_fmt(surrogate.max_ratio)}"
    )


@_check("operator-pi-identity")
def _pi_identity(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    R = min(ctx.radius, 2)
    trunc = ops.Truncation(ctx.vs, R, 1 + R)
    phi = _indicators(group)[0]
    P = ops.projection_P(trunc).matrix
    tol_p = 1e-12 * ctx.tol_scale
    if float(np.max(np.abs(P @ P - P))) > tol_p:
        return False, "P is not idempotent"
    if float(np.max(np.abs(P - P.conj().T))) > tol_p:
        return False, "P is not self-adjoint"
    rank = float(np.trace(P).real)
    if abs(rank - trunc.dim_group) > 1e-9 * ctx.tol_scale:
        return False, f"rank of P is {_fmt(rank)}, expected {trunc.dim_group}"
    report = ops.verify_pi_identity(phi, trunc)
    tol = 1e-10 * ctx.tol_scale
    if report.pi_error > tol:
        return False, f"Pi*Pi error {_fmt(report.pi_error)} above {_fmt(tol)}"
    if report.compression_error > tol:
        return False, f"compression error {_fmt(report.compression_error)}"
    return True, (
        f"R={R}, m={1 + R}: Pi*Pi error {_fmt(report.pi_error)}, "
        f"P lambda P error {_fmt(report.compression_error)}"
    )


@_check("commutator-spectrum")
def _commutator(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    trunc = ops.Truncation(ctx.vs, 1, 2)
    phi = _indicators(group)[0]
    values = [v for v in ops.commutator_singular_values(phi, trunc) if v > 1e-9]
    expected = []
    for h in trunc.group_basis:
        s = math.sqrt(float(deviation_sq(phi, h)))
        if s > 1e-9:
            expected.extend([s, s])
    expected.sort(reverse=True)
    if len(values) != len(expected):
        return False, f"got {len(values)} nonzero values, expected {len(expected)}"
    gap = max(abs(x - y) for x, y in zip(values, expected))
    tol = 1e-9 * ctx.tol_scale
    if gap > tol:
        return False, f"singular values off the deviation table by {_fmt(gap)}"
    return True, f"multiset matches the deviation table, max gap {_fmt(gap)}"


@_check("homotopy-inequality")
def _homotopy(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    trunc = ops.Truncation(ctx.vs, 1, 2)
    rng = random.Random(ctx.seed)
    one = LocallyConstantFunction.constant(group, 1)
    p_one = ops.homotopy_projection(one, trunc).matrix
    p_ref = ops.projection_P(trunc).matrix
    if float(np.max(np.abs(p_one - p_ref))) > 1e-12 * ctx.tol_scale:
        return False, "P(1) differs from the fiberwise mean projection"
    worst = 0.0
    for _ in range(10):
        eta1 = random_unit_function(group, rng.choice((1, 2)), rng)
        eta2 = random_unit_function(group, rng.choice((1, 2)), rng)
        try:
            norm_diff, bound = ops.homotopy_projection_check(eta1, eta2, trunc)
        except AssertionError:
            return False, "projection distance exceeds 2||eta1 - eta2||"
        if bound > 0:
            worst = max(worst, norm_diff / bound)
    return True, f"10 random unit pairs; max ||P(e1)-P(e2)|| / bound = {_fmt(worst)}"


@_check("compression-identity")
def _compression(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    trunc = ops.Truncation(ctx.vs, 2, 3)
    ind = _indicators(group)
    terms = [(ind[0], IDENTITY), (ind[1], Word((0,)))]
    err = ops.verify_compression_identity(terms, trunc)
    tol = 1e-12 * ctx.tol_scale
    if err > tol:
        return False, f"compressed matrix off by {_fmt(err)}"
    return True, f"P lambda(a) P matches translation-by-expectation, error {_fmt(err)}"


@_check("conditional-lower-bound")
def _conditional(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    trunc = ops.Truncation(ctx.vs, 2, 4)
    ind = _indicators(group)
    terms = [(ind[0], IDENTITY), (ind[1], Word((0,)))]
    if not ops.conditional_lower_bound_check(terms, trunc, tol=1e-9 * ctx.tol_scale):
        return False, "||Pi(a) delta_h|| fell below sigma(E(a))(h)"
    return True, "||Pi(a) delta_h|| >= sigma(E(a))(h) on B_{R//2}"


@_check("chern-consistency")
def _chern(ctx: VerifyContext) -> tuple[bool, str]:
    group = ctx.group
    ind = _indicators(group)
    e = IDENTITY
    a, b, A, B = Word((0,)), Word((2,)), Word((1,)), Word((3,))

    symmetric = chern_mod.CocycleInput(3, [(ind[0], e)] * 4)
    if chern_mod.cocycle_value(symmetric, 3, budget=ctx.budget).exact_partial:
        return False, "identical-argument cocycle is not exactly 0"
    vanishing = chern_mod.CocycleInput(3, [(ind[0], a), (ind[1], e), (ind[0], e), (ind[1], e)])
    cv = chern_mod.cocycle_value(vanishing, 3, budget=ctx.budget)
    if cv.exact_partial or cv.tail_bound != 0.0:
        return False, "nontrivial-product cocycle did not vanish exactly"

    trunc = ops.Truncation(ctx.vs, 2, 3)
    terms = [(ind[0], a), (ind[2], A), (ind[1], b), (ind[3], B)]
    nonzero = chern_mod.CocycleInput(3, terms)
    report = chern_mod.trace_oracle_report(nonzero, trunc)
    dense = chern_mod.trace_oracle_dense(nonzero, trunc)
    route_gap = abs(report.value - dense)
    if route_gap > 1e-12 * ctx.tol_scale:
        return False, f"trace routes disagree by {_fmt(route_gap)}"
    value = chern_mod.cocycle_value(nonzero, 2, budget=ctx.budget)
    gap = abs(report.value - value.value)
    allowance = value.tail_bound + report.window_correction
    if gap > allowance:
        return False, f"|trace - partial| = {_fmt(gap)} above {_fmt(allowance)}"
    return True, (
        f"exact vanishing holds; routes within {_fmt(route_gap)}; "
        f"|trace - partial| = {_fmt(gap)} <= {_fmt(allowance)}"
    )


def _run_index(args: tuple[int, VerifyContext]) -> CheckResult:
    index, ctx = args
    name, fn = _REGISTRY[index]
    try:
        ok, detail = fn(ctx)
    except Exception as exc:  # a crashed check is a failed check
        ok, detail = False, f"raised {type(exc).__name__}: {exc}"
    return CheckResult(name=name, ok=ok, detail=detail)


def run_all(ctx: VerifyContext, workers: int = 1) -> list[CheckResult]:
    """Run every registered check, in registration order, optionally on a
    process pool; results are collected in submission order either way."""
    jobs = [(i, ctx) for i in range(len(_REGISTRY))]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_index(job) for job in jobs]
    from concurrent.futures import ProcessPoolExecutor

    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_index, jobs))
