"""Finite truncations of the regular representation on l2(G, L2(dX, mu)).

The Hilbert space is truncated in both factors: the group factor keeps the
ball B_R (canonical length-then-lex order), the function factor keeps the
span of normalized indicators 1_c / sqrt(mu(c)) of depth-m cylinders (lex
order).  Basis index of the pair (h, c) is ``h_index * dim_fiber + c_index``,
matching ``numpy.kron(group_factor, fiber_factor)``.

Truncation convention: group translation maps a basis vector whose image
leaves B_R to zero (zero-padding), and multiplication operators are
compressed to the depth-m span, which replaces a deeper-than-m function by
its conditional averages on depth-m cylinders.  Identity checks are
therefore only claimed on the exactness window ``function depth + R <= m``,
where both effects vanish; operators built outside the window carry
``window_exact=False`` instead of raising.

Matrices are dense complex binary64 and immutable after build; entries come
from exact rational data converted at the end.  Matrix assembly is
embarrassingly parallel by column but the dimensions admitted by the budget
(<= 6000) do not justify a pool; everything here is single-threaded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import IO, Iterator, Sequence

import numpy as np

from .boundary import Cylinder, VisualStructure, cylinder_measure, depth_mass
from .deviation import deviation_sq, expectation
from .functions import QQ_ZERO, LocallyConstantFunction, translate
from .svd import operator_norm, singular_values
from .words import BudgetError, FreeGroup, Word, inverse_letter, mul

OPERATOR_BUDGET = 6000

CrossedTerms = Sequence[tuple[LocallyConstantFunction, Word]]


@dataclass(frozen=True)
class Truncation:
    """Basis data for the truncation B_R x {depth-m cylinders}."""

    vs: VisualStructure
    R: int
    m: int

    def __post_init__(self):
        if self.R < 0:
            raise ValueError("radius must be nonnegative")
        if self.m < 1:
            raise ValueError("function level must be >= 1")

    @property
    def group(self) -> FreeGroup:
        return self.vs.group

    @cached_property
    def group_basis(self) -> tuple[Word, ...]:
        return tuple(self.group.iter_ball(self.R))

    @cached_property
    def cylinders(self) -> tuple[Word, ...]:
        return tuple(self.group.iter_sphere(self.m))

    @cached_property
    def group_index(self) -> dict[Word, int]:
        return {h: i for i, h in enumerate(self.group_basis)}

    @cached_property
    def cylinder_index(self) -> dict[Word, int]:
        return {c: i for i, c in enumerate(self.cylinders)}

    @property
    def dim_group(self) -> int:
        return self.group.growth_count(self.R)

    @property
    def dim_fiber(self) -> int:
        return self.group.sphere_count(self.m)

    @property
    def dim(self) -> int:
        return self.dim_group * self.dim_fiber

    def check_dense_budget(self, budget: int = OPERATOR_BUDGET) -> None:
        """Guard dense materialization; block-wise algorithms skip this."""
        if self.dim > budget:
            raise BudgetError(self.dim, budget)

    def window_exact(self, depth: int) -> bool:
        return depth + self.R <= self.m


@dataclass
class TruncatedOperator:
    matrix: np.ndarray
    label: str
    trunc: Truncation
    window_exact: bool = True

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def write_csv(self, fp: IO[str]) -> None:
        writer = csv.writer(fp)
        for row in self.matrix:
            writer.writerow(
                [f"{z.real:.17g}{z.imag:+.17g}j" for z in row]
            )

    def save_npy(self, path) -> None:
        np.save(path, self.matrix)


@dataclass
class TruncationBasis:
    pairs: list[tuple[Word, Word]]
    gram: np.ndarray


def _extensions(group: FreeGroup, prefix: Word, depth: int) -> Iterator[Word]:
    """Reduced words of the given length extending ``prefix``, lex order."""
    if len(prefix) == depth:
        yield prefix
        return
    last = prefix.letters[-1] if prefix.letters else None
    for letter in range(group.alphabet_size):
        if last is not None and letter == inverse_letter(last):
            continue
        yield from _extensions(group, Word(prefix.letters + (letter,)), depth)


def build(trunc: Truncation, budget: int = OPERATOR_BUDGET) -> TruncationBasis:
    """Materialize the basis and its Gram matrix (identity by disjointness)."""
    trunc.check_dense_budget(budget)
    group = trunc.group
    pairs = [(h, c) for h in trunc.group_basis for c in trunc.cylinders]
    level_mass = depth_mass(trunc.m, group)
    fiber = np.zeros((trunc.dim_fiber, trunc.dim_fiber))
    for i, c in enumerate(trunc.cylinders):
        for j, d in enumerate(trunc.cylinders):
            # same-depth cylinders are equal or disjoint
            overlap = cylinder_measure(Cylinder(c), group) if c == d else Fraction(0)
            fiber[i, j] = float(overlap / level_mass)
    gram = np.kron(np.eye(trunc.dim_group), fiber)
    return TruncationBasis(pairs=pairs, gram=gram)


def fiber_unit(trunc: Truncation) -> np.ndarray:
    """Coordinates of the constant function 1 (a unit vector) in the fiber basis."""
    group = trunc.group
    return np.array(
        [math.sqrt(float(cylinder_measure(Cylinder(c), group))) for c in trunc.cylinders]
    )


def fiber_diagonal(
    phi: LocallyConstantFunction, h: Word, trunc: Truncation
) -> np.ndarray:
    """Diagonal of multiplication by h^{-1}.phi compressed to the depth-m span.

    Multiplication by a function preserves every cylinder, so the compression
    is always diagonal; the entry at c is the conditional average of
    h^{-1}.phi over c, which equals its single value on c exactly when
    depth(phi) + |h| <= m.
    """
    group = trunc.group
    shifted = translate(h.inverse(), phi)
    if shifted.depth <= trunc.m:
        refined = shifted.refine(trunc.m)
        return np.array(
            [refined.values[c].to_complex() for c in trunc.cylinders]
        )
    weight = Fraction(1, (group.alphabet_size - 1) ** (shifted.depth - trunc.m))
    out = np.zeros(trunc.dim_fiber, dtype=complex)
    for i, c in enumerate(trunc.cylinders):
        total = sum(
            (shifted.values[u] for u in _extensions(group, c, shifted.depth)),
            start=QQ_ZERO,
        )
        out[i] = (total * weight).to_complex()
    return out


def projection_P(trunc: Truncation, budget: int = OPERATOR_BUDGET) -> TruncatedOperator:
    """Orthogonal projection onto the constants in every fiber (rank |B_R|)."""
    trunc.check_dense_budget(budget)
    v = fiber_unit(trunc)
    block = np.outer(v, v).astype(complex)
    matrix = np.kron(np.eye(trunc.dim_group), block)
    return TruncatedOperator(matrix, "P", trunc)


def rep_function(
    phi: LocallyConstantFunction, trunc: Truncation, budget: int = OPERATOR_BUDGET
) -> TruncatedOperator:
    """lambda_mu(phi): block-diagonal, block at h = multiplication by h^{-1}.phi."""
    if phi.group != trunc.group:
        raise ValueError("function and truncation use different groups")
    trunc.check_dense_budget(budget)
    dim_f = trunc.dim_fiber
    matrix = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    for i, h in enumerate(trunc.group_basis):
        diag = fiber_diagonal(phi, h, trunc)
        matrix[i * dim_f : (i + 1) * dim_f, i * dim_f : (i + 1) * dim_f] = np.diag(diag)
    return TruncatedOperator(
        matrix, "lambda(phi)", trunc, window_exact=trunc.window_exact(phi.depth)
    )


def rep_group(g: Word, trunc: Truncation, budget: int = OPERATOR_BUDGET) -> TruncatedOperator:
    """lambda(g): delta_h -> delta_{gh}, zero when gh leaves B_R."""
    trunc.group.check_letters(g.letters)
    trunc.check_dense_budget(budget)
    dim_f = trunc.dim_fiber
    matrix = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    eye = np.eye(dim_f, dtype=complex)
    for j, h in enumerate(trunc.group_basis):
        target = mul(g, h)
        i = trunc.group_index.get(target)
        if i is None:
            continue
        matrix[i * dim_f : (i + 1) * dim_f, j * dim_f : (j + 1) * dim_f] = eye
    return TruncatedOperator(matrix, f"lambda({g})", trunc)


def rep_crossed(
    terms: CrossedTerms, trunc: Truncation, budget: int = OPERATOR_BUDGET
) -> TruncatedOperator:
    """Representation of sum_g phi_g . g as sum lambda(phi_g) lambda(g)."""
    trunc.check_dense_budget(budget)
    matrix = np.zeros((trunc.dim, trunc.dim), dtype=complex)
    exact = True
    for phi, g in terms:
        lf = rep_function(phi, trunc, budget)
        lg = rep_group(g, trunc, budget)
        matrix += lf.matrix @ lg.matrix
        exact = exact and lf.window_exact
    return TruncatedOperator(matrix, "lambda(a)", trunc, window_exact=exact)


def _group_embedding(trunc: Truncation) -> np.ndarray:
    """Isometry l2(B_R) -> truncation sending delta_h to delta_h x constant 1."""
    return np.kron(np.eye(trunc.dim_group), fiber_unit(trunc).reshape(-1, 1)).astype(
        complex
    )


@dataclass
class PiIdentityReport:
    pi_error: float
    compression_error: float


def verify_pi_identity(
    phi: LocallyConstantFunction, trunc: Truncation, budget: int = OPERATOR_BUDGET
) -> PiIdentityReport:
    """Check Pi(phi)*Pi(phi) = diag(sigma^2) and P lambda(phi) P = diag(E).

    Pi(phi) = (1 - P) lambda(phi*) P.  Its absolute value is multiplication
    by the deviation function of phi on the group factor, so Pi*Pi must match
    kron(diag(sigma^2(phi)(h)), outer(v, v)) with v the constant unit vector;
    the compression of P lambda(phi) P to l2(B_R) must be diag(E(phi)(h)).
    Both comparisons use exact rational deviation data on the right side.
    """
    if not trunc.window_exact(phi.depth):
        raise ValueError("exactness window requires depth(phi) + R <= m")
    trunc.check_dense_budget(budget)
    P = projection_P(trunc, budget).matrix
    L_star = rep_function(phi.conjugate(), trunc, budget).matrix
    eye = np.eye(trunc.dim, dtype=complex)
    Pi = (eye - P) @ L_star @ P

    v = fiber_unit(trunc)
    sigma_sq = np.array(
        [float(deviation_sq(phi, h)) for h in trunc.group_basis]
    )
    target = np.kron(np.diag(sigma_sq), np.outer(v, v)).astype(complex)
    pi_error = float(np.max(np.abs(Pi.conj().T @ Pi - target)))

    V = _group_embedding(trunc)
    compressed = V.conj().T @ rep_function(phi, trunc, budget).matrix @ V
    means = np.diag(
        np.array([expectation(phi, h).to_complex() for h in trunc.group_basis])
    )
    compression_error = float(np.max(np.abs(compressed - means)))
    return PiIdentityReport(pi_error=pi_error, compression_error=compression_error)


def commutator_singular_values(
    phi: LocallyConstantFunction, trunc: Truncation
) -> np.ndarray:
    """Singular values of [P, lambda(phi)], descending.

    The commutator is block-diagonal over h with rank-<=2 blocks
    [outer(v, v), diag(d_h)], so the values are computed per block without
    materializing the full matrix.  For real-valued phi on the exactness
    window the nonzero values are {sigma(phi)(h)} each twice.
    """
    if not trunc.window_exact(phi.depth):
        raise ValueError("exactness window requires depth(phi) + R <= m")
    v = fiber_unit(trunc)
    out: list[np.ndarray] = []
    for h in trunc.group_basis:
        d = fiber_diagonal(phi, h, trunc)
        block = np.outer(v, d * v) - np.outer(d * v, v)
        out.append(singular_values(block))
    values = np.concatenate(out)
    values[::-1].sort()
    return values


def homotopy_projection(
    eta: LocallyConstantFunction, trunc: Truncation, budget: int = OPERATOR_BUDGET
) -> TruncatedOperator:
    """P(eta) = M(conj(eta)) P M(eta) for an exactly L2-normalized eta."""
    block = _homotopy_block(eta, trunc)
    trunc.check_dense_budget(budget)
    matrix = np.kron(np.eye(trunc.dim_group), block)
    return TruncatedOperator(matrix, "P(eta)", trunc)


def _homotopy_block(eta: LocallyConstantFunction, trunc: Truncation) -> np.ndarray:
    if eta.group != trunc.group:
        raise ValueError("function and truncation use different groups")
    if eta.l2_norm_sq() != 1:
        raise ValueError("eta must satisfy ||eta||_{L2(mu)} = 1 exactly")
    if eta.depth > trunc.m:
        raise ValueError("eta deeper than the fiber level m")
    v = fiber_unit(trunc)
    refined = eta.refine(trunc.m)
    values = np.array([refined.values[c].to_complex() for c in trunc.cylinders])
    w = np.conj(values) * v
    return np.outer(w, np.conj(w))


def homotopy_projection_check(
    eta1: LocallyConstantFunction,
    eta2: LocallyConstantFunction,
    trunc: Truncation,
) -> tuple[float, float]:
    """Return (||P(eta1) - P(eta2)||, 2 ||eta1 - eta2||_{L2}) and assert <=.

    P(eta) is block-diagonal with the same rank-one block in every fiber, so
    the operator norm of the difference is the norm of a single block.
    """
    diff_block = _homotopy_block(eta1, trunc) - _homotopy_block(eta2, trunc)
    norm_diff = operator_norm(diff_block)
    bound = 2.0 * math.sqrt(float((eta1 - eta2).l2_norm_sq()))
    assert norm_diff <= bound + 1e-12, (norm_diff, bound)
    return norm_diff, bound


def conditional_lower_bound_check(
    terms: CrossedTerms,
    trunc: Truncation,
    tol: float = 1e-9,
    budget: int = OPERATOR_BUDGET,
) -> bool:
    """Check ||Pi(a) delta_h||_2 >= sigma(E(a))(h) for h in B_{R//2}.

    a = sum phi_g . g must be supported in B_{R//2} so that every vector in
    play stays inside the truncation; E(a) is the coefficient at the
    identity.  delta_h stands for delta_h tensor constant-1.
    """
    half = trunc.R // 2
    group = trunc.group
    for phi, g in terms:
        if len(g) > half:
            raise ValueError("support must lie in the half ball B_{R//2}")
        if phi.depth + half > trunc.m:
            raise ValueError("exactness window requires depth(phi) + R//2 <= m")
    trunc.check_dense_budget(budget)
    A = rep_crossed(terms, trunc, budget).matrix
    P = projection_P(trunc, budget).matrix
    eye = np.eye(trunc.dim, dtype=complex)
    Pi = (eye - P) @ A.conj().T @ P

    identity_part = LocallyConstantFunction.constant(group, 0)
    for phi, g in terms:
        if g.is_identity:
            identity_part = identity_part + phi

    v = fiber_unit(trunc)
    dim_f = trunc.dim_fiber
    ok = True
    for h in group.iter_ball(half):
        column = np.zeros(trunc.dim, dtype=complex)
        i = trunc.group_index[h]
        column[i * dim_f : (i + 1) * dim_f] = v
        lhs = float(np.linalg.norm(Pi @ column))
        rhs = math.sqrt(float(deviation_sq(identity_part, h)))
        ok = ok and lhs >= rhs - tol
    return ok


def verify_compression_identity(
    terms: CrossedTerms, trunc: Truncation, budget: int = OPERATOR_BUDGET
) -> float:
    """Max-abs error of P lambda(a) P against multiplication-by-E composed
    with translation on l2(B_R): entry (gh, h) must equal E(phi_g)(gh).

    Out-of-ball targets gh are dropped on both sides (zero-padding), so the
    comparison is entrywise on the full |B_R| x |B_R| compressed matrix.
    """
    for phi, _ in terms:
        if not trunc.window_exact(phi.depth):
            raise ValueError("exactness window requires depth(phi) + R <= m")
    trunc.check_dense_budget(budget)
    A = rep_crossed(terms, trunc, budget).matrix
    V = _group_embedding(trunc)
    compressed = V.conj().T @ A @ V
    expected = np.zeros((trunc.dim_group, trunc.dim_group), dtype=complex)
    for phi, g in terms:
        for j, h in enumerate(trunc.group_basis):
            target = mul(g, h)
            i = trunc.group_index.get(target)
            if i is None:
                continue
            expected[i, j] += expectation(phi, target).to_complex()
    return float(np.max(np.abs(compressed - expected)))
