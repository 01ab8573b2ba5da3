"""Exact verification of the algebraic identities behind the convergence proofs.

The monotonicity of the tangent residual along extragradient steps reduces to
one polynomial identity in 15 free scalars: after rotating the three active
hyperplane normals into the canonical frame ``(1,0,0)``, ``(alpha,1,0)``,
``(beta1,beta2,1)`` and eliminating six dependent coordinates, a weighted sum
of nine constraint products (the "lhs terms" below) must equal a sum of five
squares with positive rational-function multipliers (the "rhs terms").  The
indicator on the sign of the first component of the final operator value
splits the identity into two branches.

Everything in this module is exact: coefficients are ``Fraction`` and an
identity "holds" only when the difference is the zero polynomial.  Numeric
code enters only in :func:`reduction_frame`, which builds the canonical frame
for one observed extragradient step and checks the frame properties in
floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactpoly import Rational, SparsePoly, generators

# Free variables of the constrained identity.  zk*/zh1 are the surviving
# iterate coordinates, f<i><l> is eta*F at iterate i (k, half, next) component
# l, and al/b1/b2 parameterize the rotated normals.
CONSTRAINED_VARS = (
    "zk1", "zk2", "zh1",
    "fk1", "fk2", "fk3",
    "fh1", "fh2", "fh3",
    "fn1", "fn2", "fn3",
    "al", "b1", "b2",
)

VECTOR_VARS = CONSTRAINED_VARS[:12]

LHS_TERM_NAMES = tuple(f"cons-{i}" for i in range(1, 10))
RHS_TERM_NAMES = tuple(f"sos-{i}" for i in range(1, 6))
ALL_TERM_NAMES = LHS_TERM_NAMES + RHS_TERM_NAMES

BRANCHES = ("nonneg", "neg")


class IdentityError(ValueError):
    """An identity check failed; carries the first offending monomial."""

    def __init__(self, message: str, monomial: str | None = None):
        super().__init__(message)
        self.monomial = monomial


class DegenerateFrameError(ValueError):
    """The three observed normals are (numerically) linearly dependent."""


class FrameCheckError(ValueError):
    """A reduction-frame property failed; names the violated inequality."""

    def __init__(self, name: str, value: float):
        super().__init__(f"frame property {name} violated (value {value:.3e})")
        self.name = name
        self.value = value


def _gens():
    return generators(CONSTRAINED_VARS)


_G = _gens()
_ONE = SparsePoly.constant(CONSTRAINED_VARS, 1)
_ZERO = SparsePoly(CONSTRAINED_VARS)
_DEN_AL = _ONE + _G["al"] ** 2                      # 1 + alpha^2
_DEN_BB = _ONE + _G["b1"] ** 2 + _G["b2"] ** 2      # 1 + beta1^2 + beta2^2
_DEN_ALL = _DEN_AL * _DEN_BB


def _cleared(numerator: SparsePoly, denominator: str) -> SparsePoly:
    """Multiply a term by DEN_ALL / its own denominator."""
    if denominator == "1":
        return numerator * _DEN_ALL
    if denominator == "al":
        return numerator * _DEN_BB
    if denominator == "bb":
        return numerator * _DEN_AL
    raise ValueError(f"unknown denominator tag {denominator!r}")


def _lhs_terms(branch: str) -> dict[str, SparsePoly]:
    """The nine summands of the identity's left side, denominators cleared.

    ``cons-1`` is the tangent-residual difference itself (with the
    normal-component correction and the branch indicator), ``cons-2``/``cons-3``
    come from monotonicity and Lipschitzness, ``cons-4``..``cons-9`` are the
    six hyperplane constraint products with their multipliers.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    g = _G
    zk1, zk2, zh1 = g["zk1"], g["zk2"], g["zh1"]
    fk1, fk2, fk3 = g["fk1"], g["fk2"], g["fk3"]
    fh1, fh2, fh3 = g["fh1"], g["fh2"], g["fh3"]
    fn1, fn2, fn3 = g["fn1"], g["fn2"], g["fn3"]
    al, b1, b2 = g["al"], g["b1"], g["b2"]
    ind_pos = _ONE if branch == "nonneg" else _ZERO
    ind_neg = _ONE if branch == "neg" else _ZERO

    # halfplane factor shared by cons-4/5: <(1,-alpha), z_half - z_k + eta F_k>
    # with z_half[2] already eliminated.
    bracket = zh1 - zk1 + fk1 + al * (al * zh1 + zk2 - fk2)

    terms = {
        "cons-1": (
            _cleared(fk1**2 + fk2**2 + fk3**2 - fn1**2 - fn2**2 - fn3**2, "1")
            + _cleared(-((b1 * fk1 + b2 * fk2 + fk3) ** 2), "bb")
            + _cleared(fn1**2 * ind_pos, "1")
        ),
        "cons-2": _cleared(
            2 * (zk1 * (fn1 - fk1) + fh2 * (fn2 - fk2) + fh3 * (fn3 - fk3)), "1"
        ),
        "cons-3": _cleared(
            (fn1 - fh1) ** 2 + (fn2 - fh2) ** 2 + (fn3 - fh3) ** 2
            - zh1**2
            - (zk2 - fh2 + al * zh1) ** 2
            - (fk3 - fh3) ** 2,
            "1",
        ),
        "cons-4": _cleared(2 * zh1 * bracket, "1"),
        "cons-5": _cleared(2 * al * (zk2 - fh2) * bracket, "al"),
        "cons-6": _cleared(
            2 * (al * (zk1 - fk1) + (zk2 - fk2)) * (zk2 - fh2), "al"
        ),
        "cons-7": _cleared(
            -2
            * (b1 * fk1 + b2 * fk2 + fk3)
            * ((b1 - al * b2) * zh1 - b1 * zk1 - b2 * zk2 - fk3),
            "bb",
        ),
        "cons-8": _cleared(2 * zk1 * (zk1 - fh1), "1"),
        "cons-9": _cleared(-2 * (fn1 * ind_neg) * (zk1 - fh1), "1"),
    }
    return terms


def _rhs_terms(branch: str) -> dict[str, SparsePoly]:
    """The five squares of the identity's right side, denominators cleared."""
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    g = _G
    zk1, zk2, zh1 = g["zk1"], g["zk2"], g["zh1"]
    fk1, fk2, fk3 = g["fk1"], g["fk2"], g["fk3"]
    fh1 = g["fh1"]
    fn1 = g["fn1"]
    al, b1, b2 = g["al"], g["b1"], g["b2"]
    ind_pos = _ONE if branch == "nonneg" else _ZERO

    u = zk1 - fk1 - zh1
    v = zk2 - fk2 + al * zh1
    return {
        "sos-1": _cleared((zk1 - fh1 + fn1 * ind_pos) ** 2, "1"),
        "sos-2": _cleared(u**2, "bb"),
        "sos-3": _cleared(
            (fk3 + b1 * zk1 + b2 * zk2 + (al * b2 - b1) * zh1) ** 2, "bb"
        ),
        "sos-4": _cleared(v**2, "bb"),
        "sos-5": _cleared((b1 * v - b2 * u) ** 2, "bb"),
    }


def build_constrained_lhs(branch: str, mutate: str | None = None) -> SparsePoly:
    """Sum of the nine left-side terms (optionally dropping one by name)."""
    terms = _lhs_terms(branch)
    if mutate is not None and mutate in terms:
        del terms[mutate]
    total = _ZERO
    for t in terms.values():
        total = total + t
    return total


def build_constrained_rhs(branch: str, mutate: str | None = None) -> SparsePoly:
    """Sum of the five right-side squares (optionally dropping one by name)."""
    terms = _rhs_terms(branch)
    if mutate is not None and mutate in terms:
        del terms[mutate]
    total = _ZERO
    for t in terms.values():
        total = total + t
    return total


def _monomial_name(exp: Sequence[int], vars: Sequence[str] = CONSTRAINED_VARS) -> str:
    factors = [f"{v}^{p}" if p > 1 else v for v, p in zip(vars, exp) if p]
    return "*".join(factors) if factors else "1"


def constrained_identity_difference(
    branch: str, mutate: str | None = None
) -> SparsePoly:
    lhs = build_constrained_lhs(branch, None if mutate in RHS_TERM_NAMES else mutate)
    rhs = build_constrained_rhs(branch, mutate if mutate in RHS_TERM_NAMES else None)
    return lhs - rhs


def check_constrained_identity(branch: str, mutate: str | None = None) -> bool:
    """True iff the cleared left and right sides agree as exact polynomials."""
    return constrained_identity_difference(branch, mutate).is_zero()


def first_differing_monomial(branch: str, mutate: str | None = None) -> str | None:
    diff = constrained_identity_difference(branch, mutate)
    if diff.is_zero():
        return None
    exp = min(diff.terms, key=lambda e: (sum(e), e))
    return _monomial_name(exp)


# ---------------------------------------------------------------------------
# Derivation cross-check: rebuild the left side from the pre-elimination
# constraint products and the six coordinate substitutions.
# ---------------------------------------------------------------------------

_PRE_VARS = CONSTRAINED_VARS + ("zk3", "zh2", "zh3", "zn1", "zn2", "zn3")


def substitution_map() -> dict[str, SparsePoly]:
    """The six dependent-coordinate eliminations, as polynomials.

    ``z_k[3]`` and ``z_half[2]`` come from lying on their own hyperplanes,
    ``z_next[1] = 0`` likewise, and the remaining three coordinates follow the
    unconstrained update along directions orthogonal to the active normals.
    """
    g = generators(_PRE_VARS)
    zk3 = -(g["b1"] * g["zk1"]) - g["b2"] * g["zk2"]
    return {
        "zk3": zk3,
        "zh2": -(g["al"] * g["zh1"]),
        "zh3": zk3 - g["fk3"],
        "zn1": SparsePoly(_PRE_VARS),
        "zn2": g["zk2"] - g["fh2"],
        "zn3": zk3 - g["fh3"],
    }


def build_lhs_from_derivation(branch: str) -> SparsePoly:
    """Left side built the long way: raw constraint products, then elimination.

    Serves as an independent route to :func:`build_constrained_lhs`; the two
    must agree exactly.
    """
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}")
    g = generators(_PRE_VARS)
    one = SparsePoly.constant(_PRE_VARS, 1)
    zero = SparsePoly(_PRE_VARS)
    zk = [g["zk1"], g["zk2"], g["zk3"]]
    zh = [g["zh1"], g["zh2"], g["zh3"]]
    zn = [g["zn1"], g["zn2"], g["zn3"]]
    fk = [g["fk1"], g["fk2"], g["fk3"]]
    fh = [g["fh1"], g["fh2"], g["fh3"]]
    fn = [g["fn1"], g["fn2"], g["fn3"]]
    al, b1, b2 = g["al"], g["b1"], g["b2"]
    den_al = one + al**2
    den_bb = one + b1**2 + b2**2
    ind_pos = one if branch == "nonneg" else zero
    ind_neg = one if branch == "neg" else zero

    # residual difference + monotonicity + Lipschitz, restricted to the first
    # three coordinates (the rest cancels identically).
    core = zero
    for i in range(3):
        core = core + fk[i] ** 2 - fn[i] ** 2
        core = core + 2 * (fn[i] - fk[i]) * (zk[i] - zn[i])
        core = core + (fn[i] - fh[i]) ** 2 - (zn[i] - zh[i]) ** 2
    normal_sq = (b1 * fk[0] + b2 * fk[1] + fk[2]) ** 2
    indicator_sq = fn[0] ** 2 * ind_pos

    halfplane = zh[0] - zk[0] + fk[0] - al * (zh[1] - zk[1] + fk[1])
    cons1 = zh[0] * halfplane
    cons2 = zn[1] * halfplane
    cons3 = (al * (zk[0] - fk[0]) + (zk[1] - fk[1])) * (al * zn[0] + zn[1])
    cons4 = -(b1 * fk[0] + b2 * fk[1] + fk[2]) * (b1 * zh[0] + b2 * zh[1] + zh[2])
    cons5 = zk[0] * (zk[0] - fh[0])
    cons6 = -(fn[0] * ind_neg) * (zk[0] - fh[0])

    # multiply through by (1+al^2)(1+b1^2+b2^2)
    total = (core + indicator_sq) * den_al * den_bb
    total = total - normal_sq * den_al
    total = total + 2 * (cons1 + cons5 + cons6) * den_al * den_bb
    total = total + 2 * al * cons2 * den_bb
    total = total + 2 * cons3 * den_bb
    total = total + 2 * cons4 * den_al

    eliminated = total.substitute(substitution_map())

    # re-embed into the 15-variable ring
    out = SparsePoly(CONSTRAINED_VARS)
    keep = [_PRE_VARS.index(v) for v in CONSTRAINED_VARS]
    drop = [i for i in range(len(_PRE_VARS)) if _PRE_VARS[i] not in CONSTRAINED_VARS]
    terms = {}
    for exp, c in eliminated.terms.items():
        if any(exp[i] for i in drop):
            raise AssertionError("elimination left a dependent variable")
        terms[tuple(exp[i] for i in keep)] = c
    out.terms = terms
    return out


# ---------------------------------------------------------------------------
# The per-monomial expansion table.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    monomial: str
    lhs: str
    rhs: str
    equal: bool


def _as_fraction_string(coeff_poly: SparsePoly) -> str:
    """Render a coefficient polynomial over the cleared denominator.

    Cancels the factors ``(1+al^2)`` and ``(1+b1^2+b2^2)`` where the division
    is exact, so constant sums print as plain numbers.
    """
    num = coeff_poly
    denoms = []
    for factor, label in ((_DEN_AL, "(1+al^2)"), (_DEN_BB, "(1+b1^2+b2^2)")):
        try:
            num = num.divide_exact(factor)
        except ValueError:
            denoms.append(label)
    if not denoms:
        return repr(num)
    return f"({num!r}) / ({'*'.join(denoms)})"


def constrained_expansion_table(branch: str = "nonneg") -> list[TableRow]:
    """Per-monomial sums of both sides of the constrained identity.

    Each row reports, for one monomial in the twelve iterate/operator
    variables, the total coefficient of the left and of the right side as a
    rational function of ``al``, ``b1``, ``b2``.  The identity holds iff every
    row agrees.
    """
    lhs = build_constrained_lhs(branch).coefficient_map(VECTOR_VARS)
    rhs = build_constrained_rhs(branch).coefficient_map(VECTOR_VARS)
    rows = []
    idx = [CONSTRAINED_VARS.index(v) for v in VECTOR_VARS]
    for key in sorted(set(lhs) | set(rhs), key=lambda e: (sum(e), e)):
        exp = [0] * len(CONSTRAINED_VARS)
        for i, p in zip(idx, key):
            exp[i] = p
        lpoly = lhs.get(key, SparsePoly(CONSTRAINED_VARS))
        rpoly = rhs.get(key, SparsePoly(CONSTRAINED_VARS))
        rows.append(
            TableRow(
                monomial=_monomial_name(exp),
                lhs=_as_fraction_string(lpoly),
                rhs=_as_fraction_string(rpoly),
                equal=(lpoly - rpoly).is_zero(),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# Unconstrained identity and the representative-coordinate block.
# ---------------------------------------------------------------------------


def unconstrained_identity_terms(
    f_k: Sequence[Rational], f_half: Sequence[Rational], f_next: Sequence[Rational]
) -> list[Rational]:
    """The five summands whose total vanishes for any three vectors.

    norm-difference, twice the monotonicity product, and the Lipschitz
    difference, all expressed in the operator values alone.
    """
    if not (len(f_k) == len(f_half) == len(f_next)):
        raise ValueError("operator value vectors must share a dimension")
    fk = [Fraction(x) for x in f_k]
    fh = [Fraction(x) for x in f_half]
    fn = [Fraction(x) for x in f_next]
    dot = lambda a, b: sum(x * y for x, y in zip(a, b))
    sq = lambda a: dot(a, a)
    return [
        sq(fk),
        -sq(fn),
        2 * dot([x - y for x, y in zip(fn, fk)], fh),
        sq([x - y for x, y in zip(fh, fn)]),
        -sq([x - y for x, y in zip(fh, fk)]),
    ]


def check_unconstrained_identity(
    f_k: Sequence[Rational], f_half: Sequence[Rational], f_next: Sequence[Rational]
) -> bool:
    """Exact zero test of the unconstrained norm-monotonicity identity."""
    return sum(unconstrained_identity_terms(f_k, f_half, f_next)) == 0


_P2_VARS = ("x0", "x1", "x2", "y0", "y1", "y2")


def p2_block_polynomial(substitute: bool = True) -> SparsePoly:
    """The representative-coordinate block of the constrained proof.

    One scalar coordinate stands in for every coordinate beyond the third;
    with the update relations ``x1 = x0 - y0`` and ``x2 = x0 - y1`` the block
    collapses to zero.
    """
    g = generators(_P2_VARS)
    x0, x1, x2 = g["x0"], g["x1"], g["x2"]
    y0, y1, y2 = g["y0"], g["y1"], g["y2"]
    block = (
        y0**2
        - y2**2
        + 2 * (y2 - y0) * (x0 - x2)
        + (y2 - y1) ** 2
        - (x2 - x1) ** 2
    )
    if substitute:
        block = block.substitute({"x1": x0 - y0, "x2": x0 - y1})
    return block


def check_p2_block_identity() -> bool:
    return p2_block_polynomial(substitute=True).is_zero()


# ---------------------------------------------------------------------------
# Coefficient-table expansion identities and the regrouped right side.
# ---------------------------------------------------------------------------


def check_expansion_identities(
    alpha: Rational, beta1: Rational, beta2: Rational
) -> bool:
    """The three rational-function equalities behind the expansion table.

    Verified exactly at the given rational point (denominators are positive
    for every rational argument, so no zero-division can occur).
    """
    a = Fraction(alpha)
    b1 = Fraction(beta1)
    b2 = Fraction(beta2)
    d2 = 1 + b2**2
    dbb = 1 + b1**2 + b2**2
    lhs1 = -2 * a / d2 - 2 * b1 * b2 * (b2**2 + a * b1 * b2 + 1) / (d2 * dbb)
    rhs1 = -2 * a * (b1**2 + 1) / dbb - 2 * b1 * b2 / dbb
    lhs2 = (
        2 * a / d2
        - 2 * b2 * (b1 - a * b2) / dbb
        + 2 * b1 * b2 * (b2**2 + a * b1 * b2 + 1) / (d2 * dbb)
    )
    lhs3 = (
        a**2 / d2
        + (b1 - a * b2) ** 2 / dbb
        + (b2**2 + a * b1 * b2 + 1) ** 2 / (d2 * dbb)
    )
    return lhs1 == rhs1 and lhs2 == 2 * a and lhs3 == a**2 + 1


def check_newsos_claim() -> bool:
    """Regrouping of two right-side squares into three same-denominator ones.

    With ``a`` and ``b`` abbreviating the two linear forms, the claim is
    ``a^2/(1+b2^2) + ((1+b2^2) b + b1 b2 a)^2 / ((1+b2^2)(1+b1^2+b2^2))
    = (a^2 + b^2 + (b1 a + b2 b)^2) / (1+b1^2+b2^2)``, cleared of
    denominators and checked as a polynomial identity in ``a, b, b1, b2``.
    """
    vars = ("a", "b", "b1", "b2")
    g = generators(vars)
    one = SparsePoly.constant(vars, 1)
    a, b, b1, b2 = g["a"], g["b"], g["b1"], g["b2"]
    d2 = one + b2**2
    dbb = one + b1**2 + b2**2
    lhs = a**2 * dbb + (d2 * b + b1 * b2 * a) ** 2
    rhs = d2 * (a**2 + b**2 + (b1 * a + b2 * b) ** 2)
    return (lhs - rhs).is_zero()


# ---------------------------------------------------------------------------
# Certificate assignments: exact points satisfying the eliminations.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertificateAssignment:
    """One exact rational point for the constrained identity.

    Free data: the surviving iterate coordinates, the nine operator values
    (already scaled by the step size), the frame parameters, the
    representative coordinates, and the indicator branch.  Dependent
    coordinates are derived, never stored.
    """

    zk1: Rational
    zk2: Rational
    zh1: Rational
    fk: tuple[Rational, Rational, Rational]
    fh: tuple[Rational, Rational, Rational]
    fn: tuple[Rational, Rational, Rational]
    alpha: Rational
    beta1: Rational
    beta2: Rational
    x0: Rational = Fraction(0)
    y: tuple[Rational, Rational, Rational] = (Fraction(0), Fraction(0), Fraction(0))
    branch: str = "nonneg"

    def __post_init__(self):
        if self.branch not in BRANCHES:
            raise ValueError(f"branch must be one of {BRANCHES}")
        if self.branch == "nonneg" and self.fn[0] < 0:
            raise ValueError("nonneg branch requires fn[0] >= 0")
        if self.branch == "neg" and self.fn[0] > 0:
            raise ValueError("neg branch requires fn[0] <= 0")

    # dependent coordinates, from the hyperplane and update relations
    @property
    def zk3(self) -> Rational:
        return -self.beta1 * self.zk1 - self.beta2 * self.zk2

    @property
    def zh2(self) -> Rational:
        return -self.alpha * self.zh1

    @property
    def zh3(self) -> Rational:
        return self.zk3 - self.fk[2]

    @property
    def zn(self) -> tuple[Rational, Rational, Rational]:
        return (Fraction(0), self.zk2 - self.fh[1], self.zk3 - self.fh[2])

    @property
    def x1(self) -> Rational:
        return self.x0 - self.y[0]

    @property
    def x2(self) -> Rational:
        return self.x0 - self.y[1]

    def values(self) -> dict[str, Rational]:
        return {
            "zk1": self.zk1,
            "zk2": self.zk2,
            "zh1": self.zh1,
            "fk1": self.fk[0],
            "fk2": self.fk[1],
            "fk3": self.fk[2],
            "fh1": self.fh[0],
            "fh2": self.fh[1],
            "fh3": self.fh[2],
            "fn1": self.fn[0],
            "fn2": self.fn[1],
            "fn3": self.fn[2],
            "al": self.alpha,
            "b1": self.beta1,
            "b2": self.beta2,
        }

    def evaluate_lhs(self) -> Rational:
        return build_constrained_lhs(self.branch).evaluate(self.values())

    def evaluate_rhs(self) -> Rational:
        return build_constrained_rhs(self.branch).evaluate(self.values())

    @staticmethod
    def random(rng: np.random.Generator, branch: str = "nonneg") -> "CertificateAssignment":
        """Random small-integer-ratio assignment honoring the branch sign."""

        def q() -> Fraction:
            return Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 12)))

        fn1 = abs(q()) if branch == "nonneg" else -abs(q())
        return CertificateAssignment(
            zk1=q(), zk2=q(), zh1=q(),
            fk=(q(), q(), q()),
            fh=(q(), q(), q()),
            fn=(fn1, q(), q()),
            alpha=q(), beta1=q(), beta2=q(),
            x0=q(), y=(q(), q(), q()),
            branch=branch,
        )


# ---------------------------------------------------------------------------
# Numeric reduction frame for one observed extragradient step.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ReductionFrame:
    """Orthonormal change of basis putting the three normals in canonical form."""

    rotation: np.ndarray
    a_k: np.ndarray
    a_half: np.ndarray
    a_next: np.ndarray
    alpha: float
    beta1: float
    beta2: float


def _gram_schmidt_rows(ordered: list[np.ndarray], n: int) -> np.ndarray:
    basis: list[np.ndarray] = []
    for v in ordered + [e for e in np.eye(n)]:
        w = v.astype(float).copy()
        for b in basis:
            w -= (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > 1e-12:
            basis.append(w / nw)
        if len(basis) == n:
            break
    return np.array(basis)


def reduction_frame(
    z_k: np.ndarray,
    z_half: np.ndarray,
    z_next: np.ndarray,
    F_k: np.ndarray,
    F_half: np.ndarray,
    eta: float,
    a_k: np.ndarray,
    F_next: np.ndarray | None = None,
    lipschitz: float | None = None,
    cond_threshold: float = 1e8,
    tol: float = 1e-8,
) -> ReductionFrame:
    """Canonical frame for one extragradient step on a cone through the origin.

    The midpoint and endpoint normals are read off the projections
    (``z_half - z_k + eta F_k`` and ``z_next - z_k + eta F_half``); together
    with the supplied ``a_k`` they are rotated so that the endpoint normal
    becomes ``(1,0,...)``, the midpoint normal ``(alpha,1,0,...)`` and ``a_k``
    ``(beta1,beta2,1,0,...)``.  Frame properties (cone membership, hyperplane
    incidence, co-direction, and the operator inequalities where the data to
    check them was supplied) are verified on the rotated vectors.

    Raises :class:`DegenerateFrameError` when the three normals are not
    numerically independent; that case is outside this construction.
    """
    z_k = np.asarray(z_k, dtype=float)
    z_half = np.asarray(z_half, dtype=float)
    z_next = np.asarray(z_next, dtype=float)
    F_k = np.asarray(F_k, dtype=float)
    F_half = np.asarray(F_half, dtype=float)
    a_k = np.asarray(a_k, dtype=float)
    n = z_k.shape[0]

    a_half = z_half - z_k + eta * F_k
    a_next = z_next - z_k + eta * F_half
    stack = np.vstack([a_next, a_half, a_k])
    svals = np.linalg.svd(stack, compute_uv=False)
    if svals[-1] <= 0 or svals[0] / svals[-1] > cond_threshold:
        raise DegenerateFrameError(
            f"normals are numerically dependent (condition {svals[0] / max(svals[-1], 1e-300):.3e})"
        )

    for name, a, z in (
        ("incidence-k", a_k, z_k),
        ("incidence-half", a_half, z_half),
        ("incidence-next", a_next, z_next),
    ):
        val = float(a @ z)
        scale = 1.0 + np.linalg.norm(a) * np.linalg.norm(z)
        if abs(val) > tol * scale:
            raise FrameCheckError(name, val)

    Q = _gram_schmidt_rows([a_next, a_half, a_k], n)
    # pivot signs: make the diagonal inner products positive
    for i, a in enumerate((a_next, a_half, a_k)):
        if Q[i] @ a < 0:
            Q[i] = -Q[i]

    ra_next = Q @ a_next
    ra_half = Q @ a_half
    ra_k = Q @ a_k
    d, c, b = ra_next[0], ra_half[1], ra_k[2]
    if min(d, c, b) <= 0:
        raise DegenerateFrameError("Gram-Schmidt pivots are not positive")
    alpha = float(ra_half[0] / c)
    beta1 = float(ra_k[0] / b)
    beta2 = float(ra_k[1] / b)

    rz = {name: Q @ v for name, v in (("k", z_k), ("half", z_half), ("next", z_next))}
    normals = {"k": ra_k / b, "half": ra_half / c, "next": ra_next / d}
    for i, ai in normals.items():
        for j, zj in rz.items():
            val = float(ai @ zj)
            if val < -tol * (1.0 + np.linalg.norm(zj)):
                raise FrameCheckError(f"cone-membership a_{i}.z_{j}", val)

    rF_k = Q @ F_k
    val = float((ra_k / b) @ rF_k)
    if val < -tol * (1.0 + np.linalg.norm(F_k)):
        raise FrameCheckError("gradient-plane", val)

    if F_next is not None:
        rF_next = Q @ np.asarray(F_next, dtype=float)
        rF_half = Q @ F_half
        mono = float((rF_next - rF_k) @ (rz["next"] - rz["k"]))
        if mono < -tol * (1.0 + np.linalg.norm(F_k) ** 2):
            raise FrameCheckError("monotone", mono)
        if lipschitz is not None:
            lip = float(
                lipschitz**2 * np.sum((rz["next"] - rz["half"]) ** 2)
                - np.sum((rF_next - rF_half) ** 2)
            )
            if lip < -tol * (1.0 + np.linalg.norm(F_half) ** 2):
                raise FrameCheckError("lipschitz", lip)

    return ReductionFrame(
        rotation=Q,
        a_k=normals["k"],
        a_half=normals["half"],
        a_next=normals["next"],
        alpha=alpha,
        beta1=beta1,
        beta2=beta2,
    )


# ---------------------------------------------------------------------------
# Batched verification used by the command line.
# ---------------------------------------------------------------------------


def verification_report(seed: int = 0, mutate: str | None = None) -> dict:
    """Run every identity check and collect a machine-readable summary."""
    rng = np.random.default_rng(seed)
    results = {}

    ok = True
    for _ in range(100):
        dim = int(rng.integers(1, 9))
        vecs = [
            [Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 10))) for _ in range(dim)]
            for _ in range(3)
        ]
        ok = ok and check_unconstrained_identity(*vecs)
    results["unconstrained"] = {"status": "pass" if ok else "fail", "trials": 100}

    for branch in BRANCHES:
        use_mutate = mutate
        good = check_constrained_identity(branch, mutate=use_mutate)
        lhs = build_constrained_lhs(branch)
        rhs = build_constrained_rhs(branch)
        entry = {
            "identity_name": "constrained-tangent-residual-monotonicity",
            "branch": branch,
            "status": "pass" if good else "fail",
            "monomial_count_lhs": lhs.monomial_count(),
            "monomial_count_rhs": rhs.monomial_count(),
            "max_degree": max(lhs.degree(), rhs.degree()),
        }
        if not good:
            entry["first_differing_monomial"] = first_differing_monomial(branch, use_mutate)
        results[f"constrained-{branch}"] = entry

    results["derivation-route"] = {
        "status": "pass"
        if all(
            (build_lhs_from_derivation(b) - build_constrained_lhs(b)).is_zero()
            for b in BRANCHES
        )
        else "fail"
    }
    results["p2-block"] = {"status": "pass" if check_p2_block_identity() else "fail"}

    ok = True
    for _ in range(1000):
        vals = [Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 12))) for _ in range(3)]
        ok = ok and check_expansion_identities(*vals)
    results["expansion"] = {"status": "pass" if ok else "fail", "trials": 1000}

    results["regrouped-rhs"] = {"status": "pass" if check_newsos_claim() else "fail"}
    results["all_pass"] = all(
        v.get("status") == "pass" for k, v in results.items() if isinstance(v, dict)
    )
    return results
