"""Scalar inverse conversion Lgj → XYZ.

The inverse runs in three stages:

1. Lightness: recover ``L' = L*sqrt(2) + 14.3993`` and solve the cubic
   ``f(t) = (u - t)^3 - 0.042^3 (t^3 - 30) = 0`` (``u = L'/5.9 + 2/3``) for
   its unique real root ``t``, either in closed form (Cardano) or by Newton
   iteration.  ``Y0 = t^3`` and the chroma normalizer ``C`` follow.
2. Gather: ``a = g/C`` and ``b = j/C`` pin the cube-rooted RGB vector down
   to one degree of freedom ``w = cbrt(R)``.
3. Residual iteration: the scalar function ``phi(w)`` (tentative modified
   luminance minus its target) is driven to zero by a safeguarded Newton
   iteration from the fixed starting point ``w0 = cbrt(79.9 + 41.94)``.

``phi`` has a pole where the tentative tristimulus sum ``S(w)`` crosses
zero.  ``S`` is a cubic polynomial in ``w`` with positive leading
coefficient, so ``S > 0`` exactly on ``(z, inf)`` where ``z`` is its largest
real zero.  The iteration is confined to that region: any trial at or past
``z`` is rejected and the step halved, which enforces the convention that
the converged root is the largest one (``w > z``).

All expression helpers (``_phi_terms`` etc.) are polymorphic over scalars
and arrays and are shared with the batch engine.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import CONSTANTS, LgjColor, Real, SolveOptions, CubicSolver, XyzColor, k_factor
from .errors import ConvergenceFailure, DegenerateInput, NumericalFailure, SingularityHit

__all__ = [
    "CubicCoeffs",
    "InverseTrace",
    "lprime_from_l",
    "cubic_f",
    "cubic_f_derivative",
    "solve_t_cardano",
    "solve_t_newton",
    "gather_from_t",
    "phi",
    "phi_derivative",
    "tentative_sum",
    "largest_sum_zero",
    "lgj_to_xyz",
]

_DIV = CONSTANTS.lightness_divisor
_SHIFT = CONSTANTS.lightness_shift
_L_OFFSET = CONSTANTS.L_offset
_L_SCALE = CONSTANTS.L_scale
_W0 = CONSTANTS.w0
_V = CONSTANTS.small_term ** 3

_AI00, _AI01, _AI02 = (float(v) for v in CONSTANTS.A_tilde_inv[0])
_AI10, _AI11, _AI12 = (float(v) for v in CONSTANTS.A_tilde_inv[1])
_AI20, _AI21, _AI22 = (float(v) for v in CONSTANTS.A_tilde_inv[2])

_MI00, _MI01, _MI02 = (float(v) for v in CONSTANTS.M_inv[0])
_MI10, _MI11, _MI12 = (float(v) for v in CONSTANTS.M_inv[1])
_MI20, _MI21, _MI22 = (float(v) for v in CONSTANTS.M_inv[2])

# Column sums of M_inv: the tentative sum is S(w) = sum_k _MC<k> * s_k(w)^3.
_MC0 = _MI00 + _MI10 + _MI20
_MC1 = _MI01 + _MI11 + _MI21
_MC2 = _MI02 + _MI12 + _MI22

# Leading coefficient of the cubic S(w); positive, so S > 0 right of its
# largest real zero.
_S_CUBIC_LEAD = _MC0 * _AI02 ** 3 + _MC1 * _AI12 ** 3 + _MC2 * _AI22 ** 3

_SINGULARITY_RTOL = 1e-13
_STEP_FLOOR = 1e-15
_MAX_HALVINGS = 30


# ---------------------------------------------------------------------------
# Lightness cubic
# ---------------------------------------------------------------------------

def lprime_from_l(L: Real) -> Real:
    """Pre-offset lightness ``L' = L*sqrt(2) + 14.3993``."""
    return L * _L_SCALE + _L_OFFSET


def _cubic_terms(l_prime: Real) -> tuple:
    """Coefficients of the lightness cubic and its depressed form."""
    u = l_prime / _DIV + _SHIFT
    v = _V
    a3 = -(v + 1.0)
    b2 = 3.0 * u
    c1 = -3.0 * u * u
    d0 = u * u * u + 30.0 * v
    p = (3.0 * a3 * c1 - b2 * b2) / (3.0 * a3 * a3)
    q = (2.0 * b2 ** 3 - 9.0 * a3 * b2 * c1 + 27.0 * a3 * a3 * d0) / (27.0 * a3 ** 3)
    return u, v, a3, b2, c1, d0, p, q


@dataclass(frozen=True)
class CubicCoeffs:
    """Expanded and depressed coefficients of the lightness cubic.

    ``f(t) = a3 t^3 + b2 t^2 + c1 t + d0`` with ``u = L'/5.9 + 2/3`` and
    ``v = 0.042^3``; ``p`` and ``q`` are the depressed-form coefficients.
    ``a3 = -(v + 1) < 0`` always, and the Cardano discriminant
    ``(q/2)^2 + (p/3)^3`` is positive for every lightness reachable from a
    finite ``L`` (the cubic has exactly one real root).
    """

    u: float
    v: float
    a3: float
    b2: float
    c1: float
    d0: float
    p: float
    q: float

    @staticmethod
    def from_lightness(l_prime: float) -> "CubicCoeffs":
        u, v, a3, b2, c1, d0, p, q = _cubic_terms(l_prime)
        return CubicCoeffs(
            float(u), float(v), float(a3), float(b2), float(c1), float(d0),
            float(p), float(q),
        )

    def discriminant(self) -> float:
        return (0.5 * self.q) ** 2 + (self.p / 3.0) ** 3


def cubic_f(t: Real, l_prime: Real) -> Real:
    """The lightness cubic ``f(t) = (u - t)^3 - 0.042^3 (t^3 - 30)``."""
    u = l_prime / _DIV + _SHIFT
    d = u - t
    return d * d * d - _V * (t * t * t - 30.0)


def cubic_f_derivative(t: Real, l_prime: Real) -> Real:
    """Analytic derivative ``f'(t) = -3 (u - t)^2 - 3*0.042^3 t^2`` (< 0)."""
    u = l_prime / _DIV + _SHIFT
    d = u - t
    return -3.0 * d * d - 3.0 * _V * t * t


def _cardano_terms(l_prime: Real) -> tuple:
    """Cardano root of the lightness cubic plus its discriminant.

    One unconditional Newton polish step is applied to the closed-form root
    (skipped exactly where the residual is already zero): the raw closed form
    loses a few digits where ``f`` is flat, and the residual there is far too
    small to trigger a residual-based polish, so polishing is not made
    conditional on the residual.  Shared by the scalar and batch solvers.
    """
    u, v, a3, b2, c1, d0, p, q = _cubic_terms(l_prime)
    disc = (0.5 * q) ** 2 + (p / 3.0) ** 3
    sd = np.sqrt(disc)
    t = -b2 / (3.0 * a3) + np.cbrt(-0.5 * q + sd) + np.cbrt(-0.5 * q - sd)
    d = u - t
    f = d * d * d - v * (t * t * t - 30.0)
    fp = -3.0 * d * d - 3.0 * v * t * t
    t = np.where(f == 0.0, t, t - f / fp)
    return t, disc


def solve_t_cardano(l_prime: float) -> float:
    """Unique real root of the lightness cubic, in closed form.

    Raises
    ------
    NumericalFailure
        If the discriminant is not positive (impossible for finite input
        with the published constants — indicates corrupted constants), or if
        the root fails its residual postcondition
        ``|f(t)| <= 1e-10 * max(1, |t|^3)``.
    """
    if not np.isfinite(l_prime):
        raise DegenerateInput(f"L' must be finite, got {l_prime!r}")
    t, disc = _cardano_terms(l_prime)
    if not disc > 0.0:
        raise NumericalFailure(
            f"cubic discriminant {disc!r} is not positive for L' = {l_prime!r}"
        )
    t = float(t)
    if not abs(cubic_f(t, l_prime)) <= 1e-10 * max(1.0, abs(t) ** 3):
        raise NumericalFailure(
            f"closed-form root residual out of bounds for L' = {l_prime!r}"
        )
    return t


def solve_t_newton(l_prime: float, opts: Optional[SolveOptions] = None) -> tuple:
    """Newton iteration for the lightness cubic root.

    Starts from ``t0 = L'/5.9 + 2/3`` and iterates with the analytic
    derivative.  The stop test requires both a small residual
    (``|f| <= tol*max(1, |t|^3)``) and a small final step
    (``|step| <= tol*max(1, |t|)``); a bare residual test is not sufficient
    where ``f`` is flat.  A step below ``1e-15*|t|`` stops the iteration
    unconditionally.  Returns ``(t, iterations)``.

    Raises
    ------
    ConvergenceFailure
        If ``opts.max_iter`` is exhausted (not expected for finite input).
    """
    if opts is None:
        opts = SolveOptions()
    if not np.isfinite(l_prime):
        raise DegenerateInput(f"L' must be finite, got {l_prime!r}")
    tol = opts.newton_tol
    u = l_prime / _DIV + _SHIFT
    t = u
    iterations = 0
    while True:
        iterations += 1
        d = u - t
        f = d * d * d - _V * (t * t * t - 30.0)
        fp = -3.0 * d * d - 3.0 * _V * t * t
        if fp == 0.0 or not np.isfinite(fp):
            raise ConvergenceFailure(
                f"flat cubic derivative at t = {t!r} for L' = {l_prime!r}"
            )
        step = f / fp
        t_new = t - step
        if abs(f) <= tol * max(1.0, abs(t) ** 3) and abs(step) <= tol * max(1.0, abs(t)):
            return float(t_new), iterations
        if abs(step) < _STEP_FLOOR * abs(t):
            return float(t_new), iterations
        t = t_new
        if iterations >= opts.max_iter:
            raise ConvergenceFailure(
                f"cubic Newton did not converge in {opts.max_iter} iterations"
                f" for L' = {l_prime!r}"
            )


def _solve_t(l_prime: float, opts: SolveOptions) -> float:
    if opts.cubic_solver is CubicSolver.NEWTON:
        t, _ = solve_t_newton(l_prime, opts)
        return t
    return solve_t_cardano(l_prime)


# ---------------------------------------------------------------------------
# Gather
# ---------------------------------------------------------------------------

def _gather_terms(t: Real, l_prime: Real, g: Real, j: Real) -> tuple:
    """Unchecked gather: ``Y0 = t^3``, ``C``, ``a = g/C``, ``b = j/C``."""
    y0 = t * t * t
    chroma_norm = l_prime / (_DIV * (t - _SHIFT))
    a = g / chroma_norm
    b = j / chroma_norm
    return y0, chroma_norm, a, b


def gather_from_t(t: float, l_prime: float, g: float, j: float) -> tuple:
    """Recover ``(Y0, C, a, b)`` from the cubic root and the chroma pair.

    Raises
    ------
    DegenerateInput
        If ``|t - 2/3| < 1e-14`` (zero chroma denominator) or the resulting
        ``C`` is zero.
    """
    if abs(t - _SHIFT) < 1e-14:
        raise DegenerateInput(f"t = {t!r} is too close to 2/3; C is undefined")
    chroma_norm = l_prime / (_DIV * (t - _SHIFT))
    if chroma_norm == 0.0 or not np.isfinite(chroma_norm):
        raise DegenerateInput(f"chroma normalizer C = {chroma_norm!r} is degenerate")
    y0, chroma_norm, a, b = _gather_terms(t, l_prime, g, j)
    return float(y0), float(chroma_norm), float(a), float(b)


# ---------------------------------------------------------------------------
# Residual function phi and its derivative
# ---------------------------------------------------------------------------

class PhiTerms(NamedTuple):
    """All intermediates of one ``phi`` evaluation (reused by the derivative)."""

    phi: Real
    X: Real
    Y: Real
    Z: Real
    S: Real
    s0: Real
    s1: Real
    s2: Real
    x: Real
    y: Real
    K: Real


def _phi_terms(w: Real, a: Real, b: Real, y0_target: Real) -> PhiTerms:
    """Unchecked evaluation of ``phi`` and every intermediate quantity.

    ``s = A_tilde_inv @ [a, b, w]`` is the tentative cube-rooted RGB vector,
    giving tentative RGB ``s^3``, tentative XYZ through ``M_inv``, and the
    tentative modified luminance ``Y*K(x, y)``.
    """
    s0 = _AI00 * a + _AI01 * b + _AI02 * w
    s1 = _AI10 * a + _AI11 * b + _AI12 * w
    s2 = _AI20 * a + _AI21 * b + _AI22 * w
    r0 = s0 * s0 * s0
    r1 = s1 * s1 * s1
    r2 = s2 * s2 * s2
    X = _MI00 * r0 + _MI01 * r1 + _MI02 * r2
    Y = _MI10 * r0 + _MI11 * r1 + _MI12 * r2
    Z = _MI20 * r0 + _MI21 * r1 + _MI22 * r2
    S = X + Y + Z
    x = X / S
    y = Y / S
    K = k_factor(x, y)
    phi_val = Y * K - y0_target
    return PhiTerms(phi_val, X, Y, Z, S, s0, s1, s2, x, y, K)


def _dphi_terms(t: PhiTerms) -> Real:
    """Analytic ``dphi/dw`` from the intermediates of a ``phi`` evaluation.

    Chain rule: ``ds/dw`` is the third column of ``A_tilde_inv``;
    ``dRGB/dw = 3 s^2 * ds/dw``; ``dXYZ/dw = M_inv @ dRGB/dw``; the
    chromaticity derivatives use the quotient rule through ``S``.
    """
    q0 = 3.0 * t.s0 * t.s0 * _AI02
    q1 = 3.0 * t.s1 * t.s1 * _AI12
    q2 = 3.0 * t.s2 * t.s2 * _AI22
    dX = _MI00 * q0 + _MI01 * q1 + _MI02 * q2
    dY = _MI10 * q0 + _MI11 * q1 + _MI12 * q2
    dZ = _MI20 * q0 + _MI21 * q1 + _MI22 * q2
    dS = dX + dY + dZ
    ss = t.S * t.S
    dx = (dX * t.S - t.X * dS) / ss
    dy = (dY * t.S - t.Y * dS) / ss
    kx = 8.9868 * t.x - 4.276 * t.y - 1.3744
    ky = 8.6068 * t.y - 4.276 * t.x - 2.5643
    return dY * t.K + t.Y * (kx * dx + ky * dy)


def _is_singular(terms: PhiTerms) -> bool:
    scale = max(abs(terms.X), abs(terms.Y), abs(terms.Z))
    return abs(terms.S) < _SINGULARITY_RTOL * scale


def phi(w: float, a: float, b: float, y0_target: float) -> tuple:
    """Residual ``phi(w)`` and the tentative XYZ triple behind it.

    Raises
    ------
    SingularityHit
        If the tentative tristimulus sum is zero to within
        ``1e-13 * max(|X|, |Y|, |Z|)`` — the pole of ``phi``.
    """
    terms = _phi_terms(w, a, b, y0_target)
    if _is_singular(terms):
        raise SingularityHit(
            f"tentative sum {terms.S!r} vanishes at w = {w!r} (pole of phi)"
        )
    return float(terms.phi), XyzColor(float(terms.X), float(terms.Y), float(terms.Z))


def phi_derivative(w: float, a: float, b: float) -> float:
    """Analytic derivative of ``phi`` with respect to ``w``.

    Independent of the target value (which only shifts ``phi``).

    Raises
    ------
    SingularityHit
        As :func:`phi`.
    """
    terms = _phi_terms(w, a, b, 0.0)
    if _is_singular(terms):
        raise SingularityHit(
            f"tentative sum {terms.S!r} vanishes at w = {w!r} (pole of phi)"
        )
    return float(_dphi_terms(terms))


def _phi_fd(w: float, a: float, b: float, h: float) -> float:
    """Central finite difference of ``phi`` (diagnostic cross-check)."""
    upper = _phi_terms(w + h, a, b, 0.0)
    lower = _phi_terms(w - h, a, b, 0.0)
    return float((upper.phi - lower.phi) / (2.0 * h))


def tentative_sum(w: Real, a: Real, b: Real) -> Real:
    """Tentative tristimulus sum ``S(w)``; its zero set is the pole of phi."""
    terms_s0 = _AI00 * a + _AI01 * b + _AI02 * w
    terms_s1 = _AI10 * a + _AI11 * b + _AI12 * w
    terms_s2 = _AI20 * a + _AI21 * b + _AI22 * w
    return (
        _MC0 * terms_s0 * terms_s0 * terms_s0
        + _MC1 * terms_s1 * terms_s1 * terms_s1
        + _MC2 * terms_s2 * terms_s2 * terms_s2
    )


def _sum_zero_coeffs(a: Real, b: Real) -> tuple:
    """Coefficients of the cubic ``S(w)`` for fixed ``(a, b)``.

    With ``s_k(w) = p_k + e_k w`` (``p_k`` from the first two columns of
    ``A_tilde_inv``, ``e_k`` its third column), ``S(w) = sum_k mc_k s_k^3``
    expands to ``c3 w^3 + c2 w^2 + c1 w + c0``.
    """
    p0 = _AI00 * a + _AI01 * b
    p1 = _AI10 * a + _AI11 * b
    p2 = _AI20 * a + _AI21 * b
    c3 = _S_CUBIC_LEAD
    c2 = 3.0 * (
        _MC0 * _AI02 ** 2 * p0 + _MC1 * _AI12 ** 2 * p1 + _MC2 * _AI22 ** 2 * p2
    )
    c1 = 3.0 * (
        _MC0 * _AI02 * p0 * p0 + _MC1 * _AI12 * p1 * p1 + _MC2 * _AI22 * p2 * p2
    )
    c0 = _MC0 * p0 ** 3 + _MC1 * p1 ** 3 + _MC2 * p2 ** 3
    return c3, c2, c1, c0


def _largest_real_root_cubic(c3: Real, c2: Real, c1: Real, c0: Real) -> Real:
    """Largest real root of ``c3 w^3 + c2 w^2 + c1 w + c0`` (vectorized).

    Uses the Cardano branch when the depressed discriminant is nonnegative
    (one real root) and the trigonometric branch otherwise (three real
    roots, of which the cosine principal value is the largest).
    """
    b = c2 / c3
    c = c1 / c3
    d = c0 / c3
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    disc = 0.25 * q * q + p ** 3 / 27.0
    with np.errstate(all="ignore"):
        sd = np.sqrt(np.maximum(disc, 0.0))
        single = np.cbrt(-0.5 * q + sd) + np.cbrt(-0.5 * q - sd)
        m = 2.0 * np.sqrt(np.maximum(-p, 0.0) / 3.0)
        theta = np.arccos(np.clip(3.0 * q / (p * m), -1.0, 1.0)) / 3.0
        triple = m * np.cos(theta)
        root = np.where(disc >= 0.0, single, triple) - b / 3.0
    return root


def largest_sum_zero(a: float, b: float) -> float:
    """Largest real zero of the tentative sum ``S(w)`` — the pole location.

    The residual iteration is confined to ``w`` strictly greater than this
    value, where ``S > 0``.
    """
    c3, c2, c1, c0 = _sum_zero_coeffs(a, b)
    return float(_largest_real_root_cubic(c3, c2, c1, c0))


# ---------------------------------------------------------------------------
# Full inverse
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InverseTrace:
    """Diagnostics of one inverse solve.

    ``iterations`` counts accepted Newton steps of the residual iteration
    (0 when the starting point already satisfies the tolerance);
    ``singularity_guard_hits`` counts step halvings forced by the
    safeguards.
    """

    iterations: int
    final_phi: float
    w_root: float
    singularity_guard_hits: int


def _fd_check_derivative(w: float, a: float, b: float, analytic: float) -> None:
    h = 1e-6 * max(1.0, abs(w))
    fd = _phi_fd(w, a, b, h)
    scale = max(abs(analytic), abs(fd), 1e-300)
    if abs(analytic - fd) > 1e-5 * scale:
        raise NumericalFailure(
            f"analytic dphi/dw {analytic!r} disagrees with finite difference"
            f" {fd!r} at w = {w!r}"
        )


def lgj_to_xyz(c: LgjColor, opts: Optional[SolveOptions] = None) -> tuple:
    """Convert one OSA-UCS triple back to XYZ.

    Runs the lightness solve, the gather step, and the safeguarded Newton
    iteration on ``phi`` from ``w0 = cbrt(79.9 + 41.94)``.  Safeguards: a
    trial step is rejected (and halved, up to 30 times) if it leaves the
    region right of the pole of ``phi`` or fails to reduce ``|phi|``; the
    iteration stops when ``|phi| <= tol * max(1, Y0_target)`` or the
    accepted step falls below ``1e-15 * |w|``.

    Returns ``(XyzColor, InverseTrace)``.

    Raises
    ------
    DegenerateInput
        Non-finite input or a degenerate gather denominator.
    ConvergenceFailure
        Iteration budget exhausted, safeguards unable to find an acceptable
        step (typical for out-of-gamut input with no XYZ preimage), or a
        stall above tolerance.  Carries the partial trace.
    SingularityHit
        Only if an accepted point lands numerically on the pole itself.
    """
    if opts is None:
        opts = SolveOptions()
    L, g, j = (float(v) for v in c)
    if not (np.isfinite(L) and np.isfinite(g) and np.isfinite(j)):
        raise DegenerateInput(f"Lgj components must be finite, got {c!r}")

    l_prime = float(lprime_from_l(L))
    t = _solve_t(l_prime, opts)
    y0, _, a, b = gather_from_t(t, l_prime, g, j)

    z_floor = largest_sum_zero(a, b)
    w = _W0 if _W0 > z_floor else z_floor + max(1.0, 0.1 * abs(z_floor))

    tol_phi = opts.newton_tol * max(1.0, y0)
    guard_hits = 0
    iterations = 0

    terms = _phi_terms(w, a, b, y0)
    phi_c = float(terms.phi)

    def make_trace() -> InverseTrace:
        return InverseTrace(
            iterations=iterations,
            final_phi=phi_c,
            w_root=float(w),
            singularity_guard_hits=guard_hits,
        )

    if _is_singular(terms):
        raise SingularityHit(
            f"starting point w = {w!r} lies on the pole of phi"
        )

    while abs(phi_c) > tol_phi:
        if iterations >= opts.max_iter:
            raise ConvergenceFailure(
                f"residual iteration exceeded {opts.max_iter} iterations"
                f" (|phi| = {abs(phi_c)!r})",
                trace=make_trace(),
            )
        dphi = float(_dphi_terms(terms))
        if opts.fd_check:
            _fd_check_derivative(w, a, b, dphi)
        if dphi == 0.0 or not np.isfinite(dphi):
            raise ConvergenceFailure(
                f"flat or non-finite dphi/dw = {dphi!r} at w = {w!r}",
                trace=make_trace(),
            )
        step = phi_c / dphi

        accepted = False
        trial = terms
        w_trial = w
        for _ in range(_MAX_HALVINGS + 1):
            w_trial = w - step
            if w_trial > z_floor:
                trial = _phi_terms(w_trial, a, b, y0)
                trial_phi = float(trial.phi)
                if (
                    np.isfinite(trial_phi)
                    and float(trial.S) > 0.0
                    and abs(trial_phi) < abs(phi_c)
                ):
                    accepted = True
                    break
            step *= 0.5
            guard_hits += 1
        if not accepted:
            raise ConvergenceFailure(
                f"no acceptable step after {_MAX_HALVINGS} halvings at"
                f" w = {w!r} (|phi| = {abs(phi_c)!r}); the input may have no"
                " XYZ preimage",
                trace=make_trace(),
            )

        step_taken = w - w_trial
        w = w_trial
        terms = trial
        phi_c = float(terms.phi)
        iterations += 1

        if abs(phi_c) <= tol_phi:
            break
        if abs(step_taken) < _STEP_FLOOR * abs(w):
            raise ConvergenceFailure(
                f"step stalled below the floor at w = {w!r} with"
                f" |phi| = {abs(phi_c)!r} above tolerance",
                trace=make_trace(),
            )

    if _is_singular(terms):
        raise SingularityHit(
            f"converged point w = {w!r} lies on the pole of phi"
        )

    xyz = XyzColor(float(terms.X), float(terms.Y), float(terms.Z))
    return xyz, make_trace()
