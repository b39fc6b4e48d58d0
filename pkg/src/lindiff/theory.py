"""Closed-form high-dimensional predictions for the affine denoiser.

Everything here treats the noisy design matrix as an n x d Gaussian with
i.i.d. N(0, sigma_x_sq) entries, so the empirical covariance S = x^T x / n is
a white Wishart matrix. In the proportional regime d/n -> alpha the resolvent
traces of S concentrate, and a scalar ridge ridge_hat maps to a renormalized
ridge R through the fixed point ridge_hat = R * (1 - alpha * df1(R)). The
`c_ab`/`b_a` tables give the concentrated values of
    C_ab = E Tr(S^a (S + ridge_hat)^-(a+b)),
    B_a  = E Tr(ridge_hat^a (S + ridge_hat)^-a),
as rational functions of (R, alpha, sigma_x_sq); `kl_var_theory` assembles
them into the quadratic KL coefficient of the fitted denoiser, and
`kl_var_ridgeless` evaluates its ridgeless series expansion in the noise
scale directly. A Monte Carlo Wishart oracle validates the tables.

All expressions scale linearly in d and diverge at alpha = 1; callers get a
diagnostic error inside |alpha - 1| < 1e-4 where double precision cannot
separate the two branches.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from math import comb

import numpy as np

__all__ = [
    "Branch",
    "RidgePair",
    "TheoryKL",
    "ALPHA_POLE_WIDTH",
    "df1_isotropic",
    "solve_renormalized_ridge",
    "df_n",
    "c_ab",
    "b_a",
    "trace_sigma_theta1",
    "trace_sigma_theta1_sq",
    "kl_var_theory",
    "kl_var_ridgeless",
    "mc_wishart_oracle",
]

# Width of the excluded window around the interpolation-threshold pole.
ALPHA_POLE_WIDTH = 1e-4


class Branch(Enum):
    ALPHA_BELOW_ONE = "alpha_below_one"
    ALPHA_ABOVE_ONE = "alpha_above_one"


def _check_alpha(alpha: float) -> None:
    if alpha <= 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    if abs(alpha - 1.0) < ALPHA_POLE_WIDTH:
        raise ValueError(
            f"alpha = {alpha} is inside the excluded window |alpha - 1| < "
            f"{ALPHA_POLE_WIDTH}: the prediction diverges at alpha = 1"
        )


@dataclass(frozen=True)
class RidgePair:
    """A ridge and its renormalized image under the fixed-point map."""

    ridge_hat: float
    ridge_renorm: float
    alpha: float
    sigma_x_sq: float

    def __post_init__(self) -> None:
        if self.ridge_hat < 0 or self.ridge_renorm < 0:
            raise ValueError("ridge values must be >= 0")
        if self.sigma_x_sq <= 0:
            raise ValueError(f"sigma_x_sq must be > 0, got {self.sigma_x_sq}")
        _check_alpha(self.alpha)


@dataclass(frozen=True)
class TheoryKL:
    """Noise-scale series of the predicted variance KL term."""

    order1: float  # first-order coefficient times the noise scale
    order2: float  # second-order coefficient times its square
    alpha0_term: float  # noise-independent floor, zero below the threshold
    total: float
    branch: Branch


def df1_isotropic(R: float, sigma_x_sq: float) -> float:
    """First effective-dimension ratio 1 / (1 + R / sigma_x_sq)."""
    if sigma_x_sq <= 0:
        raise ValueError(f"sigma_x_sq must be > 0, got {sigma_x_sq}")
    return 1.0 / (1.0 + R / sigma_x_sq)


def solve_renormalized_ridge(
    ridge_hat: float, alpha: float, sigma_x_sq: float
) -> RidgePair:
    """Invert ridge_hat = R * (1 - alpha * df1(R)) for the nonnegative root R.

    For the isotropic df1 the fixed point reduces to the quadratic
    R^2 + R * (sigma_x_sq * (1 - alpha) - ridge_hat) - ridge_hat * sigma_x_sq = 0,
    whose unique nonnegative root is returned; the ridgeless limit is exact
    (R = 0 for alpha <= 1, R = (alpha - 1) * sigma_x_sq above).
    """
    if ridge_hat < 0:
        raise ValueError(f"ridge_hat must be >= 0, got {ridge_hat}")
    if sigma_x_sq <= 0:
        raise ValueError(f"sigma_x_sq must be > 0, got {sigma_x_sq}")
    _check_alpha(alpha)
    if ridge_hat == 0.0:
        renorm = (alpha - 1.0) * sigma_x_sq if alpha > 1.0 else 0.0
    else:
        b = sigma_x_sq * (1.0 - alpha) - ridge_hat
        q = math.sqrt(b * b + 4.0 * ridge_hat * sigma_x_sq)
        # Pick the cancellation-free form of the "+" root.
        renorm = 2.0 * ridge_hat * sigma_x_sq / (q + b) if b > 0 else (q - b) / 2.0
    assert renorm >= 0.0
    return RidgePair(
        ridge_hat=ridge_hat,
        ridge_renorm=renorm,
        alpha=alpha,
        sigma_x_sq=sigma_x_sq,
    )


def df_n(n_index: int, R: float, sigma_x_sq: float) -> float:
    """Higher effective-dimension ratios df^n(R) = (1 + R / sigma_x_sq)^-n.

    The closed form satisfies the generating recursion
    df^{n+1} = (1 + (R / n) d/dR) df^n with df^1 = df1_isotropic (the tests
    verify this against finite differences).
    """
    if n_index not in (1, 2, 3, 4):
        raise ValueError(f"n_index must be in 1..4, got {n_index}")
    if sigma_x_sq <= 0:
        raise ValueError(f"sigma_x_sq must be > 0, got {sigma_x_sq}")
    return (1.0 + R / sigma_x_sq) ** (-n_index)


def c_ab(a: int, b: int, pair: RidgePair, d: int) -> float:
    """Concentrated trace C_ab = E Tr(S^a (S + ridge_hat)^-(a+b)).

    Tabulated rational functions of the renormalized ridge for a in 1..3 and
    b in 1..3, kept in guarded piecewise form exactly as derived. The two
    algebraic forms sit on either side of the interface
    R * (R + 2 s) = (alpha - 1) * s^2, where the entries with b >= 1 develop
    a pole; the fixed-point map keeps every physical pair strictly on the
    first side, so the second form is reachable only by constructing a
    RidgePair directly. b = 0 reduces exactly to d * df^a of the sample
    covariance via the binomial identity
    Tr(S^a (S+r)^-a) = sum_j (-1)^j C(a, j) * B_j.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if a not in (1, 2, 3) or b not in (0, 1, 2, 3):
        raise ValueError(f"(a, b) = ({a}, {b}) is outside the tabulated set")
    if b == 0:
        total = float(d)  # j = 0 term: B_0 = d
        for j in range(1, a + 1):
            total += (-1) ** j * comb(a, j) * b_a(j, pair, d)
        return total
    R, alpha, s = pair.ridge_renorm, pair.alpha, pair.sigma_x_sq
    A = R * R + 2.0 * R * s - (alpha - 1.0) * s * s
    abs_a, sgn_a = abs(A), math.copysign(1.0, A)
    below = alpha < 1.0
    # Piecewise condition separating the two above-threshold forms.
    inner = R * (R + 2.0 * s) < (alpha - 1.0) * s * s

    if (a, b) == (1, 1):
        if below:
            return d * s / A
        return (
            2.0 * d * s * (R + s) ** 2
            / (abs_a * (abs_a + R * R + 2.0 * R * s + (alpha + 1.0) * s * s))
        )
    if (a, b) == (1, 2):
        val = d * s * (R + s) ** 3
        return val / A**3 if below else val / abs_a**3
    if (a, b) == (1, 3):
        val = d * s * (R + s) ** 4 * (R * R + 2.0 * R * s + (alpha + 1.0) * s * s)
        return val / A**5 if below else val * sgn_a / abs_a**5
    if (a, b) == (2, 1):
        second = (
            d * s * s
            * ((alpha + 1.0) * R**3 + 3.0 * R * R * s
               - 3.0 * (alpha - 1.0) * R * s * s + (alpha - 1.0) ** 2 * s**3)
            / A**3
        )
        if below or not inner:
            return second
        return (
            d * (R + s) ** 3
            * (3.0 * R * R * s + R**3 - 3.0 * (alpha - 1.0) * R * s * s
               + (alpha - 1.0) ** 2 * s**3)
            / (alpha * s * (-A) ** 3)
        )
    if (a, b) == (2, 2):
        val = (
            d * s * s * (R + s) ** 4
            * ((alpha + 1.0) * R * R - 2.0 * (alpha - 1.0) * R * s
               + (alpha - 1.0) ** 2 * s * s)
        )
        return val / A**5 if below else val / abs_a**5
    if (a, b) == (2, 3):
        val = (
            d * s * s * (R + s) ** 5
            * ((alpha + 1.0) * R**4 + 3.0 * ((alpha - 2.0) * alpha + 2.0) * R * R * s * s
               - (alpha - 4.0) * R**3 * s + (alpha - 4.0) * (alpha - 1.0) * R * s**3
               + (alpha - 1.0) ** 2 * (alpha + 1.0) * s**4)
        )
        return val / A**7 if below else val / abs_a**7
    if (a, b) == (3, 1):
        second = (
            d * s**3
            * ((alpha * (alpha + 3.0) + 1.0) * R**6
               + (alpha - 1.0) ** 2 * (alpha + 15.0) * R * R * s**4
               + 4.0 * (alpha - 1.0) * ((alpha - 1.0) * alpha - 5.0) * R**3 * s**3
               + (alpha * ((alpha - 12.0) * alpha + 6.0) + 15.0) * R**4 * s * s
               - 2.0 * ((alpha - 5.0) * alpha - 3.0) * R**5 * s
               - 6.0 * (alpha - 1.0) ** 3 * R * s**5
               + (alpha - 1.0) ** 4 * s**6)
            / A**5
        )
        if below or not inner:
            return second
        return (
            d * (R + s) ** 4
            * ((alpha - 1.0) ** 2 * (alpha + 15.0) * R * R * s**4
               - 20.0 * (alpha - 1.0) * R**3 * s**3
               - 5.0 * (alpha - 3.0) * R**4 * s * s
               + 6.0 * R**5 * s + R**6
               - 6.0 * (alpha - 1.0) ** 3 * R * s**5
               + (alpha - 1.0) ** 4 * s**6)
            / (alpha * s * (-A) ** 5)
        )
    if (a, b) == (3, 2):
        val = (
            d * s**3 * (R + s) ** 5
            * ((alpha * (alpha + 3.0) + 1.0) * R**4
               + 3.0 * (alpha**3 - 3.0 * alpha + 2.0) * R * R * s * s
               + 2.0 * (-3.0 * alpha * alpha + alpha + 2.0) * R**3 * s
               - 4.0 * (alpha - 1.0) ** 3 * R * s**3
               + (alpha - 1.0) ** 4 * s**4)
        )
        return val / A**7 if below else val / abs_a**7
    # (a, b) == (3, 3)
    val = (
        d * s**3 * (R + s) ** 6
        * ((alpha * (alpha + 3.0) + 1.0) * R**6
           + 6.0 * (-alpha * alpha + alpha + 1.0) * R**5 * s
           + 3.0 * (alpha - 1.0) ** 2 * (alpha * (2.0 * alpha - 3.0) + 5.0) * R * R * s**4
           - 4.0 * (alpha - 1.0) * (2.0 * (alpha - 2.0) * alpha + 5.0) * R**3 * s**3
           + 3.0 * (alpha * (2.0 * (alpha - 1.0) * alpha - 3.0) + 5.0) * R**4 * s * s
           - 6.0 * (alpha - 1.0) ** 3 * R * s**5
           + (alpha - 1.0) ** 4 * (alpha + 1.0) * s**6)
    )
    return val / A**9 if below else val / abs_a**9


def b_a(a: int, pair: RidgePair, d: int, debug: bool = False) -> float:
    """Concentrated trace B_a = E Tr(ridge_hat^a (S + ridge_hat)^-a).

    With debug=True the value is cross-checked against the exact eigenvalue
    identity B_a = d - sum_{i=1..a} ridge_hat^(a-i) * C_{1, a-i}, which ties
    the B and C tables together.
    """
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    if a not in (1, 2, 3, 4):
        raise ValueError(f"a must be in 1..4, got {a}")
    R, alpha, s = pair.ridge_renorm, pair.alpha, pair.sigma_x_sq
    A = R * R + 2.0 * R * s - (alpha - 1.0) * s * s
    first_form = alpha < 1.0 or R * (R + 2.0 * s) >= (alpha - 1.0) * s * s

    if a == 1:
        val = d * R / (R + s) if first_form else d - d * (R / s + 1.0) / alpha
    elif a == 2:
        val = d * R * R / A if first_form else d * (1.0 - 1.0 / alpha - R * R / A)
    elif a == 3:
        if first_form:
            val = (
                d * R**3
                * (3.0 * R * R * s + R**3 + 3.0 * R * s * s
                   - (alpha * alpha - 1.0) * s**3)
                / A**3
            )
        else:
            val = (
                d * (R - (alpha - 1.0) * s) ** 3
                * (3.0 * R * R * s + R**3 + 3.0 * R * s * s - (alpha - 1.0) * s**3)
                / (alpha * (-A) ** 3)
            )
    else:  # a == 4
        if first_form:
            val = (
                d * R**4
                * (4.0 * (-alpha * alpha + alpha + 5.0) * R**3 * s**3
                   + (alpha * ((alpha - 12.0) * alpha + 6.0) + 15.0) * R * R * s**4
                   + (alpha + 15.0) * R**4 * s * s
                   + 6.0 * R**5 * s + R**6
                   + 2.0 * (alpha * ((alpha - 6.0) * alpha + 2.0) + 3.0) * R * s**5
                   + (alpha - 1.0) ** 2 * (alpha * (alpha + 3.0) + 1.0) * s**6)
                / A**5
            )
        else:
            val = (
                d * (R - (alpha - 1.0) * s) ** 4
                * (-5.0 * (alpha - 3.0) * R * R * s**4
                   + (alpha + 15.0) * R**4 * s * s
                   + 20.0 * R**3 * s**3
                   + 6.0 * R**5 * s + R**6
                   - 6.0 * (alpha - 1.0) * R * s**5
                   + (alpha - 1.0) ** 2 * s**6)
                / (alpha * (-A) ** 5)
            )

    if debug:
        recursed = float(d)
        for i in range(1, a + 1):
            recursed -= pair.ridge_hat ** (a - i) * c_ab(1, a - i, pair, d)
        scale = max(abs(val), abs(recursed), 1e-12 * d)
        if abs(val - recursed) > 1e-8 * scale:
            raise AssertionError(
                f"B_{a} table value {val!r} disagrees with the C-table "
                f"recursion {recursed!r}"
            )
    return val


def trace_sigma_theta1(pair: RidgePair, d: int, T: float, delta_t: float) -> float:
    """Expected trace of the population-covariance-weighted slope."""
    e2t = math.exp(2.0 * T)
    return (
        pair.alpha * delta_t * c_ab(1, 1, pair, d)
        + e2t * (b_a(2, pair, d) - 2.0 * b_a(1, pair, d))
    )


def trace_sigma_theta1_sq(pair: RidgePair, d: int, T: float, delta_t: float) -> float:
    """Expected trace of the squared weighted slope (leading contractions only)."""
    e2t = math.exp(2.0 * T)
    e4t = e2t * e2t
    a, rh = pair.alpha, pair.ridge_hat
    return (
        a * a * delta_t * delta_t * c_ab(2, 2, pair, d)
        + e4t * b_a(4, pair, d)
        + 4.0 * e4t * b_a(2, pair, d)
        + 2.0 * a * delta_t * e2t * rh * rh * c_ab(1, 3, pair, d)
        - 4.0 * a * delta_t * e2t * rh * c_ab(1, 2, pair, d)
        - 4.0 * e4t * b_a(3, pair, d)
        + 2.0 * a * delta_t * e2t * c_ab(1, 1, pair, d)
    )


def kl_var_theory(
    pair: RidgePair, d: int, T: float, lambda_hat: float, sigma_sq: float
) -> float:
    """Predicted variance KL term at general ridge.

    pair.sigma_x_sq must equal the marginal variance implied by
    (T, lambda_hat, sigma_sq); passing an inconsistent pair is rejected so the
    assembled formula cannot be evaluated off the model manifold.
    """
    if sigma_sq <= 0:
        raise ValueError(f"sigma_sq must be > 0, got {sigma_sq}")
    if lambda_hat < 0:
        raise ValueError(f"lambda_hat must be >= 0, got {lambda_hat}")
    em2t = math.exp(-2.0 * T)
    lam = lambda_hat * sigma_sq * em2t
    delta_t = lam * (1.0 - em2t)
    sigma_x_sq = em2t * sigma_sq + delta_t
    if not math.isclose(pair.sigma_x_sq, sigma_x_sq, rel_tol=1e-9):
        raise ValueError(
            f"pair.sigma_x_sq = {pair.sigma_x_sq} is inconsistent with the "
            f"marginal variance {sigma_x_sq} implied by (T, lambda_hat, sigma_sq)"
        )
    tr1 = trace_sigma_theta1(pair, d, T, delta_t)
    tr2 = trace_sigma_theta1_sq(pair, d, T, delta_t)
    f = em2t + delta_t / sigma_sq
    g = delta_t * math.exp(2.0 * T) / sigma_sq
    return 0.25 * f * f * tr2 + 0.5 * f * g * tr1 + 0.25 * d * g * g


def kl_var_ridgeless(alpha: float, lambda_hat: float, T: float, d: int) -> TheoryKL:
    """Ridgeless variance KL series through second order in the noise scale."""
    if lambda_hat < 0:
        raise ValueError(f"lambda_hat must be >= 0, got {lambda_hat}")
    if T < 0:
        raise ValueError(f"T must be >= 0, got {T}")
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    _check_alpha(alpha)
    g = math.exp(2.0 * T) - 1.0
    e4t = math.exp(4.0 * T)
    e2t = math.exp(2.0 * T)
    if alpha < 1.0:
        gap = 1.0 - alpha
        alpha0 = 0.0
        order1 = d * (alpha * lambda_hat * math.exp(-4.0 * T) * g / (2.0 * gap))
        order2 = d * (
            lambda_hat**2 * math.exp(-8.0 * T) * g * g
            * (alpha * alpha + gap**3 * e4t + 4.0 * alpha * gap * gap * e2t)
            / (4.0 * gap**3)
        )
        branch = Branch.ALPHA_BELOW_ONE
    else:
        gap = alpha - 1.0
        alpha0 = d * (gap / (4.0 * alpha))
        order1 = d * (lambda_hat * math.exp(-4.0 * T) * g / (2.0 * gap))
        order2 = d * (
            lambda_hat**2 * math.exp(-8.0 * T) * g * g
            * (alpha**3 + gap**3 * e4t + 4.0 * alpha * gap * gap * e2t)
            / (4.0 * gap**3 * alpha)
        )
        branch = Branch.ALPHA_ABOVE_ONE
    return TheoryKL(
        order1=order1,
        order2=order2,
        alpha0_term=alpha0,
        total=alpha0 + order1 + order2,
        branch=branch,
    )


def mc_wishart_oracle(
    a: int,
    b: int,
    ridge_hat: float,
    n: int,
    d: int,
    trials: int,
    rng: np.random.Generator,
    sigma_x_sq: float = 1.0,
) -> float:
    """Monte Carlo estimate of E Tr(S^a (S + ridge_hat)^-(a+b)) for white Wishart S.

    Rows of the design are i.i.d. N(0, sigma_x_sq); the estimate averages the
    exact eigenvalue expression over `trials` independent draws in fixed
    order, so a given rng state maps to one reproducible value.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if a < 0 or b < 0 or a + b < 1:
        raise ValueError(f"(a, b) = ({a}, {b}) gives no resolvent to probe")
    if ridge_hat < 0:
        raise ValueError(f"ridge_hat must be >= 0, got {ridge_hat}")
    if ridge_hat == 0.0 and n <= d:
        raise ValueError(
            "ridge_hat = 0 with n <= d makes the resolvent singular; "
            "use ridge_hat > 0 or n > d"
        )
    if sigma_x_sq <= 0:
        raise ValueError(f"sigma_x_sq must be > 0, got {sigma_x_sq}")
    scale = math.sqrt(sigma_x_sq)
    values = np.empty(trials)
    for k in range(trials):
        x = scale * rng.standard_normal((n, d))
        evs = np.linalg.eigvalsh(x.T @ x / n)
        values[k] = float(np.sum(evs**a / (evs + ridge_hat) ** (a + b)))
    return float(values.mean())
