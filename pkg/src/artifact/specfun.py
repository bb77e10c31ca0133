"""Scalar special functions, the matrix Gamma, and truncated Laurent series.

The scalar pieces are the classical workhorses: log-Gamma by Lanczos (g = 7,
nine coefficients) with the reflection formula on Re z < 0.5, digamma by
upward recurrence plus the Bernoulli tail, and the upper incomplete gamma by
the lower series / Lentz continued fraction split, extended to nonpositive
order through the downward recurrence

    Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a.

LaurentValue provides exact pole bookkeeping for the intertwining factor
d(s), whose value at 0 exists only because the Gamma poles in numerator and
denominator cancel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, PoleHit, WrongCenter

EULER_GAMMA = 0.57721566490153286060651209008240243104215933593992

# zeta(2) .. zeta(13), for the Taylor expansion of Gamma(1 + eps)
_ZETA = [
    1.6449340668482264364724151666460251892189499012068,
    1.2020569031595942853997381615114499907649862923405,
    1.0823232337111381915160036965411679027747509519187,
    1.0369277551433699263313654864570341680570809195019,
    1.0173430619844491397145179297909205279018174900329,
    1.0083492773819228268397975498497967595998635605652,
    1.0040773561979443393786852385086524652589607906499,
    1.0020083928260822144178527692324120604856058513949,
    1.0009945751278180853371459589003190170060195315645,
    1.0004941886041194645587022825264699364686064357582,
    1.0002460865533080482986379980477396709604160884580,
    1.0001227133475784891467518365263573957142751058955,
]

_LANCZOS_G = 7.0
_LANCZOS = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
]

_LN_SQRT_2PI = 0.91893853320467274178032973640562


def _is_nonpositive_integer(z, tol=1e-12):
    zr = complex(z)
    n = round(zr.real)
    return n <= 0 and abs(zr - n) < tol, n


def log_gamma(z) -> complex:
    """Principal branch of log Gamma(z) for complex z off the poles."""
    z = complex(z)
    bad, n = _is_nonpositive_integer(z)
    if bad:
        raise PoleHit(f"Gamma pole at z = {n}")
    if z.real < 0.5:
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z), with log kept continuous
        return (
            math.log(math.pi)
            - _log_sin_pi(z)
            - log_gamma(1.0 - z)
        )
    zz = z - 1.0
    acc = _LANCZOS[0]
    for k in range(1, len(_LANCZOS)):
        acc += _LANCZOS[k] / (zz + k)
    t = zz + _LANCZOS_G + 0.5
    return _LN_SQRT_2PI + (zz + 0.5) * np.log(t) - t + np.log(acc)


def _log_sin_pi(z: complex) -> complex:
    """log sin(pi z), stable for large |Im z|."""
    if abs(z.imag) < 20:
        return complex(np.log(complex(np.sin(math.pi * z))))
    # sin(pi z) ~ +- e^{|pi Im z|}/2i e^{...}; use the dominant exponential
    if z.imag > 0:
        return 1j * math.pi * z + math.log(0.5) - 1j * math.pi / 2 + complex(
            np.log1p(-np.exp(2j * math.pi * z))
        )
    return -1j * math.pi * z + math.log(0.5) + 1j * math.pi / 2 + complex(
        np.log1p(-np.exp(-2j * math.pi * z))
    )


def gamma_fn(z) -> complex:
    return complex(np.exp(log_gamma(z)))


def rgamma(z) -> complex:
    """1 / Gamma(z); exactly 0 at the poles."""
    bad, _ = _is_nonpositive_integer(z)
    if bad:
        return 0.0
    return complex(np.exp(-log_gamma(z)))


def digamma(x: float) -> float:
    """psi(x) for real x off the poles."""
    bad, n = _is_nonpositive_integer(x)
    if bad:
        raise PoleHit(f"digamma pole at x = {n}")
    if x < 0.0:
        # reflection psi(1-x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi / math.tan(math.pi * x)
    val = 0.0
    while x < 8.0:
        val -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    # asymptotic series with Bernoulli numbers B2..B14
    tail = (
        1.0 / 12.0
        - inv2 * (1.0 / 120.0 - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0
          - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0 - inv2 / 12.0)))))
    )
    return val + math.log(x) - 0.5 / x - inv2 * tail


def _upper_gamma_cf(a: float, x: float) -> float:
    """Lentz continued fraction for Gamma(a, x), reliable for x >= ~1."""
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0 else 1.0 / tiny
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x)) * h


def _lower_gamma_series(a: float, x: float) -> float:
    """Regularized-ish lower series: returns gamma(a, x) (lower incomplete)."""
    term = 1.0 / a
    total = term
    for n in range(1, 500):
        term *= x / (a + n)
        total += term
        if abs(term) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x))


def upper_gamma(a: float, x: float) -> float:
    """Upper incomplete gamma Gamma(a, x) for real a, x > 0.

    Gamma(0, x) = E_1(x) = -Ei(-x). Nonpositive a is reached by the downward
    recurrence from a base order in (0, 1]; for x >= 1 the continued fraction
    is used directly at the target order, which avoids the cancellation the
    recurrence suffers at large x.
    """
    if not (x > 0.0) or not math.isfinite(x):
        raise DomainError(f"upper_gamma needs x > 0, got {x}")
    if a > 0.0:
        if x < a + 1.0:
            return math.exp(log_gamma(a).real) - _lower_gamma_series(a, x)
        return _upper_gamma_cf(a, x)
    if x >= 1.0:
        return _upper_gamma_cf(a, x)
    # x < 1, a <= 0: walk down from base in (0, 1] (or exactly 0 -> E1 series)
    n = int(math.ceil(-a)) if a < 0.0 else 0
    base = a + n
    if abs(base) < 1e-14:
        val = _e1_series(x)
        base = 0.0
    else:
        if base <= 0.0:
            n += 1
            base = a + n
        val = math.exp(log_gamma(base).real) - _lower_gamma_series(base, x)
    cur = base
    for _ in range(n):
        cur -= 1.0
        val = (val - math.exp(cur * math.log(x)) * math.exp(-x)) / cur
    return val


def _e1_series(x: float) -> float:
    """E_1(x) = -gamma - log x + sum (-1)^{k+1} x^k / (k k!), for small x."""
    total = -EULER_GAMMA - math.log(x)
    term = 1.0
    for k in range(1, 200):
        term *= -x / k
        total -= term / k
        if abs(term) < 1e-18 * max(1.0, abs(total)):
            break
    return total


def exp_integral_e1(x: float) -> float:
    """E_1(x) = Gamma(0, x) = -Ei(-x) for x > 0."""
    return upper_gamma(0.0, x)


# --------------------------------------------------------------------------
# matrix Gamma


def gamma_r(beta, r: int, iota: int) -> complex:
    """Gamma_r(beta) = pi^{iota r (r-1)/4} prod_{k<r} Gamma(beta - iota k/2).

    r = 0 gives the empty product 1.
    """
    if r == 0:
        return 1.0 + 0.0j
    for k in range(r):
        bad, n = _is_nonpositive_integer(complex(beta) - iota * k / 2.0)
        if bad:
            raise PoleHit(f"Gamma_r factor k={k} hits pole at {n}")
    acc = 0.0 + 0.0j
    for k in range(r):
        acc += log_gamma(complex(beta) - iota * k / 2.0)
    acc += (iota * r * (r - 1) / 4.0) * math.log(math.pi)
    return complex(np.exp(acc))


def gamma_r_log(beta, r: int, iota: int) -> complex:
    """log Gamma_r(beta), useful when Gamma_r itself would overflow."""
    if r == 0:
        return 0.0 + 0.0j
    acc = (iota * r * (r - 1) / 4.0) * math.log(math.pi) + 0.0j
    for k in range(r):
        acc += log_gamma(complex(beta) - iota * k / 2.0)
    return acc


def rgamma_r(beta, r: int, iota: int) -> complex:
    """1 / Gamma_r(beta); exactly 0 when any factor sits at a pole."""
    if r == 0:
        return 1.0 + 0.0j
    vals = []
    for k in range(r):
        v = rgamma(complex(beta) - iota * k / 2.0)
        if v == 0.0:
            return 0.0 + 0.0j
        vals.append(v)
    out = math.pi ** (-iota * r * (r - 1) / 4.0) + 0.0j
    for v in vals:
        out *= v
    return out


def gamma_r_logderiv(beta: float, r: int, iota: int) -> float:
    """Gamma_r'(beta) / Gamma_r(beta) = sum_k psi(beta - iota k/2)."""
    return sum(digamma(beta - iota * k / 2.0) for k in range(r))


# --------------------------------------------------------------------------
# truncated Laurent arithmetic

_LEAD_FLOOR = 1e-300


@dataclass
class LaurentValue:
    """Truncated Laurent expansion sum_j coeffs[j] (z - center)^{min_order + j}."""

    center: complex
    min_order: int
    coeffs: list

    def _trimmed(self) -> "LaurentValue":
        c = list(self.coeffs)
        k = self.min_order
        while len(c) > 1 and abs(c[0]) < _LEAD_FLOOR:
            c.pop(0)
            k += 1
        return LaurentValue(self.center, k, c)

    @property
    def order(self) -> int:
        return self._trimmed().min_order

    def __add__(self, other):
        other = _as_laurent(other, self.center, len(self.coeffs))
        lo = min(self.min_order, other.min_order)
        hi = min(self.min_order + len(self.coeffs), other.min_order + len(other.coeffs))
        n = hi - lo
        c = [0j] * n
        for j, v in enumerate(self.coeffs):
            k = self.min_order + j - lo
            if 0 <= k < n:
                c[k] += v
        for j, v in enumerate(other.coeffs):
            k = other.min_order + j - lo
            if 0 <= k < n:
                c[k] += v
        return LaurentValue(self.center, lo, c)

    __radd__ = __add__

    def __neg__(self):
        return LaurentValue(self.center, self.min_order, [-v for v in self.coeffs])

    def __sub__(self, other):
        return self + (-_as_laurent(other, self.center, len(self.coeffs)))

    def __rsub__(self, other):
        return _as_laurent(other, self.center, len(self.coeffs)) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return LaurentValue(self.center, self.min_order,
                                [v * other for v in self.coeffs])
        n = min(len(self.coeffs), len(other.coeffs))
        c = [0j] * n
        for i, vi in enumerate(self.coeffs[:n]):
            for j, vj in enumerate(other.coeffs[: n - i]):
                c[i + j] += vi * vj
        return LaurentValue(self.center, self.min_order + other.min_order, c)

    __rmul__ = __mul__

    def inverse(self):
        t = self._trimmed()
        if not t.coeffs or abs(t.coeffs[0]) < _LEAD_FLOOR:
            raise ZeroDivisionError("leading Laurent coefficient below 1e-300")
        a0 = t.coeffs[0]
        n = len(t.coeffs)
        inv = [1.0 / a0] + [0j] * (n - 1)
        for k in range(1, n):
            s = 0j
            for j in range(1, k + 1):
                if j < n:
                    s += t.coeffs[j] * inv[k - j]
            inv[k] = -s / a0
        return LaurentValue(self.center, -t.min_order, inv)

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return _as_laurent(other, self.center, len(self.coeffs)) * self.inverse()

    def coefficient(self, order: int) -> complex:
        t = self._trimmed()
        j = order - t.min_order
        if 0 <= j < len(t.coeffs):
            return t.coeffs[j]
        return 0j

    def evaluate_at_center(self) -> complex:
        """Value at the center; defined only when no pole part remains."""
        t = self._trimmed()
        if t.min_order < 0:
            raise ArithmeticError(f"pole of order {-t.min_order} at center")
        return t.coefficient(0)


def _as_laurent(x, center, K) -> LaurentValue:
    if isinstance(x, LaurentValue):
        return x
    return LaurentValue(center, 0, [complex(x)] + [0j] * (K - 1))


def laurent_var(center: complex, K: int) -> LaurentValue:
    """The series (z - center) itself, truncated at K + 1 coefficients."""
    return LaurentValue(center, 1, [1.0 + 0j] + [0j] * K)


def laurent_exp(t: LaurentValue) -> LaurentValue:
    """exp of a Taylor-type series (min_order >= 0); constant term allowed."""
    t = t._trimmed()
    if t.min_order < 0:
        raise ArithmeticError("exp of a series with a pole part")
    n = len(t.coeffs) + t.min_order
    a = [0j] * n
    for j, v in enumerate(t.coeffs):
        a[t.min_order + j] = v
    c0 = a[0]
    out = [complex(np.exp(c0))] + [0j] * (n - 1)
    # exp(c0) * exp(sum_{k>=1} a_k e^k), expanded by the recurrence
    # f' = g' f  =>  (k+1) f_{k+1} = sum_{j} (j+1) a_{j+1} f_{k-j}
    for k in range(n - 1):
        s = 0j
        for j in range(k + 1):
            if j + 1 < n:
                s += (j + 1) * a[j + 1] * out[k - j]
        out[k + 1] = s / (k + 1)
    return LaurentValue(t.center, 0, out)


def laurent_log1p_scaled(a: list, center, n) -> LaurentValue:
    """log(1 + sum_{k>=1} a_k e^k) as a Taylor series of length n."""
    # log(1+u) = u - u^2/2 + ...
    u = LaurentValue(center, 0, [0j] + a[1:n])
    acc = LaurentValue(center, 0, [0j] * n)
    term = _as_laurent(1.0, center, n)
    sign = 1.0
    for k in range(1, n):
        term = term * u
        acc = acc + term * (sign / k)
        sign = -sign
    return acc


def _gamma1p_taylor(K: int) -> list:
    """Taylor coefficients of Gamma(1 + e) up to order K."""
    n = K + 1
    # log Gamma(1+e) = -gamma e + sum_{k>=2} (-1)^k zeta(k) e^k / k
    logc = [0j, -EULER_GAMMA]
    for k in range(2, n):
        logc.append(((-1) ** k) * _ZETA[k - 2] / k)
    logser = LaurentValue(0.0, 0, logc[:n] + [0j] * max(0, n - len(logc)))
    return laurent_exp(logser).coeffs[:n]


def laurent_gamma(z0, K: int = 4) -> LaurentValue:
    """Truncated Laurent expansion of Gamma about z0.

    At z0 = -j (integer j >= 0) the expansion starts with
    (-1)^j / (j! (z - z0)); at regular points it is a plain Taylor series.
    """
    if K < 2:
        raise ValueError("K >= 2 required")
    z0 = complex(z0)
    n = K + 2
    g1p = LaurentValue(z0, 0, _gamma1p_taylor(n))
    bad, j = _is_nonpositive_integer(z0)
    eps = laurent_var(z0, n)
    if bad:
        j = -j
        # Gamma(z0 + e) = Gamma(1 + e) / prod_{k=0..j} (e - j + k)
        den = _as_laurent(1.0, z0, n)
        for k in range(j + 1):
            den = den * (eps + (-j + k))
        return (g1p / den)._trimmed()
    # regular point: walk to Re > 0.5 and use Lanczos with series arithmetic
    shift = 0
    while (z0 + shift).real < 0.5 + 1e-9:
        shift += 1
    z = eps + (z0 + shift - 1.0)  # Lanczos argument zz = z - 1
    acc = _as_laurent(_LANCZOS[0], z0, n)
    for k in range(1, len(_LANCZOS)):
        acc = acc + _series_recip(z + k, n) * _LANCZOS[k]
    t = z + (_LANCZOS_G + 0.5)
    logt = _series_log(t, n)
    lg = (z + 0.5) * logt - t + _series_log(acc, n)
    lg = lg + _LN_SQRT_2PI
    val = laurent_exp(lg)
    # divide back the recurrence factors Gamma(z0+e) = Gamma(z0+shift+e)/prod (z0+e+k)
    for k in range(shift):
        val = val / (eps + (z0 + k))
    return val._trimmed()


def _series_recip(t: LaurentValue, n: int) -> LaurentValue:
    return _as_laurent(1.0, t.center, n) / t


def _series_log(t: LaurentValue, n: int) -> LaurentValue:
    """log of a Taylor series with nonzero constant term."""
    t = t._trimmed()
    if t.min_order != 0 or abs(t.coeffs[0]) < _LEAD_FLOOR:
        raise ArithmeticError("log of series with vanishing constant term")
    c0 = t.coeffs[0]
    rest = [v / c0 for v in t.coeffs]
    inner = laurent_log1p_scaled(rest, t.center, n)
    return inner + complex(np.log(c0))


def laurent_gamma_scaled(scale: complex, z0_of_s, K: int = 4) -> LaurentValue:
    """Expansion of s |-> Gamma(scale * s + z0_of_s) about s = 0.

    Built from laurent_gamma at the inner center and rescaling coefficients,
    since (z - z0) = scale * s.
    """
    inner = laurent_gamma(z0_of_s, K)
    coeffs = [c * scale ** (inner.min_order + j) for j, c in enumerate(inner.coeffs)]
    return LaurentValue(0.0, inner.min_order, coeffs)


# --------------------------------------------------------------------------
# discrete case parameters


@dataclass(frozen=True)
class CaseParams:
    """The discrete context threading every archimedean formula.

    case      "orthogonal" (iota = 1) or "unitary" (iota = 2)
    p, q, m   signature and dimension of the ambient space, m = p + q
    r         genus (size of T and y)
    d         degree of the totally real base field
    k_chi     unitary character parity, k_chi = m mod 2 by default
    """

    case: str
    p: int
    q: int
    r: int
    d: int = 1
    k_chi: int | None = None

    def __post_init__(self):
        if self.case not in ("orthogonal", "unitary"):
            raise ValueError("case must be 'orthogonal' or 'unitary'")
        if self.case == "orthogonal" and self.q != 2:
            # geometric uses force q = 2; Whittaker formulas only see m
            pass
        if self.case == "unitary":
            kc = self.k_chi if self.k_chi is not None else self.m % 2
            if (kc - self.m) % 2 != 0:
                raise ValueError("k_chi must have the parity of m")
            object.__setattr__(self, "k_chi", kc)

    @property
    def iota(self) -> int:
        return 1 if self.case == "orthogonal" else 2

    @property
    def m(self) -> int:
        return self.p + self.q

    @property
    def s0(self) -> Fraction:
        if self.case == "orthogonal":
            return Fraction(self.m - self.r - 1, 2)
        return Fraction(self.m - self.r, 2)

    @property
    def kappa(self) -> Fraction:
        return 1 + Fraction(self.iota, 2) * (self.r - 1)

    @property
    def weight(self):
        """Scalar weight l: m/2 (orthogonal) or the pair for the unitary case."""
        if self.case == "orthogonal":
            return Fraction(self.m, 2)
        return (Fraction(self.m + self.k_chi, 2), Fraction(-self.m + self.k_chi, 2))

    def beta_of_s(self, s) -> complex:
        return self.iota * (complex(s) - float(self.s0)) / 2.0

    @classmethod
    def orthogonal(cls, m: int, r: int, d: int = 1, p: int | None = None):
        p_ = m - 2 if p is None else p
        return cls("orthogonal", p_, m - p_, r, d)

    @classmethod
    def unitary(cls, m: int, r: int, d: int = 1, p: int | None = None):
        p_ = m - 1 if p is None else p
        return cls("unitary", p_, m - p_, r, d)


def require_s0_zero(ctx: CaseParams):
    if ctx.s0 != 0:
        raise WrongCenter(f"s0(r) = {ctx.s0} != 0 for this case")
