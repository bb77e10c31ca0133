"""Double-exponential quadrature over cones of positive matrices.

The basic object is the family of moment integrals

    J_M = int_{x > 0} e^{-tr(g x)} det(x+1)^a det(x)^b mono_M(x+1) dx

over the cone of positive definite r x r real-symmetric or complex-Hermitian
matrices, with g positive *diagonal* (callers diagonalize first; the value of
the omega function only depends on the spectrum of g). mono_M is a monomial
in the entries of u = x + 1, indexed by the entry slots of the matrix.

The cone is parametrized by the Cholesky factor x = L L^dagger with positive
diagonal; the Jacobian is the standard one (2^r prod l_ii^{r-i+1} real,
2^r prod l_ii^{2(r-i)+1} complex) and is validated empirically against the
closed form int e^{-tr(gx)} det(x)^{b} dx = Gamma_r(b + kappa) det(g)^{-b-kappa}
in the test suite rather than trusted blindly.

Diagonal Cholesky entries are integrated on (0, inf) with the exp-sinh map
and off-diagonal entries on R with the sinh-sinh map. Every sweep returns
the trapezoid sum at spacing h together with the nested sum at spacing 2h,
whose difference is the error estimate.

Two implementations of the hot node loops exist: a compiled Cython kernel
(_conekernel) and a pure-numpy fallback; the import below picks the compiled
one when available. ARTIFACT_FORCE_FALLBACK=1 forces the numpy path.
"""

from __future__ import annotations

import math
import os

import numpy as np

from .errors import UnsupportedParameters

_TMAX_DEFAULT = 3.3


def de_halfline(n: int, tmax: float = _TMAX_DEFAULT):
    """exp-sinh nodes/weights for int_0^inf f(x) dx; n should be odd."""
    t = np.linspace(-tmax, tmax, n)
    h = t[1] - t[0]
    c = math.pi / 2
    x = np.exp(c * np.sinh(t))
    w = x * (c * np.cosh(t) * h)
    return x, w


def de_line(n: int, tmax: float = _TMAX_DEFAULT):
    """sinh-sinh nodes/weights for int_R f(x) dx; n should be odd."""
    t = np.linspace(-tmax, tmax, n)
    h = t[1] - t[0]
    c = math.pi / 2
    x = np.sinh(c * np.sinh(t))
    w = np.cosh(c * np.sinh(t)) * (c * np.cosh(t) * h)
    return x, w


def entry_slots(field: str, r: int):
    """Moment slot ordering: upper triangle incl. diagonal (real), all (complex)."""
    if field == "real":
        return [(i, j) for i in range(r) for j in range(i, r)]
    return [(i, j) for i in range(r) for j in range(r)]


def _moment_zero_real(r, slots, M):
    exp = {s: e for s, e in zip(slots, M)}
    for i in range(r):
        tot = sum(exp[(min(i, j), max(i, j))] for j in range(r) if j != i)
        if tot % 2 != 0:
            return True
    return False


def _moment_zero_cplx(r, slots, M):
    exp = {s: e for s, e in zip(slots, M)}
    return any(exp[(i, j)] != exp[(j, i)] for i in range(r) for j in range(i + 1, r))


def is_zero_moment(field: str, r: int, M) -> bool:
    """Moments that vanish for diagonal g by sign/phase symmetry of the cone.

    Real case: conjugating x by diag(+-1) flips the sign of a row/column of
    off-diagonal entries, so each row's total off-diagonal exponent must be
    even. Complex case: the phase rotation x -> D x D^* with unitary diagonal
    D kills every moment with e_ij != e_ji.
    """
    slots = entry_slots(field, r)
    if field == "complex":
        return _moment_zero_cplx(r, slots, M)
    return _moment_zero_real(r, slots, M)


def _scales(lam, b_real: float, extra: float):
    lam = np.asarray(lam, dtype=float)
    diag = np.sqrt((max(b_real, 0.0) + extra) / lam)
    off = 1.0 / np.sqrt(lam)
    return diag, off


# --------------------------------------------------------------------------
# numpy reference engines (fallback backend)


def _np_cone_r1(lam, a, b, moments, n, tmax):
    l, wl = de_halfline(n, tmax)
    s = math.sqrt((max(np.real(b), 0.0) + 1.0) / lam[0])
    l = l * s
    wl = wl * s
    x = l * l
    logw = (-lam[0]) * x + np.log(2.0 * l)
    if a != 0:
        logw = logw + a * np.log1p(x)
    if b != 0:
        logw = logw + b * np.log(x)
    base = _exp_clip(logw) * wl
    out, err = {}, {}
    u = x + 1.0
    for M in moments:
        val = base if M[0] == 0 else base * u ** M[0]
        out[M] = val.sum()
        err[M] = abs(out[M] - 2.0 * val[::2].sum())
    return out, err


def _exp_clip(logw):
    re = np.real(logw)
    re = np.clip(re, -745.0, 700.0)
    if np.iscomplexobj(logw):
        return np.exp(re + 1j * np.imag(logw))
    return np.exp(re)


def _np_cone_r2_real(lam, a, b, moments, n, tmax):
    l1, w1 = de_halfline(n, tmax)
    l2, w2 = de_halfline(n, tmax)
    wm, wwm = de_line(n, tmax)
    (s1, s2), (_, soff) = _scales(lam, np.real(b), 1.5)
    l1 = l1 * s1; w1 = w1 * s1
    l2 = l2 * s2; w2 = w2 * s2
    wm = wm * soff; wwm = wwm * soff
    L1 = l1[:, None, None]
    WM = wm[None, :, None]
    L2 = l2[None, None, :]
    x00 = L1 * L1
    x01 = L1 * WM
    x11 = WM * WM + L2 * L2
    detx = (L1 * L2) ** 2
    detx1 = detx + x00 + x11 + 1.0  # det(x+1), all terms nonnegative
    logw = -(lam[0] * x00 + lam[1] * x11) + np.log(4.0 * L1 * L1 * L2)
    if a != 0:
        logw = logw + a * np.log(detx1)
    if b != 0:
        logw = logw + b * np.log(detx)
    base = _exp_clip(logw) * (w1[:, None, None] * wwm[None, :, None] * w2[None, None, :])
    u00 = x00 + 1.0
    u11 = x11 + 1.0
    out, err = {}, {}
    for M in moments:
        e00, e01, e11 = M
        if e01 % 2 == 1:
            out[M] = 0.0
            err[M] = 0.0
            continue
        val = base
        if e00:
            val = val * u00 ** e00
        if e01:
            val = val * x01 ** e01
        if e11:
            val = val * u11 ** e11
        tot = val.sum()
        coarse = 8.0 * val[::2, ::2, ::2].sum()
        out[M] = tot
        err[M] = abs(tot - coarse)
    return out, err


def _np_cone_r2_cplx(lam, a, b, moments, n, tmax):
    # polar off-diagonal: x01 = l1 (u - iv); only |x01|^2 powers survive for
    # diagonal g, so the phase integrates to 2 pi and the grid is 3-d.
    l1, w1 = de_halfline(n, tmax)
    l2, w2 = de_halfline(n, tmax)
    rho, wr = de_halfline(n, tmax)
    (s1, s2), (_, soff) = _scales(lam, np.real(b), 2.0)
    l1 = l1 * s1; w1 = w1 * s1
    l2 = l2 * s2; w2 = w2 * s2
    rho = rho * soff; wr = wr * soff
    L1 = l1[:, None, None]
    R = rho[None, :, None]
    L2 = l2[None, None, :]
    x00 = L1 * L1
    x11 = R * R + L2 * L2
    detx = (L1 * L2) ** 2
    detx1 = detx + x00 + x11 + 1.0
    logw = -(lam[0] * x00 + lam[1] * x11) + np.log(2.0 * math.pi * 4.0 * L1 ** 3 * L2 * R)
    if a != 0:
        logw = logw + a * np.log(detx1)
    if b != 0:
        logw = logw + b * np.log(detx)
    base = _exp_clip(logw) * (w1[:, None, None] * wr[None, :, None] * w2[None, None, :])
    u00 = x00 + 1.0
    u11 = x11 + 1.0
    q2 = (L1 * R) ** 2  # |x01|^2
    out, err = {}, {}
    for M in moments:
        e00, e01, e10, e11 = M
        if e01 != e10:
            out[M] = 0.0
            err[M] = 0.0
            continue
        val = base
        if e00:
            val = val * u00 ** e00
        if e01:
            val = val * q2 ** e01
        if e11:
            val = val * u11 ** e11
        tot = val.sum()
        coarse = 8.0 * val[::2, ::2, ::2].sum()
        out[M] = tot
        err[M] = abs(tot - coarse)
    return out, err


def _np_cone_r3_real(lam, a, b, moments, n, tmax):
    # 6-d grid (l00, l10, l11, l20, l21, l22), chunked over the first axis.
    ld, wd = de_halfline(n, tmax)
    lo, wo = de_line(n, tmax)
    (sd0, sd1, sd2), (_, _, _) = _scales(lam, np.real(b), 2.0)
    off1 = 1.0 / math.sqrt(lam[1])
    off2 = 1.0 / math.sqrt(lam[2])
    axes = [
        (ld * sd0, wd * sd0),       # l00
        (lo * off1, wo * off1),     # l10
        (ld * sd1, wd * sd1),       # l11
        (lo * off2, wo * off2),     # l20
        (lo * off2, wo * off2),     # l21
        (ld * sd2, wd * sd2),       # l22
    ]
    slots = entry_slots("real", 3)
    live = [M for M in moments if not _moment_zero_real(3, slots, M)]
    out = {M: 0.0 for M in moments}
    coarse = {M: 0.0 for M in moments}
    err = {M: 0.0 for M in moments}
    a00, w00 = axes[0]
    A10, W10 = axes[1][0][:, None, None, None, None], axes[1][1][:, None, None, None, None]
    A11, W11 = axes[2][0][None, :, None, None, None], axes[2][1][None, :, None, None, None]
    A20, W20 = axes[3][0][None, None, :, None, None], axes[3][1][None, None, :, None, None]
    A21, W21 = axes[4][0][None, None, None, :, None], axes[4][1][None, None, None, :, None]
    A22, W22 = axes[5][0][None, None, None, None, :], axes[5][1][None, None, None, None, :]
    wprod5 = W10 * W11 * W20 * W21 * W22
    for i0 in range(n):
        L00 = a00[i0]
        x00 = L00 * L00
        x01 = L00 * A10
        x02 = L00 * A20
        x11 = A10 ** 2 + A11 ** 2
        x12 = A10 * A20 + A11 * A21
        x22 = A20 ** 2 + A21 ** 2 + A22 ** 2
        detx = (L00 * A11 * A22) ** 2
        # det(x+1) = detx + sum 2x2 principal minors + tr + 1, via Cauchy-Binet
        m01 = (L00 * A11) ** 2
        m02 = (L00 * A21) ** 2 + (L00 * A22) ** 2
        m12 = (A10 * A21 - A11 * A20) ** 2 + (A10 * A22) ** 2 + (A11 * A22) ** 2
        detx1 = detx + m01 + m02 + m12 + x00 + x11 + x22 + 1.0
        logw = -(lam[0] * x00 + lam[1] * x11 + lam[2] * x22) + np.log(
            8.0 * L00 ** 3 * A11 ** 2 * A22
        )
        if a != 0:
            logw = logw + a * np.log(detx1)
        if b != 0:
            logw = logw + b * np.log(detx)
        base = _exp_clip(logw) * wprod5 * w00[i0]
        uents = {
            (0, 0): x00 + 1.0, (0, 1): x01, (0, 2): x02,
            (1, 1): x11 + 1.0, (1, 2): x12, (2, 2): x22 + 1.0,
        }
        for M in live:
            val = base
            for s, e in zip(slots, M):
                if e:
                    val = val * uents[s] ** e
            tot = val.sum()
            out[M] += tot
            if i0 % 2 == 0:
                coarse[M] += 2.0 * 32.0 * val[::2, ::2, ::2, ::2, ::2].sum()
    for M in live:
        err[M] = abs(out[M] - coarse[M])
    return out, err


# --------------------------------------------------------------------------
# backend selection

_FORCE_FALLBACK = os.environ.get("ARTIFACT_FORCE_FALLBACK", "") == "1"
try:  # pragma: no cover - exercised implicitly by the backend in use
    if _FORCE_FALLBACK:
        raise ImportError
    from . import _conekernel  # type: ignore

    BACKEND = "cython"
except ImportError:
    _conekernel = None
    BACKEND = "numpy"


def _kernel_cone_r2_real(lam, a, b, moments, n, tmax):
    l1, w1 = de_halfline(n, tmax)
    lo, wo = de_line(n, tmax)
    (s1, s2), (_, soff) = _scales(lam, np.real(b), 1.5)
    momarr = np.array(moments, dtype=np.int64)
    zero = np.array([1 if M[1] % 2 == 1 else 0 for M in moments], dtype=np.int64)
    vals, coarse = _conekernel.cone2_real(
        l1 * s1, w1 * s1, lo * soff, wo * soff, l1 * s2, w1 * s2,
        float(lam[0]), float(lam[1]), complex(a), complex(b), momarr, zero)
    out = {M: vals[i] for i, M in enumerate(moments)}
    err = {M: abs(vals[i] - coarse[i]) if not zero[i] else 0.0 for i, M in enumerate(moments)}
    return out, err


def _kernel_cone_r2_cplx(lam, a, b, moments, n, tmax):
    l1, w1 = de_halfline(n, tmax)
    (s1, s2), (_, soff) = _scales(lam, np.real(b), 2.0)
    momarr = np.array(moments, dtype=np.int64)
    zero = np.array([1 if M[1] != M[2] else 0 for M in moments], dtype=np.int64)
    vals, coarse = _conekernel.cone2_cplx(
        l1 * s1, w1 * s1, l1 * soff, w1 * soff, l1 * s2, w1 * s2,
        float(lam[0]), float(lam[1]), complex(a), complex(b), momarr, zero)
    out = {M: vals[i] for i, M in enumerate(moments)}
    err = {M: abs(vals[i] - coarse[i]) if not zero[i] else 0.0 for i, M in enumerate(moments)}
    return out, err


def cone_moments(field: str, r: int, lam, a, b, moments, n: int, tmax: float = _TMAX_DEFAULT):
    """Moment integrals J_M for diagonal positive g = diag(lam).

    Returns (values, error_estimates) as dicts keyed by the moment tuples.
    Exponents a (on det(x+1)) and b (on det(x)) may be complex; convergence
    requires Re(b) > -1 through the cone boundary, which callers guarantee.
    """
    lam = [float(v) for v in lam]
    if any(v <= 0 for v in lam):
        raise ValueError("cone_moments needs positive diagonal g")
    if n % 2 == 0:
        n += 1  # odd node count keeps the nested coarse grid aligned
    moments = [tuple(int(e) for e in M) for M in moments]
    if field == "complex" and r == 1:
        field = "real"  # the r = 1 cone is (0, inf) either way
    if r == 1:
        return _np_cone_r1(lam, a, b, moments, n, tmax)
    if r == 2 and field == "real":
        if _conekernel is not None:
            return _kernel_cone_r2_real(lam, a, b, moments, n, tmax)
        return _np_cone_r2_real(lam, a, b, moments, n, tmax)
    if r == 2 and field == "complex":
        if _conekernel is not None:
            return _kernel_cone_r2_cplx(lam, a, b, moments, n, tmax)
        return _np_cone_r2_cplx(lam, a, b, moments, n, tmax)
    if r == 3 and field == "real":
        return _np_cone_r3_real(lam, a, b, moments, n, tmax)
    raise UnsupportedParameters(
        f"cone quadrature not implemented for r={r}, field={field} "
        "(r=3 hermitian needs a 9-dimensional grid)")
