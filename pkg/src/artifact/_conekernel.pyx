# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled node loops for the r = 2 cone moment sweeps.

Mirrors the numpy fallbacks in quadrature.py exactly (same nodes, same
integrand, same nested coarse sum); only the loop execution differs. Kept
deliberately small: the 3-d tensor sweeps dominate omega evaluation time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, cos, sin

cnp.import_array()


cdef inline double complex _cpow_base(double re, double im):
    # exp(re + i im) with the real part pre-clipped by the caller
    cdef double m = exp(re)
    return m * cos(im) + 1j * (m * sin(im))


def cone2_real(double[::1] l1, double[::1] w1,
               double[::1] lo, double[::1] wo,
               double[::1] l2, double[::1] w2,
               double lam0, double lam1,
               double complex a, double complex b,
               long[:, ::1] moments, long[::1] zero):
    cdef Py_ssize_t n1 = l1.shape[0], nm = lo.shape[0], n2 = l2.shape[0]
    cdef Py_ssize_t nmom = moments.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(nmom, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] coarse = np.zeros(nmom, dtype=np.complex128)
    cdef double complex[::1] outv = out
    cdef double complex[::1] coav = coarse
    cdef Py_ssize_t i, j, k, t
    cdef double L1, WM, L2v, x00, x01, x11, detx, detx1, lw_re, lw_im, wprod
    cdef double complex base, val
    cdef double ar = a.real, ai = a.imag, br = b.real, bi = b.imag
    cdef bint have_a = (ar != 0.0 or ai != 0.0), have_b = (br != 0.0 or bi != 0.0)
    cdef double ldetx, ldetx1
    cdef long e00, e01, e11
    cdef bint on_coarse
    for i in range(n1):
        L1 = l1[i]
        x00 = L1 * L1
        for j in range(nm):
            WM = lo[j]
            x01 = L1 * WM
            for k in range(n2):
                L2v = l2[k]
                x11 = WM * WM + L2v * L2v
                detx = (L1 * L2v) * (L1 * L2v)
                detx1 = detx + x00 + x11 + 1.0
                lw_re = -(lam0 * x00 + lam1 * x11) + log(4.0 * L1 * L1 * L2v)
                lw_im = 0.0
                if have_a:
                    ldetx1 = log(detx1)
                    lw_re += ar * ldetx1
                    lw_im += ai * ldetx1
                if have_b:
                    ldetx = log(detx)
                    lw_re += br * ldetx
                    lw_im += bi * ldetx
                if lw_re < -745.0:
                    continue
                if lw_re > 700.0:
                    lw_re = 700.0
                wprod = w1[i] * wo[j] * w2[k]
                base = _cpow_base(lw_re, lw_im) * wprod
                on_coarse = (i % 2 == 0) and (j % 2 == 0) and (k % 2 == 0)
                for t in range(nmom):
                    if zero[t]:
                        continue
                    e00 = moments[t, 0]; e01 = moments[t, 1]; e11 = moments[t, 2]
                    val = base
                    val = val * _ipow(x00 + 1.0, e00)
                    val = val * _ipow(x01, e01)
                    val = val * _ipow(x11 + 1.0, e11)
                    outv[t] += val
                    if on_coarse:
                        coav[t] += 8.0 * val
    return out, coarse


def cone2_cplx(double[::1] l1, double[::1] w1,
               double[::1] rho, double[::1] wr,
               double[::1] l2, double[::1] w2,
               double lam0, double lam1,
               double complex a, double complex b,
               long[:, ::1] moments, long[::1] zero):
    cdef Py_ssize_t n1 = l1.shape[0], nr = rho.shape[0], n2 = l2.shape[0]
    cdef Py_ssize_t nmom = moments.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.zeros(nmom, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] coarse = np.zeros(nmom, dtype=np.complex128)
    cdef double complex[::1] outv = out
    cdef double complex[::1] coav = coarse
    cdef Py_ssize_t i, j, k, t
    cdef double L1, R, L2v, x00, x11, q2, detx, detx1, lw_re, lw_im, wprod
    cdef double complex base, val
    cdef double ar = a.real, ai = a.imag, br = b.real, bi = b.imag
    cdef bint have_a = (ar != 0.0 or ai != 0.0), have_b = (br != 0.0 or bi != 0.0)
    cdef double ldetx, ldetx1
    cdef double TWO_PI = 6.283185307179586476925286766559
    cdef long e00, e01, e10, e11
    cdef bint on_coarse
    for i in range(n1):
        L1 = l1[i]
        x00 = L1 * L1
        for j in range(nr):
            R = rho[j]
            q2 = (L1 * R) * (L1 * R)
            for k in range(n2):
                L2v = l2[k]
                x11 = R * R + L2v * L2v
                detx = (L1 * L2v) * (L1 * L2v)
                detx1 = detx + x00 + x11 + 1.0
                lw_re = -(lam0 * x00 + lam1 * x11) + log(TWO_PI * 4.0 * L1 * L1 * L1 * L2v * R)
                lw_im = 0.0
                if have_a:
                    ldetx1 = log(detx1)
                    lw_re += ar * ldetx1
                    lw_im += ai * ldetx1
                if have_b:
                    ldetx = log(detx)
                    lw_re += br * ldetx
                    lw_im += bi * ldetx
                if lw_re < -745.0:
                    continue
                if lw_re > 700.0:
                    lw_re = 700.0
                wprod = w1[i] * wr[j] * w2[k]
                base = _cpow_base(lw_re, lw_im) * wprod
                on_coarse = (i % 2 == 0) and (j % 2 == 0) and (k % 2 == 0)
                for t in range(nmom):
                    if zero[t]:
                        continue
                    e00 = moments[t, 0]; e01 = moments[t, 1]
                    e10 = moments[t, 2]; e11 = moments[t, 3]
                    val = base
                    val = val * _ipow(x00 + 1.0, e00)
                    val = val * _ipow(q2, e01)
                    val = val * _ipow(x11 + 1.0, e11)
                    outv[t] += val
                    if on_coarse:
                        coav[t] += 8.0 * val
    return out, coarse


cdef inline double _ipow(double x, long e):
    cdef double acc = 1.0
    cdef long i
    for i in range(e):
        acc *= x
    return acc
