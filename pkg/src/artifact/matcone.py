"""Small dense symmetric/Hermitian matrix algebra (r <= 4).

Everything here feeds the Whittaker-function formulas: eigenvalues of
y^{1/2} T y^{1/2} and the derived quantities delta_+, delta_-, tau_-, mu_min,
det'. The eigensolver is a cyclic Jacobi sweep, which is simple and fully
adequate at these sizes; complex-Hermitian input is handled through the
2r x 2r real embedding [[X, -Y], [Y, X]] followed by eigenvalue
deduplication, so no complex rotations are needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonSelfAdjoint, NotPositiveDefinite

SYM_TOL = 1e-14          # relative self-adjointness tolerance
JACOBI_MAX_SWEEPS = 50
RANK_TOL_DEFAULT = 1e-10


@dataclass(frozen=True)
class ConeMatrix:
    """A real-symmetric or complex-Hermitian r x r matrix with its field tag.

    The entries are validated against their own (conjugate-)transpose on
    construction; arrays are copied and never mutated afterwards.
    """

    entries: np.ndarray
    field_tag: str  # "real-symmetric" | "complex-hermitian"
    r: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("ConeMatrix needs a square array")
        if a.shape[0] > 4:
            raise ValueError("r > 4 is out of scope")
        if self.field_tag not in ("real-symmetric", "complex-hermitian"):
            raise ValueError(f"unknown field_tag {self.field_tag!r}")
        dtype = float if self.field_tag == "real-symmetric" else complex
        a = a.astype(dtype)
        scale = max(np.abs(a).max(), 1.0)
        if np.abs(a - a.conj().T).max() > SYM_TOL * scale * 10:
            raise NonSelfAdjoint("entries differ from their conjugate transpose")
        a = 0.5 * (a + a.conj().T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "r", a.shape[0])

    @classmethod
    def real(cls, a) -> "ConeMatrix":
        return cls(np.asarray(a, dtype=float), "real-symmetric")

    @classmethod
    def hermitian(cls, a) -> "ConeMatrix":
        return cls(np.asarray(a, dtype=complex), "complex-hermitian")

    @property
    def is_complex(self) -> bool:
        return self.field_tag == "complex-hermitian"

    def to_json(self):
        """Rows of scalars; complex scalars as [re, im] pairs."""
        if self.is_complex:
            return [[[float(z.real), float(z.imag)] for z in row] for row in self.entries]
        return [[float(x) for x in row] for row in self.entries]

    @classmethod
    def from_json(cls, rows, field_tag="real-symmetric"):
        if field_tag == "complex-hermitian":
            a = np.array([[complex(c[0], c[1]) for c in row] for row in rows])
            return cls.hermitian(a)
        return cls.real(np.array(rows, dtype=float))


@dataclass(frozen=True)
class MuSpectrum:
    """Eigenvalue data of y^{1/2} T y^{1/2} and the derived constants."""

    mu: tuple
    delta_plus: float
    delta_minus: float
    tau_minus: float
    mu_min: float
    det_prime: float
    n_zero: int


def _jacobi_sym(a: np.ndarray, collect_offdiags=None):
    """Cyclic Jacobi on a real symmetric matrix.

    Returns (eigenvalues ascending, eigenvector columns). The rotation
    threshold is 1e-14 * ||A||_F and at most 50 sweeps are performed.
    """
    n = a.shape[0]
    A = a.copy()
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return np.zeros(n), V
    thresh = 1e-14 * norm
    for _ in range(JACOBI_MAX_SWEEPS):
        off = np.sqrt(sum(A[p, q] ** 2 for p in range(n) for q in range(p + 1, n)) * 2.0)
        if collect_offdiags is not None:
            collect_offdiags.append(off)
        if off <= thresh:
            break
        for p in range(n):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= thresh / (n * n):
                    continue
                theta = 0.5 * (A[q, q] - A[p, p]) / apq
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                A = J.T @ A @ J
                V = V @ J
    w = np.diag(A).copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def eigen_sym_herm(A: ConeMatrix):
    """Eigen-decomposition; eigenvalues ascending, orthonormal eigenvectors.

    Complex-Hermitian matrices go through the real embedding; each eigenvalue
    of A appears twice there and the duplicates are collapsed.
    """
    a = A.entries
    if not A.is_complex:
        w, v = _jacobi_sym(np.asarray(a, dtype=float))
        return w, v
    X = a.real
    Y = a.imag
    n = A.r
    M = np.block([[X, -Y], [Y, X]])
    w2, v2 = _jacobi_sym(M)
    # duplicates are adjacent after sorting; keep every other one
    w = w2[::2].copy()
    vecs = np.zeros((n, n), dtype=complex)
    used = 0
    k = 0
    while k < 2 * n and used < n:
        lam = w2[k]
        # cluster of embedding eigenvalues equal to lam within tolerance
        j = k
        tol = 1e-12 * max(1.0, abs(lam))
        while j < 2 * n and abs(w2[j] - lam) <= tol + 1e-13 * np.linalg.norm(a):
            j += 1
        count = j - k  # = 2 * multiplicity in A
        mult = count // 2
        cand = [v2[:n, i] + 1j * v2[n:, i] for i in range(k, j)]
        picked = []
        for z in cand:
            for p in picked:
                z = z - p * np.vdot(p, z)
            nz = np.linalg.norm(z)
            if nz > 1e-8:
                picked.append(z / nz)
            if len(picked) == mult:
                break
        for z in picked:
            vecs[:, used] = z
            used += 1
        k = j
    order = np.argsort(w)
    return w[order], vecs  # columns already grouped in ascending order


def jacobi_offdiag_history(A: ConeMatrix):
    """Off-diagonal Frobenius norm per sweep (monotone decrease check)."""
    hist = []
    a = A.entries
    if A.is_complex:
        X, Y = a.real, a.imag
        m = np.block([[X, -Y], [Y, X]])
    else:
        m = np.asarray(a, dtype=float)
    _jacobi_sym(m, collect_offdiags=hist)
    return hist


def cholesky_pd(A: ConeMatrix) -> np.ndarray:
    """Lower-triangular L with A = L L^dagger; raises on a nonpositive pivot."""
    a = A.entries
    n = A.r
    L = np.zeros_like(np.asarray(a, dtype=complex if A.is_complex else float))
    for j in range(n):
        s = a[j, j] - np.sum(np.abs(L[j, :j]) ** 2)
        s = float(np.real(s))
        if s <= 0.0:
            raise NotPositiveDefinite(f"pivot {j} is {s:.3e}")
        L[j, j] = np.sqrt(s)
        for i in range(j + 1, n):
            L[i, j] = (a[i, j] - L[i, :j] @ L[j, :j].conj()) / L[j, j]
    return L


def pd_sqrt(A: ConeMatrix) -> ConeMatrix:
    """Self-adjoint positive square root via the spectral decomposition."""
    w, v = eigen_sym_herm(A)
    if w[0] <= 0.0:
        raise NotPositiveDefinite(f"least eigenvalue {w[0]:.3e}")
    root = (v * np.sqrt(w)) @ v.conj().T
    if A.is_complex:
        return ConeMatrix.hermitian(root)
    return ConeMatrix.real(root.real)


def mu_spectrum(y: ConeMatrix, T: ConeMatrix, tol: float = RANK_TOL_DEFAULT) -> MuSpectrum:
    """Eigenvalues mu_i of y^{1/2} T y^{1/2} and their derived constants.

    An eigenvalue counts as zero iff |mu| <= tol * max|mu|. The tolerance is
    a parameter because numerical rank is a judgement call.
    """
    if not (0.0 < tol <= 1e-6):
        raise ValueError("tol must lie in (0, 1e-6]")
    yhalf = pd_sqrt(y).entries
    m = yhalf @ T.entries @ yhalf
    cm = ConeMatrix(m, T.field_tag)
    w, _ = eigen_sym_herm(cm)
    mu = np.real(w)
    big = np.abs(mu).max() if mu.size else 0.0
    zero_cut = tol * big if big > 0 else 0.0
    nonzero = mu[np.abs(mu) > zero_cut]
    pos = nonzero[nonzero > 0]
    neg = nonzero[nonzero < 0]
    return MuSpectrum(
        mu=tuple(float(x) for x in mu),
        delta_plus=float(np.prod(pos)) if pos.size else 1.0,
        delta_minus=float(np.prod(np.abs(neg))) if neg.size else 1.0,
        tau_minus=float(np.sum(np.abs(neg))) if neg.size else 0.0,
        mu_min=float(np.abs(nonzero).min()) if nonzero.size else 0.0,
        det_prime=float(np.prod(nonzero)) if nonzero.size else 1.0,
        n_zero=int(mu.size - nonzero.size),
    )


def signature(T: ConeMatrix, tol: float = RANK_TOL_DEFAULT):
    """(n_positive, n_negative) eigenvalue counts of T at the given tolerance."""
    w, _ = eigen_sym_herm(T)
    w = np.real(w)
    big = np.abs(w).max() if w.size else 0.0
    cut = tol * big if big > 0 else 0.0
    return int(np.sum(w > cut)), int(np.sum(w < -cut))
