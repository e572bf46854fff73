"""Pointwise algebraic curvature estimates in general dimension n >= 3.

Everything here works on frame components at a single point: symmetric
matrices for 2-tensors, 4-index arrays with curvature symmetries for the
curvature tensor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import ContractViolation, DomainError

_SYM_TOL = 1e-10


@dataclass
class PointwiseTensor:
    """Symmetric n x n matrix of frame components at a point."""

    matrix: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=float)
        n = self.matrix.shape[0]
        if self.matrix.shape != (n, n) or n < 3:
            raise DomainError("PointwiseTensor needs a square matrix, n >= 3")
        if np.max(np.abs(self.matrix - self.matrix.T)) > _SYM_TOL * max(1.0, np.max(np.abs(self.matrix))):
            raise ContractViolation("tensor frame matrix must be symmetric")
        self.matrix = 0.5 * (self.matrix + self.matrix.T)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def trace(self) -> float:
        return float(np.trace(self.matrix))


def constant_curvature_tensor(n: int, kappa: float) -> np.ndarray:
    """Rm^kappa[a,b,c,d] = kappa (delta_bc delta_ad - delta_ac delta_bd)."""
    eye = np.eye(n)
    return kappa * (np.einsum("bc,ad->abcd", eye, eye) - np.einsum("ac,bd->abcd", eye, eye))


def check_curvature_symmetries(rm: np.ndarray, tol: float = 1e-9) -> None:
    scale = max(1.0, float(np.max(np.abs(rm))))
    if np.max(np.abs(rm + np.swapaxes(rm, 0, 1))) > tol * scale:
        raise ContractViolation("curvature tensor not antisymmetric in the first pair")
    if np.max(np.abs(rm + np.swapaxes(rm, 2, 3))) > tol * scale:
        raise ContractViolation("curvature tensor not antisymmetric in the second pair")
    if np.max(np.abs(rm - np.transpose(rm, (2, 3, 0, 1)))) > tol * scale:
        raise ContractViolation("curvature tensor not symmetric under pair exchange")
    bianchi = rm + np.transpose(rm, (0, 2, 3, 1)) + np.transpose(rm, (0, 3, 1, 2))
    if np.max(np.abs(bianchi)) > tol * scale:
        raise ContractViolation("curvature tensor violates the first Bianchi identity")


def random_curvature_tensor(n: int, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random array with all algebraic curvature symmetries."""
    raw = rng.normal(size=(n, n, n, n)) * scale
    rm = raw - np.swapaxes(raw, 0, 1)
    rm = rm - np.swapaxes(rm, 2, 3)
    rm = rm + np.transpose(rm, (2, 3, 0, 1))
    # remove the totally antisymmetric part so the first Bianchi identity holds
    cyc = rm + np.transpose(rm, (0, 2, 3, 1)) + np.transpose(rm, (0, 3, 1, 2))
    return rm - cyc / 3.0


def ricci_of_curvature(rm: np.ndarray) -> np.ndarray:
    """Ric[i,j] = sum_k Rm[i,k,k,j]."""
    return np.einsum("ikkj->ij", rm)


def weitzenboeck(h, riemann: np.ndarray, check: bool = True) -> PointwiseTensor:
    """Ric(h)(x,y) = h(Ric x, y) + h(x, Ric y) - 2 tr h(., R(., x) y)."""
    hm = h.matrix if isinstance(h, PointwiseTensor) else PointwiseTensor(np.asarray(h)).matrix
    if check:
        check_curvature_symmetries(riemann)
    ric = ricci_of_curvature(riemann)
    out = ric @ hm + hm @ ric - 2 * np.einsum("kl,kijl->ij", hm, riemann)
    return PointwiseTensor(0.5 * (out + out.T))


def weitzenboeck_pairing(h, riemann: np.ndarray, check: bool = False) -> float:
    """<Ric(h), h> as a frame inner product."""
    hm = h.matrix if isinstance(h, PointwiseTensor) else np.asarray(h)
    w = weitzenboeck(hm, riemann, check=check)
    return float(np.sum(w.matrix * hm))


def riemann_deviation(riemann: np.ndarray, kappa: float) -> float:
    """|Rm - Rm^kappa| (Frobenius norm of the 4-tensor)."""
    n = riemann.shape[0]
    return float(np.linalg.norm((riemann - constant_curvature_tensor(n, kappa)).ravel()))


def ric_pairing_bound(h, riemann: np.ndarray, kappa: float):
    """Pointwise curvature estimate: the pairing defect and its bound.

    lhs = |1/2 <Ric(h), h> - kappa (n |h|^2 - tr(h)^2)|,
    rhs = (1 + sqrt(n)) |Rm - Rm^kappa| |h|^2; the contract is lhs <= rhs.
    """
    ht = h if isinstance(h, PointwiseTensor) else PointwiseTensor(np.asarray(h))
    n = ht.n
    pairing = 0.5 * weitzenboeck_pairing(ht, riemann)
    h2 = ht.norm() ** 2
    lhs = abs(pairing - kappa * (n * h2 - ht.trace() ** 2))
    rhs = (1 + np.sqrt(n)) * riemann_deviation(riemann, kappa) * h2
    return lhs, rhs


def weitzenboeck_bruteforce(h, riemann: np.ndarray) -> np.ndarray:
    """Index-loop evaluation of the definition; oracle for the vectorized form."""
    hm = h.matrix if isinstance(h, PointwiseTensor) else np.asarray(h)
    n = hm.shape[0]
    ric = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                ric[i, j] += riemann[i, k, k, j]
    out = np.zeros((n, n))
    for x in range(n):
        for y in range(n):
            s = 0.0
            for k in range(n):
                s += hm[x, k] * ric[k, y] + hm[k, y] * ric[k, x]
            t = 0.0
            for k in range(n):
                for l in range(n):
                    t += hm[k, l] * riemann[k, x, y, l]
            out[x, y] = s - 2 * t
    return out
