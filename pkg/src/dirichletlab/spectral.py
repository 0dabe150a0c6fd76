"""Eigensolves and spectral audits for assembled operator meshes.

Eigenfunctions are orthonormal in the weighted inner product and carry a
fixed sign convention (nonnegative weighted mean, ties broken by the first
node value), so the integral coefficients c_n = sum phi_n * w are stable
across runs and platforms.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spl

from .discrete import OperatorMesh

DENSE_CUTOFF = 2000
TOL_GAP = 1e-6  # relative multiplicity-clustering tolerance
RESIDUAL_TOL = 1e-8


class SolveError(RuntimeError):
    def __init__(self, msg: str, residuals=None):
        super().__init__(msg)
        self.residuals = residuals


@dataclass(frozen=True)
class SpectralData:
    eigenvalues: np.ndarray  # ascending
    eigenfunctions: np.ndarray  # (k, m), rows W-orthonormal
    coefficients: np.ndarray  # c_n = <phi_n, 1>_w
    mesh: OperatorMesh
    k: int
    residuals: np.ndarray

    def sup_norms(self) -> np.ndarray:
        return np.abs(self.eigenfunctions).max(axis=1)


def _sign_fix(phi: np.ndarray, weights: np.ndarray) -> np.ndarray:
    mean = phi @ weights
    if abs(mean) > 1e-12 * np.abs(phi).max():
        return phi if mean > 0 else -phi
    nz = np.nonzero(np.abs(phi) > 1e-12 * np.abs(phi).max())[0]
    if nz.size and phi[nz[0]] < 0:
        return -phi
    return phi


def eigensolve(mesh: OperatorMesh, k: int, dense_cutoff: int = DENSE_CUTOFF) -> SpectralData:
    """k smallest eigenpairs of the mesh operator.

    Dense symmetric solve below ``dense_cutoff`` nodes, otherwise
    shift-invert Lanczos with a fixed starting vector (deterministic).
    """
    m = mesh.size
    if not 1 <= k <= m:
        raise ValueError(f"k={k} out of range for mesh of size {m}")
    s = mesh.sym_matrix()
    w = mesh.weights
    if m <= dense_cutoff:
        lam, psi = scipy.linalg.eigh(s.toarray())
        lam, psi = lam[:k], psi[:, :k]
    else:
        v0 = np.cos(np.arange(m) * 0.7) + 1.0  # fixed, nonzero start vector
        try:
            lam, psi = spl.eigsh(s, k=k, sigma=0.0, which="LM", v0=v0)
        except spl.ArpackNoConvergence as exc:
            raise SolveError(f"eigensolver failed to converge: {exc}") from exc
        order = np.argsort(lam)
        lam, psi = lam[order], psi[:, order]
    sqrt_w = np.sqrt(w)
    phis = np.empty((k, m))
    for i in range(k):
        phi = psi[:, i] / sqrt_w
        nrm = float(np.sqrt((phi * phi) @ w))
        phis[i] = _sign_fix(phi / nrm, w)
    lam = np.maximum(lam, 0.0)
    coeff = phis @ w
    residuals = np.array(
        [
            _wnorm(mesh.matrix @ phis[i] - lam[i] * phis[i], w)
            for i in range(k)
        ]
    )
    bad = residuals > RESIDUAL_TOL * np.maximum(lam, 1e-30)
    if bad.any():
        raise SolveError(
            f"eigenpair residuals exceed tolerance: {residuals[bad]}",
            residuals=residuals,
        )
    return SpectralData(
        eigenvalues=lam,
        eigenfunctions=phis,
        coefficients=coeff,
        mesh=mesh,
        k=k,
        residuals=residuals,
    )


def _wnorm(v: np.ndarray, w: np.ndarray) -> float:
    return float(np.sqrt((v * v) @ w))


# ---------------------------------------------------------------------------
# audits


@dataclass(frozen=True)
class GroundStateReport:
    simple: bool
    gap: float
    positive_after_sign_fix: bool
    min_abs_interior: float
    min_value: float


def ground_state_audit(sd: SpectralData) -> GroundStateReport:
    """Simplicity and positivity of the ground state.

    ``simple`` requires a relative gap above TOL_GAP; positivity allows a
    -1e-8 * sup-norm slack for discretization noise."""
    if sd.k < 2:
        raise ValueError("audit needs at least two eigenpairs")
    lam1, lam2 = float(sd.eigenvalues[0]), float(sd.eigenvalues[1])
    phi1 = sd.eigenfunctions[0]
    sup = float(np.abs(phi1).max())
    mn = float(phi1.min())
    return GroundStateReport(
        simple=(lam2 - lam1) > TOL_GAP * lam1,
        gap=lam2 - lam1,
        positive_after_sign_fix=mn > -1e-8 * sup,
        min_abs_interior=float(np.abs(phi1).min()),
        min_value=mn,
    )


def multiplicity_cluster(sd: SpectralData) -> int:
    """Number of computed eigenvalues within relative TOL_GAP of the first."""
    lam = sd.eigenvalues
    return int(np.sum(lam - lam[0] <= TOL_GAP * max(lam[0], 1e-300)))


@dataclass(frozen=True)
class ExpansionValue:
    value: float
    tail_bound: float
    truncation_warning: bool


def dirichlet_kernel_expansion(sd: SpectralData, t: float, p: int, q: int) -> ExpansionValue:
    """Truncated eigenfunction expansion of the killed kernel at two nodes.

    The tail is controlled by the crude bound (m - k) B^2 e^(-lam_k t) with
    B the largest computed sup norm; a warning flags t too small for the
    truncation to be trustworthy (tail above 10% of the partial sum).
    """
    if t <= 0:
        raise ValueError("time must be positive")
    lam = sd.eigenvalues
    val = float(np.sum(np.exp(-lam * t) * sd.eigenfunctions[:, p] * sd.eigenfunctions[:, q]))
    b = float(sd.sup_norms().max())
    tail = (sd.mesh.size - sd.k) * b * b * float(np.exp(-lam[-1] * t))
    warn = tail > 0.1 * abs(val) if val != 0.0 else tail > 0.0
    return ExpansionValue(value=val, tail_bound=tail, truncation_warning=warn)


@dataclass(frozen=True)
class SurvivalValue:
    value: float
    raw: float
    clipped: bool


def survival_series(sd: SpectralData, t: float, p: int) -> SurvivalValue:
    """Series value of the no-exit probability from node p at horizon t."""
    if t <= 0:
        raise ValueError("time must be positive")
    raw = float(
        np.sum(np.exp(-sd.eigenvalues * t) * sd.coefficients * sd.eigenfunctions[:, p])
    )
    val = min(1.0, max(0.0, raw))
    return SurvivalValue(value=val, raw=raw, clipped=val != raw)


def heat_content_series(sd: SpectralData, t: float) -> tuple[float, float]:
    """(Q(t), asymptote): Q(t) = sum e^(-lam_n t) c_n^2 and the large-time
    limit of e^(lam_1 t) Q(t), summing c_n^2 over the lam_1 cluster."""
    if t <= 0:
        raise ValueError("time must be positive")
    c2 = sd.coefficients**2
    q = float(np.sum(np.exp(-sd.eigenvalues * t) * c2))
    m1 = multiplicity_cluster(sd)
    return q, float(np.sum(c2[:m1]))


def lp_bound_audit(sd: SpectralData, bound) -> list[dict]:
    """Per-eigenfunction sup/L1 norm audit against the envelope constants.

    Assumes the supplied kernel bound dominates the mesh's true kernel;
    failures are recorded, not raised.
    """
    from .kernels import lambda_envelope_constant

    mu = sd.mesh.volume()
    w = sd.mesh.weights
    out = []
    for n in range(sd.k):
        lam = float(sd.eigenvalues[n])
        phi = sd.eigenfunctions[n]
        c_lam = lambda_envelope_constant(bound, lam)
        sup = float(np.abs(phi).max())
        l1 = float(np.abs(phi) @ w)
        bound_sup = mu**0.5 * c_lam
        bound_l1 = mu**2.5 * c_lam**2
        out.append(
            {
                "n": n + 1,
                "lambda": lam,
                "sup_norm": sup,
                "l1_norm": l1,
                "envelope_constant": c_lam,
                "sup_bound": bound_sup,
                "l1_bound": bound_l1,
                "l2_lower_ok": mu * c_lam >= 1.0,
                "sup_ok": sup <= bound_sup,
                "l1_ok": l1 <= bound_l1,
            }
        )
    return out


# ---------------------------------------------------------------------------
# dense propagator (for small meshes; used by factorization and positivity
# audits)


def dense_propagator(mesh: OperatorMesh, t: float) -> np.ndarray:
    """e^(-M t) as a dense matrix acting on node vectors."""
    s = mesh.sym_matrix().toarray()
    lam, psi = scipy.linalg.eigh(s)
    lam = np.maximum(lam, 0.0)
    core = (psi * np.exp(-lam * t)) @ psi.T
    sq = np.sqrt(mesh.weights)
    return (core * sq[None, :]) / sq[:, None]


def kernel_matrix(mesh: OperatorMesh, t: float) -> np.ndarray:
    """Discrete killed kernel values k(i,j) with e^(-Mt) = k * diag(w)."""
    return dense_propagator(mesh, t) / mesh.weights[None, :]


# ---------------------------------------------------------------------------
# serialization


def spectral_to_json(sd: SpectralData) -> str:
    payload = {
        "k": sd.k,
        "eigenvalues": [float(v) for v in sd.eigenvalues],
        "coefficients": [float(v) for v in sd.coefficients],
        "residuals": [float(v) for v in sd.residuals],
        "volume": sd.mesh.volume(),
        "nodes": sd.mesh.size,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


_VEC_MAGIC = b"DLABVEC1"


def save_eigenfunctions(sd: SpectralData, path: str) -> None:
    """Binary layout: 8-byte magic, uint64 k, uint64 m (little endian), then
    k rows of m little-endian float64 values."""
    with open(path, "wb") as f:
        f.write(_VEC_MAGIC)
        f.write(struct.pack("<QQ", sd.k, sd.mesh.size))
        f.write(sd.eigenfunctions.astype("<f8").tobytes(order="C"))


def load_eigenfunctions(path: str) -> np.ndarray:
    with open(path, "rb") as f:
        magic = f.read(8)
        if magic != _VEC_MAGIC:
            raise ValueError("not an eigenfunction file")
        k, m = struct.unpack("<QQ", f.read(16))
        data = np.frombuffer(f.read(8 * k * m), dtype="<f8")
    return data.reshape(k, m).copy()
