"""Random-matrix ground truth for the triangle measures: Gaussian Hermitian
and rectangular ensembles over the three ground fields, their nested-corner
and row-block spectra, and the statistical comparison against the exact
chain samplers.

Quaternionic matrices live in the standard per-entry 2x2 complex embedding
q = u + iv + jw + kz -> [[u+iv, w+iz], [-w+iz, u-iv]]; placing the block of
entry (k, l) at rows/cols 2k..2k+1 makes the j-th quaternionic corner the
leading 2j x 2j complex block, and each quaternionic eigenvalue shows up
exactly twice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ShapeError
from .integrands import Family, GroundField, matrix_preset
from .montecarlo import TwoSampleVerdict, default_proposal, two_sample_compare
from .patterns import RayleighTriangle
from .sampler import sample_rows

PAIR_TOL = 1e-8


# ---------------------------------------------------------------------------
# quaternion scalar algebra


@dataclass(frozen=True)
class Quaternion:
    """u + iv + jw + kz with Hamilton's product (ij = k and cyclic)."""

    u: float
    v: float = 0.0
    w: float = 0.0
    z: float = 0.0

    def __add__(self, o: "Quaternion") -> "Quaternion":
        return Quaternion(self.u + o.u, self.v + o.v, self.w + o.w, self.z + o.z)

    def __mul__(self, o: "Quaternion") -> "Quaternion":
        a, b, c, d = self.u, self.v, self.w, self.z
        e, f, g, h = o.u, o.v, o.w, o.z
        return Quaternion(
            a * e - b * f - c * g - d * h,
            a * f + b * e + c * h - d * g,
            a * g - b * h + c * e + d * f,
            a * h + b * g - c * f + d * e,
        )

    def conj(self) -> "Quaternion":
        return Quaternion(self.u, -self.v, -self.w, -self.z)

    def __abs__(self) -> float:
        return math.sqrt(self.u**2 + self.v**2 + self.w**2 + self.z**2)

    def to_block(self) -> np.ndarray:
        """The 2x2 complex embedding."""
        return np.array(
            [
                [self.u + 1j * self.v, self.w + 1j * self.z],
                [-self.w + 1j * self.z, self.u - 1j * self.v],
            ]
        )


# ---------------------------------------------------------------------------
# matrix containers


def _block_size(field: GroundField) -> int:
    return 2 if field.tag == "H" else 1

def _as_matrix(data: np.ndarray, field: GroundField) -> np.ndarray:
    data = np.asarray(data)
    if field.tag == "R":
        if np.iscomplexobj(data):
            raise DomainError("real-field matrix must have real entries")
        return data.astype(float)
    return data.astype(complex)


@dataclass(frozen=True)
class HermitianMatrix:
    """A self-adjoint matrix stored numerically: real symmetric, complex
    Hermitian, or the complex embedding of a quaternionic Hermitian matrix.
    """

    field: GroundField
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_matrix(self.data, self.field))
        d = self.data
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ShapeError("matrix must be square")
        if d.shape[0] % _block_size(self.field):
            raise ShapeError("quaternionic embedding needs even dimension")
        if not np.allclose(d, d.conj().T, atol=1e-12 * max(1.0, np.abs(d).max())):
            raise DomainError("matrix is not Hermitian")

    @property
    def order(self) -> int:
        return self.data.shape[0] // _block_size(self.field)


@dataclass(frozen=True)
class RectMatrix:
    """An n x m matrix with n <= m (quaternionic case stored embedded)."""

    field: GroundField
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", _as_matrix(self.data, self.field))
        if self.data.ndim != 2:
            raise ShapeError("need a 2-d array")
        bs = _block_size(self.field)
        if self.data.shape[0] % bs or self.data.shape[1] % bs:
            raise ShapeError("quaternionic embedding needs even dimensions")
        if self.shape[0] > self.shape[1]:
            raise ShapeError("need rows <= columns")

    @property
    def shape(self) -> tuple[int, int]:
        bs = _block_size(self.field)
        return (self.data.shape[0] // bs, self.data.shape[1] // bs)


# ---------------------------------------------------------------------------
# Gaussian ensembles (batched internals, single-matrix wrappers)


def _embed_blocks(comp: np.ndarray) -> np.ndarray:
    """(..., n, m, 4) quaternion components -> (..., 2n, 2m) complex."""
    u, v, w, z = (comp[..., i] for i in range(4))
    top = np.stack([u + 1j * v, w + 1j * z], axis=-1)
    bot = np.stack([-w + 1j * z, u - 1j * v], axis=-1)
    block = np.stack([top, bot], axis=-2)  # (..., n, m, 2, 2)
    s = block.shape
    return block.transpose(*range(block.ndim - 4), -4, -2, -3, -1).reshape(
        *s[:-4], 2 * s[-4], 2 * s[-3]
    )


def gaussian_hermitian_batch(
    field: GroundField, n: int, psi: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """count draws from the density ~ exp(-psi/2 * tr T^2): diagonal entries
    N(0, 1/psi), each real component of an off-diagonal entry N(0, 1/(2 psi)).
    """
    if not psi > 0:
        raise DomainError("psi must be positive")
    off_sd = 1.0 / math.sqrt(2.0 * psi)
    diag = rng.normal(0.0, 1.0 / math.sqrt(psi), size=(count, n))
    if field.tag == "R":
        g = rng.normal(0.0, off_sd, size=(count, n, n))
        t = np.triu(g, 1)
        mats = t + t.transpose(0, 2, 1)
    elif field.tag == "C":
        g = rng.normal(0.0, off_sd, size=(2, count, n, n))
        t = np.triu(g[0] + 1j * g[1], 1)
        mats = t + t.conj().transpose(0, 2, 1)
    else:
        comp = rng.normal(0.0, off_sd, size=(count, n, n, 4))
        iu = np.triu_indices(n, 1)
        full = np.zeros_like(comp)
        full[:, iu[0], iu[1], :] = comp[:, iu[0], iu[1], :]
        conj = full[:, iu[0], iu[1], :].copy()
        conj[..., 1:] *= -1.0
        full[:, iu[1], iu[0], :] = conj
        mats = _embed_blocks(full)
    if field.tag == "H":
        idx = np.arange(n)
        mats[:, 2 * idx, 2 * idx] += diag
        mats[:, 2 * idx + 1, 2 * idx + 1] += diag
    else:
        idx = np.arange(n)
        mats[:, idx, idx] = mats[:, idx, idx] + diag
    return mats


def gaussian_hermitian(field: GroundField, n: int, psi: float, seed) -> HermitianMatrix:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return HermitianMatrix(field, gaussian_hermitian_batch(field, n, psi, 1, rng)[0])


def gaussian_rect_batch(
    field: GroundField, n: int, m: int, psi: float, count: int, rng: np.random.Generator
) -> np.ndarray:
    """count draws with density ~ exp(-psi * tr T T*): every real component
    of every entry is N(0, 1/(2 psi)).
    """
    if n > m:
        raise ShapeError("need rows <= columns")
    if not psi > 0:
        raise DomainError("psi must be positive")
    sd = 1.0 / math.sqrt(2.0 * psi)
    if field.tag == "R":
        return rng.normal(0.0, sd, size=(count, n, m))
    if field.tag == "C":
        g = rng.normal(0.0, sd, size=(2, count, n, m))
        return g[0] + 1j * g[1]
    return _embed_blocks(rng.normal(0.0, sd, size=(count, n, m, 4)))


def gaussian_rect(field: GroundField, n: int, m: int, psi: float, seed) -> RectMatrix:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return RectMatrix(field, gaussian_rect_batch(field, n, m, psi, 1, rng)[0])


# ---------------------------------------------------------------------------
# corner / row-block spectra


def _dedup_pairs(e: np.ndarray) -> np.ndarray:
    """Take one eigenvalue from each doubled pair of the embedding, checking
    the pairing to relative tolerance."""
    scale = max(1.0, float(np.abs(e).max()))
    gaps = np.abs(e[..., ::2] - e[..., 1::2])
    if np.any(gaps > PAIR_TOL * scale):
        raise DomainError("embedded spectrum does not come in pairs")
    return e[..., ::2]


def corner_spectra_batch(field: GroundField, mats: np.ndarray) -> list[np.ndarray]:
    """Rows [(N,1), ..., (N,n)] of sorted corner-block spectra."""
    bs = _block_size(field)
    n = mats.shape[-1] // bs
    rows = []
    for j in range(1, n + 1):
        e = np.linalg.eigvalsh(mats[:, : bs * j, : bs * j])
        rows.append(_dedup_pairs(e) if bs == 2 else e)
    return rows


def corner_spectra(mat: HermitianMatrix) -> RayleighTriangle:
    """Sorted spectra of the nested leading corner blocks as a triangle."""
    rows = corner_spectra_batch(mat.field, mat.data[None])
    return RayleighTriangle([r[0] for r in rows])


def rowblock_spectra_batch(field: GroundField, mats: np.ndarray) -> list[np.ndarray]:
    """Spectra of {T}_j {T}_j* for the nested top row-blocks of each T."""
    bs = _block_size(field)
    n = mats.shape[-2] // bs
    rows = []
    for j in range(1, n + 1):
        blk = mats[:, : bs * j, :]
        e = np.linalg.eigvalsh(blk @ blk.conj().transpose(0, 2, 1))
        rows.append(_dedup_pairs(e) if bs == 2 else e)
    return rows


def rowblock_spectra(mat: RectMatrix) -> RayleighTriangle:
    rows = rowblock_spectra_batch(mat.field, mat.data[None])
    return RayleighTriangle([r[0] for r in rows])


# ---------------------------------------------------------------------------
# matrix ensembles vs chain samplers


def _flatten_rows(rows: list[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.asarray(r, dtype=float) for r in rows], axis=1)


def corners_vs_chain(
    field: GroundField,
    n: int,
    m: int | None,
    psi: float,
    count: int,
    seed: int = 0,
    z_max: float = 5.0,
    p_min: float = 1e-3,
) -> TwoSampleVerdict:
    """Compare corner spectra of the Gaussian Hermitian ensemble (m is None)
    or row-block spectra of the rectangular ensemble (m given) against the
    matching exact chain sampler, marginal by marginal.
    """
    rng = np.random.default_rng(seed)
    if m is None:
        mats = gaussian_hermitian_batch(field, n, psi, count, rng)
        mat_rows = corner_spectra_batch(field, mats)
        preset = matrix_preset("hermite-corners", n, None, field, psi=psi)
    else:
        mats = gaussian_rect_batch(field, n, m, psi, count, rng)
        mat_rows = rowblock_spectra_batch(field, mats)
        preset = matrix_preset("laguerre-corners", n, m, field, psi=psi)
    chain_rows = sample_rows(default_proposal(preset), count, seed + 1)
    heavy = preset.family is not Family.GAUSS_CHAIN
    return two_sample_compare(
        _flatten_rows(mat_rows),
        _flatten_rows(chain_rows),
        z_max=z_max,
        p_min=p_min,
        compress_tails=heavy,
    )
