"""Gaussian-perturbation box integral: leading correction exponent, imaginary
control factor, and an importance-sampled Monte-Carlo evaluator.

The integrand is exp of a dominant Gaussian -A N sum z_j^2 plus perturbation
monomials up to quartic order with coefficient tables (vectors, zero-diagonal
matrices, and optional 3/4-index tables over distinct indices), integrated
over the box |z_j| <= N^(-1/2+eps).  theta1 gives the closed-form correction
exponent relative to the pure Gaussian value (pi/(A N))^(N/2); the MC path
uses the Gaussian restricted to the box as the proposal, so the weight is
exactly exp of the perturbation.

Two coefficient conventions are pinned here by independent checks: the
quadratic-in-J exponent coefficient is 1/(4 A N), forced by Gaussian
completion of squares and confirmed by the MC path against the alternative
4/(A N) at overwhelming significance, and the final imaginary-part cross
term pairs the two-index cubic table with the linear coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class DegenerateProposalError(ValueError):
    """The box captures too little Gaussian mass for importance sampling."""


def _as_complex_vector(value, N: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros(N, dtype=complex)
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (N,):
        raise ValueError(f"{name} must have shape ({N},)")
    return arr


def _as_complex_matrix(value, N: int, name: str) -> np.ndarray:
    if value is None:
        return np.zeros((N, N), dtype=complex)
    arr = np.array(value, dtype=complex)
    if arr.shape != (N, N):
        raise ValueError(f"{name} must have shape ({N},{N})")
    np.fill_diagonal(arr, 0.0)  # primed sums ignore coincident indices
    return arr


@dataclass
class CoefficientSet:
    """Coefficient tables of the perturbed Gaussian integrand.

    J: linear; a: quadratic (scaled N^(1/2)); B: cubic diagonal (scaled N);
    C: cubic cross z_j z_k^2; D: cubic triple (scaled 1/N); E: quartic
    diagonal (scaled N); F: quartic cross z_j^2 z_k^2; G: quartic z_j z_k^3
    (scaled N^(1/2)); H: quartic z_j z_k z_l^2 (scaled N^(-1/2)); I: quartic
    four-index (scaled N^(-3/2)).  eps_hat sets the box half-width
    N^(-1/2+eps_hat).
    """

    N: int
    A: float
    eps_hat: float = 0.9
    J: np.ndarray | None = None
    a: np.ndarray | None = None
    B: np.ndarray | None = None
    E: np.ndarray | None = None
    C: np.ndarray | None = None
    F: np.ndarray | None = None
    G: np.ndarray | None = None
    D: np.ndarray | None = None
    H: np.ndarray | None = None
    I: np.ndarray | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        if not self.A > 0:
            raise ValueError("A must be positive")
        self.J = _as_complex_vector(self.J, self.N, "J")
        self.a = _as_complex_vector(self.a, self.N, "a")
        self.B = _as_complex_vector(self.B, self.N, "B")
        self.E = _as_complex_vector(self.E, self.N, "E")
        self.C = _as_complex_matrix(self.C, self.N, "C")
        self.F = _as_complex_matrix(self.F, self.N, "F")
        self.G = _as_complex_matrix(self.G, self.N, "G")
        for name in ("D", "H"):
            value = getattr(self, name)
            if value is not None:
                arr = np.asarray(value, dtype=complex)
                if arr.shape != (self.N,) * 3:
                    raise ValueError(f"{name} must have shape {(self.N,) * 3}")
                setattr(self, name, arr)
        if self.I is not None:
            arr = np.asarray(self.I, dtype=complex)
            if arr.shape != (self.N,) * 4:
                raise ValueError(f"I must have shape {(self.N,) * 4}")
            self.I = arr

    @property
    def box_halfwidth(self) -> float:
        return self.N ** (-0.5 + self.eps_hat)

    @classmethod
    def from_dict(cls, doc: dict) -> "CoefficientSet":
        def decode(value):
            if value is None:
                return None
            return np.asarray(_decode_complex(value))

        kwargs = {}
        for name in ("J", "a", "B", "E", "C", "F", "G", "D", "H", "I"):
            if name in doc and doc[name] is not None:
                kwargs[name] = decode(doc[name])
        return cls(N=int(doc["N"]), A=float(doc["A"]),
                   eps_hat=float(doc.get("epsHat", 0.9)), **kwargs)

    def to_dict(self) -> dict:
        doc = {"N": self.N, "A": self.A, "epsHat": self.eps_hat}
        for name in ("J", "a", "B", "E", "C", "F", "G"):
            arr = getattr(self, name)
            if np.any(arr):
                doc[name] = _encode_complex(arr)
        for name in ("D", "H", "I"):
            arr = getattr(self, name)
            if arr is not None and np.any(arr):
                doc[name] = _encode_complex(arr)
        return doc


def _decode_complex(value):
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, list):
        if len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
            return complex(value[0], value[1])
        return [_decode_complex(v) for v in value]
    raise ValueError(f"cannot decode complex entry {value!r}")


def _encode_complex(arr: np.ndarray):
    if arr.ndim == 0:
        z = complex(arr)
        return [z.real, z.imag]
    return [_encode_complex(sub) for sub in arr]


def theta1_terms(c: CoefficientSet) -> dict[str, complex]:
    """Named terms of the correction exponent; theta1 is their sum."""
    A, N = c.A, c.N
    sqN = math.sqrt(N)
    a, B, C, E, F, J = c.a, c.B, c.C, c.E, c.F, c.J
    c_row = C.sum(axis=1)
    c_col = C.sum(axis=0)
    terms = {
        "a_linear": a.sum() / (2.0 * A * sqN),
        "a_square": (a * a).sum() / (4.0 * A * A * N),
        "B_square": 15.0 * (B * B).sum() / (16.0 * A ** 3 * N),
        "B_C": 3.0 * (B * c_row).sum() / (8.0 * A ** 3 * N * N),
        "C_C": ((c_row * c_row).sum() - (C * C).sum()) / (16.0 * A ** 3 * N ** 3),
        "E_quartic": 3.0 * E.sum() / (4.0 * A * A * N),
        "F_cross": F.sum() / (4.0 * A * A * N * N),
        "J_square": (J * J).sum() / (4.0 * A * N),
        "B_J": 3.0 * (B * J).sum() / (4.0 * A * A * N),
        "C_J": (c_col * J).sum() / (4.0 * A * A * N * N),
    }
    return {k: complex(v) for k, v in terms.items()}


def theta1(c: CoefficientSet) -> complex:
    """Correction exponent of the box integral relative to the Gaussian value."""
    return complex(sum(theta1_terms(c).values()))


def z_factor_terms(c: CoefficientSet) -> dict[str, float]:
    A, N = c.A, c.N
    ia, iB, iC, iJ = c.a.imag, c.B.imag, c.C.imag, c.J.imag
    row = iC.sum(axis=1)
    col = iC.sum(axis=0)
    return {
        "a": float((ia * ia).sum() / (4.0 * A * A * N)),
        "B": float(15.0 * (iB * iB).sum() / (16.0 * A ** 3 * N)),
        "B_C": float(3.0 * (iB * row).sum() / (8.0 * A ** 3 * N * N)),
        "C_C": float(((row * row).sum() - (iC * iC).sum()) / (16.0 * A ** 3 * N ** 3)),
        "J": float((iJ * iJ).sum() / (4.0 * A * N)),
        "B_J": float(3.0 * (iB * iJ).sum() / (4.0 * A * A * N)),
        "C_J": float((col * iJ).sum() / (4.0 * A * A * N * N)),
    }


def z_factor(c: CoefficientSet) -> float:
    """Imaginary-part control factor exp(sum of Im-part quadratics)."""
    return math.exp(math.fsum(z_factor_terms(c).values()))


def _strict_triple(T: np.ndarray, u: np.ndarray, v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """sum over distinct (j,k,l) of T[j,k,l] u_j v_k w_l, per sample row."""
    out = np.zeros(u.shape[0], dtype=complex)
    for j, k, l in np.argwhere(T != 0):
        if j != k and j != l and k != l:
            out += T[j, k, l] * u[:, j] * v[:, k] * w[:, l]
    return out


def _strict_quad(T: np.ndarray, z: np.ndarray) -> np.ndarray:
    out = np.zeros(z.shape[0], dtype=complex)
    for j, k, l, m in np.argwhere(T != 0):
        if len({int(j), int(k), int(l), int(m)}) == 4:
            out += T[j, k, l, m] * z[:, j] * z[:, k] * z[:, l] * z[:, m]
    return out


def perturbation_exponent(c: CoefficientSet, z: np.ndarray) -> np.ndarray:
    """Non-Gaussian part of the log integrand, vectorized over sample rows z (S, N)."""
    N = c.N
    sqN = math.sqrt(N)
    z2 = z * z
    z3 = z2 * z
    w = z @ c.J
    w = w + sqN * (z2 @ c.a)
    w = w + N * (z3 @ c.B)
    w = w + np.einsum("jk,sj,sk->s", c.C, z.astype(complex), z2.astype(complex))
    w = w + N * (z2 * z2) @ c.E
    w = w + np.einsum("jk,sj,sk->s", c.F, z2.astype(complex), z2.astype(complex))
    w = w + sqN * np.einsum("jk,sj,sk->s", c.G, z.astype(complex), z3.astype(complex))
    if c.D is not None:
        w = w + _strict_triple(c.D, z, z, z) / N
    if c.H is not None:
        w = w + _strict_triple(c.H, z, z, z2) / sqN
    if c.I is not None:
        w = w + _strict_quad(c.I, z) / N ** 1.5
    return w


@dataclass(frozen=True)
class MCBoxResult:
    mean: complex
    stderr: float
    samples: int
    seed: int
    acceptance_rate: float
    box_mass: float


def mc_box_integral(c: CoefficientSet, samples: int, seed: int, *,
                    batch_size: int = 1 << 16, mass_floor: float = 0.99) -> MCBoxResult:
    """Importance-sampled Monte-Carlo estimate of the box integral.

    Proposal: the dominant Gaussian restricted to the box by rejection.  The
    weight of each accepted point is exp of the perturbation exponent, so the
    estimate is (pi/(A N))^(N/2) * box_mass * mean(weight).  Bit-reproducible
    for a fixed seed: batch k draws from the k-th spawn of the master seed
    sequence and batches are reduced in order.
    """
    if samples < 1:
        raise ValueError("need samples >= 1")
    A, N = c.A, c.N
    sigma = 1.0 / math.sqrt(2.0 * A * N)
    bound = c.box_halfwidth
    # per-axis retained mass: erf(sqrt(A) * N^eps_hat)
    axis_mass = math.erf(math.sqrt(A) * c.N ** c.eps_hat)
    box_mass = axis_mass ** N
    if box_mass < mass_floor:
        raise DegenerateProposalError(
            f"box retains only {box_mass:.3g} of the Gaussian mass "
            f"(A*N^(2 eps_hat) too small); increase eps_hat or A")
    prefactor = (math.pi / (A * N)) ** (N / 2.0) * box_mass

    master = np.random.SeedSequence(seed)
    collected = 0
    proposed = 0
    accepted = 0
    s1 = 0.0 + 0.0j
    s2 = 0.0
    while collected < samples:
        child = master.spawn(1)[0]
        rng = np.random.default_rng(child)
        zb = rng.normal(0.0, sigma, size=(batch_size, N))
        inside = (np.abs(zb) <= bound).all(axis=1)
        proposed += batch_size
        accepted += int(inside.sum())
        zin = zb[inside]
        if zin.shape[0] == 0:
            continue
        take = min(zin.shape[0], samples - collected)
        zin = zin[:take]
        w = np.exp(perturbation_exponent(c, zin))
        s1 += w.sum()
        s2 += float((w.real * w.real + w.imag * w.imag).sum())
        collected += take
    mean_w = s1 / samples
    var_w = max(0.0, (s2 - samples * abs(mean_w) ** 2) / max(samples - 1, 1))
    return MCBoxResult(
        mean=complex(prefactor * mean_w),
        stderr=float(prefactor * math.sqrt(var_w / samples)),
        samples=samples,
        seed=seed,
        acceptance_rate=accepted / proposed,
        box_mass=box_mass,
    )


def gaussian_reference(c: CoefficientSet) -> float:
    """Pure-Gaussian value (pi/(A N))^(N/2) of the unperturbed integral."""
    return (math.pi / (c.A * c.N)) ** (c.N / 2.0)
