"""Echo state network reservoirs: sparse random weights and state recursion.

Weight matrices W (recurrent) and U (input) have entries drawn as
Bernoulli(pi) * Uniform(-a, a) mixtures and are then fixed; the hidden
state follows

    h_t = tanh((nu / rho(W)) W h_{t-1} + U z_t)

where rho(W) is the spectral radius of the unscaled W and nu in (0, 1]
controls sensitivity to initial conditions (the echo state property).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ACTIVATIONS = {"tanh": np.tanh, "identity": lambda x: x}


class SpectralRadiusError(RuntimeError):
    """Spectral radius estimation failed to converge; carries the last estimate."""

    def __init__(self, message: str, estimate: float):
        super().__init__(message)
        self.estimate = estimate


@dataclass(frozen=True)
class ReservoirParams:
    """Hyperparameters of one random reservoir draw."""

    n_h: int
    nu: float
    pi_w: float
    pi_u: float
    a_w: float
    a_u: float
    seed: int

    def __post_init__(self):
        if self.n_h < 1:
            raise ValueError(f"n_h must be >= 1, got {self.n_h}")
        if not (0.0 < self.nu <= 1.0):
            raise ValueError(f"nu must be in (0, 1], got {self.nu}")
        for name in ("pi_w", "pi_u"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must be in (0, 1], got {v}")
        for name in ("a_w", "a_u"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")


@dataclass
class ReservoirWeights:
    """A fixed (W, U) pair plus the spectral radius of the unscaled W."""

    W: np.ndarray  # (n_h, n_h)
    U: np.ndarray  # (n_h, n_z)
    spectral_radius_w: float

    @property
    def n_h(self) -> int:
        return self.W.shape[0]

    @property
    def n_z(self) -> int:
        return self.U.shape[1]


@dataclass
class ReservoirStates:
    """Hidden-state sequence H with one column per input time."""

    H: np.ndarray  # (n_h, T)
    h0: np.ndarray  # (n_h,) state the recursion started from

    @property
    def last(self) -> np.ndarray:
        return self.H[:, -1]


def spectral_radius(W: np.ndarray, tol: float = 1e-8, max_iter: int = 500) -> float:
    """Largest |eigenvalue| of a square matrix.

    Plain power iteration handles the common case of a dominant real
    eigenvalue; when its norm-ratio estimate fails to settle (complex
    dominant pairs), falls back on Gelfand's formula via repeated squaring,
    estimating ||W^(2^j)||_2 with power iteration on the Gram matrix.
    """
    W = np.asarray(W, dtype=np.float64)
    if W.ndim != 2 or W.shape[0] != W.shape[1]:
        raise ValueError(f"W must be square, got shape {W.shape}")
    if not np.all(np.isfinite(W)):
        raise ValueError("W has non-finite entries")
    n = W.shape[0]
    if n == 1:
        return float(abs(W[0, 0]))

    rng = np.random.Generator(np.random.Philox(0x5eed))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    stable = 0
    for _ in range(max_iter):
        w = W @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        if abs(nw - est) <= 0.1 * tol * max(nw, 1e-300):
            stable += 1
            if stable >= 4:
                return float(nw)
        else:
            stable = 0
        est = nw
        v = w / nw
    return _gelfand_radius(W, tol)


def _sym_norm2(A: np.ndarray, tol: float = 1e-10, max_iter: int = 10000) -> float:
    """2-norm via power iteration on the (symmetric PSD) Gram matrix A'A."""
    n = A.shape[0]
    rng = np.random.Generator(np.random.Philox(0x9e3))
    v = rng.standard_normal(n)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new = np.sqrt(nw)
        if abs(new - est) <= tol * max(new, 1e-300):
            return float(new)
        est = new
        v = w / nw
    return float(est)


def _gelfand_radius(W: np.ndarray, tol: float, max_squarings: int = 64) -> float:
    """rho(W) = lim ||W^k||^(1/k) along k = 2^j, by normalized repeated squaring.

    The estimates log||W^(2^j)||_2 / 2^j are non-increasing (submultiplicativity)
    and bounded below by log rho, so the last decrement bounds the error.
    """
    A = np.asarray(W, dtype=np.float64)
    nrm = _sym_norm2(A)
    if nrm == 0.0:
        return 0.0
    A = A / nrm
    log_norm = np.log(nrm)  # log ||W^(2^j)||, j = 0
    est = log_norm
    for j in range(1, max_squarings + 1):
        A = A @ A
        nrm = _sym_norm2(A)
        if nrm == 0.0:
            return 0.0
        log_norm = 2.0 * log_norm + np.log(nrm)
        A = A / nrm
        new = log_norm / 2.0**j
        if abs(est - new) <= 0.5 * tol * max(abs(new), 1.0):
            return float(np.exp(new))
        est = new
    raise SpectralRadiusError(
        f"spectral radius did not converge after {max_squarings} squarings",
        estimate=float(np.exp(est)),
    )


def generate_weights(
    params: ReservoirParams, n_z: int, max_retries: int = 16
) -> ReservoirWeights:
    """Draw a fixed sparse (W, U) pair for the given seed.

    Entries are Bernoulli(pi) inclusions times Uniform(-a, a) values, drawn
    in a fixed order from a Philox stream so the result is bit-reproducible.
    A draw whose W has spectral radius exactly 0 (which the state recursion
    cannot scale) is rejected and redrawn with an incremented seed.
    """
    if n_z < 1:
        raise ValueError(f"n_z must be >= 1, got {n_z}")
    for attempt in range(max_retries + 1):
        rng = np.random.Generator(np.random.Philox(params.seed + attempt))
        keep_w = rng.random((params.n_h, params.n_h)) < params.pi_w
        W = rng.uniform(-params.a_w, params.a_w, size=(params.n_h, params.n_h))
        W[~keep_w] = 0.0
        keep_u = rng.random((params.n_h, n_z)) < params.pi_u
        U = rng.uniform(-params.a_u, params.a_u, size=(params.n_h, n_z))
        U[~keep_u] = 0.0
        rho = spectral_radius(W)
        if rho > 0.0:
            return ReservoirWeights(W=W, U=U, spectral_radius_w=rho)
    raise SpectralRadiusError(
        f"all {max_retries + 1} weight draws from seed {params.seed} had zero spectral radius",
        estimate=0.0,
    )


def run_reservoir(
    weights: ReservoirWeights,
    inputs: np.ndarray,
    nu: float,
    h0: np.ndarray | None = None,
    activation: str = "tanh",
) -> ReservoirStates:
    """Run the hidden-state recursion over an (n_z, T) input sequence.

    Starts from h0 (zero vector by default) and returns one state column
    per input column.  Continuation runs (forecasting) pass the last
    training state as h0 with the future inputs.
    """
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}; valid: {sorted(ACTIVATIONS)}")
    g = ACTIVATIONS[activation]
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[0] != weights.n_z:
        raise ValueError(
            f"inputs must have shape ({weights.n_z}, T), got {inputs.shape}"
        )
    if weights.spectral_radius_w <= 0.0:
        raise ValueError("weights have zero spectral radius; regenerate them")
    if h0 is None:
        h0 = np.zeros(weights.n_h)
    else:
        h0 = np.asarray(h0, dtype=np.float64)
        if h0.shape != (weights.n_h,):
            raise ValueError(f"h0 has shape {h0.shape}, expected ({weights.n_h},)")
    T = inputs.shape[1]
    W_scaled = (nu / weights.spectral_radius_w) * weights.W
    UZ = weights.U @ inputs
    H = np.empty((weights.n_h, T))
    h = h0
    for t in range(T):
        h = g(W_scaled @ h + UZ[:, t])
        H[:, t] = h
    return ReservoirStates(H=H, h0=h0)


@dataclass
class InputStandardizer:
    """Center/scale transform for reservoir inputs, fit on the training period.

    Scales are floored at a small epsilon so constant input rows (e.g.
    never-active cells) map to zero instead of dividing by zero.
    """

    mean: np.ndarray  # (n_z,)
    scale: np.ndarray  # (n_z,)

    @classmethod
    def fit(cls, inputs: np.ndarray, eps: float = 1e-8) -> "InputStandardizer":
        inputs = np.asarray(inputs, dtype=np.float64)
        mean = inputs.mean(axis=1)
        scale = np.maximum(inputs.std(axis=1), eps)
        return cls(mean=mean, scale=scale)

    def transform(self, inputs: np.ndarray) -> np.ndarray:
        inputs = np.asarray(inputs, dtype=np.float64)
        if inputs.shape[0] != self.mean.shape[0]:
            raise ValueError(
                f"inputs have {inputs.shape[0]} rows, standardizer was fit on {self.mean.shape[0]}"
            )
        return (inputs - self.mean[:, None]) / self.scale[:, None]
