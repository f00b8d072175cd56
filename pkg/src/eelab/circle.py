"""Trigonometric polynomials on R/2piZ with exact coefficient calculus.

A CircleFunction stores complex Fourier coefficients c_k for |k| <= band and
represents t -> sum_k c_k e^{ikt}.  Every operation needed downstream
(derivative, antiderivative, products, shifts, inner products) is exact
coefficient arithmetic; pointwise sampling only ever appears as a separate
oracle path in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

ComplexArray = NDArray[np.complex128]

#: coefficient magnitudes below this are trimmed when normalizing the band
TRIM_TOL = 0.0  # exact trimming only (zero coefficients)


def _trim(coeffs: np.ndarray) -> np.ndarray:
    """Drop zero outer coefficients, keeping the array length odd (2K+1)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.ndim != 1 or coeffs.size % 2 != 1:
        raise ValueError("coefficient array must be 1-D with odd length 2K+1")
    k = coeffs.size // 2
    while k > 0 and coeffs[0] == 0 and coeffs[-1] == 0:
        coeffs = coeffs[1:-1]
        k -= 1
    return coeffs


@dataclass(frozen=True)
class CircleFunction:
    """Band-limited function on the circle, stored as coefficients c_{-K..K}."""

    coeffs: ComplexArray = field(default_factory=lambda: np.zeros(1, dtype=np.complex128))

    def __post_init__(self) -> None:
        object.__setattr__(self, "coeffs", _trim(self.coeffs))

    # ---------------- constructors ----------------

    @staticmethod
    def zero() -> "CircleFunction":
        return CircleFunction(np.zeros(1, dtype=np.complex128))

    @staticmethod
    def constant(c: complex) -> "CircleFunction":
        return CircleFunction(np.array([c], dtype=np.complex128))

    @staticmethod
    def from_modes(modes: dict[int, complex]) -> "CircleFunction":
        if not modes:
            return CircleFunction.zero()
        band = max(abs(k) for k in modes)
        c = np.zeros(2 * band + 1, dtype=np.complex128)
        for k, v in modes.items():
            c[k + band] = v
        return CircleFunction(c)

    @staticmethod
    def harmonic(k: int, amplitude: complex = 1.0) -> "CircleFunction":
        """The single mode t -> amplitude * e^{ikt}."""
        return CircleFunction.from_modes({k: amplitude})

    @staticmethod
    def cosine(k: int, amplitude: float = 1.0) -> "CircleFunction":
        if k == 0:
            return CircleFunction.constant(amplitude)
        return CircleFunction.from_modes({k: amplitude / 2, -k: amplitude / 2})

    @staticmethod
    def sine(k: int, amplitude: float = 1.0) -> "CircleFunction":
        return CircleFunction.from_modes({k: amplitude / 2j, -k: -amplitude / 2j})

    @staticmethod
    def random_real(band: int, rng: np.random.Generator, scale: float = 1.0) -> "CircleFunction":
        """Random real-valued trigonometric polynomial of the given band."""
        a = rng.standard_normal(band + 1) * scale
        b = rng.standard_normal(band + 1) * scale
        f = CircleFunction.constant(a[0])
        for k in range(1, band + 1):
            f = f + CircleFunction.cosine(k, a[k]) + CircleFunction.sine(k, b[k])
        return f

    # ---------------- basic queries ----------------

    @property
    def band(self) -> int:
        return self.coeffs.size // 2

    def coeff(self, k: int) -> complex:
        if abs(k) > self.band:
            return 0.0 + 0.0j
        return complex(self.coeffs[k + self.band])

    @property
    def mean(self) -> complex:
        """The mode-0 coefficient <f, 1>."""
        return self.coeff(0)

    def is_real(self, tol: float = 1e-12) -> bool:
        """True when c_{-k} = conj(c_k) within tol (the function is real-valued)."""
        return bool(np.max(np.abs(self.coeffs - np.conj(self.coeffs[::-1]))) <= tol)

    def cos_coeff(self, k: int) -> float:
        """a_k = (1/pi) int f cos(kt) dt for real f (a_0 returns 2*mean)."""
        return float(np.real(self.coeff(k) + self.coeff(-k)))

    def sin_coeff(self, k: int) -> float:
        """b_k = (1/pi) int f sin(kt) dt for real f."""
        return float(np.real(1j * (self.coeff(k) - self.coeff(-k))))

    # ---------------- evaluation ----------------

    def __call__(self, t) -> np.ndarray | complex:
        t = np.asarray(t, dtype=float)
        ks = np.arange(-self.band, self.band + 1)
        out = np.tensordot(np.exp(1j * np.multiply.outer(t, ks)), self.coeffs, axes=([-1], [0]))
        return out if t.ndim else complex(out)

    def real_values(self, t) -> np.ndarray:
        return np.real(self(np.asarray(t, dtype=float)))

    # ---------------- coefficient calculus ----------------

    def derivative(self, order: int = 1) -> "CircleFunction":
        ks = np.arange(-self.band, self.band + 1)
        return CircleFunction(self.coeffs * (1j * ks) ** order)

    def antiderivative(self) -> "CircleFunction":
        """Primitive F with F(0) = 0; requires zero mean."""
        if abs(self.mean) > 1e-13:
            raise ValueError(f"antiderivative needs zero mean, got {self.mean!r}")
        ks = np.arange(-self.band, self.band + 1)
        c = np.zeros_like(self.coeffs)
        nz = ks != 0
        c[nz] = self.coeffs[nz] / (1j * ks[nz])
        out = CircleFunction(c)
        return out + CircleFunction.constant(-out(0.0))

    def shift(self, a: float) -> "CircleFunction":
        """t -> f(t + a)."""
        ks = np.arange(-self.band, self.band + 1)
        return CircleFunction(self.coeffs * np.exp(1j * ks * a))

    def mul_mode(self, n: int, amplitude: complex = 1.0) -> "CircleFunction":
        """Multiply by amplitude * e^{int} (band grows by |n|)."""
        band = self.band + abs(n)
        c = np.zeros(2 * band + 1, dtype=np.complex128)
        ks = np.arange(-self.band, self.band + 1)
        c[ks + n + band] = self.coeffs * amplitude
        return CircleFunction(c)

    def conjugate(self) -> "CircleFunction":
        return CircleFunction(np.conj(self.coeffs[::-1]))

    def real_part(self) -> "CircleFunction":
        return (self + self.conjugate()) * 0.5

    def imag_part(self) -> "CircleFunction":
        return (self - self.conjugate()) * (-0.5j)

    def drop_modes(self, kill: set[int]) -> "CircleFunction":
        c = self.coeffs.copy()
        for k in kill:
            if abs(k) <= self.band:
                c[k + self.band] = 0.0
        return CircleFunction(c)

    def inner(self, other: "CircleFunction") -> complex:
        """<f, g> = (1/2pi) int f g dt (bilinear, no conjugation)."""
        tot = 0.0 + 0.0j
        for k in range(-self.band, self.band + 1):
            tot += self.coeff(k) * other.coeff(-k)
        return tot

    # ---------------- arithmetic ----------------

    def __add__(self, other: "CircleFunction") -> "CircleFunction":
        band = max(self.band, other.band)
        c = np.zeros(2 * band + 1, dtype=np.complex128)
        c[band - self.band : band + self.band + 1] += self.coeffs
        c[band - other.band : band + other.band + 1] += other.coeffs
        return CircleFunction(c)

    def __sub__(self, other: "CircleFunction") -> "CircleFunction":
        return self + (other * -1.0)

    def __mul__(self, other):
        if isinstance(other, CircleFunction):
            c = np.convolve(self.coeffs, other.coeffs)
            return CircleFunction(c)
        return CircleFunction(self.coeffs * complex(other))

    __rmul__ = __mul__

    def __neg__(self) -> "CircleFunction":
        return self * -1.0

    # ---------------- norms ----------------

    def sup_norm(self, samples: int = 2048) -> float:
        t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
        return float(np.max(np.abs(self(t))))

    def coeff_l1(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))

    # ---------------- serialization ----------------

    def to_json(self) -> dict:
        return {
            "band": self.band,
            "re": [float(x) for x in self.coeffs.real],
            "im": [float(x) for x in self.coeffs.imag],
            "kind": "circle-function",
        }

    @staticmethod
    def from_json(obj: dict) -> "CircleFunction":
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj["im"], dtype=float)
        return CircleFunction(re + 1j * im)


def circle_from_samples(values: np.ndarray) -> CircleFunction:
    """Recover coefficients from equispaced samples f(2pi j / N).

    Exact for band-limited f with 2*band < N.
    """
    values = np.asarray(values, dtype=np.complex128)
    n = values.size
    hat = np.fft.fft(values) / n
    band = (n - 1) // 2
    c = np.zeros(2 * band + 1, dtype=np.complex128)
    for k in range(-band, band + 1):
        c[k + band] = hat[k % n]
    return CircleFunction(c)
