"""Exact polynomial algebra for mixed p-spin covariance functions.

A spherical mixed p-spin model is specified by a mixture
``xi(t) = sum_p gamma_p^2 t^p`` with nonnegative coefficients; the
Hamiltonian's covariance is ``Cov(H(s), H(s')) = N xi(<s,s'>/N)``.
Every derived covariance used downstream (recentering on a band,
restriction to a sub-sphere, radius scaling, the Franz-Parisi section)
is again a polynomial, so all transforms here are exact coefficient
maps (binomial re-expansion), never quadrature.

Degree index 1 is reserved for conditioning-induced linear terms
(effective external fields); solvers must opt in to accept it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import MixtureError

DEFAULT_DEGREE_CAP = 32

# tolerance for clipping float noise in derived coefficient arrays
_COEFF_NEG_TOL = 1e-12


def _normalize_coeffs(
    coeffs: Mapping[int, float] | Sequence[float] | None,
    const_term: float,
    degree_cap: int,
) -> tuple[float, ...]:
    """Build the dense degree-indexed array (index 0 = constant offset)."""
    arr = np.zeros(degree_cap + 1)
    arr[0] = const_term
    if coeffs is None:
        pass
    elif isinstance(coeffs, Mapping):
        for p, g in coeffs.items():
            p = int(p)
            if p < 1:
                raise MixtureError(f"coefficient degree must be >= 1, got {p}")
            if p > degree_cap:
                raise MixtureError(f"degree {p} exceeds cap {degree_cap}")
            arr[p] = float(g)
    else:
        vals = list(coeffs)
        if len(vals) > degree_cap:
            raise MixtureError(f"degree {len(vals)} exceeds cap {degree_cap}")
        for i, g in enumerate(vals):
            arr[i + 1] = float(g)
    if arr.min() < -_COEFF_NEG_TOL:
        bad = int(np.argmin(arr))
        raise MixtureError(f"negative coefficient {arr[bad]} at degree {bad}")
    arr = np.clip(arr, 0.0, None)
    return tuple(arr.tolist())


@dataclass(frozen=True)
class SigmaMatrix:
    """The 2x2 covariance of (energy density, radial derivative) used by the
    critical-point growth rate: [[xi(1), xi'(1)], [xi'(1), xi''(1)+xi'(1)]].
    """

    entries: tuple[tuple[float, float], tuple[float, float]]

    def __post_init__(self) -> None:
        a = self.as_array()
        if abs(a[0, 1] - a[1, 0]) > 1e-12:
            raise MixtureError("sigma matrix must be symmetric")
        if self.det < -1e-12:
            raise MixtureError("sigma matrix must be positive semidefinite")

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    @property
    def det(self) -> float:
        a = self.as_array()
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])

    @property
    def is_singular(self) -> bool:
        # scale-aware zero test; unit-normalized pure mixtures sit at ~1e-16
        scale = max(abs(x) for row in self.entries for x in row) or 1.0
        return abs(self.det) < 1e-10 * scale * scale

    def inverse(self) -> np.ndarray:
        if self.is_singular:
            from .errors import SingularMatrixError

            raise SingularMatrixError("sigma matrix is singular (pure mixture)")
        a = self.as_array()
        d = self.det
        return np.array([[a[1, 1], -a[0, 1]], [-a[1, 0], a[0, 0]]]) / d


@dataclass(frozen=True)
class GenericityReport:
    """Outcome of the genericity declaration check.

    A finite coefficient list can never satisfy the defining divergent-sum
    property, so this is a label echo plus a structural summary of which
    degree parities carry weight.
    """

    declared: bool
    even_support: tuple[int, ...]
    odd_support: tuple[int, ...]
    note: str

    def __bool__(self) -> bool:
        return self.declared


class Mixture:
    """Immutable mixture ``xi(t) = const + sum_{p>=1} gamma_p^2 t^p``.

    Parameters
    ----------
    coeffs
        Mapping degree -> gamma_p^2 (degrees >= 1), or a sequence whose
        i-th entry is the coefficient of degree i+1.
    const_term
        Constant covariance offset (degree 0). Only carried for
        conditional-covariance bookkeeping; zero for physical models.
    generic_truncation
        Caller's declaration that this is a truncation of a generic series.
    degree_cap
        Maximum representable degree (coefficient arrays are dense).
    """

    __slots__ = ("_c", "generic_truncation", "degree_cap")

    def __init__(
        self,
        coeffs: Mapping[int, float] | Sequence[float] | None = None,
        const_term: float = 0.0,
        generic_truncation: bool = False,
        degree_cap: int = DEFAULT_DEGREE_CAP,
    ) -> None:
        if const_term < -_COEFF_NEG_TOL:
            raise MixtureError(f"negative constant term {const_term}")
        object.__setattr__(self, "_c", _normalize_coeffs(coeffs, max(const_term, 0.0), degree_cap))
        object.__setattr__(self, "generic_truncation", bool(generic_truncation))
        object.__setattr__(self, "degree_cap", int(degree_cap))

    def __setattr__(self, name, value):  # pragma: no cover - immutability guard
        raise AttributeError("Mixture is immutable")

    # ---------------------------------------------------------------- basics

    @property
    def coeffs(self) -> dict[int, float]:
        """Nonzero coefficients by degree (degree >= 1)."""
        return {p: g for p, g in enumerate(self._c) if p >= 1 and g != 0.0}

    @property
    def const_term(self) -> float:
        return self._c[0]

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(sorted(self.coeffs))

    @property
    def max_degree(self) -> int:
        ds = self.degrees
        return ds[-1] if ds else 0

    @property
    def min_degree(self) -> int:
        ds = self.degrees
        return ds[0] if ds else 0

    @property
    def is_pure(self) -> bool:
        """Exactly one active degree and no constant offset."""
        return len(self.degrees) == 1 and self.const_term == 0.0

    @property
    def has_linear(self) -> bool:
        return self._c[1] != 0.0

    def __eq__(self, other) -> bool:
        return isinstance(other, Mixture) and self._c == other._c

    def __hash__(self) -> int:
        return hash(self._c)

    def __repr__(self) -> str:
        parts = [f"{g:g}*t^{p}" for p, g in sorted(self.coeffs.items())]
        if self.const_term:
            parts.insert(0, f"{self.const_term:g}")
        return f"Mixture({' + '.join(parts) or '0'})"

    def close_to(self, other: "Mixture", tol: float = 1e-12) -> bool:
        a, b = np.asarray(self._c), np.asarray(other._c)
        n = max(len(a), len(b))
        a = np.pad(a, (0, n - len(a)))
        b = np.pad(b, (0, n - len(b)))
        return bool(np.max(np.abs(a - b)) <= tol)

    # ------------------------------------------------------------ evaluation

    def eval(self, t, order: int = 0):
        """Evaluate the order-th derivative of xi at t (Horner scheme).

        The constant term contributes only at order 0. Accepts scalars or
        numpy arrays. Orders beyond the polynomial degree return 0.
        """
        if order < 0:
            raise MixtureError(f"derivative order must be >= 0, got {order}")
        c = np.asarray(self._c)
        if order > 0:
            # falling-factorial rescale: coefficient of t^(p-order) is c_p * p!/(p-order)!
            p = np.arange(len(c), dtype=float)
            fac = np.ones_like(p)
            for j in range(order):
                fac *= np.clip(p - j, 0.0, None)
            c = (c * fac)[order:]
        if len(c) == 0:
            return np.zeros_like(np.asarray(t, dtype=float)) if np.ndim(t) else 0.0
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros_like(t_arr)
        for coef in c[::-1]:
            out = out * t_arr + coef
        return float(out) if np.ndim(t) == 0 else out

    def __call__(self, t, order: int = 0):
        return self.eval(t, order)

    # ------------------------------------------------------------ transforms

    def _from_array(self, arr: np.ndarray) -> "Mixture":
        arr = np.asarray(arr, dtype=float)
        if arr.min() < -_COEFF_NEG_TOL:
            raise MixtureError(
                f"transform produced negative coefficient {arr.min():.3e}"
            )
        arr = np.clip(arr, 0.0, None)
        return Mixture(
            {p: g for p, g in enumerate(arr) if p >= 1 and g != 0.0},
            const_term=float(arr[0]) if len(arr) else 0.0,
            generic_truncation=self.generic_truncation,
            degree_cap=self.degree_cap,
        )

    def scale(self, factor: float) -> "Mixture":
        """Multiply the whole covariance by factor (>= 0)."""
        if factor < 0:
            raise MixtureError("covariance scale factor must be >= 0")
        return self._from_array(np.asarray(self._c) * factor)

    def scale_domain(self, s: float) -> "Mixture":
        """Return xi(s*t): coefficient of degree p scales by s^p.

        This is the covariance after shrinking the sphere radius by sqrt(s).
        """
        if s < 0:
            raise MixtureError("domain scale must be >= 0")
        arr = np.asarray(self._c) * (s ** np.arange(len(self._c), dtype=float))
        return self._from_array(arr)

    def _shifted_coeffs(self, q: float) -> np.ndarray:
        """Coefficient array of t -> xi(t + q), by binomial convolution."""
        n = len(self._c)
        out = np.zeros(n)
        for p, g in enumerate(self._c):
            if g == 0.0:
                continue
            if p == 0:
                out[0] += g
                continue
            qp = q ** np.arange(p, -1, -1)  # q^(p-j) for j = 0..p
            for j in range(p + 1):
                out[j] += g * math.comb(p, j) * qp[j]
        return out

    def shift_restrict(self, q: float) -> tuple["Mixture", "Mixture", "Mixture"]:
        """Covariances of the field recentered at overlap q.

        Returns the triple
        (xi_q, xi_bar_q, xi_hat_q) =
        (xi(t+q) - xi(q) - xi'(q) t,  xi_q((1-q) t),  xi(q t)).

        xi_q is the covariance of the conditionally recentered field on the
        band at depth q (its constant and linear parts vanish by
        construction and all remaining coefficients are nonnegative);
        xi_bar_q rescales it to the unit-overlap coordinate of the
        orthogonal sphere; xi_hat_q is plain radius scaling.
        """
        if not 0.0 <= q < 1.0:
            raise MixtureError(f"recentering overlap must be in [0,1), got {q}")
        shifted = self._shifted_coeffs(q)
        shifted[0] = 0.0  # subtract xi(q): kills the constant exactly
        shifted[1] = 0.0  # subtract xi'(q) t: kills the linear part exactly
        xi_q = self._from_array(shifted)
        xi_bar_q = xi_q.scale_domain(1.0 - q)
        xi_hat_q = self.scale_domain(q)
        return xi_q, xi_bar_q, xi_hat_q

    def band_section(self, q: float) -> "Mixture":
        """Covariance of the original field along a sub-sphere of common
        overlap q, as a function of the orthogonal-part overlap:
        xi(q + (1-q) t) - xi(q). Keeps its linear term (an effective field).
        """
        if not 0.0 <= q < 1.0:
            raise MixtureError(f"section overlap must be in [0,1), got {q}")
        shifted = self._shifted_coeffs(q)
        shifted[0] = 0.0
        arr = shifted * ((1.0 - q) ** np.arange(len(shifted), dtype=float))
        return self._from_array(arr)

    def level_mixtures(
        self, ladder: Sequence[float]
    ) -> list[tuple["Mixture", "Mixture"]]:
        """Per-level reduced covariances for a support ladder.

        For 0 = q_0 < q_1 < ... < q_k < q_{k+1} = 1 (the ladder argument
        lists q_1..q_k) returns, for each level m = 0..k, the pair
        (xi_q_m((q_{m+1}-q_m) t), xi_q_m((1-q_m) t)).
        """
        qs = [0.0, *map(float, ladder), 1.0]
        for a, b in zip(qs, qs[1:]):
            if not a < b:
                raise MixtureError(f"ladder must be strictly increasing in (0,1): {ladder}")
        out = []
        for m in range(len(qs) - 1):
            xi_qm, _, _ = self.shift_restrict(qs[m])
            out.append(
                (
                    xi_qm.scale_domain(qs[m + 1] - qs[m]),
                    xi_qm.scale_domain(1.0 - qs[m]),
                )
            )
        return out

    def fp_mixtures(
        self, r: float, q1: float, rho: float
    ) -> tuple["Mixture", "Mixture", float]:
        """Covariances entering the Franz-Parisi potential.

        Returns (xi_tilde, xi_fp, linear_deficit):

        * xi_tilde: section at overlap r^2, the covariance of the field on
          the band of a reference sample at overlap r.
        * xi_fp: section at tau (the conditional second-moment overlap for
          the pinned pair) minus the conditioning-induced linear slope
          xi'(rho)^2/xi'(q1) * (1-tau) * t, folded into the degree-1 slot.
        * linear_deficit: the subtracted slope, for diagnostics.
        """
        if not abs(r) < 1.0:
            raise MixtureError(f"sample overlap must satisfy |r|<1, got {r}")
        if not 0.0 < q1 < 1.0:
            raise MixtureError(f"cluster overlap must be in (0,1), got {q1}")
        half_width = math.sqrt(q1 - q1 * q1) * math.sqrt(1.0 - r * r)
        if abs(rho - r * q1) > half_width + 1e-12:
            raise MixtureError(
                f"rho={rho} outside the admissible interval around r*q1={r * q1}"
            )
        tau = r * r + (rho - r * q1) ** 2 / (q1 - q1 * q1)
        xi_tilde = self.band_section(r * r)
        section = self.band_section(tau)
        deficit = (1.0 - tau) * self.eval(rho, 1) ** 2 / self.eval(q1, 1)
        arr = np.asarray(section._c, dtype=float).copy()
        arr[1] -= deficit
        if arr[1] < -_COEFF_NEG_TOL:
            raise MixtureError(
                f"invalid (r,q1,rho) region: folded linear coefficient {arr[1]:.3e} < 0"
            )
        return xi_tilde, self._from_array(arr), deficit

    # -------------------------------------------------------------- reports

    def sigma_xi(self) -> SigmaMatrix:
        """2x2 covariance [[xi(1), xi'(1)], [xi'(1), xi''(1)+xi'(1)]] of the
        (energy density, radial derivative) pair at a critical point."""
        if self.max_degree < 2:
            raise MixtureError("sigma matrix requires mixture degree >= 2")
        v0 = self.eval(1.0) - self.const_term  # offset is not part of the field variance
        v1 = self.eval(1.0, 1)
        v2 = self.eval(1.0, 2)
        return SigmaMatrix(((v0, v1), (v1, v2 + v1)))

    def is_generic(self) -> GenericityReport:
        """Echo the caller's genericity declaration with a parity summary.

        Genericity is a property of an infinite series; a finite truncation
        can only be labeled as such, never verified.
        """
        even = tuple(p for p in self.degrees if p % 2 == 0)
        odd = tuple(p for p in self.degrees if p % 2 == 1)
        if self.generic_truncation:
            note = "declared truncation of a generic series"
        elif len(self.degrees) == 1:
            note = f"single {'odd' if self.degrees[0] % 2 else 'even'} degree"
        else:
            note = "no genericity declaration"
        return GenericityReport(self.generic_truncation, even, odd, note)

    # -------------------------------------------------------- serialization

    def to_json(self) -> str:
        obj = {
            "coeffs": {str(p): g for p, g in sorted(self.coeffs.items())},
            "const": self.const_term,
            "generic_truncation": self.generic_truncation,
        }
        return json.dumps(obj, sort_keys=True)

    @classmethod
    def from_json(cls, text: str, degree_cap: int = DEFAULT_DEGREE_CAP) -> "Mixture":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as e:
            raise MixtureError(f"mixture JSON parse error: {e}") from e
        if not isinstance(obj, dict) or "coeffs" not in obj:
            raise MixtureError("mixture JSON must be an object with a 'coeffs' field")
        raw = obj["coeffs"]
        if not isinstance(raw, dict):
            raise MixtureError("'coeffs' must map degree strings to numbers")
        try:
            coeffs = {int(p): float(g) for p, g in raw.items()}
        except (TypeError, ValueError) as e:
            raise MixtureError(f"bad coefficient entry: {e}") from e
        return cls(
            coeffs,
            const_term=float(obj.get("const", 0.0)),
            generic_truncation=bool(obj.get("generic_truncation", False)),
            degree_cap=degree_cap,
        )

    @classmethod
    def from_file(cls, path) -> "Mixture":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json(fh.read())


def pure(p: int, weight: float = 1.0) -> Mixture:
    """Single-degree mixture weight * t^p."""
    return Mixture({p: weight})
