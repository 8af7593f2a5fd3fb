"""Truncated two-mode Fock space and operators acting on it.

Two numeric frames are supported:

* float frame: entries are complex128 in the orthonormal occupation basis
  ``|n1, n2> = (a1^+)^n1 (a2^+)^n2 |0> / sqrt(n1! n2!)``, stored as a
  ``scipy.sparse`` CSR array;
* exact frame: entries are Gaussian rationals in the *monomial* basis
  ``|n1, n2) = (a1^+)^n1 (a2^+)^n2 |0>``, stored as a sparse
  ``sympy`` ``DomainMatrix`` over ``QQ_I``.  In this basis every ladder
  matrix element is an integer, so commutator identities can be checked
  with no rounding at all.

Both frames describe the same abstract operator; :meth:`OperatorMatrix.to_float`
converts exact operators to the float frame.

Every operator carries a level ``shift`` (it maps level ``N`` to
``N + shift``) and a ``trusted_level``: columns at levels up to
``trusted_level`` coincide with the operator on the untruncated Fock space.
Products update the trusted level with ``min(L_B, L_A - shift_B)``, which
quarantines the rows that a truncated creation operator silently drops.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property
from numbers import Number

import numpy as np
import scipy.sparse as sp
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

__all__ = [
    "FockBasis",
    "OperatorMatrix",
    "commutator",
    "exact_scalar",
    "to_python",
    "ladder_matrix",
    "identity",
    "diagonal_operator",
    "number_operator",
    "PAULI",
    "coordinate_ops",
]


class FockBasis:
    """Occupation states ``(n1, n2)`` with ``n1 + n2 <= n_max``.

    States are ordered by level ``N = n1 + n2`` and, within a level, by
    ``n1`` descending, so level ``N`` occupies the contiguous index range
    ``[N(N+1)/2, (N+1)(N+2)/2)`` and level-diagonal operators are block
    diagonal.
    """

    def __init__(self, n_max: int):
        if n_max < 0:
            raise ValueError(f"n_max must be non-negative, got {n_max}")
        self.n_max = int(n_max)
        self.states = [(N - i, i) for N in range(self.n_max + 1) for i in range(N + 1)]
        self.dim = len(self.states)
        self._index = {s: k for k, s in enumerate(self.states)}

    def __repr__(self):
        return f"FockBasis(n_max={self.n_max})"

    def __eq__(self, other):
        return isinstance(other, FockBasis) and other.n_max == self.n_max

    def __hash__(self):
        return hash(("FockBasis", self.n_max))

    def __len__(self):
        return self.dim

    def index(self, n1: int, n2: int) -> int:
        return self._index[(n1, n2)]

    def level_of(self, state) -> int:
        if isinstance(state, (int, np.integer)):
            state = self.states[state]
        return state[0] + state[1]

    def level_slice(self, N: int) -> slice:
        start = N * (N + 1) // 2
        return slice(start, start + N + 1)

    @cached_property
    def levels(self) -> np.ndarray:
        return np.array([n1 + n2 for n1, n2 in self.states], dtype=np.int64)

    @cached_property
    def gram(self) -> list[int]:
        """Squared norms ``n1! n2!`` of the monomial basis vectors."""
        return [math.factorial(n1) * math.factorial(n2) for n1, n2 in self.states]


def exact_scalar(x):
    """Convert ``x`` to a Gaussian rational.

    Floats and complex numbers are converted exactly from their binary
    representation, so ``0.5`` and ``2j`` are safe while ``0.1`` is not.
    """
    if isinstance(x, QQ_I.dtype):
        return x
    if isinstance(x, (complex, np.complexfloating)):
        return QQ_I(_qq(Fraction(x.real)), _qq(Fraction(x.imag)))
    return QQ_I(_qq(Fraction(x)), QQ.zero)


def _qq(f: Fraction):
    return QQ(f.numerator, f.denominator)


def _frac(q) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def to_python(v):
    """Gaussian rational -> ``Fraction`` (if real) or ``complex``."""
    re, im = _frac(v.x), _frac(v.y)
    if im == 0:
        return re
    return complex(float(re), float(im))


def _conj(v):
    return QQ_I(v.x, -v.y)


def _absf(v) -> float:
    return math.hypot(float(_frac(v.x)), float(_frac(v.y)))


class OperatorMatrix:
    """A homogeneous linear operator on a truncated Fock space."""

    __array_priority__ = 1000

    def __init__(self, basis: FockBasis, data, shift: int = 0, trusted_level: int | None = None):
        self.basis = basis
        self.data = data
        self.shift = int(shift)
        if trusted_level is None:
            trusted_level = basis.n_max - max(self.shift, 0)
        self.trusted_level = int(trusted_level)

    # -- construction helpers -------------------------------------------------
    @classmethod
    def _from_entries(cls, basis, entries, exact, shift, trusted_level=None):
        """Build from ``{(row, col): value}``; values are Python numbers."""
        n = basis.dim
        if exact:
            dod = {}
            for (r, c), v in entries.items():
                v = exact_scalar(v)
                if v:
                    dod.setdefault(r, {})[c] = v
            data = DomainMatrix.from_dod(dod, (n, n), QQ_I)
        else:
            if entries:
                rows, cols = zip(*entries.keys())
                vals = np.array([complex(v) for v in entries.values()])
            else:
                rows, cols, vals = (), (), np.zeros(0, complex)
            data = sp.csr_array((vals, (rows, cols)), shape=(n, n), dtype=complex)
        return cls(basis, data, shift, trusted_level)

    def _wrap(self, data, shift=None, trusted_level=None):
        return OperatorMatrix(
            self.basis,
            data,
            self.shift if shift is None else shift,
            self.trusted_level if trusted_level is None else trusted_level,
        )

    # -- properties -----------------------------------------------------------
    @property
    def exact(self) -> bool:
        return isinstance(self.data, DomainMatrix)

    @property
    def shape(self):
        return (self.basis.dim, self.basis.dim)

    @property
    def lossy(self) -> bool:
        """True when some columns differ from the untruncated operator."""
        return self.trusted_level < self.basis.n_max

    def is_level_diagonal(self) -> bool:
        return self.shift == 0

    def __repr__(self):
        frame = "exact" if self.exact else "float"
        return (
            f"OperatorMatrix({self.basis!r}, {frame}, shift={self.shift}, "
            f"trusted_level={self.trusted_level}, nnz={self.nnz})"
        )

    @property
    def nnz(self) -> int:
        if self.exact:
            return self.data.nnz()
        return int(self.data.count_nonzero())

    def items(self):
        """Iterate over nonzero ``(row, col, value)`` triples."""
        if self.exact:
            for r, row in self.data.to_dod().items():
                for c, v in row.items():
                    yield r, c, to_python(v)
        else:
            coo = self.data.tocoo()
            for r, c, v in zip(coo.row, coo.col, coo.data):
                if v != 0:
                    yield int(r), int(c), complex(v)

    def entry(self, row, col):
        """Matrix element between two states (pairs) or two indices."""
        b = self.basis
        r = b.index(*row) if isinstance(row, tuple) else int(row)
        c = b.index(*col) if isinstance(col, tuple) else int(col)
        if self.exact:
            v = self.data.to_dod().get(r, {}).get(c)
            return Fraction(0) if v is None else to_python(v)
        return complex(self.data[r, c])

    # -- arithmetic -------------------------------------------------------------
    def _check_compatible(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.basis != self.basis:
            raise ValueError("operators live on different bases")
        if other.exact != self.exact:
            raise TypeError("cannot mix exact and float operators; use to_float()")
        return True

    def _check_same_shift(self, other):
        if self.shift != other.shift and self.nnz and other.nnz:
            raise ValueError(
                f"sum of operators with different level shifts ({self.shift}, {other.shift})"
            )

    def __add__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        self._check_same_shift(other)
        shift = self.shift if self.nnz else other.shift
        return self._wrap(self.data + other.data, shift, min(self.trusted_level, other.trusted_level))

    def __sub__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        self._check_same_shift(other)
        shift = self.shift if self.nnz else other.shift
        return self._wrap(self.data - other.data, shift, min(self.trusted_level, other.trusted_level))

    def __neg__(self):
        return self._wrap(-self.data)

    def __mul__(self, scalar):
        if isinstance(scalar, OperatorMatrix):
            raise TypeError("use @ for operator products")
        if not isinstance(scalar, (Number, QQ_I.dtype)):
            return NotImplemented
        if self.exact:
            return self._wrap(self.data * exact_scalar(scalar))
        return self._wrap(self.data * complex(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if self.exact:
            return self * (1 / Fraction(scalar) if not isinstance(scalar, complex) else 1 / scalar)
        return self * (1 / scalar)

    def __matmul__(self, other):
        if self._check_compatible(other) is NotImplemented:
            return NotImplemented
        trusted = min(other.trusted_level, self.trusted_level - other.shift)
        return self._wrap(self.data @ other.data if not self.exact else self.data * other.data,
                          self.shift + other.shift, trusted)

    # -- structure --------------------------------------------------------------
    def adjoint(self) -> "OperatorMatrix":
        """Hermitian adjoint with respect to the Fock inner product."""
        if self.exact:
            g = self.basis.gram
            dod = {}
            for r, row in self.data.to_dod().items():
                for c, v in row.items():
                    # (A^+)[c, r] = conj(A[r, c]) * g[r] / g[c] in the monomial frame
                    dod.setdefault(c, {})[r] = _conj(v) * QQ_I(QQ(g[r], g[c]), QQ.zero)
            data = DomainMatrix.from_dod(dod, self.shape, QQ_I)
        else:
            data = self.data.conj().T.tocsr()
        return self._wrap(data, -self.shift, self.basis.n_max - max(-self.shift, 0))

    def projector_levels(self, max_level: int) -> "OperatorMatrix":
        """Projector onto levels ``0..max_level`` in this operator's frame."""
        keep = [k for k in range(self.basis.dim) if self.basis.levels[k] <= max_level]
        return OperatorMatrix._from_entries(
            self.basis, {(k, k): 1 for k in keep}, self.exact, 0, self.basis.n_max
        )

    def restrict(self, max_level: int) -> "OperatorMatrix":
        """Keep only entries whose row and column levels are ``<= max_level``."""
        P = self.projector_levels(max_level)
        out = P @ self @ P
        out.trusted_level = self.trusted_level
        return out

    def max_abs(self, max_level: int | None = None) -> float:
        op = self if max_level is None else self.restrict(max_level)
        if op.exact:
            vals = [_absf(v) for row in op.data.to_dod().values() for v in row.values()]
            return max(vals, default=0.0)
        if op.data.nnz == 0:
            return 0.0
        return float(np.abs(op.data.data).max())

    def is_zero(self, max_level: int | None = None) -> bool:
        op = self if max_level is None else self.restrict(max_level)
        if op.exact:
            return op.data.nnz() == 0
        return op.max_abs() == 0.0

    def trace(self):
        if self.exact:
            dod = self.data.to_dod()
            t = QQ_I.zero
            for k, row in dod.items():
                if k in row:
                    t += row[k]
            return to_python(t)
        return complex(self.data.diagonal().sum())

    def to_float(self) -> "OperatorMatrix":
        """Convert an exact (monomial-frame) operator to the float frame."""
        if not self.exact:
            return self
        g = self.basis.gram
        entries = {}
        for r, c, v in self.items():
            # |t) = sqrt(g_t) |t>, so A_norm[s, t] = A[s, t] sqrt(g_s / g_t)
            entries[(r, c)] = complex(v) * math.sqrt(g[r] / g[c])
        return OperatorMatrix._from_entries(self.basis, entries, False, self.shift, self.trusted_level)

    def to_dense(self) -> np.ndarray:
        """Dense complex matrix in the orthonormal occupation basis."""
        return self.to_float().data.toarray()

    def is_hermitian(self, rtol: float = 1e-13) -> bool:
        diff = (self - self.adjoint()).max_abs()
        scale = max(self.max_abs(), 1.0)
        if self.exact:
            return diff == 0
        return diff <= rtol * scale


def commutator(A: OperatorMatrix, B: OperatorMatrix) -> OperatorMatrix:
    return A @ B - B @ A


def identity(basis: FockBasis, exact: bool = False) -> OperatorMatrix:
    return OperatorMatrix._from_entries(
        basis, {(k, k): 1 for k in range(basis.dim)}, exact, 0, basis.n_max
    )


def diagonal_operator(basis: FockBasis, level_values, exact: bool = False) -> OperatorMatrix:
    """Level-diagonal operator ``f(N)`` from a sequence of per-level values.

    ``level_values[N]`` is used on level ``N``; missing levels get zero.
    """
    vals = list(level_values)
    entries = {}
    for k in range(basis.dim):
        N = int(basis.levels[k])
        if N < len(vals) and vals[N] != 0:
            entries[(k, k)] = vals[N]
    return OperatorMatrix._from_entries(basis, entries, exact, 0, basis.n_max)


def ladder_matrix(basis: FockBasis, mode: int, kind: str, exact: bool = False) -> OperatorMatrix:
    """Annihilation (``kind='annihilate'``) or creation operator for mode 1 or 2.

    Creation maps the top level out of the basis; those images are dropped
    and the result has ``trusted_level = n_max - 1``.
    """
    if mode not in (1, 2):
        raise ValueError(f"mode must be 1 or 2, got {mode}")
    if kind not in ("annihilate", "create"):
        raise ValueError(f"kind must be 'annihilate' or 'create', got {kind!r}")
    entries = {}
    for col, (n1, n2) in enumerate(basis.states):
        n = n1 if mode == 1 else n2
        if kind == "annihilate":
            if n == 0:
                continue
            target = (n1 - 1, n2) if mode == 1 else (n1, n2 - 1)
            val = n if exact else math.sqrt(n)
        else:
            if n1 + n2 == basis.n_max:
                continue
            target = (n1 + 1, n2) if mode == 1 else (n1, n2 + 1)
            val = 1 if exact else math.sqrt(n + 1)
        entries[(basis.index(*target), col)] = val
    shift = -1 if kind == "annihilate" else 1
    return OperatorMatrix._from_entries(basis, entries, exact, shift)


def number_operator(basis: FockBasis, exact: bool = False) -> OperatorMatrix:
    return diagonal_operator(basis, range(basis.n_max + 1), exact)


PAULI = (
    ((0, 1), (1, 0)),
    ((0, -1j), (1j, 0)),
    ((1, 0), (0, -1)),
)


def coordinate_ops(basis: FockBasis, lam, exact: bool = False, sigma=PAULI):
    """Noncommutative coordinates ``x_j = lam a^+ sigma_j a``, ``N`` and ``r``.

    Returns ``(x1, x2, x3, N, r)`` with ``r = lam (N + 1)``.  All five are
    level-diagonal and exact on the whole truncated space.
    """
    if exact:
        lam = Fraction(lam)
    a = [ladder_matrix(basis, m, "annihilate", exact) for m in (1, 2)]
    ad = [ladder_matrix(basis, m, "create", exact) for m in (1, 2)]
    xs = []
    for s in sigma:
        x = None
        for al in range(2):
            for be in range(2):
                if s[al][be] == 0:
                    continue
                term = (ad[al] @ a[be]) * s[al][be]
                x = term if x is None else x + term
        xs.append(x * lam)
    N = number_operator(basis, exact)
    r = (N + identity(basis, exact)) * lam
    return xs[0], xs[1], xs[2], N, r
