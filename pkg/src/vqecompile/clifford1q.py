"""The 24-element single-qubit Clifford group, indexed, with lookup tables.

Elements are stored as 2x2 matrices with the global phase fixed.  Words are
shortest time-ordered gate sequences over {h, s, sdg, x}.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

_GEN = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2),
    "s": np.diag([1, 1j]).astype(complex),
    "sdg": np.diag([1, -1j]).astype(complex),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
}
_X = _GEN["x"]
_Z = np.diag([1, -1]).astype(complex)


def _key(m: np.ndarray) -> tuple:
    flat = m.ravel()
    k = int(np.argmax(np.abs(flat) > 1e-6))
    m = m * (abs(flat[k]) / flat[k])
    return tuple(np.round(m.ravel(), 6).tolist())


def _build():
    mats = [np.eye(2, dtype=complex)]
    words: list[tuple[str, ...]] = [()]
    index = {_key(mats[0]): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for name in ("h", "s", "sdg", "x"):
            m = _GEN[name] @ mats[i]  # gate applied after element i
            k = _key(m)
            if k not in index:
                index[k] = len(mats)
                mats.append(m)
                words.append(words[i] + (name,))
                queue.append(index[k])
    return mats, words, index


MATRICES, WORDS, _INDEX = _build()
assert len(MATRICES) == 24
IDENTITY = 0


def index_of(m: np.ndarray) -> int:
    return _INDEX[_key(m)]


def from_gate(kind: str) -> int:
    return index_of(_GEN[kind])


@lru_cache(maxsize=None)
def compose(first: int, then: int) -> int:
    """Element equal to applying ``first`` and then ``then``."""
    return index_of(MATRICES[then] @ MATRICES[first])


@lru_cache(maxsize=None)
def inverse(i: int) -> int:
    return index_of(MATRICES[i].conj().T)


@lru_cache(maxsize=None)
def is_diagonal(i: int) -> bool:
    m = MATRICES[i]
    return abs(m[0, 1]) < 1e-9 and abs(m[1, 0]) < 1e-9


@lru_cache(maxsize=None)
def commutes_with_x(i: int) -> bool:
    m = MATRICES[i]
    return bool(np.allclose(m @ _X, _X @ m))


def _rz(k: int) -> np.ndarray:
    return np.diag([np.exp(-0.25j * np.pi * k), np.exp(0.25j * np.pi * k)])


def _rx(k: int) -> np.ndarray:
    c, s = np.cos(np.pi * k / 4), np.sin(np.pi * k / 4)
    return np.array([[c, -1j * s], [-1j * s, c]])


@lru_cache(maxsize=None)
def euler_zxz(i: int) -> tuple[int, int, int]:
    """Quarter turns (a, b, c) with element ~ Rz(a pi/2) Rx(b pi/2) Rz(c pi/2).

    Minimises the middle rotation (0 before 2 before odd).
    """
    return _euler(i, _rz, _rx)


@lru_cache(maxsize=None)
def euler_xzx(i: int) -> tuple[int, int, int]:
    """Quarter turns (a, b, c) with element ~ Rx(a pi/2) Rz(b pi/2) Rx(c pi/2)."""
    return _euler(i, _rx, _rz)


def _euler(i, outer, inner):
    target = _key(MATRICES[i])
    for b in (0, 2, 1, 3):
        for a in range(4):
            for c in range(4):
                if _key(outer(a) @ inner(b) @ outer(c)) == target:
                    return (a, b, c)
    raise AssertionError("no Euler decomposition found")  # pragma: no cover


def rz_quarter(k: int) -> int:
    return index_of(_rz(k))


def rx_quarter(k: int) -> int:
    return index_of(_rx(k))
