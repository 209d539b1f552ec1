"""Dense GF(2) linear algebra on machine-word-packed bit rows.

Rows are numpy uint64 arrays, bit j of a row stored at word j >> 6,
position j & 63.  Everything the decoders need reduces to three
operations: draw random rows, take inner products, and maintain a row
echelon basis one equation at a time.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = [
    "GF2Error",
    "DimensionError",
    "UnderdeterminedError",
    "InconsistentSystemError",
    "pack_bits",
    "unpack_bits",
    "random_row",
    "random_packed_rows",
    "encode",
    "encode_packed",
    "extract_columns",
    "rank",
    "solve",
    "IncrementalDecoder",
]


class GF2Error(Exception):
    pass


class DimensionError(GF2Error):
    pass


class UnderdeterminedError(GF2Error):
    """Fewer independent equations than unknowns; need more coded symbols."""


class InconsistentSystemError(GF2Error):
    """The equations contradict each other (0 = 1 after elimination)."""


_U64 = np.uint64


def _nwords(nbits: int) -> int:
    return (nbits + 63) >> 6


def pack_bits(bits) -> np.ndarray:
    """Pack a 0/1 sequence into a little-endian uint64 word array."""
    bits = np.ascontiguousarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise DimensionError("expected a 1-d bit array")
    n = bits.shape[0]
    nw = max(_nwords(n), 1)
    padded = np.zeros(nw * 64, dtype=np.uint8)
    padded[:n] = bits
    # packbits is big-endian within bytes; bitorder='little' matches our layout
    return np.packbits(padded, bitorder="little").view(_U64)


def unpack_bits(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of pack_bits; returns the first n bits as uint8."""
    raw = np.unpackbits(words.view(np.uint8), bitorder="little")
    return raw[:n].astype(np.uint8)


def random_row(cols: int, rng: np.random.Generator) -> np.ndarray:
    """Draw a uniform GF(2) row of the given width as a uint8 bit array.

    Consumes the generator deterministically so replay under the same
    seed reproduces the row.
    """
    if cols < 1:
        raise DimensionError("row width must be at least 1")
    return rng.integers(0, 2, size=cols, dtype=np.uint8)


def random_packed_rows(n_rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """Draw n_rows uniform rows of the given width, word-packed."""
    if cols < 1:
        raise DimensionError("row width must be at least 1")
    nw = _nwords(cols)
    words = rng.integers(0, 2**64, size=(n_rows, nw), dtype=_U64)
    tail = cols & 63
    if tail:
        words[:, -1] &= _U64((1 << tail) - 1)
    return words


def encode(row, msg) -> int:
    """Inner product of a coefficient row with message bits over GF(2)."""
    row = np.asarray(row, dtype=np.uint8)
    msg = np.asarray(msg, dtype=np.uint8)
    if row.shape != msg.shape:
        raise DimensionError(f"row width {row.shape} != message width {msg.shape}")
    return int((row & msg).sum() & 1)


def encode_packed(row_words: np.ndarray, msg_words: np.ndarray) -> int:
    """encode() on word-packed operands."""
    return int(_parity_and(row_words, msg_words))


@njit(cache=True, inline="always")
def _popcount64(x):
    x = x - ((x >> _U64(1)) & _U64(0x5555555555555555))
    x = (x & _U64(0x3333333333333333)) + ((x >> _U64(2)) & _U64(0x3333333333333333))
    x = (x + (x >> _U64(4))) & _U64(0x0F0F0F0F0F0F0F0F)
    return (x * _U64(0x0101010101010101)) >> _U64(56)


@njit(cache=True, inline="always")
def _ctz64(x):
    # x must be nonzero
    n = 0
    if x & _U64(0xFFFFFFFF) == _U64(0):
        x >>= _U64(32)
        n += 32
    if x & _U64(0xFFFF) == _U64(0):
        x >>= _U64(16)
        n += 16
    if x & _U64(0xFF) == _U64(0):
        x >>= _U64(8)
        n += 8
    if x & _U64(0xF) == _U64(0):
        x >>= _U64(4)
        n += 4
    if x & _U64(0x3) == _U64(0):
        x >>= _U64(2)
        n += 2
    if x & _U64(0x1) == _U64(0):
        n += 1
    return n


@njit(cache=True)
def _parity_and(a, b):
    acc = _U64(0)
    m = min(a.shape[0], b.shape[0])
    for j in range(m):
        acc ^= a[j] & b[j]
    return _popcount64(acc) & _U64(1)


@njit(cache=True)
def _extract_cols(row, cols, out):
    out[:] = _U64(0)
    for i in range(cols.shape[0]):
        c = cols[i]
        if (row[c >> 6] >> _U64(c & 63)) & _U64(1):
            out[i >> 6] |= _U64(1) << _U64(i & 63)


def extract_columns(row_words: np.ndarray, cols: np.ndarray) -> np.ndarray:
    """Gather the given column positions of a packed row into a new packed row."""
    cols = np.ascontiguousarray(cols, dtype=np.int64)
    out = np.zeros(max(_nwords(len(cols)), 1), dtype=_U64)
    if len(cols):
        _extract_cols(row_words, cols, out)
    return out


@njit(cache=True)
def _insert_row(basis, pivot_slot, slot, row, ncols, nwords):
    """Reduce row against the echelon basis and insert it if independent.

    Returns the new pivot column (>= 0), -1 if the row was dependent and
    consistent, -2 if it reduced to 0 = 1.  The scratch row is consumed.
    """
    w = 0
    while w < nwords:
        x = row[w]
        while x:
            b = _ctz64(x)
            col = (w << 6) + b
            if col >= ncols:
                return -2  # coefficient part vanished, RHS bit survived
            s = pivot_slot[col]
            if s < 0:
                for j in range(w, nwords):
                    basis[slot, j] = row[j]
                pivot_slot[col] = slot
                return col
            for j in range(w, nwords):
                row[j] ^= basis[s, j]
            x = row[w]
        w += 1
    return -1


@njit(cache=True)
def _back_substitute(basis, pivot_slot, ncols, nwords, out_bits):
    # Basis rows have their pivot as the lowest set bit, so sweeping
    # columns high to low closes the system without a full RREF pass.
    x = np.zeros(nwords, dtype=_U64)
    rhs_w = ncols >> 6
    rhs_b = _U64(ncols & 63)
    for c in range(ncols - 1, -1, -1):
        s = pivot_slot[c]
        acc = _U64(0)
        for j in range(c >> 6, nwords):
            acc ^= basis[s, j] & x[j]
        bit = (_popcount64(acc) & _U64(1)) ^ ((basis[s, rhs_w] >> rhs_b) & _U64(1))
        if bit:
            x[c >> 6] |= _U64(1) << _U64(c & 63)
            out_bits[c] = 1
        else:
            out_bits[c] = 0


class IncrementalDecoder:
    """Accepts GF(2) equations one at a time and tracks rank as it goes.

    Each equation is a coefficient row plus a right-hand-side bit.  Rows
    are kept in row echelon form, so rank queries are O(1) and a full
    solve is a single back-substitution sweep once rank reaches ncols.
    Feeding rows with rhs=0 turns this into a plain rank tracker.
    """

    def __init__(self, ncols: int):
        if ncols < 0:
            raise DimensionError("ncols must be nonnegative")
        self.ncols = ncols
        self._nwords = max(_nwords(ncols + 1), 1)  # bit ncols holds the RHS
        self._basis = np.zeros((max(ncols, 1), self._nwords), dtype=_U64)
        self._pivot_slot = np.full(max(ncols, 1), -1, dtype=np.int64)
        self._scratch = np.zeros(self._nwords, dtype=_U64)
        self._rank = 0
        self.inconsistent = False

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def is_complete(self) -> bool:
        return self._rank == self.ncols

    def add_packed(self, row_words: np.ndarray, rhs: int = 0) -> bool:
        """Insert a packed coefficient row; returns True if rank grew."""
        if self.ncols == 0:
            if rhs:
                self.inconsistent = True
            return False
        s = self._scratch
        s[:] = 0
        s[: row_words.shape[0]] = row_words
        if rhs:
            s[self.ncols >> 6] |= _U64(1) << _U64(self.ncols & 63)
        res = _insert_row(self._basis, self._pivot_slot, self._rank, s, self.ncols, self._nwords)
        if res >= 0:
            self._rank += 1
            return True
        if res == -2:
            self.inconsistent = True
        return False

    def add_row(self, bits, rhs: int = 0) -> bool:
        """Insert a 0/1 coefficient sequence; returns True if rank grew."""
        bits = np.asarray(bits, dtype=np.uint8)
        if bits.shape[0] != self.ncols:
            raise DimensionError(f"row width {bits.shape[0]} != ncols {self.ncols}")
        return self.add_packed(pack_bits(bits), rhs)

    def solve(self) -> np.ndarray:
        """Return the unique solution once ncols independent equations arrived."""
        if self.inconsistent:
            raise InconsistentSystemError("equations are contradictory")
        if self._rank < self.ncols:
            raise UnderdeterminedError(
                f"rank {self._rank} < {self.ncols} unknowns; need more equations"
            )
        out = np.empty(self.ncols, dtype=np.uint8)
        if self.ncols:
            _back_substitute(self._basis, self._pivot_slot, self.ncols, self._nwords, out)
        return out


def rank(mat) -> int:
    """Rank of a 0/1 matrix over GF(2)."""
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    if mat.size == 0:
        return 0
    dec = IncrementalDecoder(mat.shape[1])
    for r in mat:
        dec.add_row(r)
        if dec.is_complete:
            break
    return dec.rank


def solve(mat, rhs) -> np.ndarray:
    """Solve mat @ x = rhs over GF(2) for a unique x.

    Raises UnderdeterminedError when the rows do not pin down every
    unknown and InconsistentSystemError when they contradict.
    """
    mat = np.atleast_2d(np.asarray(mat, dtype=np.uint8))
    rhs = np.asarray(rhs, dtype=np.uint8).ravel()
    if mat.shape[0] != rhs.shape[0]:
        raise DimensionError(f"{mat.shape[0]} rows but {rhs.shape[0]} right-hand sides")
    dec = IncrementalDecoder(mat.shape[1])
    for r, b in zip(mat, rhs):
        dec.add_row(r, int(b))
    return dec.solve()
