"""
Bit-packed Boolean vectors and matrices over the Boolean semiring.

Vectors and matrix rows are stored as ``numpy.uint64`` words with an LSB-first
layout: logical bit ``j`` lives in word ``j // 64`` at bit position ``j % 64``.
Bits at positions ``>= n`` of the last word are always zero, so population
counts never need masking.

The machine word width used here (:data:`WORD_BITS`) is an implementation
constant. It is unrelated to the cell-probe word size ``w``, which is a runtime
parameter of :mod:`omv_tools.cellprobe`.

Example:
    .. code-block:: python

        from omv_tools.bitcore import BitMatrix, IndexSet, submatrix_has_one

        m = BitMatrix.identity(4)
        u = IndexSet.from_indices(4, [0])
        submatrix_has_one(m, u, u)  # -> 1
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from omv_tools.errors import ContractViolation

WORD_BITS = 64
_ONE = np.uint64(1)
_ALL = np.uint64(0xFFFFFFFFFFFFFFFF)


def n_words(n: int) -> int:
    """Number of 64-bit words needed for ``n`` bits."""
    return (n + WORD_BITS - 1) // WORD_BITS


def _tail_mask(n: int) -> np.uint64:
    rem = n % WORD_BITS
    if rem == 0:
        return _ALL
    return np.uint64((1 << rem) - 1)


def _pack(bits: np.ndarray, n: int) -> np.ndarray:
    """Pack the trailing axis of a 0/1 array into little-endian uint64 words."""
    bits = np.asarray(bits, dtype=np.uint8)
    words = n_words(n)
    lead = bits.shape[:-1]
    padded = np.zeros(lead + (words * WORD_BITS,), dtype=np.uint8)
    padded[..., :n] = bits[..., :n] != 0
    packed = np.packbits(padded, axis=-1, bitorder="little")
    return packed.view("<u8").astype(np.uint64).reshape(lead + (words,))


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    """Inverse of :func:`_pack`: expand uint64 words into a uint8 0/1 array of length ``n``."""
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8)
    bits = np.unpackbits(as_bytes, axis=-1, bitorder="little")
    return bits[..., :n]


class BitVector:
    """
    Fixed-length packed bit vector.

    :ivar words: Payload words; the last word keeps its unused high bits at zero.
    :vartype words: numpy.ndarray
    """

    __slots__ = ("_n", "words")
    __hash__ = None  # mutable

    def __init__(self, n: int, words: np.ndarray | None = None):
        if n < 0:
            raise ContractViolation(f"Vector length must be non-negative, got {n}")
        self._n = n
        if words is None:
            self.words = np.zeros(n_words(n), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True).reshape(-1)
            if words.shape[0] != n_words(n):
                raise ContractViolation(f"Expected {n_words(n)} words for {n} bits, got {words.shape[0]}")
            self.words = words
            self._canonicalize()

    def _canonicalize(self) -> None:
        if self._n and self.words.shape[0]:
            self.words[-1] &= _tail_mask(self._n)

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        v = cls(n)
        v.words[:] = _ALL
        v._canonicalize()
        return v

    @classmethod
    def from_bits(cls, bits: Iterable[int] | np.ndarray) -> "BitVector":
        arr = np.asarray(bits if isinstance(bits, np.ndarray) else list(bits), dtype=np.uint8).reshape(-1)
        v = cls(arr.shape[0])
        if arr.shape[0]:
            v.words = _pack(arr, arr.shape[0])
        return v

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "BitVector":
        arr = np.zeros(n, dtype=np.uint8)
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= n):
            raise ContractViolation(f"Index out of range for a vector of length {n}")
        arr[idx] = 1
        return cls.from_bits(arr)

    @classmethod
    def from_string(cls, text: str) -> "BitVector":
        text = text.strip()
        if any(ch not in "01" for ch in text):
            raise ContractViolation(f"Vector text must contain only 0/1 characters: {text!r}")
        return cls.from_bits(np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0"))

    @property
    def length(self) -> int:
        return self._n

    def __len__(self) -> int:
        return self._n

    def _check_index(self, j: int) -> None:
        if not 0 <= j < self._n:
            raise IndexError(f"Bit index {j} out of range for length {self._n}")

    def get(self, j: int) -> int:
        self._check_index(j)
        return int((self.words[j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & _ONE)

    def set(self, j: int, value: int | bool = 1) -> None:
        self._check_index(j)
        mask = _ONE << np.uint64(j % WORD_BITS)
        if value:
            self.words[j // WORD_BITS] |= mask
        else:
            self.words[j // WORD_BITS] &= ~mask

    def __getitem__(self, j: int) -> int:
        return self.get(j)

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def any(self) -> bool:
        return bool(np.any(self.words))

    def support(self) -> np.ndarray:
        """Sorted indices of the set bits."""
        return np.flatnonzero(self.to_array()).astype(np.int64)

    def to_array(self) -> np.ndarray:
        return _unpack(self.words, self._n).copy()

    def to_string(self) -> str:
        return (self.to_array() + ord("0")).astype(np.uint8).tobytes().decode("ascii")

    def copy(self) -> "BitVector":
        return BitVector(self._n, self.words)

    def _check_same(self, other: "BitVector") -> None:
        if not isinstance(other, BitVector):
            raise TypeError("BitVector operands expected")
        if other._n != self._n:
            raise ContractViolation(f"Length mismatch: {self._n} vs {other._n}")

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check_same(other)
        return BitVector(self._n, self.words & other.words)

    def __or__(self, other: "BitVector") -> "BitVector":
        self._check_same(other)
        return BitVector(self._n, self.words | other.words)

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check_same(other)
        return BitVector(self._n, self.words ^ other.words)

    def __invert__(self) -> "BitVector":
        return BitVector(self._n, ~self.words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self._n == other._n and bool(np.array_equal(self.words, other.words))

    def __repr__(self) -> str:
        preview = self.to_string()
        if len(preview) > 64:
            preview = preview[:64] + "..."
        return f"BitVector(n={self._n}, bits={preview})"


class BitMatrix:
    """
    Row-major packed Boolean matrix.

    :ivar words: ``(rows, n_words(cols))`` uint64 array; row ``i`` is ``words[i]``.
    :vartype words: numpy.ndarray
    """

    __slots__ = ("_rows", "_cols", "words")
    __hash__ = None

    def __init__(self, rows: int, cols: int, words: np.ndarray | None = None):
        if rows < 0 or cols < 0:
            raise ContractViolation(f"Matrix shape must be non-negative, got {rows}x{cols}")
        self._rows = rows
        self._cols = cols
        if words is None:
            self.words = np.zeros((rows, n_words(cols)), dtype=np.uint64)
        else:
            words = np.array(words, dtype=np.uint64, copy=True)
            if words.shape != (rows, n_words(cols)):
                raise ContractViolation(f"Expected word array of shape {(rows, n_words(cols))}, got {words.shape}")
            self.words = words
            self._canonicalize()

    def _canonicalize(self) -> None:
        if self._cols and self.words.shape[1]:
            self.words[:, -1] &= _tail_mask(self._cols)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "BitMatrix":
        return cls(rows, rows if cols is None else cols)

    @classmethod
    def ones(cls, rows: int, cols: int | None = None) -> "BitMatrix":
        m = cls(rows, rows if cols is None else cols)
        m.words[:] = _ALL
        m._canonicalize()
        return m

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls.from_array(np.eye(n, dtype=np.uint8))

    @classmethod
    def from_array(cls, array: np.ndarray | Sequence[Sequence[int]]) -> "BitMatrix":
        arr = np.asarray(array, dtype=np.uint8)
        if arr.ndim != 2:
            raise ContractViolation(f"Expected a 2D 0/1 array, got {arr.ndim} dimensions")
        rows, cols = arr.shape
        m = cls(rows, cols)
        if rows and cols:
            m.words = _pack(arr, cols)
        return m

    @classmethod
    def from_rows(cls, rows: Sequence[BitVector], cols: int | None = None) -> "BitMatrix":
        if not rows:
            return cls(0, cols or 0)
        width = rows[0].length
        if any(r.length != width for r in rows):
            raise ContractViolation("All rows of a matrix must have the same length")
        return cls(len(rows), width, np.stack([r.words for r in rows]) if n_words(width) else None)

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "BitMatrix":
        return cls.from_rows([BitVector.from_string(line) for line in lines])

    @classmethod
    def random(cls, rows: int, cols: int, density: float, rng: np.random.Generator) -> "BitMatrix":
        return cls.from_array(rng.random((rows, cols)) < density)

    @property
    def rows(self) -> int:
        return self._rows

    @property
    def cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return self._rows, self._cols

    def is_square(self) -> bool:
        return self._rows == self._cols

    def row(self, i: int) -> BitVector:
        return BitVector(self._cols, self.words[i])

    def get(self, i: int, j: int) -> int:
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(f"Entry ({i}, {j}) out of range for shape {self.shape}")
        return int((self.words[i, j // WORD_BITS] >> np.uint64(j % WORD_BITS)) & _ONE)

    def set(self, i: int, j: int, value: int | bool = 1) -> None:
        if not (0 <= i < self._rows and 0 <= j < self._cols):
            raise IndexError(f"Entry ({i}, {j}) out of range for shape {self.shape}")
        mask = _ONE << np.uint64(j % WORD_BITS)
        if value:
            self.words[i, j // WORD_BITS] |= mask
        else:
            self.words[i, j // WORD_BITS] &= ~mask

    def get_many(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Vectorised lookup of entries ``(rows[k], cols[k])``; returns a bool array."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        w = self.words[rows, cols // WORD_BITS]
        return ((w >> (cols % WORD_BITS).astype(np.uint64)) & _ONE).astype(bool)

    def popcount(self) -> int:
        return int(np.bitwise_count(self.words).sum())

    def row_popcounts(self) -> np.ndarray:
        return np.bitwise_count(self.words).sum(axis=1, dtype=np.int64)

    def to_array(self) -> np.ndarray:
        if not self._rows:
            return np.zeros((0, self._cols), dtype=np.uint8)
        return _unpack(self.words, self._cols).copy()

    def to_strings(self) -> list[str]:
        return [self.row(i).to_string() for i in range(self._rows)]

    def copy(self) -> "BitMatrix":
        return BitMatrix(self._rows, self._cols, self.words)

    def window(self, row0: int, col0: int, height: int, width: int) -> "BitMatrix":
        """
        Copy of the ``height x width`` window starting at ``(row0, col0)``.

        Parts of the window that fall outside the matrix are zero.
        """
        out = np.zeros((height, width), dtype=np.uint8)
        r1 = min(self._rows, row0 + height)
        c1 = min(self._cols, col0 + width)
        if r1 > row0 and c1 > col0:
            out[: r1 - row0, : c1 - col0] = self.to_array_rows(row0, r1)[:, col0:c1]
        return BitMatrix.from_array(out)

    def to_array_rows(self, start: int, stop: int) -> np.ndarray:
        return _unpack(self.words[start:stop], self._cols)

    def append_column(self, column: BitVector) -> "BitMatrix":
        """New matrix with ``column`` appended as the last column."""
        if column.length != self._rows:
            raise ContractViolation(f"Column length {column.length} does not match {self._rows} rows")
        cols = self._cols + 1
        words = np.zeros((self._rows, n_words(cols)), dtype=np.uint64)
        words[:, : self.words.shape[1]] = self.words
        bits = column.to_array().astype(np.uint64)
        words[:, self._cols // WORD_BITS] |= bits << np.uint64(self._cols % WORD_BITS)
        return BitMatrix(self._rows, cols, words)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.words, other.words))

    def __repr__(self) -> str:
        return f"BitMatrix({self._rows}x{self._cols}, ones={self.popcount()})"


class IndexSet:
    """
    Immutable subset of ``[n]`` backed by a membership :class:`BitVector`.

    The cardinality is computed once at construction.
    """

    __slots__ = ("_mask", "_card", "_indices")

    def __init__(self, mask: BitVector):
        self._mask = mask.copy()
        self._card = self._mask.popcount()
        self._indices: np.ndarray | None = None

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "IndexSet":
        return cls(BitVector.from_indices(n, indices))

    @classmethod
    def full(cls, n: int) -> "IndexSet":
        return cls(BitVector.ones(n))

    @classmethod
    def empty(cls, n: int) -> "IndexSet":
        return cls(BitVector.zeros(n))

    @property
    def universe(self) -> int:
        return self._mask.length

    @property
    def mask(self) -> BitVector:
        return self._mask

    @property
    def cardinality(self) -> int:
        return self._card

    def __len__(self) -> int:
        return self._card

    def __contains__(self, i: int) -> bool:
        return 0 <= i < self.universe and bool(self._mask.get(i))

    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._indices = self._mask.support()
        return self._indices

    def __iter__(self):
        return iter(int(i) for i in self.indices())

    def complement(self) -> "IndexSet":
        return IndexSet(~self._mask)

    def restrict(self, start: int, size: int) -> "IndexSet":
        """Members in ``[start, start + size)``, shifted to a universe of ``size`` (ragged tail is padding)."""
        idx = self.indices()
        local = idx[(idx >= start) & (idx < start + size)] - start
        return IndexSet.from_indices(size, local)

    def halves(self) -> tuple["IndexSet", "IndexSet"]:
        """Split the members into a lower and an upper half (by index order)."""
        idx = self.indices()
        mid = (idx.shape[0] + 1) // 2
        return (IndexSet.from_indices(self.universe, idx[:mid]),
                IndexSet.from_indices(self.universe, idx[mid:]))

    def without(self, i: int) -> "IndexSet":
        mask = self._mask.copy()
        mask.set(i, 0)
        return IndexSet(mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexSet):
            return NotImplemented
        return self._mask == other._mask

    __hash__ = None

    def __repr__(self) -> str:
        return f"IndexSet(n={self.universe}, members={self.indices().tolist()[:16]}{'...' if self._card > 16 else ''})"


def inner_product_bool(a: BitVector, b: BitVector) -> int:
    """Boolean-semiring dot product: 1 iff some position holds a 1 in both vectors."""
    if a.length != b.length:
        raise ContractViolation(f"Length mismatch: {a.length} vs {b.length}")
    return int(np.any(a.words & b.words))


def _check_rectangle(m: BitMatrix, u: IndexSet, v: IndexSet) -> None:
    if u.universe != m.rows or v.universe != m.cols:
        raise ContractViolation(
            f"Index sets over ({u.universe}, {v.universe}) do not match matrix shape {m.shape}"
        )


def submatrix_has_one(m: BitMatrix, u: IndexSet, v: IndexSet) -> int:
    """1 iff ``m[U x V]`` contains a 1; each row of ``U`` is masked with ``V``'s membership words."""
    _check_rectangle(m, u, v)
    if not u.cardinality or not v.cardinality:
        return 0
    return int(np.any(m.words[u.indices()] & v.mask.words))


def count_ones(m: BitMatrix, u: IndexSet, v: IndexSet) -> int:
    """Number of 1-entries of ``m`` inside ``U x V``."""
    _check_rectangle(m, u, v)
    if not u.cardinality or not v.cardinality:
        return 0
    return int(np.bitwise_count(m.words[u.indices()] & v.mask.words).sum())


def ones_in_rectangle(m: BitMatrix, u: IndexSet, v: IndexSet) -> list[tuple[int, int]]:
    """All ``(i, j)`` in ``U x V`` with ``m(i, j) = 1``, in row-major order."""
    _check_rectangle(m, u, v)
    if not u.cardinality or not v.cardinality:
        return []
    rows = u.indices()
    block = m.words[rows] & v.mask.words
    hit = np.flatnonzero(np.any(block, axis=1))
    if not hit.size:
        return []
    bits = _unpack(block[hit], m.cols)
    r, c = np.nonzero(bits)
    return [(int(rows[hit[a]]), int(b)) for a, b in zip(r, c)]


def zero_rectangle(d: BitMatrix, u: IndexSet, v: IndexSet, row_card: np.ndarray | None = None) -> int:
    """
    Clear every entry of ``d`` inside ``U x V``.

    :param row_card: Optional per-row population counts of ``d``; decremented in place.
    :return: Number of entries that changed from 1 to 0.
    """
    _check_rectangle(d, u, v)
    if not u.cardinality or not v.cardinality:
        return 0
    rows = u.indices()
    block = d.words[rows]
    removed = np.bitwise_count(block & v.mask.words).sum(axis=1, dtype=np.int64)
    d.words[rows] = block & ~v.mask.words
    if row_card is not None:
        row_card[rows] -= removed
    return int(removed.sum())
