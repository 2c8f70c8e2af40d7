"""
Plain-text fixture formats.

Formats:
    - **matrix**: first line ``n m``; then ``n`` lines of ``m`` characters from ``{0,1}``.
    - **vector**: one line of ``n`` characters from ``{0,1}``; a vector list file holds one per line.
    - **query pairs**: one ``U V`` pair per line, each a 0/1 string (vMv workloads).
    - **corpus** (partial match): first line ``n m k``; then ``n`` lines of ``m`` symbols.
      ``*`` is the wildcard; symbols are letters ``a``..``z`` when ``k <= 26`` and the line has no
      spaces, otherwise whitespace-separated integers ``0..k-1``. Unspaced lines with ``k <= 10``
      may also use the digits ``0``..``k-1``.
    - **2-CNF**: DIMACS, ``p cnf <vars> <clauses>`` followed by clause lines ``a b 0`` with signed
      1-based literals; ``c`` lines are comments.
"""
import logging
from pathlib import Path
from typing import Iterable, Sequence

from omv_tools.bitcore import BitMatrix, BitVector, IndexSet
from omv_tools.errors import InputError

logger = logging.getLogger(__name__)

Pattern = list[int | None]
STAR = "*"


def _lines(text: str) -> list[str]:
    return [line.strip() for line in text.splitlines() if line.strip()]


# --------------------------------------------------------------------------- #
# Matrices and vectors
# --------------------------------------------------------------------------- #

def format_matrix(m: BitMatrix) -> str:
    return "\n".join([f"{m.rows} {m.cols}", *m.to_strings()]) + "\n"


def parse_matrix(text: str) -> BitMatrix:
    lines = _lines(text)
    if not lines:
        raise InputError("Empty matrix text")
    try:
        rows, cols = (int(x) for x in lines[0].split())
    except ValueError as e:
        raise InputError(f"Matrix header must be 'n m', got {lines[0]!r}") from e
    body = lines[1:]
    if len(body) != rows:
        raise InputError(f"Matrix header announces {rows} rows, found {len(body)}")
    for k, line in enumerate(body, start=2):
        if len(line) != cols or any(ch not in "01" for ch in line):
            raise InputError(f"Line {k}: expected {cols} characters from {{0,1}}")
    if rows == 0:
        return BitMatrix(0, cols)
    return BitMatrix.from_strings(body)


def format_vectors(vectors: Iterable[BitVector]) -> str:
    return "".join(v.to_string() + "\n" for v in vectors)


def parse_vectors(text: str, n: int | None = None) -> list[BitVector]:
    out = []
    for k, line in enumerate(_lines(text), start=1):
        if any(ch not in "01" for ch in line):
            raise InputError(f"Line {k}: vector must contain only 0/1 characters")
        if n is not None and len(line) != n:
            raise InputError(f"Line {k}: expected a vector of length {n}, got {len(line)}")
        out.append(BitVector.from_string(line))
    return out


def format_query_pairs(pairs: Iterable[tuple[IndexSet, IndexSet]]) -> str:
    return "".join(f"{u.mask.to_string()} {v.mask.to_string()}\n" for u, v in pairs)


def parse_query_pairs(text: str, n: int) -> list[tuple[IndexSet, IndexSet]]:
    out = []
    for k, line in enumerate(_lines(text), start=1):
        parts = line.split()
        if len(parts) != 2 or any(len(p) != n for p in parts):
            raise InputError(f"Line {k}: expected two 0/1 strings of length {n}")
        out.append((IndexSet(BitVector.from_string(parts[0])), IndexSet(BitVector.from_string(parts[1]))))
    return out


# --------------------------------------------------------------------------- #
# Partial match corpora
# --------------------------------------------------------------------------- #

def parse_pattern(line: str, k: int) -> Pattern:
    """Parse one corpus or query line into symbols (``None`` for the wildcard)."""
    line = line.strip()
    if " " in line or "\t" in line or k > 26:
        tokens = line.split()
        out: Pattern = []
        for tok in tokens:
            if tok == STAR:
                out.append(None)
                continue
            try:
                sym = int(tok)
            except ValueError as e:
                raise InputError(f"Invalid symbol {tok!r}") from e
            if not 0 <= sym < k:
                raise InputError(f"Symbol {sym} out of range for alphabet size {k}")
            out.append(sym)
        return out
    out = []
    for ch in line:
        if ch == STAR:
            out.append(None)
        elif "a" <= ch <= "z" and ord(ch) - ord("a") < k:
            out.append(ord(ch) - ord("a"))
        elif k <= 10 and "0" <= ch <= "9" and int(ch) < k:
            out.append(int(ch))
        else:
            raise InputError(f"Symbol {ch!r} out of range for alphabet size {k}")
    return out


def format_pattern(pattern: Sequence[int | None], k: int) -> str:
    if k <= 26:
        return "".join(STAR if s is None else chr(ord("a") + s) for s in pattern)
    return " ".join(STAR if s is None else str(s) for s in pattern)


def format_corpus(strings: Sequence[Sequence[int | None]], k: int) -> str:
    m = len(strings[0]) if strings else 0
    return "\n".join([f"{len(strings)} {m} {k}", *(format_pattern(s, k) for s in strings)]) + "\n"


def parse_corpus(text: str) -> tuple[list[Pattern], int, int]:
    """:return: ``(strings, m, k)``."""
    lines = _lines(text)
    if not lines:
        raise InputError("Empty corpus text")
    try:
        n, m, k = (int(x) for x in lines[0].split())
    except ValueError as e:
        raise InputError(f"Corpus header must be 'n m k', got {lines[0]!r}") from e
    strings = [parse_pattern(line, k) for line in lines[1:]]
    if len(strings) != n:
        raise InputError(f"Corpus header announces {n} strings, found {len(strings)}")
    for idx, s in enumerate(strings, start=2):
        if len(s) != m:
            raise InputError(f"Line {idx}: expected {m} symbols, got {len(s)}")
    return strings, m, k


def parse_queries(text: str, m: int, k: int) -> list[Pattern]:
    out = []
    for idx, line in enumerate(_lines(text), start=1):
        q = parse_pattern(line, k)
        if len(q) != m:
            raise InputError(f"Query line {idx}: expected {m} symbols, got {len(q)}")
        out.append(q)
    return out


# --------------------------------------------------------------------------- #
# 2-CNF formulas
# --------------------------------------------------------------------------- #

def format_cnf(n_vars: int, clauses: Sequence[tuple[int, int]]) -> str:
    lines = [f"p cnf {n_vars} {len(clauses)}"]
    lines.extend(f"{a} {b} 0" for a, b in clauses)
    return "\n".join(lines) + "\n"


def _int_field(token: str, idx: int) -> int:
    try:
        return int(token)
    except ValueError as e:
        raise InputError(f"Line {idx}: expected an integer, got {token!r}") from e


def parse_cnf(text: str) -> tuple[int, list[tuple[int, int]]]:
    n_vars = None
    clauses: list[tuple[int, int]] = []
    for idx, line in enumerate(_lines(text), start=1):
        if line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise InputError(f"Line {idx}: expected 'p cnf <vars> <clauses>'")
            n_vars = _int_field(parts[2], idx)
            continue
        lits = [_int_field(x, idx) for x in line.split()]
        if not lits or lits[-1] != 0:
            raise InputError(f"Line {idx}: clause must be terminated by 0")
        lits = lits[:-1]
        if len(lits) == 1:
            lits = lits * 2
        if len(lits) != 2:
            raise InputError(f"Line {idx}: 2-CNF clauses have at most two literals, got {len(lits)}")
        clauses.append((lits[0], lits[1]))
    if n_vars is None:
        raise InputError("Missing 'p cnf' header")
    return n_vars, clauses


def write_text(path: Path, text: str) -> Path:
    """Write ``text`` to ``path``, creating parent directories."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to write fixture {path}: {e}") from e
    logger.debug(f"Wrote fixture {path} ({len(text)} bytes)")
    return path


def read_text(path: Path) -> str:
    path = Path(path)
    try:
        return path.read_text(encoding="utf-8")
    except OSError as e:
        raise OSError(f"Failed to read fixture {path}: {e}") from e
