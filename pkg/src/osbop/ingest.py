"""Preference data input: PrefLib election files and matrix CSV files.

PrefLib files (``.soc``, ``.soi``, ``.toc``, ``.toi``) start with ``#``
metadata lines, of which ``# NUMBER ALTERNATIVES`` and
``# ALTERNATIVE NAME i`` are used. Every other line is a vote
``multiplicity: ranking`` where the ranking lists alternatives from most to
least preferred, separated by commas, and tied groups are wrapped in braces::

    3: 1,{2,3}

The older headerless layout (alternative count, one ``i,name`` line per
alternative, a ``voters,sum,unique`` line, then ``multiplicity,ranking``
lines) is accepted too.

Matrix CSV files hold the order ``n`` on the first line followed by ``n``
rows of ``n`` comma-separated decimals.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import validate_pair_order_matrix
from .errors import InvalidMatrix, PreflibParseError

logger = logging.getLogger(__name__)

SYMMETRIZE_TOL = 1e-6
_EXACT_TOL = 1e-9

Ranking = tuple[frozenset[int], ...]


@dataclass
class Profile:
    """Votes over alternatives ``1..n``; each vote is ``(multiplicity, ranking)``.

    A ranking is a sequence of tie groups, best first. Alternatives missing
    from a vote were not ranked by it.
    """

    n: int
    votes: list[tuple[int, Ranking]]
    names: dict[int, str] = field(default_factory=dict)
    source: str | None = None

    def __post_init__(self) -> None:
        for mult, ranking in self.votes:
            if mult <= 0:
                raise ValueError(f"multiplicity must be positive, got {mult}")
            seen: set[int] = set()
            for group in ranking:
                for item in group:
                    if not 1 <= item <= self.n:
                        raise ValueError(f"item {item} outside 1..{self.n}")
                    if item in seen:
                        raise ValueError(f"item {item} ranked twice in one vote")
                    seen.add(item)

    @property
    def voters(self) -> int:
        return sum(m for m, _ in self.votes)


_HEADER = re.compile(r"^#\s*([^:]+?)\s*:\s*(.*)$")
_ALT_NAME = re.compile(r"^ALTERNATIVE NAME (\d+)$", re.IGNORECASE)


def _parse_ranking(text: str, n: int, lineno: int) -> Ranking:
    groups: list[frozenset[int]] = []
    seen: set[int] = set()
    pos = 0
    text = "".join(text.split())
    if not text:
        raise PreflibParseError("empty ranking", lineno)
    while pos < len(text):
        if text[pos] == "{":
            end = text.find("}", pos)
            if end < 0:
                raise PreflibParseError("unclosed '{' in ranking", lineno)
            body = text[pos + 1 : end]
            tokens = body.split(",") if body else []
            pos = end + 1
        else:
            end = text.find(",", pos)
            end = len(text) if end < 0 else end
            tokens = [text[pos:end]]
            pos = end
        group = []
        for tok in tokens:
            try:
                item = int(tok)
            except ValueError:
                raise PreflibParseError(f"bad alternative label {tok!r}", lineno) from None
            if not 1 <= item <= n:
                raise PreflibParseError(f"alternative {item} outside 1..{n}", lineno)
            if item in seen:
                raise PreflibParseError(f"alternative {item} appears twice in one vote", lineno)
            seen.add(item)
            group.append(item)
        if group:
            groups.append(frozenset(group))
        if pos < len(text):
            if text[pos] != ",":
                raise PreflibParseError(f"expected ',' at column {pos + 1}", lineno)
            pos += 1
            if pos == len(text):
                raise PreflibParseError("trailing ','", lineno)
    return tuple(groups)


def _multiplicity(tok: str, lineno: int) -> int:
    try:
        mult = int(tok.strip())
    except ValueError:
        raise PreflibParseError(f"bad multiplicity {tok.strip()!r}", lineno) from None
    if mult <= 0:
        raise PreflibParseError(f"multiplicity must be positive, got {mult}", lineno)
    return mult


def parse_preflib(content: str, source: str | None = None) -> Profile:
    """Parse a PrefLib election file into a :class:`Profile`.

    Raises:
        PreflibParseError: on malformed lines (the message carries the line
            number), nonpositive multiplicities, alternatives outside ``1..n``
            or alternatives repeated within a vote.
    """
    lines = content.splitlines()
    if any(line.lstrip().startswith("#") for line in lines):
        return _parse_modern(lines, source)
    return _parse_legacy(lines, source)


def _parse_modern(lines: list[str], source: str | None) -> Profile:
    n: int | None = None
    names: dict[int, str] = {}
    ignored: list[str] = []
    votes: list[tuple[int, Ranking]] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _HEADER.match(line)
            if not m:
                continue
            key, value = m.group(1).strip(), m.group(2).strip()
            alt = _ALT_NAME.match(key)
            if key.upper() == "NUMBER ALTERNATIVES":
                try:
                    n = int(value)
                except ValueError:
                    raise PreflibParseError(f"bad alternative count {value!r}", lineno) from None
            elif alt:
                names[int(alt.group(1))] = value
            else:
                ignored.append(key)
            continue
        if n is None:
            raise PreflibParseError("vote line before '# NUMBER ALTERNATIVES'", lineno)
        if ":" not in line:
            raise PreflibParseError(f"expected 'multiplicity: ranking', got {line!r}", lineno)
        mult_text, ranking_text = line.split(":", 1)
        votes.append((_multiplicity(mult_text, lineno), _parse_ranking(ranking_text, n, lineno)))
    if n is None:
        raise PreflibParseError("missing '# NUMBER ALTERNATIVES' header")
    if ignored:
        logger.warning("ignoring PrefLib metadata: %s", ", ".join(sorted(set(ignored))))
    return Profile(n=n, votes=votes, names=names, source=source)


def _parse_legacy(lines: list[str], source: str | None) -> Profile:
    rows = [(i, line.strip()) for i, line in enumerate(lines, start=1) if line.strip()]
    if not rows:
        raise PreflibParseError("empty file")
    lineno, first = rows[0]
    try:
        n = int(first)
    except ValueError:
        raise PreflibParseError(f"expected the alternative count, got {first!r}", lineno) from None
    if len(rows) < n + 2:
        raise PreflibParseError("file ends inside the header")
    names = {}
    for lineno, line in rows[1 : n + 1]:
        idx, _, name = line.partition(",")
        try:
            names[int(idx)] = name.strip()
        except ValueError:
            raise PreflibParseError(f"expected 'index,name', got {line!r}", lineno) from None
    votes = []
    for lineno, line in rows[n + 2 :]:
        mult_text, sep, ranking_text = line.partition(",")
        if not sep:
            raise PreflibParseError(f"expected 'multiplicity,ranking', got {line!r}", lineno)
        votes.append((_multiplicity(mult_text, lineno), _parse_ranking(ranking_text, n, lineno)))
    return Profile(n=n, votes=votes, names=names, source=source)


def read_preflib(path: str | Path) -> Profile:
    path = Path(path)
    return parse_preflib(path.read_text(encoding="utf-8"), source=path.name)


def build_matrix(profile: Profile) -> np.ndarray:
    """Pair order matrix of a profile.

    For each pair ``(u, v)`` only votes ranking both items count: a vote
    scores 1 when it puts ``u`` first, 0.5 when it ties them and 0 otherwise,
    weighted by multiplicity. ``C[u, v]`` is the mean score; pairs no vote
    compares get 0.5.
    """
    n = profile.n
    score = np.zeros((n, n))
    count = np.zeros((n, n))
    for mult, ranking in profile.votes:
        pos = np.full(n, -1)
        for level, group in enumerate(ranking):
            for item in group:
                pos[item - 1] = level
        ranked = pos >= 0
        both = ranked[:, None] & ranked[None, :]
        pref = np.where(pos[:, None] < pos[None, :], 1.0, np.where(pos[:, None] == pos[None, :], 0.5, 0.0))
        score += mult * np.where(both, pref, 0.0)
        count += mult * both
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.where(count > 0, score / np.where(count > 0, count, 1.0), 0.5)
    np.fill_diagonal(c, 0.5)
    return c


def read_matrix(content: str) -> np.ndarray:
    """Parse matrix CSV text into a validated pair order matrix.

    Complementarity gaps up to ``1e-6`` are repaired by averaging ``x`` with
    ``1 - x'``; gaps of at most ``1e-9`` are left untouched so that files
    written by :func:`write_matrix` read back bit for bit.

    Raises:
        InvalidMatrix: on a wrong row or column count, entries outside
            ``[0, 1]``, a diagonal off 0.5 or a complementarity gap above
            ``1e-6``.
    """
    rows = [line.strip() for line in content.splitlines() if line.strip()]
    if not rows:
        raise InvalidMatrix("empty matrix file")
    try:
        n = int(rows[0])
    except ValueError:
        raise InvalidMatrix(f"first line must be the matrix order, got {rows[0]!r}") from None
    if n < 1:
        raise InvalidMatrix(f"matrix order must be positive, got {n}")
    if len(rows) - 1 != n:
        raise InvalidMatrix(f"expected {n} rows, found {len(rows) - 1}")
    c = np.empty((n, n))
    for i, row in enumerate(rows[1:]):
        cells = row.split(",")
        if len(cells) != n:
            raise InvalidMatrix(f"row {i + 1} has {len(cells)} entries, expected {n}")
        try:
            c[i] = [float(x) for x in cells]
        except ValueError:
            raise InvalidMatrix(f"row {i + 1} has a non-numeric entry") from None
    if not np.all(np.isfinite(c)) or c.min() < 0.0 or c.max() > 1.0:
        raise InvalidMatrix("entries must lie in [0, 1]")
    diag = np.abs(np.diag(c) - 0.5)
    if diag.max() > SYMMETRIZE_TOL:
        raise InvalidMatrix(f"diagonal entry off 0.5 by {diag.max():.3g}")
    np.fill_diagonal(c, 0.5)
    gap = np.abs(c + c.T - 1.0)
    if gap.max() > SYMMETRIZE_TOL:
        u, v = np.unravel_index(int(gap.argmax()), gap.shape)
        raise InvalidMatrix(
            f"complementarity violated at ({u + 1},{v + 1}) by {gap[u, v]:.3g}"
        )
    fix = np.triu(gap > _EXACT_TOL, k=1)
    if fix.any():
        upper = (c + 1.0 - c.T) / 2.0
        c = np.where(fix, upper, c)
        c = np.where(fix.T, 1.0 - upper.T, c)
    return validate_pair_order_matrix(c)


def load_matrix(path: str | Path) -> np.ndarray:
    return read_matrix(Path(path).read_text(encoding="utf-8"))


def write_matrix(c: np.ndarray) -> str:
    """CSV text for ``c`` with shortest round-trip float formatting."""
    c = np.asarray(c, dtype=float)
    lines = [str(c.shape[0])]
    lines += [",".join(repr(float(x)) for x in row) for row in c]
    return "\n".join(lines) + "\n"
