"""On-disk cache of restricted operator matrices, one file per level.

A cache file holds the Hecke and Atkin-Lehner matrices a space has
memoized, in the exact text serialization of :mod:`x0plus.exactla`.  The
header records both the symbol-layer format version (which changes when
the canonical-form rule for P1(Z/N) changes) and the matrix format
version; a mismatch on either invalidates the file.  Writes go through a
temporary file and an atomic rename, so concurrent workers can share a
cache directory safely.
"""

import os
import tempfile

from . import modsym
from .exactla import SERIAL_FORMAT_VERSION, ExactMatrix

ENV_CACHE_DIR = "X0PLUS_CACHE_DIR"

_HEADER = (
    f"x0plus-cache modsym v{modsym.CACHE_FORMAT_VERSION} "
    f"exactla v{SERIAL_FORMAT_VERSION}"
)


def default_cache_dir():
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return env
    return os.path.join(
        os.environ.get("XDG_CACHE_HOME", os.path.expanduser("~/.cache")), "x0plus"
    )


class OperatorCache:
    def __init__(self, directory=None):
        self.directory = directory if directory is not None else default_cache_dir()

    def path_for(self, N):
        return os.path.join(self.directory, f"level{N}.ops")

    def load_into(self, space):
        """Adopt every cached operator matrix for the space's level.

        Returns the number of operators adopted; stale or unreadable
        files are ignored (the operators will simply be recomputed).
        """
        path = self.path_for(space.level.N)
        try:
            with open(path, encoding="ascii") as fh:
                text = fh.read()
        except OSError:
            return 0
        try:
            entries = _parse(text, space.level.N)
        except ValueError:
            return 0
        adopted = 0
        k = space.cuspidal_dimension
        for key, matrix in entries:
            if matrix.rows != k or matrix.cols != k:
                return 0
            if key not in space._operators:
                space._operators[key] = matrix
                adopted += 1
        return adopted

    def store(self, space):
        """Write the space's memoized operators; atomic rename, no-op when
        nothing is memoized."""
        if not space._operators:
            return None
        os.makedirs(self.directory, exist_ok=True)
        blocks = [_HEADER, f"level {space.level.N}"]
        for key in sorted(space._operators):
            kind, param = key
            blocks.append(f"op {kind} {param}")
            blocks.append(space._operators[key].serialize())
        payload = "\n".join(blocks) + "\n"
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="ascii") as fh:
                fh.write(payload)
            path = self.path_for(space.level.N)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path

    def inspect(self):
        """One summary record per cache file, sorted by level."""
        records = []
        try:
            names = os.listdir(self.directory)
        except OSError:
            return records
        for name in names:
            if not (name.startswith("level") and name.endswith(".ops")):
                continue
            path = os.path.join(self.directory, name)
            try:
                with open(path, encoding="ascii") as fh:
                    text = fh.read()
                level = int(name[5:-4])
                entries = _parse(text, level)
            except (OSError, ValueError):
                records.append({"file": name, "status": "stale"})
                continue
            records.append(
                {
                    "file": name,
                    "status": "ok",
                    "level": level,
                    "operators": ["".join(map(str, k)) for k, _ in entries],
                    "bytes": len(text),
                }
            )
        records.sort(key=lambda r: r.get("level", 10**9))
        return records

    def clear(self):
        """Remove every cache file; returns how many were deleted."""
        removed = 0
        try:
            names = os.listdir(self.directory)
        except OSError:
            return 0
        for name in names:
            if name.startswith("level") and name.endswith(".ops"):
                os.unlink(os.path.join(self.directory, name))
                removed += 1
        return removed


def _parse(text, expected_level):
    lines = text.splitlines()
    if not lines or lines[0] != _HEADER:
        raise ValueError("version header mismatch")
    if len(lines) < 2 or lines[1] != f"level {expected_level}":
        raise ValueError("level mismatch")
    entries = []
    i = 2
    while i < len(lines):
        parts = lines[i].split()
        if len(parts) != 3 or parts[0] != "op" or parts[1] not in ("T", "W"):
            raise ValueError(f"bad operator header at line {i}")
        key = (parts[1], int(parts[2]))
        if not lines[i + 1].startswith("exactmatrix"):
            raise ValueError("missing matrix header")
        rows = int(lines[i + 2].split()[0])
        block = "\n".join(lines[i + 1 : i + 3 + rows])
        entries.append((key, ExactMatrix.deserialize(block)))
        i += 3 + rows
    return entries
