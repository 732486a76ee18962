"""On-disk cache of enumerated group elements.

File layout: the line ``SBAL1``, the line ``<group> <n> <descriptor> <count>``,
then the body. For q = 2 every matrix row is one little-endian u64 (bit j is
column j); otherwise each entry is one byte holding its element index.
"""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .errors import CacheFormatError
from .ff import FieldSpec

logger = logging.getLogger(__name__)

MAGIC = "SBAL1"


def _pack_stack(stack: np.ndarray) -> bytes:
    cols = stack.shape[-1]
    weights = np.left_shift(np.uint64(1), np.arange(cols, dtype=np.uint64))
    rows = (stack.astype(np.uint64) * weights).sum(axis=-1, dtype=np.uint64)
    return rows.astype("<u8").tobytes()


def _unpack_stack(body: bytes, count: int, m: int) -> np.ndarray:
    rows = np.frombuffer(body, dtype="<u8")
    if rows.size != count * m:
        raise CacheFormatError(f"Cache body holds {rows.size} rows, expected {count * m}.")
    bits = np.unpackbits(rows.astype("<u8").view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")
    return bits[:, :m].reshape(count, m, m).astype(np.uint8)


class EnumerationCache:
    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)

    def path_for(self, group: str, n: int, spec: FieldSpec) -> Path:
        coeffs = "-".join(str(c) for c in spec.modulus)
        return self.directory / f"{group}_n{n}_{spec.p}^{spec.k}_{coeffs}.sbal"

    def store(self, group: str, n: int, spec: FieldSpec, stack: np.ndarray) -> Path:
        stack = np.asarray(stack)
        if stack.ndim != 3 or stack.shape[1] != stack.shape[2]:
            raise CacheFormatError(f"Expected an (N, m, m) stack, got shape {stack.shape}.")
        self.directory.mkdir(parents=True, exist_ok=True)
        path = self.path_for(group, n, spec)
        header = f"{MAGIC}\n{group} {n} {spec.descriptor} {stack.shape[0]}\n".encode("ascii")
        body = _pack_stack(stack) if spec.q == 2 else stack.astype(np.uint8).tobytes()
        tmp = path.with_suffix(".tmp")
        tmp.write_bytes(header + body)
        tmp.replace(path)
        logger.info("Cached %d %s elements at %s", stack.shape[0], group, path)
        return path

    def load(self, group: str, n: int, spec: FieldSpec, m: int) -> np.ndarray | None:
        path = self.path_for(group, n, spec)
        if not path.exists():
            logger.debug("Cache miss: %s", path)
            return None
        raw = path.read_bytes()
        parts = raw.split(b"\n", 2)
        if len(parts) != 3 or parts[0].decode("ascii", errors="replace") != MAGIC:
            raise CacheFormatError(f"{path} does not start with the {MAGIC} magic line.")
        fields = parts[1].decode("ascii", errors="replace").split()
        if len(fields) != 4:
            raise CacheFormatError(f"Malformed cache header in {path}: {parts[1]!r}")
        tag, n_text, descriptor, count_text = fields
        if tag != group or n_text != str(n) or descriptor != spec.descriptor:
            raise CacheFormatError(
                f"{path} holds {tag} n={n_text} over {descriptor}, expected {group} n={n} over {spec.descriptor}."
            )
        count = int(count_text)
        body = parts[2]
        if spec.q == 2:
            stack = _unpack_stack(body, count, m)
        else:
            if len(body) != count * m * m:
                raise CacheFormatError(f"Cache body of {path} has {len(body)} bytes, expected {count * m * m}.")
            stack = np.frombuffer(body, dtype=np.uint8).reshape(count, m, m).copy()
        logger.info("Loaded %d %s elements from %s", count, group, path)
        return stack
