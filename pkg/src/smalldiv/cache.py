"""On-disk cache of linearization coefficients.

Entries are keyed by a hash of (germ coefficients, multiplier, N, precision,
resonant convention).  Coefficients are stored losslessly with
``gmpy2.to_binary`` behind a small versioned header, so a cache hit returns
exactly the numbers a fresh computation would.
"""

from __future__ import annotations

import hashlib
import json
import os
import struct
import tempfile

import gmpy2

MAGIC = b"SMALLDIV-COEF"
VERSION = 1


def _blob(x) -> bytes:
    b = gmpy2.to_binary(x)
    return struct.pack("<I", len(b)) + b


def germ_key(coeffs, multiplier, N, prec, convention="error") -> str:
    h = hashlib.sha256()
    h.update(f"v{VERSION}|N={N}|prec={prec}|{convention}|".encode())
    h.update(_blob(multiplier))
    for c in coeffs[: N + 1]:
        h.update(_blob(c))
    return h.hexdigest()


class CoefficientCache:
    """Directory of ``<key>.bin`` files holding coefficient lists."""

    def __init__(self, directory):
        self.directory = os.fspath(directory)
        os.makedirs(self.directory, exist_ok=True)

    def _path(self, key):
        return os.path.join(self.directory, f"{key}.bin")

    def get(self, key):
        path = self._path(key)
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except FileNotFoundError:
            return None
        if not data.startswith(MAGIC):
            return None
        pos = len(MAGIC)
        (hlen,) = struct.unpack_from("<I", data, pos)
        pos += 4
        header = json.loads(data[pos : pos + hlen])
        pos += hlen
        if header.get("version") != VERSION:
            return None
        values = []
        for _ in range(header["count"]):
            (n,) = struct.unpack_from("<I", data, pos)
            pos += 4
            values.append(gmpy2.from_binary(data[pos : pos + n]))
            pos += n
        return header.get("meta", {}), values

    def put(self, key, values, meta=None):
        header = json.dumps({"version": VERSION, "count": len(values), "meta": meta or {}}).encode()
        payload = MAGIC + struct.pack("<I", len(header)) + header + b"".join(_blob(v) for v in values)
        fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(payload)
            os.replace(tmp, self._path(key))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
