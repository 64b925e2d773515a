"""Content-addressed certificate cache.

Each certificate is one JSON file named by a hash of (certificate id, parameter
digest). Writes go to a temporary file in the same directory and are renamed
into place, so a concurrent reader never sees a partial file.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .certificate import Certificate

SCHEMA = "zfcert-certificate/1"


class CertificateStore:
    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)

    def key(self, cert_id: str, digest: str) -> str:
        return hashlib.sha256(f"{cert_id}\0{digest}".encode()).hexdigest()

    def path(self, cert_id: str, digest: str) -> Path:
        return self.root / f"{self.key(cert_id, digest)}.json"

    def load(self, cert_id: str, digest: str) -> Optional[Certificate]:
        path = self.path(cert_id, digest)
        try:
            data = json.loads(path.read_text())
        except (OSError, ValueError):
            return None
        if data.get("schema") != SCHEMA or data.get("id") != cert_id or data.get("digest") != digest:
            return None
        try:
            return Certificate.from_dict(data["certificate"])
        except (KeyError, TypeError, ValueError):
            return None

    def save(self, cert: Certificate, cert_id: str, digest: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        payload = {"schema": SCHEMA, "id": cert_id, "digest": digest, "certificate": cert.to_dict()}
        path = self.path(cert_id, digest)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w") as fh:
                # insertion order is kept so cached and fresh reports render identically
                json.dump(payload, fh)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return path
