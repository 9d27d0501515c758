"""JSON file formats for families and certificates.

Numbers are written as decimal strings with 17 significant digits, which
round-trips every IEEE double exactly and keeps files byte-stable.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .errors import UsageError
from .linalg import HilbertGrid
from .perturbation import PerturbationCertificate
from .sequences import VectorFamily

__all__ = [
    "FAMILY_FORMAT",
    "fmt",
    "weights_digest",
    "family_to_dict",
    "family_from_dict",
    "save_family",
    "load_family",
    "save_certificate",
    "load_certificate",
]

FAMILY_FORMAT = "quasiframes-family/1"


def fmt(x: float) -> str:
    return "%.17g" % float(x)


def weights_digest(space: HilbertGrid) -> str:
    """SHA-256 of the little-endian float64 weight bytes."""
    return hashlib.sha256(np.ascontiguousarray(space.weights, dtype="<f8").tobytes()).hexdigest()


def family_to_dict(F: VectorFamily) -> dict:
    return {
        "format": FAMILY_FORMAT,
        "header": {"dim": F.dim, "members": len(F), "name": F.name, "weights_digest": weights_digest(F.space)},
        "space_label": F.space.label,
        "weights": [fmt(w) for w in F.space.weights],
        "columns": [[[fmt(z.real), fmt(z.imag)] for z in F.matrix[:, n]] for n in range(len(F))],
    }


def family_from_dict(d: dict, space: HilbertGrid | None = None) -> VectorFamily:
    """Rebuild a family; the weights digest must match the stored weights (and ``space``, if given)."""
    if d.get("format") != FAMILY_FORMAT:
        raise UsageError(f"unsupported family format {d.get('format')!r}")
    head = d["header"]
    w = np.array([float(s) for s in d["weights"]])
    stored = HilbertGrid(w, d.get("space_label", ""))
    if weights_digest(stored) != head["weights_digest"]:
        raise UsageError("weights digest does not match the stored weights")
    if space is not None:
        if weights_digest(space) != head["weights_digest"]:
            raise UsageError("family was written on a different space")
        stored = space
    cols = d["columns"]
    if len(cols) != head["members"] or any(len(c) != head["dim"] for c in cols):
        raise UsageError("column data does not match the header")
    M = np.array([[complex(float(re), float(im)) for re, im in col] for col in cols]).T
    return VectorFamily(M.reshape(head["dim"], head["members"]), stored, head["name"])


def save_family(F: VectorFamily, path) -> None:
    Path(path).write_text(json.dumps(family_to_dict(F), indent=1) + "\n")


def load_family(path, space: HilbertGrid | None = None) -> VectorFamily:
    return family_from_dict(json.loads(Path(path).read_text()), space)


def save_certificate(cert: PerturbationCertificate, path) -> None:
    Path(path).write_text(cert.to_json(indent=2) + "\n")


def load_certificate(path) -> PerturbationCertificate:
    return PerturbationCertificate.from_dict(json.loads(Path(path).read_text()))
