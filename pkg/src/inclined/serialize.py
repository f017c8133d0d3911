"""Canonical JSON schemas, content digests and seed derivation.

Every file this package reads or writes is UTF-8 JSON with sorted keys and
compact separators, so identical data always produces identical bytes and
digests.  All randomness flows from one root seed through derive_seed, which
hashes the canonical encoding of (root, *tags); parallel execution therefore
cannot change any result.

Schemas:
  vector        {"dim": d, "entries": [[re, im], ...]}
  vectors file  [vector, ...]
  stage         {"regime": "toy"|"paper", "levels": [{"m": 1, "d": 4}, ...]}
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True, allow_nan=False)


def sha256_hex(data: bytes | str) -> str:
    if isinstance(data, str):
        data = data.encode("utf-8")
    return hashlib.sha256(data).hexdigest()


def derive_seed(root: int, *tags) -> int:
    """Child seed for a named component, stable across runs and platforms."""
    digest = hashlib.sha256(canonical_json([int(root), *tags]).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def vector_to_obj(v: np.ndarray) -> dict:
    arr = np.asarray(v, dtype=np.complex128)
    return {
        "dim": int(arr.size),
        "entries": [[float(z.real), float(z.imag)] for z in arr],
    }


def vector_from_obj(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise ValueError("vector object must have 'dim' and 'entries'")
    entries = obj["entries"]
    dim = int(obj["dim"])
    if len(entries) != dim or dim < 1:
        raise ValueError(f"vector has {len(entries)} entries but dim={dim}")
    out = np.empty(dim, dtype=np.complex128)
    for k, pair in enumerate(entries):
        re, im = pair
        out[k] = complex(float(re), float(im))
    if not np.all(np.isfinite(out)):
        raise ValueError("vector has non-finite entries")
    return out


def vectors_to_obj(vectors: Sequence[np.ndarray]) -> list:
    return [vector_to_obj(v) for v in vectors]


def vectors_from_obj(obj: Any) -> list[np.ndarray]:
    if not isinstance(obj, list) or not obj:
        raise ValueError("expected a nonempty JSON array of vectors")
    return [vector_from_obj(item) for item in obj]


def digest_vectors(vectors: Sequence[np.ndarray]) -> str:
    """Content digest of a vector family: sha256 of its canonical file bytes."""
    return sha256_hex(canonical_json(vectors_to_obj(vectors)))


def space_to_obj(space) -> dict:
    return {"axes": list(space.axes), "alphabet_size": space.alphabet_size}


def space_from_obj(obj: Any):
    from .tensor_index import TensorIndexSpace

    if not isinstance(obj, dict) or "axes" not in obj or "alphabet_size" not in obj:
        raise ValueError("index space object must have 'axes' and 'alphabet_size'")
    return TensorIndexSpace(tuple(str(a) for a in obj["axes"]), int(obj["alphabet_size"]))


def projection_spec_to_obj(spec) -> dict:
    """Wire form of an axis or product projection: space plus directions."""
    if hasattr(spec, "axis"):
        directions = {spec.axis: spec.direction}
    else:
        directions = dict(spec.directions)
    return {
        **space_to_obj(spec.space),
        "directions": {axis: vector_to_obj(v) for axis, v in directions.items()},
    }


def projection_spec_from_obj(obj: Any):
    """Decode to the general product form; a single direction acts identically
    to the corresponding single-axis projection."""
    from .tensor_projection import ProductProjectionSpec

    space = space_from_obj(obj)
    directions = {str(a): vector_from_obj(v) for a, v in obj["directions"].items()}
    return ProductProjectionSpec(space, directions)


def stage_to_obj(stage) -> dict:
    return {
        "regime": stage.regime,
        "levels": [{"m": lv.m, "d": lv.d} for lv in stage.levels],
    }


def stage_from_obj(obj: Any):
    from .family import LevelSpec, StageParameters

    if not isinstance(obj, dict) or "regime" not in obj or "levels" not in obj:
        raise ValueError("stage object must have 'regime' and 'levels'")
    levels = tuple(LevelSpec(int(lv["m"]), int(lv["d"])) for lv in obj["levels"])
    return StageParameters(levels=levels, regime=str(obj["regime"]))


def branch_spec_to_obj(spec) -> dict:
    return {
        "stage": stage_to_obj(spec.stage),
        "branch": spec.branch,
        "levels": [
            {"m": lv.m, "sigma": spec.sigma(lv.m), "direction": vector_to_obj(spec.directions[lv.m - 1])}
            for lv in spec.stage.levels
        ],
    }


def branch_spec_from_obj(obj: Any):
    from .family import BranchProjectionSpec

    stage = stage_from_obj(obj["stage"])
    levels = sorted(obj["levels"], key=lambda lv: int(lv["m"]))
    directions = tuple(vector_from_obj(lv["direction"]) for lv in levels)
    spec = BranchProjectionSpec(stage=stage, branch=str(obj["branch"]), directions=directions)
    for lv in levels:
        if lv["sigma"] != spec.sigma(int(lv["m"])):
            raise ValueError(f"level {lv['m']}: sigma {lv['sigma']!r} is not the branch prefix")
    return spec


def suppression_to_obj(cert) -> dict:
    return {
        "basis_digest": cert.basis_digest,
        "branch": cert.branch,
        "diagonals": [float(x) for x in cert.diagonals],
        "max_diagonal": float(cert.max_diagonal),
        "bound": float(cert.bound),
        "regime": cert.regime,
    }


def inclination_to_obj(cert) -> dict:
    return {
        "d": cert.dimension,
        "family_digest": cert.family_digest,
        "candidate": vector_to_obj(cert.candidate),
        "achieved": float(cert.achieved),
        "bound": float(cert.bound),
        "seed": int(cert.seed),
        "iterations_used": int(cert.iterations_used),
    }


def inclination_from_obj(obj: Any):
    from .search import InclinationCertificate

    return InclinationCertificate(
        dimension=int(obj["d"]),
        family_digest=str(obj["family_digest"]),
        candidate=vector_from_obj(obj["candidate"]),
        achieved=float(obj["achieved"]),
        bound=float(obj["bound"]),
        seed=int(obj["seed"]),
        iterations_used=int(obj["iterations_used"]),
    )


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(canonical_json(obj) + "\n", encoding="utf-8")


def read_json(path: str | Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))
