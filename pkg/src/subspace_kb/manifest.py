"""Run manifests: enough metadata to reproduce any command's output.

A manifest records the subcommand, its full parameter map, the seed, a
SHA-256 digest of every input file, and a timestamp. It is written next
to the main output as ``<out>.manifest.json``. Replaying a manifest in
single-threaded mode reproduces the output byte for byte; changed inputs
are detected through the digests.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field

from .errors import ContractError, FormatError


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunManifest:
    command: str
    parameters: dict
    seed: int | None
    inputs: dict[str, str] = field(default_factory=dict)
    timestamp: str = ""

    @classmethod
    def create(cls, command: str, parameters: dict, input_paths) -> "RunManifest":
        return cls(
            command=command,
            parameters=dict(parameters),
            seed=parameters.get("seed"),
            inputs={str(p): file_digest(p) for p in input_paths},
            timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        )

    def save(self, path) -> None:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "seed": self.seed,
            "inputs": self.inputs,
            "timestamp": self.timestamp,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "RunManifest":
        with open(path, encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(path, f"invalid JSON: {exc}") from None
        missing = {"command", "parameters", "inputs"} - payload.keys()
        if missing:
            raise FormatError(path, f"missing manifest fields {sorted(missing)}")
        return cls(
            command=payload["command"],
            parameters=payload["parameters"],
            seed=payload.get("seed"),
            inputs=payload["inputs"],
            timestamp=payload.get("timestamp", ""),
        )

    def verify_inputs(self) -> None:
        """Raise when any recorded input file changed since the run."""
        for path, digest in self.inputs.items():
            current = file_digest(path)
            if current != digest:
                raise ContractError(
                    f"input {path} changed since the recorded run "
                    f"({current[:12]} != {digest[:12]})"
                )


def manifest_path_for(out_path) -> str:
    return f"{out_path}.manifest.json"
