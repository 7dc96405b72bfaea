"""Named learnable parameters and their checkpoint container."""

import json
import logging
import zipfile
from collections.abc import Iterator
from pathlib import Path
from typing import Any

import numpy as np

from ..base import ConfigError
from .tensor import Tensor
from .tensor import sum as tensor_sum

logger = logging.getLogger(__name__)

# Fixed member timestamp so identical stores serialize to identical bytes.
_ZIP_EPOCH = (1980, 1, 1, 0, 0, 0)


def glorot_bound(shape: tuple[int, ...]) -> float:
    fan_out, fan_in = (shape[0], shape[-1]) if len(shape) > 1 else (1, shape[0])
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


class ParameterStore:
    """Mapping of unique names to trainable tensors, iterated in sorted-name order."""

    def __init__(self, *, rng_seed: int = 0):
        self.rng_seed = rng_seed
        self.rng = np.random.default_rng(rng_seed)
        self._params: dict[str, Tensor] = {}

    def add(self, name: str, values: Any) -> Tensor:
        if name in self._params:
            raise ConfigError(f"parameter {name} is already defined")
        tensor = Tensor(np.array(values, dtype=np.float64), requires_grad=True)
        self._params[name] = tensor
        return tensor

    def glorot(self, name: str, shape: tuple[int, ...]) -> Tensor:
        bound = glorot_bound(shape)
        return self.add(name, self.rng.uniform(-bound, bound, size=shape))

    def zeros(self, name: str, shape: tuple[int, ...]) -> Tensor:
        return self.add(name, np.zeros(shape))

    def __getitem__(self, name: str) -> Tensor:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def names(self) -> list[str]:
        return sorted(self._params)

    def items(self) -> list[tuple[str, Tensor]]:
        return [(name, self._params[name]) for name in self.names()]

    def zero_grad(self):
        for _, param in self.items():
            param.zero_grad()

    def l2(self) -> Tensor:
        """Sum of squared entries over every parameter."""
        total: Tensor = Tensor(0.0)
        for _, param in self.items():
            total = total + tensor_sum(param * param)
        return total

    def values(self) -> dict[str, np.ndarray]:
        return {name: param.values.copy() for name, param in self.items()}

    def load_values(self, values: dict[str, np.ndarray]):
        missing = set(self._params) ^ set(values)
        if missing:
            raise ConfigError(f"parameter sets differ on {sorted(missing)}")
        for name, array in values.items():
            if array.shape != self._params[name].shape:
                raise ConfigError(
                    f"parameter {name} has shape {self._params[name].shape}, got {array.shape}"
                )
            self._params[name].values = np.array(array, dtype=np.float64)

    def save(self, path: str | Path, *, step: int = 0, metadata: dict | None = None) -> Path:
        """Write names, values, seed, step and JSON metadata into one ``.npz`` container."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        arrays: dict[str, np.ndarray] = {
            "names": np.array(self.names(), dtype=str),
            "rng_seed": np.array(self.rng_seed, dtype=np.int64),
            "step": np.array(step, dtype=np.int64),
            "metadata": np.array(json.dumps(metadata or {}, sort_keys=True)),
        }
        for i, (_, param) in enumerate(self.items()):
            arrays[f"param_{i:04d}"] = param.values
        with zipfile.ZipFile(path, "w", compression=zipfile.ZIP_STORED) as archive:
            for key, array in arrays.items():
                info = zipfile.ZipInfo(f"{key}.npy", date_time=_ZIP_EPOCH)
                with archive.open(info, "w", force_zip64=True) as handle:
                    np.lib.format.write_array(handle, np.asanyarray(array), allow_pickle=False)
        logger.info("checkpoint=%s parameters=%d step=%d", path, len(self), step)
        return path

    @classmethod
    def load(cls, path: str | Path) -> tuple["ParameterStore", int, dict]:
        with np.load(Path(path), allow_pickle=False) as archive:
            store = cls(rng_seed=int(archive["rng_seed"]))
            for i, name in enumerate(archive["names"].tolist()):
                store.add(name, archive[f"param_{i:04d}"])
            step = int(archive["step"])
            metadata = json.loads(str(archive["metadata"]))
        return store, step, metadata
