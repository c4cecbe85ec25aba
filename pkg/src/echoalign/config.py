"""Flat key=value config files and the committed benchmark definitions.

The format is deliberately language-neutral: one `key=value` per line,
`#` comments, blank lines ignored. Benchmark files use dotted prefixes
(world., noise., modifier., select., train., linear.).
"""

from __future__ import annotations

from dataclasses import dataclass

from .data import SynthWorldSpec
from .errors import ConfigError
from .modify import ModifierConfig
from .noise import FAMILIES, INSTANCE_DEPENDENT, NoiseSpec
from .theory import LinearWorldSpec
from .train import TrainConfig

_FAMILY_ALIASES = {"idn": INSTANCE_DEPENDENT}


def read_kv(path) -> dict[str, str]:
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key = key.strip()
            if key in out:
                raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
            out[key] = value.strip()
    return out


def write_kv(path, mapping) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, value in mapping.items():
            fh.write(f"{key}={value}\n")


_REQUIRED = object()


def _get(kv: dict[str, str], key: str, cast, default=_REQUIRED):
    if key not in kv:
        if default is _REQUIRED:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return cast(kv[key])
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}")


def _int_tuple(text: str) -> tuple[int, ...]:
    text = text.strip()
    if not text:
        return ()
    return tuple(int(v) for v in text.split(","))


def _float_tuple(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(","))


def load_world_spec(kv: dict[str, str], prefix: str = "world.") -> SynthWorldSpec:
    return SynthWorldSpec(
        num_classes=_get(kv, prefix + "num_classes", int),
        dim=_get(kv, prefix + "dim", int),
        prototype_separation=_get(kv, prefix + "prototype_separation", float),
        intra_class_std=_get(kv, prefix + "intra_class_std", float),
        samples_per_class=_get(kv, prefix + "samples_per_class", int),
        seed=_get(kv, prefix + "seed", int))


def load_noise_spec(kv: dict[str, str], prefix: str = "noise.") -> NoiseSpec:
    family = _get(kv, prefix + "family", str)
    family = _FAMILY_ALIASES.get(family, family)
    if family not in FAMILIES:
        raise ConfigError(f"unknown noise family {family!r}")
    return NoiseSpec(
        family=family,
        rate=_get(kv, prefix + "rate", float),
        seed=_get(kv, prefix + "seed", int),
        idn_std=_get(kv, prefix + "idn_std", float, 0.1))


def load_modifier_config(kv: dict[str, str],
                         prefix: str = "modifier.") -> ModifierConfig:
    return ModifierConfig(
        pull_strength=_get(kv, prefix + "pull_strength", float),
        residual_std=_get(kv, prefix + "residual_std", float),
        seed=_get(kv, prefix + "seed", int))


def load_train_config(kv: dict[str, str],
                      prefix: str = "train.") -> TrainConfig:
    return TrainConfig(
        epochs=_get(kv, prefix + "epochs", int),
        learning_rate=_get(kv, prefix + "learning_rate", float, 0.1),
        momentum=_get(kv, prefix + "momentum", float, 0.9),
        weight_decay=_get(kv, prefix + "weight_decay", float, 1e-4),
        batch_size=_get(kv, prefix + "batch_size", int, 128),
        lr_decay_epochs=_get(kv, prefix + "lr_decay_epochs", _int_tuple,
                             (100, 150)),
        lr_decay_factor=_get(kv, prefix + "lr_decay_factor", float, 0.1),
        seed=_get(kv, prefix + "seed", int, 0))


def load_linear_spec(kv: dict[str, str],
                     prefix: str = "linear.") -> LinearWorldSpec:
    return LinearWorldSpec(
        dim=_get(kv, prefix + "dim", int),
        num_samples=_get(kv, prefix + "num_samples", int),
        coefficient_vector=_get(kv, prefix + "coefficients", _float_tuple),
        noise_std=_get(kv, prefix + "noise_std", float),
        alignment_gain=_get(kv, prefix + "alignment_gain", float),
        seed=_get(kv, prefix + "seed", int))


@dataclass(frozen=True)
class Benchmark:
    """A committed end-to-end setting: world, corruption, modifier, tau,
    training recipe."""

    world: SynthWorldSpec
    noise: NoiseSpec
    modifier: ModifierConfig
    tau: float
    train: TrainConfig


def load_benchmark(path) -> Benchmark:
    kv = read_kv(path)
    return Benchmark(
        world=load_world_spec(kv),
        noise=load_noise_spec(kv),
        modifier=load_modifier_config(kv),
        tau=_get(kv, "select.tau", float),
        train=load_train_config(kv))
