"""Run configuration files (YAML) and labeled seed derivation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .groups import GroupSpec, GroupSpecError, load_group_spec


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def derive_seed(master: int, *labels: str) -> int:
    """Seed for one sampler: hash of the master seed and a label path."""
    h = hashlib.sha256(str(master).encode())
    for lab in labels:
        h.update(b"/" + lab.encode())
    return int.from_bytes(h.digest()[:8], "big")


@dataclass
class AnchorConfig:
    kind: str  # parabolic | horizon
    peripheral: int = 0
    rep: str = ""  # coset representative (parabolic) or vertex label word (horizon)
    level: int = 0  # horizon anchor: horoball level of the vertex, 0 for a group vertex


@dataclass
class SpaceConfig:
    group: GroupSpec
    group_path: str
    radius: int
    depth: int
    rho: int
    tau: float
    anchor: AnchorConfig
    second_anchor: AnchorConfig | None = None


@dataclass
class RunConfig:
    name: str
    seed: int
    domain: SpaceConfig
    codomain: SpaceConfig | None
    shadow_radius: int | None  # None = ceil(2 delta) + 1
    radius_policy: str  # "fail" or "warn" when R <= 2 delta
    delta_mode: str
    delta_samples: int
    samples: dict[str, int]
    budget: int
    larger_radius: int | None  # second truncation radius for stability checks
    larger_codomain_radius: int | None = None  # default: codomain radius + the same step
    codomain_atlas: str = "induced"  # "induced" (seeded by images of domain targets) or "independent"
    raw: dict[str, Any] = field(default_factory=dict)
    source: str = ""


SAMPLE_DEFAULTS = {
    "c4": 200,
    "ring_lemma": 500,
    "equivalence": 200,
    "distortion": 150,
    "qi": 40,
    "triangles": 300,
    "c1": 40,
    "c2": 300,
}

_TOP_KEYS = {"name", "seed", "domain", "codomain", "shadow_radius", "radius_policy", "delta",
             "samples", "budget", "larger_radius", "larger_codomain_radius",
             "codomain_atlas"}
_SPACE_KEYS = {"group", "radius", "depth", "rho", "tau", "anchor", "second_anchor"}


def _need(d: dict, key: str, path: str, kind=int):
    if key not in d:
        raise ConfigError(f"{path}.{key}", "missing")
    val = d[key]
    if kind is int and (not isinstance(val, int) or isinstance(val, bool)):
        raise ConfigError(f"{path}.{key}", f"expected an integer, got {val!r}")
    if kind is float and not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{key}", f"expected a number, got {val!r}")
    if kind is str and not isinstance(val, str):
        raise ConfigError(f"{path}.{key}", f"expected a string, got {val!r}")
    return val


def _anchor(d: Any, path: str) -> AnchorConfig:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    kind = d.get("kind", "parabolic")
    if kind not in ("parabolic", "horizon"):
        raise ConfigError(f"{path}.kind", f"unknown anchor kind {kind!r}")
    rep = d.get("rep", "")
    if not isinstance(rep, str):
        raise ConfigError(f"{path}.rep", "expected a word string")
    return AnchorConfig(kind, int(d.get("peripheral", 0)), rep, int(d.get("level", 0)))


def _space(d: Any, path: str, base: Path) -> SpaceConfig:
    if not isinstance(d, dict):
        raise ConfigError(path, "expected a mapping")
    extra = set(d) - _SPACE_KEYS
    if extra:
        raise ConfigError(f"{path}.{sorted(extra)[0]}", "unknown key")
    gpath = _need(d, "group", path, str)
    full = (base / gpath).resolve()
    try:
        spec = load_group_spec(full)
    except FileNotFoundError:
        raise ConfigError(f"{path}.group", f"no such file {gpath}") from None
    except GroupSpecError as exc:
        raise ConfigError(f"{path}.group", f"{gpath}: {exc}") from None
    radius = _need(d, "radius", path)
    depth = _need(d, "depth", path)
    rho = _need(d, "rho", path)
    tau = _need(d, "tau", path, float)
    if radius < 1:
        raise ConfigError(f"{path}.radius", "must be >= 1")
    if depth < 1:
        raise ConfigError(f"{path}.depth", "must be >= 1")
    if tau < 1 or 2 * tau != int(2 * tau):
        raise ConfigError(f"{path}.tau", "must be a half-integer >= 1")
    anchor = _anchor(d.get("anchor", {"kind": "parabolic"}), f"{path}.anchor")
    second = _anchor(d["second_anchor"], f"{path}.second_anchor") if "second_anchor" in d else None
    if anchor.kind == "parabolic" and anchor.peripheral >= len(spec.peripherals):
        raise ConfigError(f"{path}.anchor.peripheral", "group has no such peripheral subgroup")
    return SpaceConfig(spec, gpath, radius, depth, rho, float(tau), anchor, second)


def parse_config(text: str, base: Path | str = ".", source: str = "") -> RunConfig:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("", f"invalid YAML: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("", "config must be a mapping")
    extra = set(raw) - _TOP_KEYS
    if extra:
        raise ConfigError(sorted(extra)[0], "unknown key")
    base = Path(base)
    seed = _need(raw, "seed", "")
    dom = _space(raw.get("domain"), "domain", base)
    cod = _space(raw["codomain"], "codomain", base) if "codomain" in raw else None
    R = raw.get("shadow_radius", "auto")
    if R == "auto":
        R = None
    elif not isinstance(R, int) or R < 1:
        raise ConfigError("shadow_radius", "expected a positive integer or 'auto'")
    policy = raw.get("radius_policy", "fail")
    if policy not in ("fail", "warn"):
        raise ConfigError("radius_policy", "expected 'fail' or 'warn'")
    dcfg = raw.get("delta", {}) or {}
    mode = dcfg.get("mode", "sampled")
    if mode not in ("sampled", "exhaustive"):
        raise ConfigError("delta.mode", f"unknown mode {mode!r}")
    samples = dict(SAMPLE_DEFAULTS)
    for k, v in (raw.get("samples") or {}).items():
        if k not in SAMPLE_DEFAULTS:
            raise ConfigError(f"samples.{k}", "unknown sampler")
        if not isinstance(v, int) or v < 1:
            raise ConfigError(f"samples.{k}", "expected a positive integer")
        samples[k] = v
    larger = raw.get("larger_radius")
    if larger is not None and (not isinstance(larger, int) or larger <= dom.radius):
        raise ConfigError("larger_radius", "must be an integer above domain.radius")
    larger_cod = raw.get("larger_codomain_radius")
    if larger_cod is not None:
        if cod is None or larger is None:
            raise ConfigError("larger_codomain_radius", "needs a codomain and larger_radius")
        if not isinstance(larger_cod, int) or larger_cod < cod.radius:
            raise ConfigError("larger_codomain_radius", "must be an integer >= codomain.radius")
    cod_atlas = raw.get("codomain_atlas", "induced")
    if cod_atlas not in ("induced", "independent"):
        raise ConfigError("codomain_atlas", "expected 'induced' or 'independent'")
    return RunConfig(
        name=str(raw.get("name", "run")), seed=seed, domain=dom, codomain=cod,
        shadow_radius=R, radius_policy=policy, delta_mode=mode,
        delta_samples=int(dcfg.get("samples", 1000)), samples=samples,
        budget=int(raw.get("budget", 400_000)), larger_radius=larger,
        larger_codomain_radius=larger_cod, codomain_atlas=cod_atlas, raw=raw, source=source,
    )


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("", f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text, path.parent, str(path))
