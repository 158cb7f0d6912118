"""Scenario files: YAML documents describing a batch of seeded episodes.

Example::

    schema: 1
    episodes: 3
    base_seed: 1
    output_dir: out/nominal
    world: {row_length: 8.0, row_spacing: 1.5, dropout_rate: 0.0}
    camera: {horizontal_fov: 1.5, width: 224, height: 224}
    pipeline: {history_len: 3, depth_threshold: 2.0}
    controller: {v_x_max: 0.5, omega_z_max: 0.5}
    sim: {dt: 0.1, max_steps: 600, start: {x: 0.0, y: 0.0, theta: 0.0}}

Every section and key is optional; omitted values take the library defaults.
Unknown keys are rejected. Episode ``k`` uses world seed ``base_seed + k``.
"""
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .controller import ControllerConfig
from .masks import PipelineConfig
from .sim import CameraModel, RobotPose, SimConfig, SimRun, WorldSpec

SCHEMA_VERSION = 1

_SECTIONS = {
    "world": WorldSpec,
    "camera": CameraModel,
    "pipeline": PipelineConfig,
    "controller": ControllerConfig,
    "sim": SimConfig,
}
_TOP_LEVEL = {"schema", "episodes", "base_seed", "output_dir", *_SECTIONS}


class ConfigError(ValueError):
    def __init__(self, message, source=None, line=None, key=None):
        self.source, self.line, self.key = source, line, key
        where = str(source) if source else "<scenario>"
        if line is not None:
            where += f":{line}"
        if key:
            where += f": {key}"
        super().__init__(f"{where}: {message}")


@dataclass(frozen=True)
class Scenario:
    run: SimRun = field(default_factory=SimRun)
    episodes: int = 1
    base_seed: int = 0
    output_dir: str = "out"
    source: str | None = None

    def episode_seed(self, k):
        return self.base_seed + k

    def episode_run(self, k):
        return self.run.with_seed(self.episode_seed(k))

    def to_dict(self):
        sections = {}
        for name in _SECTIONS:
            sections[name] = dataclasses.asdict(getattr(self.run, name))
        sections["world"].pop("seed")
        return {
            "schema": SCHEMA_VERSION,
            "episodes": self.episodes,
            "base_seed": self.base_seed,
            "output_dir": self.output_dir,
            **sections,
        }


def _key_lines(node, prefix=(), out=None):
    """Map key paths to 1-based line numbers from a composed YAML node tree."""
    out = {} if out is None else out
    if isinstance(node, yaml.MappingNode):
        for k, v in node.value:
            path = prefix + (str(k.value),)
            out[path] = k.start_mark.line + 1
            _key_lines(v, path, out)
    return out


def _coerce(value, default, key, err):
    if isinstance(default, bool) or isinstance(value, bool):
        raise err(f"unsupported value {value!r}", key)
    if isinstance(default, int):
        if not isinstance(value, int):
            raise err(f"expected an integer, got {value!r}", key)
        return value
    if isinstance(default, float):
        if not isinstance(value, (int, float)):
            raise err(f"expected a number, got {value!r}", key)
        return float(value)
    raise err(f"unsupported value {value!r}", key)


def _build(cls, data, section, err):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise err("expected a mapping", (section,))
    defaults = cls()
    names = {f.name for f in dataclasses.fields(cls)}
    if cls is WorldSpec:
        names.discard("seed")
    kwargs = {}
    for key, value in data.items():
        path = (section, str(key))
        if key not in names:
            raise err(f"unknown key (expected one of: {', '.join(sorted(names))})", path)
        default = getattr(defaults, key)
        if isinstance(default, RobotPose):
            kwargs[key] = _build(RobotPose, value, f"{section}.{key}", err)
        else:
            kwargs[key] = _coerce(value, default, path, err)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        field_name = str(exc).split()[0]
        path = (section, field_name) if field_name in kwargs else (section,)
        raise err(str(exc), path) from None


def parse_scenario(text, source=None):
    """Parse scenario YAML text, raising ``ConfigError`` with line/field context."""
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        line = mark.line + 1 if mark is not None else None
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"invalid YAML: {problem}", source, line) from None

    lines = _key_lines(node)

    def err(message, path):
        parts = tuple(p for part in path for p in str(part).split("."))
        line = None
        for n in range(len(parts), 0, -1):
            if parts[:n] in lines:
                line = lines[parts[:n]]
                break
        return ConfigError(message, source, line, ".".join(parts))

    if not isinstance(data, dict):
        raise ConfigError("scenario must be a YAML mapping", source, 1)
    for key in data:
        if key not in _TOP_LEVEL:
            raise err(f"unknown top-level key (expected one of: {', '.join(sorted(_TOP_LEVEL))})", (key,))

    schema = data.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise err(f"unsupported schema {schema!r} (this version reads schema {SCHEMA_VERSION})", ("schema",))
    episodes = data.get("episodes", 1)
    if isinstance(episodes, bool) or not isinstance(episodes, int) or episodes < 1:
        raise err("episodes must be an integer >= 1", ("episodes",))
    base_seed = data.get("base_seed", 0)
    if isinstance(base_seed, bool) or not isinstance(base_seed, int) or base_seed < 0:
        raise err("base_seed must be a non-negative integer", ("base_seed",))
    output_dir = data.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        raise err("output_dir must be a non-empty string", ("output_dir",))

    parts = {name: _build(cls, data.get(name), name, err) for name, cls in _SECTIONS.items()}
    return Scenario(SimRun(**parts), episodes, base_seed, output_dir, None if source is None else str(source))


def load_scenario(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read scenario: {exc.strerror}", path) from None
    return parse_scenario(text, path)


def dump_scenario(scenario):
    return yaml.safe_dump(scenario.to_dict(), sort_keys=False)
