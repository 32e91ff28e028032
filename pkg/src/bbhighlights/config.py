"""Run configuration files (YAML).

Relative paths are resolved against the directory of the config file.
Secrets never live here; the HTTP backend reads LLM_ENDPOINT and
LLM_API_KEY from the environment.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from .errors import ConfigError
from .evaluation import DEFAULT_K_GRID
from .llm import BackendKind, LLMRequestConfig
from .reflection import POST_ROLL_MS, PRE_ROLL_MS, Preferences


@dataclass(frozen=True)
class GameSpec:
    game_log: Path
    ground_truth: Path | None = None


@dataclass(frozen=True)
class RunConfig:
    we_table: Path
    out_dir: Path
    game_log: Path | None = None
    ground_truth: Path | None = None
    prompt_dir: Path | None = None
    backend: BackendKind = BackendKind.MOCK
    llm: LLMRequestConfig = field(default_factory=LLMRequestConfig)
    preferences: Preferences = field(default_factory=Preferences)
    pre_roll_ms: int = PRE_ROLL_MS
    post_roll_ms: int = POST_ROLL_MS
    figures: bool = True
    reflect: bool = True
    games: tuple[GameSpec, ...] = ()
    selector: str = "pipeline"
    k_grid: tuple[int, ...] = DEFAULT_K_GRID

    def with_overrides(self, *, backend=None, k=None, out_dir=None, k_grid=None) -> RunConfig:
        cfg = self
        if backend is not None:
            cfg = replace(cfg, backend=BackendKind(backend))
        if k is not None:
            cfg = replace(cfg, preferences=replace(cfg.preferences, k=k))
        if out_dir is not None:
            cfg = replace(cfg, out_dir=Path(out_dir))
        if k_grid is not None:
            cfg = replace(cfg, k_grid=tuple(k_grid))
        return cfg

    def check_paths(self, *, need_game: bool = True) -> None:
        paths = [("we_table", self.we_table)]
        if need_game:
            paths.append(("game_log", self.game_log))
        if self.ground_truth is not None:
            paths.append(("ground_truth", self.ground_truth))
        if self.prompt_dir is not None:
            paths.append(("prompt_dir", self.prompt_dir))
        for g in self.games:
            paths.append(("games.game_log", g.game_log))
            if g.ground_truth is not None:
                paths.append(("games.ground_truth", g.ground_truth))
        for name, p in paths:
            if p is None:
                raise ConfigError(f"config is missing {name}")
            if not Path(p).exists():
                raise ConfigError(f"{name} not found: {p}")


def _path(base: Path, value) -> Path | None:
    if value is None:
        return None
    p = Path(value)
    return p if p.is_absolute() else base / p


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except FileNotFoundError:
        raise ConfigError(f"config not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    if not isinstance(doc, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    base = path.parent

    known = {"we_table", "out_dir", "game_log", "ground_truth", "prompt_dir", "backend", "llm",
             "preferences", "pre_roll_ms", "post_roll_ms", "figures", "reflect", "games",
             "selector", "k_grid"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{path}: unknown key(s) {sorted(unknown)}")
    if "we_table" not in doc:
        raise ConfigError(f"{path}: we_table is required")

    try:
        games = tuple(
            GameSpec(_path(base, g["game_log"]), _path(base, g.get("ground_truth")))
            for g in doc.get("games") or ()
        )
        return RunConfig(
            we_table=_path(base, doc["we_table"]),
            out_dir=_path(base, doc.get("out_dir", "out")),
            game_log=_path(base, doc.get("game_log")),
            ground_truth=_path(base, doc.get("ground_truth")),
            prompt_dir=_path(base, doc.get("prompt_dir")),
            backend=BackendKind(doc.get("backend", "mock")),
            llm=LLMRequestConfig.from_dict(doc.get("llm")),
            preferences=Preferences.from_dict(doc.get("preferences")),
            pre_roll_ms=int(doc.get("pre_roll_ms", PRE_ROLL_MS)),
            post_roll_ms=int(doc.get("post_roll_ms", POST_ROLL_MS)),
            figures=bool(doc.get("figures", True)),
            reflect=bool(doc.get("reflect", True)),
            games=games,
            selector=str(doc.get("selector", "pipeline")),
            k_grid=tuple(int(k) for k in doc.get("k_grid", DEFAULT_K_GRID)),
        )
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"{path}: {exc}") from None
