#
#  util.py
#
import os
import json
import hashlib
from dataclasses import dataclass
from functools import lru_cache

from rich.console import Console

from errors import SizeLimitError


SETTINGS_FILE = "settings.json"
LIMITS_ENV = "EPGAP_LIMITS"

DEFAULT_SETTINGS = {
    "contraction_degeneracy_exact": 12,
    "minor_pattern": 10,
    "minor_host": 24,
    "minimal_models": 20000,
    "treewidth": 20,
    "pathwidth": 16,
    "mesh_find_n": 12,
    "mesh_find_k": 2,
    "mesh_find_s": 6,
    "mesh_verify_s": 10,
    "mesh_verify_k": 3,
    "pack_host": 18,
    "pack_host_triangle": 24,
    "log_level": 2,
    "cache_entries": 512,
    "cache_file": None
}

# diagnostics never go to stdout, that's where the JSON goes
console = Console(stderr=True, highlight=False)


def _coerce(value: str):
    if value.lower() in ("none", "null"):
        return None
    try:
        return int(value)
    except ValueError:
        return value


@lru_cache(maxsize=1)
def get_settings():
    settings = dict(DEFAULT_SETTINGS)

    if os.path.isfile(SETTINGS_FILE):
        with open(SETTINGS_FILE, "r") as file:
            settings.update(json.load(file))

    overrides = os.environ.get(LIMITS_ENV, "")
    for item in overrides.split(","):
        if "=" not in item:
            continue
        key, value = item.split("=", 1)
        settings[key.strip()] = _coerce(value.strip())

    return settings


def reload_settings():
    get_settings.cache_clear()
    return get_settings()


def modify_json(file_path, key, value):
    data = {}
    if os.path.isfile(file_path):
        with open(file_path, 'r') as file:
            data = json.load(file)

    data[key] = value

    with open(file_path, 'w') as file:
        json.dump(data, file, indent=4, sort_keys=True)

    if file_path == SETTINGS_FILE:
        reload_settings()


def limit(key: str) -> int:
    return get_settings()[key]


def check_limit(key: str, size: int, what: str = ""):
    """Fail fast before an exponential search starts."""
    bound = limit(key)
    if bound is not None and size > bound:
        raise SizeLimitError(key, size, bound, what)


def log(message: str, level: int = 2):
    """
    Show a diagnostic on the error stream.

    # Levels:
        - 1: Debug, search statistics and recursion traces.
        - 2: Info, progress of long runs.
        - 3: Warning, something is off but the result is still sound.
        - 4: Error, the operation could not finish.
    """
    if level < get_settings().get("log_level", 2):
        return

    message = str(message)

    if level == 1:
        final_message = f"[bold][[blue_violet]DEBUG[/blue_violet]][/bold]     {message}"
    elif level == 2:
        final_message = f"[bold][[spring_green2]INFO[/spring_green2]][/bold]      {message}"
    elif level == 3:
        final_message = f"[bold][[light_goldenrod1]WARNING[/light_goldenrod1]][/bold]   {message}"
    else:
        final_message = f"[bold][[bright_red]ERROR[/bright_red]][/bold]     {message}"

    console.print(final_message)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from any tuple of printable parts (suite seed, lemma, trial)."""
    digest = hashlib.sha256(":".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class CheckResult:
    """Outcome of a verifier: truthy iff every clause holds, else names the first failure."""
    ok: bool
    clause: str = ""
    detail: str = ""

    def __bool__(self):
        return self.ok

    @classmethod
    def passed(cls):
        return cls(True)

    @classmethod
    def failed(cls, clause: str, detail: str = ""):
        return cls(False, clause, detail)

    def to_json(self):
        return {"ok": self.ok, "clause": self.clause, "detail": self.detail}
