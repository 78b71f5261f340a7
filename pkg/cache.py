#
#  cache.py
#
#  Minimal-support families are the expensive input of the pack/cover oracles. They are kept
#  in memory per (host, pattern), least recently used first out once `cache_entries` is reached,
#  and pickled to disk with dill by `flush` when `cache_file` is set.
#
import os
import threading
from collections import OrderedDict

from util import get_settings, log

_memory = OrderedDict()
_lock = threading.Lock()
_loaded_from = None
_dirty = False


def _cache_file():
    return get_settings().get("cache_file")


def _capacity():
    return get_settings().get("cache_entries")


def import_cache(path):
    try:
        import dill

        with open(path, 'rb') as fin:
            return dill.load(fin)
    # a cache written by another version is just stale, start over
    except (ModuleNotFoundError, FileNotFoundError, EOFError, OSError, ValueError) as e:
        log(f"could not load cache {path}: {e}", 1)
        return {}


def export_cache(path):
    try:
        import dill
    except ModuleNotFoundError:
        log("dill is not installed, the support cache stays in memory", 3)
        return False

    with _lock:
        snapshot = dict(_memory)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as fout:
        dill.dump(snapshot, fout)
    log(f"saved {len(snapshot)} support families to {path}", 1)
    return True


def _evict():
    capacity = _capacity()
    if capacity is None:
        return
    while len(_memory) > capacity:
        _memory.popitem(last=False)


def _ensure_loaded():
    global _loaded_from
    path = _cache_file()
    if not path or path == _loaded_from:
        return
    stored = import_cache(path)
    with _lock:
        for key, value in stored.items():
            _memory.setdefault(key, value)
        _evict()
        _loaded_from = path
    log(f"loaded {len(stored)} support families from {path}", 1)


def get_or_compute(key, compute):
    """Look `key` up in memory (and the on-disk cache), computing and storing it on a miss."""
    global _dirty
    _ensure_loaded()
    with _lock:
        if key in _memory:
            _memory.move_to_end(key)
            return _memory[key]

    value = compute()

    with _lock:
        _memory[key] = value
        _evict()
        _dirty = True
    return value


def flush():
    """Write the cache to `cache_file` if anything new was computed since the last flush."""
    global _dirty
    path = _cache_file()
    if not path or not _dirty:
        return False
    written = export_cache(path)
    if written:
        _dirty = False
    return written


def size() -> int:
    with _lock:
        return len(_memory)


def clear():
    global _loaded_from, _dirty
    with _lock:
        _memory.clear()
        _loaded_from = None
        _dirty = False
