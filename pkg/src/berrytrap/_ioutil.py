"""Atomic file writing: write to a temp file in the target directory, then
rename over the destination so partial outputs never appear."""
import contextlib
import os
import tempfile

__all__ = ["atomic_writer"]


@contextlib.contextmanager
def atomic_writer(path):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise
