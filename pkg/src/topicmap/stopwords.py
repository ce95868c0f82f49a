"""Bundled English stopword list."""

import hashlib
from functools import lru_cache
from importlib import resources

from .errors import DataError

LIST_ID = "en-classic-v1"
_FILES = {LIST_ID: "stopwords_en.txt"}


def _raw(list_id):
    try:
        name = _FILES[list_id]
    except KeyError:
        raise DataError(f"unknown stopword list {list_id!r}") from None
    return resources.files("topicmap.data").joinpath(name).read_bytes()


@lru_cache(maxsize=None)
def load(list_id=LIST_ID):
    """Return the stopword set for `list_id`."""
    lines = _raw(list_id).decode("utf-8").splitlines()
    return frozenset(w.strip() for w in lines if w.strip() and not w.startswith("#"))


def checksum(list_id=LIST_ID):
    """SHA-256 of the bundled list file, as hex."""
    return hashlib.sha256(_raw(list_id)).hexdigest()
