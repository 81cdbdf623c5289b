"""Shipped scenario corpus (positive) and the negative validation corpus."""

from importlib import resources

_PKG = resources.files(__name__)


def corpus_paths():
    """Positive corpus files by name, in deterministic order."""
    out = {}
    for entry in sorted(_PKG.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = entry
    return out


def negative_paths():
    """Negative corpus files by name (each fails validation with a
    documented diagnostic code)."""
    out = {}
    for entry in sorted((_PKG / "negative").iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            out[entry.name[:-5]] = entry
    return out
