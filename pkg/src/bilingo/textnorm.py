"""Shared token normalization.

Corpus tokens and lexicon forms must normalize identically, otherwise
exact-form matching between the two sources silently breaks.
"""
import unicodedata


def normalize_form(form: str) -> str:
    """Unicode NFC + casefold. Deterministic, idempotent."""
    return unicodedata.normalize("NFC", form).casefold()
