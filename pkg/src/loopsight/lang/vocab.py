"""Persistent token-text -> integer id mapping.

Id 0 is reserved for padding and never stored. Ids are handed out
sequentially from 1. Freezing the vocabulary allocates one more id for
unknown tokens, stored under the key ``<UNK>`` so the JSON file stays a flat
``{"import": 1, ...}`` object.
"""

from __future__ import annotations

import json
from pathlib import Path

from loopsight.lang.lexer import Token

PAD_ID = 0
UNK_TEXT = "<UNK>"


class VocabError(ValueError):
    pass


class TokenVocab:
    def __init__(self, mapping: dict[str, int] | None = None):
        self.map: dict[str, int] = {}
        if mapping:
            _check_ids(mapping)
            self.map = dict(sorted(mapping.items(), key=lambda kv: kv[1]))

    @property
    def next_id(self) -> int:
        return len(self.map) + 1

    @property
    def frozen(self) -> bool:
        return UNK_TEXT in self.map

    @property
    def unk_id(self) -> int | None:
        return self.map.get(UNK_TEXT)

    def freeze(self) -> None:
        if not self.frozen:
            self.map[UNK_TEXT] = self.next_id

    def add(self, text: str) -> int:
        if text not in self.map:
            self.map[text] = self.next_id
        return self.map[text]

    def inverse(self) -> dict[int, str]:
        return {v: k for k, v in self.map.items()}

    def __len__(self):
        return len(self.map)

    def __eq__(self, other):
        return isinstance(other, TokenVocab) and self.map == other.map

    def __repr__(self):
        return f"TokenVocab({len(self.map)} entries, frozen={self.frozen})"


def _check_ids(mapping: dict[str, int]) -> None:
    seen: dict[int, str] = {}
    for key, value in mapping.items():
        if not isinstance(key, str) or not key:
            raise VocabError(f"invalid token key {key!r}")
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise VocabError(f"key {key!r}: id must be a positive integer, got {value!r}")
        if value in seen:
            raise VocabError(f"key {key!r}: duplicate id {value} (also used by {seen[value]!r})")
        seen[value] = key
    n = len(mapping)
    for value, key in seen.items():
        if value > n:
            raise VocabError(f"key {key!r}: id {value} breaks the contiguous range 1..{n}")


def encode(tokens: list[Token], vocab: TokenVocab, frozen: bool = False) -> list[int]:
    """Map token texts to ids, growing ``vocab`` unless ``frozen``.

    Under ``frozen`` unseen texts map to the UNK id, which is allocated on the
    spot if the vocabulary was never frozen.
    """
    if not frozen:
        if vocab.frozen:
            raise VocabError("cannot grow a frozen vocabulary")
        return [vocab.add(tok.text) for tok in tokens]
    vocab.freeze()
    unk = vocab.unk_id
    return [vocab.map.get(tok.text, unk) for tok in tokens]


def save_vocab(vocab: TokenVocab, path) -> None:
    Path(path).write_text(json.dumps(vocab.map, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")


def load_vocab(path) -> TokenVocab:
    text = Path(path).read_text(encoding="utf-8")

    def no_duplicates(pairs):
        out = {}
        for key, value in pairs:
            if key in out:
                raise VocabError(f"key {key!r}: appears more than once")
            out[key] = value
        return out

    try:
        data = json.loads(text, object_pairs_hook=no_duplicates)
    except json.JSONDecodeError as exc:
        raise VocabError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(data, dict):
        raise VocabError(f"{path}: expected a JSON object")
    return TokenVocab(data)
