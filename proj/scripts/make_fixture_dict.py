#!/usr/bin/env python3
"""Build data/dict/fixture.dict.

Keeps every jieba dictionary entry that occurs inside a multi-character Han
token of o200k_base, then appends entries listed in EXTRA. Needs jieba and
the o200k_base rank file (path as first argument).
"""
import base64
import os
import pathlib
import sys

import jieba

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "dict" / "fixture.dict"

# Missing from jieba 0.42.1 but needed for the worked example.
EXTRA = [("微信", 5000, "n")]


def is_han(c):
    return 0x4E00 <= ord(c) <= 0x9FFF or 0x3400 <= ord(c) <= 0x4DBF


def han_tokens(rank_path):
    for line in pathlib.Path(rank_path).read_bytes().splitlines():
        if not line:
            continue
        b64, _ = line.split()
        try:
            text = base64.b64decode(b64).decode("utf-8")
        except UnicodeDecodeError:
            continue
        if text.startswith(" "):
            text = text[1:]
        if len(text) >= 2 and all(is_han(c) for c in text):
            yield text


def main():
    rank_path = sys.argv[1]
    source = os.path.join(os.path.dirname(jieba.__file__), "dict.txt")
    entries = []
    for line in open(source, encoding="utf-8"):
        parts = line.split()
        if parts:
            entries.append(parts)
    known = {p[0] for p in entries}

    wanted = set()
    for tok in han_tokens(rank_path):
        for i in range(len(tok)):
            for j in range(i + 1, len(tok) + 1):
                if tok[i:j] in known:
                    wanted.add(tok[i:j])

    seen = set()
    lines = []
    for parts in entries:
        if parts[0] in wanted and parts[0] not in seen:
            seen.add(parts[0])
            lines.append(" ".join(parts))
    for word, freq, tag in EXTRA:
        assert word not in known, word
        lines.append(f"{word} {freq} {tag}")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"{len(lines)} entries -> {OUT}")


if __name__ == "__main__":
    main()
