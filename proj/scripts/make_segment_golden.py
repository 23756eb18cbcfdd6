#!/usr/bin/env python3
"""Freeze jieba (HMM off) segmentations against data/dict/fixture.dict.

Output: tests/data/segment_golden.tsv, one `text<TAB>seg seg ...` per line.
Input texts are the multi-character Han tokens of o200k_base (rank file path
as first argument).
"""
import pathlib
import sys

import jieba

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))
from make_fixture_dict import han_tokens  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parent.parent


def main():
    tok = jieba.Tokenizer(dictionary=str(ROOT / "data" / "dict" / "fixture.dict"))
    lines = []
    for text in sorted(set(han_tokens(sys.argv[1]))):
        lines.append(text + "\t" + " ".join(tok.lcut(text, HMM=False)))
    (ROOT / "tests" / "data" / "segment_golden.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(len(lines))


if __name__ == "__main__":
    main()
