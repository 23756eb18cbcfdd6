#!/usr/bin/env python3
"""Freeze reference values for the published vocabularies.

Writes tests/data/vocab_golden.json (counts and histograms computed here in
Python) and tests/data/encode_golden.jsonl (tiktoken encodings of a fixed
corpus). Argument: directory holding the .tiktoken files.
"""
import base64
import json
import pathlib
import random
import sys

import tiktoken

ROOT = pathlib.Path(__file__).resolve().parent.parent
DATA = ROOT / "tests" / "data"


def is_han(c):
    return 0x4E00 <= ord(c) <= 0x9FFF or 0x3400 <= ord(c) <= 0x4DBF


def classify(text, strippable):
    if text is None:
        return "nontext"
    body = text[1:] if text and text[0] in strippable else text
    if not body:
        return "other"
    kinds = set()
    for c in body:
        if is_han(c):
            kinds.add("han")
        elif ("a" <= c <= "z") or ("A" <= c <= "Z"):
            kinds.add("latin")
        else:
            kinds.add("other")
    return "mixed" if len(kinds) > 1 else kinds.pop()


def load(path):
    ranks = {}
    for line in path.read_bytes().splitlines():
        if line:
            b64, r = line.split()
            ranks[base64.b64decode(b64)] = int(r)
    return ranks


def summarize(ranks):
    out = {"size": len(ranks), "max_rank": max(ranks.values())}
    texts = {}
    for b, r in ranks.items():
        try:
            texts[r] = b.decode("utf-8")
        except UnicodeDecodeError:
            texts[r] = None
    classes = {}
    for t in texts.values():
        c = classify(t, " ")
        classes[c] = classes.get(c, 0) + 1
    out["classes_strict"] = dict(sorted(classes.items()))
    for rule, strippable, count_stripped in (("strict", " ", False), ("raw", " _", True)):
        hist = {}
        for t in texts.values():
            if classify(t, strippable) != "han":
                continue
            n = len(t)
            if t[0] in strippable and not count_stripped:
                n -= 1
            hist[n] = hist.get(n, 0) + 1
        out["han_hist_" + rule] = {str(k): v for k, v in sorted(hist.items())}
    unreachable = []
    for b, r in ranks.items():
        if len(b) < 2:
            continue
        if not any(ranks.get(b[:k], r) < r and ranks.get(b[k:], r) < r for k in range(1, len(b))):
            unreachable.append(r)
    out["merge_unreachable_count"] = len(unreachable)
    out["merge_unreachable_first"] = sorted(unreachable)[:20]
    return out


def corpus():
    fixed = [
        "", "a", "hello world", "Hello, World!", "ab ab", "  leading", "trailing  ", "tabs\tand\nnewlines\r\n",
        "I'm sure you've seen they'll", "DON'T SHOUT", "1234567890", "3.14159 and 2,718",
        "微信公众号天天中彩票", " 微信公众号天天中彩票", "北京赛车", " 国产精品", "_日本毛片免费视频观看",
        "日本語のテキスト", "한국어 텍스트", "Ελληνικά", "русский текст", "emoji 😀🎉 test",
        "mixed 中文 and English", "def f(x):\n    return x ** 2\n", "<html><body>hi</body></html>",
        "\n\n\n", "   ", "áé", "ÀÉÎÕÜ", "x" * 300, "的" * 50,
        "https://example.com/path?q=1&r=2", "foo/bar/baz", "CamelCaseIdentifierName", "snake_case_name",
    ]
    rng = random.Random(20240501)
    pools = [
        [chr(c) for c in range(0x20, 0x7F)],
        [chr(c) for c in range(0x4E00, 0x4E00 + 3000)],
        [chr(c) for c in range(0x3040, 0x30FF)],
        [chr(c) for c in range(0x0400, 0x04FF)],
        [" ", "\n", "\t", "  "],
        ["😀", "🎉", "👍🏽", "🇨🇳"],
    ]
    for _ in range(300):
        n = rng.randint(1, 40)
        fixed.append("".join(rng.choice(rng.choice(pools)) for _ in range(n)))
    return fixed


def main():
    rank_dir = pathlib.Path(sys.argv[1])
    golden = {}
    for name in ("o200k_base", "cl100k_base"):
        golden[name] = summarize(load(rank_dir / f"{name}.tiktoken"))
    (DATA / "vocab_golden.json").write_text(json.dumps(golden, indent=2) + "\n")

    encodings = {}
    for name in ("o200k_base", "cl100k_base"):
        ranks = load(rank_dir / f"{name}.tiktoken")
        pat = json.loads((ROOT / "data" / "profiles" / f"{name}.json").read_text())
        encodings[name] = tiktoken.Encoding(name=name, pat_str=pat["pattern"], mergeable_ranks=ranks,
                                            special_tokens=pat["special_tokens"])
    with open(DATA / "encode_golden.jsonl", "w", encoding="utf-8") as f:
        for text in corpus():
            row = {"text": text}
            for name, enc in encodings.items():
                row[name] = enc.encode_ordinary(text)
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
