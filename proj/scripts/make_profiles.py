#!/usr/bin/env python3
"""Write data/profiles/*.json from the tiktoken encoding definitions."""
import json
import pathlib

from tiktoken_ext import openai_public

# Only the pattern and special tokens are needed; skip loading merge ranks.
openai_public.load_tiktoken_bpe = lambda *a, **k: {}

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "profiles"

for name, rank_file in (("o200k_base", "o200k_base.tiktoken"), ("cl100k_base", "cl100k_base.tiktoken")):
    spec = getattr(openai_public, name)()
    doc = {
        "name": name,
        "rank_file": rank_file,
        "pattern": spec["pat_str"],
        "special_tokens": dict(sorted(spec["special_tokens"].items(), key=lambda kv: kv[1])),
    }
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
