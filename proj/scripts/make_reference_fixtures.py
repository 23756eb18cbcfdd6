#!/usr/bin/env python3
"""Generate data/fixtures/reference: synthetic records whose aggregates match the
published tables.

Only aggregate counts are constrained; which token gets which score or
placement is drawn with a fixed seed. Token texts are real o200k_base Han
tokens where the strict length rule supplies enough of them and synthetic
word concatenations (ranks >= 10_000_000, flagged) otherwise.

Arguments: o200k_base.tiktoken path.
"""
import base64
import itertools
import json
import pathlib
import random
import sys

import jieba

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "fixtures" / "reference"
SEED = 20240611
SYNTHETIC_BASE = 10_000_000

PLAN = {**{n: 20 for n in range(2, 10)}, 10: 4, 11: 2}
MODELS = ["GPT-4", "GPT-4o"]
LABELS = {"GPT-4": "G4", "GPT-4o": "G4o"}

# Sentences containing the token (present) per (model, variant).
PRESENT = {("GPT-4", "long"): 134, ("GPT-4", "split"): 151, ("GPT-4o", "long"): 75, ("GPT-4o", "split"): 139}
# Score counts 0..5.
SCORES = {
    ("GPT-4", "long"): [4, 3, 5, 11, 17, 126],
    ("GPT-4", "split"): [1, 1, 7, 10, 22, 125],
    ("GPT-4o", "long"): [58, 10, 16, 8, 5, 69],
    ("GPT-4o", "split"): [1, 1, 3, 14, 24, 123],
}
# Placement counts; rows G4o-L, G4o-S, G4-L, G4-S; columns 1st..4th.
RANK_IDS = ["G4o-L", "G4o-S", "G4-L", "G4-S"]
RANK_COUNTS = [[100, 32, 17, 17], [20, 62, 33, 51], [13, 40, 57, 56], [33, 32, 59, 42]]
# (accurate, consistent) counts.
CONSISTENCY = {"explain": (85, 114), "translate": (78, 117)}

FIG2_RANK = 181081
FIG2 = {
    ("GPT-4", "long"): ("我通过微信公众号天天中彩票参与了最新的彩票抽奖活动。", 5),
    ("GPT-4o", "long"): ("我们今天学习了如何使用新的词汇扩展我们的表达能力。", 0),
    ("GPT-4", "split"): ("天天在微信公众号中关注彩票信息。", 5),
    ("GPT-4o", "split"): ("微信公众号天天中奖彩票。", 3),
}

FILLERS = [
    "我们今天学习了如何使用新的词汇扩展我们的表达能力。",
    "这是一个关于天气的句子。",
    "他喜欢在周末去公园散步。",
    "请把窗户关上。",
    "图书馆里非常安静。",
    "Sentence unrelated to the prompt.",
]


def contains(token, segments, sentence):
    sentence = sentence.strip()
    if segments is not None:
        return all(s in sentence for s in segments)
    return token in sentence


def filler_for(token, segments, rng):
    options = [f for f in FILLERS if not contains(token, segments, f)]
    return rng.choice(options)


def main():
    rng = random.Random(SEED)
    seg = jieba.Tokenizer(dictionary=str(ROOT / "data" / "dict" / "fixture.dict"))
    seg.initialize()

    rank_of = {}
    by_len = {}
    path = pathlib.Path(sys.argv[1])
    for line in path.read_bytes().splitlines():
        if not line:
            continue
        b64, r = line.split()
        try:
            text = base64.b64decode(b64).decode("utf-8")
        except UnicodeDecodeError:
            continue
        body = text[1:] if text.startswith(" ") else text
        if len(body) >= 2 and all(0x4E00 <= ord(c) <= 0x9FFF or 0x3400 <= ord(c) <= 0x4DBF for c in body):
            rank_of.setdefault(body, int(r))
            by_len.setdefault(len(body), []).append((int(r), body))

    words = sorted({w for w in (l.split()[0] for l in open(ROOT / "data" / "dict" / "fixture.dict", encoding="utf-8"))
                    if len(w) >= 2})
    tokens = []
    synthetic_next = SYNTHETIC_BASE
    for length, take in PLAN.items():
        pool = sorted(by_len.get(length, []))
        chosen = []
        if length == 10:
            chosen = [p for p in pool if p[0] == FIG2_RANK]
            pool = [p for p in pool if p[0] != FIG2_RANK]
        rest = take - len(chosen)
        chosen += rng.sample(pool, min(rest, len(pool)))
        for r, text in chosen:
            tokens.append({"rank": r, "text": text, "length": length, "synthetic": False})
        while len(chosen) < take:
            text = ""
            while len(text) < length:
                w = rng.choice(words)
                text += w[: length - len(text)]
            if text in rank_of:
                continue
            chosen.append((synthetic_next, text))
            tokens.append({"rank": synthetic_next, "text": text, "length": length, "synthetic": True})
            synthetic_next += 1
    tokens.sort(key=lambda t: (t["length"], t["rank"]))
    for t in tokens:
        t["segments"] = seg.lcut(t["text"], HMM=False)
    assert len(tokens) == 166

    n = len(tokens)
    fig2_idx = next(i for i, t in enumerate(tokens) if t["rank"] == FIG2_RANK)

    generations, scores = [], []
    score5_sets = {}
    for (model, variant), score_counts in SCORES.items():
        present_n = PRESENT[(model, variant)]
        fixed = FIG2[(model, variant)]
        fig2_present = contains(tokens[fig2_idx]["text"], tokens[fig2_idx]["segments"] if variant == "split" else None,
                                fixed[0])
        others = [i for i in range(n) if i != fig2_idx]
        counts = list(score_counts)
        counts[fixed[1]] -= 1
        # Score-5 picks: GPT-4o long tokens only up to length 6.
        if (model, variant) == ("GPT-4o", "long"):
            quota = {2: 14, 3: 14, 4: 14, 5: 14, 6: 13}
            five = []
            for length, q in quota.items():
                five += rng.sample([i for i in others if tokens[i]["length"] == length], q)
            assert len(five) == counts[5]
        else:
            five = rng.sample(others, counts[5])
        score5_sets[(model, variant)] = set(five) | ({fig2_idx} if fixed[1] == 5 else set())
        left = [i for i in others if i not in set(five)]
        extra_present = present_n - len(five) - (1 if fig2_present else 0)
        assert 0 <= extra_present <= len(left)
        rng.shuffle(left)
        # Absent sentences take the lowest remaining scores.
        low_scores = [s for s in range(5) for _ in range(counts[s])]
        absent = left[extra_present:]
        present_rest = left[:extra_present]
        assignment = {}
        for i, s in zip(absent + present_rest, low_scores):
            assignment[i] = s
        for i in five:
            assignment[i] = 5
        present = set(five) | set(present_rest)
        for i, t in enumerate(tokens):
            segs = t["segments"] if variant == "split" else None
            if i == fig2_idx:
                sentence, score = fixed
            else:
                score = assignment[i]
                if i in present:
                    body = "、".join(t["segments"]) if variant == "split" else t["text"]
                    sentence = f"这个句子使用了{body}。"
                else:
                    sentence = filler_for(t["text"], segs, rng)
            assert contains(t["text"], segs, sentence) == (i in present or (i == fig2_idx and fig2_present))
            generations.append({
                "schema": "tokbias.generation/1",
                "record_id": f"fx-{model}-{variant}-{t['rank']}",
                "token_rank": t["rank"],
                "variant": variant,
                "model": model,
                "repetition": 0,
                "token": t["text"],
                "segments": t["segments"] if variant == "split" else [],
                "prompt": "",
                "response": sentence,
                "timestamp": "2024-05-01T00:00:00Z",
            })
            scores.append({"schema": "tokbias.score/1", "token_rank": t["rank"], "model": model,
                           "variant": variant, "score": score})

    # Placements: Birkhoff decomposition of the count matrix.
    m = [row[:] for row in RANK_COUNTS]
    perms = []
    while any(any(row) for row in m):
        best = None
        for p in itertools.permutations(range(4)):
            w = min(m[r][p[r]] for r in range(4))
            if w > 0 and (best is None or w > best[0]):
                best = (w, p)
        w, p = best
        for r in range(4):
            m[r][p[r]] -= w
        perms += [p] * w
    assert len(perms) == n
    rng.shuffle(perms)
    rankings = []
    for t, p in zip(tokens, perms):
        rankings.append({"schema": "tokbias.rank/1", "token_rank": t["rank"],
                         "placements": {RANK_IDS[r]: p[r] + 1 for r in range(4)}})

    judgments = []
    flags = {}
    for task, (acc_n, cons_n) in CONSISTENCY.items():
        order = list(range(n))
        rng.shuffle(order)
        consistent = set(order[:cons_n])
        accurate = set(order[:acc_n])
        flags[task] = (accurate, consistent)
    for i, t in enumerate(tokens):
        for task in ("translate", "explain"):
            accurate, consistent = flags[task]
            a, c = int(i in accurate), int(i in consistent)
            judgments.append({
                "schema": "tokbias.judge/1",
                "record_id": f"fx-judge-{task}-{t['rank']}",
                "token_rank": t["rank"],
                "mode": "consistency",
                "task": task,
                "judge_model": "GPT-4",
                "template_version": "fixture",
                "members": [f"GPT-4o#{k}" for k in range(1, 6)],
                "prompt": "",
                "response": f"consistent={c} accurate={a}",
                "timestamp": "2024-05-01T00:00:00Z",
                "accurate": a,
                "consistent": c,
            })

    OUT.mkdir(parents=True, exist_ok=True)

    def jsonl(name, rows):
        with open(OUT / name, "w", encoding="utf-8") as f:
            for row in rows:
                f.write(json.dumps(row, ensure_ascii=False) + "\n")

    (OUT / "tokens.json").write_text(json.dumps(tokens, ensure_ascii=False, indent=1) + "\n", encoding="utf-8")
    jsonl("generations.jsonl", generations)
    jsonl("scores.jsonl", scores)
    jsonl("rankings.jsonl", rankings)
    jsonl("judgments.jsonl", judgments)
    manifest = {
        "synthetic": True,
        "description": "Synthetic records consistent with the published aggregate tables; "
                       "per-token assignments are arbitrary.",
        "seed": SEED,
        "cap": 20,
        "labels": LABELS,
        "files": {
            "tokens": "tokens.json",
            "generations": "generations.jsonl",
            "scores": "scores.jsonl",
            "rankings": "rankings.jsonl",
            "judgments": "judgments.jsonl",
        },
        "expected": {
            "tra": {f"{m}:{v}": c for (m, v), c in PRESENT.items()},
            "ranking_counts": dict(zip(RANK_IDS, RANK_COUNTS)),
            "score_counts": {f"{m}:{v}": c for (m, v), c in SCORES.items()},
            "consistency_counts": {"meanings": CONSISTENCY["explain"], "translations": CONSISTENCY["translate"]},
        },
    }
    (OUT / "manifest.json").write_text(json.dumps(manifest, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    print(f"{n} tokens, {len(generations)} generations, {synthetic_next - SYNTHETIC_BASE} synthetic")


if __name__ == "__main__":
    main()
