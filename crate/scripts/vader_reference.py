#!/usr/bin/env python3
"""Stand-alone reference scorer for the lexicon rules, used to freeze the
golden file checked by the Rust test-suite.

It reads the same lexicon tables but shares no code with the Rust engine.
Usage: vader_reference.py <data-dir> <out.jsonl>
"""
import json
import math
import os
import sys

B = 0.293
NEG = -0.74
CAPS = 0.733
EXCL = 0.292
ALPHA = 15.0

NEGATORS = set("""ain't aint aren't arent can't cannot cant couldn't couldnt daren't darent
despite didn't didnt doesn't doesnt don't dont hadn't hadnt hasn't hasnt haven't havent isn't
isnt mightn't mightnt mustn't mustnt needn't neednt neither never none nope nor not nothing
nowhere oughtn't oughtnt rarely seldom shan't shant shouldn't shouldnt uh-uh uhuh wasn't wasnt
weren't werent without won't wont wouldn't wouldnt""".split())

UP = set("""absolutely amazingly awfully completely considerable considerably decidedly deeply
effing enormous enormously entirely especially exceptional exceptionally extreme extremely
fabulously flippin flipping frackin fracking frickin fricking friggin frigging fuckin fucking
fuggin fugging fully greatly hella highly hugely incredible incredibly intensely major majorly
more most particularly purely quite really remarkably so substantially thoroughly total totally
tremendous tremendously uber unbelievably unusually utter utterly very""".split())

DOWN = set("""almost barely hardly kinda kindof kind-of less little marginal marginally occasional
occasionally partly scarce scarcely slight slightly somewhat sorta sortof sort-of""".split())


def load(data):
    lex = {}
    for name in ("lexicon.tsv", "emoji_valence.tsv", "slang.tsv"):
        with open(os.path.join(data, name), encoding="utf-8") as f:
            for line in f:
                line = line.rstrip("\n")
                if not line.strip() or line.startswith("#"):
                    continue
                tok, val = line.split("\t")[:2]
                lex[tok.strip().lower()] = float(val)
    return lex


def negated(word):
    return word in NEGATORS or "n't" in word


def sgn(x):
    return -1.0 if x < 0 else 1.0


def valences(lex, tokens, caps):
    out = []
    for i, tok in enumerate(tokens):
        if tok in UP or tok in DOWN or tok not in lex:
            out.append(0.0)
            continue
        v = lex[tok]
        if v != 0 and caps[i]:
            v += CAPS * sgn(v)
        for d, scale in ((1, 1.0), (2, 0.95), (3, 0.9)):
            if i - d < 0:
                break
            prev = tokens[i - d]
            if prev in lex:
                continue
            if (prev in UP or prev in DOWN) and v != 0:
                step = B if prev in UP else -B
                step *= sgn(v)
                if caps[i - d]:
                    step += CAPS * sgn(v)
                v += step * scale
            if negated(prev):
                v *= NEG
        out.append(v)
    return out


def score(lex, tokens, caps, excl):
    if not tokens:
        return dict(pos=0.0, neg=0.0, neu=0.0, compound=0.0)
    caps = list(caps) + [False] * (len(tokens) - len(caps))
    vals = valences(lex, tokens, caps)
    if "but" in tokens:
        b = tokens.index("but")
        vals = [v * 0.5 if i < b else v * 1.5 if i > b else v for i, v in enumerate(vals)]
    amp = min(excl, 4) * EXCL
    s = sum(vals)
    if s > 0:
        s += amp
    elif s < 0:
        s -= amp
    compound = max(-1.0, min(1.0, s / math.sqrt(s * s + ALPHA)))
    pos = sum(v + 1 for v in vals if v > 0)
    neg = sum(v - 1 for v in vals if v < 0)
    neu = float(sum(1 for v in vals if v == 0))
    if pos > abs(neg):
        pos += amp
    elif pos < abs(neg):
        neg -= amp
    total = pos + abs(neg) + neu
    return dict(pos=abs(pos / total), neg=abs(neg / total), neu=abs(neu / total), compound=compound)


CASES = [
    ("good", "", 0),
    ("bad", "", 0),
    ("great", "", 0),
    ("terrible", "", 0),
    ("not good", "", 0),
    ("not bad", "", 0),
    ("very good", "", 0),
    ("very bad", "", 0),
    ("really really good", "", 0),
    ("slightly good", "", 0),
    ("barely acceptable", "", 0),
    ("extremely very bad", "", 0),
    ("good but bad", "", 0),
    ("bad but good", "", 0),
    ("love phone but battery terrible", "", 0),
    ("good", "", 1),
    ("good", "", 3),
    ("good", "", 4),
    ("good", "", 7),
    ("bad", "", 2),
    ("phone", "", 3),
    ("good phone", "10", 0),
    ("bad phone", "10", 0),
    ("very good phone", "100", 0),
    ("VERY good phone", "100", 0),
    ("never good", "", 0),
    ("never ever good", "", 0),
    ("don't like", "", 0),
    ("isn't great", "", 0),
    ("not very good", "", 0),
    ("without doubt good", "", 0),
    ("not not good", "", 0),
    ("happy happy joy", "", 0),
    ("sad angry upset", "", 0),
    ("love :smiling_face_with_heart_eyes:", "", 0),
    (":broken_heart: :loudly_crying_face:", "", 0),
    (":) :(", "", 0),
    ("<3 product", "", 1),
    ("lol", "", 0),
    ("goat lit fire", "", 0),
    ("mid sus trash", "", 0),
    ("sick", "", 0),
    ("stock tanked outage", "", 2),
    ("great service", "", 0),
    ("worst customer service ever", "", 0),
    ("amazing incredible product", "", 0),
    ("incredibly bad", "", 0),
    ("kinda disappointing", "", 0),
    ("shipping delayed again not happy", "000001", 1),
    ("earnings call today", "", 0),
]


def main():
    data, out = sys.argv[1], sys.argv[2]
    lex = load(data)
    assert len(CASES) == 50
    with open(out, "w", encoding="utf-8") as f:
        for text, caps, excl in CASES:
            tokens = text.split()
            flags = [c == "1" for c in caps]
            flags += [False] * (len(tokens) - len(flags))
            rec = dict(tokens=tokens, caps=flags, exclamations=excl)
            rec.update(score(lex, tokens, flags, excl))
            f.write(json.dumps(rec) + "\n")


if __name__ == "__main__":
    main()
