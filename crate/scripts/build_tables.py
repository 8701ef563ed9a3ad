#!/usr/bin/env python3
"""Regenerate the bundled lexicon, emoji and word-frequency tables.

Usage: build_tables.py <unpacked-wheels-dir> <out-dir>

The wheels directory must contain the unpacked `vaderSentiment`, `emoji`
and `symspellpy` distributions (all MIT/BSD licensed).
"""
import os
import re
import sys

WORDFREQ_LIMIT = 50_000


def emoji_name(raw):
    name = raw.strip(":").lower()
    name = re.sub(r"[^a-z0-9]+", "_", name).strip("_")
    return ":" + name + ":"


def main():
    src, out = sys.argv[1], sys.argv[2]

    with open(os.path.join(src, "vaderSentiment", "vader_lexicon.txt"), encoding="utf-8") as f, \
            open(os.path.join(out, "lexicon.tsv"), "w", encoding="utf-8") as o:
        o.write("# token<TAB>valence; derived from the VADER lexicon (MIT, C.J. Hutto)\n")
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) < 2 or not parts[0]:
                continue
            tok = parts[0].lower()
            if tok.startswith("#"):
                continue
            o.write(f"{tok}\t{float(parts[1])}\n")

    sys.path.insert(0, src)
    import emoji

    seen = set()
    rows = []
    for e, data in emoji.EMOJI_DATA.items():
        key = tuple(ord(c) for c in e if ord(c) != 0xFE0F)
        if not key or key in seen:
            continue
        seen.add(key)
        rows.append((key, emoji_name(data["en"])))
    rows.sort()
    with open(os.path.join(out, "emoji.tsv"), "w", encoding="utf-8") as o:
        o.write("# codepoints (hex, space separated; U+FE0F omitted)<TAB>:name:\n")
        for key, name in rows:
            o.write(" ".join(f"{c:X}" for c in key) + "\t" + name + "\n")

    words = []
    with open(os.path.join(src, "symspellpy", "frequency_dictionary_en_82_765.txt"), encoding="utf-8") as f:
        for line in f:
            w, c = line.split()
            if w.isalpha() and w.isascii():
                words.append((w, int(c)))
    words.sort(key=lambda wc: (-wc[1], wc[0]))
    with open(os.path.join(out, "wordfreq.tsv"), "w", encoding="utf-8") as o:
        o.write("# word<TAB>count; top entries of the symspell English frequency list (MIT)\n")
        for w, c in words[:WORDFREQ_LIMIT]:
            o.write(f"{w}\t{c}\n")


if __name__ == "__main__":
    main()
