#!/usr/bin/env python3
"""Generate the synthetic labeled corpora and the demo post corpus.

Usage: gen_fixtures.py <out_dir_for_labeled> <demo_dir>

Output is fully determined by the fixed seeds below.
"""
import json
import random
import sys
from datetime import datetime, timedelta, timezone
from pathlib import Path

POS_ADJ = ["great", "amazing", "excellent", "awesome", "fantastic", "solid", "reliable", "smooth",
           "impressive", "wonderful", "brilliant", "fast", "helpful", "friendly", "perfect", "lovely",
           "good", "nice", "happy", "pleased"]
NEG_ADJ = ["terrible", "awful", "horrible", "broken", "slow", "useless", "disappointing", "buggy",
           "rude", "unreliable", "frustrating", "overpriced", "poor", "bad", "annoying", "worst"]
NEU_ADJ = ["new", "scheduled", "available", "updated", "listed", "regional", "quarterly", "standard"]
NOUNS = ["service", "delivery", "support", "app", "update", "battery", "price", "store", "checkout",
         "shipping", "keyboard", "screen", "chip", "cloud", "plan", "order", "refund", "driver"]
POS_VERB = ["love", "enjoy", "recommend", "appreciate", "like"]
NEG_VERB = ["hate", "regret", "dislike", "can't stand"]
POS_EMOJI = ["😍", "😀", "👍", "🎉", "❤️", ":)", ":D"]
NEG_EMOJI = ["😡", "😞", "👎", "😢", ":(", "😠"]
POS_TAGS = ["#GreatService", "#LoveIt", "#Winning", "#HappyCustomer"]
NEG_TAGS = ["#Fail", "#NeverAgain", "#Disappointed", "#WorstService"]
NEU_TAGS = ["#News", "#Earnings", "#Update", "#TechNews"]
POS_SLANG = ["lit", "goat", "fire", "bussin"]
NEG_SLANG = ["trash", "mid", "sus"]

NEU_TEMPLATES = [
    "{e} announced a {neu} {noun} today",
    "{e} {noun} update is rolling out this week",
    "Reading about the {e} {noun} report {tag}",
    "{e} will hold its earnings call on Thursday",
    "The {e} {noun} is {neu} in three more countries",
    "{e} shares moved after the {neu} filing",
    "Anyone know when the {e} {noun} ships?",
    "{e} opened a {neu} office downtown",
    "Meeting about the {e} {noun} at noon",
    "{e} posted its {neu} results {tag}",
]


def pos_text(r, e):
    t = r.choice([
        "{e} {noun} is {adj}",
        "I {verb} the {e} {noun}, really {adj}",
        "The {noun} from {e} was {adj} {emo}",
        "{e} just fixed my {noun}, so {adj}! {tag}",
        "Honestly the {e} {noun} is {slang}",
        "{e} {noun} is VERY {adj} {emo}",
        "lol the {e} {noun} is {adj} tbh",
        "The {noun} was slow at first but {e} support was {adj}",
        "{adj} {noun} from {e} {emo} {tag}",
        "Really {adj} experience with {e} today",
        "{e} {noun} is not bad at all {emo}",
        "So good, the {e} {noun} is {adj}",
    ])
    return t.format(e=e, noun=r.choice(NOUNS), adj=r.choice(POS_ADJ), verb=r.choice(POS_VERB),
                    emo=r.choice(POS_EMOJI), tag=r.choice(POS_TAGS), slang=r.choice(POS_SLANG))


def neg_text(r, e):
    t = r.choice([
        "{e} {noun} is {adj}",
        "I {verb} the {e} {noun}, totally {adj}",
        "The {noun} from {e} was {adj} {emo}",
        "{e} broke my {noun} again, so {adj}! {tag}",
        "Honestly the {e} {noun} is {slang}",
        "{e} {noun} is NOT good {emo}",
        "smh the {e} {noun} is {adj}",
        "The {noun} looked nice but {e} support was {adj}",
        "{adj} {noun} from {e} {emo} {tag}",
        "Never buying from {e} again, {adj} {noun}",
        "So bad, the {e} {noun} is {adj}",
    ])
    return t.format(e=e, noun=r.choice(NOUNS), adj=r.choice(NEG_ADJ), verb=r.choice(NEG_VERB),
                    emo=r.choice(NEG_EMOJI), tag=r.choice(NEG_TAGS), slang=r.choice(NEG_SLANG))


def neu_text(r, e):
    return r.choice(NEU_TEMPLATES).format(e=e, noun=r.choice(NOUNS), neu=r.choice(NEU_ADJ),
                                          tag=r.choice(NEU_TAGS))


GEN = {"positive": pos_text, "negative": neg_text, "neutral": neu_text}
ENTITIES = ["Amazon", "Apple", "Microsoft", "NVIDIA", "Tesla", "Netflix", "Google", "Intel"]


def labeled(seed, n, entities):
    r = random.Random(seed)
    seen, out = set(), []
    while len(out) < n:
        gold = r.choice(list(GEN))
        text = GEN[gold](r, r.choice(entities))
        if text in seen:
            continue
        seen.add(text)
        out.append({"text": text, "gold": gold})
    return out


def write_jsonl(path, rows):
    with open(path, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, ensure_ascii=False) + "\n")


def iso(dt):
    return dt.strftime("%Y-%m-%dT%H:%M:%SZ")


def demo(seed, demo_dir):
    # Per-entity sentiment mix so the demo shows different tiers.
    mixes = {
        "amazon": ("Amazon", [0.70, 0.15, 0.15]),
        "apple": ("Apple", [0.30, 0.35, 0.35]),
        "microsoft": ("Microsoft", [0.15, 0.25, 0.60]),
        "nvidia": ("NVIDIA", [0.50, 0.30, 0.20]),
    }
    r = random.Random(seed)
    start = datetime(2024, 1, 1, tzinfo=timezone.utc)
    for key, (name, weights) in mixes.items():
        rows = []
        for i in range(50):
            gold = r.choices(["positive", "neutral", "negative"], weights)[0]
            created = start + timedelta(minutes=r.randrange(0, 181 * 24 * 60))
            author_age = timedelta(days=r.randrange(30, 3000))
            rows.append({
                "id": f"{key}-{i:03d}",
                "created_at": iso(created),
                "text": GEN[gold](r, name),
                "author_id": f"u{r.randrange(10_000):05d}",
                "author_created_at": iso(created - author_age),
                "author_post_count": r.randrange(10, 5000),
                "like_count": r.randrange(0, 120),
                "reply_count": r.randrange(0, 30),
                "is_retweet": r.random() < 0.05,
                "lang": "en",
            })
        rows.sort(key=lambda row: row["created_at"])
        write_jsonl(Path(demo_dir) / f"{key}.jsonl", rows)


def main():
    labeled_dir, demo_dir = sys.argv[1], sys.argv[2]
    write_jsonl(Path(labeled_dir) / "train.jsonl", labeled(11, 1500, ENTITIES))
    train_texts = {row["text"] for row in labeled(11, 1500, ENTITIES)}
    held_out = [row for row in labeled(29, 600, ENTITIES) if row["text"] not in train_texts][:300]
    write_jsonl(Path(labeled_dir) / "eval.jsonl", held_out)
    demo(7, demo_dir)


if __name__ == "__main__":
    main()
