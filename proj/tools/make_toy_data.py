#!/usr/bin/env python3
"""Generate the bundled synthetic dataset under data/toy/.

Six taste groups of eight or nine genres, two of them close siblings, a few peripheral genres with thin
coverage, ~150 regular users who mostly review inside one group, and two
omnivores who review everything. Review text comes from templates whose
dependency parses are written out directly as CoNLL-U, so the text stage
can be exercised without a parser.

The output is checked in; rerun only when the toy data should change:

    python3 tools/make_toy_data.py data/toy
"""

import csv
import json
import random
import sys
from pathlib import Path

GROUPS = {
    "north": ["Black metal", "Pagan black metal", "Viking metal", "Folk metal",
              "Atmospheric black metal", "Depressive black metal",
              "Symphonic black metal", "Melodic black metal"],
    "slow": ["Doom metal", "Funeral doom metal", "Sludge metal", "Stoner metal",
             "Drone metal", "Gothic metal", "Death-doom metal", "Post-metal"],
    "fast": ["Thrash metal", "Speed metal", "Heavy metal", "Power metal",
             "NWOBHM", "Crossover thrash", "US power metal", "Hard rock"],
    "extreme": ["Death metal", "Brutal death metal", "Technical death metal",
                "Melodic death metal", "Deathcore", "Progressive death metal",
                "Blackened death metal", "Old school death metal", "Slam"],
    "grind": ["Grindcore", "Goregrind", "Powerviolence", "Crust punk",
              "Deathgrind", "Noisegrind", "Mincecore", "Cybergrind", "Hardcore punk"],
    "prog": ["Progressive metal", "Progressive rock", "Djent",
             "Avant-garde metal", "Math rock", "Mathcore", "Jazz fusion",
             "Symphonic metal"],
}
PERIPHERAL = ["Dungeon synth", "Noise rock", "Neoclassical", "Industrial rock"]

COUNTRIES = {
    "north": ["Norway", "Norway", "Sweden", "Finland"],
    "slow": ["United Kingdom", "United States", "United States", "Italy"],
    "fast": ["United States", "Germany", "Germany", "United Kingdom"],
    "extreme": ["United States", "Sweden", "Poland", "Canada"],
    "grind": ["United States", "Japan", "Czech Republic", "United Kingdom"],
    "prog": ["United States", "United Kingdom", "Netherlands", "France"],
}

# (adjective, noun singular, noun plural)
VOCAB = {
    "north": [("raw", "production", "productions"), ("cold", "atmosphere", "atmospheres"),
              ("norwegian", "band", "bands"), ("epic", "chorus", "choruses"),
              ("grim", "vocal", "vocals")],
    "slow": [("heavy", "riff", "riffs"), ("slow", "tempo", "tempos"),
             ("crushing", "weight", "weights"), ("melancholic", "melody", "melodies"),
             ("fuzzy", "guitar", "guitars")],
    "fast": [("catchy", "chorus", "choruses"), ("fast", "solo", "solos"),
             ("high", "scream", "screams"), ("classic", "riff", "riffs"),
             ("energetic", "song", "songs")],
    "extreme": [("brutal", "vocal", "vocals"), ("technical", "drumming", "drummings"),
                ("guttural", "growl", "growls"), ("relentless", "blast", "blasts"),
                ("dense", "riff", "riffs")],
    "grind": [("short", "song", "songs"), ("noisy", "production", "productions"),
              ("political", "lyric", "lyrics"), ("chaotic", "blast", "blasts"),
              ("filthy", "bass", "basses")],
    "prog": [("complex", "structure", "structures"), ("odd", "time", "times"),
             ("jazzy", "passage", "passages"), ("progressive", "song", "songs"),
             ("technical", "solo", "solos")],
}
GENERIC = ["great", "awesome", "amazing"]
# Groups whose fans cross over often enough to cluster together at first.
SIBLING = {"extreme": "grind", "grind": "extreme"}


def token(i, form, lemma, upos, xpos, head, deprel):
    return f"{i}\t{form}\t{lemma}\t{upos}\t{xpos}\t_\t{head}\t{deprel}\t_\t_"


def sentence_sounds(adj):
    # This album sounds <adj> .
    text = f"This album sounds {adj}."
    rows = [token(1, "This", "this", "DET", "DT", 2, "det"),
            token(2, "album", "album", "NOUN", "NN", 3, "nsubj"),
            token(3, "sounds", "sound", "VERB", "VBZ", 0, "root"),
            token(4, adj, adj, "ADJ", "JJ", 3, "acomp"),
            token(5, ".", ".", "PUNCT", ".", 3, "punct")]
    return text, rows


def sentence_has(adj, noun):
    # It has a <adj> <noun> .
    text = f"It has a {adj} {noun}."
    rows = [token(1, "It", "it", "PRON", "PRP", 2, "nsubj"),
            token(2, "has", "have", "VERB", "VBZ", 0, "root"),
            token(3, "a", "a", "DET", "DT", 5, "det"),
            token(4, adj, adj, "ADJ", "JJ", 5, "amod"),
            token(5, noun, noun, "NOUN", "NN", 2, "dobj"),
            token(6, ".", ".", "PUNCT", ".", 2, "punct")]
    return text, rows


def sentence_plural(adj, noun, plural):
    # The <adj> <plural> are great .
    text = f"The {adj} {plural} are great."
    rows = [token(1, "The", "the", "DET", "DT", 3, "det"),
            token(2, adj, adj, "ADJ", "JJ", 3, "amod"),
            token(3, plural, noun, "NOUN", "NNS", 4, "nsubj"),
            token(4, "are", "be", "AUX", "VBP", 0, "root"),
            token(5, "great", "great", "ADJ", "JJ", 4, "acomp"),
            token(6, ".", ".", "PUNCT", ".", 4, "punct")]
    return text, rows


def main(out_dir: Path) -> None:
    rng = random.Random(7)
    out_dir.mkdir(parents=True, exist_ok=True)

    # Albums: six per genre, some tagged with a second genre from the same group.
    albums = []
    by_genre = {}
    group_of = {}
    for group, genres in GROUPS.items():
        for g in genres:
            group_of[g] = group
    for g in PERIPHERAL:
        group_of[g] = rng.choice(sorted(GROUPS))
    band = 0
    for g, group in group_of.items():
        n = 2 if g in PERIPHERAL else 6
        for k in range(n):
            band += 1
            tags = [g]
            if g not in PERIPHERAL and rng.random() < 0.35:
                other = rng.choice([x for x in GROUPS[group] if x != g])
                tags.append(other)
            aid = f"A{len(albums) + 1:04d}"
            albums.append({
                "album_id": aid,
                "band_id": f"B{band:04d}",
                "title": f"{g} record {k + 1}",
                "year": str(1985 + rng.randrange(35)),
                "country": rng.choice(COUNTRIES[group]) if rng.random() < 0.95 else "",
                "genres": ";".join(tags),
            })
            for t in tags:
                by_genre.setdefault(t, []).append(aid)
    album_by_id = {a["album_id"]: a for a in albums}

    reviews = []
    users = [f"u{i:03d}" for i in range(180)]
    groups = sorted(GROUPS)
    for i, u in enumerate(users):
        home = groups[i % len(groups)]
        seen = set()
        for _ in range(rng.randrange(6, 13)):
            roll = rng.random()
            if home in SIBLING and roll < 0.35:
                genre = rng.choice(GROUPS[SIBLING[home]])
            elif roll < 0.85:
                genre = rng.choice(GROUPS[home])
            else:
                genre = rng.choice(sorted(group_of))
            aid = rng.choice(by_genre[genre])
            if aid in seen:
                continue
            seen.add(aid)
            score = rng.randrange(78, 101) if rng.random() < 0.8 else rng.randrange(30, 75)
            reviews.append((u, aid, score))
    # Peripheral genres: a handful of reviews from a couple of users only.
    for g in PERIPHERAL:
        for u in rng.sample(users, 2):
            reviews.append((u, by_genre[g][0], 85))
    # Two omnivores reviewing one album of every genre.
    for u in ("omni1", "omni2"):
        for g in sorted(by_genre):
            reviews.append((u, by_genre[g][0], 90))

    conllu = ["# parser_model = toy-templates", "# parser_version = 1", ""]
    with open(out_dir / "reviews.jsonl", "w", encoding="utf-8") as f:
        for day, (u, aid, score) in enumerate(reviews):
            genres = album_by_id[aid]["genres"].split(";")
            group = group_of[genres[0]]
            sentences = []
            for _ in range(rng.randrange(1, 4)):
                adj, noun, plural = rng.choice(VOCAB[group])
                kind = rng.random()
                if kind < 0.25:
                    sentences.append(sentence_sounds(rng.choice(GENERIC + [adj])))
                elif kind < 0.7:
                    generic = rng.random() < 0.3
                    sentences.append(sentence_has(rng.choice(GENERIC) if generic else adj, noun))
                else:
                    sentences.append(sentence_plural(adj, noun, plural))
            text = " ".join(s[0] for s in sentences)
            date = f"20{10 + day % 10:02d}-{1 + day % 12:02d}-{1 + day % 28:02d}"
            f.write(json.dumps({"user_id": u, "album_id": aid, "score": score,
                                "text": text, "date": date}) + "\n")
            conllu.append(f"# review_id = {u}|{aid}")
            for k, (stext, rows) in enumerate(sentences):
                conllu.append(f"# sent_id = {u}|{aid}|{k + 1}")
                conllu.append(f"# text = {stext}")
                conllu.extend(rows)
                conllu.append("")

    with open(out_dir / "albums.csv", "w", encoding="utf-8", newline="") as f:
        w = csv.DictWriter(f, fieldnames=["album_id", "band_id", "title", "year", "country", "genres"],
                           lineterminator="\n")
        w.writeheader()
        w.writerows(albums)

    (out_dir / "reviews.conllu").write_text("\n".join(conllu) + "\n", encoding="utf-8")
    (out_dir / "toy.conf").write_text(
        "# Bundled synthetic dataset\n"
        "version = 1\n"
        "reviews = reviews.jsonl\n"
        "reviews_format = jsonl\n"
        "albums = albums.csv\n"
        "conllu = reviews.conllu\n"
        "score_threshold = 75\n"
        "outlier_user_count = 2\n"
        "runs = 100\n"
        "seed = 42\n"
        "max_rounds = 50\n"
        "split_max_size = 16\n"
        "split_max_depth = 3\n"
        "top_n_features = 50\n"
        "text_stage = true\n",
        encoding="utf-8")


if __name__ == "__main__":
    main(Path(sys.argv[1] if len(sys.argv) > 1 else "data/toy"))
