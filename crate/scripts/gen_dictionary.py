"""Regenerate kb/lexicon/dictionary.tsv.

The dictionary is the most common English words plus every word used by the
clinical vocabulary and the shipped corpora. Frequencies are occurrences per
hundred million words, floored at 1.
"""

import argparse
import re
from pathlib import Path

from wordfreq import top_n_list, word_frequency

WORD = re.compile(r"^[a-z]+(?:['-][a-z]+)*$")
TOKEN = re.compile(r"[a-z0-9]+(?:['-][a-z0-9]+)*")


def words_in(text):
    return {w for w in TOKEN.findall(text.lower()) if any(c.isalpha() for c in w)}


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--kb", default="kb", type=Path)
    parser.add_argument("--top", default=5000, type=int)
    args = parser.parse_args()

    words = {w for w in top_n_list("en", args.top) if WORD.match(w)}
    lexicon = args.kb / "lexicon"
    for line in (lexicon / "vocabulary.tsv").read_text().splitlines():
        if line and not line.startswith("#"):
            words |= words_in(line.split("\t")[0])
    for path in sorted((args.kb / "corpus").rglob("*")):
        if path.is_file():
            for line in path.read_text().splitlines():
                if not line.startswith("#"):
                    # Only the sentence column of annotated corpora.
                    cols = line.split("\t")
                    words |= words_in(cols[1] if len(cols) == 3 else line)

    rows = sorted((w, max(1, round(word_frequency(w, "en") * 1e8))) for w in words)
    with open(lexicon / "dictionary.tsv", "w") as out:
        out.write("# word<TAB>frequency per hundred million words. Generated by scripts/gen_dictionary.py.\n")
        for w, f in rows:
            out.write(f"{w}\t{f}\n")
    print(f"{len(rows)} words")


if __name__ == "__main__":
    main()
