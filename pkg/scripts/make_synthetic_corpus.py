#!/usr/bin/env python3
"""Emit a seeded synthetic corpus as a canonical ground-truth file.

Handy for exercising the CLI end to end::

    python3 scripts/make_synthetic_corpus.py --seed 2025 --out gt.jsonl
    oadeval baseline --gt gt.jsonl --kind pm --fps 2.0 --out pm.jsonl
    oadeval evaluate --gt gt.jsonl --pred pm.jsonl --out-dir runs/pm
"""

import argparse

from oadeval.formats import write_canonical_gt
from oadeval.synthetic import synthetic_corpus


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=2025)
    parser.add_argument("--n-videos", type=int, default=20)
    parser.add_argument("--out", required=True)
    args = parser.parse_args()

    manifest = synthetic_corpus(seed=args.seed, n_videos=args.n_videos)
    write_canonical_gt(manifest, args.out)
    total = sum(len(t.intervals) for t in manifest.tracks)
    print(f"wrote {len(manifest.tracks)} videos ({total} intervals, "
          f"{len(manifest.vocabulary.classes)} classes) to {args.out}")


if __name__ == "__main__":
    main()
