"""Corpus generator CLI: ``corpusgen gen --spec file --out dir --seed N``."""

from __future__ import annotations

import argparse
import sys

from .generate import gen_from_spec_file
from .glyphs import GLYPHS
from .render import RenderSpec, render_page, save_page


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="corpusgen")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a corpus tree from a JSON spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("page", help="render one page from words on the command line")
    p.add_argument("--out", required=True)
    p.add_argument("--stem", default="page")
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--skew", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("words", nargs="+")

    p = sub.add_parser("letters", help="list supported letters")

    args = parser.parse_args(argv)
    if args.command == "gen":
        stems = gen_from_spec_file(args.spec, args.out, args.seed)
        print(f"wrote {len(stems)} pages to {args.out}")
        return 0
    if args.command == "page":
        spec = RenderSpec(lines=[args.words], size=args.size, skew=args.skew)
        gray, truth, meta = render_page(spec, seed=args.seed)
        save_page(gray, truth, meta, args.out, args.stem)
        print(f"wrote {args.out}/pages/{args.stem}.png")
        return 0
    print("\n".join(sorted(GLYPHS)))
    return 0


if __name__ == "__main__":
    sys.exit(main())
