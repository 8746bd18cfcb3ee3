"""Replay the bundled cork and stabilization scripts and read their reports."""
from kirbylab.cork import verify_contractible, w2
from kirbylab.script import parse, replay_full
from kirbylab.cli import bundled_dir

rep = verify_contractible(w2())
for e in rep.entries:
    print(f"{e.outcome:<13} {e.check}: {e.detail}")

for name in ("cork_twist.kcs", "stabilize.kcs"):
    text = (bundled_dir() / name).read_text()
    res = replay_full(parse(text), name)
    print()
    print(name, "verified" if res.verified else "FAILED")
    print("  assumptions:", len(res.assumptions), " imported:", len(res.imported))
    print(" ", res.ledger_line())

# the same thing from the shell:  kirbylab run stabilize.kcs --verbose
