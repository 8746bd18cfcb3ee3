"""From CP^2 to CP^2 # 14 CP^2-bar by moves, then the C_7 blowdown."""
from kirbylab import handles as hd
from kirbylab import rbd
from kirbylab.handles import AmbientBasis, HomologyClass as H, Presentation

X = Presentation(zero_handles=1, three_handles=2, four_handles=1, closed=True, ambient=AmbientBasis(("h",), (1,)))
for label, cls in (("h", "h"), ("t", "2h"), ("w", "5h")):
    X = hd.add_handle(X, label, H.parse(cls))

X = hd.blow_up(X, -1, "e1", {"w": 3})
X = hd.blow_up(X, -1, "e2", {"w": 2})
X = hd.slide(X, "w", "t", +1)
print("w =", X.ambient.format(X.handle("w").cls), "framing", X.handle("w").framing)

for i in range(3, 14):
    X = hd.blow_up(X, -1, f"e{i}", {"w": 2})
for i in range(9, 13):
    X = hd.slide(X, f"e{i}", f"e{i + 1}", -1)
X = hd.blow_up(X, -1, "e14", {"w": 1, "e13": 1})
print("chi", X.chi, "ledger", hd.computed_ledger(X))

# look for the chain among the handle classes
found = rbd.enumerate_embeddings(X, 7, 1)
print(len(found), "embeddings of C_7; multipliers", [E.multipliers for E in found])
E = next(E for E in found if E.multipliers == (1,) * 6)
for i, (lbl, c) in enumerate(zip(E.handle_labels, E.classes), 1):
    print(f"  u{i} = {lbl}: {X.ambient.format(c)}")
print(rbd.verify_embedding(X, E).verified)

R = rbd.rational_blowdown(X, E, "b")
print("after blowdown:", R.counts(), "ledger", R.ledger, "ball framing", R.handle("b").framing)
print("H1 =", hd.h1(R))
