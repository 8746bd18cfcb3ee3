"""Statement-to-claim anchors for the bundled scripts, used by ``explain``."""
from __future__ import annotations

import re

from .script.syntax import Statement, format_statement

# (script, pattern on the canonical statement text, anchor); first match wins
_TABLE: list[tuple[str, str, str]] = [
    ("*", r"^assume ", "figure-borne fact, recorded and not checked"),
    ("*", r"^(ambient|state|handle|link) ", "declaration of the starting diagram"),
    ("cp2_8.kcs", r"^blowup ", "the standard CP^2 # 8 CP^2-bar: eight disjoint blowups"),
    ("*", r"^blowup e[12] .*on=", "construction of CP^2 # 14 CP^2-bar: the first two blowups on the 5h circle"),
    ("*", r"^slide w over t ", "construction of CP^2 # 14 CP^2-bar: the slide of 5h-3e1-2e2 over 2h"),
    ("*", r"^blowup e([3-9]|1[0-3]) .*on=", "construction of CP^2 # 14 CP^2-bar: the eleven further blowups"),
    ("*", r"^slide e(9|1[0-2]) over ", "construction of CP^2 # 14 CP^2-bar: the slide chain e_i over e_{i+1}"),
    ("*", r"^blowup e14 .*on=", "construction of CP^2 # 14 CP^2-bar: the final blowup"),
    ("*", r"^assert (class|framing) (w|e9|e1[0-3]) ", "framings are the squares of the classes of C_7"),
    ("*", r"^assert gram-submatrix ", "the classes u_i = e_{8+i} - e_{9+i} and u_6 = w span C_7"),
    ("*", r"^assert embeddings ", "embedding search over the handle classes"),
    ("*", r"^rbd ", "definition of R_8 as the rational blowdown of C_7"),
    ("*", r"^slide e2 over e1 |^cancel ", "R_8 has no 1-handles after one slide and a cancellation: simply connected"),
    ("*", r"^assert model 1 8", "homeomorphism type of R_8: odd, indefinite, b2 = 9, sigma = -7"),
    ("*", r"^cork |^assert contractible ", "the cork W_2: a contractible dotted circle / 0-framed unknot pair"),
    ("*", r"^pair k ", "the embedded copy of W_2"),
    ("*", r"^twist ", "cork twist: exchange of dot and zero on W_2"),
    ("*", r"^certify ", "W_2 is a cork of CP^2 # 8 CP^2-bar: homeomorphic, smoothly distinct"),
    ("*", r"^exchange ", "dot to zero is surgery on a circle: one S^2 x S^2 stabilization"),
    ("*", r"^assert (stable-equivalent|same-ledger) ", "comparison of ledgers up to one H summand"),
    ("*", r"^assert ", "machine-checked invariant"),
    ("*", r"^(begin|use|save) ", "session bookkeeping"),
    ("*", r"^blowup ", "the standard CP^2 # 8 CP^2-bar"),
]


def anchor(script_name: str, st: Statement) -> str:
    text = format_statement(st)
    for name, pat, note in _TABLE:
        if name in ("*", script_name) and re.search(pat, text):
            return note
    return "bookkeeping"
