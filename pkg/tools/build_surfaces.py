"""Regenerate src/k3aut/data/surfaces.json from the transcribed equation texts."""

import hashlib
import json
import pathlib

import sympy

SOURCES = {
    "U3": {
        "p": 3,
        "vars": ["x", "y", "z", "w"],
        "texts": [
            "-2x^3z - 3x^2yz - 3y^3z + x^2z^2 - 3xyz^2 + 2y^2z^2 + xz^3 + yz^3 - 13x^3w"
            " + 24x^2yw - 13xy^2w + 8y^3w - x^2zw + 51xz^2w - 37x^2w^2 + 47xyw^2 - 16y^2w^2"
            " + 111xzw^2 - 38yzw^2 - 57z^2w^2 - 227xw^3 + 24yw^3 - 94zw^3 + 303w^4"
        ],
        "note": "integral quartic with a line and four conjugate lines, reduced mod 3",
    },
    "Y3": {
        "p": 3,
        "vars": ["x_0", "x_1", "x_2", "x_3", "x_4"],
        "texts": [
            "2x_0x_1 + x_1x_2 + x_2^2 + 2x_0x_3 + x_1x_3 + x_3^2 + 2x_0x_4 + x_3x_4 + 2x_4^2",
            "2x_0x_1^2 + 2x_0^2x_2 + 2x_0x_1x_2 + 2x_1^2x_2 + 2x_0x_2^2 + 2x_1x_2^2 + 2x_2^3"
            " + 2x_0x_1x_3 + x_1^2x_3 + 2x_0x_2x_3 + 2x_1x_2x_3 + 2x_0x_3^2 + 2x_2x_3^2 + 2x_3^3"
            " + x_0^2x_4 + 2x_1^2x_4 + 2x_0x_2x_4 + x_2^2x_4 + 2x_0x_3x_4 + 2x_2x_3x_4 + x_3^2x_4"
            " + 2x_0x_4^2 + x_1x_4^2 + x_2x_4^2 + x_4^3",
        ],
        "note": "quadric-cubic complete intersection in P^4 over F_3 containing two conjugate conics",
    },
    "Y5": {
        "p": 5,
        "vars": ["x_0", "x_1", "x_2", "x_3", "x_4"],
        "texts": [
            "2x_0^2 + x_0x_1 + 3x_1^2 + 2x_0x_2 + 2x_2^2 + 2x_1x_3 + 2x_2x_3 + 3x_3^2 + 3x_0x_4 + 2x_2x_4",
            "x_0^2x_1 + 3x_0x_1^2 + 2x_1^3 + 4x_0x_1x_2 + x_1^2x_2 + 2x_1x_2^2 + 3x_2^3 + 2x_0^2x_3"
            " + 4x_1^2x_3 + 2x_0x_3^2 + 2x_1x_3^2 + 2x_2x_3^2 + 2x_3^3 + x_0x_1x_4 + 4x_1^2x_4"
            " + x_0x_2x_4 + 2x_2^2x_4 + 3x_1x_3x_4 + 2x_2x_3x_4 + 3x_3^2x_4 + 3x_0x_4^2 + 2x_1x_4^2"
            " + 3x_2x_4^2 + x_3x_4^2",
        ],
        "note": "quadric-cubic complete intersection in P^4 over F_5 containing two conjugate conics",
    },
    "DQ3_5": {
        "p": 5,
        "vars": ["x", "y", "z", "w"],
        "texts": ["x^4 - y^4 - 3z^4 + 3w^4"],
        "note": "diagonal quartic x^4 - y^4 = 3(z^4 - w^4) over F_5",
    },
    "DQ1_5": {
        "p": 5,
        "vars": ["x", "y", "z", "w"],
        "texts": ["x^4 - y^4 - z^4 + w^4"],
        "note": "diagonal quartic x^4 - y^4 = z^4 - w^4 over F_5",
    },
}


def to_sympy(text, names):
    """Parse juxtaposition-style monomials such as 2x_0x_1^2 or -13x^3w."""
    syms = {n: sympy.Symbol(n.replace("_", "")) for n in names}
    s = text
    for n in sorted(names, key=len, reverse=True):
        s = s.replace(n, f"*{n.replace('_', '')}")
    s = s.replace("^", "**").replace("+ *", "+ ").replace("- *", "- ")
    if s.startswith("*"):
        s = s[1:]
    if s.startswith("-*"):
        s = "-" + s[2:]
    return sympy.sympify(s, locals={str(v): v for v in syms.values()}), [syms[n] for n in names]


def terms(text, names, p):
    expr, syms = to_sympy(text, names)
    poly = sympy.Poly(sympy.expand(expr), *syms)
    out = []
    for exps, c in sorted(poly.terms()):
        c = int(c) % p
        if c:
            out.append([c, list(exps)])
    return out


def main():
    data = {}
    for name, src in SOURCES.items():
        digest = hashlib.sha256("\n".join(src["texts"]).encode()).hexdigest()
        data[name] = {
            "p": src["p"],
            "ambient_dim": len(src["vars"]) - 1,
            "vars": src["vars"],
            "texts": src["texts"],
            "sha256": digest,
            "note": src["note"],
            "polys": [terms(t, src["vars"], src["p"]) for t in src["texts"]],
        }
    out = pathlib.Path(__file__).resolve().parents[1] / "src" / "k3aut" / "data" / "surfaces.json"
    out.write_text(json.dumps(data, indent=1) + "\n")
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
