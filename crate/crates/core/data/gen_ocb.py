"""Regenerates ocb.correlation: the Oreshkov-Costa-Brukner process matrix, a
causally ordered (A before B, identity channel) process matrix, and the
standard instrument strategies of the causal game.

Prints the game success probability computed directly with numpy.
"""
import itertools
import numpy as np

I = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)


def kron(*ms):
    out = np.eye(1)
    for m in ms:
        out = np.kron(out, m)
    return out


w_ocb = 0.25 * (kron(I, I, I, I) + (kron(I, Z, Z, I) + kron(Z, I, X, Z)) / np.sqrt(2))
phi = np.zeros((4, 4))
for k in range(2):
    for l in range(2):
        phi[k * 2 + k, l * 2 + l] = 1.0
w_causal = 0.5 * kron(I, phi, I)

ket = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
xket = [np.array([1.0, 1.0]) / np.sqrt(2), np.array([1.0, -1.0]) / np.sqrt(2)]
proj = lambda v: np.outer(v, v.conj())

alice = {}
for a in range(2):
    alice[f"a{a}"] = [(str(x), kron(proj(ket[x]), proj(ket[a]))) for x in range(2)]
bob = {}
for b, bp in itertools.product(range(2), repeat=2):
    if bp == 0:
        outs = [(str(y), kron(proj(ket[y]), proj(ket[0]))) for y in range(2)]
    else:
        outs = [(str(c), kron(proj(xket[c]), proj(ket[b ^ c]))) for c in range(2)]
    bob[f"b{b}{bp}"] = outs


def success(w):
    total = 0.0
    for a, b, bp in itertools.product(range(2), repeat=3):
        weights = {}
        for (x, ma), (y, mb) in itertools.product(alice[f"a{a}"], bob[f"b{b}{bp}"]):
            weights[(int(x), int(y))] = np.trace(w @ np.kron(ma, mb)).real
        norm = sum(weights.values())
        good = sum(v for (x, y), v in weights.items() if (y == a if bp == 0 else x == b))
        total += good / norm / 8
    return total


def fmt(m):
    rows = []
    for r in m:
        rows.append("[" + ", ".join(f"[{float(v.real) + 0.0!r}, {float(v.imag) + 0.0!r}]" for v in r) + "]")
    return "[\n  " + ",\n  ".join(rows) + ",\n]"


lines = [
    "# Process-matrix example for the causal game. Generated by gen_ocb.py.",
    "",
    "[options]",
    "tolerance = 1e-9",
    "seed = 0",
    "strict_oc_normalization = false",
    "",
]
for name in ["A1", "A2", "B1", "B2"]:
    lines += ["[[systems]]", f'name = "{name}"', 'family = "quantum-complex"', "n = 2", ""]
for opname, actions in [("alice", alice), ("bob", bob)]:
    lines += ["[[operations]]", f'name = "{opname}"', ""]
    sysnames = '["A1", "A2"]' if opname == "alice" else '["B1", "B2"]'
    for label, outs in actions.items():
        lines += ["[[operations.actions]]", f'label = "{label}"', f"systems = {sysnames}", ""]
        for olabel, m in outs:
            lines += ["[[operations.actions.outcomes]]", f'label = "{olabel}"', f"matrix = {fmt(m)}", ""]
for name, w in [("ocb", w_ocb), ("causal", w_causal)]:
    lines += ["[[correlations]]", f'name = "{name}"', 'spaces = [["A1", "A2"], ["B1", "B2"]]', f"matrix = {fmt(w)}", ""]
lines += ["[[hyperedges]]", 'correlation = "ocb"', 'operations = ["alice", "bob"]', ""]
open("ocb.correlation", "w").write("\n".join(lines))

print("ocb success", repr(success(w_ocb)), "expected", (2 + np.sqrt(2)) / 4)
print("causal success", repr(success(w_causal)))
print("ocb min eig", np.linalg.eigvalsh(w_ocb).min(), "causal min eig", np.linalg.eigvalsh(w_causal).min())
