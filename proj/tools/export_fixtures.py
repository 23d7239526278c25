#!/usr/bin/env python3
"""Export census triangulations as test fixtures, with independently computed
reference values (requires SnapPy; not needed to build or run the project).

For each manifold writes tests/data/<name>.json in the triangulation schema
(with SnapPy's meridian/longitude rows as the "peripheral" field) and
adds an entry to tests/data/reference.json holding:
  - SnapPy's gluing matrix reordered to the quad-major column layout,
  - Z/2 cohomology dimensions obtained from the fundamental group by duality:
    H^2(M, dM) ~ H_1(M), Ker(H^2(M) -> H^2(dM)) ~ coker(H_1(dM) -> H_1(M)),
    H^2(M) ~ H_1(M, dM),
  - the complete hyperbolic shapes (one per tetrahedron).
"""
import json
import os
import sys

import snappy

NAMES = ["m003", "m004", "m009", "m045", "m129", "L13a76"]


def z2_rank(rows, ncols):
    rows = [r[:] for r in rows]
    rank = 0
    for col in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] % 2), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % 2:
                rows[i] = [(a + b) % 2 for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def abelianize(word, gens):
    v = [0] * len(gens)
    for ch in word:
        if ch.lower() in gens:
            i = gens.index(ch.lower())
            v[i] += 1 if ch.islower() else -1
    return v


def homology_ranks(M):
    G = M.fundamental_group()
    gens = G.generators()
    rels = [abelianize(r, gens) for r in G.relators()]
    h1 = len(gens) - z2_rank(rels, len(gens))
    periph = []
    for mer, lon in G.peripheral_curves():
        periph += [abelianize(mer, gens), abelianize(lon, gens)]
    image = z2_rank(rels + periph, len(gens)) - z2_rank(rels, len(gens))
    return h1, h1 - image


def reorder(row, n):
    # SnapPy interleaves (z, z', z'') per tetrahedron; we use quad-major order.
    return [int(row[3 * t + s]) for s in range(3) for t in range(n)]


def export(name, outdir):
    M = snappy.Manifold(name)
    n = M.num_tetrahedra()
    gluings = []
    for neighbors, perms in M._get_tetrahedra_gluing_data():
        row = []
        for f in range(4):
            perm = list(perms[f])
            inversions = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
            if inversions % 2 == 0:
                sys.exit(f"{name}: gluing permutation {perm} is not orientation reversing")
            row.append([neighbors[f], perm[f], perm])
        gluings.append(row)
    eqs = M.gluing_equations()
    k = M.num_cusps()
    peripheral = [reorder(list(eqs[n + i]), n) for i in range(2 * k)]
    with open(os.path.join(outdir, f"{name}.json"), "w") as fh:
        json.dump({"name": name, "tetrahedra": n, "gluings": gluings, "peripheral": peripheral}, fh)
        fh.write("\n")

    h1, h1_hat = homology_ranks(M)
    shapes = [[float(z.real()), float(z.imag())] for z in M.tetrahedra_shapes("rect")]
    return {
        "tetrahedra": n,
        "cusps": k,
        "gluing_matrix": [reorder(list(eqs[i]), n) for i in range(n)],
        "peripheral_matrix": peripheral,
        "h2_rel": h1,
        "ker_iota": h1_hat,
        "h2_abs": h1_hat + k - 1,
        "geometric_shapes": shapes,
    }


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "tests/data"
    os.makedirs(outdir, exist_ok=True)
    reference = {name: export(name, outdir) for name in NAMES}
    with open(os.path.join(outdir, "reference.json"), "w") as fh:
        json.dump(reference, fh, indent=1)
        fh.write("\n")


if __name__ == "__main__":
    main()
