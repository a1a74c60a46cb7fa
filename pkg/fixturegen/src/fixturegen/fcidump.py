"""FCIDUMP text export.

Format: namelist header (NORB, NELEC, MS2, ORBSYM, ISYM) followed by
`value i j k l` records with 1-based indices. Two-electron integrals come
first (canonical 8-fold-unique index quadruples), then one-electron
integrals, then the scalar core energy on the all-zero index line.
"""

WRITE_THRESHOLD = 1e-14


def write_fcidump(path, h1, eri, e_core, n_electrons, ms2=0):
    n = h1.shape[0]
    lines = [f" &FCI NORB={n:4d},NELEC={n_electrons:3d},MS2={ms2:2d},"]
    lines.append("  ORBSYM=" + "1," * n)
    lines.append("  ISYM=1,")
    lines.append(" &END")

    def rec(value, i, j, k, l):
        lines.append(f"{value: .17e} {i:4d} {j:4d} {k:4d} {l:4d}")

    for i in range(n):
        for j in range(i + 1):
            ij = i * (i + 1) // 2 + j
            for k in range(i + 1):
                for l in range(k + 1):
                    kl = k * (k + 1) // 2 + l
                    if ij < kl:
                        continue
                    v = eri[i, j, k, l]
                    if abs(v) > WRITE_THRESHOLD:
                        rec(v, i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(h1[i, j]) > WRITE_THRESHOLD:
                rec(h1[i, j], i + 1, j + 1, 0, 0)
    rec(e_core, 0, 0, 0, 0)

    with open(path, "w") as f:
        f.write("\n".join(lines) + "\n")
