#!/usr/bin/env python3
"""Generate the wavelet filter data files shipped under data/.

Produces, for each supported wavelet (db2..db6, sym2..sym6), a CWWF file
holding the interior two-scale filters, the scaling function's values on the
integer grid, and the boundary (interval) scaling/wavelet refinement matrices
for the vanishing-moments-preserving construction on [0,1].

Everything is computed in extended precision (mpmath, 60 digits) from exact
linear identities: no quadrature enters the boundary construction.  The
resulting matrices are checked against orthonormality and perfect
reconstruction invariants before being written out.

Run once from the repository root:  python3 tools/gen_wavelet_data.py
"""

import math
import struct
import sys
import zlib
from pathlib import Path

import mpmath as mp

mp.mp.dps = 60

OUT_DIR = Path(__file__).resolve().parent.parent / "data"
FORMAT_VERSION = 1
FAMILY_TAG = {"db": 0, "sym": 1}


# ---------------------------------------------------------------------------
# Filters
# ---------------------------------------------------------------------------

def daubechies_poly_roots(nu):
    """Roots (in y) of P(y) = sum_{k<nu} C(nu-1+k, k) y^k."""
    coeffs = [mp.binomial(nu - 1 + k, k) for k in range(nu)]
    # mp.polyroots wants highest degree first
    return mp.polyroots(list(reversed(coeffs)), maxsteps=200, extraprec=120)


def root_groups(nu):
    """Group the z-domain zeros of |m0|^2 coming from each y-root.

    Each real y-root contributes a real pair {z, 1/z}; each complex-conjugate
    y-pair contributes a quadruple {z, zbar, 1/z, 1/zbar}.  Returns a list of
    (inside_choice, outside_choice) tuples, each choice being a list of zeros.
    """
    yroots = daubechies_poly_roots(nu)
    used = [False] * len(yroots)
    groups = []
    for i, y in enumerate(yroots):
        if used[i]:
            continue
        used[i] = True
        b = 2 - 4 * y
        disc = mp.sqrt(b * b - 4)
        z1 = (b + disc) / 2
        z2 = (b - disc) / 2
        zin = z1 if abs(z1) < 1 else z2
        zout = z2 if abs(z1) < 1 else z1
        if abs(mp.im(y)) > mp.mpf("1e-40"):
            # find and consume the conjugate y-root
            for k in range(i + 1, len(yroots)):
                if not used[k] and abs(yroots[k] - mp.conj(y)) < mp.mpf("1e-30"):
                    used[k] = True
                    break
            groups.append(([zin, mp.conj(zin)], [zout, mp.conj(zout)]))
        else:
            groups.append(([zin], [zout]))
    return groups


def filter_from_zeros(nu, zeros):
    """Scaling filter h (length 2*nu, sum sqrt(2)) from the chosen Q-zeros."""
    # m0(z) = c ((1+z)/2)^nu prod (z - z_i), normalised m0(1) = 1
    poly = [mp.mpf(1)]
    for z in zeros:
        poly = [a - z * b for a, b in
                zip(poly + [mp.mpf(0)], [mp.mpf(0)] + poly)]
        # multiply by (x - z): new[k] = old[k-1] - z old[k]
    # redo cleanly
    poly = [mp.mpc(1)]
    for z in zeros:
        nxt = [mp.mpc(0)] * (len(poly) + 1)
        for k, a in enumerate(poly):
            nxt[k + 1] += a
            nxt[k] -= z * a
        poly = nxt
    for _ in range(nu):
        nxt = [mp.mpc(0)] * (len(poly) + 1)
        for k, a in enumerate(poly):
            nxt[k] += a / 2
            nxt[k + 1] += a / 2
        poly = nxt
    val1 = sum(poly)
    poly = [a / val1 for a in poly]
    h = [mp.sqrt(2) * mp.re(a) for a in poly]
    imag = max(abs(mp.im(a)) for a in poly)
    assert imag < mp.mpf("1e-40"), f"complex filter, imag={imag}"
    assert len(h) == 2 * nu
    return h


def phase_nonlinearity(h):
    """sup deviation of the filter phase from its linear interpolant."""
    n = 257
    prev = mp.mpf(0)
    phases = []
    for i in range(n):
        w = mp.pi * i / (n - 1)
        F = sum(hk * mp.e ** (-1j * w * k) for k, hk in enumerate(h))
        if abs(F) < mp.mpf("1e-30"):
            phases.append(prev)
            continue
        ph = mp.arg(F)
        while ph - prev > mp.pi:
            ph -= 2 * mp.pi
        while ph - prev < -mp.pi:
            ph += 2 * mp.pi
        phases.append(ph)
        prev = ph
    lin = [phases[0] + (phases[-1] - phases[0]) * i / (n - 1) for i in range(n)]
    return max(abs(p - l) for p, l in zip(phases, lin))


def energy_center(h):
    return sum(k * hk * hk for k, hk in enumerate(h))


def make_filter(family, nu):
    groups = root_groups(nu)
    if family == "db":
        h = filter_from_zeros(nu, [z for g in groups for z in g[0]])
        # canonical orientation: energy to the front
        if energy_center(h) > (2 * nu - 1) / 2:
            h = h[::-1]
        return h
    # symlets: enumerate factorizations, minimise phase nonlinearity;
    # reflection ties broken towards right-leaning energy (matches the
    # published least-asymmetric tables)
    best_nl, best_ec, best_h = None, None, None
    for mask in range(1 << len(groups)):
        zeros = []
        for gi, g in enumerate(groups):
            zeros.extend(g[1] if (mask >> gi) & 1 else g[0])
        h = filter_from_zeros(nu, zeros)
        nl = phase_nonlinearity(h)
        ec = energy_center(h)
        if best_nl is None or nl < best_nl - mp.mpf("1e-12") or \
           (abs(nl - best_nl) < mp.mpf("1e-12") and ec > best_ec):
            best_nl, best_ec, best_h = nl, ec, h
    return best_h


def check_filter(name, h, nu):
    s = sum(h)
    assert abs(s - mp.sqrt(2)) < mp.mpf("1e-45"), f"{name}: sum {s}"
    for k in range(1, nu):
        dot = sum(h[i] * h[i + 2 * k] for i in range(len(h) - 2 * k))
        assert abs(dot) < mp.mpf("1e-45"), f"{name}: shift-orth {k}: {dot}"
    e = sum(x * x for x in h)
    assert abs(e - 1) < mp.mpf("1e-45"), f"{name}: energy {e}"
    g = [(-1) ** k * h[len(h) - 1 - k] for k in range(len(h))]
    for p in range(nu):
        mom = sum(gk * mp.mpf(k) ** p for k, gk in enumerate(g))
        assert abs(mom) < mp.mpf("1e-35"), f"{name}: moment {p}: {mom}"


# ---------------------------------------------------------------------------
# Boundary construction (left edge; right edge = left edge of reversed filter)
# ---------------------------------------------------------------------------
# Index conventions: interior scaling function phi has supp [-nu+1, nu] and
# two-scale relation phi(x) = sqrt(2) sum_u hbar[u] phi(2x-u), u = -nu+1..nu,
# where hbar[u] = h[u+nu-1].  Crossing translates phi(.-c)|[0,inf) have
# c in K = {-nu+1..nu-2}; the touching translate c = nu-1 is kept in the edge
# block's span.

class EdgeBuilder:
    def __init__(self, h, nu):
        self.nu = nu
        self.h = h
        self.hbar = {u: h[u + nu - 1] for u in range(-nu + 1, nu + 1)}
        self.K = list(range(-nu + 1, nu - 1))
        self.gamma = self._restricted_overlaps()

    def _gamma_known(self, a, b):
        """Gamma(a,b) for pairs outside the unknown crossing block."""
        nu = self.nu
        if a <= -nu or b <= -nu:
            return mp.mpf(0)
        if a >= nu - 1 or b >= nu - 1:
            return mp.mpf(1) if a == b else mp.mpf(0)
        return None

    def _restricted_overlaps(self):
        """Gamma(c,d) = int_0^inf phi(x-c) phi(x-d) dx on the crossing block."""
        nu, hbar, K = self.nu, self.hbar, self.K
        idx = {(c, d): i for i, (c, d) in
               enumerate((c, d) for c in K for d in K)}
        n = len(idx)
        A = mp.zeros(n, n)
        rhs = mp.zeros(n, 1)
        for (c, d), i in idx.items():
            A[i, i] += 1
            for u in range(-nu + 1, nu + 1):
                for v in range(-nu + 1, nu + 1):
                    w = hbar[u] * hbar[v]
                    a, b = 2 * c + u, 2 * d + v
                    known = self._gamma_known(a, b)
                    if known is None:
                        A[i, idx[(a, b)]] -= w
                    else:
                        rhs[i] += w * known
        sol = mp.lu_solve(A, rhs)
        gamma = {}
        for (c, d), i in idx.items():
            gamma[(c, d)] = sol[i]
        return gamma

    def Gamma(self, a, b):
        known = self._gamma_known(a, b)
        if known is not None:
            return known
        return self.gamma[(a, b)]

    def Gamma1(self, a, b):
        """<phi(.-a)|[0,inf), sqrt(2) phi(2.-b)|[0,inf)>."""
        return sum(self.hbar[u] * self.Gamma(2 * a + u, b)
                   for u in range(-self.nu + 1, self.nu + 1))

    def edge_scaling(self):
        """Gram-Schmidt of the polynomial-reproducing combinations.

        Returns E (nu x (2nu-1)): phi_m^left = sum_i E[m,i] phi(.-n'_i)|[0,inf)
        with n'_i = -nu+1+i.  Row m has support n' <= m.
        """
        nu = self.nu
        width = 2 * nu - 1
        # pi_k over translates n' = -nu+1..nu-1: coeff C(2nu-2-i, k)
        pis = []
        for k in range(nu):
            v = [mp.mpf(0)] * width
            for i in range(width):
                n_of_i = 2 * nu - 2 - i        # n index in the CDV sum
                if n_of_i >= k and (-nu + 1 + i) <= (nu - 1 - k):
                    v[i] = mp.binomial(n_of_i, k)
            pis.append(v)

        def inner(u, v):
            tot = mp.mpf(0)
            for i in range(width):
                if u[i] == 0:
                    continue
                for jx in range(width):
                    if v[jx] == 0:
                        continue
                    tot += u[i] * v[jx] * self.Gamma(-nu + 1 + i, -nu + 1 + jx)
            return tot

        E = []
        for m in range(nu):           # m = 0 uses pi_{nu-1} (shortest support)
            v = list(pis[nu - 1 - m])
            for prev in E:
                c = inner(v, prev)
                v = [a - c * b for a, b in zip(v, prev)]
            # second orthogonalisation pass for numerical hygiene
            for prev in E:
                c = inner(v, prev)
                v = [a - c * b for a, b in zip(v, prev)]
            nrm = mp.sqrt(inner(v, v))
            v = [a / nrm for a in v]
            E.append(v)
        return E

    def refinement(self, E):
        """Two-scale matrices of the edge scaling functions.

        A[m][k] = <phi_m^left, sqrt2 phi_k^left(2.)>,
        B[m][l-nu] = <phi_m^left, sqrt2 phi(2.-l)>, l = nu..3nu-2.
        """
        nu = self.nu
        width = 2 * nu - 1
        A = mp.zeros(nu, nu)
        B = mp.zeros(nu, width)
        for m in range(nu):
            for k in range(nu):
                tot = mp.mpf(0)
                for i in range(width):
                    if E[m][i] == 0:
                        continue
                    for jx in range(width):
                        if E[k][jx] == 0:
                            continue
                        tot += E[m][i] * E[k][jx] * \
                            self.Gamma1(-nu + 1 + i, -nu + 1 + jx)
                A[m, k] = tot
            for li in range(width):
                l = nu + li
                tot = mp.mpf(0)
                for i in range(width):
                    if E[m][i] == 0:
                        continue
                    tot += E[m][i] * self.Gamma1(-nu + 1 + i, l)
                B[m, li] = tot
            # completeness of the expansion within V_1 of the interval MRA
            resid = 1 - sum(A[m, k] ** 2 for k in range(nu)) \
                      - sum(B[m, li] ** 2 for li in range(width))
            assert abs(resid) < mp.mpf("1e-40"), f"refinement residual {resid}"
        return A, B

    def edge_wavelets(self, A, B):
        """Orthonormal completion with staggered supports.

        Works in fine coordinates [bd_0..bd_{nu-1} | l = nu..3nu-2].
        """
        nu = self.nu
        width = 2 * nu - 1
        dim = nu + width
        hbar = self.hbar
        gbar = {u: (-1) ** u * hbar.get(1 - u, mp.mpf(0))
                for u in range(-nu + 1, nu + 1)}

        def int_shadow(coeffs, mprime):
            row = [mp.mpf(0)] * dim
            for u in range(-nu + 1, nu + 1):
                l = 2 * mprime + u
                if nu <= l <= 3 * nu - 2:
                    row[nu + (l - nu)] = coeffs[u]
            return row

        constraints = []
        for m in range(nu):
            row = [A[m, k] for k in range(nu)] + [B[m, li] for li in range(width)]
            constraints.append(row)
        for mprime in range(nu, 2 * nu - 1):
            constraints.append(int_shadow(hbar, mprime))
            constraints.append(int_shadow(gbar, mprime))

        wavelets = []
        for m in range(nu):
            keep = list(range(nu)) + [nu + li for li in range(2 * m + 1)]
            rows = [[r[i] for i in keep] for r in constraints + wavelets]
            Amat = mp.matrix(rows)
            U, S, V = mp.svd_r(Amat)
            ncols = len(keep)
            # singular values padded implicitly: count small ones
            svals = [S[i] for i in range(min(Amat.rows, ncols))]
            small = [i for i in range(ncols)
                     if i >= len(svals) or svals[i] < mp.mpf("1e-25")]
            assert len(small) == 1, \
                f"nullspace dim {len(small)} at m={m} (nu={nu})"
            vec = [V[small[0], i] for i in range(ncols)]
            nrm = mp.sqrt(sum(x * x for x in vec))
            vec = [x / nrm for x in vec]
            big = max(range(ncols), key=lambda i: abs(vec[i]))
            if vec[big] < 0:
                vec = [-x for x in vec]
            full = [mp.mpf(0)] * dim
            for i, ki in enumerate(keep):
                full[ki] = vec[i]
            wavelets.append(full)
        Aw = mp.zeros(nu, nu)
        Bw = mp.zeros(nu, width)
        for m in range(nu):
            for k in range(nu):
                Aw[m, k] = wavelets[m][k]
            for li in range(width):
                Bw[m, li] = wavelets[m][nu + li]
        return Aw, Bw


def integer_grid_values(h, nu):
    """phi(k) for k = -nu+1..nu via power iteration on the transfer matrix."""
    hbar = {u: h[u + nu - 1] for u in range(-nu + 1, nu + 1)}
    ks = list(range(-nu + 2, nu))           # interior integer points
    v = {k: mp.mpf(1) / len(ks) for k in ks}
    for _ in range(400):
        nv = {}
        for k in ks:
            tot = mp.mpf(0)
            for u in range(-nu + 1, nu + 1):
                t = 2 * k - u
                if t in v:
                    tot += hbar[u] * v[t]
            nv[k] = mp.sqrt(2) * tot
        s = sum(nv.values())
        v = {k: x / s for k, x in nv.items()}
    out = [mp.mpf(0)] + [v[k] for k in ks] + [mp.mpf(0)]
    return out  # k = -nu+1..nu


# ---------------------------------------------------------------------------
# Whole-matrix verification: one analysis step on [0,1] must be orthogonal
# ---------------------------------------------------------------------------

def build_step_matrix(nu, h, left, right, j):
    """Single DWT analysis step mapping scale-j coefficients to
    (scale j-1 scaling, scale j-1 detail), as a 2^j x 2^j matrix."""
    E, A, B, Aw, Bw = left
    Er, Ar, Br, Awr, Bwr = right
    n = 1 << j
    half = n >> 1
    hbar = {u: h[u + nu - 1] for u in range(-nu + 1, nu + 1)}
    gbar = {u: (-1) ** u * hbar.get(1 - u, mp.mpf(0))
            for u in range(-nu + 1, nu + 1)}
    W = mp.zeros(n, n)

    def fill(rowbase, Am, Bm, Amr, Bmr, filt):
        for m in range(nu):
            for k in range(nu):
                W[rowbase + m, k] = Am[m, k]
            for li in range(2 * nu - 1):
                l = nu + li
                if l < n:
                    W[rowbase + m, l] = Bm[m, li]
        for m in range(nu, half - nu):
            for u in range(-nu + 1, nu + 1):
                W[rowbase + m, 2 * m + u] = filt[u]
        for mbar in range(nu):
            row = rowbase + half - 1 - mbar
            for k in range(nu):
                W[row, n - 1 - k] = Amr[mbar, k]
            for li in range(2 * nu - 1):
                l = nu + li
                if n - 1 - l >= 0:
                    W[row, n - 1 - l] = Bmr[mbar, li]

    fill(0, A, B, Ar, Br, hbar)
    fill(half, Aw, Bw, Awr, Bwr, gbar)
    return W


def verify_step_orthogonality(nu, h, left, right):
    J0 = math.ceil(math.log2(2 * nu))
    for j in (J0 + 1, J0 + 2):
        W = build_step_matrix(nu, h, left, right, j)
        n = 1 << j
        err = mp.mpf(0)
        G = W * W.T
        for a in range(n):
            for b in range(n):
                tgt = mp.mpf(1) if a == b else mp.mpf(0)
                err = max(err, abs(G[a, b] - tgt))
        assert err < mp.mpf("1e-40"), f"step matrix not orthogonal: {err}"


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def write_cwwf(path, family, nu, mats):
    body = b""
    body += struct.pack("<I", len(mats))
    for m in mats:
        if isinstance(m, list):
            rows, cols, flat = 1, len(m), [mp.mpf(x) for x in m]
        else:
            rows, cols = m.rows, m.cols
            flat = [m[r, c] for r in range(rows) for c in range(cols)]
        body += struct.pack("<II", rows, cols)
        body += struct.pack(f"<{len(flat)}d", *[float(x) for x in flat])
    head = b"CWWF" + struct.pack("<III", FORMAT_VERSION, FAMILY_TAG[family], nu)
    payload = head + body
    crc = zlib.crc32(payload) & 0xFFFFFFFF
    path.write_bytes(payload + struct.pack("<I", crc))


def build_one(family, nu):
    name = f"{family}{nu}"
    h = make_filter(family, nu)
    check_filter(name, h, nu)
    # highpass: gbar_u = (-1)^u hbar_{1-u}, u = -nu+1..nu
    g = [(-1) ** u * h[(1 - u) + nu - 1] for u in range(-nu + 1, nu + 1)]

    def edge_set(filt):
        eb = EdgeBuilder(filt, nu)
        E = eb.edge_scaling()
        Em = mp.matrix(E)
        A, B = eb.refinement(E)
        Aw, Bw = eb.edge_wavelets(A, B)
        return (Em, A, B, Aw, Bw)

    left = edge_set(h)
    right = edge_set(h[::-1])
    verify_step_orthogonality(nu, h, left, right)

    phi_int = integer_grid_values(h, nu)
    mats = [list(h), list(g), list(phi_int),
            left[0], left[1], left[2], left[3], left[4],
            right[0], right[1], right[2], right[3], right[4]]
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_cwwf(OUT_DIR / f"{name}.cwwf", family, nu, mats)
    print(f"{name}: ok  (h[0]={float(h[0]):+.12f}, h[-1]={float(h[-1]):+.12f})")
    return h


REFERENCE = {
    # spot digits from standard published tables, for cross-checking
    "db2": [0.48296291314469025, 0.836516303737469, 0.22414386804185735,
            -0.12940952255092145],
    "db4": [0.23037781330885523, 0.7148465705525415, 0.6308807679295904,
            -0.02798376941698385, -0.18703481171888114, 0.030841381835986965,
            0.032883011666982945, -0.010597401784997278],
    # least-asymmetric LA(8) scaling filter, Percival & Walden orientation
    "sym4": [-0.0757657147893407, -0.0296355276459541, 0.4976186676324578,
             0.8037387518052163, 0.2978577956055422, -0.0992195435769354,
             -0.0126039672622612, 0.0322231006040713],
}


def main():
    for family in ("db", "sym"):
        for nu in range(2, 7):
            h = build_one(family, nu)
            name = f"{family}{nu}"
            if name in REFERENCE:
                ref = REFERENCE[name]
                d = max(abs(float(a) - b) for a, b in zip(h, ref))
                print(f"   {name} vs reference table: max diff {d:.3e}")
                if d > 1e-8:
                    print(f"   WARNING: {name} deviates from reference!")
    print("all data files written to", OUT_DIR)


if __name__ == "__main__":
    sys.exit(main())
