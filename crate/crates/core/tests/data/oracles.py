"""Independent numpy evaluation of reference values for tests/oracles.rs.

Run from this directory: python3 oracles.py > oracles.json
"""
import json

import numpy as np


def ket(*amps):
    v = np.array(amps, dtype=complex)
    return v / np.linalg.norm(v)


def proj(v):
    return np.outer(v, v.conj())


def entropy(rho):
    w = np.linalg.eigvalsh((rho + rho.conj().T) / 2)
    w = w[w > 1e-12]
    return float(-(w * np.log2(w)).sum())


def ptrace(rho, dims, keep):
    n = len(dims)
    t = rho.reshape(dims + dims)
    drop = [k for k in range(n) if k not in keep]
    for k in sorted(drop, reverse=True):
        m = t.ndim // 2
        t = np.trace(t, axis1=k, axis2=k + m)
    d = int(np.prod([dims[k] for k in keep]))
    return t.reshape(d, d)


def h2(p):
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def wootters(rho):
    yy = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=complex)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sort(np.sqrt(np.abs(np.linalg.eigvals(r))))[::-1]
    c = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    return float(c), h2((1 + np.sqrt(1 - c * c)) / 2)


def holevo_on_last(rho, dims, povm):
    """I(X;rest) for a POVM on the last subsystem, by the Holevo formula."""
    rest = dims[:-1]
    dr = int(np.prod(rest))
    d = dims[-1]
    avg = ptrace(rho, dims, list(range(len(rest))))
    total = entropy(avg)
    for m in povm:
        big = np.kron(np.eye(dr), m)
        post = ptrace(big @ rho, dims, list(range(len(rest))))
        post = (post + post.conj().T) / 2
        p = np.trace(post).real
        if p > 1e-12:
            total -= p * entropy(post / p)
    return float(total)


def basis(d):
    return [proj(np.eye(d)[i]) for i in range(d)]


def trine():
    out = []
    for k in range(3):
        t = 2 * np.pi * k / 3
        v = np.array([np.cos(t / 2), np.sin(t / 2)], dtype=complex)
        out.append(2 / 3 * proj(v))
    return out


phi = ket(1, 0, 0, 1)
s1 = 0.6 * proj(phi) + 0.3 * proj(ket(0, 1, 0, 0)) + 0.1 * proj(ket(0, 0, 1, 0))
psi2 = ket(1, 0, 0, 2j)
s2 = 0.7 * proj(psi2) + 0.3 * np.eye(4) / 4
ghz = ket(1, 0, 0, 0, 0, 0, 0, 1)
w = ket(0, 1, 1, 0, 1, 0, 0, 0)
s3 = 0.5 * proj(ghz) + 0.3 * proj(w) + 0.2 * np.eye(8) / 8
chi = np.zeros(6, dtype=complex)
chi[0] = chi[3] = chi[4] = 1  # |0,0>, |1,1>, |2,0>
chi /= np.linalg.norm(chi)
s4 = 0.5 * proj(chi) + 0.5 * np.eye(6) / 6

out = {}
for name, rho in [("s1", s1), ("s2", s2)]:
    dims = [2, 2]
    c, ef = wootters(rho)
    sa = entropy(ptrace(rho, dims, [0]))
    sab = entropy(rho)
    out[name] = {
        "concurrence": c,
        "eof": ef,
        "s_a": sa,
        "s_b": entropy(ptrace(rho, dims, [1])),
        "s_ab": sab,
        "coherent_information": sa - sab,
        "holevo_basis_b": holevo_on_last(rho, dims, basis(2)),
        "holevo_trine_b": holevo_on_last(rho, dims, trine()),
        "i_back_complement": sa - ef,
    }

dims = [2, 2, 2]
S = lambda keep: entropy(ptrace(s3, dims, keep))
out["s3"] = {
    "s_a": S([0]),
    "s_abc": S([0, 1, 2]),
    "cmi_a_b_given_c": S([0, 2]) + S([1, 2]) - S([0, 1, 2]) - S([2]),
    "cmi_a_c_given_b": S([0, 1]) + S([1, 2]) - S([0, 1, 2]) - S([1]),
    "mi_a_bc": S([0]) + S([1, 2]) - S([0, 1, 2]),
    "ssa_slack": (S([0]) - S([0, 1, 2])) - (S([0]) - S([0, 1])) - (S([0]) - S([0, 2])),
    # X = basis outcome on B, Y = basis outcome on C
    "i_x_a": holevo_on_last(ptrace(s3, dims, [0, 1]), [2, 2], basis(2)),
    "i_y_a": holevo_on_last(ptrace(s3, dims, [0, 2]), [2, 2], basis(2)),
    "i_y_b": holevo_on_last(ptrace(s3, dims, [1, 2]), [2, 2], basis(2)),
    "i_xy_a": holevo_on_last(s3, [2, 4], basis(4)),
}
dims = [3, 2]
sa = entropy(ptrace(s4, dims, [0]))
out["s4"] = {
    "s_a": sa,
    "s_b": entropy(ptrace(s4, dims, [1])),
    "s_ab": entropy(s4),
    "mutual_information": sa + entropy(ptrace(s4, dims, [1])) - entropy(s4),
    "holevo_basis_b": holevo_on_last(s4, dims, basis(2)),
    "holevo_trine_b": holevo_on_last(s4, dims, trine()),
}
wmarg = ptrace(proj(w), [2, 2, 2], [0, 1])
c, ef = wootters(wmarg)
out["w"] = {"concurrence_ab": c, "eof_ab": ef, "s_a": entropy(ptrace(proj(w), [2, 2, 2], [0]))}
werner = 0.9 * proj(ket(0, 1, -1, 0)) + 0.1 * np.eye(4) / 4
c, ef = wootters(werner)
out["werner_0_9"] = {"concurrence": c, "eof": ef, "coherent_information": 1 - entropy(werner)}
print(json.dumps(out, indent=2, sort_keys=True))
