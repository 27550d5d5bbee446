"""Independent reference implementations used only by the tests.

Everything here works on dense density matrices or brute-force enumeration
and shares no code with the package.
"""

from __future__ import annotations

import itertools
import math
from functools import reduce

import numpy as np

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PHI_PLUS = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)


def kron(*ops):
    return reduce(np.kron, ops)


def bell_vector(k: int, l: int) -> np.ndarray:
    """``(I x X^l Z^k) |phi+>``; index ``2k + l`` in the package convention."""
    op = np.linalg.matrix_power(X, l) @ np.linalg.matrix_power(Z, k)
    return kron(I2, op) @ PHI_PLUS


BELL = [bell_vector(i >> 1, i & 1) for i in range(4)]


def bell_diagonal_rho(p) -> np.ndarray:
    return sum(pi * np.outer(v, v.conj()) for pi, v in zip(p, BELL))


def bell_weights(rho: np.ndarray) -> np.ndarray:
    return np.array([np.real(v.conj() @ rho @ v) for v in BELL])


def embed(op: np.ndarray, qubit: int, n: int) -> np.ndarray:
    return kron(*[op if q == qubit else I2 for q in range(n)])


def depolarize_qubit(rho: np.ndarray, qubit: int, p: float, n: int) -> np.ndarray:
    """``p rho + (1 - p)/4 sum_P P rho P`` on one qubit (Kraus form)."""
    Y = 1j * X @ Z
    out = p * rho
    for P in (I2, X, Y, Z):
        E = embed(P, qubit, n)
        out = out + (1 - p) / 4 * E @ rho @ E.conj().T
    return out


def cnot(control: int, target: int, n: int) -> np.ndarray:
    dim = 2**n
    U = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        bits = [(b >> (n - 1 - q)) & 1 for q in range(n)]
        if bits[control]:
            bits[target] ^= 1
        out = sum(bit << (n - 1 - q) for q, bit in enumerate(bits))
        U[out, b] = 1
    return U


def rx(theta: float) -> np.ndarray:
    return math.cos(theta / 2) * I2 - 1j * math.sin(theta / 2) * X


def dejmps_oracle(a, b, p_ldn: float = 1.0, layers: int = 1):
    """DEJMPS on qubits (A1, B1, A2, B2) with a dense 16 x 16 matrix.

    ``layers`` depolarizing layers act on every qubit before the rotation.
    Returns the output Bell weights and the success probability.
    """
    rho = np.kron(bell_diagonal_rho(a), bell_diagonal_rho(b))
    for _ in range(layers):
        for q in range(4):
            rho = depolarize_qubit(rho, q, p_ldn, 4)
    U = kron(rx(math.pi / 2), rx(-math.pi / 2), rx(math.pi / 2), rx(-math.pi / 2))
    U = cnot(1, 3, 4) @ cnot(0, 2, 4) @ U
    rho = U @ rho @ U.conj().T
    r = rho.reshape([2] * 8)
    keep = np.zeros((4, 4), dtype=complex)
    for m in (0, 1):
        keep += r[:, :, m, m, :, :, m, m].reshape(4, 4)
    ps = float(np.real(np.trace(keep)))
    return bell_weights(keep / ps), ps


def swap_oracle(a, b) -> np.ndarray:
    """Bell-measure the middle qubits of ``a (x) b`` and correct qubit 3."""
    rho = np.kron(bell_diagonal_rho(a), bell_diagonal_rho(b))
    out = np.zeros((4, 4), dtype=complex)
    for k, l in itertools.product((0, 1), repeat=2):
        v = bell_vector(k, l)
        proj = kron(I2, np.outer(v, v.conj()), I2)
        post = (proj @ rho @ proj).reshape([2] * 8)
        # partial trace over the middle qubits (1 and 2)
        red = np.einsum("aijbcijd->abcd", post).reshape(4, 4)
        corr = kron(I2, np.linalg.matrix_power(X, l) @ np.linalg.matrix_power(Z, k))
        out += corr.conj().T @ red @ corr
    return bell_weights(out)


def ldn_oracle(p, p_ldn: float, qubit: int) -> np.ndarray:
    return bell_weights(depolarize_qubit(bell_diagonal_rho(p), qubit, p_ldn, 2))


def entropy_bits(p) -> float:
    return -sum(x * math.log2(x) for x in p if x > 0)


def wilson_oracle(k: int, n: int, z: float = 1.959963984540054):
    ph = k / n
    den = 1 + z * z / n
    mid = (ph + z * z / (2 * n)) / den
    half = z * math.sqrt(ph * (1 - ph) / n + z * z / (4 * n * n)) / den
    return mid - half, mid + half


def nmin_linear(F: float, N: int, target: float, infidelity) -> int:
    """First ``n`` with ``1 - N * eps(n) >= target`` by plain scan."""
    n = 2
    while True:
        try:
            if 1 - N * infidelity(F, n) >= target:
                return n
        except ValueError:
            pass
        n += 1
