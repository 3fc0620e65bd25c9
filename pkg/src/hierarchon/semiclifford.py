"""Semi-Clifford recognition and exact diagonalisation.

A gate is semi-Clifford when its conjugation action sends the Weyl words of
some Lagrangian semibasis to Pauli operators.  Such a gate factors as
C1 D C2 with both C's Clifford and D diagonal; the factors are built and
re-multiplied exactly, so a returned decomposition is a certificate.
"""

import hashlib

from .exactmat import ScaledUnitary, conjugate_action, equal_up_to_phase, to_interchange
from .phasespace import (
    PauliElement,
    enumerate_semibases,
    recognize_pauli,
    synthesize_clifford,
    to_matrix,
)


class SemiCliffordWitness:
    """A semibasis whose monomials all recognize as Paulis, with the images."""

    def __init__(self, semibasis, pauli_images):
        self.semibasis = tuple(semibasis)
        self.pauli_images = list(pauli_images)

    def __repr__(self):
        return "SemiCliffordWitness(%r)" % (self.semibasis,)


class Diagonalisation:
    def __init__(self, c1, diag, c2):
        self.c1 = c1
        self.diag = diag
        self.c2 = c2


def sp_order(d):
    """Order of the symplectic group on one d-dimensional wire."""
    return d * (d * d - 1)


def _wires(G):
    d = G.d
    n, dimk = 0, 1
    while dimk < G.dim:
        dimk *= d
        n += 1
    if dimk != G.dim or n == 0:
        raise ValueError("gate dimension is not a power of d")
    return n


def _monomial_image(G, point):
    # U^p V^q for the gate's conjugate tuple collapses to G (Z^p X^q) G*
    p, q = point
    word = to_matrix(PauliElement(G.d, 0, p, q))
    return conjugate_action(G, word)


def find_witness(G):
    """First semibasis whose monomials are all Pauli, or None.

    Semibases arrive Z-first from enumerate_semibases, so diagonal gates
    always witness at the plain Z semibasis.
    """
    n = _wires(G)
    for basis in enumerate_semibases(G.d, n):
        images = []
        for point in basis:
            P = recognize_pauli(_monomial_image(G, point))
            if P is None:
                break
            images.append(P)
        else:
            return SemiCliffordWitness(basis, images)
    return None


def diagonalize(G, witness):
    """Split G as C1 D C2 along the witness, verifying every invariant.

    C2 is the inverse of the Clifford sending Z_i to the semibasis word, so
    conjugating Z_i through C2* lands exactly on the word whose G-image the
    C1 synthesis targets; the middle factor then commutes with every Z_i.
    """
    d = G.d
    s2 = synthesize_clifford(
        [PauliElement(d, 0, p, q) for p, q in witness.semibasis]
    )
    c2 = ScaledUnitary(s2.mat.dagger(), s2.scale2)
    c1 = synthesize_clifford(witness.pauli_images)
    middle = c1.mat.dagger() @ G.mat @ c2.mat.dagger()
    diag = middle.canonical_rep().demote_min()
    if not diag.is_diagonal():
        raise ValueError("witness does not diagonalise the gate")
    if not equal_up_to_phase(c1.mat @ diag @ c2.mat, G.mat):
        raise ValueError("diagonalisation does not reproduce the gate")
    return Diagonalisation(c1, diag, c2)


def gate_hash(G):
    return hashlib.sha256(G.mat.canonical_rep().to_key()).hexdigest()


def gate_report(G):
    """Witness search plus decomposition for one gate, as a JSON-able dict."""
    n = _wires(G)
    witness = find_witness(G)
    report = {"gate_hash": gate_hash(G), "semi_clifford": witness is not None}
    if witness is None:
        report.update({"witness": None, "C1": None, "C2": None, "D": None})
        return report
    split = diagonalize(G, witness)
    report["witness"] = {
        "semibasis": [[list(p), list(q)] for p, q in witness.semibasis],
        "images": [
            {"c": P.c, "p": list(P.p), "q": list(P.q)} for P in witness.pauli_images
        ],
    }
    report["C1"] = to_interchange(split.c1, n)
    report["C2"] = to_interchange(split.c2, n)
    report["D"] = to_interchange(ScaledUnitary.exact(split.diag), n)
    return report
