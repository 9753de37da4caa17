"""Bundled example models: Bell, bilocal, and triangle network scenarios and
a two-round adaptive protocol.  The JSON copies shipped under ``data/`` are
generated from these builders.
"""

from __future__ import annotations

from importlib import resources

import numpy as np

from .networks import NetworkScenario, Party, Source
from .protocols import ChannelBlock, InstrumentBlock, Protocol, Round

_SQRT2 = np.sqrt(2.0)
_Z = np.diag([1.0, -1.0]).astype(complex)
_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)


def _projectors(observable: np.ndarray):
    """Rank-1 projectors of a 2-outcome observable, +1 eigenvector first."""
    vals, vecs = np.linalg.eigh(observable)
    order = np.argsort(-vals)
    return [np.outer(vecs[:, i], vecs[:, i].conj()) for i in order]


def _phi_plus() -> np.ndarray:
    ket = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / _SQRT2
    return np.outer(ket, ket.conj())


def _bell_basis():
    kets = [np.array([1, 0, 0, 1]), np.array([1, 0, 0, -1]),
            np.array([0, 1, 1, 0]), np.array([0, 1, -1, 0])]
    return [np.outer(k, k.conj()).astype(complex) / 2.0 for k in kets]


def bell_scenario() -> NetworkScenario:
    """One maximally entangled source, two parties, the measurement settings
    that maximize the CHSH expression."""
    pov_a = {"0": _projectors(_Z), "1": _projectors(_X)}
    pov_b = {"0": _projectors((_Z + _X) / _SQRT2),
             "1": _projectors((_Z - _X) / _SQRT2)}
    return NetworkScenario(
        parties=[Party("A", 2), Party("B", 2)],
        sources=[Source((2, 2), _phi_plus(), ("A", "B"))],
        blocks=(("A",), ("B",)),
        povms={0: pov_a, 1: pov_b})


def chsh_value(scenario: NetworkScenario) -> float:
    """CHSH expression over the four binary settings of a Bell-type
    scenario."""
    total = 0.0
    for x in ("0", "1"):
        for y in ("0", "1"):
            dist = scenario.evaluate([x, y])
            corr = sum(((-1) ** (a + b)) * dist[(a, b)]
                       for a in range(2) for b in range(2))
            total += -corr if (x, y) == ("1", "1") else corr
    return total


def bilocal_scenario() -> NetworkScenario:
    """Two independent maximally entangled sources; the middle party holds
    one half of each and measures in the entangled joint basis."""
    pov_end = {"0": _projectors(_Z), "1": _projectors(_X)}
    return NetworkScenario(
        parties=[Party("A", 2), Party("C", 4), Party("B", 2)],
        sources=[Source((2, 2), _phi_plus(), ("A", "C")),
                 Source((2, 2), _phi_plus(), ("C", "B"))],
        blocks=(("A",), ("C",), ("B",)),
        povms={0: pov_end, 1: {"0": _bell_basis()}, 2: dict(pov_end)})


def triangle_scenario() -> NetworkScenario:
    """Three two-qubit sources on a ring; each party measures its two
    received qubits either in the entangled joint basis or in a product
    basis."""
    product_basis = []
    v0 = _projectors((_Z + _X) / _SQRT2)
    v1 = _projectors(_Z)
    for i in range(2):
        for j in range(2):
            product_basis.append(np.kron(v0[i], v1[j]))
    povm = {"0": _bell_basis(), "1": product_basis}
    parties = [Party("A", 4), Party("B", 4), Party("C", 4)]
    sources = [Source((2, 2), _phi_plus(), ("A", "B")),
               Source((2, 2), _phi_plus(), ("B", "C")),
               Source((2, 2), _phi_plus(), ("C", "A"))]
    return NetworkScenario(
        parties=parties, sources=sources,
        blocks=(("A",), ("B",), ("C",)),
        povms={0: dict(povm), 1: dict(povm), 2: dict(povm)})


def adaptive_protocol() -> Protocol:
    """Two-qubit, two-round adaptive protocol: an entangling channel, a
    computational measurement of the first qubit, then a second-qubit
    measurement whose basis depends on the first outcome."""
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / _SQRT2
    cx = np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                   [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    entangle = cx @ np.kron(h, np.eye(2))
    ket00 = np.zeros((4, 4), dtype=complex)
    ket00[0, 0] = 1.0
    mz = tuple(np.diag([1.0 - o, float(o)]).astype(complex) for o in (0, 1))
    mx = tuple(p.astype(complex) for p in _projectors(_X))
    return Protocol(ket00, (2, 2), [
        Round("channel", ((None, (ChannelBlock((0, 1), (entangle,),
                                               (2, 2)),)),)),
        Round("instrument",
              ((None, (InstrumentBlock((0,), ("0", "1"), mz),)),)),
        Round("instrument", (
            ((("0",),), (InstrumentBlock((1,), ("0", "1"), mz),)),
            ((("1",),), (InstrumentBlock((1,), ("0", "1"), mx),)),
        )),
    ])


BUILDERS = {
    "bell": bell_scenario,
    "bilocal": bilocal_scenario,
    "triangle": triangle_scenario,
    "adaptive": adaptive_protocol,
}


def data_path(name: str):
    """Path to a bundled example JSON file."""
    return resources.files("realembed").joinpath("data", f"{name}.json")
