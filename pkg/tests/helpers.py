import math

from rotlab.cover import Hamiltonian, HamiltonianMap, Twist
from rotlab.profiles import Bump, Profile

SQRT2M1 = math.sqrt(2) - 1
GOLDEN = (math.sqrt(5) - 1) / 2


def twist_linear(at0=0.0, at1=1.0):
    return Twist(Profile.linear(at0, at1))


def hamiltonian_map(eps=0.01, t=0.5, drift=(0.2, 0.4), step=1e-3):
    ham = Hamiltonian(Profile.linear(*drift), eps, Bump(1.0, 0.5, 0.4), 1, 0.0)
    return HamiltonianMap(ham, t, step)
