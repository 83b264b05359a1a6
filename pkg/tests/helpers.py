import random
from fractions import Fraction

from rrflow.flows import PathFlow
from rrflow.graph import Network
from rrflow.instances import gen_random

PRIMARY = ("a1", "a2", "a3")


def net_of(*arcs, source="s", sink="t") -> Network:
    return Network.build(arcs, source, sink)


def primary_flow(value) -> PathFlow:
    return PathFlow.from_pairs([(PRIMARY, Fraction(value))])


def random_instance(seed: int, caps=(1, 2), max_nodes: int = 8, max_arcs: int = 14) -> Network:
    """Seeded instance family shared by the property and acceptance tests."""
    rng = random.Random(seed)
    n = rng.randint(4, max_nodes)
    m = rng.randint(n, max_arcs)
    return gen_random(n, m, caps, seed)


def is_half_integral(x: PathFlow) -> bool:
    return x.is_multiple_of(Fraction(1, 2))


def non_strict_witness(net: Network, step: int = 12) -> PathFlow | None:
    """Reroutable flow that is not strictly reroutable, if one exists on the
    grid of multiples of 1/step up to the maximum reroutable value.

    Witnesses maximise the total arc flow, so long multiply-crossing paths
    are preferred; the largest grid value with a non-strict witness wins.
    """
    from rrflow.flows import verify_reroutable
    from rrflow.oracle import oracle_max_rf, oracle_rf_witness

    opt = oracle_max_rf(net)[0]
    for m in range(int(opt * step), 0, -1):
        x = oracle_rf_witness(net, Fraction(m, step))
        if x is not None and not verify_reroutable(net, x, strict=True).ok:
            return x
    return None
