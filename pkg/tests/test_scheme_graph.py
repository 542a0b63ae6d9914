import numpy as np
import pytest

from ratebound.errors import SpecificationError
from ratebound.infoexpr import InfoExpr
from ratebound.prob_core import JointPmf, entropy
from ratebound.scheme_graph import (
    builtin_graph,
    covering_constraints,
    derive_region,
    graph_from_dict,
    lifted_system,
    packing_constraints,
)


def lines(cs):
    return sorted(str(c) for c in cs)


def canon(text):
    """String-normalized constraint: parse the rhs back through InfoExpr."""
    lhs, rel, rhs = text.partition(" < ") if " < " in text else text.partition(" >= ")
    return lhs.strip(), rel.strip(), str(InfoExpr.parse(rhs))


MAC = {
    "name": "mac",
    "nodes": [{"name": "X1", "messages": ["R1"]}, {"name": "X2", "messages": ["R2"]}],
    "edges": [],
    "decoders": [{"receiver": "Y", "decodes": ["X1", "X2"]}],
    "rates": ["R1", "R2"],
}


class TestCovering:
    def test_fig16_single_bound(self):
        assert lines(covering_constraints(builtin_graph("fig16"))) == ["B1 >= I(V2;W1|W2)"]

    def test_no_bins(self):
        assert covering_constraints(graph_from_dict(MAC)) == []

    def test_fig7_cumulative(self):
        assert lines(covering_constraints(builtin_graph("fig7"))) == [
            "B10 + B11 + B12 >= I(U1;V1|V2,W1,W2) + I(U1;V2|W1,W2) + I(V2;W1|W2)",
            "B10 + B11 >= I(U1;V2|W1,W2) + I(V2;W1|W2)",
            "B10 >= I(V2;W1|W2)",
        ]

    def test_bin_without_target(self):
        d = {"nodes": [{"name": "U", "messages": ["R1"], "bin": "B"}], "edges": [],
             "decoders": [{"receiver": "Y", "decodes": ["U"]}], "rates": ["R1"]}
        with pytest.raises(SpecificationError):
            covering_constraints(graph_from_dict(d))


class TestPacking:
    def test_fig16_first_receiver(self):
        got = {canon(s) for s in lines(packing_constraints(builtin_graph("fig16"), "Y1"))}
        want = {canon("B1 + R1 < I(W1;Y1|W2)"), canon("B1 + R1 + R20 < I(W1,W2;Y1)")}
        assert got == want

    def test_fig16_second_receiver(self):
        got = {canon(s) for s in lines(packing_constraints(builtin_graph("fig16"), "Y2"))}
        want = {
            canon("R22 < I(V1,V2;Y2|W1,W2) + I(V2;W1|W2)"),
            canon("B1 + R22 < I(V1,V2,W1;Y2|W2) + I(V2;W1|W2)"),
            canon("B1 + R20 + R22 < I(V1,V2,W1,W2;Y2) + I(V2;W1|W2)"),
        }
        assert got == want

    def test_two_node_mac(self):
        # Independent codebooks: each row keeps an I(X1;X2) term symbolically,
        # which vanishes on product input joints.
        got = sorted(packing_constraints(graph_from_dict(MAC), "Y"), key=str)
        expected = {"R1 + R2": "I(X1,X2;Y)", "R1": "I(X1;Y|X2)", "R2": "I(X2;Y|X1)"}
        assert sorted(str(c).partition(" < ")[0] for c in got) == sorted(expected)
        rng = np.random.default_rng(3)
        for _ in range(5):
            px1, px2 = rng.dirichlet(np.ones(2)), rng.dirichlet(np.ones(3))
            ch = rng.dirichlet(np.ones(2), size=(2, 3))
            j = JointPmf(("X1", "X2", "Y"), px1[:, None, None] * px2[None, :, None] * ch)
            for c in got:
                lhs, _, rhs = str(c).partition(" < ")
                diff = InfoExpr.parse(rhs) - InfoExpr.parse(expected[lhs])
                val = sum(float(k) * entropy(j, sorted(v)) for v, k in diff.entropy_form().items())
                assert abs(val) < 1e-12


class TestValidation:
    def test_closure_rule(self):
        d = {"nodes": [{"name": "W", "messages": ["R0"]}, {"name": "U", "messages": ["R1"]}],
             "edges": [["W", "U"]], "decoders": [{"receiver": "Y", "decodes": ["U"]}], "rates": ["R0", "R1"]}
        with pytest.raises(SpecificationError):
            graph_from_dict(d)

    def test_cycle_rejected(self):
        d = {"nodes": [{"name": "A", "messages": ["R1"]}, {"name": "B", "messages": ["R2"]}],
             "edges": [["A", "B"], ["B", "A"]], "decoders": [], "rates": []}
        with pytest.raises(SpecificationError):
            graph_from_dict(d)


class TestDerive:
    def test_empty_graph(self):
        d = derive_region(graph_from_dict({"nodes": [], "edges": [], "decoders": [], "rates": []}), lambda s: 0)
        assert not d.empty

    def test_infeasible_valuation_flagged(self):
        g = builtin_graph("fig16")

        def h(subset):
            # covering needs B1 >= 1 while Y1 packing needs B1 + R1 < 1
            return {frozenset({"V2", "W2"}): 1, frozenset({"W1", "W2"}): 1, frozenset({"V2", "W1", "W2"}): 1}.get(
                frozenset(subset), 0
            )

        assert derive_region(g, h).empty

    def test_lifted_outputs_first(self):
        s = lifted_system(builtin_graph("thm39"))
        assert s.variables[:2] == ("R1", "R2")
