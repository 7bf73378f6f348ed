import numpy as np

from quenchchern.analysis.process import classify_process, compare_processes, ring_signature
from quenchchern.analysis.rings import Ring

PTS = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def ring(kind, w, **kw):
    return Ring(PTS.copy(), kind, 0.5, winding=w, **kw)


class TestClassify:
    def test_no_rings(self):
        assert classify_process([]).label == "trivial_to_trivial"

    def test_trivial_to_topo(self):
        p = classify_process([ring("BIS", 1), ring("FSIS", 1)])
        assert p.label == "trivial_to_topo" and p.final_invariant == 1
        assert p.initial_invariant is None and not p.unclassifiable

    def test_topo_to_trivial_from_isis(self):
        p = classify_process([ring("ISIS", -1)])
        assert p.label == "topo_to_trivial" and p.initial_invariant == -1
        assert p.initial_source == "ISIS"

    def test_topo_to_trivial_from_lone_fsis(self):
        p = classify_process([ring("FSIS", 1)])
        assert p.label == "topo_to_trivial" and p.initial_source == "FSIS"

    def test_topo_to_topo(self):
        p = classify_process([ring("ISIS", -1), ring("BIS", 1), ring("FSIS", 1)])
        assert (p.label, p.initial_invariant, p.final_invariant) == ("topo_to_topo", -1, 1)

    def test_unknown_pattern_keeps_rings(self):
        rs = [ring("BIS", 1), ring("BIS", 1)]
        p = classify_process(rs)
        assert p.label is None and p.unclassifiable and len(p.rings) == 2 and p.notes

    def test_open_ring_unclassifiable(self):
        p = classify_process([ring("ISIS", None, wrap=(1, 0))])
        assert p.label == "topo_to_trivial" and p.unclassifiable

    def test_missing_winding_unclassifiable(self):
        p = classify_process([ring("BIS", None), ring("FSIS", 1)])
        assert p.unclassifiable

    def test_fsis_mismatch_noted(self):
        p = classify_process([ring("BIS", 1), ring("FSIS", -1)])
        assert not p.unclassifiable and any("differs" in n for n in p.notes)

    def test_ambiguity_propagates(self):
        assert classify_process([ring("ISIS", 1, ambiguous=True)]).ambiguous

    def test_to_dict(self):
        d = classify_process([ring("ISIS", -1)]).to_dict()
        assert d["label"] == "topo_to_trivial" and d["signature"] == ["SIS"]


class TestCompare:
    def test_signature_hides_fsis_vs_isis(self):
        assert ring_signature([ring("FSIS", 1)]) == ring_signature([ring("ISIS", 1)]) == ("SIS",)

    def test_indistinguishable(self):
        c = compare_processes(classify_process([ring("FSIS", 1)]), classify_process([ring("ISIS", 1)]))
        assert not c.distinguishable and c.ambiguous

    def test_different_pattern(self):
        a = classify_process([ring("BIS", 1), ring("FSIS", 1)])
        b = classify_process([ring("ISIS", 1)])
        c = compare_processes(a, b)
        assert c.distinguishable and not c.ambiguous

    def test_different_winding(self):
        c = compare_processes(classify_process([ring("ISIS", 1)]), classify_process([ring("ISIS", -1)]))
        assert c.distinguishable
