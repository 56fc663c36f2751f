import pytest
from hypothesis import given
from hypothesis import settings
from hypothesis import strategies as st

from saltext.cellnopt.exceptions import NameLookupError
from saltext.cellnopt.exceptions import ReactionParseError
from saltext.cellnopt.utils import cnograph
from saltext.cellnopt.utils.boolean import simulate_steady
from saltext.cellnopt.utils.boolean import truth_table
from saltext.cellnopt.utils.cnograph import PknModel
from saltext.cellnopt.utils.midas import ExperimentCondition
from saltext.cellnopt.utils.midas import read_midas
from saltext.cellnopt.utils.reactions import Reaction
from saltext.cellnopt.utils.reactions import Sign
from saltext.cellnopt.utils.sif import read_sif

try:
    from salt.exceptions import SaltInvocationError
except ImportError:
    pass


def _texts(model):
    return {str(reaction) for reaction in model.reactions}


def test_add_reaction_builds_toy():
    model = PknModel()
    for text in ("Input1=Output", "Input2=Interm", "Interm=Output"):
        model = cnograph.add_reaction(model, text)
    assert model.nodes == {"Input1", "Input2", "Interm", "Output"}
    assert len(model.reactions) == 3
    assert cnograph.add_reaction(model, "Input1=Output") == model


def test_add_reaction_or_expression():
    model = cnograph.add_reaction(PknModel(), "A+B=C")
    assert _texts(model) == {"A=C", "B=C"}


def test_add_reaction_parse_error():
    with pytest.raises(ReactionParseError):
        cnograph.add_reaction(PknModel(), "A^B")


def test_model_rejects_unknown_annotation():
    with pytest.raises(NameLookupError):
        PknModel.from_reactions(["A=B"], signals=frozenset(("C",)))


def test_annotate(toy_model):
    model = cnograph.annotate(toy_model, stimuli=["Input1", "Input2"], signals=["Output"])
    assert model.stimuli == {"Input1", "Input2"}
    assert model.signals == {"Output"}
    assert model.inhibitors == frozenset()
    bare = cnograph.annotate(toy_model)
    assert bare.annotated == frozenset()


def test_annotate_lists_every_unknown_name(toy_model):
    with pytest.raises(NameLookupError) as excinfo:
        cnograph.annotate(toy_model, stimuli=["EGF"], signals=["ERK", "Output"])
    assert "EGF, ERK" in str(excinfo.value)


def test_annotate_from_midas(toy_model, toy_midas):
    bare = cnograph.annotate(toy_model)
    model = cnograph.annotate_from_midas(bare, read_midas(toy_midas))
    assert model.stimuli == {"Input1", "Input2"}
    assert model.signals == {"Output"}
    with pytest.raises(NameLookupError):
        cnograph.annotate_from_midas(
            PknModel.from_reactions(["Input1=Output"]), read_midas(toy_midas)
        )


def test_expand_toy(toy_model):
    expanded = cnograph.expand_and_gates(toy_model)
    assert _texts(expanded) - _texts(toy_model) == {"Input1^Interm=Output"}
    assert expanded.expanded
    assert [str(gate) for gate in expanded.and_gates] == ["Input1^Interm=Output"]


def test_expand_single_input_adds_nothing():
    model = PknModel.from_reactions(["A=B", "B=C"])
    assert cnograph.expand_and_gates(model).reactions == model.reactions


def test_expand_three_inputs():
    model = PknModel.from_reactions(["A=D", "B=D", "!C=D"])
    assert len(cnograph.expand_and_gates(model).and_gates) == 3
    expanded = cnograph.expand_and_gates(model, max_inputs=3)
    assert _texts(expanded) - _texts(model) == {"A^B=D", "A^!C=D", "B^!C=D", "A^B^!C=D"}


def test_expand_skips_contradictions():
    model = PknModel.from_reactions(["A=C", "!A=C", "B=C"])
    assert {str(gate) for gate in cnograph.expand_and_gates(model).and_gates} == {
        "A^B=C",
        "!A^B=C",
    }


def test_expand_idempotent(toy_model):
    once = cnograph.expand_and_gates(toy_model)
    assert cnograph.expand_and_gates(once).reactions == once.reactions


def test_expand_bound():
    with pytest.raises(SaltInvocationError):
        cnograph.expand_and_gates(PknModel(), max_inputs=1)


def test_compress_toy(toy_model):
    compressed = cnograph.compress(toy_model)
    assert _texts(compressed) == {"Input1=Output", "Input2=Output"}
    assert "Interm" not in compressed.nodes
    assert compressed.compressed


def test_compress_keeps_annotated_nodes(toy_model):
    model = toy_model.replace(signals=frozenset(("Output", "Interm")))
    assert cnograph.compress(model).reactions == model.reactions


def test_compress_composes_signs():
    model = PknModel.from_reactions(
        ["!A=B", "!B=C"], stimuli=frozenset("A"), signals=frozenset("C")
    )
    assert _texts(cnograph.compress(model)) == {"A=C"}


def test_compress_keeps_feedback_loops():
    model = PknModel.from_reactions(
        ["!N1=N0", "!N1=N3", "!N3=N2", "N2=N0", "N2=N1", "N2=N3"],
        stimuli=frozenset(("N0",)),
        signals=frozenset(("N3",)),
    )
    compressed = cnograph.compress(model)
    assert compressed.reactions == model.reactions
    assert truth_table(compressed) == truth_table(model)


def test_compress_ignores_transients_next_to_an_oscillation():
    model = PknModel.from_reactions(
        ["A=B", "!B=A", "S=M", "S^!M=Out"],
        stimuli=frozenset("S"),
        signals=frozenset(("Out",)),
    )
    compressed = cnograph.compress(model)
    assert compressed.nodes == {"A", "B", "Out", "S"}
    assert _texts(compressed) == {"A=B", "!B=A"}
    assert truth_table(compressed) == truth_table(model) == {
        ((("S", 0),), ()): {"Out": 0},
        ((("S", 1),), ()): {"Out": 0},
    }


def test_feedback_bound():
    model = PknModel.from_reactions(["S=X", "X=A", "A=B", "!B=A", "B=Y", "S=Z", "Z=W"])
    assert cnograph.feedback_bound(model) == {"S", "X", "A", "B", "Y"}
    assert cnograph.feedback_bound(PknModel.from_reactions(["A=B", "B=C"])) == set()


def test_compress_after_expand_refused(toy_model):
    with pytest.raises(SaltInvocationError):
        cnograph.compress(cnograph.expand_and_gates(toy_model))


def test_cut_nonc():
    model = PknModel.from_reactions(
        ["A=B", "B=C", "B=D", "X=Y"], stimuli=frozenset("A"), signals=frozenset("C")
    )
    pruned = cnograph.cut_nonc(model)
    assert pruned.nodes == {"A", "B", "C"}
    assert _texts(pruned) == {"A=B", "B=C"}


def test_cut_nonc_keeps_annotated_and_toy(toy_model):
    assert cnograph.cut_nonc(toy_model) == toy_model
    model = PknModel.from_reactions(
        ["A=B", "X=Y"], stimuli=frozenset("A"), signals=frozenset("B"), inhibitors=frozenset("Y")
    )
    assert "Y" in cnograph.cut_nonc(model).nodes


def test_cut_nonc_needs_annotations():
    with pytest.raises(SaltInvocationError):
        cnograph.cut_nonc(PknModel.from_reactions(["A=B"]))


def test_cut(toy_model):
    assert cnograph.cut(toy_model, [1, 1, 1]) == toy_model
    empty = cnograph.cut(toy_model, "000")
    assert empty.reactions == ()
    assert empty.nodes == toy_model.nodes
    assert empty.signals == toy_model.signals
    with pytest.raises(SaltInvocationError):
        cnograph.cut(toy_model, [1, 1])


def test_cut_keeps_only_gate(toy_model):
    expanded = cnograph.expand_and_gates(toy_model)
    assert [str(r) for r in expanded.reactions] == [
        "Input2=Interm",
        "Input1=Output",
        "Interm=Output",
        "Input1^Interm=Output",
    ]
    model = cnograph.cut(expanded, [1, 0, 0, 1])

    def output(input1, input2):
        condition = ExperimentCondition(stimuli={"Input1": input1, "Input2": input2})
        return simulate_steady(model, condition)["Output"]

    assert [output(1, 1), output(1, 0), output(0, 1)] == [1, 0, 0]


def test_split_node_updates_and_gates(toy_model):
    expanded = cnograph.expand_and_gates(toy_model)
    split = cnograph.split_node(expanded, "Interm", ["Interm1", "Interm2"])
    assert _texts(split) == {
        "Input2=Interm1",
        "Input2=Interm2",
        "Input1=Output",
        "Interm1=Output",
        "Interm2=Output",
        "Input1^Interm1=Output",
        "Input1^Interm2=Output",
    }
    assert "Interm" not in split.nodes


def test_split_transfers_annotations(toy_model):
    split = cnograph.split_node(toy_model, "Output", ["Out1", "Out2"])
    assert split.signals == {"Out1", "Out2"}


def test_split_single_variant_renames(toy_model):
    renamed = cnograph.split_node(toy_model, "Interm", ["Relay"])
    assert _texts(renamed) == {"Input1=Output", "Input2=Relay", "Relay=Output"}


@pytest.mark.parametrize(
    "node,variants,error",
    [
        ("Interm", ["Input1"], SaltInvocationError),
        ("Interm", ["X", "X"], SaltInvocationError),
        ("Interm", [], SaltInvocationError),
        ("Nope", ["X"], NameLookupError),
    ],
)
def test_split_errors(toy_model, node, variants, error):
    with pytest.raises(error):
        cnograph.split_node(toy_model, node, variants)


def test_split_merge_round_trip(toy_model):
    expanded = cnograph.expand_and_gates(toy_model)
    split = cnograph.split_node(expanded, "Interm", ["Interm1", "Interm2"])
    assert cnograph.merge_nodes(split, ["Interm1", "Interm2"], "Interm") == expanded


def test_merge_collapses_parallel_inputs():
    model = PknModel.from_reactions(["A=C", "B=C"], stimuli=frozenset("A"))
    merged = cnograph.merge_nodes(model, ["A", "B"], "AB")
    assert _texts(merged) == {"AB=C"}
    assert merged.stimuli == {"AB"}


def test_merge_drops_self_loops():
    merged = cnograph.merge_nodes(PknModel.from_reactions(["A=B", "B=C"]), ["A", "B"], "X")
    assert _texts(merged) == {"X=C"}


def test_merge_single_node_renames():
    merged = cnograph.merge_nodes(PknModel.from_reactions(["A=B"]), ["A"], "Z")
    assert _texts(merged) == {"Z=B"}


def test_merge_errors():
    model = PknModel.from_reactions(["A=B"])
    with pytest.raises(SaltInvocationError):
        cnograph.merge_nodes(model, [], "X")
    with pytest.raises(NameLookupError):
        cnograph.merge_nodes(model, ["Q"], "X")


def test_remove_node_and_reaction(toy_model):
    model = cnograph.remove_node(toy_model, "Input1")
    assert _texts(model) == {"Input2=Interm", "Interm=Output"}
    assert model.stimuli == {"Input2"}
    model = cnograph.remove_reaction(model, Reaction((("Interm", Sign.ACTIVATE),), "Output"))
    assert _texts(model) == {"Input2=Interm"}
    with pytest.raises(NameLookupError):
        cnograph.remove_node(toy_model, "Nope")


def test_networkx_projection(toy_model):
    graph = cnograph.to_networkx(cnograph.expand_and_gates(toy_model))
    assert graph.number_of_nodes() == 4
    assert graph.number_of_edges() == 5
    assert not cnograph.has_feedback(toy_model)
    assert cnograph.has_feedback(PknModel.from_reactions(["A=B", "!B=A"]))


def test_sif_round_trip(toy_sif):
    model = PknModel.from_sif(read_sif(toy_sif))
    assert model.to_sif().reactions == model.reactions


def test_summary(toy_model):
    assert cnograph.expand_and_gates(toy_model).summary() == {
        "nodes": 4,
        "reactions": 4,
        "and_gates": 1,
        "stimuli": 2,
        "inhibitors": 0,
        "signals": 1,
    }


def test_preprocess_stages(toy_model):
    model, stages = cnograph.preprocess(toy_model)
    assert stages == [
        ("raw", 4, 3),
        ("nonc", 4, 3),
        ("compressed", 3, 2),
        ("expanded", 3, 3),
    ]
    assert _texts(model) == {"Input1=Output", "Input2=Output", "Input1^Input2=Output"}


def test_preprocess_disabled_stages(toy_model):
    model, stages = cnograph.preprocess(toy_model, do_nonc=False, do_compress=False)
    assert stages[-1] == ("expanded", 4, 4)
    assert model.expanded and not model.compressed


@st.composite
def dag_models(draw):
    size = draw(st.integers(min_value=4, max_value=8))
    names = [f"N{index}" for index in range(size)]
    signs = st.sampled_from(list(Sign))
    reactions = []
    for target in range(2, size):
        sources = draw(st.lists(st.integers(0, target - 1), max_size=3, unique=True))
        for source in sources:
            reactions.append(Reaction(((names[source], draw(signs)),), names[target]))
        if len(sources) >= 2 and draw(st.booleans()):
            gate = tuple((names[source], draw(signs)) for source in sources[:2])
            reactions.append(Reaction(gate, names[target]))
    signals = {names[-1]} | set(draw(st.lists(st.sampled_from(names[2:]), max_size=1)))
    inhibitors = set(draw(st.lists(st.sampled_from(names[2:-1]), max_size=1)))
    return PknModel(
        nodes=frozenset(names),
        reactions=tuple(reactions),
        stimuli=frozenset(names[:2]),
        inhibitors=frozenset(inhibitors),
        signals=frozenset(signals),
    )


@st.composite
def looped_models(draw):
    model = draw(dag_models())
    size = len(model.nodes)
    back = draw(
        st.lists(
            st.tuples(st.integers(3, size - 1), st.integers(2, size - 2)).filter(
                lambda edge: edge[0] > edge[1]
            ),
            max_size=3,
            unique=True,
        )
    )
    signs = st.sampled_from(list(Sign))
    extra = tuple(
        Reaction(((f"N{source}", draw(signs)),), f"N{target}") for source, target in back
    )
    return model.replace(reactions=model.reactions + extra)


# long enough for any trajectory of these models to revisit a state
TRAJECTORY = 80


@settings(max_examples=60, deadline=None)
@given(looped_models())
def test_compression_keeps_signal_truth_table(model):
    compressed = cnograph.compress(model)
    assert compressed.annotated == model.annotated
    before = truth_table(model, max_iter=TRAJECTORY)
    assert truth_table(compressed, max_iter=TRAJECTORY) == before


@settings(max_examples=40, deadline=None)
@given(dag_models())
def test_expansion_never_changes_steady_states(model):
    expanded = cnograph.expand_and_gates(model, max_inputs=3)
    assert set(model.reactions) <= set(expanded.reactions)
    assert truth_table(expanded) == truth_table(model)


@settings(max_examples=40, deadline=None)
@given(dag_models())
def test_cut_nonc_is_a_subgraph(model):
    pruned = cnograph.cut_nonc(model)
    assert model.annotated <= pruned.nodes
    assert pruned.nodes <= model.nodes
    assert set(pruned.reactions) <= set(model.reactions)
