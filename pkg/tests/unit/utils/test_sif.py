import pytest
from hypothesis import given
from hypothesis import strategies as st

from saltext.cellnopt.exceptions import ReactionParseError
from saltext.cellnopt.exceptions import SifFormatError
from saltext.cellnopt.utils.cnograph import PknModel
from saltext.cellnopt.utils.reactions import parse_reaction
from saltext.cellnopt.utils.sif import SifDocument
from saltext.cellnopt.utils.sif import read_sif
from saltext.cellnopt.utils.sif import read_sif_file
from saltext.cellnopt.utils.sif import write_sif
from saltext.cellnopt.utils.sif import write_sif_file


def _document(*texts):
    reactions = []
    for text in texts:
        reactions.extend(parse_reaction(text))
    return SifDocument(tuple(reactions))


def test_read_toy(toy_sif):
    document = read_sif(toy_sif, source_name="toy.sif")
    assert [str(reaction) for reaction in document.reactions] == [
        "Input2=Interm",
        "Input1=Output",
        "Interm=Output",
    ]
    assert document.nodes == {"Input1", "Input2", "Interm", "Output"}
    assert document.source_name == "toy.sif"


def test_read_inhibition():
    (reaction,) = read_sif("A -1 B\n").reactions
    assert str(reaction) == "!A=B"


def test_read_and_node():
    document = read_sif("A 1 and1\nB 1 and1\nand1 1 C\n")
    assert [str(reaction) for reaction in document.reactions] == ["A^B=C"]


def test_read_several_targets_comments_and_duplicates():
    text = "# header\n\nA 1 B C\nA\t1\tB\n"
    document = read_sif(text)
    assert [str(reaction) for reaction in document.reactions] == ["A=B", "A=C"]


@pytest.mark.parametrize(
    "text,lineno",
    [
        ("A 1 B\nA 2 B\n", 2),
        ("A 1\n", 1),
        ("A 1 B\nA^B 1 C\n", 2),
        ("A 1 A\n", 1),
        ("A 1 and1\nand1 1 and2\n", 2),
    ],
)
def test_read_errors_with_line_numbers(text, lineno):
    with pytest.raises(SifFormatError) as excinfo:
        read_sif(text, source_name="bad.sif")
    assert excinfo.value.lineno == lineno
    assert str(excinfo.value).startswith(f"bad.sif, line {lineno}")


@pytest.mark.parametrize(
    "text",
    [
        "A 1 and1\nand1 1 C\n",
        "A 1 and1\nB 1 and1\n",
        "A 1 and1\nB 1 and1\nand1 1 C\nand1 1 D\n",
        "A 1 and1\nB 1 and1\nand1 -1 C\n",
        "A 1 and1\nA -1 and1\nand1 1 C\n",
        "A 1 and1\nB 1 and1\nand1 1 A\n",
    ],
)
def test_read_malformed_and_nodes(text):
    with pytest.raises(SifFormatError):
        read_sif(text)


def test_write_simple():
    assert write_sif(_document("Input1=Output")) == "Input1\t1\tOutput\n"


def test_write_and_gate():
    assert write_sif(_document("A^!B=C")) == "A\t1\tand1\nB\t-1\tand1\nand1\t1\tC\n"


def test_write_empty():
    assert write_sif(SifDocument()) == ""


def test_write_numbers_gates_in_canonical_order():
    document = _document("X^Y=Z", "A^B=C", "A=C")
    assert write_sif(document) == (
        "A\t1\tC\n"
        "A\t1\tand1\nB\t1\tand1\nand1\t1\tC\n"
        "X\t1\tand2\nY\t1\tand2\nand2\t1\tZ\n"
    )


def test_file_round_trip(tmp_path):
    document = _document("A^!B=C", "!C=D", "A=D")
    path = write_sif_file(document, str(tmp_path / "model.sif"))
    read = read_sif_file(path)
    assert read.reactions == document.reactions
    assert read.source_name == path


def test_species_cannot_take_gate_names():
    with pytest.raises(ReactionParseError, match="reserved for AND gate nodes"):
        PknModel.from_reactions(["and1=B"])
    document = _document("band1^andy=and")
    assert read_sif(write_sif(document)).reactions == document.reactions


species = st.sampled_from(["A", "B", "C", "D", "E"])


@st.composite
def reaction_texts(draw):
    output = draw(species)
    others = species.filter(lambda name: name != output)
    inputs = draw(st.lists(others, min_size=1, max_size=3, unique=True))
    literals = [("!" if draw(st.booleans()) else "") + name for name in inputs]
    return "^".join(literals) + "=" + output


@given(st.lists(reaction_texts(), max_size=8))
def test_write_read_round_trip(texts):
    document = _document(*texts)
    text = write_sif(document)
    assert read_sif(text).reactions == document.reactions
    expected_lines = sum(
        len(reaction.inputs) + 1 if reaction.is_and else 1 for reaction in document.reactions
    )
    assert len(text.splitlines()) == expected_lines
