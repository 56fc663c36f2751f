"""
DOT, SBML-qual and SVG renderings of models and fits

.. versionadded:: 1.0.0

All writers are deterministic: nodes and reactions are emitted in canonical
order, so re-exporting a model produces identical bytes.
"""

import logging
import math
import re
import xml.etree.ElementTree as ET

from saltext.cellnopt.utils.reactions import Sign
from saltext.cellnopt.utils.reactions import format_reaction

log = logging.getLogger(__name__)

STIMULUS_COLOR = "#9acd32"
SIGNAL_COLOR = "lightblue"
INHIBITOR_COLOR = "orangered"
DEFAULT_COLOR = "white"

SBML_NS = "http://www.sbml.org/sbml/level3/version1/core"
QUAL_NS = "http://www.sbml.org/sbml/level3/version1/qual/version1"
MATHML_NS = "http://www.w3.org/1998/Math/MathML"
SVG_NS = "http://www.w3.org/2000/svg"


def _quote(text):
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _attributes(**attrs):
    return ", ".join(f"{key}={_quote(str(value))}" for key, value in attrs.items())


def _node_style(model, node):
    if node in model.stimuli:
        fill = STIMULUS_COLOR
    elif node in model.signals:
        fill = SIGNAL_COLOR
    elif node in model.inhibitors:
        fill = INHIBITOR_COLOR
    else:
        fill = DEFAULT_COLOR
    attrs = {"fillcolor": fill}
    if node in model.inhibitors and fill != INHIBITOR_COLOR:
        attrs.update(color=INHIBITOR_COLOR, penwidth="3")
    return attrs


def _edge_style(sign):
    if sign is Sign.INHIBIT:
        return {"color": "red", "arrowhead": "tee"}
    return {"color": "black", "arrowhead": "normal"}


def to_dot(model, name="pkn"):
    """
    Render ``model`` as a Graphviz digraph.

    Stimuli are green, signals blue, inhibitors red; activations are black
    arrows and inhibitions red tees. AND gates are small black circles named
    after their reaction.
    """
    lines = [
        f"digraph {_quote(name)} {{",
        '    node [style="filled", fillcolor="white", fontname="Helvetica"];',
    ]
    for node in sorted(model.nodes):
        lines.append(f"    {_quote(node)} [{_attributes(**_node_style(model, node))}];")
    for gate in model.and_gates:
        attrs = _attributes(
            shape="circle", label="", width="0.15", fixedsize="true", fillcolor="black"
        )
        lines.append(f"    {_quote(format_reaction(gate))} [{attrs}];")
    for reaction in model.reactions:
        if reaction.is_and:
            gate = _quote(format_reaction(reaction))
            for source, sign in reaction.inputs:
                lines.append(f"    {_quote(source)} -> {gate} [{_attributes(**_edge_style(sign))}];")
            edge = _attributes(**_edge_style(Sign.ACTIVATE))
            lines.append(f"    {gate} -> {_quote(reaction.output)} [{edge}];")
        else:
            ((source, sign),) = reaction.inputs
            edge = _attributes(**_edge_style(sign))
            lines.append(f"    {_quote(source)} -> {_quote(reaction.output)} [{edge}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _sid(name, used):
    sid = re.sub(r"[^A-Za-z0-9_]", "_", name)
    if not re.match(r"[A-Za-z_]", sid):
        sid = f"s_{sid}"
    candidate, suffix = sid, 2
    while candidate in used:
        candidate = f"{sid}_{suffix}"
        suffix += 1
    used.add(candidate)
    return candidate


def _literal(parent, sid, sign):
    apply = ET.SubElement(parent, "apply")
    ET.SubElement(apply, "eq")
    ET.SubElement(apply, "ci").text = f" {sid} "
    level = ET.SubElement(apply, "cn", {"type": "integer"})
    level.text = "1" if sign is Sign.ACTIVATE else "0"


def _conjunction(parent, reaction, sids):
    if not reaction.is_and:
        ((name, sign),) = reaction.inputs
        _literal(parent, sids[name], sign)
        return
    apply = ET.SubElement(parent, "apply")
    ET.SubElement(apply, "and")
    for name, sign in reaction.inputs:
        _literal(apply, sids[name], sign)


def to_sbmlqual(model, model_id="cellnopt_model"):
    """
    Minimal SBML level 3 qual document: one species per node (max level 1)
    and one transition per node with incoming reactions whose function term
    is the OR of its reactions' ANDs
    """
    root = ET.Element(
        "sbml",
        {
            "xmlns": SBML_NS,
            "xmlns:qual": QUAL_NS,
            "level": "3",
            "version": "1",
            "qual:required": "true",
        },
    )
    element = ET.SubElement(root, "model", {"id": model_id})
    compartments = ET.SubElement(element, "listOfCompartments")
    ET.SubElement(compartments, "compartment", {"id": "main", "constant": "true"})

    used = set()
    sids = {node: _sid(node, used) for node in sorted(model.nodes)}
    species = ET.SubElement(element, "qual:listOfQualitativeSpecies")
    for node in sorted(model.nodes):
        ET.SubElement(
            species,
            "qual:qualitativeSpecies",
            {
                "qual:id": sids[node],
                "qual:name": node,
                "qual:compartment": "main",
                "qual:constant": "false",
                "qual:maxLevel": "1",
            },
        )

    transitions = ET.SubElement(element, "qual:listOfTransitions")
    for node in sorted(model.nodes):
        reactions = model.incoming(node)
        if not reactions:
            continue
        transition = ET.SubElement(transitions, "qual:transition", {"qual:id": f"tr_{sids[node]}"})
        inputs = ET.SubElement(transition, "qual:listOfInputs")
        signs = {}
        for reaction in reactions:
            for name, sign in reaction.inputs:
                signs.setdefault(name, set()).add(sign)
        for index, name in enumerate(sorted(signs), start=1):
            if signs[name] == {Sign.ACTIVATE}:
                effect = "positive"
            elif signs[name] == {Sign.INHIBIT}:
                effect = "negative"
            else:
                effect = "dual"
            ET.SubElement(
                inputs,
                "qual:input",
                {
                    "qual:id": f"tr_{sids[node]}_in_{index}",
                    "qual:qualitativeSpecies": sids[name],
                    "qual:transitionEffect": "none",
                    "qual:sign": effect,
                },
            )
        outputs = ET.SubElement(transition, "qual:listOfOutputs")
        ET.SubElement(
            outputs,
            "qual:output",
            {
                "qual:id": f"tr_{sids[node]}_out",
                "qual:qualitativeSpecies": sids[node],
                "qual:transitionEffect": "assignmentLevel",
            },
        )
        terms = ET.SubElement(transition, "qual:listOfFunctionTerms")
        ET.SubElement(terms, "qual:defaultTerm", {"qual:resultLevel": "0"})
        term = ET.SubElement(terms, "qual:functionTerm", {"qual:resultLevel": "1"})
        math_element = ET.SubElement(term, "math", {"xmlns": MATHML_NS})
        if len(reactions) == 1:
            _conjunction(math_element, reactions[0], sids)
        else:
            disjunction = ET.SubElement(math_element, "apply")
            ET.SubElement(disjunction, "or")
            for reaction in reactions:
                _conjunction(disjunction, reaction, sids)

    ET.indent(root, space="  ")
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


def _shade(value):
    if value is None or math.isnan(value):
        return None
    level = int(round(255 * (1.0 - min(max(value, 0.0), 1.0))))
    return f"#{level:02x}{level:02x}{level:02x}"


def heatmap_svg(data, residuals, cell=24):
    """
    Data next to simulation, one row per scored (experiment, time), one
    column per signal; a treatment panel on the left shows the condition of
    each row. ``residuals`` is the table of a scored breakdown.
    """
    treatments = list(data.experiments.columns)
    signals = list(data.signal_names)
    rows = list(dict.fromkeys(zip(residuals["experiment"], residuals["time"])))
    values = {
        (record.experiment, record.time, record.signal): (record.data, record.simulated)
        for record in residuals.itertuples(index=False)
    }

    label_width = 8 * max([len(f"{name} t={time:g}") for name, time in rows] + [10])
    header = 8 * max([len(name) for name in treatments + signals] + [4])
    gap = cell
    panels = [
        ("treatments", label_width, len(treatments)),
        ("data", label_width + (len(treatments) * cell) + gap, len(signals)),
        ("simulation", label_width + (len(treatments) + len(signals)) * cell + 2 * gap, len(signals)),
    ]
    width = panels[-1][1] + len(signals) * cell + gap
    height = header + cell * (len(rows) + 1)
    svg = ET.Element(
        "svg",
        {
            "xmlns": SVG_NS,
            "width": str(width),
            "height": str(height),
            "font-family": "Helvetica",
            "font-size": "10",
        },
    )
    for title, left, _ in panels:
        ET.SubElement(svg, "text", {"x": str(left), "y": "12", "font-weight": "bold"}).text = title

    columns = [(panels[0][1], treatments), (panels[1][1], signals), (panels[2][1], signals)]
    for left, names in columns:
        for index, name in enumerate(names):
            x = left + index * cell + cell // 2
            ET.SubElement(
                svg,
                "text",
                {"x": str(x), "y": str(header), "transform": f"rotate(-60 {x} {header})"},
            ).text = name

    for row, (experiment, time) in enumerate(rows):
        y = header + cell // 2 + row * cell
        ET.SubElement(svg, "text", {"x": "2", "y": str(y + cell // 2 + 4)}).text = (
            f"{experiment} t={time:g}"
        )
        settings = data.experiments.loc[experiment]
        cells = [(panels[0][1], i, float(settings[name])) for i, name in enumerate(treatments)]
        for index, signal in enumerate(signals):
            measured, simulated = values.get((experiment, time, signal), (math.nan, math.nan))
            cells.append((panels[1][1], index, measured))
            cells.append((panels[2][1], index, simulated))
        for left, index, value in cells:
            x = left + index * cell
            fill = _shade(value)
            ET.SubElement(
                svg,
                "rect",
                {
                    "x": str(x),
                    "y": str(y),
                    "width": str(cell),
                    "height": str(cell),
                    "fill": fill or "white",
                    "stroke": "#999999",
                },
            )
            if fill is None:
                ET.SubElement(
                    svg, "text", {"x": str(x + 3), "y": str(y + cell // 2 + 4), "fill": "red"}
                ).text = "NA"
    return ET.tostring(svg, encoding="unicode") + "\n"
