import re
import xml.etree.ElementTree as ET

import numpy as np

from grigid.affine import CantorStage, cantor_refine, converse_ifs
from grigid.attractor import chaos_game
from grigid.cover import generate_intervals
from grigid.directions import phi_image
from grigid.graph import UNIT, Affine, Takagi, framing_rectangle, sample
from grigid.svg import Style, render_svg

NS = "{http://www.w3.org/2000/svg}"


def parse(svg: str) -> ET.Element:
    root = ET.fromstring(svg.encode())
    assert root.tag == NS + "svg" and root.get("version") == "1.1"
    return root


def by_class(root, cls):
    return [e for e in root.iter() if e.get("class") == cls]


def test_takagi_polyline_node_count():
    g = sample(Takagi(), 4096)
    root = parse(render_svg([g]))
    (poly,) = by_class(root, "graph")
    assert len(poly.get("points").split()) == 4097


def test_deterministic():
    g = sample(Takagi(), 512)
    assert render_svg([g], Style(title="T")) == render_svg([g], Style(title="T"))


def test_empty_overlays_give_graph_only():
    g = sample(Takagi(), 64)
    root = parse(render_svg([g, []]))
    assert len(by_class(root, "graph")) == 1
    assert not by_class(root, "frame") and not by_class(root, "cantor-bar")


def test_cantor_stage_two_bars_and_gaps():
    ifs = converse_ifs(1.0, 0.0)
    g = sample(Affine(1.0, 0.0), 256)
    st = CantorStage.initial(UNIT)
    for _ in range(2):
        st = cantor_refine(ifs, g, st)
    root = parse(render_svg([g, st]))
    assert len(by_class(root, "cantor-bar")) == 4
    assert len(by_class(root, "cantor-gap")) == 3


def test_frames_points_and_directions():
    g = sample(Takagi(), 256)
    ifs = converse_ifs(0.0, 0.0)
    R = framing_rectangle(g, UNIT)
    rects = [framing_rectangle(g, w.interval) for w in generate_intervals(ifs, R, 2, check_cover=False)]
    d = phi_image(g, (0.5, float(g(0.5))))
    words = generate_intervals(ifs, R, 2, check_cover=False)
    root = parse(render_svg([g, rects, chaos_game(ifs, 50), d, words]))
    assert len(by_class(root, "frame")) == 4
    assert len(by_class(root, "point")) == 50
    assert len(by_class(root, "direction")) == len(d.distinct())
    assert len(by_class(root, "interval-bar")) == 4
    # all coordinates are finite numbers
    nums = re.findall(r'"(-?\d+(?:\.\d+)?)"', render_svg([g, rects]))
    assert all(np.isfinite(float(v)) for v in nums)
