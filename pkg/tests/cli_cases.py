"""Command-line golden cases and their deterministic input files."""

import os
import subprocess
import sys
from pathlib import Path

from simpkan.affine import build_example_5_1
from simpkan.cli import canonical_json
from simpkan.generators import SplitMix64, elementary_complex
from simpkan.kan import HornElement, HornIndex, project_to_horn
from simpkan.linalg import Matrix
from simpkan.normalization import PointedFamily
from simpkan.simplicial import ChainComplex, SemiSVS, constant_svs, dold_kan_inverse

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("SIMPKAN_UPDATE_GOLDEN") == "1"

CASES = [
    ("gen_random", ["gen", "random", "--spec", '{"sphere":[1,2],"disk":[0,1]}', "--seed", "7"], 0),
    ("gen_dk", ["gen", "dk", "--chain", "chain12.json", "--level", "2"], 0),
    ("gen_example51", ["gen", "example51", "--level", "3"], 0),
    ("validate_svs", ["validate", "--input", "dk2.json"], 0),
    ("validate_chain", ["validate", "--input", "chain12.json", "--kind", "chain"], 0),
    ("validate_broken_svs", ["validate", "--input", "broken.json"], 1),
    ("validate_affine", ["validate", "--input", "lines.json"], 0),
    ("kan_all", ["kan", "--input", "dk2.json", "--all"], 0),
    ("kan_single", ["kan", "--input", "dk3.json", "--n", "2", "--i", "1"], 0),
    ("kan_generalized", ["kan", "--input", "dk3.json", "--n", "3", "--generalized", "1,2"], 0),
    ("kan_fails", ["kan", "--input", "lonely.json"], 1),
    ("horn_direct", ["horn", "--input", "dk2.json", "--n", "2", "--removed", "1"], 0),
    ("horn_recursive", ["horn", "--input", "dk3.json", "--n", "3", "--removed", "0,3", "--recursive"], 0),
    ("fill_closed_form", ["fill", "--input", "dk3.json", "--element", "elem.json", "--generalized"], 0),
    ("fill_solve", ["fill", "--input", "dk3.json", "--element", "elem.json", "--horn", '{"n":3,"removed":[1,3]}'], 0),
    ("fill_not_in_horn", ["fill", "--input", "dk3.json", "--element", "bad_elem.json"], 2),
    ("fill_no_filler", ["fill", "--input", "lonely.json", "--element", "lonely_elem.json"], 1),
    ("normalize_N", ["normalize", "--input", "dk3.json", "--variant", "N"], 0),
    ("normalize_tilde", ["normalize", "--input", "dk3.json", "--variant", "tilde"], 0),
    ("gamma_check", ["gamma-check", "--input", "dk3.json"], 0),
    ("homology_chain", ["homology", "--input", "chain12.json"], 0),
    ("homology_svs", ["homology", "--input", "dk3.json"], 0),
    ("tangent_family", ["tangent", "--input", "family.json"], 0),
    ("tangent_affine", ["tangent", "--input", "lines.json"], 0),
    ("horn_profile_example", ["horn-profile", "--input", "lines.json", "--n", "2", "--removed", "1"], 1),
    ("horn_profile_one_face", ["horn-profile", "--input", "lines.json", "--n", "2", "--removed", "0,1"], 0),
    ("malformed_json", ["validate", "--input", "garbage.json"], 2),
    ("unknown_flag", ["kan", "--input", "dk2.json", "--bogus"], 2),
    ("wrong_schema", ["kan", "--input", "chain12.json"], 2),
    ("missing_file", ["validate", "--input", "nope.json"], 2),
    ("bad_range", ["kan", "--input", "dk2.json", "--n", "5", "--i", "0"], 2),
]


def write_json(path: Path, obj) -> None:
    path.write_text(canonical_json(obj), encoding="utf-8")


def write_inputs(d: Path) -> Path:
    """Populate ``d`` with every input file the cases refer to."""
    chain12 = ChainComplex([1, 2], {1: Matrix([[1, -1]])})
    write_json(d / "chain12.json", chain12.to_json())
    write_json(d / "dk2.json", dold_kan_inverse(chain12, 2).to_json())
    c = elementary_complex([1, 1, 1], [0, 1, 1])
    dk3 = dold_kan_inverse(c, 3)
    write_json(d / "dk3.json", dk3.to_json())
    h = HornIndex.filtered(3, 1, 2)
    elem = project_to_horn(dk3, h, SplitMix64(3).vector(dk3.dims[3]))
    write_json(d / "elem.json", elem.to_json())
    bad = dict(elem.components)
    bad[0] = tuple(v + 1 for v in bad[0])
    write_json(d / "bad_elem.json", HornElement(h, bad).to_json())
    broken = constant_svs(1, 2).to_json()
    broken["faces"]["2,1"] = Matrix([[2]]).to_json()
    write_json(d / "broken.json", broken)
    lonely = SemiSVS([1, 0], {(1, 0): Matrix.zeros(1, 0), (1, 1): Matrix.zeros(1, 0)})
    write_json(d / "lonely.json", lonely.to_json())
    write_json(d / "lonely_elem.json", HornElement(HornIndex(1, (0,)), {1: (1,)}).to_json())
    g = 3
    string_like = dold_kan_inverse(
        ChainComplex([0, g, 1], {1: Matrix.zeros(0, g), 2: Matrix.zeros(g, 1)}), 2
    )
    write_json(d / "family.json", PointedFamily(["e"], {"e": string_like}).to_json())
    write_json(d / "lines.json", build_example_5_1(3).to_json())
    (d / "garbage.json").write_text("{not json", encoding="utf-8")
    return d


def run_cli(args, cwd):
    proc = subprocess.run(
        [sys.executable, "-m", "simpkan", *args], cwd=cwd, capture_output=True, timeout=300
    )
    return proc.returncode, proc.stdout
