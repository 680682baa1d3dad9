"""Star-glyph overlays: one polygon per condition, one spoke per joint.

Runs the full file pipeline: synthetic session on disk, per-condition
profile CSVs, then a glyph SVG per joint group plus a delta table.
"""

import tempfile
from pathlib import Path

from gaitentropy.cli import main

out = Path(tempfile.mkdtemp(prefix="gaitentropy_glyphs_"))
assert main(["synth", "--subjects", "1", "--trials", "3", "--seed", "42",
             "--out", str(out)]) == 0
for cond in ("NW", "KB", "AB"):
    assert main(["profile", str(out), "--condition", cond,
                 "--out", str(out)]) == 0

nw = out / "S1_NW_sagittal.condition_profile.csv"
kb = out / "S1_KB_sagittal.condition_profile.csv"
ab = out / "S1_AB_sagittal.condition_profile.csv"

# trunk joints barely move between conditions; right side carries the braces
print("\ntrunk glyph (main5):")
assert main(["glyph", str(nw), str(kb), str(ab), "--joints", "main5",
             "--out", str(out)]) == 0
print("\nright-side glyph, shared scale:")
assert main(["glyph", str(nw), str(kb), str(ab), "--joints", "right5",
             "--out", str(out)]) == 0

print("\nnumeric counterpart of the right-side overlay:")
assert main(["compare", str(nw), str(kb), "--joints", "right5",
             "--out", str(out)]) == 0

print(f"\nopen the .glyph.svg files under {out} in a browser:")
for svg in sorted(out.glob("*.glyph.svg")):
    print(f"  {svg.name}")
