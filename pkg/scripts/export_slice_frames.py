#!/usr/bin/env python3
"""
Export a series of slice figures along the deformation.

This script:
1. Builds the 22-wall family at each frame's parameter
2. Slices it along the chosen wall
3. Writes one SVG per frame
4. Creates a CSV manifest with curve counts per frame
"""

import math
import sys
from pathlib import Path

import pandas as pd
from tqdm import tqdm

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from hyperwalls.arrangement import Parameter, builtin, t_for_n  # noqa: E402
from hyperwalls.errors import HyperwallsError  # noqa: E402
from hyperwalls.infinity import render_slice_svg, slice_figure  # noqa: E402


def frame_parameters():
    """t = 1, 0.9, 0.8, t_6, sqrt(1/2), t_4."""
    return [
        ("1", 1.0),
        ("0.9", 0.9),
        ("0.8", 0.8),
        ("t6", math.sqrt(float(t_for_n(6)))),
        ("sqrt_half", math.sqrt(0.5)),
        ("t4", math.sqrt(float(t_for_n(4)))),
    ]


def export_frames(base='A', output_dir='figures/slices'):
    """
    Export one SVG slice per frame parameter.

    Args:
        base: Wall to slice along
        output_dir: Directory to save the SVG files and manifest
    """
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    manifest = []
    for name, t in tqdm(frame_parameters(), desc=f"Slices along {base}"):
        family = builtin("Family22", Parameter.numeric(t))
        figure = slice_figure(family, base)
        svg_file = out_dir / f"slice_{base}_{name}.svg"
        render_slice_svg(figure, svg_file)
        manifest.append({
            'frame': name,
            't': t,
            'base': base,
            'curves': len(figure.curves),
            'tangency_points': len(figure.tangency_points),
            'crossing_points': len(figure.crossing_points),
            'file': svg_file.name,
        })

    df = pd.DataFrame(manifest)
    manifest_file = out_dir / f"slices_{base}.csv"
    df.to_csv(manifest_file, index=False)

    print(f"\n✓ Exported {len(manifest)} frames")
    print(f"✓ Figures: {out_dir}")
    print(f"✓ Manifest: {manifest_file}")
    print("\nCurves per frame:")
    print(df[['frame', 't', 'curves']].to_string(index=False))


def main():
    import argparse

    parser = argparse.ArgumentParser(description='Export slice figures along the deformation')
    parser.add_argument('--base', default='A', help='Wall to slice along')
    parser.add_argument('--output', default='figures/slices', help='Output directory')

    args = parser.parse_args()

    try:
        export_frames(base=args.base, output_dir=args.output)
    except HyperwallsError as e:
        print(f"❌ Error: {e}")
        sys.exit(1)


if __name__ == '__main__':
    main()
