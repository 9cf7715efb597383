#!/usr/bin/env python3
"""
Export the centers and radii of the wall spheres at several parameter values.

Writes one CSV with a row per (t, wall): planes carry their normal and offset,
spheres their center and radius.
"""

import sys
from pathlib import Path

import pandas as pd
from tqdm import tqdm

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from hyperwalls.arrangement import Parameter, builtin  # noqa: E402
from hyperwalls.errors import HyperwallsError  # noqa: E402
from hyperwalls.infinity import sphere_table  # noqa: E402


def export_tables(t_values, output_file='figures/spheres.csv'):
    """
    Args:
        t_values: Float parameters t in (0, 1]
        output_file: CSV destination
    """
    rows = []
    for t in tqdm(t_values, desc="Sphere tables"):
        family = builtin("Family22", Parameter.numeric(t))
        for s in sphere_table(family):
            row = {'t': t, 'label': s.label, 'kind': 'plane' if s.is_plane else 'sphere'}
            if s.is_plane:
                row.update(nx=s.normal[0], ny=s.normal[1], nz=s.normal[2], offset=s.offset)
            else:
                row.update(cx=s.center[0], cy=s.center[1], cz=s.center[2], radius=s.radius)
            rows.append(row)

    out = Path(output_file)
    out.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(rows)
    df.to_csv(out, index=False)
    print(f"✓ {len(df)} rows written to {out}")


def main():
    import argparse

    parser = argparse.ArgumentParser(description='Export wall sphere tables')
    parser.add_argument('--t', type=float, nargs='+', default=[1.0, 0.9, 0.8], help='Parameter values')
    parser.add_argument('--output', default='figures/spheres.csv', help='Output CSV')

    args = parser.parse_args()

    try:
        export_tables(args.t, output_file=args.output)
    except HyperwallsError as e:
        print(f"❌ Error: {e}")
        sys.exit(1)


if __name__ == '__main__':
    main()
