"""
Mapping the (b, c) plane
========================

A scan fixes N, a, p and r and decides every point of a rational grid.  The
result is a CSV table and an SVG picture coloured by case.
"""
import os
import sys

from sobolev_oracle.cli import main

out = sys.argv[1] if len(sys.argv) > 1 else "region_map"
os.makedirs(out, exist_ok=True)

code = main(["scan", "--dim", "3", "--a", "1", "--p", "2", "--r", "12",
             "--b-range", "-4:4:81", "--c-range", "-8:12:101",
             "--out", os.path.join(out, "scan.csv"), "--svg", os.path.join(out, "scan.svg")])
print("exit code:", code)

with open(os.path.join(out, "scan.csv")) as fh:
    rows = fh.read().splitlines()
holding = [r for r in rows[1:] if ",true," in r]
print(len(rows) - 1, "cells,", len(holding), "hold")
print("first rows:")
print("\n".join(rows[:4]))
