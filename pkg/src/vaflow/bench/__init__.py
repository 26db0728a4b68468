"""Experiment runner: CSV traces and SVG plots for the three demonstrations."""

from ..trace import TraceRecord
from .csvio import emit_csv, read_csv
from .experiments import DEFAULTS, EXPERIMENTS, ExperimentSpec, RunResult, run_experiment
from .svg import emit_svg_plot, render_svg, trace_series
