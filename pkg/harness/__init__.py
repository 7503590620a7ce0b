"""Experiment harness: presets, runner, metrics, trace files, plots and CLI"""
