"""Configs, experiment drivers, reports and the command line."""
