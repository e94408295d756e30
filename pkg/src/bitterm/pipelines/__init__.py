"""Kedro pipelines: single-program termination analysis and corpus mode comparison"""
