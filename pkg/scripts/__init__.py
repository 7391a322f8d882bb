"""Maintenance scripts for dmera-bench"""
