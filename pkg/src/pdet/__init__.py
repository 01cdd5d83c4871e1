"""Exact p-determinants of differential operators and their regularized lifts."""
