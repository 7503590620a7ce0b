"""PID, fuzzy and hybrid cascade controllers"""
