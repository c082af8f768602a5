"""
QFuzz Sentiment - Scripts Package
"""
