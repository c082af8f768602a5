"""
QFuzz Sentiment - Tests Package
"""
