"""
Built-in scenarios and trial data
"""
