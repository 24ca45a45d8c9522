"""
Run artifacts: experiment configs, CSV statistics and replay files
"""
