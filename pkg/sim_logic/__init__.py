"""
Simulator core: geometry, tracks, vehicle dynamics, sensing, networks, evolution and episodes
"""
