"""Time loop, result frames, VTK files and hot start."""
