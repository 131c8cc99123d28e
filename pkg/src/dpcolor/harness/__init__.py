"""Instance generators, file formats, stress campaigns and the command line."""
