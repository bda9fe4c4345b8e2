# Tests package for PixelBliss
