# Tests package for gcpoly
