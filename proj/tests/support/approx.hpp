#pragma once

#include <doctest.h>

// doctest::Approx allows an absolute slack of epsilon * 1.0 on top of the
// relative one, which swallows whole quantities in SI units (1e-10 s,
// 1e-31 C m). Comparisons here are purely relative.
inline doctest::Approx rel(double value) { return doctest::Approx(value).scale(0.0); }
