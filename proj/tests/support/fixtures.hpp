#pragma once

#include "crnlap/crnlap.hpp"

namespace fixtures {

using crnlap::Matrix;
using crnlap::Rational;
using crnlap::Vector;

/// 1->2, 2->1, 2->3, 3->1.
template <class T = Rational>
crnlap::LabeledDigraph<T> running_example(T k12 = T(1), T k21 = T(1), T k23 = T(1), T k31 = T(1))
{
    return crnlap::build_digraph<T>(crnlap::numbered_vertices(3),
                                    {{"1", "2", k12}, {"2", "1", k21}, {"2", "3", k23}, {"3", "1", k31}});
}

/// Complexes y(1) = (2,1), y(2) = (0,2), y(3) = (1,0).
template <class T = Rational>
Matrix<T> planar_complexes()
{
    Matrix<T> y(2, 3);
    y << T(2), T(0), T(1), T(1), T(2), T(0);
    return y;
}

/// 1->2->3->1 with unit labels and the planar complexes.
template <class T = Rational>
crnlap::ReactionNetwork<T> three_cycle(T k = T(1))
{
    auto g = crnlap::build_digraph<T>(crnlap::numbered_vertices(3), {{"1", "2", k}, {"2", "3", k}, {"3", "1", k}});
    return crnlap::build_network<T>({"X1", "X2"}, planar_complexes<T>(), std::move(g));
}

/// The running example graph with the planar complexes.
template <class T = Rational>
crnlap::ReactionNetwork<T> running_network(T k12 = T(1), T k21 = T(1), T k23 = T(1), T k31 = T(1))
{
    return crnlap::build_network<T>({"X1", "X2"}, planar_complexes<T>(), running_example<T>(k12, k21, k23, k31));
}

/// Unit 3-cycle plus 4 <-> 5 with y(4) = (0,0), y(5) = (1,1).
template <class T = Rational>
crnlap::ReactionNetwork<T> two_component()
{
    auto g = crnlap::build_digraph<T>(crnlap::numbered_vertices(5), {{"1", "2", T(1)},
                                                                     {"2", "3", T(1)},
                                                                     {"3", "1", T(1)},
                                                                     {"4", "5", T(1)},
                                                                     {"5", "4", T(1)}});
    Matrix<T> y(2, 5);
    y << T(2), T(0), T(1), T(0), T(1), T(1), T(2), T(0), T(0), T(1);
    return crnlap::build_network<T>({"X1", "X2"}, y, std::move(g));
}

/// 2X1 -> X1+X2 -> 2X2 -> 2X1 with unit labels; total mass is conserved.
template <class T = Rational>
crnlap::ReactionNetwork<T> conserving_cycle()
{
    auto g = crnlap::build_digraph<T>(crnlap::numbered_vertices(3), {{"1", "2", T(1)}, {"2", "3", T(1)}, {"3", "1", T(1)}});
    Matrix<T> y(2, 3);
    y << T(2), T(1), T(0), T(0), T(1), T(2);
    return crnlap::build_network<T>({"X1", "X2"}, y, std::move(g));
}

template <class T>
Vector<T> vec(std::initializer_list<T> values)
{
    Vector<T> v(static_cast<crnlap::Index>(values.size()));
    crnlap::Index i = 0;
    for (const auto& x : values) v(i++) = x;
    return v;
}

inline Vector<double> dvec(std::initializer_list<double> values) { return vec<double>(values); }

inline Rational q(long p, long d = 1) { return Rational(p, d); }

} // namespace fixtures
